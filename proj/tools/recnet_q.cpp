// recnet-q: batch driver for the recurrence-network sweep.
//
//   recnet-q run --config sweep.json
//   recnet-q cell --kappa 0.0033 --alpha-sq 25 --chi 5 [--out dir]
//   recnet-q metrics --edges edges.txt
//
// Exit status: 0 on success, 1 on usage or input errors, 2 when some cells failed.
// RECNETQ_CACHE_DIR overrides the series cache location.

#include "recnetq/pipeline.hpp"
#include "recnetq/series_io.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace recnetq;

int cmd_run(const std::string& config_path, const std::string& out_override, unsigned workers)
{
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "recnet-q: cannot read " << config_path << '\n';
        return 1;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "recnet-q: " << config_path << ": " << e.what() << '\n';
        return 1;
    }
    SweepConfig cfg = sweep_config_from_json(j);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (workers != 0) cfg.workers = workers;

    const SweepResult r = run_sweep(cfg);
    for (const auto& s : r.summaries) {
        std::printf("alpha_sq=%g argmax_cc=", s.alpha_sq);
        if (s.argmax_cc) std::printf("%g", *s.argmax_cc); else std::printf("-");
        std::printf(" argmax_transitivity=");
        if (s.argmax_transitivity) std::printf("%g", *s.argmax_transitivity); else std::printf("-");
        std::printf("\n");
    }
    for (const auto& c : r.cells)
        if (!c.ok) std::fprintf(stderr, "failed: %s: %s\n", cell_dir_name(c.kappa, c.alpha_sq).c_str(), c.error.c_str());
    std::printf("cells=%zu failed=%zu output=%s\n", r.cells.size(), r.failed.size(), cfg.output_dir.string().c_str());
    return r.all_ok() ? 0 : 2;
}

int cmd_cell(double kappa, double alpha_sq, double chi, const std::string& out, unsigned workers, bool edges)
{
    SweepConfig cfg;
    cfg.alpha_sq = {alpha_sq};
    cfg.kappa = {kappa};
    cfg.chi = chi;
    cfg.output_dir = out;
    cfg.workers = workers == 0 ? 1 : workers;
    cfg.write_edges = edges;
    cfg.validate();
    const CellResult c = run_cell(cfg, kappa, alpha_sq, cfg.workers);
    if (!c.ok) {
        std::fprintf(stderr, "failed: %s\n", c.error.c_str());
        return 2;
    }
    std::printf("kappa=%g alpha_sq=%g t_d=%d d_emb=%d eps_c=%.3f cc=%.6f transitivity=%.6f\n", kappa, alpha_sq,
                c.delay.t_d, c.dimension.d_emb, c.eps.epsilon_c, c.cc_at_c(), c.transitivity_at_c());
    if (c.short_time)
        std::printf("short_time=%s ratio=%.4f\n", to_string(c.short_time->cls), c.short_time->late_to_early);
    std::printf("output=%s\n", c.dir.string().c_str());
    return 0;
}

int cmd_metrics(const std::string& edges_path, std::size_t exact_limit, std::uint64_t seed)
{
    const EdgeListFile f = read_edge_list(edges_path);
    PathLengthOptions apl;
    apl.exact_limit = exact_limit;
    apl.seed = seed;
    const MetricsReport m = compute_metrics(f.network, apl);
    nlohmann::json j = metrics_to_json(m, f.header.eps);
    j["l2"] = laplacian_l2(f.network).l2;
    j["components"] = component_count(f.network);
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& [deg, count] : m.degree_histogram) hist.push_back({deg, count});
    j["degree_histogram"] = hist;
    std::cout << j.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Recurrence-network analysis of the mean photon number series"};
    app.require_subcommand(1);
    unsigned workers = 0;
    app.add_option("-j,--workers", workers, "worker threads (0: keep config value / 1)");

    auto* run = app.add_subcommand("run", "run a sweep described by a JSON config");
    std::string config, run_out;
    run->add_option("--config", config, "sweep config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "override output_dir");

    auto* cell = app.add_subcommand("cell", "run one (kappa, |alpha|^2) cell");
    double kappa = 0.0, alpha_sq = 25.0, chi = 5.0;
    std::string cell_out = "recnetq_out";
    bool edges = false;
    cell->add_option("--kappa", kappa)->required();
    cell->add_option("--alpha-sq", alpha_sq)->required();
    cell->add_option("--chi", chi, "chi/lambda")->capture_default_str();
    cell->add_option("--out", cell_out)->capture_default_str();
    cell->add_flag("--edges", edges, "write the edge list at eps_c");

    auto* metrics = app.add_subcommand("metrics", "network measures of an edge-list file");
    std::string edges_path;
    std::size_t exact_limit = 5000;
    std::uint64_t seed = 20190101;
    metrics->add_option("--edges", edges_path)->required()->check(CLI::ExistingFile);
    metrics->add_option("--apl-exact-limit", exact_limit)->capture_default_str();
    metrics->add_option("--seed", seed)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config, run_out, workers);
        if (*cell) return cmd_cell(kappa, alpha_sq, chi, cell_out, workers, edges);
        if (*metrics) return cmd_metrics(edges_path, exact_limit, seed);
    } catch (const std::exception& e) {
        std::cerr << "recnet-q: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
