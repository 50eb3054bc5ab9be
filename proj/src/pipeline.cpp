#include "recnetq/pipeline.hpp"

#include "recnetq/parallel.hpp"
#include "recnetq/series_io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace recnetq {

namespace fs = std::filesystem;

const std::vector<double>& table_kappas()
{
    static const std::vector<double> k{0.0, 0.0012, 0.0032, 0.0033, 0.0034, 0.07, 0.1};
    return k;
}

std::vector<double> merge_grid(std::vector<double> grid, const std::vector<double>& extra)
{
    grid.insert(grid.end(), extra.begin(), extra.end());
    std::sort(grid.begin(), grid.end());
    std::vector<double> out;
    for (double v : grid)
        if (out.empty() || std::abs(v - out.back()) > 1e-12) out.push_back(v);
    return out;
}

std::vector<double> default_kappa_grid()
{
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) {
        // 6 significant digits
        const double v = std::pow(10.0, -3.0 + k / 20.0);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        grid.push_back(std::strtod(buf, nullptr));
    }
    return merge_grid(grid, table_kappas());
}

void SweepConfig::validate() const
{
    for (double k : kappa)
        if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("kappa values must lie in [0, 1]");
    for (double a : alpha_sq)
        if (!(a >= 0.0)) throw std::invalid_argument("alpha_sq values must be non-negative");
    if (!(chi > 0.0)) throw std::invalid_argument("chi must be positive");
    if (short_grid.count < 1 || !(short_grid.dt > 0.0)) throw std::invalid_argument("short grid must be non-empty");
    if (long_grid.count < 2 || !(long_grid.dt > 0.0)) throw std::invalid_argument("long grid must have >= 2 samples");
    if (!(epsilon_resolution > 0.0)) throw std::invalid_argument("epsilon_resolution must be positive");
    for (double m : epsilon_multipliers)
        if (!(m >= 1.0)) throw std::invalid_argument("epsilon multipliers must be >= 1 (scans start at eps_c)");
    if (bins < 2 || max_lag < 3 || d_max < 2) throw std::invalid_argument("bins >= 2, max_lag >= 3, d_max >= 2 required");
    if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw std::invalid_argument("tail_eps must be in (0, 1)");
}

bool SweepConfig::long_grid_overridden() const
{
    return long_grid.t0 != 10000.0 || long_grid.dt != 1.0 || long_grid.count != 25000;
}

fs::path SweepConfig::resolved_cache_dir() const
{
    if (!cache_dir.empty()) return cache_dir;
    if (const char* env = std::getenv("RECNETQ_CACHE_DIR"); env != nullptr && *env != '\0') return env;
    return output_dir / "cache";
}

namespace {

TimeGrid grid_from_json(const nlohmann::json& j, TimeGrid g)
{
    if (j.contains("t0")) g.t0 = j.at("t0").get<double>();
    if (j.contains("dt")) g.dt = j.at("dt").get<double>();
    if (j.contains("count")) g.count = j.at("count").get<std::size_t>();
    return g;
}

nlohmann::json grid_to_json(const TimeGrid& g) { return {{"t0", g.t0}, {"dt", g.dt}, {"count", g.count}}; }

} // namespace

SweepConfig sweep_config_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    SweepConfig c;
    try {
        if (j.contains("alpha_sq")) c.alpha_sq = j.at("alpha_sq").get<std::vector<double>>();
        if (!j.contains("kappa") || j.at("kappa").is_null())
            c.kappa = default_kappa_grid();
        else
            c.kappa = j.at("kappa").get<std::vector<double>>();
        std::sort(c.kappa.begin(), c.kappa.end());
        if (j.contains("chi")) c.chi = j.at("chi").get<double>();
        if (j.contains("short_grid")) c.short_grid = grid_from_json(j.at("short_grid"), c.short_grid);
        if (j.contains("long_grid")) c.long_grid = grid_from_json(j.at("long_grid"), c.long_grid);
        if (j.contains("epsilon_resolution")) c.epsilon_resolution = j.at("epsilon_resolution").get<double>();
        if (j.contains("epsilon_multipliers")) c.epsilon_multipliers = j.at("epsilon_multipliers").get<std::vector<double>>();
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("cache_dir")) c.cache_dir = j.at("cache_dir").get<std::string>();
        if (j.contains("workers")) c.workers = j.at("workers").get<unsigned>();
        if (j.contains("sampling_seed")) c.sampling_seed = j.at("sampling_seed").get<std::uint64_t>();
        if (j.contains("bins")) c.bins = j.at("bins").get<int>();
        if (j.contains("max_lag")) c.max_lag = j.at("max_lag").get<int>();
        if (j.contains("d_max")) c.d_max = j.at("d_max").get<int>();
        if (j.contains("tail_eps")) c.tail_eps = j.at("tail_eps").get<double>();
        if (j.contains("apl_exact_limit")) c.apl_exact_limit = j.at("apl_exact_limit").get<std::size_t>();
        if (j.contains("apl_sample_sources")) c.apl_sample_sources = j.at("apl_sample_sources").get<std::size_t>();
        if (j.contains("short_time")) c.short_time = j.at("short_time").get<bool>();
        if (j.contains("write_edges")) c.write_edges = j.at("write_edges").get<bool>();
        if (j.contains("write_vectors")) c.write_vectors = j.at("write_vectors").get<bool>();
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            if (t.contains("collapsed_below")) c.thresholds.collapsed_below = t.at("collapsed_below").get<double>();
            if (t.contains("spread_from")) c.thresholds.spread_from = t.at("spread_from").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad config: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::json to_json(const SweepConfig& c)
{
    return {
        {"alpha_sq", c.alpha_sq},
        {"kappa", c.kappa},
        {"chi", c.chi},
        {"short_grid", grid_to_json(c.short_grid)},
        {"long_grid", grid_to_json(c.long_grid)},
        {"long_grid_overridden", c.long_grid_overridden()},
        {"epsilon_resolution", c.epsilon_resolution},
        {"epsilon_multipliers", c.epsilon_multipliers},
        {"sampling_seed", c.sampling_seed},
        {"bins", c.bins},
        {"max_lag", c.max_lag},
        {"d_max", c.d_max},
        {"tail_eps", c.tail_eps},
        {"apl_exact_limit", c.apl_exact_limit},
        {"apl_sample_sources", c.apl_sample_sources},
        {"short_time", c.short_time},
        {"write_edges", c.write_edges},
        {"write_vectors", c.write_vectors},
        {"thresholds", {{"collapsed_below", c.thresholds.collapsed_below}, {"spread_from", c.thresholds.spread_from}}},
    };
}

const char* to_string(ShortTimeClass c)
{
    switch (c) {
    case ShortTimeClass::Collapsed:
        return "collapsed";
    case ShortTimeClass::Pinched:
        return "pinched";
    case ShortTimeClass::Spread:
        return "spread";
    }
    return "unknown";
}

WindowStats window_stats(const MeanPhotonSeries& s, double begin, double end)
{
    WindowStats w{begin, end, 0.0, 0.0, 0};
    double sum = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        const double t = s.t0 + static_cast<double>(k) * s.dt;
        if (t < begin || t > end) continue;
        sum += s.values[k];
        ++w.samples;
    }
    if (w.samples == 0) return w;
    w.mean = sum / static_cast<double>(w.samples);
    double var = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        const double t = s.t0 + static_cast<double>(k) * s.dt;
        if (t < begin || t > end) continue;
        var += (s.values[k] - w.mean) * (s.values[k] - w.mean);
    }
    w.stddev = std::sqrt(var / static_cast<double>(w.samples));
    return w;
}

ShortTimeClass classify_short_time(double late_to_early, const ShortTimeThresholds& t)
{
    if (late_to_early < t.collapsed_below) return ShortTimeClass::Collapsed;
    if (late_to_early < t.spread_from) return ShortTimeClass::Pinched;
    return ShortTimeClass::Spread;
}

std::string cell_dir_name(double kappa, double alpha_sq)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "a%.10g_k%.10g", alpha_sq, kappa);
    return buf;
}

namespace {

nlohmann::json window_json(const WindowStats& w)
{
    return {{"begin", w.begin}, {"end", w.end}, {"mean", w.mean}, {"stddev", w.stddev}, {"samples", w.samples}};
}

ModelParams params_for(const SweepConfig& cfg, double kappa)
{
    ModelParams p;
    p.chi = cfg.chi;
    p.kappa = kappa;
    return p;
}

void write_series_csv(const fs::path& path, const MeanPhotonSeries& s)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "tau,value\n";
    for (std::size_t k = 0; k < s.values.size(); ++k)
        out << format_real(s.t0 + static_cast<double>(k) * s.dt) << ',' << format_real(s.values[k]) << '\n';
}

std::string eps_tag(double eps)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", eps);
    return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

ShortTimeReport short_time_report(const SweepConfig& cfg, double kappa, double alpha_sq)
{
    const ModelParams params = params_for(cfg, kappa);
    const InitialState init{alpha_sq};
    const FockTruncation trunc = default_truncation(alpha_sq, cfg.tail_eps);
    const auto fetch = cached_mean_photon_series(cfg.resolved_cache_dir(), params, init, trunc, cfg.short_grid, 1);
    const MeanPhotonSeries& s = fetch.series;

    ShortTimeReport r;
    r.kappa = kappa;
    r.alpha_sq = alpha_sq;
    r.series_key = fetch.key;
    r.early = window_stats(s, 0.0, 1500.0);
    r.late = window_stats(s, 3000.0, 9000.0);
    r.core = window_stats(s, 4000.0, 8000.0);
    r.late_to_early = r.early.stddev > 0.0 ? r.late.stddev / r.early.stddev : 0.0;
    r.cls = classify_short_time(r.late_to_early, cfg.thresholds);
    const double t_end = s.t0 + static_cast<double>(s.values.size() - 1) * s.dt;
    for (double b = s.t0; b < t_end; b += 250.0) r.windows.push_back(window_stats(s, b, std::min(b + 250.0, t_end)));

    const fs::path dir = cfg.output_dir / cell_dir_name(kappa, alpha_sq);
    fs::create_directories(dir);
    write_series_csv(dir / "short_series.csv", s);
    {
        std::ofstream out(dir / "short_windows.csv", std::ios::binary | std::ios::trunc);
        out << "begin,end,mean,stddev,samples\n";
        for (const auto& w : r.windows)
            out << format_real(w.begin) << ',' << format_real(w.end) << ',' << format_real(w.mean) << ','
                << format_real(w.stddev) << ',' << w.samples << '\n';
    }
    write_json(dir / "short_time.json",
               {{"kappa", kappa},
                {"alpha_sq", alpha_sq},
                {"grid", grid_to_json(cfg.short_grid)},
                {"series_key", r.series_key},
                {"early", window_json(r.early)},
                {"late", window_json(r.late)},
                {"core", window_json(r.core)},
                {"late_to_early", r.late_to_early},
                {"class", to_string(r.cls)},
                {"thresholds",
                 {{"statistic", "stddev[3000,9000] / stddev[0,1500]"},
                  {"collapsed_below", cfg.thresholds.collapsed_below},
                  {"spread_from", cfg.thresholds.spread_from}}}});
    return r;
}

double attractor_spread(std::span<const double> rescaled)
{
    if (rescaled.empty()) return 0.0;
    std::vector<double> v(rescaled.begin(), rescaled.end());
    std::sort(v.begin(), v.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return quantile(0.75) - quantile(0.25);
}

nlohmann::json metrics_to_json(const MetricsReport& m, double eps)
{
    nlohmann::json j{
        {"eps", eps},
        {"nodes", m.nodes},
        {"edges", m.edges},
        {"link_density", m.link_density},
        {"global_cc", m.global_cc},
        {"transitivity", m.transitivity},
        {"triangles", m.census.triangles},
        {"connected_triples", m.census.connected_triples},
        {"apl_defined", m.apl_defined},
        {"assortativity_defined", m.assortativity.defined},
        {"assortativity_definition", "Pearson correlation of degrees at the two ends of each edge"},
    };
    j["apl"] = m.apl_defined ? nlohmann::json(m.apl.apl) : nlohmann::json(nullptr);
    j["apl_exact"] = m.apl.exact;
    j["apl_sources"] = m.apl.sources;
    j["apl_seed"] = m.apl.seed;
    j["assortativity"] = m.assortativity.defined ? nlohmann::json(m.assortativity.value) : nlohmann::json(nullptr);
    return j;
}

CellResult run_cell(const SweepConfig& cfg, double kappa, double alpha_sq, unsigned workers)
{
    CellResult r;
    r.kappa = kappa;
    r.alpha_sq = alpha_sq;
    r.dir = cfg.output_dir / cell_dir_name(kappa, alpha_sq);
    nlohmann::json timing = nlohmann::json::object();
    const auto t_cell = Clock::now();
    try {
        fs::create_directories(r.dir);
        const ModelParams params = params_for(cfg, kappa);
        const InitialState init{alpha_sq};
        const FockTruncation trunc = default_truncation(alpha_sq, cfg.tail_eps);

        auto t0 = Clock::now();
        const auto fetch = cached_mean_photon_series(cfg.resolved_cache_dir(), params, init, trunc, cfg.long_grid, workers);
        timing["series"] = seconds_since(t0);
        r.series_key = fetch.key;
        r.series_from_cache = fetch.from_cache;

        t0 = Clock::now();
        const auto y = rescale(fetch.series.values);
        const auto u = uniform_deviate(y);
        r.delay = first_minimum_lag(u, cfg.max_lag, cfg.bins);
        r.dimension = fnn_embedding_dimension(u, r.delay.t_d, cfg.d_max);
        const StateVectorSet vs = embed(u, {r.delay.t_d, r.dimension.d_emb});
        r.vectors = vs.size();
        r.attractor_spread = attractor_spread(y);
        timing["embedding"] = seconds_since(t0);

        write_json(r.dir / "embedding.json",
                   {{"kappa", kappa},
                    {"alpha_sq", alpha_sq},
                    {"series_key", r.series_key},
                    {"n", u.size()},
                    {"n_vectors", r.vectors},
                    {"t_d", r.delay.t_d},
                    {"d_emb", r.dimension.d_emb},
                    {"bins", cfg.bins},
                    {"max_lag", cfg.max_lag},
                    {"d_max", cfg.d_max},
                    {"flags",
                     {{"no_clear_minimum", !r.delay.clear_minimum}, {"fnn_unsatisfied", !r.dimension.satisfied}}},
                    {"mutual_information", r.delay.mi},
                    {"fnn_fraction", r.dimension.fnn_fraction},
                    {"fnn", {{"r_tol", FnnOptions{}.r_tol}, {"a_tol", FnnOptions{}.a_tol}, {"threshold", FnnOptions{}.threshold}}},
                    {"attractor_spread", r.attractor_spread},
                    {"attractor_spread_definition", "interquartile range of the rescaled series"}});
        {
            std::ofstream out(r.dir / "delay_plot.csv", std::ios::binary | std::ios::trunc);
            out << "i,y,y_delayed,u,u_delayed\n";
            const auto td = static_cast<std::size_t>(r.delay.t_d);
            for (std::size_t i = 0; i + td < y.size(); ++i)
                out << (i + 1) << ',' << format_real(y[i]) << ',' << format_real(y[i + td]) << ',' << format_real(u[i])
                    << ',' << format_real(u[i + td]) << '\n';
        }
        if (cfg.write_vectors) {
            std::ofstream out(r.dir / "vectors.csv", std::ios::binary | std::ios::trunc);
            for (std::size_t k = 0; k < vs.dim(); ++k) out << (k ? "," : "") << "x" << k;
            out << '\n';
            for (std::size_t j = 0; j < vs.size(); ++j) {
                for (std::size_t k = 0; k < vs.dim(); ++k) out << (k ? "," : "") << format_real(vs[j][k]);
                out << '\n';
            }
        }

        t0 = Clock::now();
        r.eps = critical_epsilon(vs, {cfg.epsilon_resolution, true, workers});
        timing["critical_epsilon"] = seconds_since(t0);
        nlohmann::json probes = nlohmann::json::array();
        for (const auto& p : r.eps.probes) probes.push_back({{"eps", p.eps}, {"connected", p.connected}});
        write_json(r.dir / "epsilon.json", {{"epsilon_c", r.eps.epsilon_c},
                                            {"grid_index", r.eps.grid_index},
                                            {"resolution", cfg.epsilon_resolution},
                                            {"l2_at_c", r.eps.l2_at_c},
                                            {"l2_converged", r.eps.l2_converged},
                                            {"probes", probes}});

        t0 = Clock::now();
        std::vector<long> indices;
        for (double m : cfg.epsilon_multipliers) {
            const long k = std::max(r.eps.grid_index, std::lround(m * static_cast<double>(r.eps.grid_index)));
            indices.push_back(k);
        }
        if (indices.empty() || std::find(indices.begin(), indices.end(), r.eps.grid_index) == indices.end())
            indices.push_back(r.eps.grid_index);
        std::sort(indices.begin(), indices.end());
        indices.erase(std::unique(indices.begin(), indices.end()), indices.end());

        PathLengthOptions apl;
        apl.exact_limit = cfg.apl_exact_limit;
        apl.sample_sources = cfg.apl_sample_sources;
        apl.seed = cfg.sampling_seed;
        apl.workers = workers;
        for (long k : indices) {
            const double eps = static_cast<double>(k) * cfg.epsilon_resolution;
            const auto net = build_network(vs, eps, workers);
            EpsilonScanPoint pt;
            pt.multiplier = static_cast<double>(k) / static_cast<double>(r.eps.grid_index);
            pt.eps = eps;
            pt.metrics = compute_metrics(net, apl);
            const std::string tag = eps_tag(eps);
            auto mj = metrics_to_json(pt.metrics, eps);
            mj["kappa"] = kappa;
            mj["alpha_sq"] = alpha_sq;
            mj["multiplier"] = pt.multiplier;
            mj["flags"] = {{"apl_sampled", !pt.metrics.apl.exact}, {"assortativity_undefined", !pt.metrics.assortativity.defined}};
            write_json(r.dir / ("metrics_eps_" + tag + ".json"), mj);
            {
                std::ofstream out(r.dir / ("degree_hist_eps_" + tag + ".csv"), std::ios::binary | std::ios::trunc);
                out << "degree,count,frequency\n";
                for (const auto& [deg, count] : pt.metrics.degree_histogram)
                    out << deg << ',' << count << ','
                        << format_real(static_cast<double>(count) / static_cast<double>(pt.metrics.nodes)) << '\n';
            }
            if (cfg.write_edges && k == r.eps.grid_index)
                write_edge_list(r.dir / ("edges_eps_" + tag + ".txt"), net, {net.node_count(), eps, r.series_key});
            r.scan.push_back(std::move(pt));
        }
        timing["metrics"] = seconds_since(t0);

        if (cfg.short_time) {
            t0 = Clock::now();
            r.short_time = short_time_report(cfg, kappa, alpha_sq);
            timing["short_time"] = seconds_since(t0);
        }
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
    }
    timing["total"] = seconds_since(t_cell);

    nlohmann::json cell{{"kappa", kappa}, {"alpha_sq", alpha_sq}, {"ok", r.ok}};
    if (!r.ok) cell["error"] = r.error;
    if (r.ok) {
        cell["series_key"] = r.series_key;
        cell["t_d"] = r.delay.t_d;
        cell["d_emb"] = r.dimension.d_emb;
        cell["epsilon_c"] = r.eps.epsilon_c;
        cell["cc_at_c"] = r.cc_at_c();
        cell["transitivity_at_c"] = r.transitivity_at_c();
        cell["attractor_spread"] = r.attractor_spread;
        if (r.short_time) cell["short_time_class"] = to_string(r.short_time->cls);
    }
    try {
        write_json(r.dir / "cell.json", cell);
        write_json(r.dir / "timing.json", {{"seconds", timing}, {"series_from_cache", r.series_from_cache}});
    } catch (const std::exception& e) {
        if (r.ok) {
            r.ok = false;
            r.error = e.what();
        }
    }
    return r;
}

std::optional<double> argmax_kappa(const std::vector<const CellResult*>& cells, double (CellResult::*value)() const)
{
    std::optional<double> best_kappa;
    double best = -1.0;
    for (const CellResult* c : cells) {
        if (!c->ok) continue;
        const double v = (c->*value)();
        if (!best_kappa || v > best) {
            best = v;
            best_kappa = c->kappa;
        }
    }
    return best_kappa;
}

namespace {

void collect_artifacts(const fs::path& root, nlohmann::json& list)
{
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    const fs::path cache_rel = "cache";
    for (const auto& f : files) {
        const fs::path rel = fs::relative(f, root);
        if (rel == "MANIFEST.json" || *rel.begin() == cache_rel) continue;
        const bool deterministic = rel.filename() != "timing.json";
        nlohmann::json entry{{"path", rel.generic_string()}, {"deterministic", deterministic}};
        entry["hash"] = deterministic ? nlohmann::json(file_hash(f)) : nlohmann::json(nullptr);
        list.push_back(entry);
    }
}

} // namespace

SweepResult run_sweep(const SweepConfig& cfg)
{
    cfg.validate();
    fs::create_directories(cfg.output_dir);

    std::vector<std::pair<double, double>> jobs; // (alpha, kappa)
    for (double a : cfg.alpha_sq)
        for (double k : cfg.kappa) jobs.emplace_back(a, k);

    SweepResult out;
    out.cells.resize(jobs.size());
    const unsigned workers = cfg.workers == 0 ? default_workers() : cfg.workers;
    const unsigned cell_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
    const unsigned inner = jobs.size() <= 1 ? workers : 1;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
            out.cells[i] = run_cell(cfg, jobs[i].second, jobs[i].first, inner);
    };
    if (cell_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < cell_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    nlohmann::json summary{{"config", to_json(cfg)}, {"alphas", nlohmann::json::array()}};
    for (const auto& c : out.cells)
        if (!c.ok) out.failed.push_back(cell_dir_name(c.kappa, c.alpha_sq));

    for (double a : cfg.alpha_sq) {
        std::vector<const CellResult*> cells;
        for (const auto& c : out.cells)
            if (c.alpha_sq == a) cells.push_back(&c);
        AlphaSummary s;
        s.alpha_sq = a;
        s.argmax_cc = argmax_kappa(cells, &CellResult::cc_at_c);
        s.argmax_transitivity = argmax_kappa(cells, &CellResult::transitivity_at_c);
        out.summaries.push_back(s);

        char name[64];
        std::snprintf(name, sizeof name, "%.10g", a);
        {
            std::ofstream csv(cfg.output_dir / (std::string("summary_alpha_") + name + ".csv"), std::ios::binary | std::ios::trunc);
            csv << "kappa,status,cc,transitivity,epsilon_c,t_d,d_emb,l2_at_c,attractor_spread,short_time_class\n";
            for (const CellResult* c : cells) {
                csv << format_real(c->kappa) << ',' << (c->ok ? "ok" : "failed");
                if (c->ok)
                    csv << ',' << format_real(c->cc_at_c()) << ',' << format_real(c->transitivity_at_c()) << ','
                        << format_real(c->eps.epsilon_c) << ',' << c->delay.t_d << ',' << c->dimension.d_emb << ','
                        << format_real(c->eps.l2_at_c) << ',' << format_real(c->attractor_spread) << ','
                        << (c->short_time ? to_string(c->short_time->cls) : "");
                else
                    csv << ",,,,,,,,";
                csv << '\n';
            }
        }
        {
            std::ofstream csv(cfg.output_dir / (std::string("eps_scan_alpha_") + name + ".csv"), std::ios::binary | std::ios::trunc);
            csv << "kappa,eps,multiplier,apl,link_density,cc,transitivity,assortativity\n";
            for (const CellResult* c : cells) {
                if (!c->ok) continue;
                for (const auto& p : c->scan) {
                    csv << format_real(c->kappa) << ',' << format_real(p.eps) << ',' << format_real(p.multiplier) << ','
                        << (p.metrics.apl_defined ? format_real(p.metrics.apl.apl) : "") << ','
                        << format_real(p.metrics.link_density) << ',' << format_real(p.metrics.global_cc) << ','
                        << format_real(p.metrics.transitivity) << ','
                        << (p.metrics.assortativity.defined ? format_real(p.metrics.assortativity.value) : "") << '\n';
                }
            }
        }
        nlohmann::json aj{{"alpha_sq", a}, {"cells", cells.size()}};
        aj["argmax_cc"] = s.argmax_cc ? nlohmann::json(*s.argmax_cc) : nlohmann::json(nullptr);
        aj["argmax_transitivity"] = s.argmax_transitivity ? nlohmann::json(*s.argmax_transitivity) : nlohmann::json(nullptr);
        summary["alphas"].push_back(aj);
    }
    summary["failed"] = out.failed;
    write_json(cfg.output_dir / "summary.json", summary);

    nlohmann::json manifest{{"config_hash", hex64(fnv1a64(to_json(cfg).dump()))}, {"artifacts", nlohmann::json::array()}};
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& c : out.cells)
        inputs.push_back({{"cell", cell_dir_name(c.kappa, c.alpha_sq)},
                          {"series_key", c.series_key},
                          {"short_series_key", c.short_time ? c.short_time->series_key : ""}});
    manifest["inputs"] = inputs;
    collect_artifacts(cfg.output_dir, manifest["artifacts"]);
    write_json(cfg.output_dir / "MANIFEST.json", manifest);
    return out;
}

} // namespace recnetq
