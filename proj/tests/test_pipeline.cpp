#include "doctest.h"

#include "recnetq/pipeline.hpp"
#include "recnetq/series_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace recnetq;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("recnetq_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> tree(const fs::path& root)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    return out;
}

SweepConfig small_config(const fs::path& root)
{
    SweepConfig c;
    c.alpha_sq = {25.0};
    c.kappa = {0.0033};
    c.long_grid = {10000.0, 1.0, 2500};
    c.short_grid = {0.0, 5.0, 401};
    c.output_dir = root / "out";
    c.cache_dir = root / "cache";
    c.epsilon_resolution = 0.01;
    return c;
}

} // namespace

TEST_CASE("kappa grid")
{
    const auto g = default_kappa_grid();
    CHECK(g.size() == 41 + 6); // table values other than 0.1 are off the log grid
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(0.1));
    for (double k : table_kappas()) CHECK(std::find(g.begin(), g.end(), k) != g.end());
    CHECK(merge_grid({0.1, 0.2}, {0.2, 0.15}) == std::vector<double>{0.1, 0.15, 0.2});
}

TEST_CASE("config round trip and validation")
{
    nlohmann::json j = {{"alpha_sq", {20, 25}}, {"kappa", {0.1, 0.0}}, {"workers", 2}, {"long_grid", {{"count", 500}}}};
    const auto c = sweep_config_from_json(j);
    CHECK(c.kappa == std::vector<double>{0.0, 0.1});
    CHECK(c.long_grid.count == 500);
    CHECK(c.long_grid_overridden());
    CHECK(to_json(c)["long_grid_overridden"] == true);
    CHECK(sweep_config_from_json(nlohmann::json::object()).kappa == default_kappa_grid());
    CHECK(sweep_config_from_json({{"kappa", nullptr}}).kappa == default_kappa_grid());
    CHECK_THROWS_AS(sweep_config_from_json({{"kappa", {1.5}}}), std::invalid_argument);
    CHECK_THROWS_AS(sweep_config_from_json({{"short_grid", {{"count", 0}}}}), std::invalid_argument);
    CHECK_THROWS_AS(sweep_config_from_json({{"kappa", "x"}}), std::invalid_argument);
    CHECK_FALSE(SweepConfig{}.long_grid_overridden());
}

TEST_CASE("empty kappa list gives an empty summary")
{
    const auto root = scratch("empty");
    SweepConfig c;
    c.kappa = {};
    c.output_dir = root;
    const auto r = run_sweep(c);
    CHECK(r.all_ok());
    CHECK(r.cells.empty());
    CHECK(fs::exists(root / "summary.json"));
    CHECK(fs::exists(root / "MANIFEST.json"));
}

TEST_CASE("window statistics and classes")
{
    MeanPhotonSeries s{0.0, 1.0, {1, 3, 1, 3, 5}};
    const auto w = window_stats(s, 0.0, 3.0);
    CHECK(w.samples == 4);
    CHECK(w.mean == 2.0);
    CHECK(w.stddev == 1.0);
    ShortTimeThresholds t;
    CHECK(classify_short_time(0.01, t) == ShortTimeClass::Collapsed);
    CHECK(classify_short_time(0.3, t) == ShortTimeClass::Pinched);
    CHECK(classify_short_time(0.7, t) == ShortTimeClass::Spread);
    const std::vector<double> y{0.0, 0.25, 0.5, 0.75, 1.0};
    CHECK(attractor_spread(y) == doctest::Approx(0.5));
}

TEST_CASE("series cache file round trip")
{
    const auto root = scratch("series");
    ModelParams p;
    p.kappa = 0.07;
    const InitialState init{4.0};
    const auto trunc = default_truncation(4.0);
    const TimeGrid grid{0.0, 0.7, 50};
    const auto header = series_header(p, init, trunc, grid);
    const auto cold = cached_mean_photon_series(root, p, init, trunc, grid, 1);
    CHECK_FALSE(cold.from_cache);
    const auto warm = cached_mean_photon_series(root, p, init, trunc, grid, 1);
    CHECK(warm.from_cache);
    CHECK(warm.series.values == cold.series.values);
    CHECK(warm.series.values == mean_photon_series(p, init, trunc, grid, 1).values);
    CHECK(cold.key == series_key(header));

    ModelParams other = p;
    other.kappa = 0.1;
    CHECK_FALSE(read_series_file(cold.file, series_header(other, init, trunc, grid)).has_value());
    // A truncated file is ignored and recomputed.
    std::string bytes = slurp(cold.file);
    std::ofstream(cold.file, std::ios::binary | std::ios::trunc) << bytes.substr(0, bytes.size() / 2);
    CHECK_FALSE(read_series_file(cold.file, header).has_value());
    CHECK_FALSE(cached_mean_photon_series(root, p, init, trunc, grid, 1).from_cache);
}

TEST_CASE("edge list round trip")
{
    const auto root = scratch("edges");
    const std::vector<Edge> e{{3, 1}, {0, 1}, {2, 4}};
    const RecurrenceNetwork net(6, e);
    write_edge_list(root / "g.txt", net, {6, 0.025, "abc"});
    const auto back = read_edge_list(root / "g.txt");
    CHECK(back.header.nodes == 6);
    CHECK(back.header.eps == 0.025);
    CHECK(back.header.input_hash == "abc");
    CHECK(back.network.edges() == net.edges());
    CHECK(back.network.node_count() == 6);

    std::ofstream(root / "bad.txt") << "1 2\n2 x\n";
    CHECK_THROWS(read_edge_list(root / "bad.txt"));
    std::ofstream(root / "bare.txt") << "1 2\n2 5\n";
    CHECK(read_edge_list(root / "bare.txt").network.node_count() == 5);
}

TEST_CASE("cell outputs are deterministic across cache state and workers")
{
    const auto root = scratch("cell");
    auto cfg = small_config(root);
    const auto cold = run_cell(cfg, 0.0033, 25.0, 1);
    REQUIRE(cold.ok);
    CHECK_FALSE(cold.series_from_cache);
    auto first = tree(cfg.output_dir);

    fs::remove_all(cfg.output_dir);
    const auto warm = run_cell(cfg, 0.0033, 25.0, 3);
    REQUIRE(warm.ok);
    CHECK(warm.series_from_cache);
    auto second = tree(cfg.output_dir);
    first.erase(cell_dir_name(0.0033, 25.0) + "/timing.json");
    second.erase(cell_dir_name(0.0033, 25.0) + "/timing.json");
    CHECK(first == second);

    for (const char* f : {"embedding.json", "delay_plot.csv", "vectors.csv", "epsilon.json", "cell.json",
                          "short_series.csv", "short_windows.csv", "short_time.json"})
        CHECK(fs::exists(cold.dir / f));
    CHECK(cold.scan.front().eps == cold.eps.epsilon_c);
    for (const auto& p : cold.scan) CHECK(p.eps >= cold.eps.epsilon_c);
}

TEST_CASE("epsilon scan trends")
{
    const auto root = scratch("scan");
    auto cfg = small_config(root);
    cfg.short_time = false;
    cfg.epsilon_multipliers = {1.0, 1.5, 2.0, 3.0};
    const auto c = run_cell(cfg, 0.0, 25.0, 1);
    REQUIRE(c.ok);
    for (std::size_t i = 1; i < c.scan.size(); ++i) {
        CHECK(c.scan[i].metrics.link_density >= c.scan[i - 1].metrics.link_density);
        CHECK(c.scan[i].metrics.apl.apl <= c.scan[i - 1].metrics.apl.apl);
    }
}

TEST_CASE("failed cells are reported without aborting the sweep")
{
    const auto root = scratch("fail");
    auto cfg = small_config(root);
    cfg.short_time = false;
    cfg.kappa = {0.0033};
    cfg.alpha_sq = {0.0, 25.0}; // the vacuum gives a constant series
    const auto r = run_sweep(cfg);
    CHECK(r.cells.size() == 2);
    CHECK(r.failed.size() == 1);
    CHECK_FALSE(r.cells[0].ok);
    CHECK(r.cells[1].ok);
    const auto manifest = nlohmann::json::parse(slurp(cfg.output_dir / "MANIFEST.json"));
    bool timing_null = false;
    for (const auto& a : manifest["artifacts"])
        if (a["path"].get<std::string>().ends_with("timing.json")) timing_null = a["hash"].is_null();
    CHECK(timing_null);
}
