#include "recnetq/series_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace recnetq {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return hex64(fnv1a64(ss.str()));
}

std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json series_header(const ModelParams& params, const InitialState& init, const FockTruncation& trunc,
                             const TimeGrid& grid)
{
    return {
        {"format_version", kSeriesFormatVersion},
        {"params",
         {{"chi", params.chi},
          {"lambda", params.lambda},
          {"kappa", params.kappa},
          {"kappa2", params.kappa2},
          {"detuning", params.detuning}}},
        {"init", {{"alpha_sq", init.alpha_sq}}},
        {"trunc", {{"n_max", trunc.n_max}, {"tail_eps", trunc.tail_eps}}},
        {"grid", {{"t0", grid.t0}, {"dt", grid.dt}, {"count", grid.count}}},
    };
}

std::string series_key(const nlohmann::json& header) { return hex64(fnv1a64(header.dump())); }

void write_series_file(const fs::path& path, const nlohmann::json& header, const MeanPhotonSeries& series)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << header.dump() << '\n';
        std::string line;
        for (std::size_t k = 0; k < series.values.size(); ++k) {
            line = format_real(series.t0 + static_cast<double>(k) * series.dt);
            line += ',';
            line += format_real(series.values[k]);
            line += '\n';
            out << line;
        }
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::optional<MeanPhotonSeries> read_series_file(const fs::path& path, const nlohmann::json& expected)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
    if (header.is_discarded() || header != expected) return std::nullopt;

    const std::size_t count = expected.at("grid").at("count").get<std::size_t>();
    MeanPhotonSeries s;
    s.t0 = expected.at("grid").at("t0").get<double>();
    s.dt = expected.at("grid").at("dt").get<double>();
    s.values.reserve(count);
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) return std::nullopt;
        char* end = nullptr;
        const double v = std::strtod(line.c_str() + comma + 1, &end);
        if (end == line.c_str() + comma + 1) return std::nullopt;
        s.values.push_back(v);
    }
    if (s.values.size() != count) return std::nullopt;
    return s;
}

SeriesFetch cached_mean_photon_series(const fs::path& cache_dir, const ModelParams& params, const InitialState& init,
                                      const FockTruncation& trunc, const TimeGrid& grid, unsigned workers)
{
    const auto header = series_header(params, init, trunc, grid);
    SeriesFetch out;
    out.key = series_key(header);
    if (!cache_dir.empty()) {
        out.file = cache_dir / ("series_" + out.key + ".csv");
        if (auto cached = read_series_file(out.file, header)) {
            out.series = std::move(*cached);
            out.from_cache = true;
            return out;
        }
    }
    out.series = mean_photon_series(params, init, trunc, grid, workers);
    if (!cache_dir.empty()) {
        write_series_file(out.file, header, out.series);
        // re-read the written file
        if (auto reread = read_series_file(out.file, header)) out.series = std::move(*reread);
    }
    return out;
}

void write_edge_list(const fs::path& path, const RecurrenceNetwork& net, const EdgeListHeader& header)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# nodes: " << net.node_count() << '\n';
    out << "# eps: " << format_real(header.eps) << '\n';
    out << "# input_hash: " << header.input_hash << '\n';
    for (const auto& [i, j] : net.edges()) out << (i + 1) << ' ' << (j + 1) << '\n';
}

EdgeListFile read_edge_list(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    EdgeListFile out;
    bool have_nodes = false;
    std::vector<Edge> edges;
    std::size_t largest = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key, value;
            hs >> key >> value;
            if (key == "nodes:") {
                out.header.nodes = std::stoull(value);
                have_nodes = true;
            } else if (key == "eps:") {
                out.header.eps = std::stod(value);
            } else if (key == "input_hash:") {
                out.header.input_hash = value;
            }
            continue;
        }
        std::istringstream ls(line);
        long long a = 0, b = 0;
        std::string rest;
        if (!(ls >> a >> b) || (ls >> rest) || a < 1 || b < 1)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected two 1-based node ids");
        edges.emplace_back(static_cast<NodeId>(a - 1), static_cast<NodeId>(b - 1));
        largest = std::max<std::size_t>(largest, static_cast<std::size_t>(std::max(a, b)));
    }
    if (!have_nodes) out.header.nodes = largest;
    if (largest > out.header.nodes) throw std::runtime_error(path.string() + ": node id exceeds declared node count");
    out.network = RecurrenceNetwork(out.header.nodes, edges);
    return out;
}

void write_json(const fs::path& path, const nlohmann::json& j)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace recnetq
