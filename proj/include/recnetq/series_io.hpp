#pragma once

// File formats shared by the pipeline and the CLI:
//  - series cache: one JSON header line describing every physical input,
//    then `tau,value` records with 17 significant digits;
//  - edge lists: `# key: value` header comments, then 1-based `i j` pairs
//    with i < j in lexicographic order.

#include "recnetq/quantum.hpp"
#include "recnetq/recnet.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace recnetq {

inline constexpr int kSeriesFormatVersion = 1;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t h);

/// Hash of a file's bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

/// Canonical description of a series request (format version included).
nlohmann::json series_header(const ModelParams& params, const InitialState& init, const FockTruncation& trunc,
                             const TimeGrid& grid);

/// Cache key: FNV-1a of the compact header dump (keys sorted), hex encoded.
std::string series_key(const nlohmann::json& header);

void write_series_file(const std::filesystem::path& path, const nlohmann::json& header,
                       const MeanPhotonSeries& series);

/// Reads a series file; std::nullopt when missing, unreadable, truncated or
/// when the stored header differs from `expected`.
std::optional<MeanPhotonSeries> read_series_file(const std::filesystem::path& path, const nlohmann::json& expected);

/// Cached series lookup/compute. `cache_dir` empty disables caching.
struct SeriesFetch {
    MeanPhotonSeries series;
    std::string key;
    std::filesystem::path file;
    bool from_cache = false;
};

SeriesFetch cached_mean_photon_series(const std::filesystem::path& cache_dir, const ModelParams& params,
                                      const InitialState& init, const FockTruncation& trunc, const TimeGrid& grid,
                                      unsigned workers = 0);

struct EdgeListHeader {
    std::size_t nodes = 0;
    double eps = 0.0;
    std::string input_hash;
};

void write_edge_list(const std::filesystem::path& path, const RecurrenceNetwork& net, const EdgeListHeader& header);

struct EdgeListFile {
    EdgeListHeader header;
    RecurrenceNetwork network;
};

/// Parses an edge list. The node count comes from a `# nodes:` header when
/// present, otherwise from the largest index seen. Throws std::runtime_error
/// on malformed lines.
EdgeListFile read_edge_list(const std::filesystem::path& path);

/// Writes JSON with 2-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// %.17g formatting, used for every real written to CSV.
std::string format_real(double v);

} // namespace recnetq
