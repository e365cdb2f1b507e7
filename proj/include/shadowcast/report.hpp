#ifndef SHADOWCAST_REPORT_HPP
#define SHADOWCAST_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "shadowcast/graph.hpp"
#include "shadowcast/metrics.hpp"

namespace shadowcast {

/// FNV-1a hash of a canonical string, hex-encoded; used to fingerprint
/// configs and datasets inside report files.
std::string fingerprint_hex(const std::string& canonical);

/// Fingerprint of a graph: hashes N, E and the sorted edge/label lists.
std::string graph_fingerprint(const LabeledGraph& g);

nlohmann::json stats_json(const GraphStats& s);
nlohmann::json label_mix_json(const LabelMixStats& m);
nlohmann::json diff_json(const StatsDiff& d);
nlohmann::json ingest_report_json(const IngestReport& r);

struct StatsRow {
    std::string name;
    GraphStats stats;
};

/// Aligned text table, one row per graph, columns ASST CLUST CPL GINI MD TC.
std::string stats_table(const std::vector<StatsRow>& rows);

/// Mean and standard error of a sample.
struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};
MeanStderr mean_stderr(const std::vector<double>& xs);

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace shadowcast

#endif
