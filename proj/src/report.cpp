#include "shadowcast/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "shadowcast/error.hpp"

namespace shadowcast {

std::string fingerprint_hex(const std::string& canonical) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string graph_fingerprint(const LabeledGraph& g) {
    std::string canon = std::to_string(g.num_nodes()) + "|" + std::to_string(g.num_edges()) + "|";
    for (auto [u, v] : g.edges()) {
        canon += std::to_string(u) + "," + std::to_string(v) + ";";
    }
    canon += "|";
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) canon += std::to_string(g.label(v)) + ",";
    return fingerprint_hex(canon);
}

nlohmann::json stats_json(const GraphStats& s) {
    nlohmann::json j;
    if (s.asst) {
        j["asst"] = *s.asst;
    } else {
        j["asst"] = nullptr;
    }
    j["clust"] = s.clust;
    j["cpl"] = s.cpl;
    j["gini"] = s.gini;
    j["md"] = s.md;
    j["tc"] = s.tc;
    if (s.cpl_on_lcc) j["cpl_on_lcc"] = true;
    return j;
}

nlohmann::json label_mix_json(const LabelMixStats& m) {
    nlohmann::json j;
    j["intra_fraction"] = m.intra_fraction;
    j["inter_matrix"] = m.inter_matrix;
    return j;
}

nlohmann::json diff_json(const StatsDiff& d) {
    nlohmann::json j;
    if (d.asst) {
        j["asst"] = *d.asst;
    } else {
        j["asst"] = nullptr;
    }
    j["clust"] = d.clust;
    j["cpl"] = d.cpl;
    j["gini"] = d.gini;
    j["md"] = d.md;
    j["tc"] = d.tc;
    return j;
}

nlohmann::json ingest_report_json(const IngestReport& r) {
    nlohmann::json j;
    j["nodes"] = r.nodes;
    j["edges"] = r.edges;
    j["self_loops_dropped"] = r.self_loops_dropped;
    j["duplicates_dropped"] = r.duplicates_dropped;
    j["k"] = r.k;
    j["label_histogram"] = r.label_histogram;
    return j;
}

std::string stats_table(const std::vector<StatsRow>& rows) {
    std::size_t name_w = 5;
    for (const auto& r : rows) name_w = std::max(name_w, r.name.size());
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-*s %10s %10s %10s %10s %8s %10s\n", static_cast<int>(name_w), "graph",
                  "ASST", "CLUST", "CPL", "GINI", "MD", "TC");
    out += buf;
    for (const auto& r : rows) {
        std::string asst = r.stats.asst ? [&] {
            char a[32];
            std::snprintf(a, sizeof(a), "%10.4f", *r.stats.asst);
            return std::string(a);
        }() : std::string(" undefined");
        std::snprintf(buf, sizeof(buf), "%-*s %s %10.5f %10.4f %10.4f %8u %10llu\n", static_cast<int>(name_w),
                      r.name.c_str(), asst.c_str(), r.stats.clust, r.stats.cpl, r.stats.gini, r.stats.md,
                      static_cast<unsigned long long>(r.stats.tc));
        out += buf;
    }
    return out;
}

MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr out;
    out.n = xs.size();
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        const double var = ss / static_cast<double>(xs.size() - 1);
        out.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return out;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(1) << "\n";
    if (!out) throw IoError("short write to " + path);
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": invalid JSON: " + e.what());
    }
    return j;
}

}  // namespace shadowcast
