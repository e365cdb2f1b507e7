#include "shadowcast/markov.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "shadowcast/error.hpp"
#include "shadowcast/rng.hpp"

namespace shadowcast {

namespace {

void check_row(std::vector<double>& row, const std::string& what) {
    double sum = 0.0;
    for (double x : row) {
        if (x < 0.0 || !std::isfinite(x)) throw ConfigError(what + " has a negative or non-finite entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw ConfigError(what + " sums to " + std::to_string(sum) + ", not 1");
    }
    for (double& x : row) x /= sum;
}

}  // namespace

void MarkovControl::validate() {
    if (k == 0) throw ConfigError("markov control needs k >= 1");
    if (pi.size() != k) throw ConfigError("pi length != k");
    if (a.size() != k) throw ConfigError("transition matrix must be k x k");
    check_row(pi, "pi");
    for (std::uint32_t i = 0; i < k; ++i) {
        if (a[i].size() != k) throw ConfigError("transition matrix must be k x k");
        check_row(a[i], "transition row " + std::to_string(i));
    }
}

LabelSequences sample_label_sequences(const MarkovControl& ctrl, std::size_t count, std::size_t length,
                                      std::uint64_t seed) {
    MarkovControl c = ctrl;
    c.validate();
    if (length == 0 || count == 0) throw ConfigError("need count >= 1 and length >= 1");

    LabelSequences out;
    out.m = count;
    out.t = length;
    out.labels.resize(count * length);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = Rng::stream(seed, i, /*tag=*/0x22);
        std::uint32_t cur = static_cast<std::uint32_t>(rng.categorical(c.pi));
        out.labels[i * length] = cur;
        for (std::size_t s = 1; s < length; ++s) {
            cur = static_cast<std::uint32_t>(rng.categorical(c.a[cur]));
            out.labels[i * length + s] = cur;
        }
    }
    return out;
}

MarkovControl empirical_markov(const LabelSequences& seqs, std::uint32_t k, double alpha) {
    if (seqs.m == 0 || seqs.t == 0) throw ConfigError("empirical_markov: empty input");
    if (alpha < 0.0) throw ConfigError("empirical_markov: alpha must be >= 0");
    for (std::uint32_t v : seqs.labels) {
        if (v >= k) throw ConfigError("empirical_markov: label " + std::to_string(v) + " out of range");
    }

    MarkovControl ctrl;
    ctrl.k = k;
    ctrl.name = "empirical";
    ctrl.pi.assign(k, alpha);
    ctrl.a.assign(k, std::vector<double>(k, alpha));
    for (std::size_t i = 0; i < seqs.m; ++i) {
        ctrl.pi[seqs.at(i, 0)] += 1.0;
        for (std::size_t s = 0; s + 1 < seqs.t; ++s) ctrl.a[seqs.at(i, s)][seqs.at(i, s + 1)] += 1.0;
    }

    auto normalize = [k](std::vector<double>& row) {
        double sum = 0.0;
        for (double x : row) sum += x;
        if (sum <= 0.0) {
            row.assign(k, 1.0 / static_cast<double>(k));  // unseen state, alpha == 0
        } else {
            for (double& x : row) x /= sum;
        }
    };
    normalize(ctrl.pi);
    for (auto& row : ctrl.a) normalize(row);
    return ctrl;
}

MarkovControl empirical_markov(const WalkBatch& batch, std::uint32_t k, double alpha) {
    LabelSequences seqs;
    seqs.m = batch.m;
    seqs.t = batch.t;
    seqs.labels = batch.labels;
    return empirical_markov(seqs, k, alpha);
}

std::vector<std::string> preset_names() {
    return {"legal-internal-surge", "finance-internal-surge", "trading-outgoing-surge"};
}

MarkovControl preset(const std::string& name) {
    MarkovControl c;
    c.k = 3;
    c.name = name;
    if (name == "legal-internal-surge") {
        c.pi = {0.9, 0.05, 0.05};
        c.a = {{0.9, 0.05, 0.05}, {0.1, 0.6, 0.3}, {0.0, 0.1, 0.9}};
    } else if (name == "finance-internal-surge") {
        c.pi = {0.05, 0.05, 0.9};
        c.a = {{0.9, 0.1, 0.0}, {0.1, 0.6, 0.3}, {0.05, 0.05, 0.9}};
    } else if (name == "trading-outgoing-surge") {
        c.pi = {0.05, 0.9, 0.05};
        c.a = {{0.9, 0.1, 0.0}, {0.25, 0.5, 0.25}, {0.0, 0.1, 0.9}};
    } else {
        std::string known;
        for (const auto& p : preset_names()) known += " " + p;
        throw ConfigError("unknown preset '" + name + "'; available:" + known);
    }
    c.validate();
    return c;
}

MarkovControl load_control(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    MarkovControl c;
    try {
        c.k = j.at("k").get<std::uint32_t>();
        c.pi = j.at("pi").get<std::vector<double>>();
        c.a = j.at("a").get<std::vector<std::vector<double>>>();
        c.name = j.value("name", "");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": bad control document: " + e.what());
    }
    c.validate();
    return c;
}

void save_control(const MarkovControl& ctrl, const std::string& path) {
    nlohmann::json j;
    j["k"] = ctrl.k;
    j["pi"] = ctrl.pi;
    j["a"] = ctrl.a;
    j["name"] = ctrl.name;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace shadowcast
