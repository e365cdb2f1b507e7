#include "shadowcast/checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "shadowcast/error.hpp"

namespace shadowcast {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json tensor_json(const Tensor& t) {
    json j;
    j["shape"] = t.shape;
    j["data"] = t.data;
    return j;
}

Tensor tensor_from_json(const json& j) {
    Tensor t;
    t.shape = j.at("shape").get<std::vector<std::size_t>>();
    t.data = j.at("data").get<std::vector<double>>();
    std::size_t expect = 1;
    for (std::size_t d : t.shape) expect *= d;
    if (expect != t.data.size()) throw IoError("checkpoint tensor shape/data mismatch");
    return t;
}

json params_json(std::vector<Tensor*> params, const std::vector<std::string>& names) {
    json j;
    for (std::size_t i = 0; i < params.size(); ++i) j[names[i]] = tensor_json(*params[i]);
    return j;
}

void params_from_json(const json& j, std::vector<Tensor*> params, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < params.size(); ++i) *params[i] = tensor_from_json(j.at(names[i]));
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(1) << "\n";
    if (!out) throw IoError("short write to " + path);
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path + ": invalid JSON: " + e.what());
    }
    if (j.value("format_version", -1) != kFormatVersion) {
        throw IoError(path + ": unsupported checkpoint format version");
    }
    return j;
}

json adam_json(const nn::AdamState& s, const std::vector<std::string>& names) {
    json j;
    j["learning_rate"] = s.learning_rate;
    j["beta1"] = s.beta1;
    j["beta2"] = s.beta2;
    j["epsilon"] = s.epsilon;
    j["t"] = s.t;
    json m, v;
    for (std::size_t i = 0; i < names.size(); ++i) {
        m[names[i]] = tensor_json(s.m[i]);
        v[names[i]] = tensor_json(s.v[i]);
    }
    j["m"] = m;
    j["v"] = v;
    return j;
}

nn::AdamState adam_from_json(const json& j, const std::vector<std::string>& names) {
    nn::AdamState s;
    s.learning_rate = j.at("learning_rate").get<double>();
    s.beta1 = j.at("beta1").get<double>();
    s.beta2 = j.at("beta2").get<double>();
    s.epsilon = j.at("epsilon").get<double>();
    s.t = j.at("t").get<std::int64_t>();
    for (const auto& name : names) {
        s.m.push_back(tensor_from_json(j.at("m").at(name)));
        s.v.push_back(tensor_from_json(j.at("v").at(name)));
    }
    return s;
}

}  // namespace

void save_models(const Models& models, const std::string& dir) {
    std::filesystem::create_directories(dir);
    Models& m = const_cast<Models&>(models);  // params() is non-const; tensors are not modified

    json jc;
    jc["format_version"] = kFormatVersion;
    jc["kind"] = "caster";
    jc["k"] = models.caster.k;
    jc["hidden"] = models.caster.lstm.hidden_dim;
    jc["params"] = params_json(m.caster.params(), models.caster.param_names());
    write_json(jc, dir + "/caster.json");

    json jg;
    jg["format_version"] = kFormatVersion;
    jg["kind"] = "generator";
    jg["n"] = models.generator.n;
    jg["k"] = models.generator.k;
    jg["z_dim"] = models.generator.z_dim;
    jg["hidden"] = models.generator.hidden;
    jg["params"] = params_json(m.generator.params(), models.generator.param_names());
    write_json(jg, dir + "/generator.json");

    json jd;
    jd["format_version"] = kFormatVersion;
    jd["kind"] = "discriminator";
    jd["n"] = models.discriminator.n;
    jd["k"] = models.discriminator.k;
    jd["hidden"] = models.discriminator.hidden;
    jd["params"] = params_json(m.discriminator.params(), models.discriminator.param_names());
    write_json(jd, dir + "/discriminator.json");
}

Models load_models(const std::string& dir) {
    Models models;

    json jc = read_json(dir + "/caster.json");
    models.caster.k = jc.at("k").get<std::uint32_t>();
    models.caster.lstm.input_dim = models.caster.k;
    models.caster.lstm.hidden_dim = jc.at("hidden").get<std::size_t>();
    params_from_json(jc.at("params"), models.caster.params(), models.caster.param_names());

    json jg = read_json(dir + "/generator.json");
    models.generator.n = jg.at("n").get<std::size_t>();
    models.generator.k = jg.at("k").get<std::uint32_t>();
    models.generator.z_dim = jg.at("z_dim").get<std::size_t>();
    models.generator.hidden = jg.at("hidden").get<std::size_t>();
    models.generator.lstm.input_dim = models.generator.k + models.generator.n;
    models.generator.lstm.hidden_dim = models.generator.hidden;
    params_from_json(jg.at("params"), models.generator.params(), models.generator.param_names());

    json jd = read_json(dir + "/discriminator.json");
    models.discriminator.n = jd.at("n").get<std::size_t>();
    models.discriminator.k = jd.at("k").get<std::uint32_t>();
    models.discriminator.hidden = jd.at("hidden").get<std::size_t>();
    models.discriminator.lstm.input_dim = models.discriminator.n + models.discriminator.k;
    models.discriminator.lstm.hidden_dim = models.discriminator.hidden;
    params_from_json(jd.at("params"), models.discriminator.params(), models.discriminator.param_names());

    return models;
}

void save_snapshot(const TrainSnapshot& snap, const std::string& dir) {
    save_models(snap.models, dir);
    TrainSnapshot& s = const_cast<TrainSnapshot&>(snap);

    json j;
    j["format_version"] = kFormatVersion;
    j["iter"] = snap.iter;
    j["caster"] = adam_json(snap.opts.caster, s.models.caster.param_names());
    j["generator"] = adam_json(snap.opts.generator, s.models.generator.param_names());
    j["discriminator"] = adam_json(snap.opts.discriminator, s.models.discriminator.param_names());
    write_json(j, dir + "/optimizer.json");
}

TrainSnapshot load_snapshot(const std::string& dir) {
    TrainSnapshot snap;
    snap.models = load_models(dir);
    json j = read_json(dir + "/optimizer.json");
    snap.iter = j.at("iter").get<std::size_t>();
    snap.opts.caster = adam_from_json(j.at("caster"), snap.models.caster.param_names());
    snap.opts.generator = adam_from_json(j.at("generator"), snap.models.generator.param_names());
    snap.opts.discriminator = adam_from_json(j.at("discriminator"), snap.models.discriminator.param_names());
    return snap;
}

bool snapshot_exists(const std::string& dir) {
    return std::filesystem::exists(dir + "/optimizer.json") && std::filesystem::exists(dir + "/caster.json");
}

}  // namespace shadowcast
