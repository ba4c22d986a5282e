#include "gfnlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gfnlab {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(std::string("bad value for config key '") + key + "'");
        }
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown_keys(j,
                        {"env", "algo", "loss", "budget", "batch", "lr_net", "lr_logz", "policy",
                         "seed", "eval", "out"},
                        "top level");

    RunConfig cfg;
    if (j.contains("env")) {
        const json& je = j.at("env");
        std::string type = je.value("type", "hypergrid");
        if (type == "hypergrid") {
            cfg.env.kind = EnvKind::HyperGrid;
            reject_unknown_keys(je, {"type", "ndim", "height", "r0", "r1", "r2", "coord_norm"},
                                "env");
            read(je, "ndim", cfg.env.ndim);
            read(je, "height", cfg.env.height);
            read(je, "r0", cfg.env.r0);
            read(je, "r1", cfg.env.r1);
            read(je, "r2", cfg.env.r2);
            std::string norm = je.value("coord_norm", "H");
            if (norm == "H")
                cfg.env.coord_norm = CoordNorm::ByH;
            else if (norm == "H-1")
                cfg.env.coord_norm = CoordNorm::ByHMinus1;
            else
                throw ConfigError("coord_norm must be 'H' or 'H-1'");
        } else if (type == "bitseq") {
            cfg.env.kind = EnvKind::BitSeq;
            reject_unknown_keys(je, {"type", "seq_halflen", "r_valid", "r_invalid"}, "env");
            read(je, "seq_halflen", cfg.env.seq_halflen);
            read(je, "r_valid", cfg.env.r_valid);
            read(je, "r_invalid", cfg.env.r_invalid);
        } else {
            throw ConfigError("env.type must be 'hypergrid' or 'bitseq'");
        }
    }

    std::string algo = "default", loss = "tb";
    read(j, "algo", algo);
    read(j, "loss", loss);
    cfg.algo = algo_from_string(algo);
    cfg.loss = loss_from_string(loss);
    read(j, "budget", cfg.budget);
    read(j, "batch", cfg.batch);
    read(j, "lr_net", cfg.lr_net);
    read(j, "lr_logz", cfg.lr_logz);
    read(j, "seed", cfg.seed);
    read(j, "out", cfg.out_dir);

    if (j.contains("policy")) {
        const json& jp = j.at("policy");
        reject_unknown_keys(jp,
                            {"hidden", "K", "d_z", "alpha", "epi_hidden", "prior_hidden",
                             "m_eval", "enhanced_prior_resample"},
                            "policy");
        read(jp, "hidden", cfg.policy.hidden);
        read(jp, "K", cfg.policy.ensemble_size);
        read(jp, "d_z", cfg.policy.index_dim);
        read(jp, "alpha", cfg.policy.prior_scale);
        read(jp, "epi_hidden", cfg.policy.epi_hidden);
        read(jp, "prior_hidden", cfg.policy.prior_hidden);
        read(jp, "m_eval", cfg.policy.m_eval);
        std::string resample = jp.value("enhanced_prior_resample", "trajectory");
        if (resample == "trajectory")
            cfg.policy.resample_prior_per_step = false;
        else if (resample == "step")
            cfg.policy.resample_prior_per_step = true;
        else
            throw ConfigError("enhanced_prior_resample must be 'trajectory' or 'step'");
    }

    if (j.contains("eval")) {
        const json& jv = j.at("eval");
        reject_unknown_keys(jv, {"interval", "n_eval", "window", "window_size"}, "eval");
        read(jv, "interval", cfg.eval.interval);
        read(jv, "n_eval", cfg.eval.n_eval);
        std::string w = jv.value("window", "fresh-eval");
        cfg.eval.window = window_from_string(w);
        read(jv, "window_size", cfg.eval.window_size);
    }

    validate_config(cfg);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
    ordered_json j;
    ordered_json je;
    if (cfg.env.kind == EnvKind::HyperGrid) {
        je["type"] = "hypergrid";
        je["ndim"] = cfg.env.ndim;
        je["height"] = cfg.env.height;
        je["r0"] = cfg.env.r0;
        je["r1"] = cfg.env.r1;
        je["r2"] = cfg.env.r2;
        je["coord_norm"] = cfg.env.coord_norm == CoordNorm::ByH ? "H" : "H-1";
    } else {
        je["type"] = "bitseq";
        je["seq_halflen"] = cfg.env.seq_halflen;
        je["r_valid"] = cfg.env.r_valid;
        je["r_invalid"] = cfg.env.r_invalid;
    }
    j["env"] = std::move(je);
    j["algo"] = algo_to_string(cfg.algo);
    j["loss"] = loss_to_string(cfg.loss);
    j["budget"] = cfg.budget;
    j["batch"] = cfg.batch;
    j["lr_net"] = cfg.lr_net;
    j["lr_logz"] = cfg.lr_logz;
    ordered_json jp;
    jp["hidden"] = cfg.policy.hidden;
    jp["K"] = cfg.policy.ensemble_size;
    jp["d_z"] = cfg.policy.index_dim;
    jp["alpha"] = cfg.policy.prior_scale;
    jp["epi_hidden"] = cfg.policy.epi_hidden;
    jp["prior_hidden"] = cfg.policy.prior_hidden;
    jp["m_eval"] = cfg.policy.m_eval;
    jp["enhanced_prior_resample"] = cfg.policy.resample_prior_per_step ? "step" : "trajectory";
    j["policy"] = std::move(jp);
    j["seed"] = cfg.seed;
    ordered_json jv;
    jv["interval"] = cfg.eval.interval;
    jv["n_eval"] = cfg.eval.n_eval;
    jv["window"] = window_to_string(cfg.eval.window);
    jv["window_size"] = cfg.eval.window_size;
    j["eval"] = std::move(jv);
    j["out"] = cfg.out_dir;
    return j.dump(2) + "\n";
}

void validate_config(const RunConfig& cfg) {
    if (cfg.budget <= 0) throw ConfigError("budget must be positive");
    if (cfg.batch <= 0) throw ConfigError("batch must be positive");
    if (cfg.budget % cfg.batch != 0) throw ConfigError("budget must be divisible by batch");
    if (!(cfg.lr_net > 0.0) || !(cfg.lr_logz > 0.0))
        throw ConfigError("learning rates must be positive");
    if (cfg.eval.interval < 1) throw ConfigError("eval.interval must be >= 1");
    if (cfg.eval.n_eval < 0) throw ConfigError("eval.n_eval must be >= 0");
    if (cfg.eval.window == WindowPolicy::LastW && cfg.eval.window_size < 1)
        throw ConfigError("eval.window_size must be >= 1");
    if (cfg.policy.hidden.empty()) throw ConfigError("policy.hidden must not be empty");
    for (int h : cfg.policy.hidden)
        if (h < 1) throw ConfigError("policy.hidden widths must be positive");
    if (cfg.policy.ensemble_size < 1) throw ConfigError("policy.K must be >= 1");
    if (cfg.policy.index_dim < 1) throw ConfigError("policy.d_z must be >= 1");
    if (cfg.policy.prior_scale < 0.0) throw ConfigError("policy.alpha must be >= 0");
    if (cfg.policy.epi_hidden < 1 || cfg.policy.prior_hidden < 1)
        throw ConfigError("policy epinet widths must be positive");
    if (cfg.policy.m_eval < 1) throw ConfigError("policy.m_eval must be >= 1");
    // Environment constructors enforce their own invariants.
    if (cfg.env.kind == EnvKind::HyperGrid)
        make_hypergrid(cfg.env);
    else
        make_bitseq(cfg.env);
}

HyperGridEnv make_hypergrid(const EnvConfig& e) {
    return HyperGridEnv(e.ndim, e.height, e.r0, e.r1, e.r2, e.coord_norm);
}

BitSeqEnv make_bitseq(const EnvConfig& e) {
    return BitSeqEnv(e.seq_halflen, e.r_valid, e.r_invalid);
}

}  // namespace gfnlab
