#include "gfnlab/train.hpp"

#include "gfnlab/adam.hpp"
#include "gfnlab/checkpoint.hpp"
#include "gfnlab/exact_dp.hpp"
#include "gfnlab/heatmap.hpp"
#include "gfnlab/losses.hpp"
#include "gfnlab/sampler.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace gfnlab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_csv_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

constexpr int64_t kEnumerationGuard = 10'000'000;
std::mutex g_progress_mutex;

// --- env-specific adapters ---------------------------------------------

int64_t terminal_index(const HyperGridEnv& env, const GridState& s) {
    return env.state_index(s);
}
int64_t terminal_index(const BitSeqEnv&, const BitSeqState& s) {
    return static_cast<int64_t>(s.bits);
}

bool is_mode_state(const HyperGridEnv& env, const GridState& s) { return env.is_mode(s); }
bool is_mode_state(const BitSeqEnv&, const BitSeqState& s) {
    return bitseq_is_valid(s.bits, s.len);
}

int64_t enumerable_support(const HyperGridEnv& env) {
    return env.state_count() <= kEnumerationGuard ? env.state_count() : 0;
}
int64_t enumerable_support(const BitSeqEnv& env) {
    return env.terminal_count() <= kEnumerationGuard ? env.terminal_count() : 0;
}

int64_t total_mode_count(const HyperGridEnv& env) {
    return static_cast<int64_t>(env.mode_indices().size());
}
int64_t total_mode_count(const BitSeqEnv& env) {
    return env.half_n() <= 32 ? static_cast<int64_t>(catalan(env.half_n())) : -1;
}

int64_t mode_region(const HyperGridEnv& env, const GridState& s) {
    return env.mode_region_index(s);
}
int64_t mode_region(const BitSeqEnv&, const BitSeqState& s) {
    return static_cast<int64_t>(s.bits);
}

int64_t total_region_count(const HyperGridEnv& env) { return env.mode_region_count(); }
int64_t total_region_count(const BitSeqEnv& env) { return total_mode_count(env); }

// Lockstep fresh-eval rollouts for bit sequences: batches distinct frontier
// states per level so the evaluation mixture is computed on matrices.
std::vector<uint64_t> bitseq_eval_rollouts_lockstep(const BitSeqEnv& env, const Policy& policy,
                                                    Rng& rng, int64_t n) {
    std::vector<BitSeqState> cur(static_cast<size_t>(n));
    for (int l = 0; l < env.full_len(); ++l) {
        std::unordered_map<uint64_t, int> row_of;  // prefix bits -> probs row
        std::vector<uint64_t> distinct;
        for (const BitSeqState& s : cur)
            if (row_of.emplace(s.bits, static_cast<int>(distinct.size())).second)
                distinct.push_back(s.bits);
        Matrix x(static_cast<Eigen::Index>(distinct.size()), env.encoding_size());
        Matrix mask(static_cast<Eigen::Index>(distinct.size()), env.action_count());
        for (size_t r = 0; r < distinct.size(); ++r) {
            BitSeqState s{distinct[r], l};
            env.encode(s, x.row(static_cast<Eigen::Index>(r)));
            mask_add_row(env, s, mask.row(static_cast<Eigen::Index>(r)));
        }
        Matrix probs = policy.eval_probs(x, mask);
        for (BitSeqState& s : cur) {
            const int r = row_of[s.bits];
            Eigen::RowVector2d w(probs(r, 0), probs(r, 1));
            int a = rng.categorical(w.data(), 2);
            s = env.step(s, a).first;
        }
    }
    std::vector<uint64_t> out;
    out.reserve(cur.size());
    for (const BitSeqState& s : cur) out.push_back(s.bits);
    return out;
}

// --- per-checkpoint evaluation ------------------------------------------

struct EvalSnapshot {
    double l1_exact = std::numeric_limits<double>::quiet_NaN();
    double l1_sampled = std::numeric_limits<double>::quiet_NaN();
    std::vector<uint64_t> fresh_terminals;  // bitseq rollouts (diversity)
};

Vector counts_to_dist(const std::vector<int64_t>& idx, int64_t support) {
    Vector c = Vector::Zero(support);
    for (int64_t i : idx) c(i) += 1.0;
    if (!idx.empty()) c /= static_cast<double>(idx.size());
    return c;
}

EvalSnapshot evaluate(const HyperGridEnv& env, const Policy& policy, const Vector* target,
                      const EmpiricalDist* empirical, const EvalConfig& eval, uint64_t seed,
                      int64_t checkpoint_index) {
    EvalSnapshot snap;
    Matrix table = grid_eval_prob_table(env, policy);
    Vector dp = grid_terminal_dist_from_table(env, table);
    if (target) snap.l1_exact = l1_mean(dp, *target);
    if (!target) return snap;
    if (eval.window == WindowPolicy::FreshEval) {
        if (eval.n_eval > 0) {
            Rng rng = derive_stream(seed, "eval-traj", static_cast<uint64_t>(checkpoint_index));
            auto idx = grid_eval_rollouts(env, table, rng, eval.n_eval);
            snap.l1_sampled = l1_mean(counts_to_dist(idx, env.state_count()), *target);
        }
    } else if (empirical && empirical->total() > 0) {
        snap.l1_sampled = l1_mean(empirical->snapshot(), *target);
    }
    return snap;
}

EvalSnapshot evaluate(const BitSeqEnv& env, const Policy& policy, const Vector* target,
                      const EmpiricalDist* empirical, const EvalConfig& eval, uint64_t seed,
                      int64_t checkpoint_index) {
    EvalSnapshot snap;
    if (eval.window == WindowPolicy::FreshEval) {
        if (eval.n_eval > 0) {
            Rng rng = derive_stream(seed, "eval-traj", static_cast<uint64_t>(checkpoint_index));
            snap.fresh_terminals = bitseq_eval_rollouts_lockstep(env, policy, rng, eval.n_eval);
        }
    } else if (target && empirical && empirical->total() > 0) {
        snap.l1_sampled = l1_mean(empirical->snapshot(), *target);
    }
    if (target && !snap.fresh_terminals.empty()) {
        Vector c = Vector::Zero(target->size());
        for (uint64_t b : snap.fresh_terminals) c(static_cast<int64_t>(b)) += 1.0;
        c /= static_cast<double>(snap.fresh_terminals.size());
        snap.l1_sampled = l1_mean(c, *target);
    }
    return snap;
}

// --- dist.csv / heatmap -----------------------------------------------

void write_grid_artifacts(const HyperGridEnv& env, const Policy& policy,
                          const std::string& dir) {
    if (env.ndim() != 2) return;
    Vector dist = grid_exact_terminal_dist(env, policy);
    write_dist_csv(dir + "/dist.csv", dist, env.height());
    write_heatmap_pgm(dir + "/heatmap.pgm", dist, env.height());
}
void write_grid_artifacts(const BitSeqEnv&, const Policy&, const std::string&) {}

// --- trainstate (resume) -------------------------------------------------

void save_trainstate(const std::string& dir, int64_t step, const Adam& adam_const,
                     const ModeSet& modes, const ModeSet& regions,
                     const EmpiricalDist* empirical) {
    Adam& adam = const_cast<Adam&>(adam_const);
    json j;
    j["format_version"] = 1;
    j["step"] = step;
    j["adam_step"] = adam.step_count();
    j["modes"] = std::vector<int64_t>(modes.items().begin(), modes.items().end());
    j["regions"] = std::vector<int64_t>(regions.items().begin(), regions.items().end());
    if (empirical) {
        json je;
        je["total"] = empirical->total();
        je["ring"] = empirical->ring();
        std::vector<double> counts(empirical->counts().data(),
                                   empirical->counts().data() + empirical->counts().size());
        je["counts"] = counts;
        j["empirical"] = std::move(je);
    }
    std::ofstream f(dir + "/trainstate.json", std::ios::trunc);
    f << j.dump() << '\n';

    std::vector<BlobEntry> entries;
    for (const Adam::Slot& s : adam.slots()) {
        entries.push_back(BlobEntry{"m:" + s.param->name, s.param->shape, s.m});
        entries.push_back(BlobEntry{"v:" + s.param->name, s.param->shape, s.v});
    }
    save_blob(dir + "/trainstate.bin", entries);
}

int64_t load_trainstate(const std::string& dir, Adam& adam, ModeSet& modes, ModeSet& regions,
                        EmpiricalDist* empirical) {
    std::ifstream f(dir + "/trainstate.json");
    if (!f) throw FormatError("missing trainstate.json in " + dir);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad trainstate.json: ") + e.what());
    }
    if (j.value("format_version", 0) != 1) throw FormatError("unsupported trainstate version");
    adam.set_step_count(j.at("adam_step").get<int64_t>());
    for (int64_t m : j.at("modes").get<std::vector<int64_t>>()) modes.add(m);
    for (int64_t r : j.at("regions").get<std::vector<int64_t>>()) regions.add(r);
    if (empirical && j.contains("empirical")) {
        const json& je = j.at("empirical");
        auto counts = je.at("counts").get<std::vector<double>>();
        Vector c(static_cast<int64_t>(counts.size()));
        for (size_t i = 0; i < counts.size(); ++i) c(static_cast<int64_t>(i)) = counts[i];
        empirical->restore(c, je.at("total").get<int64_t>(),
                           je.at("ring").get<std::vector<int64_t>>());
    }

    auto entries = load_blob(dir + "/trainstate.bin");
    std::unordered_map<std::string, const BlobEntry*> by_name;
    for (const auto& e : entries) by_name[e.name] = &e;
    for (Adam::Slot& s : adam.slots()) {
        auto m = by_name.find("m:" + s.param->name);
        auto v = by_name.find("v:" + s.param->name);
        if (m == by_name.end() || v == by_name.end())
            throw FormatError("trainstate.bin missing moments for " + s.param->name);
        s.m = m->second->data;
        s.v = v->second->data;
    }
    return j.at("step").get<int64_t>();
}

// --- batch dump on numerical failure -------------------------------------

template <class Env>
void dump_failed_batch(const Env& env, const std::string& dir,
                       const std::vector<Trajectory<typename Env::State>>& batch) {
    json out = json::array();
    for (const auto& tr : batch) {
        json jt;
        jt["actions"] = tr.actions;
        std::vector<int64_t> idx;
        for (const auto& s : tr.states) idx.push_back(terminal_index(env, s));
        jt["state_indices"] = idx;
        jt["log_reward"] = tr.log_reward;
        jt["member"] = tr.ctx.member;
        jt["prior_member"] = tr.ctx.prior_member;
        if (tr.ctx.z.size()) {
            std::vector<double> z(tr.ctx.z.data(), tr.ctx.z.data() + tr.ctx.z.size());
            jt["z"] = z;
        }
        out.push_back(std::move(jt));
    }
    std::ofstream f(dir + "/failed_batch.json", std::ios::trunc);
    f << out.dump(2) << '\n';
}

// --- csv ------------------------------------------------------------------

const char* kCsvHeader = "trajectories_seen,batch_loss,logz_estimate,l1_sampled,l1_exact,modes_found\n";

void append_csv_row(std::ofstream& f, const RunRecord& r) {
    f << r.trajectories_seen << ',' << format_csv_double(r.batch_loss) << ','
      << format_csv_double(r.logz_estimate) << ',' << format_csv_double(r.l1_sampled) << ','
      << format_csv_double(r.l1_exact) << ',' << r.modes_found << '\n';
    f.flush();
}

// --- the training loop ----------------------------------------------------

template <class Env>
TrainResult run_impl(const RunConfig& cfg, const Env& env, const TrainOptions& opts) {
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream f(cfg.out_dir + "/config.json", std::ios::trunc);
        f << config_to_json(cfg);
    }

    Policy policy(cfg.algo, cfg.loss, env.encoding_size(), env.action_count(), cfg.policy,
                  cfg.seed);
    Adam adam(policy.trainable_with_lr(cfg.lr_net, cfg.lr_logz));

    const int64_t support = enumerable_support(env);
    std::optional<Vector> target;
    if (support > 0) target = env.target_distribution().first;

    std::optional<EmpiricalDist> empirical;
    if (support > 0 && cfg.eval.window != WindowPolicy::FreshEval)
        empirical.emplace(support, cfg.eval.window, cfg.eval.window_size);

    ModeSet modes;
    ModeSet regions;
    const int64_t n_batches = cfg.budget / cfg.batch;
    int64_t start_step = 0;

    std::ofstream csv;
    if (opts.resume) {
        start_step = load_trainstate(cfg.out_dir, adam, modes, regions,
                                     empirical ? &*empirical : nullptr);
        load_checkpoint(cfg.out_dir + "/checkpoint.bin", policy.store().all());
        csv.open(cfg.out_dir + "/metrics.csv", std::ios::app);
    } else {
        csv.open(cfg.out_dir + "/metrics.csv", std::ios::trunc);
        csv << kCsvHeader;
    }
    if (!csv) throw ConfigError("cannot write metrics.csv in " + cfg.out_dir);

    TrainResult result;
    result.out_dir = cfg.out_dir;
    result.total_modes = total_mode_count(env);
    result.total_mode_regions = total_region_count(env);

    const auto t0 = std::chrono::steady_clock::now();
    double last_loss = 0.0;
    int64_t checkpoint_index = start_step / cfg.eval.interval;

    for (int64_t b = start_step; b < n_batches; ++b) {
        auto batch = sample_batch(env, policy, cfg.seed, b * cfg.batch, cfg.batch);
        for (const auto& tr : batch) {
            int64_t idx = terminal_index(env, tr.terminal());
            if (is_mode_state(env, tr.terminal())) {
                modes.add(idx);
                regions.add(mode_region(env, tr.terminal()));
            }
            if (empirical) empirical->record(idx);
        }
        try {
            Tape t;
            Val loss = build_batch_loss(t, env, policy, batch);
            last_loss = t.value(loss)(0, 0);
            t.backward(loss);
            adam.step();
        } catch (const NumericError&) {
            dump_failed_batch(env, cfg.out_dir, batch);
            throw;
        }

        const bool at_checkpoint = (b + 1) % cfg.eval.interval == 0 || b + 1 == n_batches;
        if (!at_checkpoint) continue;

        RunRecord rec;
        rec.trajectories_seen = (b + 1) * cfg.batch;
        rec.batch_loss = last_loss;
        if (policy.has_logz()) {
            rec.logz_estimate = policy.logz_mean();
        } else {
            Matrix x0(1, env.encoding_size());
            env.encode(env.initial_state(), x0.row(0));
            rec.logz_estimate = policy.flow_raw(x0)(0);
        }
        EvalSnapshot snap = evaluate(env, policy, target ? &*target : nullptr,
                                     empirical ? &*empirical : nullptr, cfg.eval, cfg.seed,
                                     checkpoint_index++);
        rec.l1_sampled = snap.l1_sampled;
        rec.l1_exact = snap.l1_exact;
        rec.modes_found = modes.count();
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        append_csv_row(csv, rec);
        if (!opts.quiet) {
            std::lock_guard<std::mutex> lock(g_progress_mutex);
            std::printf("[%s %s seed=%llu] traj=%lld loss=%.3g logz=%.3f l1x=%s l1s=%s modes=%lld wall=%.0fms\n",
                        algo_to_string(cfg.algo).c_str(), loss_to_string(cfg.loss).c_str(),
                        static_cast<unsigned long long>(cfg.seed),
                        static_cast<long long>(rec.trajectories_seen), rec.batch_loss,
                        rec.logz_estimate, format_csv_double(rec.l1_exact).c_str(),
                        format_csv_double(rec.l1_sampled).c_str(),
                        static_cast<long long>(rec.modes_found), rec.wall_ms);
            std::fflush(stdout);
        }
        result.records.push_back(rec);

        if (b + 1 == n_batches) {
            result.final_l1_exact = rec.l1_exact;
            result.final_l1_sampled = rec.l1_sampled;
            result.final_loss = rec.batch_loss;
            result.final_logz = rec.logz_estimate;
            result.modes_found = rec.modes_found;
            result.mode_regions_found = regions.count();
            if constexpr (std::is_same_v<Env, BitSeqEnv>) {
                if (!snap.fresh_terminals.empty())
                    result.final_diversity = diversity(snap.fresh_terminals, env.half_n());
            }
        }
    }

    std::vector<const Parameter*> to_save;
    for (Parameter* p : policy.store().all()) to_save.push_back(p);
    save_checkpoint(cfg.out_dir + "/checkpoint.bin", to_save);
    save_trainstate(cfg.out_dir, n_batches, adam, modes, regions,
                    empirical ? &*empirical : nullptr);
    write_grid_artifacts(env, policy, cfg.out_dir);
    return result;
}

}  // namespace

TrainResult train_run(const RunConfig& cfg, const TrainOptions& opts) {
    validate_config(cfg);
    if (cfg.env.kind == EnvKind::HyperGrid) {
        HyperGridEnv env = make_hypergrid(cfg.env);
        return run_impl(cfg, env, opts);
    }
    BitSeqEnv env = make_bitseq(cfg.env);
    return run_impl(cfg, env, opts);
}

TrainResult eval_run(const std::string& run_dir, int64_t n_eval, bool quiet) {
    RunConfig cfg = load_config_file(run_dir + "/config.json");
    TrainResult result;
    result.out_dir = run_dir;
    if (cfg.env.kind == EnvKind::HyperGrid) {
        HyperGridEnv env = make_hypergrid(cfg.env);
        Policy policy(cfg.algo, cfg.loss, env.encoding_size(), env.action_count(), cfg.policy,
                      cfg.seed);
        load_checkpoint(run_dir + "/checkpoint.bin", policy.store().all());
        Matrix table = grid_eval_prob_table(env, policy);
        Vector dp = grid_terminal_dist_from_table(env, table);
        auto [target, z] = env.target_distribution();
        (void)z;
        result.final_l1_exact = l1_mean(dp, target);
        Rng rng = derive_stream(cfg.seed, "eval-cli", static_cast<uint64_t>(n_eval));
        auto idx = grid_eval_rollouts(env, table, rng, n_eval);
        result.final_l1_sampled = l1_mean(counts_to_dist(idx, env.state_count()), target);
        ModeSet seen;
        for (int64_t i : idx)
            if (env.is_mode(env.state_from_index(i))) seen.add(i);
        result.modes_found = seen.count();
        result.total_modes = total_mode_count(env);
    } else {
        BitSeqEnv env = make_bitseq(cfg.env);
        Policy policy(cfg.algo, cfg.loss, env.encoding_size(), env.action_count(), cfg.policy,
                      cfg.seed);
        load_checkpoint(run_dir + "/checkpoint.bin", policy.store().all());
        Rng rng = derive_stream(cfg.seed, "eval-cli", static_cast<uint64_t>(n_eval));
        auto bits = bitseq_eval_rollouts_lockstep(env, policy, rng, n_eval);
        result.final_diversity = diversity(bits, env.half_n());
        result.modes_found = result.final_diversity.distinct_valid;
        result.total_modes = total_mode_count(env);
        if (enumerable_support(env) > 0) {
            auto [target, z] = env.target_distribution();
            (void)z;
            Vector c = Vector::Zero(target.size());
            for (uint64_t v : bits) c(static_cast<int64_t>(v)) += 1.0;
            c /= static_cast<double>(bits.size());
            result.final_l1_sampled = l1_mean(c, target);
        }
    }
    {
        std::ofstream f(run_dir + "/eval.csv", std::ios::trunc);
        f << "n_eval,l1_sampled,l1_exact,modes_found,distinct_valid,diversity_fraction\n";
        f << n_eval << ',' << format_csv_double(result.final_l1_sampled) << ','
          << format_csv_double(result.final_l1_exact) << ',' << result.modes_found << ','
          << result.final_diversity.distinct_valid << ','
          << format_csv_double(result.final_diversity.fraction) << '\n';
    }
    if (!quiet) {
        std::printf("eval %s: l1_sampled=%s l1_exact=%s modes=%lld distinct_valid=%lld\n",
                    run_dir.c_str(), format_csv_double(result.final_l1_sampled).c_str(),
                    format_csv_double(result.final_l1_exact).c_str(),
                    static_cast<long long>(result.modes_found),
                    static_cast<long long>(result.final_diversity.distinct_valid));
    }
    return result;
}

}  // namespace gfnlab
