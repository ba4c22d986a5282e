#include "gfnlab/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace gfnlab {

Algo algo_from_string(const std::string& s) {
    if (s == "default") return Algo::Default;
    if (s == "ts") return Algo::TS;
    if (s == "enn") return Algo::Enn;
    if (s == "enn-enhanced") return Algo::EnnEnhanced;
    throw ConfigError("unknown algo: " + s);
}

std::string algo_to_string(Algo a) {
    switch (a) {
        case Algo::Default: return "default";
        case Algo::TS: return "ts";
        case Algo::Enn: return "enn";
        case Algo::EnnEnhanced: return "enn-enhanced";
    }
    return "?";
}

LossKind loss_from_string(const std::string& s) {
    if (s == "tb") return LossKind::TB;
    if (s == "db") return LossKind::DB;
    throw ConfigError("unknown loss: " + s);
}

std::string loss_to_string(LossKind l) {
    return l == LossKind::TB ? "tb" : "db";
}

Matrix masked_softmax_rows(const Matrix& logits, const Matrix& mask_add) {
    Matrix out = logits + mask_add;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        double m = out.row(r).maxCoeff();
        Eigen::ArrayXd e = (out.row(r).array() - m).exp();
        out.row(r) = e / e.sum();
    }
    return out;
}

namespace {

void init_fan_in(Parameter& p, int fan_in, uint64_t seed) {
    Rng rng = derive_stream(seed, "init:" + p.name);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index r = 0; r < p.value.rows(); ++r)
        for (Eigen::Index c = 0; c < p.value.cols(); ++c)
            p.value(r, c) = bound * (2.0 * rng.uniform() - 1.0);
}

}  // namespace

Policy::Policy(Algo algo, LossKind loss, int input_dim, int action_count,
               const PolicyConfig& cfg, uint64_t seed)
    : algo_(algo), loss_(loss), input_dim_(input_dim), actions_(action_count), cfg_(cfg) {
    if (input_dim < 1 || action_count < 1) throw ConfigError("policy: bad dimensions");
    if (cfg.hidden.empty()) throw ConfigError("policy: trunk needs at least one hidden layer");
    if (cfg.ensemble_size < 1) throw ConfigError("policy: ensemble size must be >= 1");
    if (cfg.index_dim < 1) throw ConfigError("policy: index dimension must be >= 1");
    if (cfg.prior_scale < 0.0) throw ConfigError("policy: prior scale must be >= 0");
    if (cfg.m_eval < 1) throw ConfigError("policy: m_eval must be >= 1");

    auto make_linear = [&](const std::string& base, int in, int out, bool trainable) {
        Parameter& w = store_.create(base + ".w", {in, out}, trainable);
        Parameter& b = store_.create(base + ".b", {out}, trainable);
        init_fan_in(w, in, seed);
        init_fan_in(b, in, seed);
    };

    int width = input_dim_;
    for (size_t i = 0; i < cfg_.hidden.size(); ++i) {
        std::string name = "trunk." + std::to_string(i);
        make_linear(name, width, cfg_.hidden[i], true);
        trunk_layers_.push_back(name);
        width = cfg_.hidden[i];
    }
    const int dh = width;

    if (algo_ == Algo::TS) {
        make_linear("ens", dh, cfg_.ensemble_size * actions_, true);
    } else {
        make_linear("head", dh, actions_, true);
    }
    if (algo_ == Algo::Enn || algo_ == Algo::EnnEnhanced) {
        make_linear("epi.0", dh, cfg_.epi_hidden, true);
        make_linear("epi.1", cfg_.epi_hidden, actions_ * cfg_.index_dim, true);
        epi_layers_ = {"epi.0", "epi.1"};
        for (int j = 0; j < cfg_.index_dim; ++j) {
            std::string base = "prior." + std::to_string(j);
            make_linear(base + ".0", dh, cfg_.prior_hidden, false);
            make_linear(base + ".1", cfg_.prior_hidden, actions_, false);
            prior_layers_.push_back({base + ".0", base + ".1"});
        }
    }
    if (has_flow_head()) make_linear("flow", dh, 1, true);
    if (has_logz()) {
        // one learnable log-partition estimate per TB policy; per member for TS
        store_.create("logz", {algo_ == Algo::TS ? cfg_.ensemble_size : 1});
    }

    if (algo_ == Algo::Enn || algo_ == Algo::EnnEnhanced) {
        Rng eval_rng = derive_stream(seed, "eval-ctx");
        eval_ctxs_.reserve(static_cast<size_t>(cfg_.m_eval));
        for (int m = 0; m < cfg_.m_eval; ++m) eval_ctxs_.push_back(draw_context(eval_rng));
    }
}

std::vector<std::pair<Parameter*, double>> Policy::trainable_with_lr(double lr_net,
                                                                     double lr_logz) {
    std::vector<std::pair<Parameter*, double>> out;
    for (Parameter* p : store_.trainable())
        out.emplace_back(p, p->name == "logz" ? lr_logz : lr_net);
    return out;
}

SampleContext Policy::draw_context(Rng& rng) const {
    SampleContext ctx;
    switch (algo_) {
        case Algo::Default:
            break;
        case Algo::TS:
            ctx.member = rng.uniform_int(cfg_.ensemble_size);
            break;
        case Algo::Enn:
        case Algo::EnnEnhanced: {
            ctx.z.resize(cfg_.index_dim);
            for (int j = 0; j < cfg_.index_dim; ++j) ctx.z(j) = rng.normal();
            if (algo_ == Algo::EnnEnhanced) ctx.prior_member = rng.uniform_int(cfg_.index_dim);
            break;
        }
    }
    return ctx;
}

int Policy::draw_prior_member(Rng& rng) const {
    return rng.uniform_int(cfg_.index_dim);
}

Matrix Policy::mlp_raw(const Matrix& x, const std::vector<std::string>& layers) const {
    Matrix h = x;
    for (size_t i = 0; i < layers.size(); ++i) {
        const Parameter& w = store_.at(layers[i] + ".w");
        const Parameter& b = store_.at(layers[i] + ".b");
        h = (h * w.value).rowwise() + b.value.row(0);
        if (i + 1 < layers.size()) h = h.cwiseMax(0.0);
    }
    return h;
}

Matrix Policy::features_raw(const Matrix& x) const {
    Matrix h = x;
    for (const std::string& name : trunk_layers_) {
        const Parameter& w = store_.at(name + ".w");
        const Parameter& b = store_.at(name + ".b");
        h = ((h * w.value).rowwise() + b.value.row(0)).cwiseMax(0.0);
    }
    return h;
}

Matrix Policy::epi_train_raw(const Matrix& feats) const {
    return mlp_raw(feats, epi_layers_);
}

Matrix Policy::prior_raw(const Matrix& feats) const {
    Matrix out(feats.rows(), static_cast<Eigen::Index>(actions_) * cfg_.index_dim);
    for (int j = 0; j < cfg_.index_dim; ++j)
        out.middleCols(static_cast<Eigen::Index>(j) * actions_, actions_) =
            mlp_raw(feats, prior_layers_[static_cast<size_t>(j)]);
    return out;
}

void Policy::contract_index(const Matrix& m, const Vector& z, Matrix& y) const {
    for (int j = 0; j < cfg_.index_dim; ++j)
        y += m.middleCols(static_cast<Eigen::Index>(j) * actions_, actions_) * z(j);
}

Matrix Policy::contraction_matrix(const Vector& z) const {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(actions_) * cfg_.index_dim, actions_);
    for (int j = 0; j < cfg_.index_dim; ++j)
        for (int a = 0; a < actions_; ++a) m(j * actions_ + a, a) = z(j);
    return m;
}

Matrix Policy::logits_raw(const Matrix& x, const SampleContext& ctx) const {
    Matrix feats = features_raw(x);
    switch (algo_) {
        case Algo::Default:
            return mlp_raw(feats, {"head"});
        case Algo::TS: {
            Matrix all = mlp_raw(feats, {"ens"});
            return all.middleCols(static_cast<Eigen::Index>(ctx.member) * actions_, actions_);
        }
        case Algo::Enn:
        case Algo::EnnEnhanced: {
            Matrix logits = mlp_raw(feats, {"head"});
            Matrix train = epi_train_raw(feats);
            contract_index(train, ctx.z, logits);
            Matrix prior = prior_raw(feats);
            if (algo_ == Algo::Enn) {
                Matrix pterm = Matrix::Zero(logits.rows(), logits.cols());
                contract_index(prior, ctx.z, pterm);
                logits += cfg_.prior_scale * pterm;
            } else {
                logits += cfg_.prior_scale *
                          prior.middleCols(
                              static_cast<Eigen::Index>(ctx.prior_member) * actions_, actions_);
            }
            return logits;
        }
    }
    throw std::logic_error("unreachable");
}

Matrix Policy::logits_raw_rows(const Matrix& x,
                               const std::vector<const SampleContext*>& ctx) const {
    if (static_cast<Eigen::Index>(ctx.size()) != x.rows())
        throw std::invalid_argument("logits_raw_rows: one context per row required");
    Matrix feats = features_raw(x);
    switch (algo_) {
        case Algo::Default:
            return mlp_raw(feats, {"head"});
        case Algo::TS: {
            Matrix all = mlp_raw(feats, {"ens"});
            Matrix out(x.rows(), actions_);
            for (Eigen::Index r = 0; r < x.rows(); ++r)
                out.row(r) = all.row(r).segment(
                    static_cast<Eigen::Index>(ctx[static_cast<size_t>(r)]->member) * actions_,
                    actions_);
            return out;
        }
        case Algo::Enn:
        case Algo::EnnEnhanced: {
            Matrix out = mlp_raw(feats, {"head"});
            Matrix train = epi_train_raw(feats);
            Matrix prior = prior_raw(feats);
            for (Eigen::Index r = 0; r < x.rows(); ++r) {
                const SampleContext& c = *ctx[static_cast<size_t>(r)];
                for (int j = 0; j < cfg_.index_dim; ++j)
                    out.row(r) +=
                        train.row(r).segment(static_cast<Eigen::Index>(j) * actions_, actions_) *
                        c.z(j);
                if (algo_ == Algo::Enn) {
                    Eigen::RowVectorXd pterm = Eigen::RowVectorXd::Zero(actions_);
                    for (int j = 0; j < cfg_.index_dim; ++j)
                        pterm += prior.row(r).segment(
                                     static_cast<Eigen::Index>(j) * actions_, actions_) *
                                 c.z(j);
                    out.row(r) += cfg_.prior_scale * pterm;
                } else {
                    out.row(r) +=
                        cfg_.prior_scale *
                        prior.row(r).segment(
                            static_cast<Eigen::Index>(c.prior_member) * actions_, actions_);
                }
            }
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

Matrix Policy::eval_probs(const Matrix& x, const Matrix& mask_add) const {
    Matrix feats = features_raw(x);
    switch (algo_) {
        case Algo::Default:
            return masked_softmax_rows(mlp_raw(feats, {"head"}), mask_add);
        case Algo::TS: {
            Matrix all = mlp_raw(feats, {"ens"});
            Matrix mix = Matrix::Zero(x.rows(), actions_);
            for (int k = 0; k < cfg_.ensemble_size; ++k)
                mix += masked_softmax_rows(
                    all.middleCols(static_cast<Eigen::Index>(k) * actions_, actions_), mask_add);
            return mix / static_cast<double>(cfg_.ensemble_size);
        }
        case Algo::Enn:
        case Algo::EnnEnhanced: {
            Matrix base = mlp_raw(feats, {"head"});
            Matrix train = epi_train_raw(feats);
            Matrix prior = prior_raw(feats);
            Matrix mix = Matrix::Zero(x.rows(), actions_);
            for (const SampleContext& c : eval_ctxs_) {
                Matrix logits = base;
                contract_index(train, c.z, logits);
                if (algo_ == Algo::Enn) {
                    Matrix pterm = Matrix::Zero(logits.rows(), logits.cols());
                    contract_index(prior, c.z, pterm);
                    logits += cfg_.prior_scale * pterm;
                } else {
                    logits += cfg_.prior_scale *
                              prior.middleCols(
                                  static_cast<Eigen::Index>(c.prior_member) * actions_, actions_);
                }
                mix += masked_softmax_rows(logits, mask_add);
            }
            return mix / static_cast<double>(eval_ctxs_.size());
        }
    }
    throw std::logic_error("unreachable");
}

Vector Policy::flow_raw(const Matrix& x) const {
    if (!has_flow_head()) throw std::logic_error("flow head not attached");
    return mlp_raw(features_raw(x), {"flow"}).col(0);
}

Policy::Graph Policy::build_graph(Tape& t, const Matrix& x) {
    Graph g;
    auto linear = [&](Val in, const std::string& base) {
        return t.add_rowvec(t.matmul(in, t.leaf(store_.at(base + ".w"))),
                            t.leaf(store_.at(base + ".b")));
    };
    Val h = t.constant(x);
    for (const std::string& name : trunk_layers_) h = t.relu(linear(h, name));
    g.features = h;
    if (algo_ == Algo::TS) {
        g.ens = linear(h, "ens");
    } else {
        g.base = linear(h, "head");
    }
    if (algo_ == Algo::Enn || algo_ == Algo::EnnEnhanced) {
        Val sg = t.stop_gradient(h);
        Val e = t.relu(linear(sg, "epi.0"));
        g.epi_train = linear(e, "epi.1");
        std::vector<Val> blocks;
        blocks.reserve(static_cast<size_t>(cfg_.index_dim));
        for (int j = 0; j < cfg_.index_dim; ++j) {
            std::string base = "prior." + std::to_string(j);
            Val p = t.relu(linear(sg, base + ".0"));
            blocks.push_back(linear(p, base + ".1"));
        }
        g.prior = t.concat_cols(blocks);
    }
    if (has_flow_head()) g.flow = linear(h, "flow");
    if (has_logz()) g.logz = t.leaf(store_.at("logz"));
    return g;
}

Val Policy::logits_for(Tape& t, const Graph& g, int begin, int count, const SampleContext& ctx,
                       const std::vector<int>& per_step_prior) const {
    switch (algo_) {
        case Algo::Default:
            return t.rows(g.base, begin, count);
        case Algo::TS:
            return t.cols(t.rows(g.ens, begin, count), ctx.member * actions_, actions_);
        case Algo::Enn:
        case Algo::EnnEnhanced: {
            Val mz = t.constant(contraction_matrix(ctx.z));
            Val logits = t.add(t.rows(g.base, begin, count),
                               t.matmul(t.rows(g.epi_train, begin, count), mz));
            if (algo_ == Algo::Enn) {
                Val pterm = t.matmul(t.rows(g.prior, begin, count), mz);
                return t.add(logits, t.scale(pterm, cfg_.prior_scale));
            }
            if (per_step_prior.empty()) {
                Val pterm = t.cols(t.rows(g.prior, begin, count),
                                   ctx.prior_member * actions_, actions_);
                return t.add(logits, t.scale(pterm, cfg_.prior_scale));
            }
            // per-step prior member: gather one block per row
            if (static_cast<int>(per_step_prior.size()) != count)
                throw std::invalid_argument("per-step prior list length mismatch");
            std::vector<Val> cols_out;
            cols_out.reserve(static_cast<size_t>(actions_));
            for (int a = 0; a < actions_; ++a) {
                std::vector<std::pair<int, int>> rc;
                rc.reserve(static_cast<size_t>(count));
                for (int r = 0; r < count; ++r)
                    rc.emplace_back(begin + r,
                                    per_step_prior[static_cast<size_t>(r)] * actions_ + a);
                cols_out.push_back(t.pick(g.prior, rc));
            }
            Val pterm = t.concat_cols(cols_out);
            return t.add(logits, t.scale(pterm, cfg_.prior_scale));
        }
    }
    throw std::logic_error("unreachable");
}

Val Policy::flow_for(Tape& t, const Graph& g, int begin, int count) const {
    if (!has_flow_head()) throw std::logic_error("flow head not attached");
    return t.rows(g.flow, begin, count);
}

Val Policy::logz_for(Tape& t, const Graph& g, const SampleContext& ctx) const {
    if (!has_logz()) throw std::logic_error("logz not attached under DB");
    if (algo_ == Algo::TS) return t.pick(g.logz, {{0, ctx.member}});
    return g.logz;
}

double Policy::logz_value(const SampleContext& ctx) const {
    const Parameter& z = store_.at("logz");
    return z.value(0, algo_ == Algo::TS ? ctx.member : 0);
}

double Policy::logz_mean() const {
    return store_.at("logz").value.mean();
}

double Policy::joint_prediction(const Matrix& states, const Matrix& mask_add,
                                const std::vector<int>& labels, int m_samples, Rng& rng) const {
    if (static_cast<Eigen::Index>(labels.size()) != states.rows())
        throw std::invalid_argument("joint_prediction: one label per state");
    if (m_samples < 1) throw std::invalid_argument("joint_prediction: m_samples must be >= 1");
    double acc = 0.0;
    for (int m = 0; m < m_samples; ++m) {
        SampleContext ctx = draw_context(rng);
        Matrix probs = masked_softmax_rows(logits_raw(states, ctx), mask_add);
        double prod = 1.0;
        for (Eigen::Index t = 0; t < states.rows(); ++t)
            prod *= probs(t, labels[static_cast<size_t>(t)]);
        acc += prod;
    }
    return acc / static_cast<double>(m_samples);
}

}  // namespace gfnlab
