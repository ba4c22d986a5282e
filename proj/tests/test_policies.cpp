#include <doctest.h>

#include <gfnlab/adam.hpp>
#include <gfnlab/hypergrid.hpp>
#include <gfnlab/losses.hpp>
#include <gfnlab/policy.hpp>
#include <gfnlab/sampler.hpp>

#include <cmath>

#include "oracles.hpp"

using namespace gfnlab;

namespace {

PolicyConfig small_cfg() {
    PolicyConfig cfg;
    cfg.hidden = {16, 16};
    cfg.ensemble_size = 3;
    cfg.index_dim = 4;
    cfg.epi_hidden = 8;
    cfg.prior_hidden = 8;
    cfg.m_eval = 64;
    return cfg;
}

Matrix random_states(Rng& rng, int n, int dim) {
    Matrix x = Matrix::Zero(n, dim);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < dim; ++c) x(r, c) = rng.uniform();
    return x;
}

void zero_param(Policy& p, const std::string& name) {
    p.store().at(name).value.setZero();
}

}  // namespace

TEST_CASE("default head: zero-initialized final layer gives the uniform masked policy") {
    Policy p(Algo::Default, LossKind::TB, 6, 3, small_cfg(), 1);
    zero_param(p, "head.w");
    zero_param(p, "head.b");
    Rng rng = derive_stream(0, "st");
    Matrix x = random_states(rng, 4, 6);
    Matrix mask = Matrix::Zero(4, 3);
    mask(1, 0) = kMaskedLogit;  // one illegal action in row 1
    Matrix probs = p.eval_probs(x, mask);
    for (int c = 0; c < 3; ++c) CHECK(probs(0, c) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(probs(1, 0) == 0.0);
    CHECK(probs(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("logits are pure functions of state and weights") {
    Policy p(Algo::Enn, LossKind::TB, 6, 3, small_cfg(), 7);
    Rng rng = derive_stream(1, "st");
    Matrix x = random_states(rng, 2, 6);
    Rng crng = derive_stream(2, "ctx");
    SampleContext ctx = p.draw_context(crng);
    Matrix a = p.logits_raw(x, ctx);
    Matrix b = p.logits_raw(x, ctx);
    CHECK(a == b);
}

TEST_CASE("graph and raw forward paths agree") {
    for (Algo algo : {Algo::Default, Algo::TS, Algo::Enn, Algo::EnnEnhanced}) {
        Policy p(algo, LossKind::TB, 6, 3, small_cfg(), 5);
        Rng rng = derive_stream(3, "st");
        Matrix x = random_states(rng, 5, 6);
        Rng crng = derive_stream(4, "ctx");
        SampleContext ctx = p.draw_context(crng);
        Tape t;
        auto g = p.build_graph(t, x);
        Val node = p.logits_for(t, g, 0, 5, ctx);
        Matrix raw = p.logits_raw(x, ctx);
        CHECK((t.value(node) - raw).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("ts: member frequencies are uniform") {
    PolicyConfig cfg = small_cfg();
    cfg.ensemble_size = 4;
    Policy p(Algo::TS, LossKind::TB, 4, 2, cfg, 3);
    Rng rng = derive_stream(9, "members");
    const int n = 100000;
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i) ++counts[p.draw_context(rng).member];
    const double sigma = std::sqrt(0.25 * 0.75 / n);
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(counts[k] / static_cast<double>(n) - 0.25) < 3 * sigma + 1e-12);

    PolicyConfig one = small_cfg();
    one.ensemble_size = 1;
    Policy p1(Algo::TS, LossKind::TB, 4, 2, one, 3);
    for (int i = 0; i < 100; ++i) CHECK(p1.draw_context(rng).member == 0);
}

TEST_CASE("ts: identical member slices give identical logits") {
    PolicyConfig cfg = small_cfg();
    cfg.ensemble_size = 2;
    Policy p(Algo::TS, LossKind::TB, 4, 3, cfg, 11);
    Parameter& w = p.store().at("ens.w");
    Parameter& b = p.store().at("ens.b");
    w.value.middleCols(3, 3) = w.value.middleCols(0, 3);
    b.value.row(0).segment(3, 3) = b.value.row(0).segment(0, 3);
    Rng rng = derive_stream(5, "st");
    Matrix x = random_states(rng, 3, 4);
    SampleContext c0, c1;
    c0.member = 0;
    c1.member = 1;
    CHECK((p.logits_raw(x, c0) - p.logits_raw(x, c1)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ts: member gradient touches only its slice, logz only its entry") {
    HyperGridEnv env(2, 4, 0.1, 1.0, 3.0);
    PolicyConfig cfg = small_cfg();
    cfg.ensemble_size = 3;
    Policy p(Algo::TS, LossKind::TB, env.encoding_size(), env.action_count(), cfg, 13);
    auto batch = sample_batch(env, p, 77, 0, 1);
    const int k = batch[0].ctx.member;

    Tape t;
    Val loss = build_batch_loss(t, env, p, batch);
    t.backward(loss);

    const Matrix& gw = p.store().at("ens.w").grad;
    const int A = env.action_count();
    for (int member = 0; member < 3; ++member) {
        double norm = gw.middleCols(member * A, A).cwiseAbs().maxCoeff();
        if (member == k)
            CHECK(norm > 0.0);
        else
            CHECK(norm == 0.0);
    }
    const Matrix& gz = p.store().at("logz").grad;
    for (int member = 0; member < 3; ++member) {
        if (member == k)
            CHECK(gz(0, member) != 0.0);
        else
            CHECK(gz(0, member) == 0.0);
    }
    // shared trunk gets gradient regardless of the member
    CHECK(p.store().at("trunk.0.w").grad.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("epinet: z = 0 reduces to the base head") {
    Policy p(Algo::Enn, LossKind::TB, 5, 3, small_cfg(), 17);
    Rng rng = derive_stream(6, "st");
    Matrix x = random_states(rng, 4, 5);
    SampleContext ctx;
    ctx.z = Vector::Zero(small_cfg().index_dim);
    Matrix logits = p.logits_raw(x, ctx);

    Policy base(Algo::Default, LossKind::TB, 5, 3, small_cfg(), 17);
    // same trunk/head initialization streams (same names, same seed)
    CHECK((logits - base.logits_raw(x, SampleContext{})).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("epinet: alpha = 0 with zero train net reduces to base for all z") {
    PolicyConfig cfg = small_cfg();
    cfg.prior_scale = 0.0;
    Policy p(Algo::Enn, LossKind::TB, 5, 3, cfg, 19);
    zero_param(p, "epi.1.w");
    zero_param(p, "epi.1.b");
    Rng rng = derive_stream(7, "st");
    Matrix x = random_states(rng, 3, 5);
    Rng crng = derive_stream(8, "ctx");
    SampleContext zero;
    zero.z = Vector::Zero(cfg.index_dim);
    Matrix base = p.logits_raw(x, zero);
    for (int i = 0; i < 5; ++i) {
        SampleContext ctx = p.draw_context(crng);
        CHECK((p.logits_raw(x, ctx) - base).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("epinet: logit variance over z matches the closed form") {
    PolicyConfig cfg = small_cfg();
    cfg.prior_scale = 0.7;
    Policy p(Algo::Enn, LossKind::TB, 5, 3, cfg, 23);
    Rng rng = derive_stream(9, "st");
    Matrix x = random_states(rng, 1, 5);

    // u_j = logits(e_j) - logits(0) = T[:, j] + alpha * p_j: the exact
    // variance of the linear form is sum_j u_j^2 elementwise.
    SampleContext ctx;
    ctx.z = Vector::Zero(cfg.index_dim);
    Eigen::RowVector3d base = p.logits_raw(x, ctx).row(0);
    Matrix u(cfg.index_dim, 3);
    for (int j = 0; j < cfg.index_dim; ++j) {
        ctx.z.setZero();
        ctx.z(j) = 1.0;
        u.row(j) = p.logits_raw(x, ctx).row(0) - base;
    }
    Eigen::RowVector3d predicted = u.array().square().colwise().sum();

    Rng zrng = derive_stream(10, "z");
    const int n = 40000;
    Eigen::RowVector3d mean = Eigen::RowVector3d::Zero();
    Eigen::RowVector3d second = Eigen::RowVector3d::Zero();
    for (int i = 0; i < n; ++i) {
        SampleContext c;
        c.z.resize(cfg.index_dim);
        for (int j = 0; j < cfg.index_dim; ++j) c.z(j) = zrng.normal();
        Eigen::RowVector3d row = p.logits_raw(x, c).row(0);
        mean += row;
        second += row.cwiseProduct(row);
    }
    mean /= n;
    second /= n;
    Eigen::RowVector3d mc_var = second - mean.cwiseProduct(mean);
    for (int a = 0; a < 3; ++a)
        CHECK(mc_var(a) == doctest::Approx(predicted(a)).epsilon(0.08));

    // with a zeroed train net the closed form collapses to alpha^2 sum_j p_j^2
    zero_param(p, "epi.1.w");
    zero_param(p, "epi.1.b");
    ctx.z = Vector::Zero(cfg.index_dim);
    Eigen::RowVector3d base2 = p.logits_raw(x, ctx).row(0);
    Eigen::RowVector3d prior_only = Eigen::RowVector3d::Zero();
    for (int j = 0; j < cfg.index_dim; ++j) {
        ctx.z.setZero();
        ctx.z(j) = 1.0;
        Eigen::RowVector3d pj = (p.logits_raw(x, ctx).row(0) - base2) / cfg.prior_scale;
        prior_only += pj.cwiseProduct(pj);
    }
    Eigen::RowVector3d u2 = Eigen::RowVector3d::Zero();
    for (int j = 0; j < cfg.index_dim; ++j) {
        ctx.z.setZero();
        ctx.z(j) = 1.0;
        Eigen::RowVector3d uj = p.logits_raw(x, ctx).row(0) - base2;
        u2 += uj.cwiseProduct(uj);
    }
    Eigen::RowVector3d spec_form = cfg.prior_scale * cfg.prior_scale * prior_only;
    CHECK((u2 - spec_form).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("enhanced: d_z = 1 with z = 1 equals the ENN output") {
    PolicyConfig cfg = small_cfg();
    cfg.index_dim = 1;
    Policy enn(Algo::Enn, LossKind::TB, 5, 3, cfg, 29);
    Policy enh(Algo::EnnEnhanced, LossKind::TB, 5, 3, cfg, 29);
    Rng rng = derive_stream(11, "st");
    Matrix x = random_states(rng, 4, 5);
    SampleContext ctx;
    ctx.z = Vector::Ones(1);
    ctx.prior_member = 0;
    CHECK((enn.logits_raw(x, ctx) - enh.logits_raw(x, ctx)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("enhanced: prior term is constant in z for fixed J") {
    Policy p(Algo::EnnEnhanced, LossKind::TB, 5, 3, small_cfg(), 31);
    Rng rng = derive_stream(12, "st");
    Matrix x = random_states(rng, 2, 5);
    Rng crng = derive_stream(13, "ctx");
    SampleContext c1 = p.draw_context(crng);
    SampleContext c2 = p.draw_context(crng);
    c2.prior_member = c1.prior_member;
    // difference across z is independent of which prior member is fixed
    Matrix d_same_j = p.logits_raw(x, c1) - p.logits_raw(x, c2);
    SampleContext c1b = c1, c2b = c2;
    c1b.prior_member = (c1.prior_member + 1) % small_cfg().index_dim;
    c2b.prior_member = c1b.prior_member;
    Matrix d_other_j = p.logits_raw(x, c1b) - p.logits_raw(x, c2b);
    CHECK((d_same_j - d_other_j).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("enhanced: mean logits over (z, J) match the analytic mean") {
    PolicyConfig cfg = small_cfg();
    cfg.prior_scale = 0.9;
    Policy p(Algo::EnnEnhanced, LossKind::TB, 5, 3, cfg, 37);
    Rng rng = derive_stream(14, "st");
    Matrix x = random_states(rng, 1, 5);

    // analytic mean: train term has zero mean in z, so it is the average of
    // logits(z=0, J) over the prior members
    Eigen::RowVector3d analytic = Eigen::RowVector3d::Zero();
    for (int j = 0; j < cfg.index_dim; ++j) {
        SampleContext c;
        c.z = Vector::Zero(cfg.index_dim);
        c.prior_member = j;
        analytic += p.logits_raw(x, c).row(0);
    }
    analytic /= cfg.index_dim;

    Rng crng = derive_stream(15, "ctx");
    const int n = 60000;
    Eigen::RowVector3d mc = Eigen::RowVector3d::Zero();
    for (int i = 0; i < n; ++i) {
        SampleContext c = p.draw_context(crng);
        mc += p.logits_raw(x, c).row(0);
    }
    mc /= n;
    for (int a = 0; a < 3; ++a) CHECK(mc(a) == doctest::Approx(analytic(a)).epsilon(0.05));
}

TEST_CASE("stop-gradient boundary: epinet terms never reach the trunk") {
    for (Algo algo : {Algo::Enn, Algo::EnnEnhanced}) {
        Policy p(algo, LossKind::TB, 5, 3, small_cfg(), 41);
        zero_param(p, "head.w");
        zero_param(p, "head.b");
        Rng rng = derive_stream(16, "st");
        Matrix x = random_states(rng, 4, 5);
        Rng crng = derive_stream(17, "ctx");
        SampleContext ctx = p.draw_context(crng);
        Tape t;
        auto g = p.build_graph(t, x);
        Val logits = p.logits_for(t, g, 0, 4, ctx);
        Val loss = t.mean(t.square(logits));
        t.backward(loss);
        // all gradient reached the epinet; none leaked through sg into the trunk
        CHECK(p.store().at("trunk.0.w").grad.cwiseAbs().maxCoeff() == 0.0);
        CHECK(p.store().at("trunk.1.w").grad.cwiseAbs().maxCoeff() == 0.0);
        CHECK(p.store().at("epi.0.w").grad.cwiseAbs().maxCoeff() > 0.0);
        // and with the base head active, the trunk is reached through it only
        for (Parameter* q : p.store().all()) q->zero_grad();
        p.store().at("head.w").value.setConstant(0.05);
        Tape t2;
        auto g2 = p.build_graph(t2, x);
        Val loss2 = t2.mean(t2.square(p.logits_for(t2, g2, 0, 4, ctx)));
        t2.backward(loss2);
        CHECK(p.store().at("trunk.0.w").grad.cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("prior networks stay frozen through training steps") {
    HyperGridEnv env(2, 4, 0.1, 1.0, 3.0);
    PolicyConfig cfg = small_cfg();
    Policy p(Algo::Enn, LossKind::TB, env.encoding_size(), env.action_count(), cfg, 43);
    std::vector<Matrix> before;
    for (int j = 0; j < cfg.index_dim; ++j) {
        before.push_back(p.store().at("prior." + std::to_string(j) + ".0.w").value);
        before.push_back(p.store().at("prior." + std::to_string(j) + ".1.w").value);
    }
    Adam opt(p.trainable_with_lr(1e-3, 1e-1));
    for (int step = 0; step < 200; ++step) {
        auto batch = sample_batch(env, p, 99, step * 4, 4);
        Tape t;
        Val loss = build_batch_loss(t, env, p, batch);
        t.backward(loss);
        opt.step();
    }
    size_t i = 0;
    for (int j = 0; j < cfg.index_dim; ++j) {
        CHECK(p.store().at("prior." + std::to_string(j) + ".0.w").value == before[i++]);
        CHECK(p.store().at("prior." + std::to_string(j) + ".1.w").value == before[i++]);
    }
}

TEST_CASE("ts eval mixture: opposing members average to a coin flip") {
    PolicyConfig cfg = small_cfg();
    cfg.ensemble_size = 2;
    Policy p(Algo::TS, LossKind::TB, 4, 2, cfg, 47);
    Parameter& w = p.store().at("ens.w");
    Parameter& b = p.store().at("ens.b");
    w.value.setZero();
    b.value.setZero();
    b.value(0, 0) = 1000.0;   // member 0 forces action 0
    b.value(0, 3) = 1000.0;   // member 1 forces action 1
    Matrix x = Matrix::Zero(1, 4);
    Matrix mask = Matrix::Zero(1, 2);
    Matrix probs = p.eval_probs(x, mask);
    CHECK(probs(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probs(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("eval probabilities are bit-exactly reproducible") {
    PolicyConfig cfg = small_cfg();
    cfg.m_eval = 100;
    Policy a(Algo::EnnEnhanced, LossKind::TB, 5, 3, cfg, 53);
    Policy b(Algo::EnnEnhanced, LossKind::TB, 5, 3, cfg, 53);
    Rng rng = derive_stream(18, "st");
    Matrix x = random_states(rng, 6, 5);
    Matrix mask = Matrix::Zero(6, 3);
    CHECK(a.eval_probs(x, mask) == b.eval_probs(x, mask));
}

TEST_CASE("all four policies coincide when the uncertainty machinery is disabled") {
    PolicyConfig base_cfg = small_cfg();
    Policy ref(Algo::Default, LossKind::TB, 5, 3, base_cfg, 59);
    Rng rng = derive_stream(19, "st");
    Matrix x = random_states(rng, 4, 5);
    Matrix ref_logits = ref.logits_raw(x, SampleContext{});

    PolicyConfig k1 = base_cfg;
    k1.ensemble_size = 1;
    Policy ts(Algo::TS, LossKind::TB, 5, 3, k1, 59);
    for (int l = 0; l < 2; ++l) {
        std::string t = "trunk." + std::to_string(l);
        ts.store().at(t + ".w").value = ref.store().at(t + ".w").value;
        ts.store().at(t + ".b").value = ref.store().at(t + ".b").value;
    }
    ts.store().at("ens.w").value = ref.store().at("head.w").value;
    ts.store().at("ens.b").value = ref.store().at("head.b").value;
    SampleContext m0;
    CHECK((ts.logits_raw(x, m0) - ref_logits).cwiseAbs().maxCoeff() < 1e-14);

    for (Algo algo : {Algo::Enn, Algo::EnnEnhanced}) {
        PolicyConfig cfg = base_cfg;
        cfg.prior_scale = 0.0;
        Policy p(algo, LossKind::TB, 5, 3, cfg, 59);
        p.store().at("epi.1.w").value.setZero();
        p.store().at("epi.1.b").value.setZero();
        Rng crng = derive_stream(20, "ctx");
        SampleContext ctx = p.draw_context(crng);
        CHECK((p.logits_raw(x, ctx) - ref_logits).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("joint prediction: single state equals the marginal, deterministic policy factorizes") {
    Policy det(Algo::Default, LossKind::TB, 4, 2, small_cfg(), 61);
    Rng rng = derive_stream(21, "st");
    Matrix x = random_states(rng, 3, 4);
    Matrix mask = Matrix::Zero(3, 2);
    std::vector<int> labels = {0, 1, 0};

    Rng jrng1 = derive_stream(22, "joint");
    double joint = det.joint_prediction(x, mask, labels, 1, jrng1);
    Rng jrng2 = derive_stream(23, "joint");
    double joint_many = det.joint_prediction(x, mask, labels, 64, jrng2);
    Matrix probs = masked_softmax_rows(det.logits_raw(x, SampleContext{}), mask);
    double product = probs(0, 0) * probs(1, 1) * probs(2, 0);
    CHECK(joint == doctest::Approx(product).epsilon(1e-12));
    CHECK(joint_many == doctest::Approx(product).epsilon(1e-12));

    Rng mrng = derive_stream(24, "joint-marg");
    Matrix single = x.topRows(1);
    double marg = det.joint_prediction(single, mask.topRows(1), {0}, 16, mrng);
    CHECK(marg == doctest::Approx(probs(0, 0)).epsilon(1e-12));
}

TEST_CASE("joint prediction: d_z = 1 agrees with quadrature") {
    PolicyConfig cfg = small_cfg();
    cfg.index_dim = 1;
    cfg.prior_scale = 1.0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Policy p(Algo::Enn, LossKind::TB, 4, 2, cfg, 100 + seed);
        Rng rng = derive_stream(seed, "jq-st");
        Matrix x = random_states(rng, 2, 4);
        Matrix mask = Matrix::Zero(2, 2);
        std::vector<int> labels = {static_cast<int>(seed % 2), static_cast<int>((seed / 2) % 2)};

        // Simpson quadrature of \int phi(z) prod_t softmax(logits(x_t,z))_{y_t} dz
        const int n = 4000;
        const double lo = -10.0, hi = 10.0;
        const double h = (hi - lo) / n;
        double integral = 0.0;
        SampleContext ctx;
        ctx.z.resize(1);
        for (int i = 0; i <= n; ++i) {
            double z = lo + h * i;
            ctx.z(0) = z;
            Matrix probs = masked_softmax_rows(p.logits_raw(x, ctx), mask);
            double f = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
            f *= probs(0, labels[0]) * probs(1, labels[1]);
            double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            integral += w * f;
        }
        integral *= h / 3.0;

        // Monte Carlo estimate plus its own standard error
        const int m = 20000;
        Rng zrng = derive_stream(seed, "jq-z");
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < m; ++i) {
            SampleContext c = p.draw_context(zrng);
            Matrix probs = masked_softmax_rows(p.logits_raw(x, c), mask);
            double v = probs(0, labels[0]) * probs(1, labels[1]);
            sum += v;
            sq += v * v;
        }
        double mean = sum / m;
        double se = std::sqrt((sq / m - mean * mean) / m);
        CHECK(std::abs(mean - integral) < 3.0 * se + 1e-9);

        Rng jrng = derive_stream(seed, "jq-z");
        double via_api = p.joint_prediction(x, mask, labels, m, jrng);
        CHECK(via_api == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("per-trajectory context is recorded and constant within a trajectory") {
    HyperGridEnv env(2, 6, 0.1, 1.0, 3.0);
    PolicyConfig cfg = small_cfg();
    Policy p(Algo::EnnEnhanced, LossKind::TB, env.encoding_size(), env.action_count(), cfg, 67);
    auto batch = sample_batch(env, p, 123, 0, 8);
    for (const auto& tr : batch) {
        CHECK(tr.ctx.z.size() == cfg.index_dim);
        CHECK(tr.ctx.prior_member >= 0);
        CHECK(tr.ctx.prior_member < cfg.index_dim);
        CHECK(tr.step_priors.empty());  // per-trajectory mode
    }

    cfg.resample_prior_per_step = true;
    Policy q(Algo::EnnEnhanced, LossKind::TB, env.encoding_size(), env.action_count(), cfg, 67);
    auto batch2 = sample_batch(env, q, 123, 0, 8);
    for (const auto& tr : batch2)
        CHECK(tr.step_priors.size() == tr.actions.size());
}

TEST_CASE("ts: recorded member matches the member whose logits were used") {
    HyperGridEnv env(2, 4, 0.1, 1.0, 3.0);
    PolicyConfig cfg = small_cfg();
    cfg.ensemble_size = 2;
    Policy p(Algo::TS, LossKind::TB, env.encoding_size(), env.action_count(), cfg, 71);
    Parameter& w = p.store().at("ens.w");
    Parameter& b = p.store().at("ens.b");
    w.value.setZero();
    b.value.setZero();
    const int A = env.action_count();
    b.value(0, env.stop_action()) = 1000.0;      // member 0: stop immediately
    b.value(0, A + 0) = 1000.0;                  // member 1: always increment dim 0
    auto batch = sample_batch(env, p, 31, 0, 64);
    for (const auto& tr : batch) {
        if (tr.ctx.member == 0) {
            CHECK(tr.actions.size() == 1);
            CHECK(tr.actions[0] == env.stop_action());
        } else {
            CHECK(tr.actions[0] == 0);
        }
    }
}
