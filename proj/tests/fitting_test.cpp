#include <gtest/gtest.h>

#include <cmath>

#include "caulk/fitting.hpp"

using namespace caulk;

namespace {

ReluNetworkSpec spec_of(int height, int width, int in_dim) {
    ReluNetworkSpec s;
    s.height = height;
    s.width = width;
    s.in_dim = in_dim;
    s.out_dim = 1;
    return s;
}

Matrix column(const Vec& xs) {
    Matrix X(xs.size(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) X(i, 0) = xs[i];
    return X;
}

// closed-form simple linear regression
std::pair<double, double> normal_equations(const Vec& x, const Vec& y) {
    double mx = mean_of(x), my = mean_of(y), sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

}  // namespace

TEST(LossAndGradient, ZeroAtPerfectFit) {
    ReluNetwork net = init_network(spec_of(3, 4, 2), InitScheme::uniform_scaled, 2);
    Matrix X(8, 2);
    Rng rng(3);
    for (std::size_t i = 0; i < 8; ++i) {
        X(i, 0) = rng.uniform();
        X(i, 1) = rng.uniform();
    }
    Vec y(8);
    for (std::size_t i = 0; i < 8; ++i) y[i] = net.forward(X.row(i))[0];
    ParamGrads g = loss_and_gradient(net, X, y);
    EXPECT_DOUBLE_EQ(g.loss, 0.0);
    for (const auto& W : g.dW)
        for (double v : W.a) EXPECT_DOUBLE_EQ(v, 0.0);
    for (const auto& b : g.db)
        for (double v : b) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(LossAndGradient, ClosedFormLinearCase) {
    // f(x) = w x with w = 1 on the sample {(1, 2)}: loss (w-2)^2 = 1,
    // dL/dw = 2(w-2) = -2, dL/db = -2
    ReluNetwork net = zero_network(spec_of(1, 1, 1));
    net.weights[0](0, 0) = 1.0;
    ParamGrads g = loss_and_gradient(net, column({1.0}), {2.0});
    EXPECT_DOUBLE_EQ(g.loss, 1.0);
    EXPECT_DOUBLE_EQ(g.dW[0](0, 0), -2.0);
    EXPECT_DOUBLE_EQ(g.db[0][0], -2.0);
}

TEST(LossAndGradient, RejectsDimensionMismatch) {
    ReluNetwork net = zero_network(spec_of(1, 1, 2));
    EXPECT_THROW(loss_and_gradient(net, column({1.0}), {1.0}), Error);
}

TEST(GradientOracle, MatchesCentralFiniteDifferences) {
    Rng meta(1234);
    for (int trial = 0; trial < 8; ++trial) {
        ReluNetworkSpec spec = spec_of(1 + int(meta.below(4)), 1 + int(meta.below(8)),
                                       1 + int(meta.below(3)));
        ReluNetwork net = init_network(spec, InitScheme::uniform_scaled, meta.next_u64());
        int n = 1 + int(meta.below(12));
        Matrix X(static_cast<std::size_t>(n), static_cast<std::size_t>(spec.in_dim));
        Vec y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < spec.in_dim; ++j) X(std::size_t(i), std::size_t(j)) = meta.uniform();
            y[std::size_t(i)] = meta.uniform();
        }
        ParamGrads an = loss_and_gradient(net, X, y);
        ParamGrads fd = finite_diff_gradient(net, X, y, 1e-5);
        for (int l = 0; l < spec.height; ++l) {
            for (std::size_t k = 0; k < an.dW[l].a.size(); ++k) {
                double a = an.dW[l].a[k], f = fd.dW[l].a[k];
                double denom = std::max({std::fabs(a), std::fabs(f), 1e-3});
                EXPECT_NEAR(a, f, std::max(1e-5 * denom, 1e-8));
            }
            for (std::size_t k = 0; k < an.db[l].size(); ++k) {
                double a = an.db[l][k], f = fd.db[l][k];
                double denom = std::max({std::fabs(a), std::fabs(f), 1e-3});
                EXPECT_NEAR(a, f, std::max(1e-5 * denom, 1e-8));
            }
        }
    }
}

TEST(FiniteDiff, ZeroLossPointGivesZeroGradient) {
    ReluNetwork net = init_network(spec_of(2, 3, 1), InitScheme::uniform_scaled, 6);
    Matrix X = column({0.2, 0.8});
    Vec y = {net.forward({0.2})[0], net.forward({0.8})[0]};
    ParamGrads fd = finite_diff_gradient(net, X, y, 1e-5);
    for (const auto& W : fd.dW)
        for (double v : W.a) EXPECT_NEAR(v, 0.0, 1e-8);
}

TEST(FiniteDiff, SingleParameterQuadratic) {
    // loss(w) = (w*1 - 2)^2 at w = 0.5 has derivative 2(0.5-2) = -3
    ReluNetwork net = zero_network(spec_of(1, 1, 1));
    net.weights[0](0, 0) = 0.5;
    ParamGrads fd = finite_diff_gradient(net, column({1.0}), {2.0}, 1e-5);
    EXPECT_NEAR(fd.dW[0](0, 0), -3.0, 1e-6);
}

TEST(FiniteDiff, RejectsZeroStep) {
    ReluNetwork net = zero_network(spec_of(1, 1, 1));
    EXPECT_THROW(finite_diff_gradient(net, column({1.0}), {1.0}, 0.0), Error);
}

TEST(Fit, SelfGeneratedDataIsAlreadyOptimal) {
    ReluNetwork net = init_network(spec_of(2, 4, 1), InitScheme::uniform_scaled, 11);
    Matrix X = column({0.1, 0.4, 0.9});
    Vec y(3);
    for (int i = 0; i < 3; ++i) y[i] = net.forward(X.row(i))[0];
    FitConfig fc;
    fc.max_epochs = 50;
    fc.patience = 3;
    auto [fitted, trace] = fit_least_squares(net, X, y, fc);
    EXPECT_LE(trace.losses[0], 1e-10);
    EXPECT_LE(trace.final_loss, 1e-10);
}

TEST(Fit, LinearRegressionMatchesNormalEquations) {
    Rng rng(8);
    Vec xs, ys;
    for (int i = 0; i < 64; ++i) {
        double x = rng.uniform();
        xs.push_back(x);
        ys.push_back(0.7 * x + 0.1 + 0.05 * rng.normal());
    }
    auto [slope, intercept] = normal_equations(xs, ys);

    ReluNetwork net = zero_network(spec_of(1, 1, 1));
    FitConfig fc;
    fc.learning_rate = 0.4;
    fc.max_epochs = 20000;
    fc.patience = 20000;
    auto [fitted, trace] = fit_least_squares(net, column(xs), ys, fc);
    EXPECT_NEAR(fitted.weights[0](0, 0), slope, 1e-4);
    EXPECT_NEAR(fitted.biases[0][0], intercept, 1e-4);
}

TEST(Fit, DeterministicTrace) {
    Rng rng(9);
    Vec xs, ys;
    for (int i = 0; i < 16; ++i) {
        xs.push_back(rng.uniform());
        ys.push_back(rng.uniform());
    }
    ReluNetwork init = init_network(spec_of(2, 3, 1), InitScheme::uniform_scaled, 4);
    FitConfig fc;
    fc.max_epochs = 100;
    fc.patience = 100;
    fc.seed = 42;
    auto [net_a, trace_a] = fit_least_squares(init, column(xs), ys, fc);
    auto [net_b, trace_b] = fit_least_squares(init, column(xs), ys, fc);
    EXPECT_TRUE(net_a == net_b);
    EXPECT_EQ(trace_a.losses, trace_b.losses);
}

TEST(Fit, DescentWithSmallLearningRate) {
    Rng rng(10);
    Vec xs, ys;
    for (int i = 0; i < 32; ++i) {
        xs.push_back(rng.uniform());
        ys.push_back(std::sin(3.0 * xs.back()));
    }
    ReluNetwork init = init_network(spec_of(3, 5, 1), InitScheme::uniform_scaled, 12);
    FitConfig fc;
    fc.learning_rate = 1e-3;
    fc.max_epochs = 300;
    fc.patience = 300;
    auto [net, trace] = fit_least_squares(init, column(xs), ys, fc);
    for (std::size_t e = 1; e < trace.losses.size(); ++e)
        EXPECT_LE(trace.losses[e], trace.losses[e - 1] + 1e-12);
}

TEST(Fit, ProjectionKeepsIteratesFeasible) {
    Rng rng(13);
    Vec xs, ys;
    for (int i = 0; i < 32; ++i) {
        xs.push_back(rng.uniform());
        ys.push_back(rng.uniform());
    }
    ReluNetworkSpec constraints = spec_of(2, 3, 1);
    constraints.sparsity_budget = 0.8;
    constraints.weight_bound = 0.3;
    ReluNetwork init = init_network(constraints, InitScheme::uniform_scaled, 5);
    FitConfig fc;
    fc.learning_rate = 0.3;
    fc.max_epochs = 200;
    fc.patience = 200;
    fc.project_every = 4;
    auto [net, trace] = fit_least_squares(init, column(xs), ys, fc, &constraints);
    auto rep = check_constraints(net);
    EXPECT_TRUE(rep.satisfies_B);
    EXPECT_TRUE(rep.satisfies_S);
}

TEST(MultiRestart, OneRestartEqualsSingleFit) {
    Rng rng(14);
    Vec xs, ys;
    for (int i = 0; i < 16; ++i) {
        xs.push_back(rng.uniform());
        ys.push_back(rng.uniform());
    }
    ReluNetworkSpec spec = spec_of(2, 3, 1);
    FitConfig fc;
    fc.max_epochs = 60;
    fc.patience = 60;
    fc.seed = 77;
    fc.restarts = 1;
    auto [multi_net, multi_trace] = multi_restart_fit(spec, column(xs), ys, fc);

    std::uint64_t rs = derive_seed(fc.seed, "restart", 0);
    ReluNetwork init = init_network(spec, InitScheme::uniform_scaled, rs);
    FitConfig single = fc;
    single.seed = rs;
    auto [net, trace] = fit_least_squares(init, column(xs), ys, single);
    EXPECT_TRUE(multi_net == net);
    EXPECT_DOUBLE_EQ(multi_trace.final_loss, trace.final_loss);
}

TEST(MultiRestart, BestOfFiveNeverWorseThanBestOfOne) {
    Rng rng(15);
    Vec xs, ys;
    for (int i = 0; i < 24; ++i) {
        xs.push_back(rng.uniform());
        ys.push_back(std::fabs(xs.back() - 0.4));
    }
    ReluNetworkSpec spec = spec_of(2, 4, 1);
    FitConfig one;
    one.max_epochs = 150;
    one.patience = 150;
    one.seed = 31;
    one.restarts = 1;
    FitConfig five = one;
    five.restarts = 5;
    auto [net1, trace1] = multi_restart_fit(spec, column(xs), ys, one);
    auto [net5, trace5] = multi_restart_fit(spec, column(xs), ys, five);
    EXPECT_LE(trace5.final_loss, trace1.final_loss);
}

TEST(MultiRestart, ConvexCaseAllRestartsAgree) {
    Rng rng(16);
    Vec xs, ys;
    for (int i = 0; i < 48; ++i) {
        xs.push_back(rng.uniform());
        ys.push_back(1.3 * xs.back() - 0.2);
    }
    auto [slope, intercept] = normal_equations(xs, ys);
    ReluNetworkSpec spec = spec_of(1, 1, 1);
    FitConfig fc;
    fc.learning_rate = 0.4;
    fc.max_epochs = 20000;
    fc.patience = 20000;
    for (int r = 0; r < 3; ++r) {
        ReluNetwork init =
            init_network(spec, InitScheme::uniform_scaled, derive_seed(99, "restart", r));
        auto [net, trace] = fit_least_squares(init, column(xs), ys, fc);
        EXPECT_NEAR(net.weights[0](0, 0), slope, 1e-4);
        EXPECT_NEAR(net.biases[0][0], intercept, 1e-4);
    }
}

TEST(Fit, MiniBatchRunsAndIsDeterministic) {
    Rng rng(18);
    Vec xs, ys;
    for (int i = 0; i < 40; ++i) {
        xs.push_back(rng.uniform());
        ys.push_back(0.5 * xs.back());
    }
    ReluNetwork init = init_network(spec_of(2, 3, 1), InitScheme::uniform_scaled, 6);
    FitConfig fc;
    fc.batch_size = 8;
    fc.max_epochs = 50;
    fc.patience = 50;
    fc.seed = 5;
    auto [a, ta] = fit_least_squares(init, column(xs), ys, fc);
    auto [b, tb] = fit_least_squares(init, column(xs), ys, fc);
    EXPECT_TRUE(a == b);
    EXPECT_LT(ta.final_loss, ta.losses[0]);
}
