#include <gtest/gtest.h>

#include <cmath>

#include "caulk/network.hpp"

using namespace caulk;

namespace {

ReluNetworkSpec small_spec(int height, int width, int in_dim, int out_dim, double S = 1e9,
                           double B = 1e9) {
    ReluNetworkSpec s;
    s.height = height;
    s.width = width;
    s.in_dim = in_dim;
    s.out_dim = out_dim;
    s.sparsity_budget = S;
    s.weight_bound = B;
    return s;
}

}  // namespace

TEST(Forward, SingleAffineIdentity) {
    ReluNetwork net = zero_network(small_spec(1, 1, 1, 1));
    net.weights[0](0, 0) = 1.0;
    EXPECT_DOUBLE_EQ(net.forward({0.7})[0], 0.7);
}

TEST(Forward, AllZeroNetworkIsZero) {
    ReluNetwork net = zero_network(small_spec(3, 4, 2, 1));
    for (double x : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(net.forward({x, 1.0 - x})[0], 0.0);
}

TEST(Forward, MatchesHandRolledOracle) {
    ReluNetwork net = init_network(small_spec(2, 3, 2, 1), InitScheme::uniform_scaled, 5);
    const Vec inputs[5] = {{0.1, 0.9}, {0.5, 0.5}, {1.0, 0.0}, {0.3, 0.3}, {0.8, 0.2}};
    for (const Vec& x : inputs) {
        // straight-line evaluation: affine, relu, affine
        double h[3];
        for (int r = 0; r < 3; ++r) {
            h[r] = net.biases[0][r];
            for (int c = 0; c < 2; ++c) h[r] += net.weights[0](r, c) * x[c];
            if (h[r] < 0.0) h[r] = 0.0;
        }
        double out = net.biases[1][0];
        for (int c = 0; c < 3; ++c) out += net.weights[1](0, c) * h[c];
        EXPECT_NEAR(net.forward(x)[0], out, 1e-14);
    }
}

TEST(Forward, RejectsDimensionMismatch) {
    ReluNetwork net = zero_network(small_spec(1, 1, 2, 1));
    EXPECT_THROW(net.forward({0.5}), Error);
}

TEST(CheckConstraints, ZeroNetwork) {
    ReluNetwork net = zero_network(small_spec(2, 2, 1, 1, 1.0, 1.0));
    auto rep = check_constraints(net);
    EXPECT_DOUBLE_EQ(rep.max_norm, 0.0);
    EXPECT_DOUBLE_EQ(rep.path_sum, 0.0);
    EXPECT_TRUE(rep.satisfies_B);
    EXPECT_TRUE(rep.satisfies_S);
}

TEST(CheckConstraints, SingleEntryViolatesB) {
    ReluNetwork net = zero_network(small_spec(1, 1, 1, 1, 1e9, 1.0));
    net.weights[0](0, 0) = 2.5;
    auto rep = check_constraints(net);
    EXPECT_FALSE(rep.satisfies_B);
    EXPECT_DOUBLE_EQ(rep.max_norm, 2.5);
}

TEST(CheckConstraints, PathSumMatchesHandArithmetic) {
    ReluNetwork net = zero_network(small_spec(2, 2, 2, 1));
    net.weights[0](0, 0) = 0.5;
    net.weights[0](1, 1) = -0.75;
    net.biases[0][0] = 0.25;
    net.weights[1](0, 0) = 1.5;
    net.biases[1][0] = -0.125;
    // layer 1: |W|=0.75, |b|=0.25 ; layer 2: |W|=1.5, |b|=0.125
    EXPECT_DOUBLE_EQ(check_constraints(net).path_sum, 0.75 + 0.25 + 1.5 + 0.125);
}

TEST(Project, FeasibleNetworkUnchanged) {
    ReluNetworkSpec spec = small_spec(2, 2, 1, 1, 3.0, 1.0);
    ReluNetwork net = init_network(spec, InitScheme::uniform_scaled, 7);
    ReluNetwork projected = project_constraints(net, spec);
    EXPECT_TRUE(net == projected);
}

TEST(Project, ClipsSingleWeight) {
    ReluNetworkSpec spec = small_spec(1, 1, 1, 1, 1e9, 1.0);
    ReluNetwork net = zero_network(spec);
    net.weights[0](0, 0) = 3.0;
    EXPECT_DOUBLE_EQ(project_constraints(net, spec).weights[0](0, 0), 1.0);
}

TEST(Project, RescalesPathSumOntoBudget) {
    ReluNetworkSpec spec = small_spec(2, 2, 2, 1, 1.0, 10.0);
    ReluNetwork net = zero_network(spec);
    net.weights[0](0, 0) = 1.0;
    net.weights[1](0, 0) = 1.0;  // path_sum = 2 = 2S
    ReluNetwork projected = project_constraints(net, spec);
    auto rep = check_constraints(projected);
    EXPECT_TRUE(rep.satisfies_S);
    EXPECT_NEAR(rep.path_sum, 1.0, 1e-12);
    EXPECT_NEAR(projected.weights[0](0, 0), 0.5, 1e-12);
}

TEST(Project, Idempotent) {
    ReluNetworkSpec spec = small_spec(3, 3, 2, 1, 0.7, 0.4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ReluNetwork net = init_network(spec, InitScheme::uniform_scaled, seed);
        for (auto& W : net.weights)
            for (double& v : W.a) v *= 3.7;
        ReluNetwork once = project_constraints(net, spec);
        ReluNetwork twice = project_constraints(once, spec);
        EXPECT_TRUE(once == twice);
        EXPECT_TRUE(check_constraints(once).satisfies_S);
        EXPECT_TRUE(check_constraints(once).satisfies_B);
    }
}

TEST(Init, DeterministicInSeed) {
    ReluNetworkSpec spec = small_spec(2, 4, 3, 1);
    EXPECT_TRUE(init_network(spec, InitScheme::uniform_scaled, 9) ==
                init_network(spec, InitScheme::uniform_scaled, 9));
    EXPECT_FALSE(init_network(spec, InitScheme::uniform_scaled, 9) ==
                 init_network(spec, InitScheme::uniform_scaled, 10));
}

TEST(Init, ZeroBiasRidgeHasZeroBiases) {
    ReluNetwork net = init_network(small_spec(3, 4, 2, 1), InitScheme::zero_bias_ridge, 3);
    for (const auto& b : net.biases)
        for (double v : b) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Init, UniformScaledRespectsBound) {
    ReluNetwork net = init_network(small_spec(2, 4, 1, 1, 1e9, 1.0), InitScheme::uniform_scaled, 3);
    auto rep = check_constraints(net);
    EXPECT_LE(rep.max_norm, 1.0);
}

TEST(GridEnumeration, TwoParametersWithSparsityBudget) {
    // height-1 net with 1x1 weight and a bias: grid {-1,0,1}^2, S=1 keeps
    // the 5 combinations with |w| + |b| <= 1
    FiniteNetworkClass cls = enumerate_grid_class(small_spec(1, 1, 1, 1, 1.0, 1.0), 1.0, 100);
    EXPECT_EQ(cls.members.size(), 5u);
    FiniteNetworkClass all = enumerate_grid_class(small_spec(1, 1, 1, 1, 1e9, 1.0), 1.0, 100);
    EXPECT_EQ(all.members.size(), 9u);
}

TEST(GridEnumeration, MembersSatisfyConstraints) {
    FiniteNetworkClass cls = enumerate_grid_class(small_spec(1, 1, 1, 1, 1.0, 1.0), 0.5, 1000);
    EXPECT_GT(cls.members.size(), 0u);
    for (const auto& net : cls.members) {
        auto rep = check_constraints(net);
        EXPECT_TRUE(rep.satisfies_B);
        EXPECT_TRUE(rep.satisfies_S);
    }
}

TEST(GridEnumeration, RejectsWhenCapExceededNamingRequiredCap) {
    try {
        enumerate_grid_class(small_spec(1, 2, 2, 1, 1.0, 1.0), 1.0, 10);
        FAIL() << "expected cap rejection";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("required cap"), std::string::npos);
    }
}

TEST(PiecewiseLinearity, ForwardIsAffineAlongLinesExceptAtKinks) {
    ReluNetwork net = init_network(small_spec(3, 6, 2, 1), InitScheme::uniform_scaled, 13);
    Rng rng(21);
    for (int rep = 0; rep < 10; ++rep) {
        Vec x = {rng.uniform(), rng.uniform()};
        Vec d = {rng.normal(), rng.normal()};
        const int K = 50;
        Vec vals(K);
        for (int k = 0; k < K; ++k) {
            double eps = 0.02 * double(k) / (K - 1);
            vals[k] = net.forward({x[0] + eps * d[0], x[1] + eps * d[1]})[0];
        }
        int kinks = 0;
        double scale = 0.0;
        for (int k = 0; k < K; ++k) scale = std::max(scale, std::fabs(vals[k]));
        for (int k = 1; k + 1 < K; ++k) {
            double second = vals[k + 1] - 2.0 * vals[k] + vals[k - 1];
            if (std::fabs(second) > 1e-9 * std::max(1.0, scale)) ++kinks;
        }
        EXPECT_LE(kinks, 12);  // finitely many; each ReLU crossing shows up in <= 2 triples
    }
}

TEST(NetworkSerialization, RoundTripBitwise) {
    ReluNetwork net = init_network(small_spec(3, 5, 2, 1, 2.0, 0.9), InitScheme::uniform_scaled, 77);
    ReluNetwork copy = deserialize_network(serialize_network(net));
    EXPECT_TRUE(net == copy);
    EXPECT_EQ(copy.spec.sparsity_budget, net.spec.sparsity_budget);
}

TEST(NetworkSerialization, RejectsTruncatedWithLineNumber) {
    ReluNetwork net = init_network(small_spec(2, 2, 1, 1), InitScheme::uniform_scaled, 3);
    std::string text = serialize_network(net);
    try {
        deserialize_network(text.substr(0, text.size() / 3));
        FAIL() << "expected truncation rejection";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
    }
}

TEST(NetworkSerialization, RejectsWrongVersionNamingVersions) {
    ReluNetwork net = zero_network(small_spec(1, 1, 1, 1));
    std::string text = serialize_network(net);
    text.replace(text.find("relunet v1"), 10, "relunet v7");
    try {
        deserialize_network(text);
        FAIL() << "expected version rejection";
    } catch (const Error& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("relunet v7"), std::string::npos);
        EXPECT_NE(msg.find("relunet v1"), std::string::npos);
    }
}
