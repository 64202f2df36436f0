#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "caulk/function_spaces.hpp"
#include "reference.hpp"

using namespace caulk;
using caulk_tests::identity_composition;

namespace {

// Independent straight-line evaluation of one coordinate (no Horner, no
// shared code with CoordinateFn::eval).
double hand_coordinate(const CoordinateFn& c, const Vec& z) {
    double u = 0.0;
    for (std::size_t k = 0; k < c.active.size(); ++k) u += c.direction[k] * z[c.active[k]];
    double v;
    if (c.mode == RoughnessMode::kink) {
        v = c.scale * std::pow(std::fabs(u - c.kink), c.beta) + c.offset;
    } else {
        v = 0.0;
        double p = 1.0;
        for (double coeff : c.poly) {
            v += coeff * p;
            p *= u;
        }
    }
    return std::min(1.0, std::max(0.0, v));
}

Vec hand_layer(const TargetLayer& layer, const Vec& z) {
    Vec out;
    for (const auto& c : layer.coords) out.push_back(hand_coordinate(c, z));
    return out;
}

double hand_compose(const TargetFunction& f, Vec z, int from, int to) {
    for (int i = from; i <= to; ++i) z = hand_layer(f.layers[i - 1], z);
    return z[0];
}

CompositionSpec three_layer_spec() {
    CompositionSpec spec;
    spec.seed = 11;
    spec.layers = {
        {1, 2, 2, 2, 2.0, RoughnessMode::polynomial},
        {2, 2, 2, 1, 0.5, RoughnessMode::kink},
        {3, 2, 1, 2, 2.0, RoughnessMode::polynomial},
    };
    return spec;
}

}  // namespace

TEST(MakeComposition, SingleKinkLayerMatchesClosedForm) {
    CompositionSpec spec;
    spec.seed = 7;
    spec.layers = {{1, 1, 1, 1, 1.0, RoughnessMode::kink}};
    TargetFunction f = make_composition(spec);
    const CoordinateFn& c = f.layers[0].coords[0];
    EXPECT_EQ(c.mode, RoughnessMode::kink);
    for (double x : {0.0, 0.1, 0.33, 0.5, 0.77, 1.0}) {
        double w = c.direction[0];
        double expect = clamp01(c.scale * std::fabs(w * x - c.kink) + c.offset);
        EXPECT_NEAR(f.eval({x}), expect, 1e-15);
    }
}

TEST(MakeComposition, IdentityParameterLayersComposeToIdentity) {
    TargetFunction f = identity_composition(2);
    for (double x : {0.0, 0.25, 0.3, 0.6, 1.0}) EXPECT_DOUBLE_EQ(f.eval({x}), x);
}

TEST(MakeComposition, ThreeLayerMatchesHandComposedOracle) {
    TargetFunction f = make_composition(three_layer_spec());
    const Vec points[5] = {{0.1, 0.2}, {0.9, 0.4}, {0.5, 0.5}, {0.0, 1.0}, {0.33, 0.77}};
    for (const Vec& x : points) EXPECT_NEAR(f.eval(x), hand_compose(f, x, 1, 3), 1e-12);
}

TEST(MakeComposition, RejectsDimensionMismatchNamingLayer) {
    CompositionSpec spec;
    spec.seed = 1;
    spec.layers = {
        {1, 2, 2, 1, 1.0, RoughnessMode::kink},
        {2, 3, 1, 1, 1.0, RoughnessMode::kink},  // in_dim 3 != out_dim 2
    };
    try {
        make_composition(spec);
        FAIL() << "expected rejection";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("layer 1"), std::string::npos);
    }
}

TEST(MakeComposition, RejectsKinkWithBetaAboveOne) {
    CompositionSpec spec;
    spec.seed = 1;
    spec.layers = {{1, 1, 1, 1, 1.5, RoughnessMode::kink}};
    EXPECT_THROW(make_composition(spec), Error);
}

TEST(EvalTarget, IdentityCompositionAtPoint) {
    TargetFunction f = identity_composition(2);
    EXPECT_DOUBLE_EQ(eval_target(f, {0.3}), 0.3);
}

TEST(EvalTarget, KinkPointIsZero) {
    TargetFunction f = identity_composition(1);
    CoordinateFn& c = f.layers[0].coords[0];
    c.beta = 0.5;
    c.kink = 0.5;
    EXPECT_DOUBLE_EQ(f.eval({0.5}), 0.0);
}

TEST(EvalTarget, RejectsOutOfDomain) {
    TargetFunction f = identity_composition(1);
    EXPECT_THROW(f.eval({1.5}), Error);
    EXPECT_THROW(f.eval({-0.1}), Error);
}

TEST(EvalPartial, SingleLayerAndFullRange) {
    TargetFunction f = make_composition(three_layer_spec());
    Vec z = {0.1, 0.9};
    Vec mid = f.eval_partial(2, 2, z);
    EXPECT_EQ(mid.size(), 2u);
    Vec expect = hand_layer(f.layers[1], z);
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(mid[j], expect[j], 1e-14);

    for (const Vec& x : {Vec{0.2, 0.8}, Vec{0.6, 0.1}})
        EXPECT_DOUBLE_EQ(f.eval_partial(1, 3, x)[0], f.eval(x));
}

TEST(EvalPartial, RejectsBadRange) {
    TargetFunction f = make_composition(three_layer_spec());
    EXPECT_THROW(f.eval_partial(0, 2, {0.1, 0.1}), Error);
    EXPECT_THROW(f.eval_partial(2, 4, {0.1, 0.1}), Error);
    EXPECT_THROW(f.eval_partial(3, 2, {0.1, 0.1}), Error);
}

TEST(CompositionConsistency, SplitCompositionMatchesFull) {
    TargetFunction f = make_composition(three_layer_spec());
    Rng rng(99);
    for (int k = 1; k < 3; ++k) {
        for (int t = 0; t < 100; ++t) {
            Vec x = {rng.uniform(), rng.uniform()};
            Vec mid = f.eval_partial(1, k, x);
            EXPECT_NEAR(f.eval_partial(k + 1, 3, mid)[0], f.eval(x), 1e-12);
        }
    }
}

TEST(CompositionRange, LayerOutputsStayInUnitCube) {
    TargetFunction f = make_composition(three_layer_spec());
    Rng rng(5);
    for (int t = 0; t < 10000; ++t) {
        Vec v = {rng.uniform(), rng.uniform()};
        for (int i = 1; i <= 3; ++i) {
            v = f.layers[i - 1].eval(v);
            for (double h : v) {
                ASSERT_GE(h, 0.0);
                ASSERT_LE(h, 1.0);
            }
        }
        v = {rng.uniform(), rng.uniform()};
    }
}

TEST(CompositionDeterminism, SameSpecSameSeedIdentical) {
    TargetFunction a = make_composition(three_layer_spec());
    TargetFunction b = make_composition(three_layer_spec());
    EXPECT_EQ(serialize_target(a), serialize_target(b));
    CompositionSpec other = three_layer_spec();
    other.seed = 12;
    EXPECT_NE(serialize_target(a), serialize_target(make_composition(other)));
}

TEST(SampleCovariates, UniformCubeBasics) {
    Matrix X = sample_covariates(CovariateDistribution::uniform(), 3, 1, 42);
    ASSERT_EQ(X.rows, 1u);
    ASSERT_EQ(X.cols, 3u);
    for (double v : X.a) {
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
    Matrix Y = sample_covariates(CovariateDistribution::uniform(), 3, 1, 42);
    EXPECT_EQ(X.a, Y.a);
}

TEST(SampleCovariates, IdentityWarpMatchesUniformByKsTest) {
    const int n = 10000;
    Matrix U = sample_covariates(CovariateDistribution::uniform(), 1, n, 1);
    Matrix W = sample_covariates(CovariateDistribution::warp({0.0}, {1.0}), 1, n, 2);
    Vec a = U.a, b = W.a;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // two-sample Kolmogorov-Smirnov statistic
    double ks = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        ks = std::max(ks, std::fabs(double(i) / n - double(j) / n));
    }
    EXPECT_LT(ks, 0.025);  // 1.36*sqrt(2/n) ~ 0.019 at the 5% level
}

TEST(SampleCovariates, WarpRejectsSupportOutsideCube) {
    EXPECT_THROW(CovariateDistribution::warp({0.5}, {0.7}), Error);
    EXPECT_THROW(CovariateDistribution::warp({-0.1}, {0.5}), Error);
}

TEST(RegressionSample, ZeroNoiseIsExact) {
    TargetFunction f = identity_composition(1);
    RegressionSample s = make_regression_sample(f, CovariateDistribution::uniform(), 50, 0.0, 3);
    for (int i = 0; i < s.n(); ++i) EXPECT_DOUBLE_EQ(s.outputs[i], s.inputs(i, 0));
}

TEST(RegressionSample, NoiseVarianceMatchesSigma) {
    TargetFunction f = identity_composition(1);
    const double sigma = 0.1;
    RegressionSample s = make_regression_sample(f, CovariateDistribution::uniform(), 100000, sigma, 4);
    Vec residuals(s.outputs.size());
    for (int i = 0; i < s.n(); ++i) residuals[i] = s.outputs[i] - f.eval(s.inputs.row(i));
    double m = mean_of(residuals);
    double var = 0.0;
    for (double r : residuals) var += (r - m) * (r - m);
    var /= double(residuals.size() - 1);
    EXPECT_NEAR(var, sigma * sigma, 0.03 * sigma * sigma);
}

TEST(RegressionSample, DeterministicInSeed) {
    TargetFunction f = identity_composition(1);
    RegressionSample a = make_regression_sample(f, CovariateDistribution::uniform(), 32, 0.2, 9);
    RegressionSample b = make_regression_sample(f, CovariateDistribution::uniform(), 32, 0.2, 9);
    EXPECT_EQ(a.inputs.a, b.inputs.a);
    EXPECT_EQ(a.outputs, b.outputs);
}

TEST(RegressionSample, UniformNoiseHasMatchingVarianceProxy) {
    TargetFunction f = identity_composition(1);
    RegressionSample s = make_regression_sample(f, CovariateDistribution::uniform(), 100000, 0.1, 5,
                                                NoiseKind::uniform);
    Vec residuals(s.outputs.size());
    double bound = 0.1 * std::sqrt(3.0);
    for (int i = 0; i < s.n(); ++i) {
        residuals[i] = s.outputs[i] - f.eval(s.inputs.row(i));
        ASSERT_LE(std::fabs(residuals[i]), bound + 1e-12);
    }
    double m = mean_of(residuals);
    double var = 0.0;
    for (double r : residuals) var += (r - m) * (r - m);
    var /= double(residuals.size() - 1);
    EXPECT_NEAR(var, 0.01, 0.0005);
}

TEST(HolderEstimate, ConstantMapIsZero) {
    ScalarFn g = [](const Vec&) { return 0.42; };
    EXPECT_DOUBLE_EQ(holder_constant_estimate(g, 1, 0.5, 1000, 1), 0.0);
}

TEST(HolderEstimate, IdentityMapIsOne) {
    ScalarFn g = [](const Vec& x) { return x[0]; };
    double est = holder_constant_estimate(g, 1, 1.0, 10000, 1);
    EXPECT_GE(est, 0.99);
    EXPECT_LE(est, 1.0 + 1e-9);
}

TEST(HolderEstimate, SqrtAtHalfHolderIsNearOne) {
    ScalarFn g = [](const Vec& x) { return std::sqrt(x[0]); };
    double est = holder_constant_estimate(g, 1, 0.5, 100000, 1);
    EXPECT_GE(est, 0.95);
    EXPECT_LE(est, 1.0 + 1e-9);
}

TEST(HolderEstimate, MonotoneInNumPairsForNestedStreams) {
    ScalarFn g = [](const Vec& x) { return std::sqrt(std::fabs(x[0] - 0.37)); };
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        double e3 = holder_constant_estimate(g, 1, 0.5, 1000, seed);
        double e4 = holder_constant_estimate(g, 1, 0.5, 10000, seed);
        double e5 = holder_constant_estimate(g, 1, 0.5, 100000, seed);
        EXPECT_LE(e3, e4 + 1e-15);
        EXPECT_LE(e4, e5 + 1e-15);
    }
}

TEST(HolderEstimate, RejectsBadArguments) {
    ScalarFn g = [](const Vec& x) { return x[0]; };
    EXPECT_THROW(holder_constant_estimate(g, 1, 0.0, 100, 1), Error);
    EXPECT_THROW(holder_constant_estimate(g, 1, 1.2, 100, 1), Error);
    EXPECT_THROW(holder_constant_estimate(g, 1, 1.0, 0, 1), Error);
}

TEST(SmoothnessCertificate, KinkExponentIsExact) {
    CompositionSpec spec;
    spec.seed = 31;
    spec.layers = {{1, 2, 1, 2, 0.5, RoughnessMode::kink}};
    TargetFunction f = make_composition(spec);
    double nominal = f.layers[0].coords[0].scale;
    VectorFn g = [&f](const Vec& x) { return Vec{f.eval(x)}; };

    double at_beta = holder_constant_estimate(g, 2, 0.5, 100000, 7);
    EXPECT_LE(at_beta, 2.0 * nominal);

    double above_beta = holder_constant_estimate(g, 2, 0.7, 100000, 7);
    EXPECT_GT(above_beta, 10.0 * nominal);
}

TEST(TargetSerialization, RoundTripIsExact) {
    TargetFunction f = make_composition(three_layer_spec());
    std::string text = serialize_target(f);
    TargetFunction g = deserialize_target(text);
    EXPECT_EQ(serialize_target(g), text);
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
        Vec x = {rng.uniform(), rng.uniform()};
        EXPECT_DOUBLE_EQ(f.eval(x), g.eval(x));
    }
}

TEST(TargetSerialization, RejectsTruncatedAndWrongVersion) {
    TargetFunction f = make_composition(three_layer_spec());
    std::string text = serialize_target(f);
    EXPECT_THROW(deserialize_target(text.substr(0, text.size() / 2)), Error);
    std::string wrong = text;
    wrong.replace(wrong.find("v1"), 2, "v9");
    try {
        deserialize_target(wrong);
        FAIL() << "expected version rejection";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("caulk-target v1"), std::string::npos);
    }
}
