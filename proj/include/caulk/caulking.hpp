#ifndef CAULK_CAULKING_HPP
#define CAULK_CAULKING_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "caulk/common.hpp"
#include "caulk/fitting.hpp"
#include "caulk/function_spaces.hpp"
#include "caulk/network.hpp"
#include "caulk/rng.hpp"

namespace caulk {

/// Frozen evaluable piece of a pre-trained model: either exact target layers
/// (oracle pre-training), a chain of affine maps cut out of a fitted ReLU
/// network (empirical pre-training), or the identity for degenerate splits.
struct MapPart {
    enum class Kind { identity, target_slice, relu_slice };
    Kind kind = Kind::identity;
    int in_dim = 1;
    int out_dim = 1;

    // target_slice
    TargetFunction target;
    int from = 1, to = 0;

    // relu_slice: affine maps with ReLU between consecutive ones
    std::vector<Matrix> W;
    std::vector<Vec> b;
    bool leading_relu = false;
    bool trailing_relu = false;

    static MapPart identity(int dim) {
        MapPart p;
        p.kind = Kind::identity;
        p.in_dim = p.out_dim = dim;
        return p;
    }

    static MapPart target_slice(const TargetFunction& f, int from, int to) {
        require(from >= 1 && from <= to && to <= f.depth(), "target_slice: bad layer range");
        MapPart p;
        p.kind = Kind::target_slice;
        p.target = f;
        p.from = from;
        p.to = to;
        p.in_dim = f.layers[from - 1].in_dim;
        p.out_dim = f.layers[to - 1].out_dim;
        return p;
    }

    Vec eval(const Vec& z) const {
        switch (kind) {
            case Kind::identity:
                return z;
            case Kind::target_slice: {
                // evaluate the closed forms directly: a trainable adapter can
                // emit values outside [0,1], where the ridge forms still
                // extend naturally (the per-layer clamp restores the range)
                Vec v = z;
                for (int i = from; i <= to; ++i) v = target.layers[i - 1].eval(v);
                return v;
            }
            case Kind::relu_slice: {
                Vec v = z;
                for (std::size_t l = 0; l < W.size(); ++l) {
                    if (l > 0 || leading_relu)
                        for (double& h : v) h = std::max(0.0, h);
                    Vec next = W[l].matvec(v);
                    for (std::size_t k = 0; k < next.size(); ++k) next[k] += b[l][k];
                    v = std::move(next);
                }
                if (trailing_relu)
                    for (double& h : v) h = std::max(0.0, h);
                return v;
            }
        }
        throw Error("MapPart: bad kind");
    }

    /// d eval / d z, with ReLU subgradient 0 at kinks and clamp gating for
    /// target slices.
    Matrix jacobian(const Vec& z) const {
        switch (kind) {
            case Kind::identity:
                return identity_matrix(z.size());
            case Kind::target_slice:
                return target.partial_jacobian(from, to, z);
            case Kind::relu_slice: {
                Vec v = z;
                Matrix J = identity_matrix(z.size());
                auto relu_gate = [](const Vec& u, Matrix& M) {
                    for (std::size_t r = 0; r < M.rows; ++r)
                        if (u[r] <= 0.0)
                            for (std::size_t c = 0; c < M.cols; ++c) M(r, c) = 0.0;
                };
                for (std::size_t l = 0; l < W.size(); ++l) {
                    if (l > 0 || leading_relu) {
                        relu_gate(v, J);
                        for (double& h : v) h = std::max(0.0, h);
                    }
                    J = matmul(W[l], J);
                    Vec next = W[l].matvec(v);
                    for (std::size_t k = 0; k < next.size(); ++k) next[k] += b[l][k];
                    v = std::move(next);
                }
                if (trailing_relu) relu_gate(v, J);
                return J;
            }
        }
        throw Error("MapPart: bad kind");
    }
};

struct Provenance {
    enum class Kind { oracle, empirical };
    Kind kind = Kind::oracle;
    int source_size = 0;  // m, empirical only

    std::string describe() const {
        return kind == Kind::oracle ? "oracle" : "empirical(m=" + std::to_string(source_size) + ")";
    }
};

/// Frozen (head, extractor) pair split at target layers (i_e, i_h): the
/// extractor covers layers 1..i_e-1 and the head layers i_h+1..H, so the
/// ideal adapter is the middle composition f_{i_h} o ... o f_{i_e}.
struct PretrainedModel {
    MapPart extractor;
    MapPart head;
    int i_e = 1;
    int i_h = 1;
    Provenance provenance;

    int adapter_in_dim() const { return extractor.out_dim; }
    int adapter_out_dim() const { return head.in_dim; }

    double eval_with(const VectorFn& adapter, const Vec& x) const {
        return head.eval(adapter(extractor.eval(x)))[0];
    }
};

/// Trainable middle class: depth = number of hidden ReLU layers (0 = one
/// affine map), with optional (S, B) constraints.
struct AdapterSpec {
    int depth = 0;
    int width = 4;
    std::optional<std::pair<double, double>> constraints;  // (S, B)
    int in_dim = 1;
    int out_dim = 1;

    ReluNetworkSpec network_spec() const {
        ReluNetworkSpec s;
        s.height = depth + 1;
        s.width = width;
        s.in_dim = in_dim;
        s.out_dim = out_dim;
        if (constraints) {
            s.sparsity_budget = constraints->first;
            s.weight_bound = constraints->second;
        }
        return s;
    }
};

struct CaulkedModel {
    PretrainedModel pretrained;
    ReluNetwork adapter;

    double eval(const Vec& x) const {
        return pretrained.head.eval(adapter.forward(pretrained.extractor.eval(x)))[0];
    }

    ScalarFn as_fn() const {
        CaulkedModel copy = *this;
        return [copy](const Vec& x) { return copy.eval(x); };
    }
};

// ---------------------------------------------------------------------------
// Pre-training
// ---------------------------------------------------------------------------

/// Exact outer layers of f*: caulkability holds with epsilon = 0, witnessed
/// by the ideal adapter eval_partial(i_e, i_h, .).
inline PretrainedModel pretrain_oracle(const TargetFunction& f, int i_e, int i_h) {
    require(1 <= i_e && i_e <= i_h && i_h <= f.depth(),
            "pretrain_oracle: split (" + std::to_string(i_e) + "," + std::to_string(i_h) +
                ") invalid for depth " + std::to_string(f.depth()));
    PretrainedModel m;
    m.i_e = i_e;
    m.i_h = i_h;
    m.provenance = {Provenance::Kind::oracle, 0};
    m.extractor = i_e == 1 ? MapPart::identity(f.input_dim()) : MapPart::target_slice(f, 1, i_e - 1);
    m.head = i_h == f.depth() ? MapPart::identity(1) : MapPart::target_slice(f, i_h + 1, f.depth());
    return m;
}

/// The ideal adapter of an oracle split.
inline VectorFn ideal_adapter(const TargetFunction& f, int i_e, int i_h) {
    TargetFunction copy = f;
    return [copy, i_e, i_h](const Vec& z) { return copy.eval_partial(i_e, i_h, z); };
}

namespace detail {

inline MapPart relu_prefix(const ReluNetwork& net, int upto /* affine maps 1..upto */) {
    MapPart p;
    p.kind = MapPart::Kind::relu_slice;
    for (int l = 0; l < upto; ++l) {
        p.W.push_back(net.weights[l]);
        p.b.push_back(net.biases[l]);
    }
    p.trailing_relu = true;
    p.in_dim = net.spec.in_dim;
    p.out_dim = int(p.W.back().rows);
    return p;
}

inline MapPart relu_suffix(const ReluNetwork& net, int from /* 1-based affine index */) {
    MapPart p;
    p.kind = MapPart::Kind::relu_slice;
    for (int l = from - 1; l < net.spec.height; ++l) {
        p.W.push_back(net.weights[l]);
        p.b.push_back(net.biases[l]);
    }
    p.leading_relu = false;  // the extractor side already applied its ReLU
    p.in_dim = int(p.W.front().cols);
    p.out_dim = int(p.W.back().rows);
    return p;
}

}  // namespace detail

/// Fits a full ReLU network to m source-distribution samples, then freezes
/// its prefix/suffix at the architectural split mirroring (i_e, i_h).
inline PretrainedModel pretrain_empirical(const TargetFunction& f, const CovariateDistribution& source,
                                          int m, const ReluNetworkSpec& net_spec, int i_e, int i_h,
                                          const FitConfig& config, double noise_sigma = 0.0) {
    require(m >= 1, "pretrain_empirical: source sample size m must be >= 1");
    require(net_spec.height == f.depth(),
            "pretrain_empirical: network height must equal target depth for the architectural split");
    require(1 <= i_e && i_e <= i_h && i_h <= f.depth(), "pretrain_empirical: invalid split");
    RegressionSample sample =
        make_regression_sample(f, source, m, noise_sigma, derive_seed(config.seed, "source-sample"));
    auto [net, trace] = multi_restart_fit(net_spec, sample.inputs, sample.outputs, config);
    (void)trace;
    PretrainedModel model;
    model.i_e = i_e;
    model.i_h = i_h;
    model.provenance = {Provenance::Kind::empirical, m};
    model.extractor =
        i_e == 1 ? MapPart::identity(net_spec.in_dim) : detail::relu_prefix(net, i_e - 1);
    if (i_h == f.depth()) {
        model.head = MapPart::identity(net_spec.out_dim);
    } else {
        model.head = detail::relu_suffix(net, i_h + 1);
        model.head.leading_relu = true;  // adapter output enters through the suffix ReLU
    }
    return model;
}

// ---------------------------------------------------------------------------
// Fitting with frozen extractor and head
// ---------------------------------------------------------------------------

namespace detail {

inline HeadLink head_link(const MapPart& head) {
    MapPart copy = head;
    HeadLink link;
    link.value = [copy](const Vec& z) { return copy.eval(z)[0]; };
    link.grad = [copy](const Vec& z) { return copy.jacobian(z).row(0); };
    return link;
}

inline Matrix cache_features(const MapPart& extractor, const Matrix& X) {
    Matrix Z(X.rows, std::size_t(extractor.out_dim));
    for (std::size_t i = 0; i < X.rows; ++i) {
        Vec z = extractor.eval(X.row(i));
        for (std::size_t j = 0; j < Z.cols; ++j) Z(i, j) = z[j];
    }
    return Z;
}

}  // namespace detail

inline void check_interfaces(const PretrainedModel& pre, const AdapterSpec& spec) {
    require(spec.in_dim == pre.adapter_in_dim(),
            "caulk: extractor-adapter interface mismatch: extractor emits " +
                std::to_string(pre.adapter_in_dim()) + ", adapter expects " +
                std::to_string(spec.in_dim));
    require(spec.out_dim == pre.adapter_out_dim(),
            "caulk: adapter-head interface mismatch: adapter emits " + std::to_string(spec.out_dim) +
                ", head expects " + std::to_string(pre.adapter_out_dim()));
}

/// Empirical caulking: least squares over the adapter class with the
/// extractor and head frozen. Extractor features over the sample are cached
/// once; gradients flow through the head into adapter parameters only.
inline std::pair<CaulkedModel, FitTrace> caulk_fit(const PretrainedModel& pretrained,
                                                   const AdapterSpec& adapter_spec,
                                                   const RegressionSample& sample,
                                                   const FitConfig& config) {
    check_interfaces(pretrained, adapter_spec);
    Matrix Z = detail::cache_features(pretrained.extractor, sample.inputs);
    HeadLink head = detail::head_link(pretrained.head);
    ReluNetworkSpec net_spec = adapter_spec.network_spec();
    const ReluNetworkSpec* constraints = adapter_spec.constraints ? &net_spec : nullptr;
    // centered init keeps the initial adapter outputs inside the head's
    // live region (frozen heads saturate outside [0,1])
    auto [adapter, trace] = multi_restart_fit(net_spec, Z, sample.outputs, config, constraints,
                                              &head, InitScheme::centered_output);
    return {CaulkedModel{pretrained, std::move(adapter)}, trace};
}

/// Caulk fit from an explicit adapter initialization (single run, no
/// restarts); used for warm starts and nesting checks.
inline std::pair<CaulkedModel, FitTrace> caulk_fit_from(const PretrainedModel& pretrained,
                                                        const ReluNetwork& adapter_init,
                                                        const RegressionSample& sample,
                                                        const FitConfig& config,
                                                        const ReluNetworkSpec* constraints = nullptr) {
    Matrix Z = detail::cache_features(pretrained.extractor, sample.inputs);
    HeadLink head = detail::head_link(pretrained.head);
    auto [adapter, trace] =
        fit_least_squares(adapter_init, Z, sample.outputs, config, constraints, &head);
    return {CaulkedModel{pretrained, std::move(adapter)}, trace};
}

/// Baseline: fit the full network class from scratch, nothing frozen.
inline std::pair<ReluNetwork, FitTrace> scratch_fit(const ReluNetworkSpec& spec,
                                                    const RegressionSample& sample,
                                                    const FitConfig& config,
                                                    const ReluNetworkSpec* constraints = nullptr) {
    return multi_restart_fit(spec, sample.inputs, sample.outputs, config, constraints);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct ErrorEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of ||model - f*||^2 under Q_X with standard error.
inline ErrorEstimate l2_error(const ScalarFn& model, const TargetFunction& f,
                              const CovariateDistribution& qx, int n_mc, std::uint64_t seed) {
    require(n_mc >= 2, "l2_error: n_mc must be >= 2");
    Rng rng(derive_seed(seed, "l2-error"));
    Vec sq(static_cast<std::size_t>(n_mc));
    for (int i = 0; i < n_mc; ++i) {
        Vec x = qx.draw(rng, f.input_dim());
        double d = model(x) - f.eval(x);
        sq[i] = d * d;
    }
    return {mean_of(sq), sem_of(sq)};
}

struct ClassificationSample {
    Matrix inputs;
    std::vector<int> labels;
    std::uint64_t seed = 0;
};

/// X_i ~ dist, Y_i ~ Bernoulli(f*(X_i)); rejects if the score leaves [0,1].
inline ClassificationSample make_classification_sample(const TargetFunction& f,
                                                       const CovariateDistribution& dist, int n,
                                                       std::uint64_t seed) {
    require(n >= 1, "make_classification_sample: n must be >= 1");
    ClassificationSample s;
    s.seed = seed;
    s.inputs = sample_covariates(dist, f.input_dim(), n, derive_seed(seed, "cls-x"));
    Rng label_rng(derive_seed(seed, "cls-y"));
    s.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        double p = f.eval(s.inputs.row(i));
        require(p >= -1e-12 && p <= 1.0 + 1e-12,
                "make_classification_sample: score " + format_double(p) + " outside [0,1]");
        s.labels[i] = label_rng.uniform() < p ? 1 : 0;
    }
    return s;
}

/// Plug-in classifier h(x) = 1{score(x) > 1/2}.
inline std::function<int(const Vec&)> plugin_classify(const ScalarFn& score) {
    return [score](const Vec& x) { return score(x) > 0.5 ? 1 : 0; };
}

/// Excess 0-1 risk over the Bayes classifier via the pointwise identity
/// E[|2 f*(X) - 1| 1{h(X) != h*(X)}].
inline ErrorEstimate excess_error(const std::function<int(const Vec&)>& classifier,
                                  const TargetFunction& f, const CovariateDistribution& qx, int n_mc,
                                  std::uint64_t seed) {
    require(n_mc >= 2, "excess_error: n_mc must be >= 2");
    Rng rng(derive_seed(seed, "excess"));
    Vec vals(static_cast<std::size_t>(n_mc));
    for (int i = 0; i < n_mc; ++i) {
        Vec x = qx.draw(rng, f.input_dim());
        double p = f.eval(x);
        int bayes = p > 0.5 ? 1 : 0;
        vals[i] = classifier(x) != bayes ? std::fabs(2.0 * p - 1.0) : 0.0;
    }
    return {mean_of(vals), sem_of(vals)};
}

/// Definition-based estimator: resamples labels and differences the
/// empirical errors of h and the Bayes rule on common draws.
inline ErrorEstimate excess_error_resampled(const std::function<int(const Vec&)>& classifier,
                                            const TargetFunction& f, const CovariateDistribution& qx,
                                            int n_mc, std::uint64_t seed) {
    require(n_mc >= 2, "excess_error_resampled: n_mc must be >= 2");
    Rng rng(derive_seed(seed, "excess-resampled"));
    Vec vals(static_cast<std::size_t>(n_mc));
    for (int i = 0; i < n_mc; ++i) {
        Vec x = qx.draw(rng, f.input_dim());
        double p = f.eval(x);
        int y = rng.uniform() < p ? 1 : 0;
        int bayes = p > 0.5 ? 1 : 0;
        vals[i] = double(classifier(x) != y) - double(bayes != y);
    }
    return {mean_of(vals), sem_of(vals)};
}

}  // namespace caulk

#endif  // CAULK_CAULKING_HPP
