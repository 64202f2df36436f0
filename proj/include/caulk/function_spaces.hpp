#ifndef CAULK_FUNCTION_SPACES_HPP
#define CAULK_FUNCTION_SPACES_HPP

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "caulk/common.hpp"
#include "caulk/rng.hpp"

namespace caulk {

enum class RoughnessMode { kink, polynomial };

inline std::string to_string(RoughnessMode m) {
    return m == RoughnessMode::kink ? "kink" : "polynomial";
}

/// One layer of a compositional target: each output coordinate depends on
/// exactly `active_vars` of the `in_dim` inputs.
struct SmoothLayerSpec {
    int layer_index = 1;
    int in_dim = 1;
    int out_dim = 1;
    int active_vars = 1;
    double beta = 1.0;
    RoughnessMode mode = RoughnessMode::kink;

    void validate() const {
        require(in_dim >= 1 && out_dim >= 1, "layer " + std::to_string(layer_index) + ": dims must be positive");
        require(active_vars >= 1 && active_vars <= in_dim,
                "layer " + std::to_string(layer_index) + ": active_vars must be in [1, in_dim]");
        require(beta > 0.0, "layer " + std::to_string(layer_index) + ": beta must be positive");
        if (mode == RoughnessMode::kink)
            require(beta <= 1.0, "layer " + std::to_string(layer_index) + ": kink mode requires beta in (0,1]");
    }
};

struct CompositionSpec {
    std::vector<SmoothLayerSpec> layers;
    std::uint64_t seed = 0;

    int depth() const { return int(layers.size()); }
    int input_dim() const { return layers.front().in_dim; }

    void validate() const {
        require(!layers.empty(), "composition: needs at least one layer");
        for (const auto& l : layers) l.validate();
        for (std::size_t i = 0; i + 1 < layers.size(); ++i)
            require(layers[i].out_dim == layers[i + 1].in_dim,
                    "composition: layer " + std::to_string(i + 1) + " out_dim != layer " +
                        std::to_string(i + 2) + " in_dim");
        require(layers.back().out_dim == 1, "composition: final out_dim must be 1");
    }
};

/// Scalar coordinate function of one layer: a ridge form in u = w . x_S,
/// clamped to [0,1].
///   kink:       clamp(scale * |u - kink|^beta + offset)
///   polynomial: clamp(poly(u))
struct CoordinateFn {
    std::vector<int> active;   // indices into the layer input, size t
    Vec direction;             // L2-normalized ridge direction, size t
    RoughnessMode mode = RoughnessMode::kink;
    double beta = 1.0;
    double scale = 1.0;        // kink mode
    double kink = 0.0;         // kink mode
    double offset = 0.0;       // kink mode
    Vec poly;                  // polynomial mode, coefficients c0..cd

    double ridge(const Vec& x) const {
        double u = 0.0;
        for (std::size_t k = 0; k < active.size(); ++k) u += direction[k] * x[active[k]];
        return u;
    }

    double value_of_u(double u) const {
        if (mode == RoughnessMode::kink)
            return scale * std::pow(std::fabs(u - kink), beta) + offset;
        double v = 0.0;
        for (std::size_t k = poly.size(); k-- > 0;) v = v * u + poly[k];
        return v;
    }

    double deriv_of_u(double u) const {
        if (mode == RoughnessMode::kink) {
            double d = u - kink;
            if (d == 0.0) return 0.0;  // subgradient convention at the kink
            return scale * beta * std::pow(std::fabs(d), beta - 1.0) * (d > 0.0 ? 1.0 : -1.0);
        }
        double v = 0.0;
        for (std::size_t k = poly.size(); k-- > 1;) v = v * u + poly[k] * double(k);
        return v;
    }

    double eval(const Vec& x) const { return clamp01(value_of_u(ridge(x))); }

    /// Range of the ridge variable over the unit cube.
    std::pair<double, double> u_range() const {
        double lo = 0.0, hi = 0.0;
        for (double w : direction) (w < 0.0 ? lo : hi) += w;
        return {lo, hi};
    }

    /// Exact Hoelder constant of the unclamped u-form on the u-range,
    /// at exponent beta for kinks and exponent 1 for polynomials.
    double nominal_holder() const {
        if (mode == RoughnessMode::kink) return scale;
        auto [lo, hi] = u_range();
        double m = std::max(std::fabs(deriv_of_u(lo)), std::fabs(deriv_of_u(hi)));
        // derivative of a cubic is quadratic; scan its critical point too
        if (poly.size() == 4 && poly[3] != 0.0) {
            double um = -poly[2] / (3.0 * poly[3]);
            if (um > lo && um < hi) m = std::max(m, std::fabs(deriv_of_u(um)));
        }
        return m;
    }
};

struct TargetLayer {
    int in_dim = 1;
    int out_dim = 1;
    std::vector<CoordinateFn> coords;

    Vec eval(const Vec& z) const {
        Vec out(out_dim);
        for (int j = 0; j < out_dim; ++j) out[j] = coords[j].eval(z);
        return out;
    }

    /// d out / d in at z; rows gated to zero where the clamp saturates.
    Matrix jacobian(const Vec& z) const {
        Matrix J(out_dim, in_dim);
        for (int j = 0; j < out_dim; ++j) {
            const auto& c = coords[j];
            double u = c.ridge(z);
            double pre = c.value_of_u(u);
            if (pre < 0.0 || pre > 1.0) continue;
            double d = c.deriv_of_u(u);
            for (std::size_t k = 0; k < c.active.size(); ++k) J(j, c.active[k]) = d * c.direction[k];
        }
        return J;
    }
};

/// Closed-form compositional target f* = f_H o ... o f_1 with exact
/// per-layer evaluation; all layer outputs lie in [0,1]^d.
struct TargetFunction {
    CompositionSpec spec;
    std::vector<TargetLayer> layers;

    int depth() const { return int(layers.size()); }
    int input_dim() const { return layers.front().in_dim; }

    void check_domain(const Vec& z, int layer, const char* what) const {
        int d = layers[layer - 1].in_dim;
        require(int(z.size()) == d, std::string(what) + ": expected dim " + std::to_string(d) +
                                        ", got " + std::to_string(z.size()));
        for (double v : z)
            require(v >= -1e-12 && v <= 1.0 + 1e-12,
                    std::string(what) + ": point outside [0,1]^" + std::to_string(d));
    }

    /// Composes layers from..to (1-based, inclusive).
    Vec eval_partial(int from, int to, const Vec& z) const {
        require(from >= 1 && from <= to && to <= depth(),
                "eval_partial: layer range [" + std::to_string(from) + "," + std::to_string(to) +
                    "] out of bounds for depth " + std::to_string(depth()));
        check_domain(z, from, "eval_partial");
        Vec v = z;
        for (int i = from; i <= to; ++i) v = layers[i - 1].eval(v);
        return v;
    }

    double eval(const Vec& x) const { return eval_partial(1, depth(), x)[0]; }

    /// Jacobian of the partial composition from..to at z.
    Matrix partial_jacobian(int from, int to, const Vec& z) const {
        Vec v = z;
        Matrix J = identity_matrix(layers[from - 1].in_dim);
        for (int i = from; i <= to; ++i) {
            J = matmul(layers[i - 1].jacobian(v), J);
            v = layers[i - 1].eval(v);
        }
        return J;
    }
};

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<int> pick_active(Rng& rng, int in_dim, int t) {
    std::vector<int> idx(in_dim);
    for (int i = 0; i < in_dim; ++i) idx[i] = i;
    // partial Fisher-Yates
    for (int i = 0; i < t; ++i) {
        int j = i + int(rng.below(std::uint64_t(in_dim - i)));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(t);
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline Vec pick_direction(Rng& rng, int t) {
    Vec w(t);
    double n = 0.0;
    while (n < 1e-9) {
        for (int k = 0; k < t; ++k) w[k] = rng.normal();
        n = norm2(w);
    }
    for (double& v : w) v /= n;
    return w;
}

inline CoordinateFn make_coordinate(Rng& rng, const SmoothLayerSpec& ls,
                                    const std::vector<Vec>& input_probes) {
    CoordinateFn c;
    c.active = pick_active(rng, ls.in_dim, ls.active_vars);
    c.direction = pick_direction(rng, ls.active_vars);
    c.mode = ls.mode;
    c.beta = ls.beta;
    // parameter placement uses the effective ridge range over propagated
    // probes, not the whole-cube range: deep compositions would otherwise
    // collapse onto near-constant slices of each layer
    double lo = 1e300, hi = -1e300;
    for (const Vec& z : input_probes) {
        double u = c.ridge(z);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    double pad = 0.02 * (hi - lo) + 1e-9;
    lo -= pad;
    hi += pad;
    if (ls.mode == RoughnessMode::kink) {
        c.kink = lo + rng.uniform(0.3, 0.7) * (hi - lo);
        c.offset = rng.uniform(0.05, 0.25);
        c.scale = rng.uniform(0.5, 1.0);
        double maxdev = std::pow(std::max(hi - c.kink, c.kink - lo), ls.beta);
        if (c.offset + c.scale * maxdev > 0.95) c.scale = (0.95 - c.offset) / maxdev;
    } else {
        int degree = ls.beta <= 1.0 ? 1 : (ls.beta <= 2.0 ? 2 : 3);
        Vec raw(degree + 1);
        for (double& v : raw) v = rng.uniform(-1.0, 1.0);
        c.poly = raw;
        // rescale affinely so the image of [lo,hi] is [0.05,0.95]; the clamp
        // then never bites and the layer stays smooth on the whole cube
        double pmin = 1e300, pmax = -1e300;
        const int grid = 1024;
        for (int g = 0; g <= grid; ++g) {
            double u = lo + (hi - lo) * double(g) / grid;
            double v = c.value_of_u(u);
            pmin = std::min(pmin, v);
            pmax = std::max(pmax, v);
        }
        bool flip = rng.uniform() < 0.5;
        if (pmax - pmin < 1e-9) {
            c.poly.assign(degree + 1, 0.0);
            c.poly[0] = 0.5;
        } else {
            double a = 0.9 / (pmax - pmin);
            if (flip) a = -a;
            double b = flip ? 0.95 + a * pmax : 0.05 - a * pmin;
            for (double& v : c.poly) v *= a;
            c.poly[0] += b;
        }
    }
    return c;
}

}  // namespace detail

/// Builds the closed-form target for a composition spec, deterministically
/// in spec.seed.
inline TargetFunction make_composition(const CompositionSpec& spec) {
    spec.validate();
    TargetFunction f;
    f.spec = spec;
    Rng root(derive_seed(spec.seed, "composition"));
    Rng probe_rng(derive_seed(spec.seed, "range-probes"));
    std::vector<Vec> probes(512, Vec(std::size_t(spec.input_dim())));
    for (auto& p : probes)
        for (auto& v : p) v = probe_rng.uniform();
    for (const auto& ls : spec.layers) {
        Rng layer_rng(derive_seed(root.next_u64(), "layer", std::uint64_t(ls.layer_index)));
        TargetLayer layer;
        layer.in_dim = ls.in_dim;
        layer.out_dim = ls.out_dim;
        for (int j = 0; j < ls.out_dim; ++j)
            layer.coords.push_back(detail::make_coordinate(layer_rng, ls, probes));
        for (auto& p : probes) p = layer.eval(p);
        f.layers.push_back(std::move(layer));
    }
    return f;
}

inline double eval_target(const TargetFunction& f, const Vec& x) { return f.eval(x); }

// ---------------------------------------------------------------------------
// Covariates and samples
// ---------------------------------------------------------------------------

enum class CovariateKind { uniform_cube, affine_warp };

/// Source/target covariate law on [0,1]^d. The warp is coordinatewise
/// x_j = offset_j + slope_j * u_j with u uniform, support kept inside the cube.
struct CovariateDistribution {
    CovariateKind kind = CovariateKind::uniform_cube;
    Vec offsets;  // affine_warp only
    Vec slopes;   // affine_warp only

    static CovariateDistribution uniform() { return {}; }

    static CovariateDistribution warp(Vec offsets, Vec slopes) {
        CovariateDistribution d;
        d.kind = CovariateKind::affine_warp;
        require(offsets.size() == slopes.size(), "affine_warp: offsets/slopes size mismatch");
        for (std::size_t j = 0; j < offsets.size(); ++j) {
            require(slopes[j] > 0.0 && offsets[j] >= 0.0 && offsets[j] + slopes[j] <= 1.0 + 1e-12,
                    "affine_warp: support leaves [0,1] at coordinate " + std::to_string(j));
        }
        d.offsets = std::move(offsets);
        d.slopes = std::move(slopes);
        return d;
    }

    Vec draw(Rng& rng, int dim) const {
        Vec x(dim);
        for (int j = 0; j < dim; ++j) {
            double u = rng.uniform();
            if (kind == CovariateKind::affine_warp) {
                require(int(offsets.size()) == dim, "affine_warp: parameter dim mismatch");
                x[j] = offsets[j] + slopes[j] * u;
            } else {
                x[j] = u;
            }
        }
        return x;
    }
};

inline Matrix sample_covariates(const CovariateDistribution& dist, int dim, int n, std::uint64_t seed) {
    require(n >= 1, "sample_covariates: n must be >= 1");
    Rng rng(derive_seed(seed, "covariates"));
    Matrix X(static_cast<std::size_t>(n), static_cast<std::size_t>(dim));
    for (int i = 0; i < n; ++i) {
        Vec x = dist.draw(rng, dim);
        for (int j = 0; j < dim; ++j) X(i, j) = x[j];
    }
    return X;
}

enum class NoiseKind { gaussian, uniform };

struct RegressionSample {
    Matrix inputs;   // n x d
    Vec outputs;     // n
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    int n() const { return int(inputs.rows); }
};

/// Draws (X_i, Y_i) with Y_i = f*(X_i) + xi_i, xi zero-mean with variance
/// proxy noise_sigma^2 (gaussian by default, uniform as a robustness option).
inline RegressionSample make_regression_sample(const TargetFunction& f, const CovariateDistribution& dist,
                                               int n, double noise_sigma, std::uint64_t seed,
                                               NoiseKind noise = NoiseKind::gaussian) {
    require(noise_sigma >= 0.0, "make_regression_sample: noise_sigma must be >= 0");
    RegressionSample s;
    s.inputs = sample_covariates(dist, f.input_dim(), n, derive_seed(seed, "sample-x"));
    s.outputs.resize(n);
    s.noise_sigma = noise_sigma;
    s.seed = seed;
    Rng noise_rng(derive_seed(seed, "sample-noise"));
    double half_width = noise_sigma * std::sqrt(3.0);
    for (int i = 0; i < n; ++i) {
        double xi = 0.0;
        if (noise_sigma > 0.0)
            xi = noise == NoiseKind::gaussian ? noise_sigma * noise_rng.normal()
                                              : noise_rng.uniform(-half_width, half_width);
        s.outputs[i] = f.eval(s.inputs.row(i)) + xi;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Hoelder constant estimation
// ---------------------------------------------------------------------------

/// Lower estimate of the alpha-Hoelder constant of g on [0,1]^dim:
/// max over sampled pairs of ||g(x)-g(y)|| / ||x-y||^alpha.
///
/// Pairs come from an i.i.d. stream mixing far pairs with log-scaled short
/// pairs; at every power-of-two prefix a bisection refinement zooms on the
/// best pair seen so far. Prefix streams and checkpoint sets are nested, so
/// the estimate is monotone nondecreasing in num_pairs for a fixed seed.
inline double holder_constant_estimate(const VectorFn& g, int dim, double alpha, int num_pairs,
                                       std::uint64_t seed) {
    require(alpha > 0.0 && alpha <= 1.0, "holder_constant_estimate: alpha must be in (0,1]");
    require(num_pairs >= 1, "holder_constant_estimate: num_pairs must be >= 1");

    auto ratio = [&](const Vec& x, const Vec& y) -> double {
        double d = dist2(x, y);
        if (d < 1e-12) return -1.0;
        return dist2(g(x), g(y)) / std::pow(d, alpha);
    };

    Rng rng(derive_seed(seed, "holder"));
    double best = -1.0;
    Vec bx, by;
    long valid = 0;

    // Refinement around the best pair seen so far: extend the pair to the
    // full chord of the cube through it, localize the roughest point by
    // gridded second differences (ratios alone cannot find a kink: symmetric
    // pairs straddling it cancel for even kink forms), then probe pairs
    // anchored at the localized point across a geometric scale ladder.
    auto zoom = [&](const Vec& x, const Vec& y) {
        double span = dist2(x, y);
        if (span < 1e-12) return;
        const std::size_t d = x.size();
        Vec dir(d);
        for (std::size_t k = 0; k < d; ++k) dir[k] = (y[k] - x[k]) / span;
        double t_lo = -1e18, t_hi = 1e18;
        for (std::size_t k = 0; k < d; ++k) {
            if (dir[k] == 0.0) continue;
            double a = (0.0 - x[k]) / dir[k];
            double b = (1.0 - x[k]) / dir[k];
            t_lo = std::max(t_lo, std::min(a, b));
            t_hi = std::min(t_hi, std::max(a, b));
        }
        if (!(t_hi > t_lo)) return;
        auto at = [&](double t) {
            Vec p(d);
            for (std::size_t k = 0; k < d; ++k)
                p[k] = std::min(1.0, std::max(0.0, x[k] + t * dir[k]));
            return p;
        };
        const int cells = 48;
        double lo = t_lo, hi = t_hi;
        for (int level = 0; level < 8 && hi - lo > 2e-9; ++level) {
            double h = (hi - lo) / cells;
            std::vector<Vec> vals(2 * cells + 1);
            for (int i = 0; i <= 2 * cells; ++i) vals[i] = g(at(lo + 0.5 * h * i));
            int rough_cell = 0;
            double rough = -1.0;
            for (int i = 0; i < cells; ++i) {
                const Vec &a = vals[2 * i], &m = vals[2 * i + 1], &b = vals[2 * i + 2];
                double second = 0.0;
                for (std::size_t k = 0; k < a.size(); ++k) {
                    double s2 = a[k] + b[k] - 2.0 * m[k];
                    second += s2 * s2;
                }
                best = std::max(best, ratio(at(lo + h * i), at(lo + h * (i + 1))));
                if (second > rough) {
                    rough = second;
                    rough_cell = i;
                }
            }
            double new_lo = lo + h * (rough_cell - 1);
            double new_hi = lo + h * (rough_cell + 2);
            lo = std::max(t_lo, new_lo);
            hi = std::min(t_hi, new_hi);
        }
        for (double anchor_t : {lo, 0.5 * (lo + hi), hi}) {
            Vec anchor = at(anchor_t);
            for (double s = 2e-9; s <= t_hi - t_lo; s *= 4.0) {
                best = std::max({best, ratio(anchor, at(anchor_t + s)),
                                 ratio(anchor, at(anchor_t - s))});
            }
        }
    };

    for (int p = 1; p <= num_pairs; ++p) {
        Vec x(dim), y(dim);
        for (int k = 0; k < dim; ++k) x[k] = rng.uniform();
        if (p % 2 == 0) {
            for (int k = 0; k < dim; ++k) y[k] = rng.uniform();
        } else {
            double r = std::pow(10.0, rng.uniform(-7.0, 0.0));
            Vec u(dim);
            double n = 0.0;
            while (n < 1e-9) {
                for (int k = 0; k < dim; ++k) u[k] = rng.normal();
                n = norm2(u);
            }
            for (int k = 0; k < dim; ++k) y[k] = std::min(1.0, std::max(0.0, x[k] + r * u[k] / n));
        }
        double rt = ratio(x, y);
        if (rt < 0.0) continue;
        ++valid;
        if (rt > best) {
            best = rt;
            bx = x;
            by = y;
        }
        if ((p & (p - 1)) == 0 && p >= 64 && best >= 0.0) zoom(bx, by);
    }
    require(valid > 0, "holder_constant_estimate: all sampled pairs degenerate");
    if (best >= 0.0 && !bx.empty()) zoom(bx, by);
    return std::max(best, 0.0);
}

inline double holder_constant_estimate(const ScalarFn& g, int dim, double alpha, int num_pairs,
                                       std::uint64_t seed) {
    VectorFn wrap = [&g](const Vec& x) { return Vec{g(x)}; };
    return holder_constant_estimate(wrap, dim, alpha, num_pairs, seed);
}

// ---------------------------------------------------------------------------
// Serialization (versioned, text, exact decimal round trip)
// ---------------------------------------------------------------------------

inline std::string serialize_target(const TargetFunction& f) {
    std::ostringstream os;
    os << "caulk-target v1\n";
    os << "seed " << f.spec.seed << "\n";
    os << "layers " << f.depth() << "\n";
    for (int i = 0; i < f.depth(); ++i) {
        const auto& ls = f.spec.layers[i];
        const auto& layer = f.layers[i];
        os << "layer " << (i + 1) << " in " << ls.in_dim << " out " << ls.out_dim << " t "
           << ls.active_vars << " beta " << format_double(ls.beta) << " mode " << to_string(ls.mode)
           << "\n";
        for (const auto& c : layer.coords) {
            os << "coord active";
            for (int a : c.active) os << " " << a;
            os << " dir";
            for (double w : c.direction) os << " " << format_double(w);
            if (c.mode == RoughnessMode::kink) {
                os << " kink " << format_double(c.scale) << " " << format_double(c.kink) << " "
                   << format_double(c.offset) << " " << format_double(c.beta);
            } else {
                os << " poly";
                for (double v : c.poly) os << " " << format_double(v);
            }
            os << "\n";
        }
    }
    return os.str();
}

inline TargetFunction deserialize_target(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> std::string {
        require(bool(std::getline(is, line)), "target parse: unexpected end of input at line " +
                                                  std::to_string(lineno + 1));
        ++lineno;
        return line;
    };
    auto fail = [&](const std::string& msg) -> void {
        throw Error("target parse: " + msg + " at line " + std::to_string(lineno));
    };

    if (next_line() != "caulk-target v1") fail("expected header 'caulk-target v1'");
    TargetFunction f;
    {
        std::istringstream ls(next_line());
        std::string kw;
        ls >> kw >> f.spec.seed;
        if (kw != "seed" || ls.fail()) fail("expected 'seed <value>'");
    }
    int H = 0;
    {
        std::istringstream ls(next_line());
        std::string kw;
        ls >> kw >> H;
        if (kw != "layers" || ls.fail() || H < 1) fail("expected 'layers <count>'");
    }
    for (int i = 1; i <= H; ++i) {
        SmoothLayerSpec ls;
        {
            std::istringstream l(next_line());
            std::string kw, kin, kout, kt, kbeta, kmode, mode;
            int idx = 0;
            l >> kw >> idx >> kin >> ls.in_dim >> kout >> ls.out_dim >> kt >> ls.active_vars >>
                kbeta >> ls.beta >> kmode >> mode;
            if (l.fail() || kw != "layer" || idx != i || kin != "in" || kout != "out" || kt != "t" ||
                kbeta != "beta" || kmode != "mode")
                fail("malformed layer header");
            if (mode == "kink")
                ls.mode = RoughnessMode::kink;
            else if (mode == "polynomial")
                ls.mode = RoughnessMode::polynomial;
            else
                fail("unknown mode '" + mode + "'");
            ls.layer_index = i;
        }
        TargetLayer layer;
        layer.in_dim = ls.in_dim;
        layer.out_dim = ls.out_dim;
        for (int j = 0; j < ls.out_dim; ++j) {
            std::istringstream l(next_line());
            std::string kw;
            l >> kw;
            if (kw != "coord") fail("expected 'coord'");
            CoordinateFn c;
            c.mode = ls.mode;
            c.beta = ls.beta;
            l >> kw;
            if (kw != "active") fail("expected 'active'");
            for (int k = 0; k < ls.active_vars; ++k) {
                int a = -1;
                l >> a;
                if (l.fail() || a < 0 || a >= ls.in_dim) fail("bad active index");
                c.active.push_back(a);
            }
            l >> kw;
            if (kw != "dir") fail("expected 'dir'");
            for (int k = 0; k < ls.active_vars; ++k) {
                double w = 0;
                l >> w;
                if (l.fail()) fail("bad direction entry");
                c.direction.push_back(w);
            }
            l >> kw;
            if (kw == "kink") {
                l >> c.scale >> c.kink >> c.offset >> c.beta;
                if (l.fail()) fail("bad kink parameters");
            } else if (kw == "poly") {
                double v;
                while (l >> v) c.poly.push_back(v);
                if (c.poly.empty()) fail("empty polynomial");
            } else {
                fail("expected 'kink' or 'poly'");
            }
            layer.coords.push_back(std::move(c));
        }
        f.spec.layers.push_back(ls);
        f.layers.push_back(std::move(layer));
    }
    f.spec.validate();
    return f;
}

}  // namespace caulk

#endif  // CAULK_FUNCTION_SPACES_HPP
