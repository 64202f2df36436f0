#ifndef CAULK_VERIFY_HPP
#define CAULK_VERIFY_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "caulk/common.hpp"
#include "caulk/function_spaces.hpp"
#include "caulk/rng.hpp"

namespace caulk {

/// Finite metric space given by a symmetric distance matrix; validated
/// against the triangle inequality on construction.
struct MetricPointSet {
    Matrix dist;  // symmetric, zero diagonal

    std::size_t size() const { return dist.rows; }

    static MetricPointSet from_matrix(Matrix d) {
        require(d.rows == d.cols && d.rows >= 1, "metric set: matrix must be square and nonempty");
        for (std::size_t i = 0; i < d.rows; ++i) {
            require(std::fabs(d(i, i)) <= 1e-12, "metric set: nonzero diagonal");
            for (std::size_t j = 0; j < d.cols; ++j) {
                require(d(i, j) >= -1e-12, "metric set: negative distance");
                require(std::fabs(d(i, j) - d(j, i)) <= 1e-9, "metric set: asymmetric matrix");
            }
        }
        for (std::size_t i = 0; i < d.rows; ++i)
            for (std::size_t j = 0; j < d.rows; ++j)
                for (std::size_t k = 0; k < d.rows; ++k)
                    require(d(i, j) <= d(i, k) + d(k, j) + 1e-9,
                            "metric set: triangle inequality violated at (" + std::to_string(i) + "," +
                                std::to_string(j) + "," + std::to_string(k) + ")");
        MetricPointSet s;
        s.dist = std::move(d);
        return s;
    }
};

enum class CoverMode { exhaustive, greedy };

struct CoverResult {
    double delta = 0.0;
    std::optional<int> exact_size;
    int greedy_size = 0;
    int packing_lower_bound = 0;
    CoverMode method = CoverMode::greedy;
};

namespace detail {

inline int greedy_cover_size(const std::vector<std::uint32_t>& balls, std::uint32_t universe) {
    std::uint32_t covered = 0;
    int picked = 0;
    while (covered != universe) {
        int best = -1, best_gain = -1;
        for (std::size_t c = 0; c < balls.size(); ++c) {
            int gain = __builtin_popcount(balls[c] & ~covered);
            if (gain > best_gain) {
                best_gain = gain;
                best = int(c);
            }
        }
        covered |= balls[best];
        ++picked;
    }
    return picked;
}

inline void cover_branch(const std::vector<std::uint32_t>& balls, std::uint32_t universe,
                         std::uint32_t covered, int chosen, int& best) {
    if (covered == universe) {
        best = std::min(best, chosen);
        return;
    }
    if (chosen + 1 >= best) return;
    int max_ball = 0;
    for (std::uint32_t b : balls) max_ball = std::max(max_ball, __builtin_popcount(b & ~covered));
    int uncovered = __builtin_popcount(universe & ~covered);
    if (chosen + (uncovered + max_ball - 1) / max_ball >= best) return;

    // branch on the uncovered point with the fewest covering balls
    int pick = -1, fewest = 1 << 30;
    for (int p = 0; p < 32; ++p) {
        std::uint32_t bit = 1u << p;
        if (!(universe & bit) || (covered & bit)) continue;
        int cnt = 0;
        for (std::uint32_t b : balls)
            if (b & bit) ++cnt;
        if (cnt < fewest) {
            fewest = cnt;
            pick = p;
        }
    }
    std::uint32_t bit = 1u << pick;
    for (std::size_t c = 0; c < balls.size(); ++c)
        if (balls[c] & bit) cover_branch(balls, universe, covered | balls[c], chosen + 1, best);
}

}  // namespace detail

/// Internal covering number (centers drawn from the set). Exhaustive mode
/// finds the true minimum by branch-and-bound and is capped at 24 points.
/// The packing lower bound comes from a greedy maximal set with pairwise
/// distances > 2*delta: each delta-ball around a set point contains at most
/// one of its members, so its size bounds every internal cover from below.
inline CoverResult covering_number(const MetricPointSet& set, double delta, CoverMode mode) {
    require(delta > 0.0, "covering_number: delta must be positive");
    const std::size_t n = set.size();
    CoverResult res;
    res.delta = delta;
    res.method = mode;

    std::vector<std::uint32_t> balls(n, 0);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t p = 0; p < n; ++p)
            if (set.dist(c, p) <= delta + 1e-12) balls[c] |= 1u << p;
    std::uint32_t universe = n == 32 ? ~0u : (1u << n) - 1;

    {
        std::vector<std::size_t> kept;
        for (std::size_t p = 0; p < n; ++p) {
            bool ok = true;
            for (std::size_t q : kept)
                if (set.dist(p, q) <= 2.0 * delta + 1e-12) {
                    ok = false;
                    break;
                }
            if (ok) kept.push_back(p);
        }
        res.packing_lower_bound = int(kept.size());
    }

    res.greedy_size = detail::greedy_cover_size(balls, universe);
    if (mode == CoverMode::exhaustive) {
        require(n <= 24, "covering_number: exhaustive mode capped at 24 points, got " +
                             std::to_string(n));
        int best = res.greedy_size;
        detail::cover_branch(balls, universe, 0, 0, best);
        res.exact_size = best;
    }
    return res;
}

/// Sup-norm distance matrix of a finite map family over probe points:
/// d(f, g) = max over probes of the Euclidean norm of f(p) - g(p).
inline MetricPointSet function_class_metric(const std::vector<VectorFn>& members,
                                            const std::vector<Vec>& probes) {
    require(!members.empty(), "function_class_metric: empty family");
    require(!probes.empty(), "function_class_metric: no probe points");
    std::vector<std::vector<Vec>> values(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
        for (const Vec& p : probes) values[i].push_back(members[i](p));
    Matrix d(members.size(), members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            double m = 0.0;
            for (std::size_t p = 0; p < probes.size(); ++p)
                m = std::max(m, dist2(values[i][p], values[j][p]));
            d(i, j) = d(j, i) = m;
        }
    return MetricPointSet::from_matrix(std::move(d));
}

/// Kronecker low-discrepancy sequence on [0,1]^dim.
inline std::vector<Vec> low_discrepancy_probes(int dim, int count) {
    static const double kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    require(dim >= 1 && dim <= 8, "low_discrepancy_probes: dim must be in [1,8]");
    require(count >= 1, "low_discrepancy_probes: count must be >= 1");
    std::vector<Vec> probes(count, Vec(dim));
    for (int k = 0; k < count; ++k)
        for (int j = 0; j < dim; ++j) {
            double alpha = std::sqrt(kPrimes[j]);
            double v = 0.5 + (k + 1) * alpha;
            probes[k][j] = v - std::floor(v);
        }
    return probes;
}

// ---------------------------------------------------------------------------
// Composition covering bound:  N(delta, F) <= N((delta/C)^(1/alpha), G)
// ---------------------------------------------------------------------------

struct CoveringCheckPoint {
    double delta = 0.0;
    int n_f = 0;
    double radius_g = 0.0;
    int n_g = 0;
    bool holds = false;
};

struct CompositionCoveringReport {
    std::vector<CoveringCheckPoint> points;
    double measured_holder = 0.0;
    bool all_hold = true;
};

struct CompositionInstance {
    std::vector<VectorFn> adapters;      // finite class G
    VectorFn extractor;                  // g_e : X -> Z_i
    ScalarFn head;                       // g_h : Z_o -> R
    int x_dim = 1;
    int z_in_dim = 1;
    int z_out_dim = 1;
    double alpha = 1.0;
    double c_alpha = 1.0;                // analytic Hoelder constant of the head
};

namespace detail {

inline void check_head_holder(const CompositionInstance& inst, double& measured) {
    measured = holder_constant_estimate(inst.head, inst.z_out_dim, inst.alpha, 20000,
                                        derive_seed(0xC0FFEE, "head-holder"));
    require(measured <= inst.c_alpha * (1.0 + 1e-6),
            "head Hoelder precondition failed: measured constant " + format_double(measured) +
                " exceeds claimed " + format_double(inst.c_alpha));
}

inline std::vector<VectorFn> composed_family(const CompositionInstance& inst) {
    std::vector<VectorFn> fs;
    for (const auto& g_a : inst.adapters) {
        VectorFn ge = inst.extractor;
        ScalarFn gh = inst.head;
        fs.push_back([ge, gh, g_a](const Vec& x) { return Vec{gh(g_a(ge(x)))}; });
    }
    return fs;
}

}  // namespace detail

inline CompositionCoveringReport check_composition_covering(const CompositionInstance& inst,
                                                            const Vec& delta_grid,
                                                            const std::vector<Vec>& x_probes,
                                                            const std::vector<Vec>& z_probes,
                                                            double c_alpha_scale = 1.0) {
    require(!delta_grid.empty(), "check_composition_covering: empty delta grid");
    CompositionCoveringReport rep;
    detail::check_head_holder(inst, rep.measured_holder);
    double c_alpha = inst.c_alpha * c_alpha_scale;

    MetricPointSet f_metric = function_class_metric(detail::composed_family(inst), x_probes);
    MetricPointSet g_metric = function_class_metric(inst.adapters, z_probes);
    for (double delta : delta_grid) {
        CoveringCheckPoint pt;
        pt.delta = delta;
        pt.n_f = *covering_number(f_metric, delta, CoverMode::exhaustive).exact_size;
        pt.radius_g = std::pow(delta / c_alpha, 1.0 / inst.alpha);
        pt.n_g = *covering_number(g_metric, pt.radius_g, CoverMode::exhaustive).exact_size;
        pt.holds = pt.n_f <= pt.n_g;
        rep.all_hold = rep.all_hold && pt.holds;
        rep.points.push_back(pt);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Approximation bound:  inf_F ||f - f*||_{L2(Q)} <= C inf_G ||g - g*||^alpha
// ---------------------------------------------------------------------------

struct ApproximationReport {
    double left = 0.0;        // min over G of L2(Q_X probes) distance
    double left_std_error = 0.0;
    double right = 0.0;       // C * (min over G of sup distance to g*)^alpha
    double measured_holder = 0.0;
    bool holds = false;
};

inline ApproximationReport check_approximation_bound(const CompositionInstance& inst,
                                                     const VectorFn& g_star,
                                                     const std::vector<Vec>& qx_probes,
                                                     const std::vector<Vec>& z_probes,
                                                     double c_alpha_scale = 1.0) {
    ApproximationReport rep;
    detail::check_head_holder(inst, rep.measured_holder);
    double c_alpha = inst.c_alpha * c_alpha_scale;

    double best_mean = -1.0, best_se = 0.0;
    for (const auto& g_a : inst.adapters) {
        Vec sq;
        for (const Vec& x : qx_probes) {
            Vec z = inst.extractor(x);
            double d = inst.head(g_a(z)) - inst.head(g_star(z));
            sq.push_back(d * d);
        }
        double m = mean_of(sq);
        if (best_mean < 0.0 || m < best_mean) {
            best_mean = m;
            best_se = sem_of(sq);
        }
    }
    rep.left = std::sqrt(best_mean);
    rep.left_std_error = rep.left > 0.0 ? best_se / (2.0 * rep.left) : 0.0;

    double best_sup = -1.0;
    for (const auto& g_a : inst.adapters) {
        double sup = 0.0;
        for (const Vec& z : z_probes) sup = std::max(sup, dist2(g_a(z), g_star(z)));
        if (best_sup < 0.0 || sup < best_sup) best_sup = sup;
    }
    rep.right = c_alpha * std::pow(best_sup, inst.alpha);
    rep.holds = rep.left <= rep.right + 3.0 * rep.left_std_error + 1e-12;
    return rep;
}

// ---------------------------------------------------------------------------
// Sub-Gamma maximal inequality (Monte Carlo)
// ---------------------------------------------------------------------------

struct MaximalInequalityResult {
    double empirical = 0.0;   // mean over trials of max_i Z_i^2
    double std_error = 0.0;
    double bound = 0.0;       // 16 inf_gamma (...)
    bool holds = false;
};

/// Draws N iid Gaussian(0, sigma^2) per trial and compares E[max Z_i^2]
/// against 16 inf_{gamma} (sigma^2 ln(N/gamma)
///                         + gamma max{sigma^2, 2 F^2 ln(N/gamma)}
///                         + 2 gamma F^2),
/// the infimum taken over a 91-point log grid (an upper envelope, so grid
/// minimization only loosens the bound).
inline MaximalInequalityResult mc_maximal_inequality(int N, double sigma, double f_scale, int trials,
                                                     std::uint64_t seed) {
    require(N >= 1, "mc_maximal_inequality: N must be >= 1");
    require(trials >= 1000, "mc_maximal_inequality: need at least 1000 trials");
    require(sigma >= 0.0 && f_scale > 0.0, "mc_maximal_inequality: bad sigma or F");

    Rng rng(derive_seed(seed, "subgamma-max"));
    Vec maxes(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        double mx = 0.0;
        for (int i = 0; i < N; ++i) {
            double z = sigma * rng.normal();
            mx = std::max(mx, z * z);
        }
        maxes[t] = mx;
    }

    MaximalInequalityResult res;
    res.empirical = mean_of(maxes);
    res.std_error = sem_of(maxes);
    double best = -1.0;
    for (int k = 0; k <= 90; ++k) {
        double gamma = std::pow(10.0, -6.0 + 9.0 * double(k) / 90.0);
        if (gamma > double(N)) continue;  // the bound's derivation needs ln(N/gamma) >= 0
        double ln_term = std::log(double(N) / gamma);
        double v = sigma * sigma * ln_term +
                   gamma * std::max(sigma * sigma, 2.0 * f_scale * f_scale * ln_term) +
                   2.0 * gamma * f_scale * f_scale;
        if (best < 0.0 || v < best) best = v;
    }
    res.bound = 16.0 * best;
    res.holds = res.empirical <= res.bound;
    return res;
}

// ---------------------------------------------------------------------------
// Quadratic-inequality implication
// ---------------------------------------------------------------------------

/// Checks that every x in the grid satisfying x^2 <= a + b sqrt(x^2 + c^2)
/// also satisfies x^2 <= a + b^2/2 + b sqrt(a + b^2/4 + c^2).
inline bool check_quadratic_implication(double a, double b, double c, const Vec& x_grid) {
    require(a >= 0.0 && b >= 0.0 && c >= 0.0, "check_quadratic_implication: a, b, c must be >= 0");
    double conclusion = a + 0.5 * b * b + b * std::sqrt(a + 0.25 * b * b + c * c);
    for (double x : x_grid) {
        double x2 = x * x;
        bool premise = x2 <= a + b * std::sqrt(x2 + c * c);
        if (premise && x2 > conclusion + 1e-9) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Oracle-inequality consistency (diagnostic only)
// ---------------------------------------------------------------------------

struct BoundConsistencyInput {
    double realized_mse = 0.0;
    double approx_error_proxy = 0.0;
    double log_cover_proxy = 0.0;
    int n = 1;
    double delta_term = 0.0;  // (F + sigma) * delta; defaults to 1/n when <= 0
};

struct BoundConsistencyReport {
    Vec c_hats;
    double max_c_hat = 0.0;
    bool diverging = false;  // strictly increasing with >10x growth: shape violation signal
};

/// Implied constants C_hat = realized / (approx^2 + log-cover/n + delta term)
/// across an experiment grid. Purely diagnostic: the theorem's constant is
/// unknown, so there is no hard pass/fail.
inline BoundConsistencyReport bound_consistency_report(const std::vector<BoundConsistencyInput>& grid) {
    require(!grid.empty(), "bound_consistency_report: empty grid");
    BoundConsistencyReport rep;
    for (const auto& g : grid) {
        require(g.n >= 1, "bound_consistency_report: n must be >= 1");
        require(g.approx_error_proxy >= 0.0 && g.log_cover_proxy >= 0.0 && g.realized_mse >= 0.0,
                "bound_consistency_report: proxies must be nonnegative");
        double delta_term = g.delta_term > 0.0 ? g.delta_term : 1.0 / double(g.n);
        double denom =
            g.approx_error_proxy * g.approx_error_proxy + g.log_cover_proxy / double(g.n) + delta_term;
        require(denom > 0.0, "bound_consistency_report: zero denominator");
        rep.c_hats.push_back(g.realized_mse / denom);
        rep.max_c_hat = std::max(rep.max_c_hat, rep.c_hats.back());
    }
    if (rep.c_hats.size() >= 3) {
        bool increasing = true;
        for (std::size_t i = 0; i + 1 < rep.c_hats.size(); ++i)
            if (rep.c_hats[i + 1] <= rep.c_hats[i]) increasing = false;
        rep.diverging = increasing && rep.c_hats.back() > 10.0 * rep.c_hats.front();
    }
    return rep;
}

}  // namespace caulk

#endif  // CAULK_VERIFY_HPP
