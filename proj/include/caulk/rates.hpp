#ifndef CAULK_RATES_HPP
#define CAULK_RATES_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "caulk/caulking.hpp"
#include "caulk/common.hpp"
#include "caulk/function_spaces.hpp"
#include "caulk/parallel.hpp"
#include "caulk/rng.hpp"

namespace caulk {

// ---------------------------------------------------------------------------
// Closed-form rate exponents
// ---------------------------------------------------------------------------

/// Regression rate exponent 2*alpha*beta / (2*alpha*beta + 1).
inline double theoretical_exponent(double alpha, double beta) {
    require(alpha > 0.0 && alpha <= 1.0, "theoretical_exponent: alpha must be in (0,1]");
    require(beta > 0.0, "theoretical_exponent: beta must be positive");
    double ab = 2.0 * alpha * beta;
    return ab / (ab + 1.0);
}

/// Exponent with pre-training quality gamma_m:
/// (2ab/(2ab+1)) * (1 - gamma_m / (beta*(alpha*(beta-gamma_m)+1))).
inline double corollary_exponent(double alpha, double beta, double gamma_m) {
    require(gamma_m >= 0.0, "corollary_exponent: gamma_m must be >= 0");
    require(gamma_m < beta, "corollary_exponent: gamma_m must be < beta");
    double base = theoretical_exponent(alpha, beta);
    return base * (1.0 - gamma_m / (beta * (alpha * (beta - gamma_m) + 1.0)));
}

/// Classification rate exponent alpha*beta / (2*alpha*beta + 1); exactly half
/// the regression exponent.
inline double classification_exponent(double alpha, double beta) {
    return 0.5 * theoretical_exponent(alpha, beta);
}

enum class AlphaConvention { min, max };

struct CompositionExponents {
    Vec alpha;      // per-layer alpha_i
    Vec per_layer;  // per-layer gamma_i = 2 a_i b_i / (2 a_i b_i + t_i)
    double worst = 0.0;
};

/// Per-layer exponents gamma_i = 2 alpha_i beta_i / (2 alpha_i beta_i + t_i)
/// with alpha_i the product over downstream layers of min{1, beta_l} (or max,
/// per convention). worst is the smallest gamma_i over [lo, hi] (the binding
/// term of max_i n^{-gamma_i}).
inline CompositionExponents composition_exponents(const std::vector<std::pair<double, int>>& layers,
                                                  int lo, int hi,
                                                  AlphaConvention conv = AlphaConvention::min) {
    const int H = int(layers.size());
    require(H >= 1, "composition_exponents: empty layer list");
    require(1 <= lo && lo <= hi && hi <= H, "composition_exponents: empty or invalid range");
    CompositionExponents out;
    out.alpha.resize(H);
    out.per_layer.resize(H);
    for (int i = H; i >= 1; --i) {
        double a = 1.0;
        for (int l = i + 1; l <= H; ++l) {
            double b = layers[l - 1].first;
            a *= conv == AlphaConvention::min ? std::min(1.0, b) : std::max(1.0, b);
        }
        double beta = layers[i - 1].first;
        double t = double(layers[i - 1].second);
        require(beta > 0.0 && t >= 1.0, "composition_exponents: bad layer parameters");
        double ab = 2.0 * a * beta;
        out.alpha[i - 1] = a;
        out.per_layer[i - 1] = ab / (ab + t);
    }
    out.worst = out.per_layer[lo - 1];
    for (int i = lo; i <= hi; ++i) out.worst = std::min(out.worst, out.per_layer[i - 1]);
    return out;
}

// ---------------------------------------------------------------------------
// Rate tables and power-law fitting
// ---------------------------------------------------------------------------

struct RateRow {
    int n = 0;
    int trials = 0;
    double mean_error = 0.0;
    double std_error = 0.0;
};

struct RateTable {
    std::vector<RateRow> rows;
    std::string config_hash;
    std::string model_kind;

    void validate() const {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            require(rows[i].trials >= 1, "rate table: trials must be >= 1");
            require(rows[i].mean_error >= 0.0 && rows[i].std_error >= 0.0,
                    "rate table: errors must be nonnegative");
            if (i > 0) require(rows[i].n > rows[i - 1].n, "rate table: n must be strictly increasing");
        }
    }
};

struct ExponentFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int n_lo = 0;
    int n_hi = 0;
};

/// Ordinary least squares of ln(mean_error) on ln(n); the slope estimates the
/// rate exponent.
inline ExponentFit fit_power_law(const RateTable& table) {
    require(table.rows.size() >= 3, "fit_power_law: need at least 3 rows");
    Vec lx, ly;
    for (const auto& r : table.rows) {
        require(r.mean_error > 0.0, "fit_power_law: nonpositive mean_error at n=" + std::to_string(r.n));
        lx.push_back(std::log(double(r.n)));
        ly.push_back(std::log(r.mean_error));
    }
    double mx = mean_of(lx), my = mean_of(ly);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    ExponentFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        double pred = fit.intercept + fit.exponent * lx[i];
        ss_res += (ly[i] - pred) * (ly[i] - pred);
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res <= 1e-30 ? 1.0 : 0.0);
    fit.n_lo = table.rows.front().n;
    fit.n_hi = table.rows.back().n;
    return fit;
}

/// Spearman rank correlation; ties get average ranks.
inline double spearman_rho(const Vec& x, const Vec& y) {
    require(x.size() == y.size() && x.size() >= 2, "spearman_rho: need two equal-length series");
    auto ranks = [](const Vec& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        Vec r(v.size());
        std::size_t i = 0;
        while (i < idx.size()) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            double avg = 0.5 * double(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    Vec rx = ranks(x), ry = ranks(y);
    double mx = mean_of(rx), my = mean_of(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// Sweep drivers
// ---------------------------------------------------------------------------

/// Builds a fitted model for one (sample, seed) cell and returns it as an
/// evaluable map.
using ModelBuilder = std::function<ScalarFn(const RegressionSample&, std::uint64_t)>;

struct RateSweepSetup {
    TargetFunction target;
    CovariateDistribution q;  // target covariate law (sampling and evaluation)
    ModelBuilder build_model;
    std::vector<int> n_grid = {64, 128, 256, 512, 1024, 2048};
    int trials = 10;
    double noise_sigma = 0.1;
    int n_mc = 4096;
    std::string model_kind = "caulk";
    std::string config_hash;
};

/// For each n: `trials` independent (sample, fit, Monte Carlo L2) cells with
/// split seeds, aggregated to mean and standard error. Cells run in parallel;
/// output is independent of scheduling.
inline RateTable run_rate_sweep(const RateSweepSetup& setup, std::uint64_t seed) {
    require(setup.n_grid.size() >= 1, "rate sweep: empty n grid");
    for (std::size_t i = 0; i + 1 < setup.n_grid.size(); ++i)
        require(setup.n_grid[i] < setup.n_grid[i + 1], "rate sweep: n grid must be strictly increasing");
    require(setup.trials >= 1, "rate sweep: trials must be >= 1");

    const std::size_t cells = setup.n_grid.size() * std::size_t(setup.trials);
    Vec errors(cells, 0.0);
    parallel_for(cells, [&](std::size_t c) {
        std::size_t ni = c / std::size_t(setup.trials);
        std::size_t trial = c % std::size_t(setup.trials);
        int n = setup.n_grid[ni];
        std::uint64_t cell_seed = derive_seed(seed, "rate-cell", std::uint64_t(n), trial);
        RegressionSample sample = make_regression_sample(
            setup.target, setup.q, n, setup.noise_sigma, derive_seed(cell_seed, "sample"));
        ScalarFn model = setup.build_model(sample, derive_seed(cell_seed, "fit"));
        errors[c] = l2_error(model, setup.target, setup.q, setup.n_mc, derive_seed(cell_seed, "mc"))
                        .estimate;
    });

    RateTable table;
    table.config_hash = setup.config_hash;
    table.model_kind = setup.model_kind;
    for (std::size_t ni = 0; ni < setup.n_grid.size(); ++ni) {
        Vec cell(errors.begin() + ni * setup.trials, errors.begin() + (ni + 1) * setup.trials);
        table.rows.push_back({setup.n_grid[ni], setup.trials, mean_of(cell), sem_of(cell)});
    }
    table.validate();
    return table;
}

struct DepthSweepVariant {
    std::string name;
    PretrainedModel pretrained;
};

struct DepthSweepSetup {
    TargetFunction target;
    CovariateDistribution q;
    std::vector<DepthSweepVariant> variants;
    std::vector<int> depths = {0, 1, 2};
    int adapter_width = 4;
    int n = 512;
    int trials = 5;
    double noise_sigma = 0.05;
    int n_mc = 4096;
    FitConfig fit;
};

struct DepthRow {
    std::string variant;
    int depth = 0;
    double mean_error = 0.0;
    double std_error = 0.0;
    bool is_min = false;  // smallest depth within 5% of the variant's minimum
};

/// Caulk fits per (variant, depth) cell; is_min marks, per variant, the
/// smallest depth whose mean error is within 5% of the variant's minimum.
inline std::vector<DepthRow> run_depth_sweep(const DepthSweepSetup& setup, std::uint64_t seed) {
    require(!setup.depths.empty(), "depth sweep: empty depth grid");
    require(!setup.variants.empty(), "depth sweep: no pretrained variants");

    struct Cell {
        std::size_t variant, depth_idx;
        int trial;
    };
    std::vector<Cell> cells;
    for (std::size_t v = 0; v < setup.variants.size(); ++v)
        for (std::size_t d = 0; d < setup.depths.size(); ++d)
            for (int t = 0; t < setup.trials; ++t) cells.push_back({v, d, t});

    Vec errors(cells.size(), 0.0);
    parallel_for(cells.size(), [&](std::size_t c) {
        const Cell& cell = cells[c];
        const auto& variant = setup.variants[cell.variant];
        int depth = setup.depths[cell.depth_idx];
        // trials share seeds across variants and depths so comparisons pair up
        std::uint64_t cell_seed = derive_seed(seed, "depth-cell", std::uint64_t(cell.trial));
        RegressionSample sample = make_regression_sample(
            setup.target, setup.q, setup.n, setup.noise_sigma, derive_seed(cell_seed, "sample"));
        AdapterSpec aspec;
        aspec.depth = depth;
        aspec.width = setup.adapter_width;
        aspec.in_dim = variant.pretrained.adapter_in_dim();
        aspec.out_dim = variant.pretrained.adapter_out_dim();
        FitConfig fc = setup.fit;
        fc.seed = derive_seed(cell_seed, "fit", cell.variant, std::uint64_t(depth));
        auto [model, trace] = caulk_fit(variant.pretrained, aspec, sample, fc);
        (void)trace;
        errors[c] =
            l2_error(model.as_fn(), setup.target, setup.q, setup.n_mc, derive_seed(cell_seed, "mc"))
                .estimate;
    });

    std::vector<DepthRow> rows;
    for (std::size_t v = 0; v < setup.variants.size(); ++v) {
        std::vector<DepthRow> variant_rows;
        for (std::size_t d = 0; d < setup.depths.size(); ++d) {
            Vec cell_errors;
            for (std::size_t c = 0; c < cells.size(); ++c)
                if (cells[c].variant == v && cells[c].depth_idx == d) cell_errors.push_back(errors[c]);
            variant_rows.push_back({setup.variants[v].name, setup.depths[d], mean_of(cell_errors),
                                    sem_of(cell_errors), false});
        }
        double best = variant_rows.front().mean_error;
        for (const auto& r : variant_rows) best = std::min(best, r.mean_error);
        for (auto& r : variant_rows)
            if (r.mean_error <= 1.05 * best) {
                r.is_min = true;
                break;
            }
        rows.insert(rows.end(), variant_rows.begin(), variant_rows.end());
    }
    return rows;
}

/// Smallest depth within 5% of the variant's minimum, per the sweep rows.
inline int minimizing_depth(const std::vector<DepthRow>& rows, const std::string& variant) {
    for (const auto& r : rows)
        if (r.variant == variant && r.is_min) return r.depth;
    throw Error("minimizing_depth: variant '" + variant + "' not in table");
}

struct MSweepSetup {
    TargetFunction target;
    CovariateDistribution source;  // P
    CovariateDistribution q;       // Q
    std::vector<int> m_grid;       // -1 = oracle sentinel
    int i_e = 2, i_h = 2;
    ReluNetworkSpec pretrain_spec;  // height must equal target depth
    FitConfig pretrain_fit;
    AdapterSpec adapter;            // dims filled per model
    FitConfig adapter_fit;
    std::vector<int> n_grid = {64, 128, 256, 512, 1024};
    int trials = 5;
    double noise_sigma = 0.1;
    int n_mc = 4096;
};

struct MSweepRow {
    int m = 0;  // -1 = oracle
    double exponent = 0.0;
    double r_squared = 0.0;
};

/// For each m: pre-train (empirically, or exactly for the oracle sentinel),
/// then run a rate sweep of caulk fits and fit the power law.
inline std::vector<MSweepRow> run_m_sweep(const MSweepSetup& setup, std::uint64_t seed) {
    require(!setup.m_grid.empty(), "m sweep: empty m grid");
    for (std::size_t i = 0; i + 1 < setup.m_grid.size(); ++i) {
        bool oracle_last = setup.m_grid[i + 1] == -1;
        require(oracle_last || setup.m_grid[i] < setup.m_grid[i + 1],
                "m sweep: m grid must be increasing (oracle sentinel -1 last)");
    }
    std::vector<MSweepRow> out;
    for (int m : setup.m_grid) {
        PretrainedModel pre;
        if (m == -1) {
            pre = pretrain_oracle(setup.target, setup.i_e, setup.i_h);
        } else {
            FitConfig pf = setup.pretrain_fit;
            pf.seed = derive_seed(seed, "pretrain", std::uint64_t(m));
            pre = pretrain_empirical(setup.target, setup.source, m, setup.pretrain_spec, setup.i_e,
                                     setup.i_h, pf);
        }
        AdapterSpec aspec = setup.adapter;
        aspec.in_dim = pre.adapter_in_dim();
        aspec.out_dim = pre.adapter_out_dim();
        RateSweepSetup rs;
        rs.target = setup.target;
        rs.q = setup.q;
        rs.n_grid = setup.n_grid;
        rs.trials = setup.trials;
        rs.noise_sigma = setup.noise_sigma;
        rs.n_mc = setup.n_mc;
        rs.model_kind = m == -1 ? "caulk-oracle" : "caulk-m" + std::to_string(m);
        FitConfig af = setup.adapter_fit;
        rs.build_model = [pre, aspec, af](const RegressionSample& sample, std::uint64_t fit_seed) {
            FitConfig fc = af;
            fc.seed = fit_seed;
            auto [model, trace] = caulk_fit(pre, aspec, sample, fc);
            (void)trace;
            return model.as_fn();
        };
        RateTable table = run_rate_sweep(rs, derive_seed(seed, "m-sweep", std::uint64_t(m + 2)));
        ExponentFit fit = fit_power_law(table);
        out.push_back({m, fit.exponent, fit.r_squared});
    }
    return out;
}

}  // namespace caulk

#endif  // CAULK_RATES_HPP
