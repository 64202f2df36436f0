#ifndef CAULK_NETWORK_HPP
#define CAULK_NETWORK_HPP

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "caulk/common.hpp"
#include "caulk/rng.hpp"

namespace caulk {

/// Architecture and constraint budget of a sparse ReLU network:
/// height = number of affine maps, entrywise bound B, summed max-norm
/// budget S over all layers.
struct ReluNetworkSpec {
    int height = 1;
    int width = 1;
    int in_dim = 1;
    int out_dim = 1;
    double sparsity_budget = 1e9;  // S
    double weight_bound = 1e9;     // B

    void validate() const {
        require(height >= 1 && width >= 1 && in_dim >= 1 && out_dim >= 1,
                "relu spec: dims must be positive");
        require(sparsity_budget > 0.0 && weight_bound > 0.0, "relu spec: S and B must be positive");
    }

    int layer_rows(int l) const { return l == height - 1 ? out_dim : width; }
    int layer_cols(int l) const { return l == 0 ? in_dim : width; }
};

struct ConstraintReport {
    double max_norm = 0.0;   // max_l max(|W|_inf, |b|_inf)
    double path_sum = 0.0;   // sum_l (|W|_inf + |b|_inf)
    bool satisfies_B = true;
    bool satisfies_S = true;
};

/// x -> A_h(relu(A_{h-1}(... relu(A_1(x))))). The input-side ReLU of the
/// class definition is omitted: on [0,1]^d it is the identity, and leaving
/// it out keeps off-domain evaluations alive.
struct ReluNetwork {
    ReluNetworkSpec spec;
    std::vector<Matrix> weights;  // size height
    std::vector<Vec> biases;      // size height

    int param_count() const {
        int n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l)
            n += int(weights[l].a.size() + biases[l].size());
        return n;
    }

    Vec forward(const Vec& x) const {
        require(int(x.size()) == spec.in_dim, "forward: input dim " + std::to_string(x.size()) +
                                                  " != " + std::to_string(spec.in_dim));
        Vec v = x;
        for (int l = 0; l < spec.height; ++l) {
            if (l > 0)
                for (double& h : v) h = std::max(0.0, h);
            Vec next = weights[l].matvec(v);
            for (std::size_t i = 0; i < next.size(); ++i) next[i] += biases[l][i];
            v = std::move(next);
        }
        return v;
    }

    bool operator==(const ReluNetwork& o) const {
        return weights == o.weights && biases == o.biases;
    }
};

inline ReluNetwork zero_network(const ReluNetworkSpec& spec) {
    spec.validate();
    ReluNetwork net;
    net.spec = spec;
    for (int l = 0; l < spec.height; ++l) {
        net.weights.emplace_back(spec.layer_rows(l), spec.layer_cols(l));
        net.biases.emplace_back(spec.layer_rows(l), 0.0);
    }
    return net;
}

inline ConstraintReport check_constraints(const ReluNetwork& net) {
    ConstraintReport rep;
    for (int l = 0; l < net.spec.height; ++l) {
        double wmax = 0.0, bmax = 0.0;
        for (double v : net.weights[l].a) wmax = std::max(wmax, std::fabs(v));
        for (double v : net.biases[l]) bmax = std::max(bmax, std::fabs(v));
        rep.max_norm = std::max(rep.max_norm, std::max(wmax, bmax));
        rep.path_sum += wmax + bmax;
    }
    rep.satisfies_B = rep.max_norm <= net.spec.weight_bound;
    rep.satisfies_S = rep.path_sum <= net.spec.sparsity_budget;
    return rep;
}

/// Entrywise clip to [-B, B], then uniform rescale onto the S budget.
/// Idempotent: a feasible network is returned unchanged.
inline ReluNetwork project_constraints(ReluNetwork net, const ReluNetworkSpec& spec) {
    double B = spec.weight_bound;
    auto rep = check_constraints(net);
    if (rep.max_norm > B) {
        for (auto& W : net.weights)
            for (double& v : W.a) v = std::min(B, std::max(-B, v));
        for (auto& b : net.biases)
            for (double& v : b) v = std::min(B, std::max(-B, v));
        rep = check_constraints(net);
    }
    while (rep.path_sum > spec.sparsity_budget) {
        double g = spec.sparsity_budget / rep.path_sum;
        for (auto& W : net.weights)
            for (double& v : W.a) v *= g;
        for (auto& b : net.biases)
            for (double& v : b) v *= g;
        rep = check_constraints(net);
    }
    return net;
}

enum class InitScheme { uniform_scaled, zero_bias_ridge, centered_output };

/// Random initialization inside the (S, B) constraints, deterministic in
/// seed. centered_output shrinks the weights and biases the last layer to
/// 0.5, so the initial outputs sit inside [0,1] where downstream frozen maps
/// have live gradients.
inline ReluNetwork init_network(const ReluNetworkSpec& spec, InitScheme scheme, std::uint64_t seed) {
    spec.validate();
    ReluNetwork net = zero_network(spec);
    Rng rng(derive_seed(seed, "init-network"));
    for (int l = 0; l < spec.height; ++l) {
        double fan_in = double(spec.layer_cols(l));
        double s = std::min(spec.weight_bound, std::sqrt(2.0 / fan_in));
        if (scheme == InitScheme::centered_output) s *= 0.5;
        for (double& v : net.weights[l].a) v = rng.uniform(-s, s);
        if (scheme != InitScheme::zero_bias_ridge)
            for (double& v : net.biases[l]) v = rng.uniform(-0.1 * s, 0.1 * s);
    }
    if (scheme == InitScheme::centered_output) {
        double half = std::min(0.5, spec.weight_bound);
        for (double& v : net.biases[spec.height - 1]) v = half;
    }
    return project_constraints(std::move(net), spec);
}

/// Finite surrogate class used by the covering-number verifiers.
struct FiniteNetworkClass {
    std::vector<ReluNetwork> members;
    double grid_step = 0.0;
    std::string description;
};

/// Cartesian product of per-parameter grids {-B, -B+step, ..., B}, filtered
/// by the S budget. Refuses up front if the raw product exceeds cap.
inline FiniteNetworkClass enumerate_grid_class(const ReluNetworkSpec& spec, double grid_step,
                                               std::size_t cap = 4096) {
    spec.validate();
    require(grid_step > 0.0, "enumerate_grid_class: grid_step must be positive");
    ReluNetwork proto = zero_network(spec);
    int params = proto.param_count();
    std::vector<double> grid;
    for (double v = -spec.weight_bound; v <= spec.weight_bound + 1e-12; v += grid_step)
        grid.push_back(std::fabs(v) < 1e-15 ? 0.0 : v);
    double total = std::pow(double(grid.size()), double(params));
    require(total <= double(cap), "enumerate_grid_class: " + format_double(total) +
                                      " candidates exceed cap " + std::to_string(cap) +
                                      "; required cap " + format_double(total));

    auto param_ref = [&](ReluNetwork& n, int p) -> double& {
        for (int l = 0; l < spec.height; ++l) {
            int wn = int(n.weights[l].a.size());
            if (p < wn) return n.weights[l].a[p];
            p -= wn;
            int bn = int(n.biases[l].size());
            if (p < bn) return n.biases[l][p];
            p -= bn;
        }
        throw Error("enumerate_grid_class: parameter index out of range");
    };

    FiniteNetworkClass cls;
    cls.grid_step = grid_step;
    cls.description = "grid class, " + std::to_string(params) + " params, step " + format_double(grid_step);
    std::vector<std::size_t> counter(params, 0);
    while (true) {
        ReluNetwork cand = proto;
        for (int p = 0; p < params; ++p) param_ref(cand, p) = grid[counter[p]];
        if (check_constraints(cand).satisfies_S) cls.members.push_back(cand);
        int p = 0;
        for (; p < params; ++p) {
            if (++counter[p] < grid.size()) break;
            counter[p] = 0;
        }
        if (p == params) break;
    }
    return cls;
}

// ---------------------------------------------------------------------------
// Serialization: header `relunet v1`, per-layer W/b blocks, exact decimals.
// ---------------------------------------------------------------------------

inline std::string serialize_network(const ReluNetwork& net) {
    std::ostringstream os;
    os << "relunet v1\n";
    os << "spec " << net.spec.height << " " << net.spec.width << " " << net.spec.in_dim << " "
       << net.spec.out_dim << " " << format_double(net.spec.sparsity_budget) << " "
       << format_double(net.spec.weight_bound) << "\n";
    for (int l = 0; l < net.spec.height; ++l) {
        const Matrix& W = net.weights[l];
        os << "W " << W.rows << " " << W.cols << "\n";
        for (std::size_t i = 0; i < W.rows; ++i) {
            for (std::size_t j = 0; j < W.cols; ++j)
                os << (j ? " " : "") << format_double(W(i, j));
            os << "\n";
        }
        os << "b " << net.biases[l].size() << "\n";
        for (std::size_t i = 0; i < net.biases[l].size(); ++i)
            os << (i ? " " : "") << format_double(net.biases[l][i]);
        os << "\n";
    }
    return os.str();
}

inline ReluNetwork deserialize_network(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> std::string {
        require(bool(std::getline(is, line)),
                "relunet parse: unexpected end of input after line " + std::to_string(lineno));
        ++lineno;
        return line;
    };
    auto fail = [&](const std::string& msg) -> void {
        throw Error("relunet parse: " + msg + " at line " + std::to_string(lineno));
    };

    std::string header = next_line();
    if (header != "relunet v1") {
        if (header.rfind("relunet", 0) == 0)
            fail("unsupported version '" + header + "', expected 'relunet v1'");
        fail("missing 'relunet v1' header");
    }
    ReluNetworkSpec spec;
    {
        std::istringstream l(next_line());
        std::string kw;
        l >> kw >> spec.height >> spec.width >> spec.in_dim >> spec.out_dim >>
            spec.sparsity_budget >> spec.weight_bound;
        if (l.fail() || kw != "spec") fail("malformed spec line");
    }
    spec.validate();
    ReluNetwork net = zero_network(spec);
    for (int li = 0; li < spec.height; ++li) {
        {
            std::istringstream l(next_line());
            std::string kw;
            std::size_t r = 0, c = 0;
            l >> kw >> r >> c;
            if (l.fail() || kw != "W" || r != net.weights[li].rows || c != net.weights[li].cols)
                fail("malformed W header for layer " + std::to_string(li + 1));
        }
        for (std::size_t i = 0; i < net.weights[li].rows; ++i) {
            std::istringstream l(next_line());
            for (std::size_t j = 0; j < net.weights[li].cols; ++j) {
                l >> net.weights[li](i, j);
                if (l.fail()) fail("bad W entry");
            }
        }
        {
            std::istringstream l(next_line());
            std::string kw;
            std::size_t n = 0;
            l >> kw >> n;
            if (l.fail() || kw != "b" || n != net.biases[li].size())
                fail("malformed b header for layer " + std::to_string(li + 1));
        }
        {
            std::istringstream l(next_line());
            for (std::size_t i = 0; i < net.biases[li].size(); ++i) {
                l >> net.biases[li][i];
                if (l.fail()) fail("bad b entry");
            }
        }
    }
    return net;
}

}  // namespace caulk

#endif  // CAULK_NETWORK_HPP
