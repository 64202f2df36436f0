#ifndef CAULK_FITTING_HPP
#define CAULK_FITTING_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "caulk/common.hpp"
#include "caulk/network.hpp"
#include "caulk/rng.hpp"

namespace caulk {

struct FitConfig {
    double learning_rate = 0.05;
    int max_epochs = 2000;
    int batch_size = 0;  // 0 = full batch
    int restarts = 1;
    int patience = 200;
    int project_every = 1;
    std::uint64_t seed = 0;

    void validate() const {
        require(learning_rate > 0.0, "fit config: learning_rate must be positive");
        require(max_epochs >= 1 && restarts >= 1 && patience >= 1 && project_every >= 1,
                "fit config: epochs/restarts/patience/project_every must be positive");
        require(patience <= max_epochs, "fit config: patience must be <= max_epochs");
        require(batch_size >= 0, "fit config: batch_size must be >= 0");
    }
};

struct FitTrace {
    Vec losses;          // training loss after each epoch (index 0 = at init)
    double final_loss = 0.0;
    int restart_index = 0;
    int epochs_run = 0;
    int lr_halvings = 0;
};

/// Optional frozen map applied after the trainable network; value plus
/// gradient with respect to the network output. Used by caulking, where the
/// trainable adapter feeds a frozen head.
struct HeadLink {
    ScalarFn value;
    VectorFn grad;
};

struct ParamGrads {
    std::vector<Matrix> dW;
    std::vector<Vec> db;
    double loss = 0.0;
};

namespace detail {

inline ParamGrads zero_grads(const ReluNetwork& net) {
    ParamGrads g;
    for (int l = 0; l < net.spec.height; ++l) {
        g.dW.emplace_back(net.weights[l].rows, net.weights[l].cols);
        g.db.emplace_back(net.biases[l].size(), 0.0);
    }
    return g;
}

inline double model_output(const ReluNetwork& net, const Vec& x, const HeadLink* head) {
    Vec out = net.forward(x);
    if (head) return head->value(out);
    require(out.size() == 1, "loss: network output must be scalar without a head");
    return out[0];
}

}  // namespace detail

/// Mean squared error and its exact gradient in every weight and bias,
/// reverse-mode through the piecewise-linear network (ReLU subgradient 0 at
/// kinks). With a head link, the residual is taken after the frozen head and
/// chained through its gradient.
inline ParamGrads loss_and_gradient(const ReluNetwork& net, const Matrix& X, const Vec& y,
                                    const HeadLink* head = nullptr) {
    require(X.rows == y.size() && X.rows >= 1, "loss_and_gradient: inputs/targets size mismatch");
    require(int(X.cols) == net.spec.in_dim, "loss_and_gradient: input dim mismatch");
    const int L = net.spec.height;
    const double n = double(X.rows);
    ParamGrads g = detail::zero_grads(net);

    std::vector<Vec> pre(L);      // affine outputs z_l
    std::vector<Vec> inputs(L);   // inputs to each affine map
    for (std::size_t i = 0; i < X.rows; ++i) {
        Vec v = X.row(i);
        for (int l = 0; l < L; ++l) {
            if (l > 0) {
                v = pre[l - 1];
                for (double& h : v) h = std::max(0.0, h);
            }
            inputs[l] = v;
            Vec z = net.weights[l].matvec(inputs[l]);
            for (std::size_t k = 0; k < z.size(); ++k) z[k] += net.biases[l][k];
            pre[l] = std::move(z);
        }

        Vec seed;
        double resid;
        if (head) {
            resid = head->value(pre[L - 1]) - y[i];
            Vec hg = head->grad(pre[L - 1]);
            seed.resize(hg.size());
            for (std::size_t k = 0; k < hg.size(); ++k) seed[k] = 2.0 * resid / n * hg[k];
        } else {
            require(pre[L - 1].size() == 1, "loss_and_gradient: output must be scalar without a head");
            resid = pre[L - 1][0] - y[i];
            seed = {2.0 * resid / n};
        }
        g.loss += resid * resid / n;

        Vec grad = std::move(seed);
        for (int l = L - 1; l >= 0; --l) {
            for (std::size_t r = 0; r < g.dW[l].rows; ++r) {
                double gr = grad[r];
                if (gr == 0.0) continue;
                for (std::size_t c = 0; c < g.dW[l].cols; ++c) g.dW[l](r, c) += gr * inputs[l][c];
                g.db[l][r] += gr;
            }
            if (l > 0) {
                Vec back = net.weights[l].tmatvec(grad);
                for (std::size_t k = 0; k < back.size(); ++k)
                    if (pre[l - 1][k] <= 0.0) back[k] = 0.0;
                grad = std::move(back);
            }
        }
    }
    return g;
}

/// Independent oracle: central finite differences of the same loss, one pair
/// of loss evaluations per parameter.
inline ParamGrads finite_diff_gradient(ReluNetwork net, const Matrix& X, const Vec& y, double step,
                                       const HeadLink* head = nullptr) {
    require(step > 0.0, "finite_diff_gradient: step must be positive");
    auto loss_at = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) {
            double r = detail::model_output(net, X.row(i), head) - y[i];
            s += r * r;
        }
        return s / double(X.rows);
    };
    ParamGrads g = detail::zero_grads(net);
    g.loss = loss_at();
    for (int l = 0; l < net.spec.height; ++l) {
        for (std::size_t k = 0; k < net.weights[l].a.size(); ++k) {
            double saved = net.weights[l].a[k];
            net.weights[l].a[k] = saved + step;
            double up = loss_at();
            net.weights[l].a[k] = saved - step;
            double dn = loss_at();
            net.weights[l].a[k] = saved;
            g.dW[l].a[k] = (up - dn) / (2.0 * step);
        }
        for (std::size_t k = 0; k < net.biases[l].size(); ++k) {
            double saved = net.biases[l][k];
            net.biases[l][k] = saved + step;
            double up = loss_at();
            net.biases[l][k] = saved - step;
            double dn = loss_at();
            net.biases[l][k] = saved;
            g.db[l][k] = (up - dn) / (2.0 * step);
        }
    }
    return g;
}

/// Full-batch (optionally mini-batch) gradient descent with periodic
/// projection onto the (S, B) constraints. Early-stops once the training
/// loss has not improved by more than 1e-10 for `patience` epochs.
/// A non-finite loss halves the learning rate and restarts the run; after
/// five halvings the fit is rejected.
inline std::pair<ReluNetwork, FitTrace> fit_least_squares(
    const ReluNetwork& net_init, const Matrix& X, const Vec& y, const FitConfig& config,
    const ReluNetworkSpec* constraints = nullptr, const HeadLink* head = nullptr) {
    config.validate();
    require(X.rows == y.size() && X.rows >= 1, "fit: inputs/targets size mismatch");
    constexpr double kImprove = 1e-10;

    auto full_loss = [&](const ReluNetwork& net) {
        double s = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) {
            double r = detail::model_output(net, X.row(i), head) - y[i];
            s += r * r;
        }
        return s / double(X.rows);
    };

    for (int halving = 0; halving <= 5; ++halving) {
        double lr = config.learning_rate / double(1 << halving);
        ReluNetwork net = net_init;
        if (constraints) net = project_constraints(std::move(net), *constraints);
        FitTrace trace;
        trace.lr_halvings = halving;
        bool diverged = false;
        double best = std::numeric_limits<double>::infinity();
        int stall = 0;

        Rng batch_rng(derive_seed(config.seed, "batches"));
        const int n = int(X.rows);
        const int bs = config.batch_size > 0 ? std::min(config.batch_size, n) : n;

        double cur = full_loss(net);
        trace.losses.push_back(cur);
        for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
            if (!std::isfinite(cur)) {
                diverged = true;
                break;
            }
            if (best - cur > kImprove) {
                best = cur;
                stall = 0;
            } else if (++stall >= config.patience) {
                break;
            }

            if (bs == n) {
                ParamGrads g = loss_and_gradient(net, X, y, head);
                for (int l = 0; l < net.spec.height; ++l) {
                    for (std::size_t k = 0; k < net.weights[l].a.size(); ++k)
                        net.weights[l].a[k] -= lr * g.dW[l].a[k];
                    for (std::size_t k = 0; k < net.biases[l].size(); ++k)
                        net.biases[l][k] -= lr * g.db[l][k];
                }
            } else {
                std::vector<int> order(n);
                for (int i = 0; i < n; ++i) order[i] = i;
                for (int i = n - 1; i > 0; --i)
                    std::swap(order[i], order[std::size_t(batch_rng.below(std::uint64_t(i) + 1))]);
                for (int start = 0; start < n; start += bs) {
                    int stop = std::min(start + bs, n);
                    Matrix Xb(std::size_t(stop - start), X.cols);
                    Vec yb(std::size_t(stop - start));
                    for (int i = start; i < stop; ++i) {
                        for (std::size_t j = 0; j < X.cols; ++j) Xb(i - start, j) = X(order[i], j);
                        yb[i - start] = y[order[i]];
                    }
                    ParamGrads g = loss_and_gradient(net, Xb, yb, head);
                    for (int l = 0; l < net.spec.height; ++l) {
                        for (std::size_t k = 0; k < net.weights[l].a.size(); ++k)
                            net.weights[l].a[k] -= lr * g.dW[l].a[k];
                        for (std::size_t k = 0; k < net.biases[l].size(); ++k)
                            net.biases[l][k] -= lr * g.db[l][k];
                    }
                }
            }
            if (constraints && epoch % config.project_every == 0)
                net = project_constraints(std::move(net), *constraints);
            trace.epochs_run = epoch;
            cur = full_loss(net);
            trace.losses.push_back(cur);
        }
        if (!std::isfinite(trace.losses.back())) diverged = true;
        if (diverged) continue;
        if (constraints) net = project_constraints(std::move(net), *constraints);
        trace.final_loss = full_loss(net);
        return {net, trace};
    }
    throw Error("fit_least_squares: loss stayed non-finite after 5 learning-rate halvings");
}

/// Best of `restarts` independent initializations (split seeds); ties break
/// toward the lowest restart index. The init scheme rotates across restarts,
/// starting at `scheme`, so restarts explore different basins.
inline std::pair<ReluNetwork, FitTrace> multi_restart_fit(
    const ReluNetworkSpec& spec, const Matrix& X, const Vec& y, const FitConfig& config,
    const ReluNetworkSpec* constraints = nullptr, const HeadLink* head = nullptr,
    InitScheme scheme = InitScheme::uniform_scaled) {
    config.validate();
    static constexpr InitScheme kRotation[3] = {InitScheme::uniform_scaled,
                                                InitScheme::zero_bias_ridge,
                                                InitScheme::centered_output};
    int base = scheme == InitScheme::uniform_scaled ? 0
               : scheme == InitScheme::zero_bias_ridge ? 1
                                                       : 2;
    std::optional<std::pair<ReluNetwork, FitTrace>> best;
    for (int r = 0; r < config.restarts; ++r) {
        std::uint64_t rs = derive_seed(config.seed, "restart", std::uint64_t(r));
        ReluNetwork init = init_network(spec, kRotation[(base + r) % 3], rs);
        FitConfig rc = config;
        rc.seed = rs;
        auto [net, trace] = fit_least_squares(init, X, y, rc, constraints, head);
        trace.restart_index = r;
        if (!best || trace.final_loss < best->second.final_loss) best = {{std::move(net), trace}};
    }
    return *best;
}

}  // namespace caulk

#endif  // CAULK_FITTING_HPP
