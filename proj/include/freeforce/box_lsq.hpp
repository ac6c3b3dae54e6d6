// Bounded-variable least squares:
//
//   minimize ||A x - b||^2  subject to  lower <= x <= upper
//
// Stage 1 is the Stark–Parker active-set method. Free-set subproblems are
// solved with a complete orthogonal decomposition, so rank-deficient free
// sets receive the minimum-norm completion. When the optimum is not unique
// (more unknowns than independent rows), stage 2 walks inside the optimal
// face toward the minimum-norm optimum with a primal active-set method that
// keeps A x fixed.
//
// Ties between candidate constraints resolve to the lowest index.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace freeforce::lsq {

struct BoxLsqResult {
    Eigen::VectorXd x;
    double residual_norm = 0.0;  // ||A x - b||
    int iterations = 0;
    bool converged = true;
};

namespace detail {

enum class Bound : unsigned char { Free, Lower, Upper };

inline std::vector<Eigen::Index> indices_of(const std::vector<Bound>& state, Bound which) {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state[i] == which) out.push_back(static_cast<Eigen::Index>(i));
    }
    return out;
}

inline Eigen::MatrixXd columns(const Eigen::MatrixXd& A, const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXd out(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = A.col(idx[j]);
    return out;
}

// Minimum-norm least-squares solution of M z = rhs.
inline Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs) {
    if (M.cols() == 0) return Eigen::VectorXd(0);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    cod.setThreshold(1e-13);
    return cod.solve(rhs);
}

// Stage 2: minimize ||x||^2 over { lower <= x <= upper, A x = A x0 } from x0.
inline int minimum_norm_refine(const Eigen::MatrixXd& A, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper, std::vector<Bound>& state,
                               Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    const double xscale = std::max({1.0, upper.cwiseAbs().maxCoeff(), lower.cwiseAbs().maxCoeff()});
    const double step_tol = 1e-14 * xscale;
    const int max_iter = 10 * static_cast<int>(n) + 20;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        const auto free_idx = indices_of(state, Bound::Free);
        Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd lambda;
        if (!free_idx.empty()) {
            const Eigen::MatrixXd AF = columns(A, free_idx);
            Eigen::VectorXd xF(static_cast<Eigen::Index>(free_idx.size()));
            for (std::size_t j = 0; j < free_idx.size(); ++j) xF(static_cast<Eigen::Index>(j)) = x(free_idx[j]);
            // Component of xF in the row space of AF cannot be removed without
            // changing A x; the rest can.
            lambda = min_norm_solve(AF.transpose(), xF);
            const Eigen::VectorXd sF = -(xF - AF.transpose() * lambda);
            for (std::size_t j = 0; j < free_idx.size(); ++j) step(free_idx[j]) = sF(static_cast<Eigen::Index>(j));
        } else {
            lambda = Eigen::VectorXd::Zero(A.rows());
        }

        if (step.norm() <= step_tol) {
            // Stationary on the current face; check the bound multipliers.
            const Eigen::VectorXd g = x - A.transpose() * lambda;
            Eigen::Index release = -1;
            double worst = -1e-12 * xscale;
            for (Eigen::Index i = 0; i < n; ++i) {
                double mu = 0.0;
                if (state[static_cast<std::size_t>(i)] == Bound::Lower) mu = g(i);
                else if (state[static_cast<std::size_t>(i)] == Bound::Upper) mu = -g(i);
                else continue;
                if (mu < worst) {
                    worst = mu;
                    release = i;
                }
            }
            if (release < 0) return iter;
            state[static_cast<std::size_t>(release)] = Bound::Free;
            continue;
        }

        double alpha = 1.0;
        Eigen::Index blocking = -1;
        Bound blocking_bound = Bound::Free;
        for (Eigen::Index i : free_idx) {
            double limit = std::numeric_limits<double>::infinity();
            Bound b = Bound::Free;
            if (step(i) < 0.0) {
                limit = (lower(i) - x(i)) / step(i);
                b = Bound::Lower;
            } else if (step(i) > 0.0) {
                limit = (upper(i) - x(i)) / step(i);
                b = Bound::Upper;
            }
            if (limit < alpha) {
                alpha = std::max(limit, 0.0);
                blocking = i;
                blocking_bound = b;
            }
        }
        x += alpha * step;
        if (blocking >= 0) {
            state[static_cast<std::size_t>(blocking)] = blocking_bound;
            x(blocking) = blocking_bound == Bound::Lower ? lower(blocking) : upper(blocking);
        }
        for (Eigen::Index i : free_idx) x(i) = std::clamp(x(i), lower(i), upper(i));
    }
    return iter;
}

} // namespace detail

inline BoxLsqResult solve_box_lsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                  const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                  bool minimum_norm = true) {
    using detail::Bound;
    const Eigen::Index n = A.cols();
    BoxLsqResult result;
    result.x = lower;
    std::vector<Bound> state(static_cast<std::size_t>(n), Bound::Lower);
    if (n == 0) {
        result.residual_norm = b.norm();
        return result;
    }

    const double a_norm = std::max(A.norm(), std::numeric_limits<double>::min());
    const double grad_tol = 1e-12 * a_norm * (b.norm() + a_norm * std::max(1.0, upper.cwiseAbs().maxCoeff()));
    const int max_outer = 30 * static_cast<int>(n) + 50;

    Eigen::VectorXd& x = result.x;
    std::vector<bool> rejected(static_cast<std::size_t>(n), false);
    int outer = 0;
    for (; outer < max_outer; ++outer) {
        const Eigen::VectorXd w = A.transpose() * (b - A * x);
        Eigen::Index enter = -1;
        double best = grad_tol;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto s = state[static_cast<std::size_t>(i)];
            if (s == Bound::Free || rejected[static_cast<std::size_t>(i)] || lower(i) == upper(i)) continue;
            const double gain = s == Bound::Lower ? w(i) : -w(i);
            if (gain > best) {
                best = gain;
                enter = i;
            }
        }
        if (enter < 0) break;
        const Bound entered_from = state[static_cast<std::size_t>(enter)];
        state[static_cast<std::size_t>(enter)] = Bound::Free;

        bool progressed = false;
        for (int inner = 0; inner <= n + 1; ++inner) {
            const auto free_idx = detail::indices_of(state, Bound::Free);
            const Eigen::MatrixXd AF = detail::columns(A, free_idx);
            Eigen::VectorXd rhs = b;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (state[static_cast<std::size_t>(i)] != Bound::Free) rhs -= A.col(i) * x(i);
            }
            const Eigen::VectorXd z = detail::min_norm_solve(AF, rhs);

            // The entering variable must move off its bound in the gradient
            // direction; otherwise the candidate is degenerate and skipped.
            if (inner == 0) {
                for (std::size_t j = 0; j < free_idx.size(); ++j) {
                    if (free_idx[j] != enter) continue;
                    const double zj = z(static_cast<Eigen::Index>(j));
                    const bool wrong = entered_from == Bound::Lower ? zj <= lower(enter)
                                                                    : zj >= upper(enter);
                    if (wrong) {
                        state[static_cast<std::size_t>(enter)] = entered_from;
                        rejected[static_cast<std::size_t>(enter)] = true;
                    }
                }
                if (rejected[static_cast<std::size_t>(enter)]) break;
            }

            bool inside = true;
            for (std::size_t j = 0; j < free_idx.size(); ++j) {
                const double zj = z(static_cast<Eigen::Index>(j));
                const Eigen::Index i = free_idx[j];
                if (zj < lower(i) || zj > upper(i)) inside = false;
            }
            if (inside) {
                for (std::size_t j = 0; j < free_idx.size(); ++j) x(free_idx[j]) = z(static_cast<Eigen::Index>(j));
                progressed = true;
                break;
            }

            // Step toward z until the first free variable hits a bound.
            double alpha = 1.0;
            for (std::size_t j = 0; j < free_idx.size(); ++j) {
                const Eigen::Index i = free_idx[j];
                const double zj = z(static_cast<Eigen::Index>(j));
                const double d = zj - x(i);
                if (zj < lower(i) && d < 0.0) alpha = std::min(alpha, (lower(i) - x(i)) / d);
                if (zj > upper(i) && d > 0.0) alpha = std::min(alpha, (upper(i) - x(i)) / d);
            }
            alpha = std::max(alpha, 0.0);
            for (std::size_t j = 0; j < free_idx.size(); ++j) {
                const Eigen::Index i = free_idx[j];
                x(i) += alpha * (z(static_cast<Eigen::Index>(j)) - x(i));
            }
            // Bind every free variable that reached (or crossed) a bound.
            const double bind_tol = 1e-14 * std::max(1.0, upper.cwiseAbs().maxCoeff());
            for (Eigen::Index i : free_idx) {
                if (x(i) <= lower(i) + bind_tol) {
                    x(i) = lower(i);
                    state[static_cast<std::size_t>(i)] = Bound::Lower;
                } else if (x(i) >= upper(i) - bind_tol) {
                    x(i) = upper(i);
                    state[static_cast<std::size_t>(i)] = Bound::Upper;
                }
            }
            progressed = true;
        }
        if (progressed) std::fill(rejected.begin(), rejected.end(), false);
    }
    result.iterations = outer;
    result.converged = outer < max_outer;

    if (minimum_norm) {
        result.iterations += detail::minimum_norm_refine(A, lower, upper, state, x);
    }
    result.residual_norm = (A * x - b).norm();
    return result;
}

} // namespace freeforce::lsq
