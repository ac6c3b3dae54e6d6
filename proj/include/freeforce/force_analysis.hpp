// Force zonotopes of parallel FREE assemblies and the queries built on them.
//
// The zonotope at a platform state is the image of the pressure box
// [0, p_max]^n under J_x^T, restricted to the selected wrench components.
// Its generators are the projected Jacobian rows scaled by p_max.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "freeforce/assembly.hpp"
#include "freeforce/box_lsq.hpp"
#include "freeforce/errors.hpp"
#include "freeforce/free_core.hpp"
#include "freeforce/planar_hull.hpp"

namespace freeforce {

/// Corner enumeration visits 2^n pressure corners.
inline constexpr std::size_t max_corner_frees = 20;
/// Hull, containment and authority tolerance, relative to the largest generator norm.
inline constexpr double hull_relative_tolerance = 1e-9;
/// Attainable contraction force at or above -1e-6 N counts as lost.
inline constexpr double collapse_force_tolerance = 1e-6;

struct Zonotope {
    DofSelection dofs;                      // may be empty for raw generator sets
    Eigen::MatrixXd generators;             // k x n; column i belongs to FREE i
    std::vector<Eigen::VectorXd> vertices;  // k = 1: [min, max]; k = 2: CCW hull; k >= 3: distinct corner images
    Eigen::VectorXd center;                 // half the generator sum

    Eigen::Index dimension() const noexcept { return generators.rows(); }
    Eigen::Index generator_count() const noexcept { return generators.cols(); }

    double scale() const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < generators.cols(); ++i) s = std::max(s, generators.col(i).norm());
        return s;
    }

    double tolerance() const {
        return hull_relative_tolerance * std::max(scale(), std::numeric_limits<double>::min());
    }
};

namespace detail {

// Calls fn(corner_index, image) for every 0/1 combination of generator
// columns, walking a Gray code so each image costs one vector update.
template <typename Fn>
void for_each_corner(const Eigen::MatrixXd& generators, Fn&& fn) {
    const auto n = static_cast<std::size_t>(generators.cols());
    Eigen::VectorXd image = Eigen::VectorXd::Zero(generators.rows());
    std::uint64_t code = 0;
    fn(code, image);
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < count; ++step) {
        const auto bit = static_cast<Eigen::Index>(std::countr_zero(step));
        const std::uint64_t mask = std::uint64_t{1} << bit;
        code ^= mask;
        if (code & mask) image += generators.col(bit);
        else image -= generators.col(bit);
        fn(code, image);
    }
}

inline bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}

} // namespace detail

/// Builds the zonotope spanned by the columns of `generators` (k x n).
inline Zonotope make_zonotope(Eigen::MatrixXd generators, DofSelection dofs = {}) {
    if (generators.rows() == 0) throw Error(ErrorCode::EmptySelection, "zonotope of dimension 0");
    if (static_cast<std::size_t>(generators.cols()) > max_corner_frees) {
        throw Error(ErrorCode::TooManyFrees,
                    std::to_string(generators.cols()) + " generators exceed the corner limit of " +
                        std::to_string(max_corner_frees));
    }
    if (!dofs.empty() && static_cast<Eigen::Index>(dofs.size()) != generators.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "dof selection does not match generator rows");
    }
    Zonotope z;
    z.dofs = std::move(dofs);
    z.generators = std::move(generators);
    z.center = 0.5 * z.generators.rowwise().sum();
    const double tol = z.tolerance();
    const Eigen::Index k = z.dimension();

    if (k == 1) {
        double lo = 0.0;
        double hi = 0.0;
        detail::for_each_corner(z.generators, [&](std::uint64_t, const Eigen::VectorXd& v) {
            lo = std::min(lo, v(0));
            hi = std::max(hi, v(0));
        });
        z.vertices.push_back(Eigen::VectorXd::Constant(1, lo));
        if (hi - lo > tol) z.vertices.push_back(Eigen::VectorXd::Constant(1, hi));
    } else if (k == 2) {
        std::vector<geometry::Point2> corners;
        corners.reserve(std::size_t{1} << z.generators.cols());
        detail::for_each_corner(z.generators, [&](std::uint64_t, const Eigen::VectorXd& v) {
            corners.emplace_back(v(0), v(1));
        });
        for (const auto& p : geometry::convex_hull(std::move(corners), tol)) {
            z.vertices.emplace_back(p);
        }
    } else {
        std::vector<Eigen::VectorXd> corners;
        detail::for_each_corner(z.generators, [&](std::uint64_t, const Eigen::VectorXd& v) {
            corners.push_back(v);
        });
        std::sort(corners.begin(), corners.end(), detail::lex_less);
        for (auto& c : corners) {
            if (z.vertices.empty() || (z.vertices.back() - c).norm() > tol) z.vertices.push_back(std::move(c));
        }
    }
    return z;
}

/// k x n generator matrix: projected Jacobian rows times p_max.
inline Eigen::MatrixXd zonotope_generators(const Assembly& assembly, const PlatformState& state,
                                           const DofSelection& dofs) {
    const Eigen::MatrixXd Jp = project_jacobian(assembly_jacobian(assembly, state), dofs);
    return (assembly.max_pressures().asDiagonal() * Jp).transpose();
}

inline Zonotope force_zonotope(const Assembly& assembly, const PlatformState& state,
                               const DofSelection& dofs) {
    require_selection(dofs);
    if (assembly.size() > max_corner_frees) {
        throw Error(ErrorCode::TooManyFrees,
                    std::to_string(assembly.size()) + " FREEs exceed the corner limit of " +
                        std::to_string(max_corner_frees));
    }
    return make_zonotope(zonotope_generators(assembly, state, dofs), dofs);
}

namespace detail {

inline void require_point(const Zonotope& z, const Eigen::VectorXd& point) {
    if (point.size() != z.dimension()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "point has " + std::to_string(point.size()) + " components, zonotope has " +
                        std::to_string(z.dimension()));
    }
}

} // namespace detail

/// Euclidean distance from a point to the zonotope (zero inside).
inline double distance_to_zonotope(const Zonotope& z, const Eigen::VectorXd& point) {
    detail::require_point(z, point);
    if (z.dimension() == 1) {
        const double lo = z.vertices.front()(0);
        const double hi = z.vertices.back()(0);
        return std::max({0.0, lo - point(0), point(0) - hi});
    }
    if (z.dimension() == 2) {
        std::vector<geometry::Point2> poly;
        poly.reserve(z.vertices.size());
        for (const auto& v : z.vertices) poly.emplace_back(v(0), v(1));
        return geometry::distance_to_polygon(poly, geometry::Point2(point(0), point(1)));
    }
    const Eigen::Index n = z.generator_count();
    const auto fit = lsq::solve_box_lsq(z.generators, point, Eigen::VectorXd::Zero(n),
                                        Eigen::VectorXd::Ones(n), false);
    return fit.residual_norm;
}

/// True iff the point lies within `tol` of the zonotope; the boundary counts as inside.
inline bool contains(const Zonotope& z, const Eigen::VectorXd& point, double tol) {
    return distance_to_zonotope(z, point) <= tol;
}

inline bool contains(const Zonotope& z, const Eigen::VectorXd& point) {
    return contains(z, point, z.tolerance());
}

namespace detail {

// Sum over all k-subsets of generators of |det|; the exact k-volume.
inline double subset_determinant_sum(const Eigen::MatrixXd& G) {
    const Eigen::Index k = G.rows();
    const Eigen::Index n = G.cols();
    if (n < k) return 0.0;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    double total = 0.0;
    Eigen::MatrixXd M(k, k);
    while (true) {
        for (Eigen::Index j = 0; j < k; ++j) M.col(j) = G.col(idx[static_cast<std::size_t>(j)]);
        total += std::abs(k == 1 ? M(0, 0) : M.determinant());
        Eigen::Index pos = k - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (Eigen::Index j = pos + 1; j < k; ++j) {
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return total;
}

} // namespace detail

/// Exact area of a planar zonotope: sum over generator pairs of |det[g_i g_j]|.
inline double zonotope_area(const Zonotope& z) {
    if (z.dimension() != 2) {
        throw Error(ErrorCode::WrongDimension,
                    "area needs a planar zonotope, got dimension " + std::to_string(z.dimension()));
    }
    return detail::subset_determinant_sum(z.generators);
}

/// Length, area or volume for k = 1, 2, 3.
inline double zonotope_measure(const Zonotope& z) {
    if (z.dimension() < 1 || z.dimension() > 3) {
        throw Error(ErrorCode::WrongDimension,
                    "measure supported for dimension 1..3, got " + std::to_string(z.dimension()));
    }
    return detail::subset_determinant_sum(z.generators);
}

/// Shoelace area of the computed hull; cross-check for zonotope_area.
inline double hull_area(const Zonotope& z) {
    if (z.dimension() != 2) {
        throw Error(ErrorCode::WrongDimension, "hull area needs a planar zonotope");
    }
    std::vector<geometry::Point2> poly;
    for (const auto& v : z.vertices) poly.emplace_back(v(0), v(1));
    return geometry::polygon_area(poly);
}

/// Smallest and largest attainable value of each selected component.
struct ComponentRange {
    Eigen::VectorXd min;
    Eigen::VectorXd max;
};

inline ComponentRange component_ranges(const Zonotope& z) {
    return {z.generators.cwiseMin(0.0).rowwise().sum(), z.generators.cwiseMax(0.0).rowwise().sum()};
}

/// Whether the generators positively span the selected wrench space, i.e. the
/// origin is strictly inside the zonotope. Every facet normal comes from a
/// (k-1)-subset of generators; the support value on both sides of each such
/// hyperplane must exceed the tolerance. A zonotope of rank < k has no
/// interior and is rejected up front.
inline bool full_authority(const Zonotope& z) {
    const Eigen::Index k = z.dimension();
    const Eigen::Index n = z.generator_count();
    const double tol = z.tolerance();
    if (n < k + 1) return false;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(z.generators);
    lu.setThreshold(hull_relative_tolerance);
    if (lu.rank() < k) return false;

    auto support_ok = [&](const Eigen::VectorXd& normal) {
        const Eigen::RowVectorXd proj = normal.transpose() * z.generators;
        return proj.cwiseMax(0.0).sum() > tol && (-proj).cwiseMax(0.0).sum() > tol;
    };

    if (k == 1) return support_ok(Eigen::VectorXd::Ones(1));

    const Eigen::Index m = k - 1;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
    Eigen::MatrixXd S(m, k);
    while (true) {
        for (Eigen::Index j = 0; j < m; ++j) S.row(j) = z.generators.col(idx[static_cast<std::size_t>(j)]).transpose();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double smax = sv.size() > 0 ? sv(0) : 0.0;
        const bool spans = smax > 0.0 && sv(m - 1) > hull_relative_tolerance * smax;
        if (spans && !support_ok(svd.matrixV().col(k - 1))) return false;

        Eigen::Index pos = m - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - m + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (Eigen::Index j = pos + 1; j < m; ++j) {
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return true;
}

inline bool full_authority(const Assembly& assembly, const PlatformState& state,
                           const DofSelection& dofs) {
    return full_authority(force_zonotope(assembly, state, dofs));
}

struct PressureSolution {
    Eigen::VectorXd pressures;  // [Pa]
    double residual = 0.0;      // ||J_x^T p - target|| in target units
    bool feasible = false;
};

inline constexpr double default_solve_tolerance = 1e-6;

/// Box-constrained inverse statics: minimize ||J_x^T p - target|| over
/// 0 <= p <= p_max. Among exact solutions the minimum-norm pressure vector is
/// returned. Infeasible targets yield the closest attainable wrench, so the
/// residual is the distance from the target to the zonotope.
inline PressureSolution solve_pressures(const Assembly& assembly, const PlatformState& state,
                                        const Eigen::VectorXd& target, const DofSelection& dofs,
                                        double tol = default_solve_tolerance) {
    require_selection(dofs);
    if (target.size() != static_cast<Eigen::Index>(dofs.size())) {
        throw Error(ErrorCode::DimensionMismatch,
                    "target has " + std::to_string(target.size()) + " components for " +
                        std::to_string(dofs.size()) + " selected dofs");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(assembly.size());
    const Eigen::VectorXd p_max = assembly.max_pressures();
    const Eigen::MatrixXd Jt = project_jacobian(assembly_jacobian(assembly, state), dofs).transpose();

    // Solve in normalized pressures alpha = p / p_max so columns carry wrench units.
    const Eigen::MatrixXd G = Jt * p_max.asDiagonal();
    const auto fit = lsq::solve_box_lsq(G, target, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n), false);

    Eigen::VectorXd p = fit.x.cwiseProduct(p_max);
    {
        // Minimum-norm refinement in pressure units, holding J^T p fixed.
        std::vector<lsq::detail::Bound> bounds(static_cast<std::size_t>(n), lsq::detail::Bound::Free);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (fit.x(i) <= 0.0) {
                p(i) = 0.0;
                bounds[static_cast<std::size_t>(i)] = lsq::detail::Bound::Lower;
            } else if (fit.x(i) >= 1.0) {
                p(i) = p_max(i);
                bounds[static_cast<std::size_t>(i)] = lsq::detail::Bound::Upper;
            }
        }
        const double jscale = std::max(Jt.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
        lsq::detail::minimum_norm_refine(Jt / jscale, Eigen::VectorXd::Zero(n), p_max, bounds, p);
    }
    p = p.cwiseMax(0.0).cwiseMin(p_max);

    PressureSolution sol;
    sol.pressures = p;
    sol.residual = (Jt * p - target).norm();
    sol.feasible = sol.residual <= tol * std::max(1.0, target.norm());
    return sol;
}

inline PressureSolution solve_pressures(const Assembly& assembly, const PlatformState& state,
                                        const Eigen::VectorXd& target,
                                        double tol = default_solve_tolerance) {
    return solve_pressures(assembly, state, target, assembly.dofs(), tol);
}

// ---------------------------------------------------------------------------
// Workspace sweep
// ---------------------------------------------------------------------------

/// Evenly spaced samples first..last inclusive; count == 1 samples `first`.
struct GridAxis {
    double first = 0.0;
    double last = 0.0;
    std::size_t count = 1;

    double at(std::size_t i) const {
        if (count <= 1) return first;
        if (i + 1 == count) return last;
        return first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

struct GridSpec {
    GridAxis dl;
    GridAxis dphi;

    std::size_t size() const { return dl.count * dphi.count; }
};

enum class SweepAxis { Dl, Dphi };

struct SweepPoint {
    std::size_t dl_index = 0;
    std::size_t dphi_index = 0;
    PlatformState state;
    DeformationVerdict verdict = DeformationVerdict::Valid;
    std::string offending_free;        // set when invalid
    std::optional<double> measure;     // length/area/volume when k <= 3
    Eigen::VectorXd min_force;         // per selected dof
    Eigen::VectorXd max_force;
    double contraction = std::numeric_limits<double>::quiet_NaN();  // min attainable Fz [N]
    bool contraction_authority = false;
    bool full_authority = false;

    bool valid() const noexcept { return verdict == DeformationVerdict::Valid; }
};

/// Change of contraction authority between two neighbouring valid grid states.
struct CollapseLocus {
    SweepAxis axis = SweepAxis::Dl;
    std::size_t from_index = 0;      // flat index of the state that has authority
    std::size_t collapsed_index = 0; // flat index of the neighbour that lost it
    double refined = 0.0;            // axis coordinate where min Fz reaches -tol
};

struct SweepReport {
    GridSpec grid;
    DofSelection dofs;
    std::vector<SweepPoint> points;  // dl-major: index = i_dl * dphi.count + i_dphi
    std::vector<CollapseLocus> collapses;

    const SweepPoint& at(std::size_t dl_index, std::size_t dphi_index) const {
        return points.at(dl_index * grid.dphi.count + dphi_index);
    }
};

/// Smallest attainable end-effector Fz at a state: the sum of the negative
/// Fz generator components. Throws KinematicsInvalid for invalid states.
inline double attainable_contraction(const Assembly& assembly, const PlatformState& state) {
    const AssemblyJacobian J = assembly_jacobian(assembly, state);
    const Eigen::VectorXd fz = J.col(component_index(WrenchComponent::Fz)).cwiseProduct(assembly.max_pressures());
    return fz.cwiseMin(0.0).sum();
}

namespace detail {

inline SweepPoint evaluate_sweep_point(const Assembly& assembly, const DofSelection& dofs,
                                       const PlatformState& state) {
    SweepPoint pt;
    pt.state = state;
    const auto qs = assembly.kinematics().map(assembly, state);
    for (std::size_t i = 0; i < qs.size() && i < assembly.size(); ++i) {
        const auto v = validate_deformation(assembly.actuator(i).design, qs[i]);
        if (v != DeformationVerdict::Valid) {
            pt.verdict = v;
            pt.offending_free = assembly.actuator(i).design.name();
            return pt;
        }
    }
    const Zonotope z = force_zonotope(assembly, state, dofs);
    if (z.dimension() <= 3) pt.measure = zonotope_measure(z);
    const auto ranges = component_ranges(z);
    pt.min_force = ranges.min;
    pt.max_force = ranges.max;
    pt.contraction = attainable_contraction(assembly, state);
    pt.contraction_authority = pt.contraction < -collapse_force_tolerance;
    pt.full_authority = full_authority(z);
    return pt;
}

inline PlatformState with_axis(PlatformState s, SweepAxis axis, double value) {
    if (axis == SweepAxis::Dl) s.dl = value;
    else s.dphi = value;
    return s;
}

inline double axis_value(const PlatformState& s, SweepAxis axis) {
    return axis == SweepAxis::Dl ? s.dl : s.dphi;
}

// Bisects between a state with contraction authority and one without.
inline double refine_collapse(const Assembly& assembly, const PlatformState& with_authority,
                              const PlatformState& without, SweepAxis axis) {
    double a = axis_value(with_authority, axis);
    double b = axis_value(without, axis);
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        const double c = attainable_contraction(assembly, with_axis(with_authority, axis, mid));
        if (c < -collapse_force_tolerance) a = mid;
        else b = mid;
    }
    return 0.5 * (a + b);
}

} // namespace detail

/// Evaluates every grid state (concurrently when threads != 1) and reports,
/// in grid order, validity, zonotope measure, per-dof force ranges and
/// contraction authority. Invalid states are kept and flagged. Loci where
/// contraction authority changes between neighbouring valid states are
/// refined by bisection.
inline SweepReport workspace_sweep(const Assembly& assembly, const GridSpec& grid,
                                   const DofSelection& dofs, unsigned threads = 0) {
    require_selection(dofs);
    if (grid.dl.count == 0 || grid.dphi.count == 0) {
        throw Error(ErrorCode::EmptyGrid, "grid has no states");
    }
    SweepReport report;
    report.grid = grid;
    report.dofs = dofs;
    const std::size_t total = grid.size();
    report.points.resize(total);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            const std::size_t i = idx / grid.dphi.count;
            const std::size_t j = idx % grid.dphi.count;
            try {
                auto pt = detail::evaluate_sweep_point(assembly, dofs, {grid.dl.at(i), grid.dphi.at(j)});
                pt.dl_index = i;
                pt.dphi_index = j;
                report.points[idx] = std::move(pt);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    auto check_pair = [&](std::size_t a, std::size_t b, SweepAxis axis) {
        const auto& pa = report.points[a];
        const auto& pb = report.points[b];
        if (!pa.valid() || !pb.valid() || pa.contraction_authority == pb.contraction_authority) return;
        const std::size_t from = pa.contraction_authority ? a : b;
        const std::size_t to = pa.contraction_authority ? b : a;
        CollapseLocus locus;
        locus.axis = axis;
        locus.from_index = from;
        locus.collapsed_index = to;
        locus.refined = detail::refine_collapse(assembly, report.points[from].state,
                                                report.points[to].state, axis);
        report.collapses.push_back(locus);
    };
    const std::size_t ndphi = grid.dphi.count;
    for (std::size_t j = 0; j < ndphi; ++j) {
        for (std::size_t i = 0; i + 1 < grid.dl.count; ++i) {
            check_pair(i * ndphi + j, (i + 1) * ndphi + j, SweepAxis::Dl);
        }
    }
    for (std::size_t i = 0; i < grid.dl.count; ++i) {
        for (std::size_t j = 0; j + 1 < ndphi; ++j) {
            check_pair(i * ndphi + j, i * ndphi + j + 1, SweepAxis::Dphi);
        }
    }
    return report;
}

} // namespace freeforce
