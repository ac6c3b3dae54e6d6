// Parallel assemblies of FREEs acting on a common end effector.
//
// Every actuator is grounded at one end and attached to the end effector at
// the other. Wrenches are expressed in the body-fixed end-effector frame,
// moments about its origin, ordered [Fx Fy Fz Mx My Mz].
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "freeforce/errors.hpp"
#include "freeforce/free_core.hpp"

namespace freeforce {

using Vector6d = Eigen::Matrix<double, 6, 1>;

enum class WrenchComponent { Fx = 0, Fy, Fz, Mx, My, Mz };

inline constexpr std::array<WrenchComponent, 6> all_components{
    WrenchComponent::Fx, WrenchComponent::Fy, WrenchComponent::Fz,
    WrenchComponent::Mx, WrenchComponent::My, WrenchComponent::Mz};

constexpr int component_index(WrenchComponent c) { return static_cast<int>(c); }

constexpr std::string_view component_name(WrenchComponent c) {
    constexpr std::array<std::string_view, 6> names{"Fx", "Fy", "Fz", "Mx", "My", "Mz"};
    return names[component_index(c)];
}

/// Column name with unit suffix, as used in CSV headers ("Fz_N", "Mz_Nm").
inline std::string component_column(WrenchComponent c) {
    std::string out(component_name(c));
    out += component_index(c) < 3 ? "_N" : "_Nm";
    return out;
}

constexpr std::string_view component_unit(WrenchComponent c) {
    return component_index(c) < 3 ? "N" : "N·m";
}

inline std::optional<WrenchComponent> parse_component(std::string_view name) {
    for (auto c : all_components) {
        if (component_name(c) == name) return c;
    }
    return std::nullopt;
}

/// Ordered, nonempty subset of the six wrench components.
using DofSelection = std::vector<WrenchComponent>;

inline void require_selection(const DofSelection& dofs) {
    if (dofs.empty()) throw Error(ErrorCode::EmptySelection, "no wrench components selected");
    std::array<bool, 6> seen{};
    for (auto c : dofs) {
        if (seen[component_index(c)]) {
            throw Error(ErrorCode::EmptySelection,
                        "component " + std::string(component_name(c)) + " selected twice");
        }
        seen[component_index(c)] = true;
    }
}

/// Parses "Fz,Mz" style lists.
inline DofSelection parse_dofs(std::string_view text) {
    DofSelection dofs;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto token = text.substr(0, comma);
        const auto c = parse_component(token);
        if (!c) {
            throw Error(ErrorCode::ValidationError, "unknown wrench component '" +
                                                        std::string(token) + "'");
        }
        dofs.push_back(*c);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    require_selection(dofs);
    return dofs;
}

struct Placement {
    Eigen::Vector3d attachment = Eigen::Vector3d::Zero();  // d [m], end-effector frame
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();       // unit axis
};

inline constexpr double unit_axis_tolerance = 1e-9;

/// Skew-symmetric matrix with cross_matrix(d) * a == d.cross(a).
inline Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& d) {
    Eigen::Matrix3d m;
    m << 0.0, -d.z(), d.y(),
         d.z(), 0.0, -d.x(),
         -d.y(), d.x(), 0.0;
    return m;
}

/// 6x2 map from [F, M] of one actuator to its end-effector wrench.
using WrenchTransform = Eigen::Matrix<double, 6, 2>;

inline WrenchTransform wrench_transform(const Placement& placement) {
    const Eigen::Vector3d& a = placement.axis;
    if (!a.allFinite() || std::abs(a.norm() - 1.0) > unit_axis_tolerance) {
        std::ostringstream os;
        os << "axis [" << a.transpose() << "] has norm " << a.norm();
        throw Error(ErrorCode::NonUnitAxis, os.str());
    }
    WrenchTransform D = WrenchTransform::Zero();
    D.block<3, 1>(0, 0) = a;
    D.block<3, 1>(3, 0) = cross_matrix(placement.attachment) * a;
    D.block<3, 1>(3, 1) = a;
    return D;
}

struct Wrench6 {
    Eigen::Vector3d force = Eigen::Vector3d::Zero();   // [N]
    Eigen::Vector3d moment = Eigen::Vector3d::Zero();  // [N·m] about the end-effector origin

    Vector6d stacked() const {
        Vector6d w;
        w << force, moment;
        return w;
    }

    static Wrench6 from_stacked(const Vector6d& w) {
        return {w.head<3>(), w.tail<3>()};
    }

    double component(WrenchComponent c) const { return stacked()(component_index(c)); }
};

/// Selected components of a wrench, in selection order.
inline Eigen::VectorXd project_wrench(const Wrench6& wrench, const DofSelection& dofs) {
    require_selection(dofs);
    const Vector6d w = wrench.stacked();
    Eigen::VectorXd out(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t i = 0; i < dofs.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = w(component_index(dofs[i]));
    }
    return out;
}

/// Generalized end-effector displacement of the 2-DOF platform.
struct PlatformState {
    double dl = 0.0;    // [m]
    double dphi = 0.0;  // [rad]

    friend bool operator==(const PlatformState&, const PlatformState&) = default;
};

struct Actuator {
    FreeDesign design;
    Placement placement;
};

class Assembly;

/// Maps a platform state to per-actuator deformations. Identified by name so
/// configurations can refer to it.
struct KinematicMap {
    std::string id;
    std::function<std::vector<Deformation>(const Assembly&, const PlatformState&)> map;
};

inline KinematicMap coaxial_map();

/// Built-in maps by identifier; currently only "coaxial".
inline std::optional<KinematicMap> find_kinematic_map(std::string_view id) {
    if (id == "coaxial") return coaxial_map();
    return std::nullopt;
}

class Assembly {
public:
    Assembly(std::vector<Actuator> actuators, DofSelection dofs,
             KinematicMap kinematics = coaxial_map())
        : actuators_(std::move(actuators)), dofs_(std::move(dofs)),
          kinematics_(std::move(kinematics)) {
        if (actuators_.empty()) {
            throw Error(ErrorCode::ValidationError, "an assembly needs at least one FREE");
        }
        std::unordered_set<std::string> names;
        for (const auto& act : actuators_) {
            if (!names.insert(act.design.name()).second) {
                throw Error(ErrorCode::ValidationError,
                            "duplicate FREE name '" + act.design.name() + "'");
            }
            wrench_transform(act.placement);  // validates the axis
        }
        require_selection(dofs_);
        if (!kinematics_.map) {
            throw Error(ErrorCode::ValidationError,
                        "kinematic map '" + kinematics_.id + "' has no implementation");
        }
    }

    std::size_t size() const noexcept { return actuators_.size(); }
    const std::vector<Actuator>& actuators() const noexcept { return actuators_; }
    const Actuator& actuator(std::size_t i) const { return actuators_.at(i); }
    const DofSelection& dofs() const noexcept { return dofs_; }
    const KinematicMap& kinematics() const noexcept { return kinematics_; }

    Eigen::VectorXd max_pressures() const {
        Eigen::VectorXd p(static_cast<Eigen::Index>(size()));
        for (std::size_t i = 0; i < size(); ++i) {
            p(static_cast<Eigen::Index>(i)) = actuators_[i].design.p_max();
        }
        return p;
    }

private:
    std::vector<Actuator> actuators_;
    DofSelection dofs_;
    KinematicMap kinematics_;
};

/// Every actuator sees the platform's (dl, dphi) directly. Exact for rigs
/// whose actuator axes are all parallel to the platform's sliding/twist axis.
inline KinematicMap coaxial_map() {
    return {"coaxial", [](const Assembly& assembly, const PlatformState& x) {
                return std::vector<Deformation>(assembly.size(), Deformation{x.dl, x.dphi});
            }};
}

/// Per-actuator deformations for a platform state. Throws KinematicsInvalid
/// naming the first actuator whose deformation is not valid.
inline std::vector<Deformation> map_platform_state(const Assembly& assembly,
                                                   const PlatformState& state) {
    auto qs = assembly.kinematics().map(assembly, state);
    if (qs.size() != assembly.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "kinematic map '" + assembly.kinematics().id + "' returned " +
                        std::to_string(qs.size()) + " deformations for " +
                        std::to_string(assembly.size()) + " FREEs");
    }
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const auto& design = assembly.actuator(i).design;
        const auto verdict = validate_deformation(design, qs[i]);
        if (verdict != DeformationVerdict::Valid) {
            std::ostringstream os;
            os << "FREE '" << design.name() << "' is " << verdict_name(verdict)
               << " at platform state dl=" << state.dl << " m, dphi=" << state.dphi << " rad";
            throw Error(ErrorCode::KinematicsInvalid, os.str());
        }
    }
    return qs;
}

/// n x 6 matrix; row i is the actuator's fluid Jacobian expressed as an
/// end-effector wrench per unit pressure.
using AssemblyJacobian = Eigen::Matrix<double, Eigen::Dynamic, 6>;

inline AssemblyJacobian assembly_jacobian(const Assembly& assembly, const PlatformState& state) {
    const auto qs = map_platform_state(assembly, state);
    AssemblyJacobian J(static_cast<Eigen::Index>(assembly.size()), 6);
    for (std::size_t i = 0; i < assembly.size(); ++i) {
        const auto& act = assembly.actuator(i);
        const auto jq = fluid_jacobian(act.design, qs[i]);
        const Eigen::RowVector2d row(jq.dV_dl, jq.dV_dphi);
        J.row(static_cast<Eigen::Index>(i)) = row * wrench_transform(act.placement).transpose();
    }
    return J;
}

/// Columns of the Jacobian for the selected components: n x k.
inline Eigen::MatrixXd project_jacobian(const AssemblyJacobian& J, const DofSelection& dofs) {
    require_selection(dofs);
    Eigen::MatrixXd out(J.rows(), static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t j = 0; j < dofs.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = J.col(component_index(dofs[j]));
    }
    return out;
}

/// Checks 0 <= p_i <= p_max_i for every actuator.
inline void require_pressures(const Assembly& assembly, const Eigen::VectorXd& pressures) {
    if (static_cast<std::size_t>(pressures.size()) != assembly.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(pressures.size()) + " pressures given for " +
                        std::to_string(assembly.size()) + " FREEs");
    }
    for (std::size_t i = 0; i < assembly.size(); ++i) {
        detail::require_pressure(assembly.actuator(i).design,
                                 pressures(static_cast<Eigen::Index>(i)));
    }
}

/// f = J_x^T p
inline Wrench6 net_wrench(const Assembly& assembly, const PlatformState& state,
                          const Eigen::VectorXd& pressures) {
    require_pressures(assembly, pressures);
    const AssemblyJacobian J = assembly_jacobian(assembly, state);
    return Wrench6::from_stacked(J.transpose() * pressures);
}

} // namespace freeforce
