// Geometry and kinetics of a single ideal cylindrical FREE
// (fiber-reinforced elastomeric enclosure).
//
// Conventions:
// - SI units throughout (m, rad, Pa, N, N·m).
// - The sign of the fiber angle encodes chirality. N carries the opposite
//   sign, so a positive fiber angle yields negative revolutions.
// - Generalized deformation q = [dl, dphi]; generalized force tau = [F, M].
#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "freeforce/errors.hpp"

namespace freeforce {

/// Relaxed-state parameters of one actuator: length, radius, fiber angle and
/// the maximum allowed gauge pressure. Construction enforces L, R, p_max > 0
/// and 0 < |fiber_angle| < pi/2; both angle limits are singular.
class FreeDesign {
public:
    FreeDesign(std::string name, double length, double radius, double fiber_angle, double p_max)
        : name_(std::move(name)), length_(length), radius_(radius), fiber_angle_(fiber_angle),
          p_max_(p_max) {
        auto fail = [&](const std::string& what) {
            throw Error(ErrorCode::InvalidDesign, "'" + name_ + "': " + what);
        };
        if (!(std::isfinite(length_) && length_ > 0.0)) fail("length must be positive");
        if (!(std::isfinite(radius_) && radius_ > 0.0)) fail("radius must be positive");
        if (!(std::isfinite(p_max_) && p_max_ > 0.0)) fail("p_max must be positive");
        const double a = std::abs(fiber_angle_);
        if (!(std::isfinite(fiber_angle_) && a > 0.0 && a < std::numbers::pi / 2.0)) {
            fail("fiber angle must satisfy 0 < |Gamma| < pi/2");
        }
    }

    const std::string& name() const noexcept { return name_; }
    double length() const noexcept { return length_; }
    double radius() const noexcept { return radius_; }
    double fiber_angle() const noexcept { return fiber_angle_; }
    double p_max() const noexcept { return p_max_; }

    friend bool operator==(const FreeDesign&, const FreeDesign&) = default;

private:
    std::string name_;
    double length_;
    double radius_;
    double fiber_angle_;
    double p_max_;
};

struct DerivedGeometry {
    double fiber_length = 0.0;  // B [m]
    double revolutions = 0.0;   // N [turns], signed
};

/// B = |L / cos(Gamma)|, N = -(L / 2 pi R) tan(Gamma).
inline DerivedGeometry derive_geometry(const FreeDesign& design) {
    const double L = design.length();
    const double gamma = design.fiber_angle();
    return {std::abs(L / std::cos(gamma)),
            -(L / (2.0 * std::numbers::pi * design.radius())) * std::tan(gamma)};
}

struct Deformation {
    double dl = 0.0;    // axial length change [m]
    double dphi = 0.0;  // twist about the axis [rad]

    friend bool operator==(const Deformation&, const Deformation&) = default;
};

enum class DeformationVerdict { Valid, ZeroLength, OverExtended, FiberUnwound };

constexpr std::string_view verdict_name(DeformationVerdict v) {
    switch (v) {
    case DeformationVerdict::Valid: return "Valid";
    case DeformationVerdict::ZeroLength: return "ZeroLength";
    case DeformationVerdict::OverExtended: return "OverExtended";
    case DeformationVerdict::FiberUnwound: return "FiberUnwound";
    }
    return "Unknown";
}

/// A deformation is valid iff 0 < L + dl < B and 2 pi N + dphi keeps the sign
/// of 2 pi N (the fiber never unwinds through zero).
inline DeformationVerdict validate_deformation(const FreeDesign& design, const Deformation& q) {
    const auto geo = derive_geometry(design);
    const double l = design.length() + q.dl;
    if (!std::isfinite(l) || l <= 0.0) return DeformationVerdict::ZeroLength;
    if (l >= geo.fiber_length) return DeformationVerdict::OverExtended;
    const double wind0 = 2.0 * std::numbers::pi * geo.revolutions;
    const double wind = wind0 + q.dphi;
    if (!std::isfinite(wind) || wind == 0.0 || std::signbit(wind) != std::signbit(wind0)) {
        return DeformationVerdict::FiberUnwound;
    }
    return DeformationVerdict::Valid;
}

namespace detail {

inline std::string describe_state(const FreeDesign& design, const Deformation& q) {
    std::ostringstream os;
    os << "'" << design.name() << "' at dl=" << q.dl << " m, dphi=" << q.dphi << " rad";
    return os.str();
}

// Throws the error mandated for operations that need a valid state.
inline void require_valid(const FreeDesign& design, const Deformation& q) {
    switch (validate_deformation(design, q)) {
    case DeformationVerdict::Valid: return;
    case DeformationVerdict::ZeroLength:
        throw Error(ErrorCode::DegenerateState,
                    describe_state(design, q) + ": deformed length is not positive");
    case DeformationVerdict::OverExtended:
        throw Error(ErrorCode::OverExtended,
                    describe_state(design, q) + ": deformed length reaches the fiber length");
    case DeformationVerdict::FiberUnwound:
        throw Error(ErrorCode::DegenerateState,
                    describe_state(design, q) + ": fiber unwinds through zero revolutions");
    }
}

// 2 pi N + dphi, the current total winding angle of one fiber.
inline double winding(const FreeDesign& design, const Deformation& q) {
    return 2.0 * std::numbers::pi * derive_geometry(design).revolutions + q.dphi;
}

} // namespace detail

/// l = L + dl. Both degenerate ends (l <= 0, l >= B) raise DegenerateState.
inline double deformed_length(const FreeDesign& design, const Deformation& q) {
    const double l = design.length() + q.dl;
    if (!(l > 0.0) || l >= derive_geometry(design).fiber_length) {
        throw Error(ErrorCode::DegenerateState,
                    detail::describe_state(design, q) + ": length outside (0, B)");
    }
    return l;
}

/// r = B / |2 pi N + dphi| * sqrt(1 - (l / B)^2)
inline double deformed_radius(const FreeDesign& design, const Deformation& q) {
    detail::require_valid(design, q);
    const double B = derive_geometry(design).fiber_length;
    const double l = design.length() + q.dl;
    const double ratio = l / B;
    return B / std::abs(detail::winding(design, q)) * std::sqrt(1.0 - ratio * ratio);
}

/// V = pi l (B^2 - l^2) / (2 pi N + dphi)^2
inline double enclosed_volume(const FreeDesign& design, const Deformation& q) {
    detail::require_valid(design, q);
    const double B = derive_geometry(design).fiber_length;
    const double l = design.length() + q.dl;
    const double w = detail::winding(design, q);
    return std::numbers::pi * l * (B * B - l * l) / (w * w);
}

/// Gradient of the enclosed volume with respect to q.
struct JacobianRow {
    double dV_dl = 0.0;    // [m^2]
    double dV_dphi = 0.0;  // [m^3/rad]
};

inline JacobianRow fluid_jacobian(const FreeDesign& design, const Deformation& q) {
    detail::require_valid(design, q);
    const double B = derive_geometry(design).fiber_length;
    const double l = design.length() + q.dl;
    const double w = detail::winding(design, q);
    const double w2 = w * w;
    return {std::numbers::pi * (B * B - 3.0 * l * l) / w2,
            2.0 * std::numbers::pi * l * (l * l - B * B) / (w2 * w)};
}

/// Fiber-generated generalized force of one actuator.
struct AxialWrench {
    double force = 0.0;   // along the actuator axis [N]
    double moment = 0.0;  // about the actuator axis [N·m]
};

namespace detail {

inline void require_pressure(const FreeDesign& design, double pressure) {
    if (!(pressure >= 0.0)) {
        std::ostringstream os;
        os << "'" << design.name() << "' pressure " << pressure << " Pa is negative";
        throw Error(ErrorCode::NegativePressure, os.str());
    }
    if (pressure > design.p_max()) {
        std::ostringstream os;
        os << "'" << design.name() << "' pressure " << pressure << " Pa exceeds p_max "
           << design.p_max() << " Pa";
        throw Error(ErrorCode::PressureLimit, os.str());
    }
}

} // namespace detail

/// tau = J_q^T p, for 0 <= p <= p_max.
inline AxialWrench axial_wrench(const FreeDesign& design, const Deformation& q, double pressure) {
    detail::require_pressure(design, pressure);
    const auto j = fluid_jacobian(design, q);
    return {j.dV_dl * pressure, j.dV_dphi * pressure};
}

/// Relaxed-state ratio F·R/M as a function of fiber angle only:
/// (1 - 2 cot^2 Gamma) / (2 cot Gamma). Its root is atan(sqrt 2) ≈ 54.7356°.
inline double force_moment_ratio(double fiber_angle) {
    const double a = std::abs(fiber_angle);
    if (!(std::isfinite(fiber_angle) && a > 0.0 && a < std::numbers::pi / 2.0)) {
        std::ostringstream os;
        os << "fiber angle " << fiber_angle << " rad outside 0 < |Gamma| < pi/2";
        throw Error(ErrorCode::InvalidAngle, os.str());
    }
    const double cot = 1.0 / std::tan(fiber_angle);
    return (1.0 - 2.0 * cot * cot) / (2.0 * cot);
}

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

} // namespace freeforce
