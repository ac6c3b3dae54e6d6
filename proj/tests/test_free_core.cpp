#include <gtest/gtest.h>

#include <random>

#include "freeforce/free_core.hpp"
#include "oracles.hpp"

using namespace freeforce;

namespace {

constexpr double kL = 0.1;
constexpr double kR = 0.005;
constexpr double kPmax = 103400.0;

FreeDesign design_a() { return {"A", kL, kR, deg_to_rad(48.0), kPmax}; }
FreeDesign design_b() { return {"B", kL, kR, deg_to_rad(-48.0), kPmax}; }
FreeDesign design_c() { return {"C", kL, kR, deg_to_rad(-85.0), kPmax}; }

oracle::Free as_oracle(const FreeDesign& d) { return {d.length(), d.radius(), d.fiber_angle()}; }

void expect_rel(double actual, double expected, double rel) {
    EXPECT_TRUE(oracle::close_rel(actual, expected, rel)) << "actual " << actual << " expected " << expected;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no exception";
    return ErrorCode::UsageError;
}

// Random valid design with a state safely inside its validity region.
struct Sample {
    FreeDesign design;
    Deformation q;
};

Sample random_sample(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> L(0.02, 0.3), R(0.002, 0.03), deg(5.0, 85.0), sign(0.0, 1.0);
    const double g = deg_to_rad(deg(rng)) * (sign(rng) < 0.5 ? -1.0 : 1.0);
    FreeDesign d("r", L(rng), R(rng), g, 1e5);
    const auto geo = derive_geometry(d);
    std::uniform_real_distribution<double> frac(-0.3, 0.9), tw(-0.5, 0.5);
    const double dl = std::max(frac(rng) * (geo.fiber_length - d.length()), -0.5 * d.length());
    const double dphi = tw(rng) * std::abs(2.0 * std::numbers::pi * geo.revolutions);
    return {d, {dl, dphi}};
}

} // namespace

TEST(FreeDesign, RejectsInvalidParameters) {
    EXPECT_EQ(code_of([] { FreeDesign("x", 0.0, kR, 0.5, kPmax); }), ErrorCode::InvalidDesign);
    EXPECT_EQ(code_of([] { FreeDesign("x", kL, -1.0, 0.5, kPmax); }), ErrorCode::InvalidDesign);
    EXPECT_EQ(code_of([] { FreeDesign("x", kL, kR, 0.5, 0.0); }), ErrorCode::InvalidDesign);
    EXPECT_EQ(code_of([] { FreeDesign("x", kL, kR, 0.0, kPmax); }), ErrorCode::InvalidDesign);
    EXPECT_EQ(code_of([] { FreeDesign("x", kL, kR, std::numbers::pi / 2, kPmax); }), ErrorCode::InvalidDesign);
    EXPECT_EQ(code_of([] { FreeDesign("x", kL, kR, -std::numbers::pi / 2, kPmax); }), ErrorCode::InvalidDesign);
    EXPECT_NO_THROW(FreeDesign("x", kL, kR, -1.5, kPmax));
}

TEST(DeriveGeometry, MatchesHelixOracle) {
    for (const auto& d : {design_a(), design_b(), design_c()}) {
        const auto g = derive_geometry(d);
        expect_rel(g.fiber_length, static_cast<double>(oracle::fiber_length(as_oracle(d))), 1e-14);
        expect_rel(g.revolutions, static_cast<double>(oracle::turns(as_oracle(d))), 1e-14);
    }
    const auto a = derive_geometry(design_a());
    EXPECT_NEAR(a.fiber_length, 0.149448, 5e-7);
    EXPECT_LT(a.revolutions, 0.0);
    const auto c = derive_geometry(design_c());
    EXPECT_NEAR(c.fiber_length, 1.147371, 5e-7);
    EXPECT_GT(c.revolutions, 36.38);
}

TEST(DeriveGeometry, MirrorKeepsLengthNegatesTurns) {
    const auto a = derive_geometry(design_a());
    const auto b = derive_geometry(design_b());
    EXPECT_EQ(a.fiber_length, b.fiber_length);
    EXPECT_EQ(a.revolutions, -b.revolutions);
}

TEST(DeformedLength, AdditiveAndGuarded) {
    EXPECT_DOUBLE_EQ(deformed_length(design_a(), {0.0, 0.0}), 0.1);
    EXPECT_DOUBLE_EQ(deformed_length(design_a(), {0.005, 0.0}), 0.105);
    EXPECT_EQ(code_of([] { deformed_length(design_a(), {-0.1, 0.0}); }), ErrorCode::DegenerateState);
    EXPECT_EQ(code_of([] { deformed_length(design_a(), {0.06, 0.0}); }), ErrorCode::DegenerateState);
}

TEST(DeformedRadius, Examples) {
    const auto a = design_a();
    EXPECT_NEAR(deformed_radius(a, {0, 0}), kR, 1e-15);
    const double r = deformed_radius(a, {0.005, 0.0});
    expect_rel(r, static_cast<double>(oracle::radius(as_oracle(a), 0.005L, 0.0L)), 1e-13);
    // Printed example value carries four significant digits.
    EXPECT_NEAR(r, 4.7878e-3, 2e-5 * 4.7878e-3);
    const double B = derive_geometry(a).fiber_length;
    EXPECT_LT(deformed_radius(a, {B - kL - 1e-9, 0.0}), 1e-5);
    EXPECT_EQ(code_of([&] { deformed_radius(a, {B - kL, 0.0}); }), ErrorCode::OverExtended);
    const double unwind = -2.0 * std::numbers::pi * derive_geometry(a).revolutions;
    EXPECT_EQ(code_of([&] { deformed_radius(a, {0.0, unwind}); }), ErrorCode::DegenerateState);
}

TEST(EnclosedVolume, Examples) {
    const auto a = design_a();
    EXPECT_NEAR(enclosed_volume(a, {0, 0}), 7.853982e-6, 5e-13);
    const double v = enclosed_volume(a, {0.005, 0.0});
    expect_rel(v, static_cast<double>(oracle::volume(as_oracle(a), 0.005L, 0.0L)), 1e-12);
    EXPECT_NEAR(v, 7.5615e-6, 2e-5 * 7.5615e-6);
    EXPECT_GT(enclosed_volume(a, {0.0, 0.1}), enclosed_volume(a, {0, 0}));
}

TEST(EnclosedVolume, EqualsCylinderOfRadiusAndLength) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_sample(rng);
        const double r = deformed_radius(s.design, s.q);
        const double l = deformed_length(s.design, s.q);
        expect_rel(enclosed_volume(s.design, s.q), std::numbers::pi * r * r * l, 1e-12);
    }
}

TEST(RelaxedState, ClosureOnRandomDesigns) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const auto s = random_sample(rng);
        const auto& d = s.design;
        expect_rel(enclosed_volume(d, {}), std::numbers::pi * d.radius() * d.radius() * d.length(), 1e-12);
        expect_rel(deformed_radius(d, {}), d.radius(), 1e-12);
    }
}

TEST(FluidJacobian, ReferenceDesignsAtRest) {
    const auto ja = fluid_jacobian(design_a(), {});
    const auto gb = oracle::volume_gradient(as_oracle(design_a()), 0.0, 0.0);
    expect_rel(ja.dV_dl, gb.dV_dl, 1e-6);
    expect_rel(ja.dV_dphi, gb.dV_dphi, 1e-6);
    EXPECT_NEAR(ja.dV_dl, -4.8809e-5, 5e-10);
    EXPECT_NEAR(ja.dV_dphi, 7.0718e-7, 5e-11);

    const auto jc = fluid_jacobian(design_c(), {});
    const auto gc = oracle::volume_gradient(as_oracle(design_c()), 0.0, 0.0);
    expect_rel(jc.dV_dl, gc.dV_dl, 1e-6);
    expect_rel(jc.dV_dphi, gc.dV_dphi, 1e-6);
    EXPECT_NEAR(jc.dV_dl, 7.7337e-5, 5e-10);
    EXPECT_NEAR(jc.dV_dphi, -6.8714e-8, 5e-12);

    const auto jb = fluid_jacobian(design_b(), {});
    EXPECT_EQ(jb.dV_dl, ja.dV_dl);
    EXPECT_EQ(jb.dV_dphi, -ja.dV_dphi);
}

TEST(FluidJacobian, MatchesFiniteDifferencesOnRandomStates) {
    std::mt19937_64 rng(2);
    for (const auto& d : {design_a(), design_b(), design_c()}) {
        const auto geo = derive_geometry(d);
        std::uniform_real_distribution<double> dl(-0.05, 0.9 * (geo.fiber_length - kL)), dphi(-0.6, 0.6);
        for (int i = 0; i < 100; ++i) {
            const Deformation q{dl(rng), dphi(rng)};
            const auto j = fluid_jacobian(d, q);
            const auto g = oracle::volume_gradient(as_oracle(d), q.dl, q.dphi);
            expect_rel(j.dV_dl, g.dV_dl, 1e-6);
            expect_rel(j.dV_dphi, g.dV_dphi, 1e-6);
        }
    }
}

TEST(FluidJacobian, ChiralityMirrorOnRandomDesigns) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_sample(rng);
        const auto& d = s.design;
        const FreeDesign m("m", d.length(), d.radius(), -d.fiber_angle(), d.p_max());
        const auto jd = fluid_jacobian(d, {s.q.dl, 0.0});
        const auto jm = fluid_jacobian(m, {s.q.dl, 0.0});
        EXPECT_EQ(jd.dV_dl, jm.dV_dl);
        EXPECT_EQ(jd.dV_dphi, -jm.dV_dphi);
    }
}

TEST(FluidJacobian, ForceSignRegimes) {
    const double boundary = std::acos(1.0 / std::sqrt(3.0));
    for (double deg = 1.0; deg < 90.0; deg += 0.5) {
        const double g = deg_to_rad(deg);
        if (std::abs(g - boundary) < 1e-6) continue;
        for (double s : {1.0, -1.0}) {
            const FreeDesign d("d", kL, kR, s * g, kPmax);
            const double dvdl = fluid_jacobian(d, {}).dV_dl;
            if (g < boundary) EXPECT_LT(dvdl, 0.0) << deg;
            else EXPECT_GT(dvdl, 0.0) << deg;
        }
    }
}

TEST(AxialWrench, Examples) {
    const auto a = axial_wrench(design_a(), {}, kPmax);
    EXPECT_NEAR(a.force, -5.047, 5e-4);
    EXPECT_NEAR(a.moment, 0.07312, 5e-6);
    const auto c = axial_wrench(design_c(), {}, kPmax);
    EXPECT_NEAR(c.force, 7.997, 5e-4);
    EXPECT_NEAR(c.moment, -7.105e-3, 5e-7);
    const auto z = axial_wrench(design_c(), {0.01, 0.2}, 0.0);
    EXPECT_EQ(z.force, 0.0);
    EXPECT_EQ(z.moment, 0.0);
    EXPECT_EQ(code_of([] { axial_wrench(design_a(), {}, -1.0); }), ErrorCode::NegativePressure);
    EXPECT_EQ(code_of([] { axial_wrench(design_a(), {}, kPmax + 1.0); }), ErrorCode::PressureLimit);
}

TEST(AxialWrench, PowerBalance) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0), p01(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_sample(rng);
        const double p = p01(rng) * s.design.p_max();
        const double qd_l = u(rng) * 1e-3;
        const double qd_phi = u(rng);
        const auto tau = axial_wrench(s.design, s.q, p);
        const auto j = fluid_jacobian(s.design, s.q);
        const double lhs = tau.force * qd_l + tau.moment * qd_phi;
        const double rhs = p * (j.dV_dl * qd_l + j.dV_dphi * qd_phi);
        EXPECT_NEAR(lhs, rhs, 1e-12 * (std::abs(tau.force * qd_l) + std::abs(tau.moment * qd_phi)) + 1e-300);
    }
}

TEST(ForceMomentRatio, Examples) {
    EXPECT_NEAR(force_moment_ratio(std::atan(std::sqrt(2.0))), 0.0, 1e-15);
    EXPECT_NEAR(force_moment_ratio(deg_to_rad(45.0)), -0.5, 1e-15);
    EXPECT_NEAR(force_moment_ratio(deg_to_rad(48.0)), -0.345098, 5e-7);
    const auto w = axial_wrench(design_a(), {}, kPmax);
    EXPECT_NEAR(w.force * kR / w.moment, -0.34513, 5e-4);
    EXPECT_EQ(code_of([] { force_moment_ratio(0.0); }), ErrorCode::InvalidAngle);
    EXPECT_EQ(code_of([] { force_moment_ratio(std::numbers::pi / 2); }), ErrorCode::InvalidAngle);
}

TEST(ForceMomentRatio, EqualsJacobianRatioAtRest) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const auto s = random_sample(rng);
        const auto j = fluid_jacobian(s.design, {});
        expect_rel(force_moment_ratio(s.design.fiber_angle()), s.design.radius() * j.dV_dl / j.dV_dphi, 1e-9);
        expect_rel(force_moment_ratio(s.design.fiber_angle()), oracle::rest_ratio_fd(as_oracle(s.design)), 1e-6);
    }
}

TEST(ValidateDeformation, Verdicts) {
    const auto a = design_a();
    EXPECT_EQ(validate_deformation(a, {0, 0}), DeformationVerdict::Valid);
    EXPECT_EQ(validate_deformation(a, {0.06, 0}), DeformationVerdict::OverExtended);
    EXPECT_EQ(validate_deformation(a, {0, 22.22}), DeformationVerdict::FiberUnwound);
    EXPECT_EQ(validate_deformation(a, {0, 22.2}), DeformationVerdict::Valid);
    EXPECT_EQ(validate_deformation(a, {-0.1, 0}), DeformationVerdict::ZeroLength);
    EXPECT_EQ(validate_deformation(design_c(), {0, -230.0}), DeformationVerdict::FiberUnwound);
}
