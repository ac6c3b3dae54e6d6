// Builds the three-FREE rig in code, prints its force zonotope at rest and
// solves for the pressures that hold a 2 N pull with no twist.
#include <cstdio>

#include "freeforce/force_analysis.hpp"

int main() {
    using namespace freeforce;
    const double p_max = 103.4e3;
    auto free = [&](const char* name, double gamma_deg) {
        return FreeDesign(name, 0.1, 0.005, deg_to_rad(gamma_deg), p_max);
    };
    const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
    Assembly rig({{free("free_p48", 48), {{0.013, 0, 0}, z}},
                  {free("free_m48", -48), {{-0.006, 0.011, 0}, z}},
                  {free("free_m85", -85), {{-0.006, -0.011, 0}, z}}},
                 {WrenchComponent::Fz, WrenchComponent::Mz});

    const PlatformState rest{0.0, 0.0};
    const Zonotope zono = force_zonotope(rig, rest, rig.dofs());
    std::printf("%zu vertices, area %.4f N*N*m, full authority: %s\n", zono.vertices.size(),
                zonotope_area(zono), full_authority(zono) ? "yes" : "no");
    for (const auto& v : zono.vertices) std::printf("  Fz=%9.4f N  Mz=%+.5f N*m\n", v(0), v(1));

    Eigen::Vector2d target(2.0, 0.0);
    const auto sol = solve_pressures(rig, rest, target);
    std::printf("target Fz=2 Mz=0: feasible=%s p=[%.0f %.0f %.0f] Pa\n", sol.feasible ? "yes" : "no",
                sol.pressures(0), sol.pressures(1), sol.pressures(2));

    std::printf("contraction at dl=-15 mm: %.4f N\n", attainable_contraction(rig, {-0.015, 0.0}));
    return 0;
}
