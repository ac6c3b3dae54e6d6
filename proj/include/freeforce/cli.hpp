// Command-line front end. run() is the whole program minus process setup, so
// tests drive it with string vectors and capture both streams.
//
// Exit status: 0 success, 2 usage or validation error, 3 I/O error,
// 1 anything unexpected. Diagnostics are one line, "error: <ErrorName>...".
#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "freeforce/assembly.hpp"
#include "freeforce/errors.hpp"
#include "freeforce/experiment_io.hpp"
#include "freeforce/force_analysis.hpp"
#include "freeforce/free_core.hpp"
#include "freeforce/number_format.hpp"

namespace freeforce::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_internal = 1;
inline constexpr int exit_user = 2;
inline constexpr int exit_io = 3;

namespace detail {

inline Error usage(const std::string& msg) { return Error(ErrorCode::UsageError, msg); }

inline std::vector<double> parse_list(const std::string& flag, std::string_view text) {
    std::vector<double> out;
    if (text.empty()) throw usage(flag + ": empty value");
    while (true) {
        const auto comma = text.find(',');
        const auto token = text.substr(0, comma);
        const auto v = text::parse_double(token);
        if (!v) throw usage(flag + ": malformed number '" + std::string(token) + "'");
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

inline std::vector<double> parse_list(const std::string& flag, std::string_view text, std::size_t expected) {
    auto out = parse_list(flag, text);
    if (out.size() != expected) {
        throw usage(flag + ": expected " + std::to_string(expected) + " comma-separated values, got " +
                    std::to_string(out.size()));
    }
    return out;
}

inline PlatformState parse_state(std::string_view text) {
    const auto v = parse_list("--state", text, 2);
    return {v[0], v[1]};
}

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// "dl=a:b:n,dphi=c:d:m"; an omitted axis is sampled once at 0.
inline GridSpec parse_grid(std::string_view text) {
    GridSpec grid;
    bool seen_dl = false;
    bool seen_dphi = false;
    if (text.empty()) throw usage("--grid: empty value");
    while (true) {
        const auto comma = text.find(',');
        const std::string_view part = text.substr(0, comma);
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) throw usage("--grid: expected axis=first:last:count, got '" + std::string(part) + "'");
        const std::string_view axis = part.substr(0, eq);
        std::string_view spec = part.substr(eq + 1);
        std::vector<std::string_view> fields;
        while (true) {
            const auto colon = spec.find(':');
            fields.push_back(spec.substr(0, colon));
            if (colon == std::string_view::npos) break;
            spec.remove_prefix(colon + 1);
        }
        if (fields.size() != 3) throw usage("--grid: axis '" + std::string(axis) + "' needs first:last:count");
        const auto first = text::parse_double(fields[0]);
        const auto last = text::parse_double(fields[1]);
        std::size_t count = 0;
        const auto res = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), count);
        if (!first || !last || res.ec != std::errc{} || res.ptr != fields[2].data() + fields[2].size() || count == 0) {
            throw usage("--grid: malformed range for axis '" + std::string(axis) + "'");
        }
        GridAxis ax{*first, *last, count};
        if (axis == "dl" && !seen_dl) {
            grid.dl = ax;
            seen_dl = true;
        } else if (axis == "dphi" && !seen_dphi) {
            grid.dphi = ax;
            seen_dphi = true;
        } else {
            throw usage("--grid: unknown or repeated axis '" + std::string(axis) + "'");
        }
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return grid;
}

inline std::string component_list(const Eigen::VectorXd& v, const DofSelection& dofs) {
    std::string out;
    for (std::size_t i = 0; i < dofs.size(); ++i) {
        if (i) out += ' ';
        out += std::string(component_name(dofs[i])) + "=" + text::sig6(v(static_cast<Eigen::Index>(i)));
    }
    return out;
}

inline std::string joined(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += text::sig6(v(i));
    }
    return out;
}

inline std::string dof_names(const DofSelection& dofs) {
    std::string out;
    for (std::size_t i = 0; i < dofs.size(); ++i) {
        if (i) out += ',';
        out += component_name(dofs[i]);
    }
    return out;
}

inline ExportFormat format_for(const std::string& path) {
    auto ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".csv") return ExportFormat::Csv;
    if (ext == ".svg") return ExportFormat::Svg;
    throw usage("--out: unsupported extension '" + ext + "' (expected .csv or .svg)");
}

struct Options {
    std::string config;
    std::string state;
    std::string pressures;
    std::string dofs;
    std::string out;
    std::string grid;
    std::string target;
    std::string data;
    double tol = default_solve_tolerance;
    unsigned threads = 0;
};

inline void cmd_describe(const Assembly& a, std::ostream& out) {
    out << "FREEs: " << a.size() << "  dofs: " << dof_names(a.dofs()) << "  kinematic map: " << a.kinematics().id << "\n";
    for (const auto& act : a.actuators()) {
        const auto& d = act.design;
        const auto g = derive_geometry(d);
        const auto& pl = act.placement;
        out << d.name() << ": L=" << text::sig6(d.length()) << " m R=" << text::sig6(d.radius())
            << " m Gamma=" << text::sig6(rad_to_deg(d.fiber_angle())) << " deg p_max=" << text::sig6(d.p_max())
            << " Pa B=" << text::sig6(g.fiber_length) << " m N=" << text::sig6(g.revolutions)
            << " F/M_ratio=" << text::sig6(force_moment_ratio(d.fiber_angle())) << " d=" << joined(pl.attachment)
            << " m axis=" << joined(pl.axis) << "\n";
    }
}

inline void cmd_jacobian(const Assembly& a, const PlatformState& s, std::ostream& out) {
    const AssemblyJacobian J = assembly_jacobian(a, s);
    out << "# rows: wrench per unit pressure; F in m^2, M in m^3\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        out << a.actuator(i).design.name();
        for (auto c : all_components) {
            out << ' ' << component_name(c) << '=' << text::sig6(J(static_cast<Eigen::Index>(i), component_index(c)));
        }
        out << "\n";
    }
}

inline void cmd_zonotope(const Assembly& a, const PlatformState& s, const DofSelection& dofs,
                         const std::string& path, std::ostream& out) {
    const auto format = format_for(path);
    const Zonotope z = force_zonotope(a, s, dofs);
    export_zonotope(z, format, path);
    out << "dofs=" << dof_names(dofs) << " vertices=" << z.vertices.size();
    if (z.dimension() <= 3) out << " measure=" << text::sig6(zonotope_measure(z));
    out << " full_authority=" << (full_authority(z) ? "true" : "false") << "\n";
    const auto ranges = component_ranges(z);
    for (std::size_t j = 0; j < dofs.size(); ++j) {
        out << component_name(dofs[j]) << " range=[" << text::sig6(ranges.min(static_cast<Eigen::Index>(j))) << ", "
            << text::sig6(ranges.max(static_cast<Eigen::Index>(j))) << "]\n";
    }
}

inline void cmd_sweep(const Assembly& a, const GridSpec& grid, const DofSelection& dofs, unsigned threads,
                      const std::string& path, std::ostream& out) {
    const SweepReport rep = workspace_sweep(a, grid, dofs, threads);
    write_text_file(path, render_sweep_csv(rep));
    const auto valid = std::count_if(rep.points.begin(), rep.points.end(), [](const SweepPoint& p) { return p.valid(); });
    const auto with_authority = std::count_if(rep.points.begin(), rep.points.end(),
                                              [](const SweepPoint& p) { return p.valid() && p.contraction_authority; });
    out << "states=" << rep.points.size() << " valid=" << valid << " contraction_authority=" << with_authority << "\n";
    for (const auto& c : rep.collapses) {
        const auto& from = rep.points[c.from_index];
        const auto& to = rep.points[c.collapsed_index];
        out << "collapse " << (c.axis == SweepAxis::Dl ? "dl" : "dphi") << " between (" << text::sig6(from.state.dl)
            << ", " << text::sig6(from.state.dphi) << ") and (" << text::sig6(to.state.dl) << ", "
            << text::sig6(to.state.dphi) << "): contraction lost at " << (c.axis == SweepAxis::Dl ? "dl=" : "dphi=")
            << text::sig6(c.refined) << "\n";
    }
}

inline void cmd_solve(const Assembly& a, const PlatformState& s, const Eigen::VectorXd& target, double tol,
                      std::ostream& out) {
    const auto sol = solve_pressures(a, s, target, a.dofs(), tol);
    const Eigen::VectorXd achieved = project_wrench(net_wrench(a, s, sol.pressures), a.dofs());
    out << "feasible=" << (sol.feasible ? "true" : "false") << " residual=" << text::sig6(sol.residual) << "\n";
    out << "pressures=" << joined(sol.pressures) << "\n";
    out << "achieved " << component_list(achieved, a.dofs()) << "\n";
}

inline void cmd_analyze(const Assembly& a, const std::string& data, const std::string& path, std::ostream& out) {
    const auto records = load_measurements(read_text_file(data), a);
    const auto rep = analyze_dataset(a, records);
    write_text_file(path, render_analysis_csv(rep, a.dofs()));
    auto line = [&](const ErrorReport& e) {
        out << " N=" << e.count;
        for (std::size_t j = 0; j < a.dofs().size(); ++j) {
            const auto c = a.dofs()[j];
            out << " rmse_" << component_name(c) << "=" << text::sig6(e.rmse(static_cast<Eigen::Index>(j)))
                << " max_" << component_name(c) << "=" << text::sig6(e.max_error(static_cast<Eigen::Index>(j)));
        }
        out << "\n";
    };
    for (const auto& s : rep.per_state) {
        out << "state dl=" << text::sig6(s.state.dl) << " dphi=" << text::sig6(s.state.dphi);
        line(s.errors);
    }
    out << "overall";
    line(rep.overall);
}

} // namespace detail

/// Runs one invocation; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using namespace detail;
    CLI::App app{"Force analysis for parallel combinations of fiber-reinforced elastomeric enclosures", "freeforce"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");
    Options o;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Rig config file, or the built-in 'reference_rig'")->required();
    };
    auto add_state = [&](CLI::App* sub) {
        sub->add_option("--state", o.state, "Platform state 'dl,dphi' [m, rad]")->required()->allow_extra_args(false);
    };

    auto* describe = app.add_subcommand("describe", "Summarize a rig");
    add_config(describe);

    auto* jacobian = app.add_subcommand("jacobian", "Assembly fluid Jacobian at a state");
    add_config(jacobian);
    add_state(jacobian);

    auto* wrench = app.add_subcommand("wrench", "Net wrench for given pressures");
    add_config(wrench);
    add_state(wrench);
    wrench->add_option("--pressures", o.pressures, "Gauge pressures 'p1,...,pn' [Pa]")->required();

    auto* zonotope = app.add_subcommand("zonotope", "Attainable wrench zonotope to .csv or .svg");
    add_config(zonotope);
    add_state(zonotope);
    zonotope->add_option("--dofs", o.dofs, "Wrench components, e.g. 'Fz,Mz' (default: config dofs)");
    zonotope->add_option("--out", o.out, "Output file (.csv or .svg)")->required();

    auto* sweep = app.add_subcommand("sweep", "Workspace sweep to CSV");
    add_config(sweep);
    sweep->add_option("--grid", o.grid, "Grid 'dl=a:b:n,dphi=c:d:m'")->required();
    sweep->add_option("--dofs", o.dofs, "Wrench components (default: config dofs)");
    sweep->add_option("--threads", o.threads, "Worker threads (0: hardware concurrency)");
    sweep->add_option("--out", o.out, "Output CSV")->required();

    auto* solve = app.add_subcommand("solve", "Pressures producing a target wrench");
    add_config(solve);
    add_state(solve);
    solve->add_option("--target", o.target, "Target wrench in config dof order, SI units")->required();
    solve->add_option("--tol", o.tol, "Relative feasibility tolerance")->check(CLI::PositiveNumber);

    auto* analyze = app.add_subcommand("analyze", "Model error against a measurement CSV");
    add_config(analyze);
    analyze->add_option("--data", o.data, "Measurement CSV")->required();
    analyze->add_option("--out", o.out, "Error report CSV")->required();

    for (auto* sub : app.get_subcommands({})) sub->allow_extras(false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: UsageError: " << e.what() << "\n";
        return exit_user;
    }

    try {
        const Assembly assembly = build_assembly(load_config(o.config));
        const DofSelection dofs = o.dofs.empty() ? assembly.dofs() : parse_dofs(o.dofs);
        if (describe->parsed()) {
            cmd_describe(assembly, out);
        } else if (jacobian->parsed()) {
            cmd_jacobian(assembly, parse_state(o.state), out);
        } else if (wrench->parsed()) {
            const auto p = to_vector(parse_list("--pressures", o.pressures, assembly.size()));
            const auto w = project_wrench(net_wrench(assembly, parse_state(o.state), p), assembly.dofs());
            out << component_list(w, assembly.dofs()) << "\n";
        } else if (zonotope->parsed()) {
            cmd_zonotope(assembly, parse_state(o.state), dofs, o.out, out);
        } else if (sweep->parsed()) {
            cmd_sweep(assembly, parse_grid(o.grid), dofs, o.threads, o.out, out);
        } else if (solve->parsed()) {
            const auto t = to_vector(parse_list("--target", o.target, assembly.dofs().size()));
            cmd_solve(assembly, parse_state(o.state), t, o.tol, out);
        } else if (analyze->parsed()) {
            cmd_analyze(assembly, o.data, o.out, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::IoError ? exit_io : exit_user;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return exit_internal;
    }
    return exit_ok;
}

} // namespace freeforce::cli
