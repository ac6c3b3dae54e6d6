// Rig configuration, measurement datasets, error metrics and file export.
//
// Degrees and kPa appear only in the configuration document; everything past
// build_assembly() is SI. CSV files are UTF-8, comma separated, '.' decimal,
// LF line endings.
#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "freeforce/assembly.hpp"
#include "freeforce/errors.hpp"
#include "freeforce/force_analysis.hpp"
#include "freeforce/free_core.hpp"
#include "freeforce/number_format.hpp"

namespace freeforce {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct FreeSpec {
    std::string name;
    double length_m = 0.0;
    double radius_m = 0.0;
    double fiber_angle_deg = 0.0;
    double p_max_kpa = 0.0;

    friend bool operator==(const FreeSpec&, const FreeSpec&) = default;
};

struct PlacementSpec {
    std::string free;
    std::array<double, 3> d_m{};
    std::array<double, 3> axis{0.0, 0.0, 1.0};

    friend bool operator==(const PlacementSpec&, const PlacementSpec&) = default;
};

struct PlatformSpec {
    std::vector<std::string> dofs{"Fz", "Mz"};
    std::string kinematic_map = "coaxial";

    friend bool operator==(const PlatformSpec&, const PlatformSpec&) = default;
};

struct RigConfig {
    std::vector<FreeSpec> frees;
    std::vector<PlacementSpec> placements;
    PlatformSpec platform;

    friend bool operator==(const RigConfig&, const RigConfig&) = default;
};

/// The three-actuator test rig: one contracting counterclockwise-twisting
/// FREE (+48°), its mirror (-48°) and an extending FREE (-85°), all 100 mm
/// long with 5 mm radius, attached parallel to the end-effector z axis.
inline constexpr std::string_view reference_rig_config_text = R"({
  "frees": [
    {"name": "free_p48", "length_m": 0.1, "radius_m": 0.005, "fiber_angle_deg": 48, "p_max_kpa": 103.4},
    {"name": "free_m48", "length_m": 0.1, "radius_m": 0.005, "fiber_angle_deg": -48, "p_max_kpa": 103.4},
    {"name": "free_m85", "length_m": 0.1, "radius_m": 0.005, "fiber_angle_deg": -85, "p_max_kpa": 103.4}
  ],
  "placements": [
    {"free": "free_p48", "d_m": [0.013, 0, 0], "axis": [0, 0, 1]},
    {"free": "free_m48", "d_m": [-0.006, 0.011, 0], "axis": [0, 0, 1]},
    {"free": "free_m85", "d_m": [-0.006, -0.011, 0], "axis": [0, 0, 1]}
  ],
  "platform": {"dofs": ["Fz", "Mz"], "kinematic_map": "coaxial"}
}
)";

namespace detail {

using json = nlohmann::json;

inline std::size_t line_of_byte(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw Error(ErrorCode::ParseError, "field '" + path + key + "': unknown field");
        }
    }
}

inline const json& require_field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw Error(ErrorCode::ParseError, "field '" + path + key + "': missing");
    }
    return obj.at(key);
}

inline double number_field(const json& obj, const char* key, const std::string& path) {
    const json& v = require_field(obj, key, path);
    if (!v.is_number()) throw Error(ErrorCode::ParseError, "field '" + path + key + "': expected a number");
    return v.get<double>();
}

inline std::string string_field(const json& obj, const char* key, const std::string& path) {
    const json& v = require_field(obj, key, path);
    if (!v.is_string()) throw Error(ErrorCode::ParseError, "field '" + path + key + "': expected a string");
    return v.get<std::string>();
}

inline std::array<double, 3> vec3_field(const json& obj, const char* key, const std::string& path) {
    const json& v = require_field(obj, key, path);
    if (!v.is_array() || v.size() != 3) {
        throw Error(ErrorCode::ParseError, "field '" + path + key + "': expected an array of 3 numbers");
    }
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!v[i].is_number()) {
            throw Error(ErrorCode::ParseError, "field '" + path + key + "[" + std::to_string(i) + "]': expected a number");
        }
        out[i] = v[i].get<double>();
    }
    return out;
}

inline const json& array_field(const json& obj, const char* key, const std::string& path) {
    const json& v = require_field(obj, key, path);
    if (!v.is_array()) throw Error(ErrorCode::ParseError, "field '" + path + key + "': expected an array");
    return v;
}

} // namespace detail

/// Converts a configuration to an SI assembly. Actuators follow the order of
/// `frees`. Invariant violations raise ValidationError with the underlying
/// error as its cause.
inline Assembly build_assembly(const RigConfig& config) {
    auto invalid = [](const std::string& msg) { return Error(ErrorCode::ValidationError, msg); };
    std::map<std::string, const PlacementSpec*> by_free;
    for (const auto& pl : config.placements) {
        const bool declared = std::any_of(config.frees.begin(), config.frees.end(),
                                          [&](const FreeSpec& f) { return f.name == pl.free; });
        if (!declared) throw invalid("placement references unknown FREE '" + pl.free + "'");
        if (!by_free.emplace(pl.free, &pl).second) {
            throw invalid("FREE '" + pl.free + "' is placed more than once");
        }
    }
    try {
        std::vector<Actuator> actuators;
        for (const auto& f : config.frees) {
            const auto it = by_free.find(f.name);
            if (it == by_free.end()) throw invalid("FREE '" + f.name + "' has no placement");
            FreeDesign design(f.name, f.length_m, f.radius_m, deg_to_rad(f.fiber_angle_deg),
                              f.p_max_kpa * 1000.0);
            const auto& d = it->second->d_m;
            const auto& a = it->second->axis;
            Placement placement{Eigen::Vector3d(d[0], d[1], d[2]), Eigen::Vector3d(a[0], a[1], a[2])};
            wrench_transform(placement);
            actuators.push_back({std::move(design), placement});
        }
        DofSelection dofs;
        for (const auto& name : config.platform.dofs) {
            const auto c = parse_component(name);
            if (!c) throw invalid("platform.dofs: unknown wrench component '" + name + "'");
            dofs.push_back(*c);
        }
        const auto map = find_kinematic_map(config.platform.kinematic_map);
        if (!map) throw invalid("platform.kinematic_map: unknown map '" + config.platform.kinematic_map + "'");
        return Assembly(std::move(actuators), std::move(dofs), *map);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ValidationError) throw;
        throw Error(ErrorCode::ValidationError, e.code(), e.what());
    }
}

/// Parses and validates a rig configuration document (JSON).
inline RigConfig parse_config(std::string_view text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(detail::line_of_byte(text, e.byte == 0 ? 0 : e.byte - 1)) +
                        ": malformed document");
    }
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, "line 1: top level must be an object");
    detail::reject_unknown_keys(doc, {"frees", "placements", "platform"}, "");

    RigConfig cfg;
    const auto& frees = detail::array_field(doc, "frees", "");
    for (std::size_t i = 0; i < frees.size(); ++i) {
        const std::string path = "frees[" + std::to_string(i) + "].";
        const auto& f = frees[i];
        if (!f.is_object()) throw Error(ErrorCode::ParseError, "field 'frees[" + std::to_string(i) + "]': expected an object");
        detail::reject_unknown_keys(f, {"name", "length_m", "radius_m", "fiber_angle_deg", "p_max_kpa"}, path);
        cfg.frees.push_back({detail::string_field(f, "name", path), detail::number_field(f, "length_m", path),
                             detail::number_field(f, "radius_m", path),
                             detail::number_field(f, "fiber_angle_deg", path),
                             detail::number_field(f, "p_max_kpa", path)});
    }
    const auto& placements = detail::array_field(doc, "placements", "");
    for (std::size_t i = 0; i < placements.size(); ++i) {
        const std::string path = "placements[" + std::to_string(i) + "].";
        const auto& p = placements[i];
        if (!p.is_object()) throw Error(ErrorCode::ParseError, "field 'placements[" + std::to_string(i) + "]': expected an object");
        detail::reject_unknown_keys(p, {"free", "d_m", "axis"}, path);
        cfg.placements.push_back({detail::string_field(p, "free", path), detail::vec3_field(p, "d_m", path),
                                  detail::vec3_field(p, "axis", path)});
    }
    const auto& platform = detail::require_field(doc, "platform", "");
    if (!platform.is_object()) throw Error(ErrorCode::ParseError, "field 'platform': expected an object");
    detail::reject_unknown_keys(platform, {"dofs", "kinematic_map"}, "platform.");
    cfg.platform.dofs.clear();
    for (const auto& d : detail::array_field(platform, "dofs", "platform.")) {
        if (!d.is_string()) throw Error(ErrorCode::ParseError, "field 'platform.dofs': expected strings");
        cfg.platform.dofs.push_back(d.get<std::string>());
    }
    cfg.platform.kinematic_map = detail::string_field(platform, "kinematic_map", "platform.");

    std::set<std::string> names;
    for (const auto& f : cfg.frees) {
        if (!names.insert(f.name).second) {
            throw Error(ErrorCode::ValidationError, "duplicate FREE name '" + f.name + "'");
        }
    }
    build_assembly(cfg);
    return cfg;
}

inline std::string serialize_config(const RigConfig& cfg) {
    using detail::json;
    json doc;
    doc["frees"] = json::array();
    for (const auto& f : cfg.frees) {
        doc["frees"].push_back({{"name", f.name},
                                {"length_m", f.length_m},
                                {"radius_m", f.radius_m},
                                {"fiber_angle_deg", f.fiber_angle_deg},
                                {"p_max_kpa", f.p_max_kpa}});
    }
    doc["placements"] = json::array();
    for (const auto& p : cfg.placements) {
        doc["placements"].push_back({{"free", p.free}, {"d_m", p.d_m}, {"axis", p.axis}});
    }
    doc["platform"] = {{"dofs", cfg.platform.dofs}, {"kinematic_map", cfg.platform.kinematic_map}};
    return doc.dump(2) + "\n";
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::IoError, "failed reading '" + path.string() + "'");
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

/// Loads a configuration from a file path, or the built-in "reference_rig" when
/// no file of that name exists.
inline RigConfig load_config(const std::string& name_or_path) {
    if (std::filesystem::exists(name_or_path)) return parse_config(read_text_file(name_or_path));
    if (name_or_path == "reference_rig") return parse_config(reference_rig_config_text);
    throw Error(ErrorCode::IoError, "config '" + name_or_path + "' not found");
}

// ---------------------------------------------------------------------------
// Pressure grids
// ---------------------------------------------------------------------------

/// Every combination of level * p_max_i, lexicographic in (FREE index, level
/// index): the first FREE varies slowest.
inline std::vector<Eigen::VectorXd> pressure_grid(const Assembly& assembly, const std::vector<double>& levels) {
    for (double a : levels) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw Error(ErrorCode::ValidationError, "pressure level " + text::sig6(a) + " outside [0, 1]");
        }
    }
    const std::size_t n = assembly.size();
    const Eigen::VectorXd p_max = assembly.max_pressures();
    std::vector<Eigen::VectorXd> out;
    if (levels.empty()) return out;
    std::vector<std::size_t> digit(n, 0);
    while (true) {
        Eigen::VectorXd p(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            p(static_cast<Eigen::Index>(i)) = levels[digit[i]] * p_max(static_cast<Eigen::Index>(i));
        }
        out.push_back(std::move(p));
        std::size_t pos = n;
        while (pos > 0 && ++digit[pos - 1] == levels.size()) digit[--pos] = 0;
        if (pos == 0) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

struct MeasurementRecord {
    PlatformState state;
    Eigen::VectorXd pressures;  // [Pa], one per FREE
    Eigen::VectorXd wrench;     // selected components, platform dof order
};

inline std::string measurement_header(const Assembly& assembly) {
    std::string h = "dl_m,dphi_rad";
    for (std::size_t i = 0; i < assembly.size(); ++i) h += ",p" + std::to_string(i + 1) + "_pa";
    for (auto c : assembly.dofs()) h += "," + component_column(c);
    return h;
}

inline std::string write_measurements(const std::vector<MeasurementRecord>& records, const Assembly& assembly) {
    std::string out = measurement_header(assembly) + "\n";
    for (const auto& r : records) {
        out += text::shortest(r.state.dl) + "," + text::shortest(r.state.dphi);
        for (Eigen::Index i = 0; i < r.pressures.size(); ++i) out += "," + text::shortest(r.pressures(i));
        for (Eigen::Index i = 0; i < r.wrench.size(); ++i) out += "," + text::shortest(r.wrench(i));
        out += "\n";
    }
    return out;
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = line.find(',');
        out.push_back(line.substr(0, comma));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return out;
}

} // namespace detail

/// Parses a measurement CSV. Row numbers in errors are file line numbers (the
/// header is line 1).
inline std::vector<MeasurementRecord> load_measurements(std::string_view csv, const Assembly& assembly) {
    std::vector<MeasurementRecord> records;
    const std::string header = measurement_header(assembly);
    const std::size_t n = assembly.size();
    const std::size_t k = assembly.dofs().size();
    std::size_t line_no = 0;
    bool saw_header = false;
    while (!csv.empty()) {
        const auto nl = csv.find('\n');
        std::string_view line = csv.substr(0, nl);
        csv.remove_prefix(nl == std::string_view::npos ? csv.size() : nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!saw_header) {
            if (line != header) {
                throw Error(ErrorCode::ParseError,
                            "row 1: header '" + std::string(line) + "' does not match expected '" + header + "'");
            }
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;
        const auto cells = detail::split_commas(line);
        if (cells.size() != 2 + n + k) {
            throw Error(ErrorCode::ParseError, "row " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(2 + n + k) + " columns, got " +
                                                   std::to_string(cells.size()));
        }
        std::vector<double> values;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = text::parse_double(cells[c]);
            if (!v) {
                throw Error(ErrorCode::ParseError, "row " + std::to_string(line_no) + ": malformed number '" +
                                                       std::string(cells[c]) + "' in column " + std::to_string(c + 1));
            }
            values.push_back(*v);
        }
        MeasurementRecord r;
        r.state = {values[0], values[1]};
        r.pressures.resize(static_cast<Eigen::Index>(n));
        r.wrench.resize(static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < n; ++i) {
            const double p = values[2 + i];
            const auto& design = assembly.actuator(i).design;
            if (p < 0.0) {
                throw Error(ErrorCode::NegativePressure, "row " + std::to_string(line_no) + ": '" + design.name() +
                                                             "' pressure " + text::sig6(p) + " Pa is negative");
            }
            if (p > design.p_max()) {
                throw Error(ErrorCode::PressureLimit, "row " + std::to_string(line_no) + ": '" + design.name() +
                                                          "' pressure " + text::sig6(p) + " Pa exceeds p_max " +
                                                          text::sig6(design.p_max()) + " Pa");
            }
            r.pressures(static_cast<Eigen::Index>(i)) = p;
        }
        for (std::size_t j = 0; j < k; ++j) r.wrench(static_cast<Eigen::Index>(j)) = values[2 + n + j];
        records.push_back(std::move(r));
    }
    if (!saw_header) throw Error(ErrorCode::ParseError, "row 1: missing header");
    return records;
}

inline constexpr double baseline_state_tolerance = 1e-9;

inline bool same_state(const PlatformState& a, const PlatformState& b) {
    return std::abs(a.dl - b.dl) <= baseline_state_tolerance &&
           std::abs(a.dphi - b.dphi) <= baseline_state_tolerance;
}

/// Replaces each measured wrench by f_meas(x, p) - f_meas(x, 0), isolating
/// the pressure-driven part. The first all-zero-pressure record at a matching
/// state serves as that state's baseline.
inline std::vector<MeasurementRecord> baseline_subtract(const std::vector<MeasurementRecord>& records) {
    std::vector<const MeasurementRecord*> baselines;
    for (const auto& r : records) {
        if ((r.pressures.array() == 0.0).all()) {
            const bool known = std::any_of(baselines.begin(), baselines.end(),
                                           [&](const MeasurementRecord* b) { return same_state(b->state, r.state); });
            if (!known) baselines.push_back(&r);
        }
    }
    std::vector<MeasurementRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        const auto it = std::find_if(baselines.begin(), baselines.end(),
                                     [&](const MeasurementRecord* b) { return same_state(b->state, r.state); });
        if (it == baselines.end()) {
            throw Error(ErrorCode::MissingBaseline, "no zero-pressure record at state dl=" + text::sig6(r.state.dl) +
                                                        " m, dphi=" + text::sig6(r.state.dphi) + " rad");
        }
        if ((*it)->wrench.size() != r.wrench.size()) {
            throw Error(ErrorCode::DimensionMismatch, "baseline and record wrench sizes differ");
        }
        MeasurementRecord active = r;
        active.wrench = r.wrench - (*it)->wrench;
        out.push_back(std::move(active));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Error metrics
// ---------------------------------------------------------------------------

struct ErrorReport {
    Eigen::VectorXd rmse;       // per component
    Eigen::VectorXd max_error;  // max |pred - meas| per component
    std::size_t count = 0;
};

inline ErrorReport error_metrics(const std::vector<Eigen::VectorXd>& predicted,
                                 const std::vector<Eigen::VectorXd>& measured) {
    if (predicted.size() != measured.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(predicted.size()) + " predictions vs " +
                                                   std::to_string(measured.size()) + " measurements");
    }
    if (predicted.empty()) throw Error(ErrorCode::EmptyInput, "no evaluation points");
    const Eigen::Index k = predicted.front().size();
    ErrorReport rep;
    rep.count = predicted.size();
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(k);
    rep.max_error = Eigen::VectorXd::Zero(k);
    for (std::size_t j = 0; j < predicted.size(); ++j) {
        if (predicted[j].size() != k || measured[j].size() != k) {
            throw Error(ErrorCode::DimensionMismatch, "entry " + std::to_string(j) + " has a different component count");
        }
        const Eigen::VectorXd e = predicted[j] - measured[j];
        sum_sq += e.cwiseProduct(e);
        rep.max_error = rep.max_error.cwiseMax(e.cwiseAbs());
    }
    rep.rmse = (sum_sq / static_cast<double>(rep.count)).cwiseSqrt();
    return rep;
}

/// Error report for one commanded state, plus the state it belongs to.
struct StateErrorReport {
    PlatformState state;
    ErrorReport errors;
};

struct AnalysisReport {
    std::vector<StateErrorReport> per_state;  // in order of first appearance
    ErrorReport overall;
};

/// Baseline-subtracts the records, predicts each with net_wrench at its
/// state and pressures, and compares.
inline AnalysisReport analyze_dataset(const Assembly& assembly, const std::vector<MeasurementRecord>& records) {
    const auto active = baseline_subtract(records);
    std::vector<Eigen::VectorXd> pred;
    std::vector<Eigen::VectorXd> meas;
    std::vector<std::size_t> group;
    std::vector<PlatformState> states;
    for (const auto& r : active) {
        pred.push_back(project_wrench(net_wrench(assembly, r.state, r.pressures), assembly.dofs()));
        meas.push_back(r.wrench);
        auto it = std::find_if(states.begin(), states.end(), [&](const PlatformState& s) { return same_state(s, r.state); });
        if (it == states.end()) {
            states.push_back(r.state);
            group.push_back(states.size() - 1);
        } else {
            group.push_back(static_cast<std::size_t>(it - states.begin()));
        }
    }
    AnalysisReport rep;
    rep.overall = error_metrics(pred, meas);
    for (std::size_t s = 0; s < states.size(); ++s) {
        std::vector<Eigen::VectorXd> p;
        std::vector<Eigen::VectorXd> m;
        for (std::size_t j = 0; j < pred.size(); ++j) {
            if (group[j] == s) {
                p.push_back(pred[j]);
                m.push_back(meas[j]);
            }
        }
        rep.per_state.push_back({states[s], error_metrics(p, m)});
    }
    return rep;
}

inline std::string render_analysis_csv(const AnalysisReport& rep, const DofSelection& dofs) {
    std::string out = "scope,dl_m,dphi_rad,count";
    for (auto c : dofs) out += ",rmse_" + component_column(c);
    for (auto c : dofs) out += ",max_" + component_column(c);
    out += "\n";
    auto row = [&](const std::string& prefix, const ErrorReport& e) {
        out += prefix + "," + std::to_string(e.count);
        for (Eigen::Index i = 0; i < e.rmse.size(); ++i) out += "," + text::shortest(e.rmse(i));
        for (Eigen::Index i = 0; i < e.max_error.size(); ++i) out += "," + text::shortest(e.max_error(i));
        out += "\n";
    };
    for (const auto& s : rep.per_state) {
        row("state," + text::shortest(s.state.dl) + "," + text::shortest(s.state.dphi), s.errors);
    }
    row("all,,", rep.overall);
    return out;
}

// ---------------------------------------------------------------------------
// Zonotope and sweep export
// ---------------------------------------------------------------------------

enum class ExportFormat { Csv, Svg };

namespace detail {

inline std::string axis_column(const Zonotope& z, Eigen::Index j) {
    if (!z.dofs.empty()) return component_column(z.dofs[static_cast<std::size_t>(j)]);
    return "c" + std::to_string(j + 1);
}

inline std::string axis_label(const Zonotope& z, Eigen::Index j) {
    if (z.dofs.empty()) return "c" + std::to_string(j + 1);
    const auto c = z.dofs[static_cast<std::size_t>(j)];
    return std::string(component_name(c)) + " (" + std::string(component_unit(c)) + ")";
}

} // namespace detail

/// Header, then vertex rows (hull order), then generator rows.
inline std::string render_zonotope_csv(const Zonotope& z) {
    std::string out = "kind,index";
    for (Eigen::Index j = 0; j < z.dimension(); ++j) out += "," + detail::axis_column(z, j);
    out += "\n";
    for (std::size_t i = 0; i < z.vertices.size(); ++i) {
        out += "vertex," + std::to_string(i);
        for (Eigen::Index j = 0; j < z.dimension(); ++j) out += "," + text::shortest(z.vertices[i](j));
        out += "\n";
    }
    for (Eigen::Index i = 0; i < z.generator_count(); ++i) {
        out += "generator," + std::to_string(i);
        for (Eigen::Index j = 0; j < z.dimension(); ++j) out += "," + text::shortest(z.generators(j, i));
        out += "\n";
    }
    return out;
}

inline constexpr std::array<std::string_view, 8> generator_palette{
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

/// SVG 1.1 plot of a 1- or 2-dimensional zonotope: filled hull, generator
/// arrows from the origin colored by FREE index, and labelled axes.
inline std::string render_zonotope_svg(const Zonotope& z) {
    const Eigen::Index k = z.dimension();
    if (k < 1 || k > 2) {
        throw Error(ErrorCode::WrongDimension, "SVG export supports 1 or 2 dimensions, got " + std::to_string(k));
    }
    constexpr double width = 640.0;
    constexpr double height = 480.0;
    constexpr double margin = 60.0;

    auto coord = [&](const Eigen::VectorXd& v) {
        return std::array<double, 2>{v(0), k == 2 ? v(1) : 0.0};
    };
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};
    auto extend = [&](const std::array<double, 2>& p) {
        for (int a = 0; a < 2; ++a) {
            lo[static_cast<std::size_t>(a)] = std::min(lo[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(a)]);
            hi[static_cast<std::size_t>(a)] = std::max(hi[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(a)]);
        }
    };
    for (const auto& v : z.vertices) extend(coord(v));
    for (Eigen::Index i = 0; i < z.generator_count(); ++i) extend(coord(z.generators.col(i)));
    for (std::size_t a = 0; a < 2; ++a) {
        double span = hi[a] - lo[a];
        if (span <= 0.0) span = 1.0;
        lo[a] -= 0.1 * span;
        hi[a] += 0.1 * span;
    }
    auto px = [&](double x) { return margin + (x - lo[0]) / (hi[0] - lo[0]) * (width - 2 * margin); };
    auto py = [&](double y) { return height - margin - (y - lo[1]) / (hi[1] - lo[1]) * (height - 2 * margin); };
    auto f = [](double v) { return text::fixed(v, 2); };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
    s += "<defs>\n";
    for (Eigen::Index i = 0; i < z.generator_count(); ++i) {
        const auto color = generator_palette[static_cast<std::size_t>(i) % generator_palette.size()];
        s += "<marker id=\"arrow" + std::to_string(i) +
             "\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"8\" markerHeight=\"8\" orient=\"auto\">"
             "<path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"" + std::string(color) + "\"/></marker>\n";
    }
    s += "</defs>\n";
    s += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
    s += "<line x1=\"" + f(margin) + "\" y1=\"" + f(py(0.0)) + "\" x2=\"" + f(width - margin) + "\" y2=\"" + f(py(0.0)) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    s += "<line x1=\"" + f(px(0.0)) + "\" y1=\"" + f(margin) + "\" x2=\"" + f(px(0.0)) + "\" y2=\"" + f(height - margin) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    if (k == 2 && z.vertices.size() >= 3) {
        s += "<polygon points=\"";
        for (std::size_t i = 0; i < z.vertices.size(); ++i) {
            const auto p = coord(z.vertices[i]);
            if (i) s += " ";
            s += f(px(p[0])) + "," + f(py(p[1]));
        }
        s += "\" fill=\"#808080\" fill-opacity=\"0.3\" stroke=\"black\" stroke-width=\"1\"/>\n";
    } else if (z.vertices.size() >= 2) {
        const auto a = coord(z.vertices.front());
        const auto b = coord(z.vertices.back());
        s += "<polyline points=\"" + f(px(a[0])) + "," + f(py(a[1])) + " " + f(px(b[0])) + "," + f(py(b[1])) +
             "\" fill=\"none\" stroke=\"#808080\" stroke-opacity=\"0.3\" stroke-width=\"6\"/>\n";
    }
    for (Eigen::Index i = 0; i < z.generator_count(); ++i) {
        const auto g = coord(z.generators.col(i));
        const auto color = generator_palette[static_cast<std::size_t>(i) % generator_palette.size()];
        s += "<line x1=\"" + f(px(0.0)) + "\" y1=\"" + f(py(0.0)) + "\" x2=\"" + f(px(g[0])) + "\" y2=\"" + f(py(g[1])) +
             "\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" marker-end=\"url(#arrow" + std::to_string(i) +
             ")\"/>\n";
    }
    s += "<text x=\"" + f(width - margin) + "\" y=\"" + f(height - margin / 3.0) +
         "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"end\">" + detail::axis_label(z, 0) + "</text>\n";
    if (k == 2) {
        s += "<text x=\"" + f(margin / 3.0) + "\" y=\"" + f(margin) +
             "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"start\" transform=\"rotate(-90 " +
             f(margin / 3.0) + " " + f(margin) + ")\">" + detail::axis_label(z, 1) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

inline void export_zonotope(const Zonotope& z, ExportFormat format, const std::filesystem::path& path) {
    write_text_file(path, format == ExportFormat::Csv ? render_zonotope_csv(z) : render_zonotope_svg(z));
}

inline std::string render_sweep_csv(const SweepReport& report) {
    std::string out = "index,dl_m,dphi_rad,valid,verdict,offending_free,measure";
    for (auto c : report.dofs) out += ",min_" + component_column(c) + ",max_" + component_column(c);
    out += ",contraction_Fz_N,contraction_authority,full_authority\n";
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const auto& p = report.points[i];
        out += std::to_string(i) + "," + text::shortest(p.state.dl) + "," + text::shortest(p.state.dphi) + ",";
        out += p.valid() ? "1," : "0,";
        out += std::string(verdict_name(p.verdict)) + "," + p.offending_free + ",";
        out += p.measure ? text::shortest(*p.measure) : "";
        for (std::size_t j = 0; j < report.dofs.size(); ++j) {
            if (p.valid()) {
                out += "," + text::shortest(p.min_force(static_cast<Eigen::Index>(j))) + "," +
                       text::shortest(p.max_force(static_cast<Eigen::Index>(j)));
            } else {
                out += ",,";
            }
        }
        if (p.valid()) {
            out += "," + text::shortest(p.contraction) + (p.contraction_authority ? ",1" : ",0") +
                   (p.full_authority ? ",1" : ",0");
        } else {
            out += ",,,";
        }
        out += "\n";
    }
    return out;
}

} // namespace freeforce
