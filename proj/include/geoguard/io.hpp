// Scenario documents (JSON), the reference simulation preset, and the
// tab-separated result tables.
//
// Scenario document, schema_version 1 (lengths in meters):
//
//   {
//     "schema_version": 1,
//     "signal":  {"P0": 1, "D0": 100000, "gamma": 2},
//     "margins": {"upsilon1": 1, "upsilon2": 1},          optional
//     "kappa": 0.005,                                     optional
//     "roi":     {"center": [0, 100000], "radius": 7500},
//     "target":  [0, 100000],
//     "defaults": {"threshold": 1,                        optional
//                  "noise": {"kind": "gaussian", "location": 0, "scale": 1}},
//     "sensors": [
//       {"id": 1, "position": [-990, 0]},                 id optional
//       {"linspace": {"count": 10, "start": [-990, 0], "end": [-900, 0]}},
//       {"position": [-1000, 0], "secure": true, "threshold": 1, "noise": {...}}
//     ],
//     "attacks": [                                        optional
//       {"ids": [1, 2, 3], "type": "mima", "psi0": 0, "psi1": 0.0105},
//       {"range": [4, 10], "type": "psi_offset", "psi": -0.01},
//       {"range": [11, 11], "type": "spoof", "bias": 0.2}
//     ],
//     "experiment": {"delta": 280, "trials": 36,          optional CLI defaults
//                    "K_grid": [20000, 40000], "seed": 1}
//   }
//
// Sensors without an id get the next integer after the largest id so far,
// starting at 1. Linspace blocks accept "first_id" and the per-sensor keys.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoguard/analysis.hpp"
#include "geoguard/attacks.hpp"
#include "geoguard/detector.hpp"
#include "geoguard/errors.hpp"
#include "geoguard/montecarlo.hpp"
#include "geoguard/scenario.hpp"

namespace geoguard {

inline constexpr int scenario_schema_version = 1;

struct ExperimentDefaults {
    std::optional<double> delta;
    std::optional<std::size_t> trials;
    std::vector<std::size_t> k_grid;
    std::optional<std::uint64_t> seed;
};

struct ScenarioFile {
    ScenarioConfig scenario;
    AttackAssignment attacks;
    ExperimentDefaults experiment;
};

namespace detail {

using json = nlohmann::ordered_json;

inline const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ParseError("expected an object", path);
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError("missing field", path + "." + key);
    return *it;
}

inline double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError("expected a number", path);
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ParseError("expected a finite number", path);
    return x;
}

inline long long as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ParseError("expected an integer", path);
    return v.get<long long>();
}

inline std::size_t as_count(const json& v, const std::string& path) {
    const long long n = as_integer(v, path);
    if (n < 1) throw ParseError("expected a positive integer", path);
    return static_cast<std::size_t>(n);
}

inline double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
    const auto it = obj.find(key);
    return it == obj.end() ? fallback : as_number(*it, path + "." + key);
}

inline Point as_point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) throw ParseError("expected [x, y]", path);
    return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
}

inline NoiseModel as_noise(const json& v, const NoiseModel& fallback, const std::string& path) {
    if (!v.is_object()) throw ParseError("expected an object", path);
    NoiseModel m = fallback;
    if (const auto it = v.find("kind"); it != v.end()) {
        if (!it->is_string()) throw ParseError("expected a string", path + ".kind");
        try {
            m.kind = noise_kind_from_string(it->get<std::string>());
        } catch (const DomainError& e) {
            throw ParseError(e.what(), path + ".kind");
        }
    }
    m.location = number_or(v, "location", m.location, path);
    m.scale = number_or(v, "scale", m.scale, path);
    if (!(m.scale > 0.0)) throw ParseError("noise scale must be positive", path + ".scale");
    return m;
}

inline AttackSpec as_attack(const json& v, const std::string& path) {
    const json& type = require(v, "type", path);
    if (!type.is_string()) throw ParseError("expected a string", path + ".type");
    const auto name = type.get<std::string>();
    AttackSpec spec;
    if (name == "none") spec = NoAttack{};
    else if (name == "mima")
        spec = Mima{number_or(v, "psi0", 0.0, path), number_or(v, "psi1", 0.0, path)};
    else if (name == "psi_offset")
        spec = PsiOffset{as_number(require(v, "psi", path), path + ".psi")};
    else if (name == "spoof")
        spec = SpoofBias{as_number(require(v, "bias", path), path + ".bias")};
    else throw ParseError("unknown attack type '" + name + "'", path + ".type");
    try {
        validate(spec);
    } catch (const DomainError& e) {
        throw ParseError(e.what(), path);
    }
    return spec;
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace detail

/// Builds a scenario from a parsed document. Structural problems become
/// ParseError (naming the field) or InvalidScenario.
inline ScenarioFile scenario_from_json(const nlohmann::ordered_json& doc) {
    using detail::as_number;
    using detail::require;
    if (!doc.is_object()) throw ParseError("document must be an object", "$");
    const auto version = detail::as_integer(require(doc, "schema_version", "$"), "$.schema_version");
    if (version != scenario_schema_version) {
        throw ParseError("unsupported schema_version " + std::to_string(version), "$.schema_version");
    }
    ScenarioFile out;
    ScenarioConfig& s = out.scenario;

    const auto& signal = require(doc, "signal", "$");
    s.p0 = as_number(require(signal, "P0", "$.signal"), "$.signal.P0");
    s.d0 = as_number(require(signal, "D0", "$.signal"), "$.signal.D0");
    s.gamma = as_number(require(signal, "gamma", "$.signal"), "$.signal.gamma");
    if (const auto it = doc.find("margins"); it != doc.end()) {
        s.upsilon1 = detail::number_or(*it, "upsilon1", s.upsilon1, "$.margins");
        s.upsilon2 = detail::number_or(*it, "upsilon2", s.upsilon2, "$.margins");
    }
    s.kappa = detail::number_or(doc, "kappa", s.kappa, "$");

    const auto& roi = require(doc, "roi", "$");
    s.roi.center = detail::as_point(require(roi, "center", "$.roi"), "$.roi.center");
    s.roi.radius = as_number(require(roi, "radius", "$.roi"), "$.roi.radius");
    s.target = detail::as_point(require(doc, "target", "$"), "$.target");

    double default_threshold = 1.0;
    NoiseModel default_noise;
    if (const auto it = doc.find("defaults"); it != doc.end()) {
        default_threshold = detail::number_or(*it, "threshold", default_threshold, "$.defaults");
        if (const auto n = it->find("noise"); n != it->end()) {
            default_noise = detail::as_noise(*n, default_noise, "$.defaults.noise");
        }
    }

    const auto& sensors = require(doc, "sensors", "$");
    if (!sensors.is_array()) throw ParseError("expected an array", "$.sensors");
    int next_id = 1;
    const auto make = [&](const detail::json& entry, const std::string& path) {
        SensorSpec sensor;
        sensor.threshold = detail::number_or(entry, "threshold", default_threshold, path);
        sensor.noise = default_noise;
        if (const auto n = entry.find("noise"); n != entry.end()) {
            sensor.noise = detail::as_noise(*n, default_noise, path + ".noise");
        }
        if (const auto sec = entry.find("secure"); sec != entry.end()) {
            if (!sec->is_boolean()) throw ParseError("expected a boolean", path + ".secure");
            sensor.secure = sec->get<bool>();
        }
        return sensor;
    };
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const std::string path = "$.sensors[" + std::to_string(i) + "]";
        const auto& entry = sensors[i];
        if (!entry.is_object()) throw ParseError("expected an object", path);
        if (const auto ls = entry.find("linspace"); ls != entry.end()) {
            const std::string lp = path + ".linspace";
            const std::size_t count = detail::as_count(require(*ls, "count", lp), lp + ".count");
            const Point a = detail::as_point(require(*ls, "start", lp), lp + ".start");
            const Point b = detail::as_point(require(*ls, "end", lp), lp + ".end");
            if (const auto f = ls->find("first_id"); f != ls->end()) {
                next_id = static_cast<int>(detail::as_integer(*f, lp + ".first_id"));
            }
            for (std::size_t m = 0; m < count; ++m) {
                SensorSpec sensor = make(entry, path);
                const double frac = count == 1 ? 0.0 : static_cast<double>(m) / static_cast<double>(count - 1);
                sensor.position = a + frac * (b - a);
                sensor.id = next_id++;
                s.sensors.push_back(sensor);
            }
        } else {
            SensorSpec sensor = make(entry, path);
            sensor.position = detail::as_point(require(entry, "position", path), path + ".position");
            if (const auto id = entry.find("id"); id != entry.end()) {
                sensor.id = static_cast<int>(detail::as_integer(*id, path + ".id"));
            } else {
                sensor.id = next_id;
            }
            next_id = std::max(next_id, sensor.id + 1);
            s.sensors.push_back(sensor);
        }
    }
    validate_scenario(s);

    if (const auto it = doc.find("attacks"); it != doc.end()) {
        if (!it->is_array()) throw ParseError("expected an array", "$.attacks");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "$.attacks[" + std::to_string(i) + "]";
            const auto& entry = (*it)[i];
            const AttackSpec spec = detail::as_attack(entry, path);
            std::vector<int> ids;
            if (const auto r = entry.find("range"); r != entry.end()) {
                if (!r->is_array() || r->size() != 2) throw ParseError("expected [first, last]", path + ".range");
                const auto lo = detail::as_integer((*r)[0], path + ".range[0]");
                const auto hi = detail::as_integer((*r)[1], path + ".range[1]");
                if (lo > hi) throw ParseError("empty id range", path + ".range");
                for (auto id = lo; id <= hi; ++id) ids.push_back(static_cast<int>(id));
            } else {
                const auto& list = require(entry, "ids", path);
                if (!list.is_array()) throw ParseError("expected an array", path + ".ids");
                for (std::size_t k = 0; k < list.size(); ++k) {
                    ids.push_back(static_cast<int>(
                        detail::as_integer(list[k], path + ".ids[" + std::to_string(k) + "]")));
                }
            }
            for (const int id : ids) {
                try {
                    s.index_of(id);
                } catch (const MissingSensorData&) {
                    throw ParseError("unknown sensor id " + std::to_string(id), path);
                }
                out.attacks.set(id, spec);
            }
        }
        out.attacks.validate_against(s);
    }

    if (const auto it = doc.find("experiment"); it != doc.end()) {
        const std::string path = "$.experiment";
        if (!it->is_object()) throw ParseError("expected an object", path);
        if (const auto d = it->find("delta"); d != it->end()) out.experiment.delta = as_number(*d, path + ".delta");
        if (const auto t = it->find("trials"); t != it->end()) out.experiment.trials = detail::as_count(*t, path + ".trials");
        if (const auto sd = it->find("seed"); sd != it->end()) {
            if (!sd->is_number_integer() || (!sd->is_number_unsigned() && sd->get<long long>() < 0)) {
                throw ParseError("expected a non-negative integer", path + ".seed");
            }
            out.experiment.seed = sd->get<std::uint64_t>();
        }
        if (const auto kg = it->find("K_grid"); kg != it->end()) {
            if (!kg->is_array()) throw ParseError("expected an array", path + ".K_grid");
            for (std::size_t k = 0; k < kg->size(); ++k) {
                out.experiment.k_grid.push_back(
                    detail::as_count((*kg)[k], path + ".K_grid[" + std::to_string(k) + "]"));
            }
        }
    }
    return out;
}

inline ScenarioFile parse_scenario(const std::string& text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), "line " + std::to_string(detail::line_of(text, e.byte)));
    }
    return scenario_from_json(doc);
}

inline ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file", path);
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    try {
        return parse_scenario(text);
    } catch (const ParseError& e) {
        throw ParseError(e.what(), path);
    }
}

// -----------------------------------------------------------------------------
// Reference preset: two secure sensors at (-1000, 0) and (1000, 0), two groups
// of 250 sensors evenly spaced next to them, ROI of radius 7500 m around the
// target at (0, 1e5), unit-variance Gaussian noise, threshold 1, and the first
// group attacked by a 1 -> 0 flip channel. `scale` shrinks the group size and
// the trial count, never K.
// -----------------------------------------------------------------------------

inline nlohmann::ordered_json paper_setup_json(double scale, double psi1 = 0.0105) {
    if (!(scale > 0.0 && scale <= 1.0)) throw DomainError("scale must lie in (0, 1]");
    const auto per_group = static_cast<long long>(std::llround(250.0 * scale));
    const auto trials = static_cast<long long>(std::llround(900.0 * scale));
    if (per_group < 1 || trials < 1) throw DomainError("scale too small for at least one sensor per group");
    const double step = 100.0 / static_cast<double>(per_group);
    const long long n = 2 * per_group;

    using json = nlohmann::ordered_json;
    json doc;
    doc["schema_version"] = scenario_schema_version;
    doc["signal"] = {{"P0", 1.0}, {"D0", 1e5}, {"gamma", 2.0}};
    doc["margins"] = {{"upsilon1", 1.0}, {"upsilon2", 1.0}};
    doc["kappa"] = 0.005;
    doc["roi"] = {{"center", {0.0, 1e5}}, {"radius", 7500.0}};
    doc["target"] = {0.0, 1e5};
    doc["defaults"] = {{"threshold", 1.0},
                       {"noise", {{"kind", "gaussian"}, {"location", 0.0}, {"scale", 1.0}}}};
    doc["sensors"] = json::array({
        {{"linspace", {{"count", per_group}, {"start", {-1000.0 + step, 0.0}}, {"end", {-900.0, 0.0}}}}},
        {{"linspace", {{"count", per_group}, {"start", {900.0, 0.0}}, {"end", {1000.0 - step, 0.0}}}}},
        {{"id", n + 1}, {"position", {-1000.0, 0.0}}, {"secure", true}},
        {{"id", n + 2}, {"position", {1000.0, 0.0}}, {"secure", true}},
    });
    doc["attacks"] = json::array(
        {{{"range", {1, per_group}}, {"type", "mima"}, {"psi0", 0.0}, {"psi1", psi1}}});
    doc["experiment"] = {{"delta", 280.0},
                         {"trials", trials},
                         {"K_grid", {20000, 40000, 60000, 80000, 100000}},
                         {"seed", 1}};
    return doc;
}

inline ScenarioFile paper_preset(double scale, double psi1 = 0.0105) {
    return scenario_from_json(paper_setup_json(scale, psi1));
}

// -----------------------------------------------------------------------------
// Tables
// -----------------------------------------------------------------------------

/// Shortest round-trip decimal; "NA" for absent values.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int precision = 6; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline void write_detection_tsv(std::ostream& os, const DetectionReport& report) {
    os << "sensor_id\tdecision\tD_hat\tclamped\tmethod\tdelta\n";
    for (const SensorDecision& d : report.decisions) {
        os << d.id << '\t' << d.decision << '\t' << format_number(d.d_hat) << '\t'
           << (d.clamped ? 1 : 0) << '\t' << to_string(report.method) << '\t'
           << format_number(report.delta) << '\n';
    }
}

inline void write_rates_tsv(std::ostream& os, const RateReport& report,
                            const std::vector<std::size_t>& k_grid) {
    os << "j\tK\teta0\teta1\tfa_bound\tmiss_bound\n";
    for (const CompositeRates& c : report.composite) {
        for (const std::size_t k : k_grid) {
            const auto kk = static_cast<double>(k);
            os << c.id << '\t' << k << '\t' << format_number(c.eta0) << '\t'
               << format_number(c.eta1) << '\t' << format_number(report.fa_bound(c.id, kk)) << '\t'
               << format_number(report.miss_bound(c.id, kk)) << '\n';
        }
    }
}

inline void write_metrics_tsv(std::ostream& os, const std::vector<Metrics>& curves) {
    os << "K\tdelta\tfa_hat\tfa_se\tmiss_hat\tmiss_se\tavg_err\tavg_err_se\tfa_bound\tmiss_bound\tpe_bound\n";
    for (const Metrics& m : curves) {
        for (const MetricsRow& r : m.rows) {
            os << r.k << '\t' << format_number(r.delta) << '\t' << format_number(r.fa_hat) << '\t'
               << format_number(r.fa_se) << '\t' << format_number(r.miss_hat) << '\t'
               << format_number(r.miss_se) << '\t' << format_number(r.avg_err) << '\t'
               << format_number(r.avg_err_se) << '\t' << format_number(r.fa_bound) << '\t'
               << format_number(r.miss_bound) << '\t' << format_number(r.pe_bound) << '\n';
        }
    }
}

}  // namespace geoguard
