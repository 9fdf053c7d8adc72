#pragma once

// Run configuration (strict JSON), report serialization and output files.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bloch.hpp"
#include "constructions.hpp"
#include "core.hpp"
#include "domain.hpp"
#include "ifs.hpp"
#include "maps.hpp"

namespace hypiter {

using Json = nlohmann::json;

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> names{"bloch", "ifs-run", "construct-t7", "construct-t8",
                                                "dw", "verify-lemmas", "qc"};
    return names;
}

namespace detail {

enum class FieldType { Text, DomainSpec, MapSpec, Count, Number, Complex, NumberList, ComplexList, Grid };

struct Field {
    FieldType type;
    Json fallback;  // null: optional without default
    bool required = false;
};

using Schema = std::map<std::string, Field>;

inline Json grid_default() { return Json{{"radius", 1.2}, {"rings", 24}, {"angles", 24}}; }

inline const Schema& schema_for(const std::string& command) {
    static const std::map<std::string, Schema> schemas = [] {
        const Schema common{{"command", {FieldType::Text, nullptr, true}},
                            {"seed", {FieldType::Count, 0}},
                            {"out", {FieldType::Text, "out"}}};
        const auto with = [&](Schema extra) {
            extra.insert(common.begin(), common.end());
            return extra;
        };
        std::map<std::string, Schema> s;
        s["bloch"] = with({{"domain", {FieldType::DomainSpec, nullptr, true}},
                           {"depth", {FieldType::Number, 5.0}},
                           {"ring_step", {FieldType::Number, 0.25}},
                           {"verify_samples", {FieldType::Count, 10000}}});
        s["qc"] = with({{"domain", {FieldType::DomainSpec, nullptr, true}},
                        {"K", {FieldType::NumberList, Json::array({1.0, 2.0, 4.0})}},
                        {"depth", {FieldType::Number, 5.0}},
                        {"ring_step", {FieldType::Number, 0.25}},
                        {"verify_samples", {FieldType::Count, 10000}}});
        s["ifs-run"] = with({{"domain", {FieldType::DomainSpec, "disk(0,0,0.3)"}},
                             {"map", {FieldType::MapSpec, nullptr}},
                             {"N", {FieldType::Count, 50}},
                             {"tol", {FieldType::Number, 1e-8}},
                             {"marked", {FieldType::ComplexList, Json::array()}},
                             {"probe", {FieldType::Grid, grid_default()}},
                             {"grid", {FieldType::Grid, grid_default()}}});
        s["construct-t7"] = with({{"domain", {FieldType::DomainSpec, "horodisk(0,0.5)"}},
                                  {"a0", {FieldType::Complex, Json::array({0.5, 0.0})}},
                                  {"rho_x", {FieldType::Number, 0.3}},
                                  {"w0", {FieldType::Complex, nullptr}},
                                  {"N", {FieldType::Count, 20}},
                                  {"tol", {FieldType::Number, 1e-8}},
                                  {"probe", {FieldType::Grid, grid_default()}},
                                  {"grid", {FieldType::Grid, grid_default()}}});
        s["construct-t8"] = with({{"domain", {FieldType::DomainSpec, "horodisk(0,0.5)"}},
                                  {"a", {FieldType::Complex, Json::array({0.5, 0.0})}},
                                  {"a1", {FieldType::Complex, Json::array({0.7, 0.0})}},
                                  {"N", {FieldType::Count, 12}},
                                  {"tol", {FieldType::Number, 1e-8}},
                                  {"probe", {FieldType::Grid, grid_default()}},
                                  {"grid", {FieldType::Grid, grid_default()}}});
        s["dw"] = with({{"map", {FieldType::MapSpec, nullptr, true}},
                        {"z0", {FieldType::Complex, Json::array({0.0, 0.0})}},
                        {"N", {FieldType::Count, 1000}},
                        {"tol", {FieldType::Number, 1e-10}}});
        s["verify-lemmas"] = with({{"lemma", {FieldType::Text, "all"}},
                                   {"C", {FieldType::NumberList, Json::array({2.0, 4.0, 8.0})}},
                                   {"samples", {FieldType::Count, 2000}},
                                   {"c", {FieldType::Complex, Json::array({0.3, 0.0})}},
                                   {"moduli", {FieldType::NumberList, Json::array({0.9, 0.99, 0.999})}}});
        return s;
    }();
    const auto it = schemas.find(command);
    if (it == schemas.end()) throw PreconditionError("unknown command '" + command + "'");
    return it->second;
}

// "line L, column C" of the first `"key":` in text, for error messages.
inline std::string locate_key(std::string_view text, const std::string& key) {
    const std::string quoted = "\"" + key + "\"";
    std::size_t pos = 0;
    while ((pos = text.find(quoted, pos)) != std::string_view::npos) {
        std::size_t after = pos + quoted.size();
        while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
        if (after < text.size() && text[after] == ':') break;
        pos += quoted.size();
    }
    if (pos == std::string_view::npos) return "";
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
        if (text[i] == '\n') ++line, col = 1;
        else ++col;
    }
    return " at line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline bool is_complex(const Json& v) {
    return v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number();
}

inline void check_field(const std::string& key, const Field& f, const Json& v, std::string_view text) {
    const auto bad = [&](const std::string& what) {
        throw PreconditionError("config key '" + key + "'" + locate_key(text, key) + ": " + what);
    };
    switch (f.type) {
        case FieldType::Text:
            if (!v.is_string()) bad("expected a string");
            break;
        case FieldType::DomainSpec:
            if (!v.is_string()) bad("expected a domain spec string");
            try {
                (void)parse_domain(v.get<std::string>());
            } catch (const PreconditionError& e) {
                bad(e.what());
            }
            break;
        case FieldType::MapSpec:
            if (!v.is_string()) bad("expected a map spec string");
            try {
                (void)parse_map(v.get<std::string>());
            } catch (const PreconditionError& e) {
                bad(e.what());
            }
            break;
        case FieldType::Count:
            if (!v.is_number_unsigned()) bad("expected a non-negative integer");
            break;
        case FieldType::Number:
            if (!v.is_number()) bad("expected a number");
            break;
        case FieldType::Complex:
            if (!is_complex(v)) bad("expected [re, im]");
            break;
        case FieldType::NumberList:
            if (!v.is_array()) bad("expected an array of numbers");
            for (const auto& e : v) {
                if (!e.is_number()) bad("expected an array of numbers");
            }
            break;
        case FieldType::ComplexList:
            if (!v.is_array()) bad("expected an array of [re, im] pairs");
            for (const auto& e : v) {
                if (!is_complex(e)) bad("expected an array of [re, im] pairs");
            }
            break;
        case FieldType::Grid:
            if (!v.is_object()) bad("expected an object with radius, rings, angles");
            for (const auto& [k, e] : v.items()) {
                if (k == "radius") {
                    if (!e.is_number() || !(e.get<double>() >= 0)) bad("radius must be a non-negative number");
                } else if (k == "rings" || k == "angles") {
                    if (!e.is_number_unsigned()) bad(k + " must be a non-negative integer");
                } else {
                    throw PreconditionError("unknown key '" + key + "." + k + "'" + locate_key(text, k));
                }
            }
            break;
    }
}

}  // namespace detail

/// Validated configuration; every schema key with a default is present.
class RunConfig {
  public:
    RunConfig() = default;

    [[nodiscard]] const std::string& command() const { return command_; }
    [[nodiscard]] const Json& json() const { return values_; }
    [[nodiscard]] bool has(const std::string& key) const { return values_.contains(key); }

    [[nodiscard]] std::string text(const std::string& key) const { return at(key).get<std::string>(); }
    [[nodiscard]] double number(const std::string& key) const { return at(key).get<double>(); }
    [[nodiscard]] std::uint64_t count(const std::string& key) const { return at(key).get<std::uint64_t>(); }
    [[nodiscard]] Complex complex(const std::string& key) const {
        const auto& v = at(key);
        return {v[0].get<double>(), v[1].get<double>()};
    }
    [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
        return at(key).get<std::vector<double>>();
    }
    [[nodiscard]] std::vector<Complex> complexes(const std::string& key) const {
        std::vector<Complex> out;
        for (const auto& v : at(key)) out.emplace_back(v[0].get<double>(), v[1].get<double>());
        return out;
    }
    [[nodiscard]] ProbeGrid grid(const std::string& key) const {
        ProbeGrid g;
        const auto& v = at(key);
        g.radius = v.value("radius", g.radius);
        g.rings = v.value("rings", g.rings);
        g.angles = v.value("angles", g.angles);
        return g;
    }

    void set(const std::string& key, Json value) { values_[key] = std::move(value); }

    friend bool operator==(const RunConfig& a, const RunConfig& b) { return a.values_ == b.values_; }

  private:
    friend RunConfig parse_config(std::string_view text);

    [[nodiscard]] const Json& at(const std::string& key) const {
        if (!values_.contains(key)) throw PreconditionError("config key '" + key + "' is not set");
        return values_.at(key);
    }

    std::string command_;
    Json values_ = Json::object();
};

/// Parses and validates a config; unknown keys, wrong types and malformed
/// domain or map specs are rejected with their position.
inline RunConfig parse_config(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw PreconditionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw PreconditionError("config must be a JSON object");
    if (!doc.contains("command") || !doc["command"].is_string()) {
        throw PreconditionError("config needs a string \"command\"" + detail::locate_key(text, "command"));
    }
    RunConfig cfg;
    cfg.command_ = doc["command"].get<std::string>();
    const auto& schema = detail::schema_for(cfg.command_);
    for (const auto& [key, value] : doc.items()) {
        const auto it = schema.find(key);
        if (it == schema.end()) {
            throw PreconditionError("unknown key '" + key + "'" + detail::locate_key(text, key) + " for command " +
                                    cfg.command_);
        }
        detail::check_field(key, it->second, value, text);
    }
    for (const auto& [key, field] : schema) {
        if (doc.contains(key)) {
            Json v = doc[key];
            if (field.type == detail::FieldType::Grid) {
                Json full = detail::grid_default();
                full.update(v);
                v = full;
            }
            cfg.values_[key] = v;
        } else if (field.required) {
            throw PreconditionError("config for " + cfg.command_ + " needs key '" + key + "'");
        } else if (!field.fallback.is_null()) {
            cfg.values_[key] = field.fallback;
        }
    }
    return cfg;
}

/// Canonical text: sorted keys, two-space indent, trailing newline.
inline std::string serialize_config(const RunConfig& cfg) { return cfg.json().dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// JSON and CSV renderings

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const std::optional<Complex>& z) { return z ? to_json(*z) : Json(nullptr); }

inline Json to_json(const BlochReport& r) {
    return Json{{"center", to_json(r.best_center.value())},
                {"inradius", r.best_inradius},
                {"verdict", {{"kind", to_string(r.verdict.kind)}, {"value", r.verdict.value}}},
                {"budget",
                 {{"depth", r.budget.depth},
                  {"ring_step", r.budget.ring_step},
                  {"max_angles", r.budget.max_angles},
                  {"refine_steps", r.budget.refine_steps},
                  {"witness_threshold", r.budget.threshold()},
                  {"verify_samples", r.budget.verify_samples},
                  {"growth_margin", r.budget.growth_margin}}},
                {"ring_maxima", r.ring_maxima},
                {"witness_verified", r.witness_verified},
                {"candidates", r.candidates}};
}

inline Json to_json(const RunResult& r) {
    const auto& rep = r.report;
    Json clusters = Json::array();
    for (const auto& c : rep.clusters) clusters.push_back({{"representative", to_json(c.representative)}, {"steps", c.steps}});
    Json steps = Json::array();
    for (const auto& s : r.trace.steps) {
        Json marked = Json::array();
        for (const auto& m : s.marked) marked.push_back(to_json(m));
        steps.push_back({{"n", s.n}, {"diameter", s.diameter}, {"schwarz_pick", s.schwarz_pick}, {"marked", marked}});
    }
    Json out{{"verdict", to_string(rep.verdict)},
             {"diameter_floor", rep.diameter_floor},
             {"schwarz_pick", rep.schwarz_pick},
             {"failed_points", rep.failed_points},
             {"cluster_counts", rep.cluster_counts},
             {"clusters", clusters},
             {"steps", steps}};
    if (rep.verdict == ConvergenceReport::Verdict::ConstantLimit) {
        out["constant"] = to_json(rep.constant);
        out["constant_from"] = rep.constant_from;
    }
    return out;
}

inline Json to_json(const Theorem7Result& r) {
    Json steps = Json::array();
    for (const auto& s : r.states) {
        steps.push_back({{"n", s.n},
                         {"depth", s.depth},
                         {"eps", s.eps},
                         {"a", to_json(s.a.value())},
                         {"w", to_json(s.w.value())},
                         {"w_tilde", to_json(s.w_tilde.value())},
                         {"c_prev", to_json(s.c_prev.value())},
                         {"rho_a_w", s.rho_a_w},
                         {"rho_x_a_w", s.rho_x_a_w},
                         {"rho_0_w_tilde", s.rho_0_w_tilde},
                         {"image_error", s.image_error},
                         {"checks",
                          {{"images", s.checks.images},
                           {"lift_bound", s.checks.lift_bound},
                           {"step_ratio", s.checks.step_ratio},
                           {"disk_product", s.checks.disk_product},
                           {"domain_product", s.checks.domain_product}}}});
    }
    return Json{{"a0", to_json(r.a0.value())},
                {"w0", to_json(r.w0.value())},
                {"rho_x_a0_w0", r.rho_c0},
                {"steps", steps},
                {"final_at_origin", to_json(r.final_at_origin)},
                {"final_at_w_tilde", to_json(r.final_at_w_tilde)},
                {"final_error", r.final_error}};
}

inline Json to_json(const Theorem8Result& r) {
    Json steps = Json::array();
    for (const auto& s : r.states) {
        steps.push_back({{"n", s.n},
                         {"theta", s.theta},
                         {"a_n", to_json(s.a_n.value())},
                         {"circle_radius", s.circle_radius},
                         {"rho_a_n_a", s.rho_a_n_a},
                         {"image_error", s.image_error},
                         {"in_x", s.in_x},
                         {"ok", s.ok()}});
    }
    Json orbit = Json::array();
    for (const auto& z : r.orbit) orbit.push_back(to_json(z));
    return Json{{"a", to_json(r.a.value())}, {"a1", to_json(r.a1.value())}, {"steps", steps}, {"orbit", orbit}};
}

inline Json to_json(const Lemma1Report& r) {
    return Json{{"C", r.big_c}, {"c", r.euclid_c}, {"eps_hat", r.eps_hat}, {"domination", r.domination},
                {"samples", r.samples}};
}

inline Json to_json(const Lemma2Report& r) {
    Json samples = Json::array();
    for (const auto& s : r.samples) {
        samples.push_back({{"modulus", s.modulus},
                           {"a", to_json(s.a.value())},
                           {"z1", to_json(s.z1.value())},
                           {"z2", to_json(s.z2.value())},
                           {"rho_0_z1", s.rho_0_z1},
                           {"rho_a_z2", s.rho_a_z2},
                           {"gap", s.gap},
                           {"vieta_error", s.vieta_error}});
    }
    return Json{{"c", to_json(r.c.value())}, {"samples", samples}, {"monotone", r.monotone},
                {"identity_holds", r.identity_holds}};
}

namespace detail {

inline void append_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace detail

/// Columns n,probe_index,re,im,diameter; "nan" where an orbit hit the guard.
inline std::string trace_csv(const IFSTrace& trace) {
    std::string out = "n,probe_index,re,im,diameter\n";
    for (const auto& s : trace.steps) {
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            out += std::to_string(s.n) + ',' + std::to_string(i) + ',';
            if (s.ok[i]) {
                detail::append_double(out, s.values[i].real());
                out += ',';
                detail::append_double(out, s.values[i].imag());
            } else {
                out += "nan,nan";
            }
            out += ',';
            detail::append_double(out, s.diameter);
            out += '\n';
        }
    }
    return out;
}

/// Image of a polar grid under F_N, one row per grid point.
inline std::string grid_csv(std::span<const MapDescriptor> seq, std::size_t n, const ProbeGrid& grid) {
    std::string out = "index,re,im,image_re,image_im\n";
    const auto points = grid.points();
    std::vector<std::optional<Complex>> images(points.size());
    parallel_for(points.size(), [&](std::size_t i) { images[i] = try_compose(seq, points[i], n); });
    for (std::size_t i = 0; i < points.size(); ++i) {
        out += std::to_string(i) + ',';
        detail::append_double(out, points[i].real());
        out += ',';
        detail::append_double(out, points[i].imag());
        out += ',';
        if (images[i]) {
            detail::append_double(out, images[i]->real());
            out += ',';
            detail::append_double(out, images[i]->imag());
        } else {
            out += "nan,nan";
        }
        out += '\n';
    }
    return out;
}

struct Outputs {
    Json report;
    std::string trace = "n,probe_index,re,im,diameter\n";
    std::string grid = "index,re,im,image_re,image_im\n";
};

/// Writes trace.csv, report.json and grid.csv into dir (created if missing).
inline void emit_outputs(const std::filesystem::path& dir, const Outputs& out) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw PreconditionError("cannot create output directory " + dir.string() + ": " + ec.message());
    const auto write = [&](const char* name, const std::string& body) {
        const auto path = dir / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw PreconditionError("cannot write " + path.string());
        f << body;
        f.close();
        if (!f) throw PreconditionError("cannot write " + path.string());
    };
    write("trace.csv", out.trace);
    write("report.json", out.report.dump(2) + "\n");
    write("grid.csv", out.grid);
}

}  // namespace hypiter
