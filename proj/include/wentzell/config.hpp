#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wentzell/errors.hpp"
#include "wentzell/integrate.hpp"
#include "wentzell/model.hpp"

namespace wentzell {

using json = nlohmann::json;

/// A coefficient or initial field: one constant or N+1 nodal samples.
using NodalField = std::variant<double, std::vector<double>>;

struct InitialConfig {
    NodalField u = 0.0;
    NodalField udot = 0.0;
    std::optional<double> udot_at_1;
    /// Initial integrator state.
    double eta = 0.0;

    bool operator==(const InitialConfig&) const = default;
};

struct RunConfig {
    std::string preset;
    std::size_t N = 199;
    NodalField a = 1.0;
    NodalField q = 0.0;
    NodalField f = 0.0;
    BoundaryConstants boundary;
    ControlParams control;
    std::optional<double> saturation;
    /// Unset: W2W1 with integral action, W1W1 without.
    std::optional<VariantKind> variant;
    /// Unset: 0.1 min(dx)/sqrt(a_upper).
    std::optional<double> dt;
    /// Unset: 50 open loop, 200 closed loop.
    std::optional<double> T;
    std::size_t sample_stride = 10;
    InitialConfig initial;
    /// Unset: choose_ell when q_lower > 0, otherwise 0.
    std::optional<double> ell;
    std::optional<std::string> output_dir;
    bool trajectory_displacement = false;
    std::uint64_t seed = 0;

    bool operator==(const RunConfig&) const = default;

    VariantKind resolved_variant() const {
        if (variant) return *variant;
        return control.alpha2 > 0.0 ? VariantKind::W2W1 : VariantKind::W1W1;
    }
    bool open_loop() const { return control.kp == 0.0 && control.alpha2 == 0.0; }
    double resolved_T() const { return T ? *T : (open_loop() ? 50.0 : 200.0); }
};

/// Parameter sets 1-3 (damping) crossed with gain sets a-c.
inline RunConfig preset_config(const std::string& name) {
    if (name.size() != 2 || name[0] < '1' || name[0] > '3' || name[1] < 'a' || name[1] > 'c') {
        throw ConfigError("preset", "unknown preset '" + name + "' (expected 1a..3c)");
    }
    static constexpr double damping[] = {0.0, 0.001, 0.005};
    static constexpr double kp[] = {0.0, 10.0, 1000.0};
    static constexpr double alpha2[] = {0.0, 100.0, 10.0};
    static constexpr double v1_ref[] = {0.0, 0.5, 0.5};
    const int s = name[0] - '1';
    const int k = name[1] - 'a';

    RunConfig c;
    c.preset = name;
    c.N = 199;
    c.a = 1.0;
    c.q = damping[s];
    c.f = 0.0;
    c.boundary = {20.0, 20.0, damping[s], damping[s], 0.0, 0.0};
    c.control = {kp[k], alpha2[k], v1_ref[k]};
    c.variant = k == 0 ? VariantKind::W1W1 : VariantKind::W2W1;
    c.T = k == 0 ? 50.0 : 200.0;
    c.sample_stride = 200;
    c.initial.u = 0.0;
    c.initial.udot = 0.0;
    c.initial.udot_at_1 = 1.0;
    return c;
}

inline std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (char s : {'1', '2', '3'}) {
        for (char k : {'a', 'b', 'c'}) out.push_back(std::string{s, k});
    }
    return out;
}

inline std::vector<RunConfig> presets() {
    std::vector<RunConfig> out;
    for (const auto& n : preset_names()) out.push_back(preset_config(n));
    return out;
}

namespace detail {

/// Reads keys of one JSON object and rejects anything it did not consume.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    }

    std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void number(const std::string& key, double& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_number()) throw ConfigError(path(key), "expected a number");
        out = v.get<double>();
    }
    void number(const std::string& key, std::optional<double>& out, const char* auto_word = nullptr) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (v.is_null() || (auto_word && v.is_string() && v.get<std::string>() == auto_word)) {
            out.reset();
        } else if (v.is_number()) {
            out = v.get<double>();
        } else {
            throw ConfigError(path(key), auto_word ? std::string("expected a number or \"") +
                                                         auto_word + "\""
                                                   : "expected a number or null");
        }
    }
    template <class Int>
    void integer(const std::string& key, Int& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError(path(key), "expected a nonnegative integer");
        }
        out = static_cast<Int>(v.get<unsigned long long>());
    }
    void string(const std::string& key, std::string& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_string()) throw ConfigError(path(key), "expected a string");
        out = v.get<std::string>();
    }
    void field(const std::string& key, NodalField& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (v.is_number()) {
            out = v.get<double>();
        } else if (v.is_array()) {
            std::vector<double> xs;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number()) {
                    throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "expected a number");
                }
                xs.push_back(v[i].get<double>());
            }
            out = std::move(xs);
        } else {
            throw ConfigError(path(key), "expected a number or an array of nodal values");
        }
    }
    Section child(const std::string& key) { return Section(raw(key), path(key)); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(path(it.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline json field_json(const NodalField& f) {
    if (std::holds_alternative<double>(f)) return std::get<double>(f);
    return std::get<std::vector<double>>(f);
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace detail

/// Applies a config document. A "preset" key expands first; explicit keys override it.
inline RunConfig parse_config(const json& doc) {
    detail::Section top(doc, "");
    RunConfig c;
    if (top.has("preset")) {
        std::string name;
        top.string("preset", name);
        c = preset_config(name);
    }
    if (top.has("variant")) {
        const auto& v = top.raw("variant");
        if (v.is_null()) {
            c.variant.reset();
        } else if (!v.is_string()) {
            throw ConfigError("variant", "expected one of W2W1, W1D, W2D, W1W1");
        } else {
            try {
                c.variant = parse_variant(v.get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ConfigError("variant", e.what());
            }
        }
    }
    top.integer("seed", c.seed);
    if (top.has("grid")) {
        auto s = top.child("grid");
        s.integer("N", c.N);
        s.finish();
    }
    if (top.has("params")) {
        auto s = top.child("params");
        s.field("a", c.a);
        s.field("q", c.q);
        s.field("f", c.f);
        s.number("beta1", c.boundary.beta1);
        s.number("mu1", c.boundary.mu1);
        s.number("q1", c.boundary.q1);
        s.number("gamma1", c.boundary.gamma1);
        s.number("f1", c.boundary.f1);
        s.number("f2", c.boundary.f2);
        s.finish();
    }
    if (top.has("control")) {
        auto s = top.child("control");
        s.number("kp", c.control.kp);
        s.number("alpha2", c.control.alpha2);
        s.number("v1_ref", c.control.v1_ref);
        s.number("saturation", c.saturation);
        s.finish();
    }
    if (top.has("time")) {
        auto s = top.child("time");
        s.number("dt", c.dt, "auto");
        s.number("T", c.T, "auto");
        s.integer("sample_stride", c.sample_stride);
        s.finish();
    }
    if (top.has("initial")) {
        auto s = top.child("initial");
        s.field("u", c.initial.u);
        s.field("udot", c.initial.udot);
        s.number("udot_at_1", c.initial.udot_at_1);
        s.number("eta", c.initial.eta);
        s.finish();
    }
    if (top.has("lyapunov")) {
        auto s = top.child("lyapunov");
        s.number("ell", c.ell, "auto");
        s.finish();
    }
    if (top.has("outputs")) {
        auto s = top.child("outputs");
        if (s.has("dir")) {
            std::string d;
            s.string("dir", d);
            c.output_dir = d;
        }
        if (s.has("trajectory")) {
            std::string t;
            s.string("trajectory", t);
            if (t != "velocity" && t != "displacement") {
                throw ConfigError("outputs.trajectory", "expected \"velocity\" or \"displacement\"");
            }
            c.trajectory_displacement = t == "displacement";
        }
        s.finish();
    }
    top.finish();
    return c;
}

inline json to_json(const RunConfig& c) {
    json j;
    if (!c.preset.empty()) j["preset"] = c.preset;
    j["variant"] = c.variant ? json(std::string(to_string(*c.variant))) : json(nullptr);
    j["seed"] = c.seed;
    j["grid"] = {{"N", c.N}};
    j["params"] = {{"a", detail::field_json(c.a)},
                   {"q", detail::field_json(c.q)},
                   {"f", detail::field_json(c.f)},
                   {"beta1", c.boundary.beta1},
                   {"mu1", c.boundary.mu1},
                   {"q1", c.boundary.q1},
                   {"gamma1", c.boundary.gamma1},
                   {"f1", c.boundary.f1},
                   {"f2", c.boundary.f2}};
    j["control"] = {{"kp", c.control.kp},
                    {"alpha2", c.control.alpha2},
                    {"v1_ref", c.control.v1_ref},
                    {"saturation", detail::optional_json(c.saturation)}};
    j["time"] = {{"dt", c.dt ? json(*c.dt) : json("auto")},
                 {"T", c.T ? json(*c.T) : json("auto")},
                 {"sample_stride", c.sample_stride}};
    j["initial"] = {{"u", detail::field_json(c.initial.u)},
                    {"udot", detail::field_json(c.initial.udot)},
                    {"udot_at_1", detail::optional_json(c.initial.udot_at_1)},
                    {"eta", c.initial.eta}};
    j["lyapunov"] = {{"ell", c.ell ? json(*c.ell) : json("auto")}};
    json out = {{"trajectory", c.trajectory_displacement ? "displacement" : "velocity"}};
    if (c.output_dir) out["dir"] = *c.output_dir;
    j["outputs"] = out;
    return j;
}

inline RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", e.what());
    }
    return parse_config(doc);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// A preset name or a config file path.
inline RunConfig resolve_config(const std::string& spec) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), spec) != names.end()) return preset_config(spec);
    return load_config(spec);
}

/// Grid, coefficients and control resolved from a config.
struct ResolvedModel {
    Grid grid;
    PhysicalParams params;
    ControlParams control;
    BoundaryVariant variant;
};

namespace detail {

inline Vector nodal(const NodalField& f, Eigen::Index nodes, const std::string& path) {
    if (std::holds_alternative<double>(f)) {
        const double v = std::get<double>(f);
        if (!std::isfinite(v)) throw ConfigError(path, "value is not finite");
        return Vector::Constant(nodes, v);
    }
    const auto& xs = std::get<std::vector<double>>(f);
    if (static_cast<Eigen::Index>(xs.size()) != nodes) {
        throw ConfigError(path, "expected " + std::to_string(nodes) + " nodal values, got " +
                                    std::to_string(xs.size()));
    }
    Vector v = Eigen::Map<const Vector>(xs.data(), nodes);
    if (!v.allFinite()) throw ConfigError(path, "values must be finite");
    return v;
}

}  // namespace detail

/// Checks the standing hypotheses (simulation mode) and the variant/control pairing.
inline ResolvedModel resolve_model(const RunConfig& c) {
    if (c.N < 2) throw ConfigError("grid.N", "need at least 2 intervals");
    ResolvedModel m;
    m.grid = Grid::uniform(c.N);
    const auto nodes = m.grid.nodes();
    m.params = PhysicalParams::sampled(detail::nodal(c.a, nodes, "params.a"),
                                       detail::nodal(c.q, nodes, "params.q"),
                                       detail::nodal(c.f, nodes, "params.f"), c.boundary);
    try {
        m.params.validate(Mode::simulation);
    } catch (const HypothesisError& e) {
        const std::string& h = e.hypothesis();
        throw ConfigError(h == "h1" ? "params.a" : h == "h2" ? "params.q" : "params", e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("params", e.what());
    }
    m.control = c.control;
    try {
        m.control.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("control", e.what());
    }
    if (c.saturation && !(*c.saturation > 0.0)) {
        throw ConfigError("control.saturation", "must be positive");
    }
    const auto kind = c.resolved_variant();
    m.variant = BoundaryVariant::make(kind, m.params, m.control);
    if (!BoundaryVariant::has_integrator(kind) && m.control.alpha2 != 0.0) {
        throw ConfigError("control.alpha2", "variant " + std::string(to_string(kind)) +
                                                " has no integrator; alpha2 must be 0");
    }
    if (kind != VariantKind::W2W1) {
        if (m.control.v1_ref != 0.0) {
            throw ConfigError("control.v1_ref", "only W2W1 runs carry a velocity reference");
        }
        if (m.params.f.cwiseAbs().maxCoeff() != 0.0 || m.params.f1 != 0.0 || m.params.f2 != 0.0) {
            throw ConfigError("params.f", "source terms are only supported for W2W1 runs");
        }
    }
    if (c.dt && !(*c.dt > 0.0)) throw ConfigError("time.dt", "must be positive or \"auto\"");
    if (c.T && !(*c.T > 0.0)) throw ConfigError("time.T", "must be positive or \"auto\"");
    if (c.sample_stride == 0) throw ConfigError("time.sample_stride", "must be at least 1");
    if (c.ell && !(*c.ell >= 0.0)) throw ConfigError("lyapunov.ell", "must be nonnegative");
    return m;
}

}  // namespace wentzell
