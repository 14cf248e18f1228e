#include "hestonvar/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hestonvar/errors.hpp"

namespace hestonvar {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& j, const std::string& section,
                    const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError("config: unknown key '" + section + "." + item.key() + "'");
}

double get_num(const json& j, const std::string& section, const std::string& key) {
    if (!j.contains(key))
        throw ConfigError("config: missing key '" + section + "." + key + "'");
    if (!j[key].is_number())
        throw ConfigError("config: key '" + section + "." + key + "' must be a number");
    return j[key].get<double>();
}

double get_num_or(const json& j, const std::string& section, const std::string& key,
                  double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw ConfigError("config: key '" + section + "." + key + "' must be a number");
    return j[key].get<double>();
}

json parse_override_value(const std::string& text) {
    json v = json::parse(text, nullptr, false);
    if (v.is_discarded()) return json(text); // keep as string
    return v;
}

void apply_override(json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("config: override '" + assignment + "' is not key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    json* node = &root;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("config: empty override path");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    (*node)[parts.back()] = parse_override_value(value);
}

} // namespace

RunConfig parse_config(const std::string& json_text,
                       const std::vector<std::string>& overrides) {
    json root = json::parse(json_text, nullptr, false);
    if (root.is_discarded()) throw ConfigError("config: invalid JSON");
    for (const auto& ov : overrides) apply_override(root, ov);

    reject_unknown(root, "",
                   {"model", "option", "s0", "y0", "variational", "domain", "time", "mc",
                    "quad_order", "outputs"});

    RunConfig cfg;
    if (!root.contains("model")) throw ConfigError("config: missing 'model' section");
    {
        const json& jm = root["model"];
        reject_unknown(jm, "model", {"kappa", "m", "sigma", "rho", "r", "eta"});
        cfg.model.kappa = get_num(jm, "model", "kappa");
        cfg.model.m = get_num(jm, "model", "m");
        cfg.model.sigma = get_num(jm, "model", "sigma");
        cfg.model.rho = get_num_or(jm, "model", "rho", 0.0);
        cfg.model.r = get_num_or(jm, "model", "r", 0.0);
        cfg.model.eta = get_num_or(jm, "model", "eta", 0.0);
        try {
            cfg.model.validate();
        } catch (const Error& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }

    if (!root.contains("option")) throw ConfigError("config: missing 'option' section");
    {
        const json& jo = root["option"];
        reject_unknown(jo, "option", {"strike", "maturity", "kind"});
        cfg.option.strike = get_num(jo, "option", "strike");
        cfg.option.maturity = get_num(jo, "option", "maturity");
        if (jo.contains("kind")) {
            if (!jo["kind"].is_string())
                throw ConfigError("config: option.kind must be a string");
            cfg.option.kind = option_kind_from_string(jo["kind"].get<std::string>());
        }
        try {
            cfg.option.validate();
        } catch (const Error& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }

    cfg.s0 = get_num_or(root, "", "s0", 1.0);
    if (!(cfg.s0 > 0.0)) throw ConfigError("config: s0 must be positive");
    if (!root.contains("y0")) throw ConfigError("config: missing 'y0' (initial variance)");
    cfg.y0 = get_num(root, "", "y0");
    if (!(cfg.y0 >= 0.0)) throw ConfigError("config: y0 must be nonnegative");

    if (root.contains("variational")) {
        const json& jv = root["variational"];
        reject_unknown(jv, "variational",
                       {"a", "nu", "mu", "omega", "eps1", "eps2", "eps3", "delta"});
        VariationalSpec vs;
        vs.vp.a = get_num(jv, "variational", "a");
        vs.vp.nu = get_num(jv, "variational", "nu");
        vs.vp.mu = get_num(jv, "variational", "mu");
        vs.vp.omega = get_num(jv, "variational", "omega");
        vs.eps.eps1 = get_num(jv, "variational", "eps1");
        vs.eps.eps2 = get_num(jv, "variational", "eps2");
        vs.eps.eps3 = get_num(jv, "variational", "eps3");
        if (jv.contains("delta")) vs.delta = get_num(jv, "variational", "delta");
        cfg.variational = vs;
    }

    // Internal pricing normalizes the spot to 1; the rescaled strike
    // determines the default log-price window.
    const double k_scaled = cfg.option.strike / cfg.s0;
    const double a_default = cfg.variational ? cfg.variational->vp.a : 1e-2;
    cfg.domain.x_min = std::log(k_scaled) - 6.0;
    cfg.domain.x_max = std::log(k_scaled) + 6.0;
    cfg.domain.a = a_default;
    cfg.domain.y_max = std::max(4.0 * cfg.model.m,
                                8.0 * cfg.model.sigma * std::sqrt(cfg.option.maturity));
    cfg.domain.nx = 64;
    cfg.domain.ny = 48;
    if (root.contains("domain")) {
        const json& jd = root["domain"];
        reject_unknown(jd, "domain", {"x_min", "x_max", "a", "y_max", "nx", "ny"});
        cfg.domain.x_min = get_num_or(jd, "domain", "x_min", cfg.domain.x_min);
        cfg.domain.x_max = get_num_or(jd, "domain", "x_max", cfg.domain.x_max);
        cfg.domain.a = get_num_or(jd, "domain", "a", cfg.domain.a);
        cfg.domain.y_max = get_num_or(jd, "domain", "y_max", cfg.domain.y_max);
        cfg.domain.nx = static_cast<int>(get_num_or(jd, "domain", "nx", cfg.domain.nx));
        cfg.domain.ny = static_cast<int>(get_num_or(jd, "domain", "ny", cfg.domain.ny));
    }
    try {
        cfg.domain.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (cfg.variational && cfg.variational->vp.a != cfg.domain.a)
        throw ConfigError("config: variational.a must match domain.a");

    cfg.time.T = cfg.option.maturity;
    if (root.contains("time")) {
        const json& jt = root["time"];
        reject_unknown(jt, "time", {"nt", "theta", "lumped_mass"});
        cfg.time.nt = static_cast<int>(get_num_or(jt, "time", "nt", cfg.time.nt));
        cfg.time.theta = get_num_or(jt, "time", "theta", cfg.time.theta);
        if (jt.contains("lumped_mass")) {
            if (!jt["lumped_mass"].is_boolean())
                throw ConfigError("config: time.lumped_mass must be a boolean");
            cfg.time.lumped_mass = jt["lumped_mass"].get<bool>();
        }
    }
    try {
        cfg.time.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (root.contains("mc")) {
        const json& jm = root["mc"];
        reject_unknown(jm, "mc", {"paths", "steps", "seed", "scheme"});
        cfg.mc.paths = static_cast<long>(get_num_or(jm, "mc", "paths", cfg.mc.paths));
        cfg.mc.steps = static_cast<int>(get_num_or(jm, "mc", "steps", cfg.mc.steps));
        cfg.mc.seed = static_cast<std::uint64_t>(get_num_or(jm, "mc", "seed", cfg.mc.seed));
        if (jm.contains("scheme")) {
            if (!jm["scheme"].is_string())
                throw ConfigError("config: mc.scheme must be a string");
            cfg.mc.scheme = jm["scheme"].get<std::string>();
        }
        try {
            cfg.mc.validate();
        } catch (const Error& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }

    cfg.quad_order = static_cast<int>(get_num_or(root, "", "quad_order", 5));
    if (cfg.quad_order < 3) throw ConfigError("config: quad_order must be at least 3");
    if (root.contains("outputs")) {
        if (!root["outputs"].is_string())
            throw ConfigError("config: outputs must be a string path");
        cfg.outputs = root["outputs"].get<std::string>();
    }
    return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

} // namespace hestonvar
