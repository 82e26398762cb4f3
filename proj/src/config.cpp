#include "perco/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace perco {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct KeyValue {
    std::string value;
    bool used = false;
};

using Sections = std::map<std::string, std::map<std::string, KeyValue>>;

Sections parse_sections(const std::string& text) {
    Sections out;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": key '" + key +
                              "' outside any [section]");
        auto& sect = out[section];
        if (sect.count(key))
            throw ConfigError("config: duplicate key '" + section + "." + key + "'");
        sect[key] = {value, false};
    }
    return out;
}

double parse_double(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("config: key '" + section + "." + key + "': expected a number, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& section, const std::string& key, const std::string& v) {
    // Accepts plain integers and integral scientific forms like 2e4.
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec == std::errc{} && ptr == v.data() + v.size()) return out;
    const double d = parse_double(section, key, v);
    if (d < 0 || d != std::floor(d) || d > 1.8e19)
        throw ConfigError("config: key '" + section + "." + key + "': expected a nonnegative integer");
    return static_cast<std::uint64_t>(d);
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: key '" + section + "." + key + "': expected true/false");
}

std::vector<double> parse_list(const std::string& section, const std::string& key,
                               const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("config: key '" + section + "." + key + "': empty list element");
        out.push_back(parse_double(section, key, item));
    }
    if (out.empty()) throw ConfigError("config: key '" + section + "." + key + "': empty list");
    return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    Sections sections = parse_sections(text);
    ExperimentConfig cfg;
    cfg.rule = ActivationRule::majority();

    auto get = [&](const std::string& section, const std::string& key) -> KeyValue* {
        auto sit = sections.find(section);
        if (sit == sections.end()) return nullptr;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return nullptr;
        kit->second.used = true;
        return &kit->second;
    };

    // [graph]
    const KeyValue* n_kv = get("graph", "n");
    if (!n_kv) throw ConfigError("config: missing required key 'graph.n'");
    cfg.n = static_cast<std::uint32_t>(parse_u64("graph", "n", n_kv->value));
    const KeyValue* p_kv = get("graph", "p");
    const KeyValue* c_kv = get("graph", "c");
    if (p_kv && c_kv)
        throw ConfigError("config: keys 'graph.p' and 'graph.c' are mutually exclusive");
    if (!p_kv && !c_kv)
        throw ConfigError("config: one of 'graph.p' or 'graph.c' is required");
    if (p_kv) cfg.p = parse_double("graph", "p", p_kv->value);
    if (c_kv) cfg.c = parse_double("graph", "c", c_kv->value);

    // [init] -- a0, theta and q are mutually exclusive
    const KeyValue* a0_kv = get("init", "a0");
    const KeyValue* theta_kv = get("init", "theta");
    const KeyValue* q_kv = get("init", "q");
    const int init_given = (a0_kv != nullptr) + (theta_kv != nullptr) + (q_kv != nullptr);
    if (init_given > 1)
        throw ConfigError("config: keys 'init.a0', 'init.theta', 'init.q' are mutually exclusive");
    if (init_given == 0)
        throw ConfigError("config: one of 'init.a0', 'init.theta', 'init.q' is required");
    if (a0_kv) {
        cfg.init_mode = ExperimentConfig::InitMode::A0;
        cfg.init_value = static_cast<double>(parse_u64("init", "a0", a0_kv->value));
    } else if (theta_kv) {
        cfg.init_mode = ExperimentConfig::InitMode::Theta;
        cfg.init_value = parse_double("init", "theta", theta_kv->value);
    } else {
        cfg.init_mode = ExperimentConfig::InitMode::Q;
        cfg.init_value = parse_double("init", "q", q_kv->value);
    }

    // [rule]
    if (const KeyValue* kind = get("rule", "kind")) {
        const std::string v = kind->value;
        bool strict = false;
        if (const KeyValue* s = get("rule", "strict")) strict = parse_bool("rule", "strict", s->value);
        if (v == "majority") {
            cfg.rule = ActivationRule::majority(strict);
        } else if (v == "proportional") {
            const KeyValue* alpha = get("rule", "alpha");
            if (!alpha) throw ConfigError("config: rule 'proportional' requires 'rule.alpha'");
            cfg.rule = ActivationRule::proportional(parse_double("rule", "alpha", alpha->value), strict);
        } else if (v == "classical") {
            const KeyValue* r = get("rule", "r");
            if (!r) throw ConfigError("config: rule 'classical' requires 'rule.r'");
            cfg.rule = ActivationRule::classical(static_cast<std::uint32_t>(parse_u64("rule", "r", r->value)));
        } else {
            throw ConfigError("config: key 'rule.kind': unknown rule '" + v + "'");
        }
    } else if (const KeyValue* s = get("rule", "strict")) {
        cfg.rule = ActivationRule::majority(parse_bool("rule", "strict", s->value));
    }

    // [ensemble]
    if (const KeyValue* kv = get("ensemble", "runs")) cfg.runs = parse_u64("ensemble", "runs", kv->value);
    if (const KeyValue* kv = get("ensemble", "base_seed"))
        cfg.base_seed = parse_u64("ensemble", "base_seed", kv->value);
    if (const KeyValue* kv = get("ensemble", "almost_fraction"))
        cfg.almost_fraction = parse_double("ensemble", "almost_fraction", kv->value);
    if (const KeyValue* kv = get("ensemble", "spread_epsilon"))
        cfg.spread_epsilon = parse_double("ensemble", "spread_epsilon", kv->value);
    if (const KeyValue* kv = get("ensemble", "max_cells"))
        cfg.max_cells = parse_u64("ensemble", "max_cells", kv->value);
    if (const KeyValue* kv = get("ensemble", "threads"))
        cfg.threads = static_cast<unsigned>(parse_u64("ensemble", "threads", kv->value));

    // [sweep]
    if (sections.count("sweep")) {
        SweepSpec spec;
        const KeyValue* param = get("sweep", "param");
        if (!param) throw ConfigError("config: missing required key 'sweep.param'");
        const std::string pv = param->value;
        if (pv == "q") spec.param = SweepParam::Q;
        else if (pv == "theta") spec.param = SweepParam::Theta;
        else if (pv == "a0") spec.param = SweepParam::A0;
        else if (pv == "p") spec.param = SweepParam::P;
        else if (pv == "c") spec.param = SweepParam::C;
        else throw ConfigError("config: key 'sweep.param': unknown parameter '" + pv + "'");

        const KeyValue* values = get("sweep", "values");
        const KeyValue* from = get("sweep", "from");
        const KeyValue* to = get("sweep", "to");
        const KeyValue* step = get("sweep", "step");
        if (values && (from || to || step))
            throw ConfigError("config: 'sweep.values' excludes 'sweep.from/to/step'");
        if (values) {
            spec.values = parse_list("sweep", "values", values->value);
        } else {
            if (!from || !to || !step)
                throw ConfigError("config: sweep needs 'values' or all of 'from', 'to', 'step'");
            const double lo = parse_double("sweep", "from", from->value);
            const double hi = parse_double("sweep", "to", to->value);
            const double st = parse_double("sweep", "step", step->value);
            if (!(st > 0.0) || hi < lo)
                throw ConfigError("config: sweep range needs step > 0 and to >= from");
            for (double v = lo; v <= hi + st * 1e-9; v += st) spec.values.push_back(std::min(v, hi));
        }
        cfg.sweep = std::move(spec);
    }

    // Reject unknown keys and sections; errors must name the offender.
    static const std::map<std::string, int> known_sections = {
        {"graph", 0}, {"init", 0}, {"rule", 0}, {"ensemble", 0}, {"sweep", 0}};
    for (const auto& [section, keys] : sections) {
        if (!known_sections.count(section))
            throw ConfigError("config: unknown section '[" + section + "]'");
        for (const auto& [key, kv] : keys)
            if (!kv.used) throw ConfigError("config: unknown key '" + section + "." + key + "'");
    }

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string canonical_config_string(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "n=" << cfg.n << '\n';
    os << "p=" << cfg.resolved_p() << '\n';
    os << "init_mode=" << static_cast<int>(cfg.init_mode) << '\n';
    os << "init_value=" << cfg.init_value << '\n';
    os << "rule=" << cfg.rule.describe() << '\n';
    os << "runs=" << cfg.runs << '\n';
    os << "base_seed=" << cfg.base_seed << '\n';
    os << "almost_fraction=" << cfg.almost_fraction << '\n';
    os << "spread_epsilon=" << cfg.spread_epsilon << '\n';
    return os.str();
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    return fnv1a64(canonical_config_string(cfg));
}

std::uint64_t rehash_summary_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("summary json: ") + e.what());
    }
    if (!j.contains("config")) throw ConfigError("summary json: missing 'config' object");
    const auto& c = j["config"];
    try {
        ExperimentConfig cfg;
        cfg.n = c.at("n").get<std::uint32_t>();
        cfg.p = c.at("p").get<double>();
        cfg.c = -1.0;
        const std::string mode = c.at("init_mode").get<std::string>();
        if (mode == "a0") cfg.init_mode = ExperimentConfig::InitMode::A0;
        else if (mode == "theta") cfg.init_mode = ExperimentConfig::InitMode::Theta;
        else if (mode == "q") cfg.init_mode = ExperimentConfig::InitMode::Q;
        else throw ConfigError("summary json: bad init_mode '" + mode + "'");
        cfg.init_value = c.at("init_value").get<double>();
        const std::string rule = c.at("rule").get<std::string>();
        const bool strict = c.at("strict").get<bool>();
        if (rule == "majority") cfg.rule = ActivationRule::majority(strict);
        else if (rule == "proportional")
            cfg.rule = ActivationRule::proportional(c.at("alpha").get<double>(), strict);
        else if (rule == "classical")
            cfg.rule = ActivationRule::classical(c.at("r").get<std::uint32_t>());
        else throw ConfigError("summary json: bad rule '" + rule + "'");
        cfg.runs = c.at("runs").get<std::uint64_t>();
        cfg.base_seed = c.at("base_seed").get<std::uint64_t>();
        cfg.almost_fraction = c.at("almost_fraction").get<double>();
        cfg.spread_epsilon = c.at("spread_epsilon").get<double>();
        return config_hash(cfg);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("summary json: ") + e.what());
    }
}

}  // namespace perco
