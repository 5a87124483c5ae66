#include "sshq/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace sshq {

ConfigError::ConfigError(const std::string& source, int line, std::string field, const std::string& message)
    : InputError(line > 0 ? fmt::format("{}:{}: {}: {}", source, line, field, message) : fmt::format("{}: {}: {}", source, field, message)),
      line_(line),
      field_(std::move(field)) {}

std::string to_string(ShiftChoice s) {
    switch (s) {
    case ShiftChoice::None: return "none";
    case ShiftChoice::ZeroAtT0: return "zero_at_t0";
    case ShiftChoice::ValleyToZero: return "valley_to_zero";
    }
    return "?";
}

std::string to_string(EstimatorVariant v) { return v == EstimatorVariant::PlugIn ? "plugin" : "unbiased"; }

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    for (char c : value) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!item.empty()) out.push_back(std::move(item));
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    if (!item.empty()) out.push_back(std::move(item));
    return out;
}

double parse_number(const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw InputError("not a number: '" + text + "'");
    return v;
}

template <typename Int>
Int parse_integer(const std::string& text) {
    Int v{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw InputError("not an integer: '" + text + "'");
    return v;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    throw InputError("expected true or false, got '" + text + "'");
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

} // namespace

double parse_time_expression(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw InputError("empty time expression");
    double value = 1.0;
    char op = '*';
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find_first_of("*/", pos);
        const std::string token = trim(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (token.empty()) throw InputError("malformed time expression '" + s + "'");
        const double f = token == "pi" ? std::numbers::pi : parse_number(token);
        if (op == '*') {
            value *= f;
        } else {
            if (f == 0.0) throw InputError("division by zero in '" + s + "'");
            value /= f;
        }
        if (next == std::string::npos) break;
        op = s[next];
        pos = next + 1;
    }
    return value;
}

std::vector<int> ExperimentConfig::resolved_subsystem() const {
    if (!subsystem.empty()) {
        auto out = subsystem;
        std::sort(out.begin(), out.end());
        return out;
    }
    std::vector<int> half(static_cast<std::size_t>(L / 2));
    for (int i = 0; i < L / 2; ++i) half[static_cast<std::size_t>(i)] = i;
    return half;
}

QuenchSpec ExperimentConfig::quench(InitialState initial) const {
    QuenchSpec q;
    q.L = L;
    q.boundary = boundary;
    q.initial = initial;
    q.times = times;
    q.n_unitaries = n_unitaries;
    q.n_shots = n_shots;
    q.p_layer = p_layer;
    q.readout_flip = readout_flip;
    q.seed = seed;
    q.symmetric_bipartition = outputs.entropy && subsystem.empty();
    return q;
}

void ExperimentConfig::validate() const {
    auto line_of = [&](const std::string& key) {
        auto it = key_lines.find(key);
        return it == key_lines.end() ? 0 : it->second;
    };
    for (auto initial : initials) {
        try {
            quench(initial).validate();
        } catch (const CapacityError&) {
            throw;
        } catch (const InputError& e) {
            std::string msg = e.what();
            const auto colon = msg.find(": ");
            const std::string field = colon == std::string::npos ? "config" : msg.substr(0, colon);
            const std::string rest = colon == std::string::npos ? msg : msg.substr(colon + 2);
            throw ConfigError(source, line_of(field == "times" && !key_lines.count("times") ? "t_start" : field), field, rest);
        }
    }
    if (initials.empty()) throw ConfigError(source, line_of("initial"), "initial", "no initial state given");
    std::set<int> seen;
    for (int q : subsystem) {
        if (q < 0 || q >= L) throw ConfigError(source, line_of("subsystem"), "subsystem", fmt::format("site {} outside 1..{}", q + 1, L));
        if (!seen.insert(q).second) throw ConfigError(source, line_of("subsystem"), "subsystem", fmt::format("site {} listed twice", q + 1));
    }
    if (q_spin == 0) throw ConfigError(source, line_of("q_spin"), "q_spin", "must be nonzero");
    if (q_particle == 0) throw ConfigError(source, line_of("q_particle"), "q_particle", "must be nonzero");
    if (estimator == EstimatorVariant::Unbiased && n_shots < 2) {
        throw ConfigError(source, line_of("n_shots"), "n_shots", "the unbiased estimator needs at least 2 shots");
    }
}

std::string ExperimentConfig::to_text() const {
    std::string out;
    auto put = [&](const std::string& k, const std::string& v) { out += fmt::format("{} = {}\n", k, v); };
    put("L", std::to_string(L));
    put("boundary", to_string(boundary));
    std::string init;
    for (std::size_t i = 0; i < initials.size(); ++i) init += (i ? ", " : "") + to_string(initials[i]);
    put("initial", init);
    std::string ts;
    for (std::size_t i = 0; i < times.size(); ++i) ts += (i ? ", " : "") + format_double(times[i]);
    put("times", ts);
    std::string sub;
    const auto resolved = resolved_subsystem();
    for (std::size_t i = 0; i < resolved.size(); ++i) sub += (i ? ", " : "") + std::to_string(resolved[i] + 1);
    put("subsystem", sub);
    put("n_unitaries", std::to_string(n_unitaries));
    put("n_shots", std::to_string(n_shots));
    put("twist_shots", std::to_string(resolved_twist_shots()));
    put("p_layer", format_double(p_layer));
    put("readout_flip", format_double(readout_flip));
    put("estimator", to_string(estimator));
    put("mitigate", mitigate ? "true" : "false");
    put("p_tot_source", p_tot_source == PTotSource::True ? "true" : "estimated");
    put("shift", to_string(shift));
    put("evolution", evolution == EvolutionMode::Fused ? "fused" : "decomposed");
    std::string outs;
    auto add = [&](bool on, const char* name) {
        if (on) outs += (outs.empty() ? "" : ", ") + std::string(name);
    };
    add(outputs.entropy, "entropy");
    add(outputs.twist, "twist");
    add(outputs.berry, "berry");
    put("outputs", outs.empty() ? "none" : outs);
    put("save_shots", save_shots ? "true" : "false");
    put("dump_circuit", dump_circuit ? "true" : "false");
    put("seed", std::to_string(seed));
    put("q_spin", std::to_string(q_spin));
    put("q_particle", std::to_string(q_particle));
    return out;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    ExperimentConfig cfg;
    cfg.source = source;
    std::string raw;
    int lineno = 0;
    std::optional<double> t_start, t_stop;
    std::optional<int> t_count;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(source, lineno, "syntax", "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(source, lineno, "syntax", "missing key");
        if (value.empty()) throw ConfigError(source, lineno, key, "missing value");
        if (cfg.key_lines.count(key)) throw ConfigError(source, lineno, key, "key given twice");
        cfg.key_lines[key] = lineno;
        try {
            if (key == "L") {
                cfg.L = parse_integer<int>(value);
            } else if (key == "boundary") {
                if (value == "pbc" || value == "periodic") cfg.boundary = Boundary::Periodic;
                else if (value == "obc" || value == "open") cfg.boundary = Boundary::Open;
                else throw InputError("expected pbc or obc, got '" + value + "'");
            } else if (key == "initial") {
                cfg.initials.clear();
                for (const auto& item : split_list(value)) {
                    InitialState s;
                    if (item == "neel") s = InitialState::Neel;
                    else if (item == "singlet") s = InitialState::Singlet;
                    else throw InputError("expected neel or singlet, got '" + item + "'");
                    if (std::find(cfg.initials.begin(), cfg.initials.end(), s) != cfg.initials.end()) throw InputError("'" + item + "' listed twice");
                    cfg.initials.push_back(s);
                }
            } else if (key == "times") {
                cfg.times.clear();
                for (const auto& item : split_list(value)) cfg.times.push_back(parse_time_expression(item));
            } else if (key == "t_start") {
                t_start = parse_time_expression(value);
            } else if (key == "t_stop") {
                t_stop = parse_time_expression(value);
            } else if (key == "t_count") {
                t_count = parse_integer<int>(value);
                if (*t_count < 1) throw InputError("must be >= 1");
            } else if (key == "subsystem") {
                cfg.subsystem.clear();
                if (value != "half") {
                    for (const auto& item : split_list(value)) cfg.subsystem.push_back(parse_integer<int>(item) - 1);
                }
            } else if (key == "n_unitaries") {
                cfg.n_unitaries = parse_integer<int>(value);
            } else if (key == "n_shots") {
                cfg.n_shots = parse_integer<std::uint64_t>(value);
            } else if (key == "twist_shots") {
                cfg.twist_shots = parse_integer<std::uint64_t>(value);
            } else if (key == "p_layer") {
                cfg.p_layer = parse_number(value);
            } else if (key == "readout_flip") {
                cfg.readout_flip = parse_number(value);
            } else if (key == "estimator") {
                if (value == "unbiased") cfg.estimator = EstimatorVariant::Unbiased;
                else if (value == "plugin") cfg.estimator = EstimatorVariant::PlugIn;
                else throw InputError("expected unbiased or plugin, got '" + value + "'");
            } else if (key == "mitigate") {
                cfg.mitigate = parse_bool(value);
            } else if (key == "p_tot_source") {
                if (value == "estimated") cfg.p_tot_source = PTotSource::Estimated;
                else if (value == "true") cfg.p_tot_source = PTotSource::True;
                else throw InputError("expected estimated or true, got '" + value + "'");
            } else if (key == "shift") {
                if (value == "none") cfg.shift = ShiftChoice::None;
                else if (value == "zero_at_t0") cfg.shift = ShiftChoice::ZeroAtT0;
                else if (value == "valley_to_zero") cfg.shift = ShiftChoice::ValleyToZero;
                else throw InputError("expected none, zero_at_t0 or valley_to_zero, got '" + value + "'");
            } else if (key == "evolution") {
                if (value == "decomposed") cfg.evolution = EvolutionMode::Decomposed;
                else if (value == "fused") cfg.evolution = EvolutionMode::Fused;
                else throw InputError("expected decomposed or fused, got '" + value + "'");
            } else if (key == "outputs") {
                cfg.outputs = {false, false, false};
                if (value != "none") {
                    for (const auto& item : split_list(value)) {
                        if (item == "entropy") cfg.outputs.entropy = true;
                        else if (item == "twist") cfg.outputs.twist = true;
                        else if (item == "berry") cfg.outputs.berry = true;
                        else throw InputError("unknown output '" + item + "'");
                    }
                }
            } else if (key == "save_shots") {
                cfg.save_shots = parse_bool(value);
            } else if (key == "dump_circuit") {
                cfg.dump_circuit = parse_bool(value);
            } else if (key == "seed") {
                cfg.seed = parse_integer<std::uint64_t>(value);
            } else if (key == "q_spin") {
                cfg.q_spin = parse_integer<int>(value);
            } else if (key == "q_particle") {
                cfg.q_particle = parse_integer<int>(value);
            } else {
                throw ConfigError(source, lineno, key, "unknown key");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const InputError& e) {
            throw ConfigError(source, lineno, key, e.what());
        }
    }
    const bool range = t_start || t_stop || t_count;
    if (range) {
        if (cfg.key_lines.count("times")) throw ConfigError(source, cfg.key_lines["times"], "times", "give either times or t_start/t_stop/t_count");
        if (!(t_start && t_stop && t_count)) {
            const std::string key = t_start ? "t_start" : t_stop ? "t_stop" : "t_count";
            throw ConfigError(source, cfg.key_lines[key], key, "t_start, t_stop and t_count must be given together");
        }
        cfg.times.clear();
        const int n = *t_count;
        for (int i = 0; i < n; ++i) cfg.times.push_back(n == 1 ? *t_start : *t_start + (*t_stop - *t_start) * i / (n - 1));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    return parse_config(in, source);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "file", "cannot open configuration");
    return parse_config(in, path.string());
}

} // namespace sshq
