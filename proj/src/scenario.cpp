#include "mcsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace mcsim {

double Scenario::v_im() const {
    if (input_v_phase_peak) return *input_v_phase_peak;
    return input_v_ll_rms * std::sqrt(2.0) / std::sqrt(3.0);
}

void Scenario::validate() const {
    if (!(v_im() > 0.0)) throw ConfigError("scenario: input voltage must be > 0");
    if (!(f_i > 0.0) || !(f_o > 0.0)) throw ConfigError("scenario: frequencies must be > 0");
    if (!(f_sw >= 50.0 * std::max(f_i, f_o)))
        throw ConfigError("scenario: f_sw must be at least 50x the fundamentals");
    if (!(duration >= 10.0 / f_o))
        throw ConfigError("scenario: duration must cover at least 10 output periods");
    if (q_target < 0.0) throw ConfigError("scenario: q must be >= 0");
    if (transient_frac < 0.0 || transient_frac > 0.9)
        throw ConfigError("scenario: transient_frac must be in [0, 0.9]");
    if (samples_per_period < 1 || samples_per_period > 64)
        throw ConfigError("scenario: samples_per_period must be in [1, 64]");
    if (n_max < 1) throw ConfigError("scenario: n_max must be >= 1");
    if (load.kind == LoadKind::Motor) {
        try {
            load.motor.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("scenario: ") + e.what());
        }
    } else {
        try {
            load.rl.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("scenario: ") + e.what());
        }
    }
    if (filter.enabled) {
        if (!(filter.fc_hz > 0.0) || !(filter.fc_hz < f_sw))
            throw ConfigError("scenario: filter cutoff must be positive and below f_sw");
        if (!(filter.p_watts > 0.0))
            throw ConfigError("scenario: filter power rating must be > 0");
        if (filter.damping_r < 0.0)
            throw ConfigError("scenario: filter damping resistor must be >= 0");
    }
    if (control.fuzzy) {
        if (!(q_target > 0.0))
            throw ConfigError("scenario: fuzzy control needs a nonzero q reference");
        if (!(control.lpf_tau > 0.0))
            throw ConfigError("scenario: control lpf_tau must be > 0");
        for (double g : {control.gain_e, control.gain_ce, control.gain_u})
            if (!std::isnan(g) && !(g > 0.0))
                throw ConfigError("scenario: controller gains must be > 0");
    }
}

namespace {

double parse_number(const std::string& key, const std::string& value,
                    const std::string& origin) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos])))
            ++pos;
        if (pos != value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin + ": bad numeric value for '" + key + "': " + value);
    }
}

bool parse_bool(const std::string& key, const std::string& value,
                const std::string& origin) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError(origin + ": bad boolean for '" + key + "' (want true|false)");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& origin) {
    Scenario s;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "load" && section != "filter" && section != "control")
                throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(where + ": empty key or value");

        auto num = [&] { return parse_number(key, value, where); };
        if (section.empty()) {
            if (key == "name") s.name = value;
            else if (key == "input_v_ll_rms") s.input_v_ll_rms = num();
            else if (key == "input_v_phase_peak") s.input_v_phase_peak = num();
            else if (key == "f_i") s.f_i = num();
            else if (key == "phi_i") s.phi_i = num();
            else if (key == "f_o") s.f_o = num();
            else if (key == "phi_o") s.phi_o = num();
            else if (key == "q") s.q_target = num();
            else if (key == "method") {
                try {
                    s.method = method_from_name(value);
                } catch (const std::exception& e) {
                    throw ConfigError(where + ": " + e.what());
                }
            } else if (key == "f_sw") s.f_sw = num();
            else if (key == "duration") s.duration = num();
            else if (key == "transient_frac") s.transient_frac = num();
            else if (key == "samples_per_period")
                s.samples_per_period = static_cast<int>(num());
            else if (key == "n_max") s.n_max = static_cast<std::size_t>(num());
            else if (key == "sequencing") {
                if (value == "single") s.sequencing = SequenceStyle::SingleSided;
                else if (value == "double") s.sequencing = SequenceStyle::DoubleSided;
                else throw ConfigError(where + ": sequencing must be single|double");
            } else throw ConfigError(where + ": unknown key '" + key + "'");
        } else if (section == "load") {
            if (key == "type") {
                if (value == "r") s.load.kind = LoadKind::R;
                else if (value == "rl") s.load.kind = LoadKind::RL;
                else if (value == "motor") s.load.kind = LoadKind::Motor;
                else throw ConfigError(where + ": unknown load type '" + value + "'");
            } else if (key == "r") s.load.rl.r = num();
            else if (key == "l") s.load.rl.l = num();
            else if (key == "v_ll") s.load.motor.v_ll = num();
            else if (key == "f") s.load.motor.f = num();
            else if (key == "r_s") s.load.motor.r_s = num();
            else if (key == "l_ls") s.load.motor.l_ls = num();
            else if (key == "r_r") s.load.motor.r_r = num();
            else if (key == "l_lr") s.load.motor.l_lr = num();
            else if (key == "l_m") s.load.motor.l_m = num();
            else if (key == "pole_pairs") s.load.motor.pole_pairs = static_cast<int>(num());
            else if (key == "inertia") s.load.motor.inertia = num();
            else if (key == "load_torque") s.load.motor.load_torque = num();
            else throw ConfigError(where + ": unknown [load] key '" + key + "'");
        } else if (section == "filter") {
            if (key == "enabled") s.filter.enabled = parse_bool(key, value, where);
            else if (key == "fc_hz") s.filter.fc_hz = num();
            else if (key == "p_watts") s.filter.p_watts = num();
            else if (key == "damping_r") s.filter.damping_r = num();
            else throw ConfigError(where + ": unknown [filter] key '" + key + "'");
        } else {  // control
            if (key == "mode") {
                if (value == "off") s.control.fuzzy = false;
                else if (value == "fuzzy") s.control.fuzzy = true;
                else throw ConfigError(where + ": unknown control mode '" + value + "'");
            } else if (key == "gain_e") s.control.gain_e = num();
            else if (key == "gain_ce") s.control.gain_ce = num();
            else if (key == "gain_u") s.control.gain_u = num();
            else if (key == "initial_error") s.control.initial_error = num();
            else if (key == "lpf_tau") s.control.lpf_tau = num();
            else if (key == "rulebase_file") s.control.rulebase_file = value;
            else throw ConfigError(where + ": unknown [control] key '" + key + "'");
        }
    }
    // R load is the zero-inductance special case of the RL model.
    if (s.load.kind == LoadKind::R) s.load.rl.l = 0.0;
    s.validate();
    return s;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open scenario file: " + path);
    return parse_scenario(f, path);
}

}  // namespace mcsim
