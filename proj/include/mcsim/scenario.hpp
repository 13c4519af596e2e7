#pragma once

#include <cmath>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "mcsim/loads.hpp"
#include "mcsim/modulators.hpp"

namespace mcsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class LoadKind { R, RL, Motor };

struct LoadSpec {
    LoadKind kind = LoadKind::RL;
    RLParams rl{};        // used for R (l forced to 0) and RL
    MotorParams motor{};  // used for Motor
};

struct FilterSpec {
    bool enabled = false;
    double fc_hz = 2000.0;
    double p_watts = 5000.0;
    double damping_r = 0.0;  // 0 = off
};

struct ControlSpec {
    bool fuzzy = false;
    // NaN = derive the default from the reference amplitude at run time
    // (gain_e = 1/V_ref, gain_ce = 10/V_ref, gain_u = 0.05*V_ref).
    double gain_e = NAN;
    double gain_ce = NAN;
    double gain_u = NAN;
    double initial_error = 0.0;  // fractional initial amplitude error
    double lpf_tau = 1e-3;       // measurement filter time constant, seconds
    std::optional<std::string> rulebase_file;
};

// Full experiment description. Deterministic by construction (no seeds).
struct Scenario {
    std::string name = "scenario";
    double input_v_ll_rms = 440.0;
    std::optional<double> input_v_phase_peak;  // overrides the line-line reading
    double f_i = 60.0;
    double phi_i = 0.0;
    double f_o = 30.0;
    double phi_o = 0.0;
    double q_target = 0.8;
    MethodId method = MethodId::VenturiniOptimum;
    double f_sw = 16000.0;
    double duration = 0.5;
    double transient_frac = 0.2;
    int samples_per_period = 32;  // recording density per switching period (<= 64)
    std::size_t n_max = 50;       // harmonic cutoff for reported spectra
    SequenceStyle sequencing = SequenceStyle::SingleSided;
    LoadSpec load{};
    FilterSpec filter{};
    ControlSpec control{};

    // Input per-phase peak: explicit override, else line-to-line RMS reading.
    double v_im() const;
    void validate() const;  // throws ConfigError
};

Scenario parse_scenario(std::istream& in, const std::string& origin = "<stream>");
Scenario parse_scenario_file(const std::string& path);

}  // namespace mcsim
