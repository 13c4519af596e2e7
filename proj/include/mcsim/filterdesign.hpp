#pragma once

#include <optional>

#include "mcsim/waveforms.hpp"

namespace mcsim {

// Input LC filter sized for a given power rating and cutoff.
struct FilterDesign {
    double c_f = 0.0;      // farads
    double l_f = 0.0;      // henries
    double f_c = 0.0;      // hertz, cutoff
    double p_rating = 0.0; // watts
    double v_m = 0.0;      // input peak volts
    double omega_i = 0.0;  // rad/s

    void validate() const;  // c_f, l_f > 0 and resonance identity
};

// C_f = 2P / (3 v_m^2 omega_i);  L_f = 1 / ((2 pi f_c)^2 C_f).
// If a switching frequency is supplied, f_c must lie below it.
FilterDesign design_input_filter(double p_watts, double v_m, double omega_i,
                                 double f_c_hz,
                                 std::optional<double> f_switching_hz = {});

// Per-phase series-L / shunt-C state between the source and the converter.
struct FilterState {
    ThreePhase i_l;          // inductor (source-side) currents
    ThreePhase v_c;          // capacitor (terminal) voltages
    ThreePhase v_src_prev;   // source voltage at the previous step boundary
    bool primed = false;     // v_src_prev valid
    double dissipated = 0.0; // damping resistor energy, joules
};

struct FilterPort {
    ThreePhase terminal_v;  // voltage feeding the converter
    ThreePhase source_i;    // current drawn from the source
};

// One trapezoidal step of length dt. source_v is the source voltage at the
// END of the interval (the previous endpoint is kept in the state);
// converter_i is held constant over the step. damping_r, when positive, is a
// resistor in parallel with the filter inductor.
FilterPort step_input_filter(const FilterDesign& d, const ThreePhase& source_v,
                             const ThreePhase& converter_i, double dt,
                             FilterState& state, double damping_r = 0.0);

}  // namespace mcsim
