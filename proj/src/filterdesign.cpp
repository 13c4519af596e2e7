#include "mcsim/filterdesign.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mcsim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void FilterDesign::validate() const {
    if (!(c_f > 0.0) || !(l_f > 0.0))
        throw std::invalid_argument("FilterDesign: c_f and l_f must be > 0");
    const double f_res = 1.0 / (kTwoPi * std::sqrt(l_f * c_f));
    if (std::abs(f_res - f_c) > 1e-9 * f_c)
        throw std::invalid_argument("FilterDesign: resonance identity violated");
}

FilterDesign design_input_filter(double p_watts, double v_m, double omega_i,
                                 double f_c_hz,
                                 std::optional<double> f_switching_hz) {
    if (!(p_watts > 0.0) || !(v_m > 0.0) || !(omega_i > 0.0) || !(f_c_hz > 0.0))
        throw std::invalid_argument("design_input_filter: all inputs must be > 0");
    if (f_switching_hz && !(f_c_hz < *f_switching_hz))
        throw std::invalid_argument(
            "design_input_filter: cutoff must lie below the switching frequency");
    FilterDesign d;
    d.p_rating = p_watts;
    d.v_m = v_m;
    d.omega_i = omega_i;
    d.f_c = f_c_hz;
    d.c_f = 2.0 * p_watts / (3.0 * v_m * v_m * omega_i);
    d.l_f = 1.0 / ((kTwoPi * f_c_hz) * (kTwoPi * f_c_hz) * d.c_f);
    d.validate();
    return d;
}

namespace {

struct PhaseVars {
    double i_l, v_c, vs_prev;
};

struct PhaseOut {
    double i_l, v_c, source_i, damp_energy;
};

PhaseOut step_phase(const FilterDesign& d, double vs0, double vs1, double i_conv,
                    double i0, double v0, double dt, double damping_r) {
    const double a = dt / (2.0 * d.l_f);
    const double b = dt / (2.0 * d.c_f);
    const double g = damping_r > 0.0 ? 1.0 / damping_r : 0.0;
    const double h = a + g;
    const double s = vs0 + vs1;
    const double v1 =
        (v0 * (1.0 - b * h) + 2.0 * b * (i0 - i_conv) + b * h * s) / (1.0 + b * h);
    const double i1 = i0 + a * (s - v0 - v1);
    double damp = 0.0;
    if (g > 0.0) {
        const double r0 = vs0 - v0;
        const double r1 = vs1 - v1;
        damp = 0.5 * dt * g * (r0 * r0 + r1 * r1);
    }
    return {i1, v1, i1 + g * (vs1 - v1), damp};
}

}  // namespace

FilterPort step_input_filter(const FilterDesign& d, const ThreePhase& source_v,
                             const ThreePhase& converter_i, double dt,
                             FilterState& state, double damping_r) {
    d.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("step_input_filter: dt must be > 0");
    if (!state.primed) {
        state.v_src_prev = source_v;
        state.primed = true;
    }
    const PhaseOut pa = step_phase(d, state.v_src_prev.a, source_v.a, converter_i.a,
                                   state.i_l.a, state.v_c.a, dt, damping_r);
    const PhaseOut pb = step_phase(d, state.v_src_prev.b, source_v.b, converter_i.b,
                                   state.i_l.b, state.v_c.b, dt, damping_r);
    const PhaseOut pc = step_phase(d, state.v_src_prev.c, source_v.c, converter_i.c,
                                   state.i_l.c, state.v_c.c, dt, damping_r);
    state.i_l = {pa.i_l, pb.i_l, pc.i_l};
    state.v_c = {pa.v_c, pb.v_c, pc.v_c};
    state.v_src_prev = source_v;
    state.dissipated += pa.damp_energy + pb.damp_energy + pc.damp_energy;
    return {{pa.v_c, pb.v_c, pc.v_c}, {pa.source_i, pb.source_i, pc.source_i}};
}

}  // namespace mcsim
