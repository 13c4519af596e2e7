#pragma once

#include "mcsim/waveforms.hpp"

namespace mcsim {

// Star-connected per-phase series R-L (R load is the l = 0 special case).
struct RLParams {
    double r = 10.0;        // ohms
    double l = 200e-6;      // henries

    void validate() const;  // r > 0, l >= 0
};

struct RLState {
    ThreePhase i;            // phase currents, amperes
    double dissipated = 0.0;  // accumulated resistor energy, joules
};

// Exact first-order update for piecewise-constant applied voltage. The star
// point floats: each phase sees v_j - mean(v), which removes common mode for
// balanced impedances. Resistor dissipation is accumulated in closed form.
RLState step_rl(const RLParams& p, const RLState& s, const ThreePhase& v_applied,
                double dt);

// Standard squirrel-cage induction machine, stationary-frame dq flux-linkage
// model plus the mechanical equation, advanced with RK4.
struct MotorParams {
    double v_ll = 220.0;     // rated line-to-line volts (nameplate)
    double f = 60.0;         // rated hertz (nameplate)
    double r_s = 0.435;      // stator resistance, ohms
    double l_ls = 2e-3;      // stator leakage inductance, henries
    double r_r = 0.816;      // rotor resistance (referred), ohms
    double l_lr = 2e-3;      // rotor leakage inductance, henries
    double l_m = 69.31e-3;   // magnetizing inductance, henries
    int pole_pairs = 2;
    double inertia = 0.089;  // kg m^2
    double load_torque = 0.0;

    void validate() const;
};

struct MotorState {
    double lam_qs = 0.0;  // stator flux linkages, V s
    double lam_ds = 0.0;
    double lam_qr = 0.0;  // rotor flux linkages (referred)
    double lam_dr = 0.0;
    double omega_re = 0.0;   // electrical rotor speed, rad/s
    double copper_loss = 0.0;  // accumulated stator+rotor copper energy, J
    double elec_energy = 0.0;  // accumulated electrical input energy, J
};

MotorState step_motor(const MotorParams& p, const MotorState& s,
                      const ThreePhase& v_applied, double dt);

// Instantaneous stator currents reconstructed from the flux state.
ThreePhase motor_stator_current(const MotorParams& p, const MotorState& s);

// Electromagnetic torque at the current state, N m.
double motor_torque(const MotorParams& p, const MotorState& s);

}  // namespace mcsim
