#include "mcsim/loads.hpp"

#include <cmath>
#include <stdexcept>

#include "mcsim/dqfuzzy.hpp"

namespace mcsim {

void RLParams::validate() const {
    if (!(r > 0.0)) throw std::invalid_argument("RLParams: r must be > 0");
    if (l < 0.0) throw std::invalid_argument("RLParams: l must be >= 0");
}

namespace {

struct PhaseStep {
    double i_new;
    double energy;  // resistor energy over the step
};

PhaseStep step_phase(double r, double l, double i0, double v, double dt) {
    if (l == 0.0) {
        const double i = v / r;
        return {i, r * i * i * dt};
    }
    const double tau = l / r;
    const double e1 = std::exp(-dt / tau);
    const double c = v / r;  // steady-state current
    const double d0 = i0 - c;
    const double i_new = c + d0 * e1;
    // closed-form integral of r*i(t)^2 over the step
    const double e2 = std::exp(-2.0 * dt / tau);
    const double energy = r * (c * c * dt + 2.0 * c * d0 * tau * (1.0 - e1) +
                               d0 * d0 * 0.5 * tau * (1.0 - e2));
    return {i_new, energy};
}

}  // namespace

RLState step_rl(const RLParams& p, const RLState& s, const ThreePhase& v_applied,
                double dt) {
    p.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("step_rl: dt must be > 0");
    const double mean = (v_applied.a + v_applied.b + v_applied.c) / 3.0;
    const PhaseStep pa = step_phase(p.r, p.l, s.i.a, v_applied.a - mean, dt);
    const PhaseStep pb = step_phase(p.r, p.l, s.i.b, v_applied.b - mean, dt);
    const PhaseStep pc = step_phase(p.r, p.l, s.i.c, v_applied.c - mean, dt);
    return {{pa.i_new, pb.i_new, pc.i_new},
            s.dissipated + pa.energy + pb.energy + pc.energy};
}

void MotorParams::validate() const {
    if (!(r_s > 0.0) || !(r_r > 0.0) || !(l_ls > 0.0) || !(l_lr > 0.0) || !(l_m > 0.0))
        throw std::invalid_argument("MotorParams: resistances/inductances must be > 0");
    if (pole_pairs < 1) throw std::invalid_argument("MotorParams: pole_pairs must be >= 1");
    if (!(inertia > 0.0)) throw std::invalid_argument("MotorParams: inertia must be > 0");
}

namespace {

struct MotorCurrents {
    double i_qs, i_ds, i_qr, i_dr;
};

MotorCurrents currents_from_flux(const MotorParams& p, double lam_qs, double lam_ds,
                                 double lam_qr, double lam_dr) {
    const double l_a = 1.0 / (1.0 / p.l_m + 1.0 / p.l_ls + 1.0 / p.l_lr);
    const double lam_mq = l_a * (lam_qs / p.l_ls + lam_qr / p.l_lr);
    const double lam_md = l_a * (lam_ds / p.l_ls + lam_dr / p.l_lr);
    return {(lam_qs - lam_mq) / p.l_ls, (lam_ds - lam_md) / p.l_ls,
            (lam_qr - lam_mq) / p.l_lr, (lam_dr - lam_md) / p.l_lr};
}

struct Deriv {
    double d[7];  // lam_qs, lam_ds, lam_qr, lam_dr, omega_re, copper, elec
};

Deriv motor_deriv(const MotorParams& p, const double y[7], double v_qs, double v_ds) {
    const MotorCurrents c = currents_from_flux(p, y[0], y[1], y[2], y[3]);
    const double omega_re = y[4];
    const double pp = static_cast<double>(p.pole_pairs);
    const double torque = 1.5 * pp * (y[1] * c.i_qs - y[0] * c.i_ds);
    Deriv dv{};
    dv.d[0] = v_qs - p.r_s * c.i_qs;
    dv.d[1] = v_ds - p.r_s * c.i_ds;
    dv.d[2] = -p.r_r * c.i_qr + omega_re * y[3];
    dv.d[3] = -p.r_r * c.i_dr - omega_re * y[2];
    dv.d[4] = pp / p.inertia * (torque - p.load_torque);
    dv.d[5] = 1.5 * (p.r_s * (c.i_qs * c.i_qs + c.i_ds * c.i_ds) +
                     p.r_r * (c.i_qr * c.i_qr + c.i_dr * c.i_dr));
    dv.d[6] = 1.5 * (v_qs * c.i_qs + v_ds * c.i_ds);
    return dv;
}

}  // namespace

MotorState step_motor(const MotorParams& p, const MotorState& s,
                      const ThreePhase& v_applied, double dt) {
    p.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("step_motor: dt must be > 0");
    const Dq0 v = abc_to_dq0(v_applied, 0.0);  // stationary frame

    double y[7] = {s.lam_qs, s.lam_ds, s.lam_qr, s.lam_dr,
                   s.omega_re, s.copper_loss, s.elec_energy};
    const Deriv k1 = motor_deriv(p, y, v.q, v.d);
    double y2[7], y3[7], y4[7];
    for (int i = 0; i < 7; ++i) y2[i] = y[i] + 0.5 * dt * k1.d[i];
    const Deriv k2 = motor_deriv(p, y2, v.q, v.d);
    for (int i = 0; i < 7; ++i) y3[i] = y[i] + 0.5 * dt * k2.d[i];
    const Deriv k3 = motor_deriv(p, y3, v.q, v.d);
    for (int i = 0; i < 7; ++i) y4[i] = y[i] + dt * k3.d[i];
    const Deriv k4 = motor_deriv(p, y4, v.q, v.d);
    for (int i = 0; i < 7; ++i)
        y[i] += dt / 6.0 * (k1.d[i] + 2.0 * k2.d[i] + 2.0 * k3.d[i] + k4.d[i]);

    return {y[0], y[1], y[2], y[3], y[4], y[5], y[6]};
}

ThreePhase motor_stator_current(const MotorParams& p, const MotorState& s) {
    const MotorCurrents c =
        currents_from_flux(p, s.lam_qs, s.lam_ds, s.lam_qr, s.lam_dr);
    return dq0_to_abc({c.i_ds, c.i_qs, 0.0}, 0.0);
}

double motor_torque(const MotorParams& p, const MotorState& s) {
    const MotorCurrents c =
        currents_from_flux(p, s.lam_qs, s.lam_ds, s.lam_qr, s.lam_dr);
    return 1.5 * static_cast<double>(p.pole_pairs) *
           (s.lam_ds * c.i_qs - s.lam_qs * c.i_ds);
}

}  // namespace mcsim
