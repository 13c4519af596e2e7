#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mcsim/loads.hpp"
#include "mcsim/waveforms.hpp"

using namespace mcsim;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("rl load") {
    const RLParams p{10.0, 200e-6};
    SUBCASE("source-free decay by exp(-r dt / l)") {
        RLState s{{2.0, -1.0, -1.0}, 0.0};
        const double dt = 5e-6;
        const RLState s2 = step_rl(p, s, {0.0, 0.0, 0.0}, dt);
        const double decay = std::exp(-p.r * dt / p.l);
        CHECK(s2.i.a == doctest::Approx(2.0 * decay).epsilon(1e-12));
        CHECK(s2.i.b == doctest::Approx(-decay).epsilon(1e-12));
    }
    SUBCASE("long step reaches v_ph / r") {
        RLState s;
        const RLState s2 = step_rl(p, s, {30.0, 0.0, 0.0}, 1.0);
        // star point: v_ph_a = 30 - 10 = 20
        CHECK(s2.i.a == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(s2.i.b == doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(s2.i.c == doctest::Approx(-1.0).epsilon(1e-9));
    }
    SUBCASE("l = 0 responds instantaneously") {
        const RLParams r_only{10.0, 0.0};
        RLState s;
        const RLState s2 = step_rl(r_only, s, {10.0, -5.0, -5.0}, 1e-6);
        CHECK(s2.i.a == doctest::Approx(1.0));
    }
    SUBCASE("steady-state phasor oracle at 60 Hz") {
        // amplitude V/|Z|, lag atan(wл/r) ~ 0.43 deg
        const double f = 60.0, vhat = 100.0;
        const double w = kTwoPi * f;
        const double zmag = std::hypot(p.r, w * p.l);
        const double lag = std::atan2(w * p.l, p.r);
        CHECK(lag * 180.0 / std::numbers::pi == doctest::Approx(0.432).epsilon(0.01));

        // integrate a few periods with fine piecewise-constant voltage steps
        const int spp = 4000;
        const double dt = 1.0 / (f * spp);
        RLState s;
        for (int i = 0; i < spp * 6; ++i) {
            const double t = i * dt;
            const ThreePhase v{vhat * std::cos(w * t),
                               vhat * std::cos(w * t - kTwoPi / 3.0),
                               vhat * std::cos(w * t + kTwoPi / 3.0)};
            s = step_rl(p, s, v, dt);
        }
        // project the last period of current onto cos/sin
        RLState st = s;
        double cs = 0.0, sn = 0.0;
        for (int i = 0; i < spp; ++i) {
            const double t = (spp * 6 + i) * dt;
            const ThreePhase v{vhat * std::cos(w * t),
                               vhat * std::cos(w * t - kTwoPi / 3.0),
                               vhat * std::cos(w * t + kTwoPi / 3.0)};
            cs += 2.0 * st.i.a * std::cos(w * t) / spp;
            sn += 2.0 * st.i.a * std::sin(w * t) / spp;
            st = step_rl(p, st, v, dt);
        }
        const double amp = std::hypot(cs, sn);
        const double phase = std::atan2(sn, cs);  // lag is positive
        CHECK(amp == doctest::Approx(vhat / zmag).epsilon(5e-3));
        CHECK(phase == doctest::Approx(lag).epsilon(0.05));
    }
    SUBCASE("energy: stored is non-increasing source-free") {
        RLState s{{3.0, -1.5, -1.5}, 0.0};
        double prev = 0.5 * p.l * (9.0 + 2.25 + 2.25);
        for (int i = 0; i < 50; ++i) {
            s = step_rl(p, s, {0.0, 0.0, 0.0}, 2e-6);
            const double e =
                0.5 * p.l * (s.i.a * s.i.a + s.i.b * s.i.b + s.i.c * s.i.c);
            CHECK(e <= prev + 1e-18);
            prev = e;
        }
    }
    SUBCASE("balanced start stays balanced (sum of currents ~ 0)") {
        RLState s{{1.0, -0.25, -0.75}, 0.0};
        for (int i = 0; i < 200; ++i) {
            const double t = i * 3e-6;
            const ThreePhase v{50.0 * std::cos(kTwoPi * 60.0 * t + 0.2),
                               -20.0 * std::sin(kTwoPi * 120.0 * t), 12.0};
            s = step_rl(p, s, v, 3e-6);
            CHECK(std::abs(s.i.a + s.i.b + s.i.c) < 1e-9);
        }
    }
    SUBCASE("exact update: two half steps equal one full step") {
        RLState s{{1.0, 0.5, -1.5}, 0.0};
        const ThreePhase v{17.0, -4.0, -13.0};
        const RLState one = step_rl(p, s, v, 8e-6);
        const RLState half = step_rl(p, step_rl(p, s, v, 4e-6), v, 4e-6);
        CHECK(std::abs(one.i.a - half.i.a) < 1e-12 * std::abs(one.i.a));
        CHECK(std::abs(one.i.b - half.i.b) < 1e-12);
        CHECK(std::abs(one.i.c - half.i.c) < 1e-12);
        CHECK(one.dissipated == doctest::Approx(half.dissipated).epsilon(1e-12));
    }
    SUBCASE("energy balance: input = stored delta + dissipated") {
        RLState s;
        double e_in = 0.0;
        const double dt = 1e-6;
        for (int i = 0; i < 5000; ++i) {
            const double t = i * dt;
            const ThreePhase v{80.0 * std::cos(kTwoPi * 60.0 * t),
                               80.0 * std::cos(kTwoPi * 60.0 * t - kTwoPi / 3.0),
                               80.0 * std::cos(kTwoPi * 60.0 * t + kTwoPi / 3.0)};
            // trapezoid on input power (v is balanced so v_ph = v here)
            const RLState s2 = step_rl(p, s, v, dt);
            e_in += 0.5 * dt *
                    ((v.a * s.i.a + v.b * s.i.b + v.c * s.i.c) +
                     (v.a * s2.i.a + v.b * s2.i.b + v.c * s2.i.c));
            s = s2;
        }
        const double stored =
            0.5 * p.l * (s.i.a * s.i.a + s.i.b * s.i.b + s.i.c * s.i.c);
        CHECK(e_in == doctest::Approx(s.dissipated + stored).epsilon(1e-4));
    }
}

TEST_CASE("induction motor") {
    const MotorParams mp{};  // nameplate defaults
    SUBCASE("zero input keeps zero state") {
        MotorState s;
        for (int i = 0; i < 100; ++i) s = step_motor(mp, s, {0.0, 0.0, 0.0}, 1e-5);
        CHECK(s.lam_qs == 0.0);
        CHECK(s.omega_re == 0.0);
    }
    SUBCASE("free acceleration approaches synchronous speed") {
        // rated 220 V_ll, 60 Hz supply, no load torque
        const double vpk = 220.0 * std::sqrt(2.0) / std::sqrt(3.0);
        const double w = kTwoPi * 60.0;
        MotorState s;
        const double dt = 2e-5;
        const int steps = static_cast<int>(3.0 / dt);  // 3 s of simulated time
        for (int i = 0; i < steps; ++i) {
            const double t = i * dt;
            const ThreePhase v{vpk * std::cos(w * t), vpk * std::cos(w * t - kTwoPi / 3.0),
                               vpk * std::cos(w * t + kTwoPi / 3.0)};
            s = step_motor(mp, s, v, dt);
        }
        // electrical rotor speed approaches omega_e; slip -> ~0
        CHECK(s.omega_re == doctest::Approx(w).epsilon(0.01));
        CHECK(motor_torque(mp, s) == doctest::Approx(0.0).epsilon(0.05 * 20.0));
        // energy books: electrical in = copper + kinetic + field (approximately)
        const double kinetic = 0.5 * mp.inertia *
                               (s.omega_re / mp.pole_pairs) *
                               (s.omega_re / mp.pole_pairs);
        CHECK(s.elec_energy > s.copper_loss + kinetic * 0.98);
        CHECK(s.elec_energy ==
              doctest::Approx(s.copper_loss + kinetic).epsilon(0.05));
    }
    SUBCASE("stator current reconstruction is balanced") {
        MotorState s;
        const double vpk = 100.0;
        const double w = kTwoPi * 60.0;
        for (int i = 0; i < 2000; ++i) {
            const double t = i * 1e-5;
            const ThreePhase v{vpk * std::cos(w * t), vpk * std::cos(w * t - kTwoPi / 3.0),
                               vpk * std::cos(w * t + kTwoPi / 3.0)};
            s = step_motor(mp, s, v, 1e-5);
        }
        const ThreePhase i = motor_stator_current(mp, s);
        CHECK(std::abs(i.a + i.b + i.c) < 1e-9 * std::abs(i.a));
    }
    SUBCASE("parameter validation") {
        MotorParams bad = mp;
        bad.l_m = 0.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = mp;
        bad.pole_pairs = 0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
}
