#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mcsim/filterdesign.hpp"

using namespace mcsim;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// steady-state (phasor) initialization for one phase of the undamped LC
// driven by vs = cos(w t), no converter current
struct SteadyState {
    double i_l0, v_c0;
};

SteadyState lc_steady(const FilterDesign& d, double w) {
    const std::complex<double> jw(0.0, w);
    const std::complex<double> zl = jw * d.l_f;
    const std::complex<double> zc = 1.0 / (jw * d.c_f);
    const std::complex<double> h = zc / (zl + zc);   // terminal voltage phasor
    const std::complex<double> il = h / zc;          // inductor current phasor
    // v(t) = Re[h e^{jwt}] with vs = cos(wt); at t = 0:
    return {il.real(), h.real()};
}

// measured amplitude gain of the filter at frequency f (phasor-initialized)
double measured_gain(const FilterDesign& d, double f) {
    const double w = kTwoPi * f;
    const int spp = 400;
    const double dt = 1.0 / (f * spp);
    FilterState st;
    const SteadyState ss = lc_steady(d, w);
    st.i_l = {ss.i_l0, 0.0, 0.0};
    st.v_c = {ss.v_c0, 0.0, 0.0};
    st.v_src_prev = {1.0, 0.0, 0.0};
    st.primed = true;
    double sum_sq = 0.0;
    const int n = spp * 4;
    for (int i = 1; i <= n; ++i) {
        const double t = i * dt;
        const ThreePhase vs{std::cos(w * t), 0.0, 0.0};
        const FilterPort out = step_input_filter(d, vs, {0.0, 0.0, 0.0}, dt, st);
        sum_sq += out.terminal_v.a * out.terminal_v.a;
    }
    return std::sqrt(2.0 * sum_sq / n);  // amplitude of the sinusoid
}

}  // namespace

TEST_CASE("design_input_filter formulas") {
    SUBCASE("worked example: 5 kW, 311 V peak, 60 Hz, 2 kHz cutoff") {
        const FilterDesign d =
            design_input_filter(5000.0, 311.0, kTwoPi * 60.0, 2000.0);
        CHECK(d.c_f == doctest::Approx(9.14169754539663e-05).epsilon(1e-12));
        CHECK(d.l_f == doctest::Approx(6.927131362856044e-05).epsilon(1e-12));
        CHECK(1.0 / (kTwoPi * std::sqrt(d.l_f * d.c_f)) ==
              doctest::Approx(2000.0).epsilon(1e-12));
    }
    SUBCASE("power scaling: 4x power -> 4x C, L/4, same cutoff") {
        const FilterDesign d1 =
            design_input_filter(5000.0, 311.0, kTwoPi * 60.0, 2000.0);
        const FilterDesign d4 =
            design_input_filter(20000.0, 311.0, kTwoPi * 60.0, 2000.0);
        CHECK(d4.c_f == doctest::Approx(4.0 * d1.c_f).epsilon(1e-12));
        CHECK(d4.l_f == doctest::Approx(d1.l_f / 4.0).epsilon(1e-12));
        CHECK(d4.f_c == d1.f_c);
    }
    SUBCASE("resonance identity for 100 random parameter sets") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> up(100.0, 100000.0), uv(50.0, 800.0),
            uf(30.0, 70.0), uc(200.0, 8000.0);
        for (int i = 0; i < 100; ++i) {
            const FilterDesign d =
                design_input_filter(up(rng), uv(rng), kTwoPi * uf(rng), uc(rng));
            const double f_res = 1.0 / (kTwoPi * std::sqrt(d.l_f * d.c_f));
            CHECK(std::abs(f_res - d.f_c) <= 1e-9 * d.f_c);
        }
    }
    SUBCASE("cutoff at or above the switching frequency rejected") {
        CHECK_THROWS_AS(
            design_input_filter(5000.0, 311.0, kTwoPi * 60.0, 16000.0, 16000.0),
            std::invalid_argument);
        CHECK_NOTHROW(
            design_input_filter(5000.0, 311.0, kTwoPi * 60.0, 2000.0, 16000.0));
        CHECK_THROWS_AS(design_input_filter(-1.0, 311.0, kTwoPi * 60.0, 2000.0),
                        std::invalid_argument);
    }
}

TEST_CASE("step_input_filter") {
    const FilterDesign d = design_input_filter(5000.0, 311.0, kTwoPi * 60.0, 2000.0);
    SUBCASE("dc steady state passes through") {
        FilterState st;
        st.v_c = {10.0, 10.0, 10.0};
        st.v_src_prev = {10.0, 10.0, 10.0};
        st.primed = true;
        for (int i = 0; i < 100; ++i) {
            const FilterPort out = step_input_filter(d, {10.0, 10.0, 10.0},
                                                     {0.0, 0.0, 0.0}, 1e-5, st);
            CHECK(out.terminal_v.a == doctest::Approx(10.0).epsilon(1e-12));
            CHECK(out.source_i.a == doctest::Approx(0.0));
        }
    }
    SUBCASE("gain ~ 1 well below cutoff") {
        CHECK(measured_gain(d, d.f_c / 40.0) == doctest::Approx(1.0).epsilon(0.01));
    }
    SUBCASE("gain < 0.02 at 10x cutoff") {
        const double g = measured_gain(d, 10.0 * d.f_c);
        CHECK(g < 0.02);
        // analytic |1/(1 - 100)| with a little room for discretization
        CHECK(g == doctest::Approx(1.0 / 99.0).epsilon(0.05));
    }
    SUBCASE("undamped trapezoid conserves energy source-free (passivity)") {
        FilterState st;
        st.i_l = {1.0, -0.5, -0.5};
        st.v_c = {40.0, -10.0, -30.0};
        st.v_src_prev = {0.0, 0.0, 0.0};
        st.primed = true;
        auto energy = [&] {
            const double li = st.i_l.a * st.i_l.a + st.i_l.b * st.i_l.b +
                              st.i_l.c * st.i_l.c;
            const double cv = st.v_c.a * st.v_c.a + st.v_c.b * st.v_c.b +
                              st.v_c.c * st.v_c.c;
            return 0.5 * d.l_f * li + 0.5 * d.c_f * cv;
        };
        const double e0 = energy();
        double prev = e0;
        for (int i = 0; i < 2000; ++i) {
            step_input_filter(d, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, 1e-6, st);
            const double e = energy();
            CHECK(e <= prev * (1.0 + 1e-12));
            prev = e;
        }
        CHECK(prev == doctest::Approx(e0).epsilon(1e-9));  // lossless rule
    }
    SUBCASE("damping resistor dissipates") {
        FilterState st;
        st.i_l = {1.0, -0.5, -0.5};
        st.v_c = {40.0, -10.0, -30.0};
        st.v_src_prev = {0.0, 0.0, 0.0};
        st.primed = true;
        for (int i = 0; i < 5000; ++i)
            step_input_filter(d, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, 1e-6, st, 50.0);
        CHECK(st.dissipated > 0.0);
        const double rms_v = std::abs(st.v_c.a);
        CHECK(rms_v < 40.0);  // ringing decays with damping on
    }
}
