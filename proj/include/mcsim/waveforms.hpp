#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsim {

// Uniform sampling grid. Sample i sits at t = i*dt.
struct TimeGrid {
    double dt = 0.0;
    std::size_t n_steps = 0;

    double duration() const { return dt * static_cast<double>(n_steps); }
    double time(std::size_t i) const { return static_cast<double>(i) * dt; }
    void validate() const;  // dt > 0, n_steps >= 1
};

// Instantaneous per-phase triple (volts or amperes per context).
struct ThreePhase {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    bool finite() const;
};

// Harmonic magnitudes from projection onto exact harmonic bins.
// magnitude(n) for n = 1..n_max; cos/sin coefficients kept for resynthesis.
struct Spectrum {
    double fundamental_hz = 0.0;
    std::vector<double> magnitudes;  // [0] = |dc|, [n] = amplitude of harmonic n
    std::vector<double> cos_coef;    // same indexing; [0] = dc (signed)
    std::vector<double> sin_coef;

    std::size_t n_max() const { return magnitudes.empty() ? 0 : magnitudes.size() - 1; }
    double magnitude(std::size_t n) const { return magnitudes.at(n); }
    // Evaluate the fitted harmonic sum at time t (used by resynthesis checks).
    double resynth(double t) const;
};

// Active/reactive power of a three-phase port.
struct PQSetting {
    double p_active = 0.0;
    double q_reactive = 0.0;
};

// Balanced cosine set: a = A cos(2*pi*f*t + phase), b and c lag by 2*pi/3 and
// 4*pi/3. Rejects non-finite inputs, amplitude < 0, freq <= 0.
std::vector<ThreePhase> gen_three_phase(double amplitude, double freq_hz,
                                        double phase_rad, const TimeGrid& grid);

// One phase of the same set, as a contiguous series (kernel-backed).
std::vector<double> cosine_wave(double amplitude, double freq_hz, double phase_rad,
                                const TimeGrid& grid);

// sqrt(mean(x^2)). Caller is responsible for spanning whole periods.
double rms(std::span<const double> series, const TimeGrid& grid);

// Projection onto harmonic bins of fundamental_hz over whole periods.
// Requires: series covers >= 1 whole fundamental period on the grid,
// >= 4 samples per period, and n_max*fundamental_hz below Nyquist.
Spectrum spectrum(std::span<const double> series, double fundamental_hz,
                  const TimeGrid& grid, std::size_t n_max);

// Total harmonic distortion: sqrt(sum_{n>=2} mag_n^2) / mag_1.
// Throws NoFundamentalError if the fundamental magnitude is zero.
double thd(const Spectrum& spec);

struct NoFundamentalError : std::runtime_error {
    NoFundamentalError() : std::runtime_error("no fundamental component") {}
};

// p = mean(va*ia + vb*ib + vc*ic);
// q = mean((3/2)(v_q*i_d - v_d*i_q)) with the dq transform at wt_series[i].
PQSetting pq(std::span<const ThreePhase> voltages, std::span<const ThreePhase> currents,
             std::span<const double> wt_series, const TimeGrid& grid);

// CSV with header "t,a,b,c", full-precision decimal, one row per sample.
std::string waveform_csv(std::span<const ThreePhase> samples, const TimeGrid& grid);
void write_waveform_csv(std::ostream& os, std::span<const ThreePhase> samples,
                        const TimeGrid& grid);

}  // namespace mcsim
