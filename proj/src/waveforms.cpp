#include "mcsim/waveforms.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "mcsim/dqfuzzy.hpp"
#include "mcsim/kernels.hpp"

namespace mcsim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPhaseLag[3] = {0.0, -kTwoPi / 3.0, -2.0 * kTwoPi / 3.0};
}  // namespace

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("TimeGrid: dt must be positive and finite");
    if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
}

bool ThreePhase::finite() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c);
}

double Spectrum::resynth(double t) const {
    double v = cos_coef.empty() ? 0.0 : cos_coef[0];
    const double w0 = kTwoPi * fundamental_hz;
    for (std::size_t n = 1; n < cos_coef.size(); ++n) {
        const double th = static_cast<double>(n) * w0 * t;
        v += cos_coef[n] * std::cos(th) + sin_coef[n] * std::sin(th);
    }
    return v;
}

std::vector<double> cosine_wave(double amplitude, double freq_hz, double phase_rad,
                                const TimeGrid& grid) {
    grid.validate();
    if (!std::isfinite(amplitude) || !std::isfinite(freq_hz) || !std::isfinite(phase_rad))
        throw std::invalid_argument("cosine_wave: non-finite input");
    if (amplitude < 0.0) throw std::invalid_argument("cosine_wave: amplitude must be >= 0");
    if (!(freq_hz > 0.0)) throw std::invalid_argument("cosine_wave: freq must be > 0");
    std::vector<double> out(grid.n_steps);
    kernels::cosine_series(amplitude, phase_rad, kTwoPi * freq_hz * grid.dt,
                           grid.n_steps, out.data());
    return out;
}

std::vector<ThreePhase> gen_three_phase(double amplitude, double freq_hz,
                                        double phase_rad, const TimeGrid& grid) {
    grid.validate();
    if (!std::isfinite(amplitude) || !std::isfinite(freq_hz) || !std::isfinite(phase_rad))
        throw std::invalid_argument("gen_three_phase: non-finite input");
    if (amplitude < 0.0)
        throw std::invalid_argument("gen_three_phase: amplitude must be >= 0");
    if (!(freq_hz > 0.0)) throw std::invalid_argument("gen_three_phase: freq must be > 0");

    const double dtheta = kTwoPi * freq_hz * grid.dt;
    std::vector<double> ph[3];
    for (int p = 0; p < 3; ++p) {
        ph[p].resize(grid.n_steps);
        kernels::cosine_series(amplitude, phase_rad + kPhaseLag[p], dtheta,
                               grid.n_steps, ph[p].data());
    }
    std::vector<ThreePhase> out(grid.n_steps);
    for (std::size_t i = 0; i < grid.n_steps; ++i)
        out[i] = {ph[0][i], ph[1][i], ph[2][i]};
    return out;
}

double rms(std::span<const double> series, const TimeGrid& grid) {
    grid.validate();
    if (series.empty()) throw std::invalid_argument("rms: empty series");
    return std::sqrt(kernels::sum_squares(series) /
                     static_cast<double>(series.size()));
}

Spectrum spectrum(std::span<const double> series, double fundamental_hz,
                  const TimeGrid& grid, std::size_t n_max) {
    grid.validate();
    if (series.empty()) throw std::invalid_argument("spectrum: empty series");
    if (!(fundamental_hz > 0.0))
        throw std::invalid_argument("spectrum: fundamental must be > 0");
    if (n_max < 1) throw std::invalid_argument("spectrum: n_max must be >= 1");

    const double samples_per_period = 1.0 / (fundamental_hz * grid.dt);
    if (samples_per_period < 4.0)
        throw std::invalid_argument("spectrum: fewer than 4 samples per period");
    const double nyquist = 0.5 / grid.dt;
    if (!(static_cast<double>(n_max) * fundamental_hz < nyquist))
        throw std::invalid_argument("spectrum: n_max*fundamental at or above Nyquist");

    const double periods = static_cast<double>(series.size()) * grid.dt * fundamental_hz;
    if (periods < 1.0 - 1e-6)
        throw std::invalid_argument("spectrum: series covers less than one period");
    if (std::abs(periods - std::round(periods)) > 1e-6 * periods + 1e-9)
        throw std::invalid_argument("spectrum: series is not a whole number of periods");

    const double inv_n = 1.0 / static_cast<double>(series.size());
    Spectrum spec;
    spec.fundamental_hz = fundamental_hz;
    spec.magnitudes.resize(n_max + 1);
    spec.cos_coef.resize(n_max + 1);
    spec.sin_coef.resize(n_max + 1);

    const double dc = kernels::sum(series) * inv_n;
    spec.cos_coef[0] = dc;
    spec.sin_coef[0] = 0.0;
    spec.magnitudes[0] = std::abs(dc);

    for (std::size_t n = 1; n <= n_max; ++n) {
        const double dtheta = kTwoPi * static_cast<double>(n) * fundamental_hz * grid.dt;
        const auto pr = kernels::project(series, 0.0, dtheta);
        spec.cos_coef[n] = 2.0 * pr.cos_sum * inv_n;
        spec.sin_coef[n] = 2.0 * pr.sin_sum * inv_n;
        spec.magnitudes[n] = std::hypot(spec.cos_coef[n], spec.sin_coef[n]);
    }
    return spec;
}

double thd(const Spectrum& spec) {
    if (spec.n_max() < 1) throw std::invalid_argument("thd: spectrum has no bins");
    const double fund = spec.magnitudes[1];
    if (!(fund > 0.0)) throw NoFundamentalError{};
    double acc = 0.0;
    for (std::size_t n = 2; n < spec.magnitudes.size(); ++n)
        acc += spec.magnitudes[n] * spec.magnitudes[n];
    return std::sqrt(acc) / fund;
}

PQSetting pq(std::span<const ThreePhase> voltages, std::span<const ThreePhase> currents,
             std::span<const double> wt_series, const TimeGrid& grid) {
    grid.validate();
    if (voltages.size() != currents.size() || voltages.size() != wt_series.size())
        throw std::invalid_argument("pq: length mismatch");
    if (voltages.empty()) throw std::invalid_argument("pq: empty input");

    double p_acc = 0.0;
    double q_acc = 0.0;
    for (std::size_t i = 0; i < voltages.size(); ++i) {
        const ThreePhase& v = voltages[i];
        const ThreePhase& c = currents[i];
        p_acc += v.a * c.a + v.b * c.b + v.c * c.c;
        const Dq0 vd = abc_to_dq0(v, wt_series[i]);
        const Dq0 id = abc_to_dq0(c, wt_series[i]);
        q_acc += 1.5 * (vd.q * id.d - vd.d * id.q);
    }
    const double inv_n = 1.0 / static_cast<double>(voltages.size());
    return {p_acc * inv_n, q_acc * inv_n};
}

std::string waveform_csv(std::span<const ThreePhase> samples, const TimeGrid& grid) {
    grid.validate();
    std::string out = "t,a,b,c\n";
    out.reserve(out.size() + samples.size() * 64);
    char buf[128];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n",
                                      grid.time(i), samples[i].a, samples[i].b,
                                      samples[i].c);
        out.append(buf, static_cast<std::size_t>(len));
    }
    return out;
}

void write_waveform_csv(std::ostream& os, std::span<const ThreePhase> samples,
                        const TimeGrid& grid) {
    os << waveform_csv(samples, grid);
}

}  // namespace mcsim
