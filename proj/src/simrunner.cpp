#include "mcsim/simrunner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "mcsim/dqfuzzy.hpp"
#include "mcsim/filterdesign.hpp"
#include "mcsim/kernels.hpp"

namespace mcsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLag[3] = {0.0, -kTwoPi / 3.0, -2.0 * kTwoPi / 3.0};

// Best rational p/q ~ x with q <= max_den (continued fractions).
std::pair<long, long> rational_approx(double x, long max_den) {
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int iter = 0; iter < 64; ++iter) {
        const double fl = std::floor(v);
        const long a = static_cast<long>(fl);
        const long p2 = a * p1 + p0;
        const long q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        const double frac = v - fl;
        if (frac < 1e-12) break;
        v = 1.0 / frac;
    }
    return {p1, q1};
}

struct RecordingPlan {
    double f_rec = 0.0;
    double dt = 0.0;
    std::size_t spp_out = 0;   // samples per output fundamental period
    std::size_t spp_in = 0;    // samples per input fundamental period
    std::size_t spp_beat = 0;  // samples per common beat period
    std::size_t n_samples = 0;
};

// Pick a recording rate that puts a whole number of samples in both
// fundamental periods so harmonic projection is leakage-free by construction.
RecordingPlan plan_recording(const Scenario& s, std::size_t n_periods) {
    const auto [p, q] = rational_approx(s.f_i / s.f_o, 1000);
    const double f_gcd = s.f_o / static_cast<double>(q);
    const double f_base = static_cast<double>(p) * static_cast<double>(q) * f_gcd;
    const double want = static_cast<double>(s.samples_per_period) * s.f_sw;
    const long m = std::max(1L, std::lround(want / f_base));
    RecordingPlan plan;
    plan.f_rec = static_cast<double>(m) * f_base;
    plan.dt = 1.0 / plan.f_rec;
    plan.spp_out = static_cast<std::size_t>(m * p);
    plan.spp_in = static_cast<std::size_t>(m * q);
    plan.spp_beat = static_cast<std::size_t>(m * p * q);
    plan.n_samples = static_cast<std::size_t>(
        std::floor(static_cast<double>(n_periods) * plan.f_rec / s.f_sw));
    return plan;
}

// Load integration with exact time bookkeeping. Energy integrals and the
// stored/dissipated snapshots are taken over the analysis window; they are
// closed-form (exact) for the RL model and skipped for the motor.
struct LoadTracker {
    bool is_motor = false;
    RLParams rlp{};
    MotorParams mp{};
    RLState rl{};
    MotorState mot{};
    double t = 0.0;
    double max_h = 0.0;  // motor RK4 step ceiling

    double w0 = 0.0, w1 = 0.0;  // analysis window bounds
    double energy_out = 0.0;    // converter output energy inside window (RL)
    double energy_in = 0.0;     // converter input energy inside window (RL)
    double stored_begin = 0.0, stored_end = 0.0;
    double diss_begin = 0.0, diss_end = 0.0;
    bool began = false, ended = false;

    ThreePhase current() const {
        return is_motor ? motor_stator_current(mp, mot) : rl.i;
    }
    double stored() const {
        if (is_motor) return 0.0;
        return 0.5 * rlp.l * (rl.i.a * rl.i.a + rl.i.b * rl.i.b + rl.i.c * rl.i.c);
    }
    double dissipated() const { return is_motor ? mot.copper_loss : rl.dissipated; }

    void maybe_snapshot() {
        const double eps = 1e-9 * std::max(1.0, std::abs(w1));
        if (!began && t >= w0 - eps) {
            stored_begin = stored();
            diss_begin = dissipated();
            began = true;
        }
        if (began && !ended && t >= w1 - eps) {
            stored_end = stored();
            diss_end = dissipated();
            ended = true;
        }
    }

    // Advance one piece (no internal window crossing) under constant voltages.
    void piece(double dt, const ThreePhase& v_out, const ThreePhase& v_conv,
               const SwitchState& st) {
        if (dt <= 0.0) return;
        if (is_motor) {
            const int n = std::max(1, static_cast<int>(std::ceil(dt / max_h)));
            const double h = dt / static_cast<double>(n);
            for (int i = 0; i < n; ++i) mot = step_motor(mp, mot, v_out, h);
        } else {
            // charge = integral of phase current over the piece (closed form)
            const double mean = (v_out.a + v_out.b + v_out.c) / 3.0;
            ThreePhase charge{};
            const double i0[3] = {rl.i.a, rl.i.b, rl.i.c};
            const double vph[3] = {v_out.a - mean, v_out.b - mean, v_out.c - mean};
            double* qv[3] = {&charge.a, &charge.b, &charge.c};
            for (int ph = 0; ph < 3; ++ph) {
                const double c = vph[ph] / rlp.r;
                if (rlp.l == 0.0) {
                    *qv[ph] = c * dt;
                } else {
                    const double tau = rlp.l / rlp.r;
                    *qv[ph] = c * dt + (i0[ph] - c) * tau * (1.0 - std::exp(-dt / tau));
                }
            }
            rl = step_rl(rlp, rl, v_out, dt);
            const bool inside = t >= w0 - 1e-15 && t + dt <= w1 + 1e-9 * w1 && began;
            if (inside && !ended) {
                energy_out += v_out.a * charge.a + v_out.b * charge.b + v_out.c * charge.c;
                const ThreePhase qin = input_current(st, charge);
                energy_in += v_conv.a * qin.a + v_conv.b * qin.b + v_conv.c * qin.c;
            }
        }
        t += dt;
        maybe_snapshot();
    }

    // Advance to an absolute time, splitting at the window boundaries so the
    // snapshots land exactly on them.
    void advance(double target, const ThreePhase& v_out, const ThreePhase& v_conv,
                 const SwitchState& st) {
        for (double bound : {w0, w1}) {
            if (t < bound && target > bound) piece(bound - t, v_out, v_conv, st);
        }
        if (target > t) piece(target - t, v_out, v_conv, st);
    }
};

ThreePhase remove_cm(const ThreePhase& v) {
    const double m = (v.a + v.b + v.c) / 3.0;
    return {v.a - m, v.b - m, v.c - m};
}

std::vector<double> extract_channel(const std::vector<ThreePhase>& v, std::size_t s0,
                                    std::size_t len, bool subtract_cm) {
    std::vector<double> out(len);
    for (std::size_t i = 0; i < len; ++i) {
        const ThreePhase& s = v[s0 + i];
        out[i] = subtract_cm ? s.a - (s.a + s.b + s.c) / 3.0 : s.a;
    }
    return out;
}

struct ThdPair {
    std::optional<double> harmonic;
    std::optional<double> total;
    Spectrum spec;
};

// fund_floor: smallest fundamental amplitude still treated as a real
// component (everything below is numerical dust -> "no fundamental").
ThdPair analyze_channel(std::span<const double> series, double fundamental,
                        const TimeGrid& grid, std::size_t n_max, double fund_floor) {
    ThdPair out;
    out.spec = spectrum(series, fundamental, grid, n_max);
    const double r = rms(series, grid);
    const double fund = out.spec.magnitudes[1];
    if (fund > fund_floor) {
        out.harmonic = thd(out.spec);
        const double dc = out.spec.cos_coef[0];
        const double resid2 = r * r - dc * dc - 0.5 * fund * fund;
        out.total = std::sqrt(std::max(resid2, 0.0)) / (fund / std::sqrt(2.0));
    }
    return out;
}

int state_diff(const SwitchState& a, const SwitchState& b) {
    int n = 0;
    for (int j = 0; j < 3; ++j)
        if (a.input_of[static_cast<std::size_t>(j)] !=
            b.input_of[static_cast<std::size_t>(j)])
            ++n;
    return n;
}

// Largest per-period-feasible q at this instant, found by bisection; used
// only under --allow-overmodulation when the requested q is infeasible.
double saturate_q(MethodId method, ModulationTarget tg, double t, double t_seq) {
    double lo = 0.0, hi = tg.q;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        tg.q = mid;
        bool ok = true;
        try {
            ok = validate_duty(modulate(method, tg, t, t_seq)).ok;
        } catch (const TransferRatioError&) {
            ok = false;
        }
        (ok ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

SimResult run(const Scenario& s, bool allow_overmodulation) {
    s.validate();
    const double v_im = s.v_im();
    const double t_seq = 1.0 / s.f_sw;
    const auto n_periods =
        static_cast<std::size_t>(std::llround(s.duration * s.f_sw));
    const RecordingPlan plan = plan_recording(s, n_periods);

    SimResult res;
    res.grid = {plan.dt, plan.n_samples};
    res.v_in.reserve(plan.n_samples);
    res.i_in.reserve(plan.n_samples);
    res.v_out.reserve(plan.n_samples);
    res.i_out.reserve(plan.n_samples);

    // analysis window: whole beat periods after the transient discard
    const std::size_t s0 = static_cast<std::size_t>(
        std::ceil(s.transient_frac * static_cast<double>(plan.n_samples)));
    const std::size_t win =
        plan.n_samples > s0 ? ((plan.n_samples - s0) / plan.spp_beat) * plan.spp_beat : 0;
    if (win == 0) throw ConfigError("run: duration too short for an analysis window");
    res.analysis_start = s0;
    res.analysis_len = win;

    const double omega_i = kTwoPi * s.f_i;
    const double omega_o = kTwoPi * s.f_o;
    auto source_v = [&](double t) -> ThreePhase {
        const double th = omega_i * t + s.phi_i;
        return {v_im * std::cos(th), v_im * std::cos(th + kLag[1]),
                v_im * std::cos(th + kLag[2])};
    };

    LoadTracker load;
    load.is_motor = s.load.kind == LoadKind::Motor;
    load.rlp = s.load.rl;
    load.mp = s.load.motor;
    load.max_h = t_seq / 4.0;
    load.w0 = static_cast<double>(s0) * plan.dt;
    load.w1 = static_cast<double>(s0 + win) * plan.dt;
    load.maybe_snapshot();

    std::optional<FilterDesign> filt;
    FilterState fstate;
    if (s.filter.enabled) {
        filt = design_input_filter(s.filter.p_watts, v_im, omega_i, s.filter.fc_hz,
                                   s.f_sw);
        fstate.v_c = source_v(0.0);
        fstate.v_src_prev = fstate.v_c;
        fstate.primed = true;
    }

    const double a_ref = s.q_target * v_im;
    CrossCoupledFuzzy ctl;
    CrossCoupledState cstate;
    if (s.control.fuzzy) {
        ctl.ctrl.gain_e = std::isnan(s.control.gain_e) ? 1.0 / a_ref : s.control.gain_e;
        ctl.ctrl.gain_ce =
            std::isnan(s.control.gain_ce) ? 10.0 / a_ref : s.control.gain_ce;
        ctl.ctrl.gain_u = std::isnan(s.control.gain_u) ? 0.05 * a_ref : s.control.gain_u;
        ctl.ctrl.validate();
        if (s.control.rulebase_file)
            ctl.ctrl.rules = RuleBase::load_file(*s.control.rulebase_file);
        ctl.meas_lpf_tau = s.control.lpf_tau;
        cstate.fuzzy.accumulated_correction_q = s.control.initial_error * a_ref;
    }

    std::size_t sample_idx = 0;
    long commutations = 0;
    SwitchState prev_state{{0, 0, 0}};
    bool have_prev_state = false;
    ThreePhase meas_avg{};  // previous period's mean load-phase voltage
    bool have_meas = false;

    for (std::size_t p = 0; p < n_periods; ++p) {
        const double t0 = static_cast<double>(p) * t_seq;

        double q_eff = s.q_target;
        double phi_eff = s.phi_o;
        if (s.control.fuzzy) {
            CorrectedReference ref{cstate.fuzzy.accumulated_correction_d,
                                   a_ref + cstate.fuzzy.accumulated_correction_q};
            if (have_meas) {
                const double wt_mid = omega_o * (t0 - 0.5 * t_seq) + s.phi_o;
                ref = control_period(ctl, {0.0, a_ref, 0.0}, meas_avg, wt_mid, t_seq,
                                     cstate);
            }
            const double amp = std::hypot(ref.v_d, ref.v_q);
            // reference saturation at the method ceiling
            q_eff = std::min(amp / v_im, max_ratio(s.method));
            phi_eff = s.phi_o + std::atan2(-ref.v_d, ref.v_q);
        }

        const ModulationTarget target{q_eff, omega_o, phi_eff, v_im, omega_i, s.phi_i};
        DutyMatrix duty;
        try {
            duty = modulate(s.method, target, t0, t_seq);
            const DutyReport rep = validate_duty(duty);
            if (!rep.ok) {
                if (!allow_overmodulation)
                    throw DutyAbortError(rep, t0,
                                         "duty validity violation at t=" +
                                             std::to_string(t0) + "\n" + rep.describe());
                ModulationTarget sat = target;
                sat.q = saturate_q(s.method, target, t0, t_seq);
                duty = modulate(s.method, sat, t0, t_seq);
            }
        } catch (const TransferRatioError& e) {
            if (!allow_overmodulation) {
                DutyReport rep;
                rep.ok = false;
                throw DutyAbortError(rep, t0, std::string(e.what()) + " at t=" +
                                                  std::to_string(t0));
            }
            ModulationTarget sat = target;
            sat.q = saturate_q(s.method, target, t0, t_seq);
            duty = modulate(s.method, sat, t0, t_seq);
        }

        const SwitchTimeline timeline = sequence(duty, s.sequencing);
        ThreePhase meas_acc{};
        double t_seg = t0;
        const double t_period_end = static_cast<double>(p + 1) * t_seq;
        for (std::size_t si = 0; si < timeline.segments.size(); ++si) {
            const Segment& seg = timeline.segments[si];
            // periods tile exactly: the last segment ends on the period
            // boundary regardless of rounding in the duration sum
            const double t_end = si + 1 == timeline.segments.size()
                                     ? t_period_end
                                     : t_seg + seg.duration;
            const ThreePhase v_conv = filt ? fstate.v_c : source_v(t_seg);
            const ThreePhase v_out = apply_state(seg.state, v_conv);

            if (have_prev_state) commutations += state_diff(prev_state, seg.state);
            prev_state = seg.state;
            have_prev_state = true;

            const ThreePhase i_start =
                input_current(seg.state, load.current());

            while (sample_idx < plan.n_samples) {
                const double ts = static_cast<double>(sample_idx) * plan.dt;
                if (!(ts < t_end)) break;
                load.advance(ts, v_out, v_conv, seg.state);
                const ThreePhase io = load.current();
                res.v_in.push_back(v_conv);
                res.i_in.push_back(input_current(seg.state, io));
                res.v_out.push_back(v_out);
                res.i_out.push_back(io);
                ++sample_idx;
            }
            load.advance(t_end, v_out, v_conv, seg.state);

            const ThreePhase ph = remove_cm(v_out);
            meas_acc.a += ph.a * seg.duration;
            meas_acc.b += ph.b * seg.duration;
            meas_acc.c += ph.c * seg.duration;

            if (filt) {
                step_input_filter(*filt, source_v(t_end), i_start, seg.duration,
                                  fstate, s.filter.damping_r);
            }
            t_seg = t_end;
        }
        meas_avg = {meas_acc.a / t_seq, meas_acc.b / t_seq, meas_acc.c / t_seq};
        have_meas = true;
    }

    // guard against a trailing sample lost to duration rounding
    while (res.v_in.size() < plan.n_samples && !res.v_in.empty()) {
        res.v_in.push_back(res.v_in.back());
        res.i_in.push_back(res.i_in.back());
        res.v_out.push_back(res.v_out.back());
        res.i_out.push_back(res.i_out.back());
    }

    // ---- analytics over the window ----
    const TimeGrid wgrid{plan.dt, win};
    const std::vector<double> out_v = extract_channel(res.v_out, s0, win, true);
    const std::vector<double> out_i = extract_channel(res.i_out, s0, win, false);
    const std::vector<double> in_v = extract_channel(res.v_in, s0, win, false);
    const std::vector<double> in_i = extract_channel(res.i_in, s0, win, false);

    // A run whose output voltage carries no fundamental (q = 0: pure common
    // mode) has no meaningful THD on the output or on the drawn input current.
    const ThdPair ov = analyze_channel(out_v, s.f_o, wgrid, s.n_max, 1e-9 * v_im);
    const bool output_active = ov.harmonic.has_value();
    const double i_floor =
        output_active ? 0.0 : std::numeric_limits<double>::infinity();
    const ThdPair oi = analyze_channel(out_i, s.f_o, wgrid, s.n_max, i_floor);
    const ThdPair iv = analyze_channel(in_v, s.f_i, wgrid, s.n_max, 1e-9 * v_im);
    const ThdPair ii = analyze_channel(in_i, s.f_i, wgrid, s.n_max, i_floor);
    res.thd_out = {ov.harmonic, ov.total, oi.harmonic, oi.total};
    res.thd_in = {iv.harmonic, iv.total, ii.harmonic, ii.total};
    res.out_v_spectrum = ov.spec;
    res.out_i_spectrum = oi.spec;
    res.in_i_spectrum = ii.spec;
    if (!ov.harmonic || !oi.harmonic) res.notes = "no fundamental";

    res.transfer_ratio_measured = ov.spec.magnitudes[1] / v_im;

    std::vector<double> wt_in(win), wt_out(win);
    for (std::size_t k = 0; k < win; ++k) {
        const double t = static_cast<double>(s0 + k) * plan.dt;
        wt_in[k] = omega_i * t + s.phi_i;
        wt_out[k] = omega_o * t + s.phi_o;
    }
    res.pq_in = pq(std::span(res.v_in).subspan(s0, win),
                   std::span(res.i_in).subspan(s0, win), wt_in, wgrid);
    res.pq_out = pq(std::span(res.v_out).subspan(s0, win),
                    std::span(res.i_out).subspan(s0, win), wt_out, wgrid);

    double p_in = 0.0, p_out = 0.0;
    for (std::size_t k = s0; k < s0 + win; ++k) {
        p_in += res.v_in[k].a * res.i_in[k].a + res.v_in[k].b * res.i_in[k].b +
                res.v_in[k].c * res.i_in[k].c;
        p_out += res.v_out[k].a * res.i_out[k].a + res.v_out[k].b * res.i_out[k].b +
                 res.v_out[k].c * res.i_out[k].c;
    }
    res.p_in_mean = p_in / static_cast<double>(win);
    res.p_out_mean = p_out / static_cast<double>(win);

    if (!load.is_motor && load.began && load.ended) {
        res.energy_in = load.energy_in;
        res.energy_out = load.energy_out;
        res.energy_dissipated = load.diss_end - load.diss_begin;
        res.energy_stored_delta = load.stored_end - load.stored_begin;
    }

    res.commutations_per_period =
        static_cast<double>(commutations) / static_cast<double>(n_periods);
    return res;
}

nlohmann::json summary_json(const SimResult& r, const Scenario& s) {
    auto opt = [](const std::optional<double>& v) -> nlohmann::json {
        if (v) return *v;
        return nullptr;
    };
    nlohmann::json j;
    j["scenario"] = {
        {"name", s.name},
        {"method", std::string(method_name(s.method))},
        {"q_target", s.q_target},
        {"f_i_hz", s.f_i},
        {"f_o_hz", s.f_o},
        {"f_sw_hz", s.f_sw},
        {"duration_s", s.duration},
        {"v_im", s.v_im()},
        {"load",
         s.load.kind == LoadKind::Motor ? "motor"
         : s.load.kind == LoadKind::R  ? "r"
                                        : "rl"},
        {"filter_enabled", s.filter.enabled},
        {"control", s.control.fuzzy ? "fuzzy" : "off"},
    };
    j["grid"] = {{"dt_s", r.grid.dt},
                 {"n_samples", r.grid.n_steps},
                 {"analysis_start", r.analysis_start},
                 {"analysis_len", r.analysis_len}};
    j["thd"] = {{"out",
                 {{"voltage_harmonic", opt(r.thd_out.voltage_harmonic)},
                  {"voltage_total", opt(r.thd_out.voltage_total)},
                  {"current_harmonic", opt(r.thd_out.current_harmonic)},
                  {"current_total", opt(r.thd_out.current_total)}}},
                {"in",
                 {{"voltage_harmonic", opt(r.thd_in.voltage_harmonic)},
                  {"voltage_total", opt(r.thd_in.voltage_total)},
                  {"current_harmonic", opt(r.thd_in.current_harmonic)},
                  {"current_total", opt(r.thd_in.current_total)}}}};
    j["pq"] = {{"in", {{"p_active_w", r.pq_in.p_active}, {"q_reactive_var", r.pq_in.q_reactive}}},
               {"out", {{"p_active_w", r.pq_out.p_active}, {"q_reactive_var", r.pq_out.q_reactive}}}};
    j["transfer_ratio_measured"] = r.transfer_ratio_measured;
    j["commutations_per_period"] = r.commutations_per_period;
    j["power"] = {{"p_in_mean_w", r.p_in_mean}, {"p_out_mean_w", r.p_out_mean}};
    j["energy"] = {{"in_j", opt(r.energy_in)},
                   {"out_j", opt(r.energy_out)},
                   {"dissipated_j", opt(r.energy_dissipated)},
                   {"stored_delta_j", opt(r.energy_stored_delta)}};
    j["notes"] = r.notes;
    return j;
}

namespace {

std::string pct(const nlohmann::json& v) {
    if (v.is_null()) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", v.get<double>() * 100.0);
    return buf;
}

}  // namespace

std::string report_text(const std::vector<nlohmann::json>& summaries) {
    if (summaries.empty()) return "";
    std::string out;
    out += "parameter";
    for (const auto& s : summaries)
        out += "\t" + s.at("scenario").at("name").get<std::string>() + " (" +
               s.at("scenario").at("load").get<std::string>() + ")";
    out += "\n";
    const std::pair<const char*, std::pair<const char*, const char*>> rows[] = {
        {"output voltage THD", {"out", "voltage_total"}},
        {"output current THD", {"out", "current_total"}},
        {"input voltage THD", {"in", "voltage_total"}},
        {"input current THD", {"in", "current_total"}},
    };
    for (const auto& [label, key] : rows) {
        out += label;
        for (const auto& s : summaries)
            out += "\t" + pct(s.at("thd").at(key.first).at(key.second));
        out += "\n";
    }
    out += "switching frequency";
    for (const auto& s : summaries) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "\t%g Hz",
                      s.at("scenario").at("f_sw_hz").get<double>());
        out += buf;
    }
    out += "\n";
    return out;
}

nlohmann::json report_json(const std::vector<nlohmann::json>& summaries) {
    nlohmann::json j;
    j["columns"] = nlohmann::json::array();
    for (const auto& s : summaries) j["columns"].push_back(s.at("scenario"));
    for (const char* port : {"out", "in"}) {
        for (const char* kind : {"voltage_total", "current_total", "voltage_harmonic",
                                 "current_harmonic"}) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& s : summaries) row.push_back(s.at("thd").at(port).at(kind));
            j["thd"][port][kind] = row;
        }
    }
    return j;
}

void write_outputs(const SimResult& r, const Scenario& s, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::pair<const char*, const std::vector<ThreePhase>*> files[] = {
        {"waveforms_in_v.csv", &r.v_in},
        {"waveforms_in_i.csv", &r.i_in},
        {"waveforms_out_v.csv", &r.v_out},
        {"waveforms_out_i.csv", &r.i_out},
    };
    for (const auto& [name, data] : files) {
        std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
        f << waveform_csv(*data, r.grid);
    }
    std::ofstream js(fs::path(out_dir) / "summary.json", std::ios::binary);
    js << summary_json(r, s).dump(2) << "\n";
}

}  // namespace mcsim
