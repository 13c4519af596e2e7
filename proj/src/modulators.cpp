#include "mcsim/modulators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mcsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kSqrt3 = std::numbers::sqrt3;
// Phase offset of input/output phase a, b, c (b lags a by 2*pi/3).
constexpr double kLag[3] = {0.0, -kTwoPi / 3.0, -2.0 * kTwoPi / 3.0};

struct Phases {
    double in[3];   // instantaneous input phase voltages
    double th_i;    // omega_i*t + phi_i
    double th_o;    // omega_o*t + phi_o
};

Phases eval_phases(const ModulationTarget& tg, double t) {
    Phases p{};
    p.th_i = tg.omega_i * t + tg.phi_i;
    p.th_o = tg.omega_o * t + tg.phi_o;
    for (int k = 0; k < 3; ++k) p.in[k] = tg.v_im * std::cos(p.th_i + kLag[k]);
    return p;
}

// Venturini-family duty matrix: m_kj = 1/3 [1 + 2 v_k v_j / v_im^2 + inj_k],
// with inj_k = coeff * sin(th_i + beta_k) * sin(3 th_i). The beta offsets
// track each input row's own phase so the injection cancels over columns.
DutyMatrix venturini_family(const ModulationTarget& tg, double t, double t_seq,
                            bool common_mode_target, double inj_coeff) {
    const Phases p = eval_phases(tg, t);
    double vj[3];
    for (int j = 0; j < 3; ++j) {
        double v = tg.q * tg.v_im * std::cos(p.th_o + kLag[j]);
        if (common_mode_target) {
            // Third-harmonic common-mode addition: output third harmonic at
            // q*v_im/6 and input third harmonic at v_im/4. Raises the
            // realizable ratio from 0.5 to sqrt(3)/2.
            v += -tg.q * tg.v_im / 6.0 * std::cos(3.0 * p.th_o) +
                 tg.v_im / 4.0 * std::cos(3.0 * p.th_i);
        }
        vj[j] = v;
    }
    const double sin3 = std::sin(3.0 * p.th_i);
    DutyMatrix d;
    d.t_seq = t_seq;
    for (int k = 0; k < 3; ++k) {
        const double inj = inj_coeff * std::sin(p.th_i + kLag[k]) * sin3;
        for (int j = 0; j < 3; ++j) {
            d.m[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
                (1.0 + 2.0 * p.in[k] * vj[j] / (tg.v_im * tg.v_im) + inj) / 3.0;
        }
    }
    return d;
}

}  // namespace

void ModulationTarget::validate() const {
    if (!std::isfinite(q) || !std::isfinite(omega_o) || !std::isfinite(phi_o) ||
        !std::isfinite(v_im) || !std::isfinite(omega_i) || !std::isfinite(phi_i))
        throw std::invalid_argument("ModulationTarget: non-finite field");
    if (!(v_im > 0.0)) throw std::invalid_argument("ModulationTarget: v_im must be > 0");
    if (q < 0.0) throw std::invalid_argument("ModulationTarget: q must be >= 0");
    if (!(omega_i > 0.0))
        throw std::invalid_argument("ModulationTarget: omega_i must be > 0");
}

MethodId method_from_name(std::string_view name) {
    if (name == "venturini_basic") return MethodId::VenturiniBasic;
    if (name == "venturini_optimum") return MethodId::VenturiniOptimum;
    if (name == "scalar") return MethodId::Scalar;
    if (name == "svm") return MethodId::SVM;
    if (name == "indirect") return MethodId::Indirect;
    throw std::invalid_argument("unknown modulation method: " + std::string(name));
}

std::string_view method_name(MethodId m) {
    switch (m) {
        case MethodId::VenturiniBasic: return "venturini_basic";
        case MethodId::VenturiniOptimum: return "venturini_optimum";
        case MethodId::Scalar: return "scalar";
        case MethodId::SVM: return "svm";
        case MethodId::Indirect: return "indirect";
    }
    throw std::logic_error("bad MethodId");
}

DutyMatrix venturini_basic(const ModulationTarget& tg, double t, double t_seq) {
    tg.validate();
    return venturini_family(tg, t, t_seq, false, 0.0);
}

DutyMatrix venturini_optimum(const ModulationTarget& tg, double t, double t_seq) {
    tg.validate();
    return venturini_family(tg, t, t_seq, true, 4.0 * tg.q / (3.0 * kSqrt3));
}

DutyMatrix scalar_mod(const ModulationTarget& tg, double t, double t_seq) {
    tg.validate();
    // Identical to the optimum method except the injection term is fixed at
    // 2/3 instead of pro rata with q; the two coincide at q = sqrt(3)/2.
    return venturini_family(tg, t, t_seq, true, 2.0 / 3.0);
}

DutyMatrix svm_mod(const ModulationTarget& tg, double t, double t_seq) {
    tg.validate();
    const Phases p = eval_phases(tg, t);

    // Virtual rectifier: anchor = input line with the largest |v|. The two
    // active vectors connect the anchor with each remaining line; splitting
    // their duties proportionally to the other lines' voltages keeps the
    // input current vector aligned with the input voltage (unity displacement
    // factor). Mean link voltage over the period: 1.5*v_im^2/|v_anchor|.
    int anchor = 0;
    for (int k = 1; k < 3; ++k)
        if (std::abs(p.in[k]) > std::abs(p.in[anchor])) anchor = k;
    const int o1 = (anchor + 1) % 3;
    const int o2 = (anchor + 2) % 3;
    const double va = std::abs(p.in[anchor]);
    const double d_r1 = std::abs(p.in[o1]) / va;
    const double d_r2 = std::abs(p.in[o2]) / va;
    const double v_link = 1.5 * tg.v_im * tg.v_im / va;

    // Virtual inverter: reference vector in the alpha-beta plane.
    double vr[3];
    for (int j = 0; j < 3; ++j) vr[j] = tg.q * tg.v_im * std::cos(p.th_o + kLag[j]);
    const double v_al = (2.0 * vr[0] - vr[1] - vr[2]) / 3.0;
    const double v_be = (vr[1] - vr[2]) / kSqrt3;
    double theta = std::atan2(v_be, v_al);
    if (theta < 0.0) theta += kTwoPi;
    // Lower-index sector wins at boundaries.
    int sector = static_cast<int>(theta / (kPi / 3.0));
    if (sector > 5) sector = 5;
    const double alpha = theta - static_cast<double>(sector) * (kPi / 3.0);

    const double mag = std::hypot(v_al, v_be);
    const double m_inv = kSqrt3 * mag / v_link;
    const double d_u = m_inv * std::sin(kPi / 3.0 - alpha);
    const double d_v = m_inv * std::sin(alpha);
    const double d_0 = 1.0 - d_u - d_v;
    if (d_0 < -1e-9)
        throw TransferRatioError(
            "svm: reference outside the synthesizable hexagon at this angle (q too large)");

    // Inverter active vectors U1..U6: true = output on the + rail.
    static constexpr bool kPattern[6][3] = {{true, false, false}, {true, true, false},
                                            {false, true, false}, {false, true, true},
                                            {false, false, true}, {true, false, true}};
    DutyMatrix d;
    d.t_seq = t_seq;
    const bool anchor_positive = p.in[anchor] > 0.0;
    for (const auto& [d_rect, other] : {std::pair{d_r1, o1}, std::pair{d_r2, o2}}) {
        const int plus = anchor_positive ? anchor : other;
        const int minus = anchor_positive ? other : anchor;
        for (const auto& [d_inv, pat] :
             {std::pair{d_u, kPattern[sector]}, std::pair{d_v, kPattern[(sector + 1) % 6]}}) {
            for (int j = 0; j < 3; ++j) {
                const int k = pat[j] ? plus : minus;
                d.m[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] +=
                    d_rect * d_inv;
            }
        }
    }
    // Zero vector: all outputs clamp to the anchor line.
    for (int j = 0; j < 3; ++j)
        d.m[static_cast<std::size_t>(anchor)][static_cast<std::size_t>(j)] +=
            std::max(d_0, 0.0);
    return d;
}

DutyMatrix indirect_mod(const ModulationTarget& tg, double t, double t_seq) {
    tg.validate();
    const double q_max = 6.0 * kSqrt3 / (kPi * kPi);
    if (tg.q > q_max + 1e-12)
        throw TransferRatioError("indirect: q above 6*sqrt(3)/pi^2");
    const Phases p = eval_phases(tg, t);

    // Fictitious DC link: rectifier stage always on the most-positive and
    // most-negative input lines; inverter stage PWMs each output between the
    // rails with min-max common-mode injection. Above q = sqrt(3)/2 the duty
    // clamps and the per-period mean no longer tracks the target (reported
    // low-frequency distortion, not suppressed).
    int pos = 0, neg = 0;
    for (int k = 1; k < 3; ++k) {
        if (p.in[k] > p.in[pos]) pos = k;
        if (p.in[k] < p.in[neg]) neg = k;
    }
    const double v_link = p.in[pos] - p.in[neg];

    double vr[3];
    for (int j = 0; j < 3; ++j) vr[j] = tg.q * tg.v_im * std::cos(p.th_o + kLag[j]);
    const double v_cm = -0.5 * (*std::max_element(vr, vr + 3) +
                                *std::min_element(vr, vr + 3));

    DutyMatrix d;
    d.t_seq = t_seq;
    for (int j = 0; j < 3; ++j) {
        const double duty = std::clamp(0.5 + (vr[j] + v_cm) / v_link, 0.0, 1.0);
        d.m[static_cast<std::size_t>(pos)][static_cast<std::size_t>(j)] += duty;
        d.m[static_cast<std::size_t>(neg)][static_cast<std::size_t>(j)] += 1.0 - duty;
    }
    return d;
}

DutyMatrix modulate(MethodId method, const ModulationTarget& tg, double t,
                    double t_seq) {
    switch (method) {
        case MethodId::VenturiniBasic: return venturini_basic(tg, t, t_seq);
        case MethodId::VenturiniOptimum: return venturini_optimum(tg, t, t_seq);
        case MethodId::Scalar: return scalar_mod(tg, t, t_seq);
        case MethodId::SVM: return svm_mod(tg, t, t_seq);
        case MethodId::Indirect: return indirect_mod(tg, t, t_seq);
    }
    throw std::logic_error("bad MethodId");
}

double max_ratio(MethodId method) {
    switch (method) {
        case MethodId::VenturiniBasic: return 0.5;
        case MethodId::VenturiniOptimum:
        case MethodId::Scalar:
        case MethodId::SVM: return kSqrt3 / 2.0;
        case MethodId::Indirect: return 6.0 * kSqrt3 / (kPi * kPi);
    }
    throw std::logic_error("bad MethodId");
}

}  // namespace mcsim
