#include "mcsim/dqfuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mcsim {

namespace {
constexpr double kTwoPiOver3 = 2.0 * std::numbers::pi / 3.0;

int label_from_text(const std::string& s) {
    for (int i = 0; i < 7; ++i)
        if (s == kFuzzyLabels[i]) return i - 3;
    throw std::invalid_argument("rule base: unknown label '" + s + "'");
}
}  // namespace

Dq0 abc_to_dq0(const ThreePhase& v, double wt) {
    const double sa = std::sin(wt), sb = std::sin(wt - kTwoPiOver3),
                 sc = std::sin(wt + kTwoPiOver3);
    const double ca = std::cos(wt), cb = std::cos(wt - kTwoPiOver3),
                 cc = std::cos(wt + kTwoPiOver3);
    return {(2.0 / 3.0) * (v.a * sa + v.b * sb + v.c * sc),
            (2.0 / 3.0) * (v.a * ca + v.b * cb + v.c * cc),
            (v.a + v.b + v.c) / 3.0};
}

ThreePhase dq0_to_abc(const Dq0& d, double wt) {
    const double sa = std::sin(wt), sb = std::sin(wt - kTwoPiOver3),
                 sc = std::sin(wt + kTwoPiOver3);
    const double ca = std::cos(wt), cb = std::cos(wt - kTwoPiOver3),
                 cc = std::cos(wt + kTwoPiOver3);
    return {d.d * sa + d.q * ca + d.z, d.d * sb + d.q * cb + d.z,
            d.d * sc + d.q * cc + d.z};
}

FuzzyPartition FuzzyPartition::uniform() {
    FuzzyPartition p{};
    for (int i = 0; i < 7; ++i)
        p.centers[static_cast<std::size_t>(i)] = (static_cast<double>(i) - 3.0) / 3.0;
    return p;
}

double FuzzyPartition::membership(double x, int label_index) const {
    const double lattice = 3.0 * x;  // centers sit at integers -3..3
    return std::max(0.0,
                    1.0 - std::abs(lattice - static_cast<double>(label_index - 3)));
}

MembershipVec fuzzify(double x, const FuzzyPartition& p) {
    x = std::clamp(x, p.centers.front(), p.centers.back());
    MembershipVec deg{};
    for (int i = 0; i < 7; ++i) deg[static_cast<std::size_t>(i)] = p.membership(x, i);
    return deg;
}

void RuleBase::validate() const {
    for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 7; ++j) {
            const int v = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (v < -3 || v > 3)
                throw std::invalid_argument("rule base: consequent out of range");
            if (v != -table[static_cast<std::size_t>(6 - i)][static_cast<std::size_t>(6 - j)])
                throw std::invalid_argument("rule base: not antisymmetric");
            if (j > 0 &&
                v < table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)])
                throw std::invalid_argument("rule base: row not monotone");
            if (i > 0 &&
                v < table[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)])
                throw std::invalid_argument("rule base: column not monotone");
        }
    }
}

RuleBase RuleBase::standard() {
    RuleBase rb;
    for (int i = -3; i <= 3; ++i) {
        for (int j = -3; j <= 3; ++j) {
            const int s = i + j;
            const int half = (s >= 0 ? (s + 1) / 2 : -((-s + 1) / 2));  // half away from 0
            rb.table[static_cast<std::size_t>(i + 3)][static_cast<std::size_t>(j + 3)] =
                std::clamp(half, -3, 3);
        }
    }
    return rb;
}

RuleBase RuleBase::load(std::istream& in) {
    RuleBase rb;
    for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 7; ++j) {
            std::string tok;
            if (!(in >> tok))
                throw std::invalid_argument("rule base: fewer than 49 entries");
            rb.table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                label_from_text(tok);
        }
    }
    std::string extra;
    if (in >> extra)
        throw std::invalid_argument("rule base: trailing content '" + extra + "'");
    rb.validate();
    return rb;
}

RuleBase RuleBase::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("rule base: cannot open " + path);
    return load(f);
}

double OutputAggregate::mu(double x) const {
    double m = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double s = strength[static_cast<std::size_t>(i)];
        if (s <= 0.0) continue;
        m = std::max(m, std::min(s, partition.membership(x, i)));
    }
    return m;
}

bool OutputAggregate::empty() const {
    return std::all_of(strength.begin(), strength.end(),
                       [](double s) { return s <= 0.0; });
}

OutputAggregate infer(const MembershipVec& e_deg, const MembershipVec& ce_deg,
                      const RuleBase& rules, const FuzzyPartition& p_u) {
    OutputAggregate agg;
    agg.partition = p_u;
    for (int i = 0; i < 7; ++i) {
        const double de = e_deg[static_cast<std::size_t>(i)];
        if (de <= 0.0) continue;
        for (int j = 0; j < 7; ++j) {
            const double fire = std::min(de, ce_deg[static_cast<std::size_t>(j)]);
            if (fire <= 0.0) continue;
            const int out = rules.consequent(i, j) + 3;
            auto& s = agg.strength[static_cast<std::size_t>(out)];
            s = std::max(s, fire);
        }
    }
    return agg;
}

double defuzzify(const OutputAggregate& agg) {
    if (agg.empty()) throw std::domain_error("defuzzify: no rule fired");
    // 1001 points at x = (i-500)/500; accumulate mirror pairs together so a
    // symmetric aggregate cancels exactly.
    double num = 0.0, den = agg.mu(0.0);
    for (int i = 0; i < 500; ++i) {
        const double x = (static_cast<double>(i) - 500.0) / 500.0;
        const double lo = agg.mu(x);
        const double hi = agg.mu(-x);
        num += x * lo + (-x) * hi;
        den += lo + hi;
    }
    if (den <= 0.0) throw std::domain_error("defuzzify: zero aggregate area");
    return num / den;
}

void FuzzyController::validate() const {
    if (!(gain_e > 0.0) || !(gain_ce > 0.0) || !(gain_u > 0.0))
        throw std::invalid_argument("FuzzyController: gains must be positive");
}

double fuzzy_step(const FuzzyController& c, double error, ControllerState& state,
                  Channel channel) {
    double& prev = channel == Channel::D ? state.prev_error_d : state.prev_error_q;
    double& acc = channel == Channel::D ? state.accumulated_correction_d
                                        : state.accumulated_correction_q;
    const double e_n = c.gain_e * error;
    const double ce_n = c.gain_ce * (error - prev);
    const OutputAggregate agg =
        infer(fuzzify(e_n, c.partition_e), fuzzify(ce_n, c.partition_ce), c.rules,
              c.partition_u);
    const double u = c.gain_u * defuzzify(agg);
    prev = error;
    acc += u;
    return u;
}

CorrectedReference control_period(const CrossCoupledFuzzy& c, const Dq0& v_ref_dq,
                                  const ThreePhase& v_meas_abc, double wt,
                                  double dt, CrossCoupledState& state) {
    const Dq0 meas = abc_to_dq0(v_meas_abc, wt);
    if (!state.filter_init) {
        state.filtered_meas = meas;
        state.filter_init = true;
    } else {
        const double a = 1.0 - std::exp(-dt / c.meas_lpf_tau);
        state.filtered_meas.d += a * (meas.d - state.filtered_meas.d);
        state.filtered_meas.q += a * (meas.q - state.filtered_meas.q);
        state.filtered_meas.z += a * (meas.z - state.filtered_meas.z);
    }
    const double err_d = v_ref_dq.d - state.filtered_meas.d;
    const double err_q = v_ref_dq.q - state.filtered_meas.q;
    fuzzy_step(c.ctrl, err_d, state.fuzzy, Channel::D);
    fuzzy_step(c.ctrl, err_q, state.fuzzy, Channel::Q);
    return {v_ref_dq.d + state.fuzzy.accumulated_correction_d,
            v_ref_dq.q + state.fuzzy.accumulated_correction_q};
}

}  // namespace mcsim
