#include "mcsim/switchcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mcsim {

void SwitchState::validate() const {
    for (int j = 0; j < 3; ++j) {
        const int k = input_of[static_cast<std::size_t>(j)];
        if (k < 0 || k > 2)
            throw std::invalid_argument("SwitchState: input index out of range");
    }
}

SwitchState SwitchState::from_flags(const std::array<std::array<bool, 3>, 3>& s) {
    SwitchState st{};
    for (int j = 0; j < 3; ++j) {
        int found = -1;
        for (int k = 0; k < 3; ++k) {
            if (s[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]) {
                if (found >= 0)
                    throw std::invalid_argument(
                        "SwitchState: more than one input connected to output column");
                found = k;
            }
        }
        if (found < 0)
            throw std::invalid_argument("SwitchState: open output column");
        st.input_of[static_cast<std::size_t>(j)] = found;
    }
    return st;
}

const std::array<SwitchState, 27>& SwitchState::all() {
    static const std::array<SwitchState, 27> states = [] {
        std::array<SwitchState, 27> out{};
        std::size_t idx = 0;
        for (int ka = 0; ka < 3; ++ka)
            for (int kb = 0; kb < 3; ++kb)
                for (int kc = 0; kc < 3; ++kc) out[idx++] = SwitchState{{ka, kb, kc}};
        return out;
    }();
    return states;
}

std::string DutyViolation::describe() const {
    char buf[96];
    if (kind == Kind::CellRange) {
        std::snprintf(buf, sizeof buf, "cell m[%d][%d] = %.12g out of [0,1]", row, col,
                      value);
    } else {
        std::snprintf(buf, sizeof buf, "column %d sums to %.12g (expected 1)", col,
                      value);
    }
    return buf;
}

std::string DutyReport::describe() const {
    if (ok) return "ok";
    std::string out = "duty matrix invalid:";
    for (const auto& v : violations) {
        out += "\n  ";
        out += v.describe();
    }
    return out;
}

DutyReport validate_duty(const DutyMatrix& d, double cell_tol) {
    DutyReport rep;
    if (!(d.t_seq > 0.0)) {
        rep.ok = false;
        rep.violations.push_back(
            {DutyViolation::Kind::ColumnSum, -1, -1, d.t_seq});
        return rep;
    }
    for (int j = 0; j < 3; ++j) {
        double col_sum = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double v = d.m[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            col_sum += v;
            if (!(v >= -cell_tol) || !(v <= 1.0 + cell_tol)) {
                rep.ok = false;
                rep.violations.push_back({DutyViolation::Kind::CellRange, k, j, v});
            }
        }
        if (std::abs(col_sum - 1.0) > 1e-9) {
            rep.ok = false;
            rep.violations.push_back({DutyViolation::Kind::ColumnSum, -1, j, col_sum});
        }
    }
    return rep;
}

std::array<std::array<double, 3>, 3> SwitchTimeline::dwell() const {
    std::array<std::array<double, 3>, 3> d{};
    for (const auto& seg : segments)
        for (int j = 0; j < 3; ++j)
            d[static_cast<std::size_t>(seg.state.input_of[static_cast<std::size_t>(j)])]
             [static_cast<std::size_t>(j)] += seg.duration;
    return d;
}

namespace {

// One A->B->C pass over [0, span] with switch instants at the duty
// cumulative sums.
std::vector<Segment> single_pass(const DutyMatrix& d, double span) {
    std::array<std::array<double, 2>, 3> cut{};  // column j: A/B and B/C instants
    for (int j = 0; j < 3; ++j) {
        const double c0 = std::clamp(d.m[0][static_cast<std::size_t>(j)], 0.0, 1.0);
        const double c1 =
            std::clamp(c0 + d.m[1][static_cast<std::size_t>(j)], 0.0, 1.0);
        cut[static_cast<std::size_t>(j)] = {c0 * span, c1 * span};
    }

    std::vector<double> bounds{0.0, span};
    for (int j = 0; j < 3; ++j)
        for (double c : cut[static_cast<std::size_t>(j)]) bounds.push_back(c);
    std::sort(bounds.begin(), bounds.end());

    const double merge_tol = 1e-13 * span;
    std::vector<Segment> segments;
    double prev = 0.0;
    for (std::size_t i = 1; i < bounds.size(); ++i) {
        const double next = bounds[i];
        if (next - prev <= merge_tol) continue;  // degenerate gap, absorbed
        const double mid = 0.5 * (prev + next);
        SwitchState st{};
        for (int j = 0; j < 3; ++j) {
            const auto& c = cut[static_cast<std::size_t>(j)];
            st.input_of[static_cast<std::size_t>(j)] = mid < c[0] ? 0 : (mid < c[1] ? 1 : 2);
        }
        segments.push_back({st, next - prev});
        prev = next;
    }
    // degenerate tail gaps extend the final segment so durations sum to span
    if (!segments.empty() && prev < span) segments.back().duration += span - prev;
    return segments;
}

}  // namespace

SwitchTimeline sequence(const DutyMatrix& d, SequenceStyle style) {
    const DutyReport rep = validate_duty(d);
    if (!rep.ok) throw std::invalid_argument(rep.describe());

    SwitchTimeline tl;
    tl.t_seq = d.t_seq;
    if (style == SequenceStyle::SingleSided) {
        tl.segments = single_pass(d, d.t_seq);
        return tl;
    }
    // double-sided: half-period pass followed by its mirror image
    tl.segments = single_pass(d, 0.5 * d.t_seq);
    tl.segments.reserve(2 * tl.segments.size());
    for (std::size_t i = tl.segments.size(); i-- > 0;) {
        const Segment& seg = tl.segments[i];
        if (!tl.segments.empty() && tl.segments.back().state == seg.state)
            tl.segments.back().duration += seg.duration;
        else
            tl.segments.push_back(seg);
    }
    return tl;
}

ThreePhase apply_state(const SwitchState& s, const ThreePhase& v_in) {
    s.validate();
    const double v[3] = {v_in.a, v_in.b, v_in.c};
    return {v[s.input_of[0]], v[s.input_of[1]], v[s.input_of[2]]};
}

ThreePhase input_current(const SwitchState& s, const ThreePhase& i_out) {
    s.validate();
    const double i[3] = {i_out.a, i_out.b, i_out.c};
    double in[3] = {0.0, 0.0, 0.0};
    for (int j = 0; j < 3; ++j) in[s.input_of[static_cast<std::size_t>(j)]] += i[j];
    return {in[0], in[1], in[2]};
}

}  // namespace mcsim
