#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "mcsim/waveforms.hpp"

namespace mcsim {

// Rotating-frame components plus zero sequence.
struct Dq0 {
    double d = 0.0;
    double q = 0.0;
    double z = 0.0;  // zero-sequence (v_0)
};

// d = 2/3 [Va sin(wt) + Vb sin(wt - 2pi/3) + Vc sin(wt + 2pi/3)]
// q = 2/3 [Va cos(wt) + Vb cos(wt - 2pi/3) + Vc cos(wt + 2pi/3)]
// z = (Va + Vb + Vc)/3
Dq0 abc_to_dq0(const ThreePhase& v, double wt);

// Exact inverse of abc_to_dq0 (same trig basis).
ThreePhase dq0_to_abc(const Dq0& d, double wt);

// Seven triangular membership functions with 50% overlap, centers uniformly
// spaced over [-1, 1]. Label order: NB NM NS ZE PS PM PB. Memberships are
// evaluated on the integer lattice 3*x so lattice points give exact 0/1
// degrees and at most two labels are ever nonzero.
struct FuzzyPartition {
    std::array<double, 7> centers;

    static FuzzyPartition uniform();
    double width() const { return centers[1] - centers[0]; }
    // Membership of x in label m (x is expected pre-clamped to [-1,1]).
    double membership(double x, int label_index) const;
};

static constexpr const char* kFuzzyLabels[7] = {"NB", "NM", "NS", "ZE",
                                                "PS", "PM", "PB"};

using MembershipVec = std::array<double, 7>;

// Degrees of x in all seven subsets; x is clamped to [-1, 1] first.
// At most two are nonzero and they sum to 1.
MembershipVec fuzzify(double x, const FuzzyPartition& p);

// 7x7 rule table; entries are label offsets -3..+3 (NB..PB), row = error
// label, column = change-of-error label. Invariants: total, antisymmetric
// under label negation, monotone non-decreasing along rows and columns.
struct RuleBase {
    std::array<std::array<int, 7>, 7> table{};

    int consequent(int e_index, int ce_index) const {
        return table[static_cast<std::size_t>(e_index)][static_cast<std::size_t>(ce_index)];
    }
    void validate() const;  // throws std::invalid_argument on invariant break

    // Default table: anti-diagonal PD base, round-half-away((i+j)/2).
    static RuleBase standard();
    // Plain-text 7x7 grid of labels, rows e = NB..PB, columns ce = NB..PB.
    static RuleBase load(std::istream& in);
    static RuleBase load_file(const std::string& path);
};

// Aggregated Mamdani output: per-label clip strengths over the output
// partition; mu(x) evaluates the pointwise-max aggregate.
struct OutputAggregate {
    std::array<double, 7> strength{};
    FuzzyPartition partition;

    double mu(double x) const;
    bool empty() const;
};

// Max-min composition: rule firing strength = min of antecedent degrees,
// per-label clip = max over rules with that consequent.
OutputAggregate infer(const MembershipVec& e_deg, const MembershipVec& ce_deg,
                      const RuleBase& rules, const FuzzyPartition& p_u);

// Centroid on a uniform 1001-point grid over [-1, 1] (symmetric pairing, so
// symmetric aggregates defuzzify to exactly zero). Throws on empty aggregate.
double defuzzify(const OutputAggregate& agg);

// One error channel of the controller: partitions, rules, and the three
// scale factors mapping physical units into the normalized universes.
struct FuzzyController {
    FuzzyPartition partition_e = FuzzyPartition::uniform();
    FuzzyPartition partition_ce = FuzzyPartition::uniform();
    FuzzyPartition partition_u = FuzzyPartition::uniform();
    RuleBase rules = RuleBase::standard();
    double gain_e = 1.0;
    double gain_ce = 1.0;
    double gain_u = 1.0;

    void validate() const;  // gains > 0
};

enum class Channel { D, Q };

struct ControllerState {
    double prev_error_d = 0.0;
    double prev_error_q = 0.0;
    double accumulated_correction_d = 0.0;
    double accumulated_correction_q = 0.0;
};

// Incremental (velocity-form) step: e = clamp(gain_e*error),
// ce = clamp(gain_ce*(error - prev)), u = gain_u * defuzzify(infer(...)).
// Accumulates u into the channel's correction; returns u.
double fuzzy_step(const FuzzyController& c, double error, ControllerState& state,
                  Channel channel);

// Cross-coupled pair: both channels share the rotation angle and the
// corrected (d,q) pair recombines into the modulation reference.
struct CrossCoupledFuzzy {
    FuzzyController ctrl;      // identical controller on both channels
    double meas_lpf_tau = 1e-3;  // first-order filter on measured dq, seconds
};

struct CrossCoupledState {
    ControllerState fuzzy;
    Dq0 filtered_meas;
    bool filter_init = false;
};

struct CorrectedReference {
    double v_d = 0.0;  // corrected d-axis reference
    double v_q = 0.0;  // corrected q-axis reference
};

// One control period: measure v_meas in dq at angle wt, low-pass filter,
// form per-channel errors against v_ref_dq, run fuzzy_step on each channel,
// and return the corrected reference pair (nominal + accumulated corrections).
CorrectedReference control_period(const CrossCoupledFuzzy& c, const Dq0& v_ref_dq,
                                  const ThreePhase& v_meas_abc, double wt,
                                  double dt, CrossCoupledState& state);

}  // namespace mcsim
