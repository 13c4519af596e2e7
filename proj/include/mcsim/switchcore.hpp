#pragma once

#include <array>
#include <string>
#include <vector>

#include "mcsim/waveforms.hpp"

namespace mcsim {

// Admissible 3x3 switch configuration: every output phase j is connected to
// exactly one input phase (no open output, no shorted input lines).
// Stored as the input index per output column; on(k,j) exposes the flag view.
struct SwitchState {
    std::array<int, 3> input_of;  // output column j -> input row k

    bool on(int k, int j) const { return input_of[static_cast<std::size_t>(j)] == k; }
    void validate() const;  // indices in 0..2

    // Build from a 3x3 flag matrix; throws if any column breaks the invariant.
    static SwitchState from_flags(const std::array<std::array<bool, 3>, 3>& s);
    // All 27 admissible configurations, in lexicographic column order.
    static const std::array<SwitchState, 27>& all();

    bool operator==(const SwitchState&) const = default;
};

// Modulation duty cycles m[k][j] for one switching period of length t_seq:
// row k = input phase (A,B,C), column j = output phase (a,b,c).
struct DutyMatrix {
    std::array<std::array<double, 3>, 3> m{};
    double t_seq = 0.0;
};

struct DutyViolation {
    enum class Kind { CellRange, ColumnSum };
    Kind kind;
    int row = -1;  // -1 for column-sum violations
    int col = 0;
    double value = 0.0;

    std::string describe() const;
};

struct DutyReport {
    bool ok = true;
    std::vector<DutyViolation> violations;

    std::string describe() const;
};

// Checks 0 <= m_kj <= 1 (within tol) and per-column sums == 1 (within 1e-9).
DutyReport validate_duty(const DutyMatrix& d, double cell_tol = 1e-9);

struct Segment {
    SwitchState state;
    double duration = 0.0;
};

// Timed switch sequence within one period. Sum of durations == t_seq.
struct SwitchTimeline {
    std::vector<Segment> segments;
    double t_seq = 0.0;

    // Accumulated dwell of input k on output j (round-trip check).
    std::array<std::array<double, 3>, 3> dwell() const;
};

enum class SequenceStyle {
    SingleSided,  // sawtooth A->B->C per column, identical every period
    DoubleSided,  // palindromic A->B->C->C->B->A, halves the ripple
};

// Single-sided sequencing: each output column runs input A, then B, then C,
// with per-column switch instants at the duty cumulative sums. Merged over
// columns this yields at most 7 segments; boundaries closer than
// 1e-13*t_seq are coalesced. DoubleSided mirrors the half-period pattern.
// Throws std::invalid_argument on invalid duty.
SwitchTimeline sequence(const DutyMatrix& d,
                        SequenceStyle style = SequenceStyle::SingleSided);

// Output phase j carries the voltage of its connected input.
ThreePhase apply_state(const SwitchState& s, const ThreePhase& v_in);

// Input line k carries the sum of the output currents connected to it.
ThreePhase input_current(const SwitchState& s, const ThreePhase& i_out);

}  // namespace mcsim
