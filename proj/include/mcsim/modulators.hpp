#pragma once

#include <stdexcept>
#include <string_view>

#include "mcsim/switchcore.hpp"

namespace mcsim {

// The five modulation strategies.
enum class MethodId { VenturiniBasic, VenturiniOptimum, Scalar, SVM, Indirect };

MethodId method_from_name(std::string_view name);  // throws on unknown name
std::string_view method_name(MethodId m);

// Reference the modulator synthesizes each period.
// q is the voltage transfer ratio (output amplitude / v_im).
struct ModulationTarget {
    double q = 0.0;
    double omega_o = 0.0;  // rad/s
    double phi_o = 0.0;    // rad
    double v_im = 0.0;     // input per-phase peak, volts
    double omega_i = 0.0;  // rad/s
    double phi_i = 0.0;    // rad

    void validate() const;  // v_im > 0, q >= 0, omega_i > 0, all finite
};

// Thrown when the SVM reference leaves the synthesizable hexagon or the
// indirect method is asked for q beyond its ceiling.
struct TransferRatioError : std::domain_error {
    using std::domain_error::domain_error;
};

DutyMatrix venturini_basic(const ModulationTarget& target, double t, double t_seq);
DutyMatrix venturini_optimum(const ModulationTarget& target, double t, double t_seq);
DutyMatrix scalar_mod(const ModulationTarget& target, double t, double t_seq);
DutyMatrix svm_mod(const ModulationTarget& target, double t, double t_seq);
DutyMatrix indirect_mod(const ModulationTarget& target, double t, double t_seq);

DutyMatrix modulate(MethodId method, const ModulationTarget& target, double t,
                    double t_seq);

// Theoretical maximum voltage transfer ratio per method:
// 0.5, sqrt(3)/2, sqrt(3)/2, sqrt(3)/2, 6*sqrt(3)/pi^2.
double max_ratio(MethodId method);

}  // namespace mcsim
