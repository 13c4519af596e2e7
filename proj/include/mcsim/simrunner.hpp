#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcsim/scenario.hpp"
#include "mcsim/switchcore.hpp"

namespace mcsim {

// Raised when the configured q produces an invalid duty matrix (or the
// method's precondition rejects it) and overmodulation was not allowed.
struct DutyAbortError : std::runtime_error {
    DutyReport report;
    double at_time = 0.0;

    DutyAbortError(DutyReport rep, double t, const std::string& msg)
        : std::runtime_error(msg), report(std::move(rep)), at_time(t) {}
};

// THD of one port, voltage and current. "harmonic" truncates the harmonic sum
// at the scenario's n_max; "total" is the residual (rms-based) figure that
// also counts switching-band distortion. Empty optional = no fundamental.
struct PortThd {
    std::optional<double> voltage_harmonic;
    std::optional<double> voltage_total;
    std::optional<double> current_harmonic;
    std::optional<double> current_total;
};

struct SimResult {
    TimeGrid grid;  // recording grid for the whole run
    std::vector<ThreePhase> v_in, i_in;   // converter input port
    std::vector<ThreePhase> v_out, i_out; // converter output port (pole voltages)

    std::size_t analysis_start = 0;  // first sample of the analysis window
    std::size_t analysis_len = 0;    // whole periods of both fundamentals

    PortThd thd_in, thd_out;
    PQSetting pq_in, pq_out;
    double transfer_ratio_measured = 0.0;
    double commutations_per_period = 0.0;
    double p_in_mean = 0.0;   // sample-mean converter input power, W
    double p_out_mean = 0.0;  // sample-mean converter output power, W

    // Exact energy bookkeeping over the analysis window (R/RL loads only).
    std::optional<double> energy_in;
    std::optional<double> energy_out;
    std::optional<double> energy_dissipated;
    std::optional<double> energy_stored_delta;

    // Phase-a spectra over the analysis window (load phase voltage / current).
    Spectrum out_v_spectrum, out_i_spectrum, in_i_spectrum;

    std::string notes;
};

SimResult run(const Scenario& s, bool allow_overmodulation = false);

// summary.json payload for one run.
nlohmann::json summary_json(const SimResult& r, const Scenario& s);

// Table-shaped THD comparison (rows: output/input THD; one column per label).
std::string report_text(const std::vector<nlohmann::json>& summaries);
nlohmann::json report_json(const std::vector<nlohmann::json>& summaries);

// Writes waveforms_{in,out}_{v,i}.csv and summary.json into out_dir.
void write_outputs(const SimResult& r, const Scenario& s, const std::string& out_dir);

}  // namespace mcsim
