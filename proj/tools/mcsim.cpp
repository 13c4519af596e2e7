// mcsim command line: run scenarios, sweep q, compare results, size filters.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcsim/filterdesign.hpp"
#include "mcsim/simrunner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDutyAbort = 3;

struct SweepRange {
    std::string param;
    double lo = 0.0, hi = 0.0, step = 0.0;
};

SweepRange parse_sweep_param(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw mcsim::ConfigError("--param expects name=lo:hi:step");
    SweepRange r;
    r.param = spec.substr(0, eq);
    if (r.param != "q")
        throw mcsim::ConfigError("--param: only 'q' sweeps are supported");
    const std::string range = spec.substr(eq + 1);
    const auto c1 = range.find(':');
    const auto c2 = range.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw mcsim::ConfigError("--param expects name=lo:hi:step");
    try {
        r.lo = std::stod(range.substr(0, c1));
        r.hi = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
        r.step = std::stod(range.substr(c2 + 1));
    } catch (const std::exception&) {
        throw mcsim::ConfigError("--param: bad number in range");
    }
    if (!(r.step > 0.0) || r.hi < r.lo)
        throw mcsim::ConfigError("--param: need lo <= hi and step > 0");
    return r;
}

int cmd_run(const std::string& file, const std::string& out_dir, bool allow_overmod) {
    const mcsim::Scenario s = mcsim::parse_scenario_file(file);
    const mcsim::SimResult r = mcsim::run(s, allow_overmod);
    mcsim::write_outputs(r, s, out_dir);
    std::cout << mcsim::summary_json(r, s).dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& file, const std::string& param_spec,
              const std::string& out_dir, bool allow_overmod) {
    const SweepRange range = parse_sweep_param(param_spec);
    mcsim::Scenario s = mcsim::parse_scenario_file(file);
    nlohmann::json points = nlohmann::json::array();
    std::printf("%-8s %-8s %-14s %-14s\n", "q", "valid", "ratio", "thd_i_out");
    for (double q = range.lo; q <= range.hi + 1e-12; q += range.step) {
        mcsim::Scenario point = s;
        point.q_target = q;
        nlohmann::json row;
        row["q"] = q;
        try {
            const mcsim::SimResult r = mcsim::run(point, allow_overmod);
            row["valid"] = true;
            row["summary"] = mcsim::summary_json(r, point);
            const auto& thd = row["summary"]["thd"]["out"]["current_total"];
            std::printf("%-8.4f %-8s %-14.6g %-14s\n", q, "yes",
                        r.transfer_ratio_measured,
                        thd.is_null() ? "n/a" : std::to_string(thd.get<double>()).c_str());
        } catch (const mcsim::DutyAbortError& e) {
            row["valid"] = false;
            row["abort"] = e.what();
            std::printf("%-8.4f %-8s %-14s %-14s\n", q, "no", "-", "-");
        }
        points.push_back(row);
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream f(std::filesystem::path(out_dir) / "sweep.json",
                        std::ios::binary);
        f << points.dump(2) << "\n";
    }
    return 0;
}

int cmd_report(const std::vector<std::string>& files,
               const std::optional<std::string>& json_out) {
    std::vector<nlohmann::json> summaries;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw mcsim::ConfigError("cannot open result file: " + f);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw mcsim::ConfigError(f + ": bad JSON: " + e.what());
        }
        summaries.push_back(std::move(j));
    }
    std::cout << mcsim::report_text(summaries);
    if (json_out) {
        std::ofstream f(*json_out, std::ios::binary);
        f << mcsim::report_json(summaries).dump(2) << "\n";
    }
    return 0;
}

int cmd_design_filter(double p, double vm, double fi, double fc,
                      std::optional<double> fsw) {
    mcsim::FilterDesign d;
    try {
        d = mcsim::design_input_filter(p, vm, 2.0 * 3.14159265358979323846 * fi, fc,
                                       fsw);
    } catch (const std::invalid_argument& e) {
        throw mcsim::ConfigError(e.what());
    }
    nlohmann::json j{{"c_f_farads", d.c_f},
                     {"l_f_henries", d.l_f},
                     {"f_c_hz", d.f_c},
                     {"p_rating_w", d.p_rating},
                     {"v_m_volts", d.v_m},
                     {"omega_i_rad_s", d.omega_i}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matrix converter time-domain simulator"};
    app.require_subcommand(1);

    std::string scenario_file, out_dir = "mcsim_out", param_spec;
    bool allow_overmod = false;

    auto* run_cmd = app.add_subcommand("run", "run one scenario");
    run_cmd->add_option("scenario", scenario_file, "scenario file")->required();
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_flag("--allow-overmodulation", allow_overmod,
                      "saturate instead of aborting on duty violations");

    std::string sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "sweep a scenario parameter");
    sweep_cmd->add_option("scenario", scenario_file, "scenario file")->required();
    sweep_cmd->add_option("--param", param_spec, "sweep spec, e.g. q=0.1:1.1:0.05")
        ->required();
    sweep_cmd->add_option("--out", sweep_out, "output directory for sweep.json");
    sweep_cmd->add_flag("--allow-overmodulation", allow_overmod);

    std::vector<std::string> report_files;
    std::optional<std::string> report_json_path;
    std::string report_json_opt;
    auto* report_cmd = app.add_subcommand("report", "THD comparison table");
    report_cmd->add_option("results", report_files, "summary.json files");
    report_cmd->add_option("--json", report_json_opt, "also write the table as JSON");

    double p = 0, vm = 0, fi = 0, fc = 0, fsw = 0;
    auto* design_cmd = app.add_subcommand("design-filter", "size the input LC filter");
    design_cmd->add_option("--p", p, "rated power, W")->required();
    design_cmd->add_option("--vm", vm, "input peak voltage, V")->required();
    design_cmd->add_option("--fi", fi, "input frequency, Hz")->required();
    design_cmd->add_option("--fc", fc, "cutoff frequency, Hz")->required();
    design_cmd->add_option("--fsw", fsw, "switching frequency, Hz (checked)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(scenario_file, out_dir, allow_overmod);
        if (sweep_cmd->parsed())
            return cmd_sweep(scenario_file, param_spec, sweep_out, allow_overmod);
        if (report_cmd->parsed()) {
            if (!report_json_opt.empty()) report_json_path = report_json_opt;
            return cmd_report(report_files, report_json_path);
        }
        if (design_cmd->parsed())
            return cmd_design_filter(p, vm, fi, fc,
                                     fsw > 0 ? std::optional<double>(fsw) : std::nullopt);
    } catch (const mcsim::DutyAbortError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDutyAbort;
    } catch (const mcsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
