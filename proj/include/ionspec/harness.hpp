#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ionspec/config.hpp"
#include "ionspec/diagnostics.hpp"
#include "ionspec/gronwall.hpp"
#include "ionspec/radius.hpp"
#include "ionspec/timeseries.hpp"

namespace ionspec {

/// Output directory layout of a run:
///   resolved_config.json   canonical config
///   invariants.csv         one row per diagnostic sample
///   radius.csv             tau_est, tau_theory, fit R^2, Gevrey norm at tau_theory
///   gevrey.csv             y(tau, m) for each configured probe (only with probes)
///   ledger.csv             Gronwall ledger (NPD: L(t) bound; NPE: A(t) bound)
///   steps.csv              step, time, dt
///   snapshots/snap_<step>.bin
///   summary.json
struct RunSummary {
    bool diverged = false;
    std::int64_t steps = 0;
    double final_time = 0.0;
    std::string error;
    std::optional<double> T0;
    bool T0_calibrated = false;
    bool T0_saturated = false;
    bool ledger_negative = false;
    std::vector<std::string> warnings;
};

/// Consumes states in time order and writes the diagnostic time series. Radius rows of an NPD
/// run with T0 = "auto" are held back until finish(), when T0 is calibrated from the samples.
class DiagnosticSession {
public:
    DiagnosticSession(const RunConfig& cfg, const std::filesystem::path& out_dir);

    /// Requires fresh caches.
    void observe(const SimState& state);
    void finish(RunSummary& summary);

private:
    void write_radius(const SimState& state, double tau_theory, const RadiusFit& fit);

    RunConfig cfg_;
    std::filesystem::path dir_;
    InvariantAccumulator acc_;
    std::unique_ptr<CsvSeries> invariants_;
    std::unique_ptr<CsvSeries> radius_;
    std::unique_ptr<CsvSeries> probes_;

    std::vector<SimState> held_;               // NPD with calibrated T0
    std::vector<RadiusFit> held_fits_;
    std::vector<NpdLedgerSample> npd_samples_;

    std::optional<NpeRadiusBudget> budget_;    // NPE
    std::vector<double> npe_sqrt_y_;
    double mean_sq_sum_ = 0.0;
    bool charged_ = false;
    bool started_ = false;
};

/// Runs a configuration end to end into `out_dir`. Divergence is reported in the summary,
/// not thrown; configuration and I/O failures throw.
RunSummary run_experiment(const RunConfig& cfg, const std::filesystem::path& out_dir,
                          std::ostream& log);

/// Recomputes invariants/radius/ledger series from the snapshots of a finished run.
RunSummary diagnose_run(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir,
                        std::ostream& log);

/// Shell spectra of every field of a snapshot as CSV (field, shell, k_at_max, max_amplitude,
/// energy) plus one radius fit per field on `log`.
void dump_spectrum(const std::filesystem::path& snapshot, const std::filesystem::path& out_csv,
                   int k_min, int k_max, double noise_floor, std::ostream& log);

std::string summary_json(const RunSummary& s);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ionspec
