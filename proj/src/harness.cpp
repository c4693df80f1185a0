#include "ionspec/harness.hpp"

#include <limits>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ionspec/errors.hpp"
#include "ionspec/initial_condition.hpp"
#include "ionspec/snapshot_io.hpp"
#include "ionspec/spectral_ops.hpp"

namespace fs = std::filesystem;

namespace ionspec {

namespace {

void make_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError(p.string() + ": " + ec.message());
}

RadiusFit fit_or_empty(const SimState& s, const DiagnosticsConfig& d) {
    try {
        return state_radius_estimate(s, d.fit_k_min, d.fit_k_max, d.noise_floor);
    } catch (const InsufficientDataError&) {
        return {};
    }
}

std::vector<double> diffusivities(const SimState& s) {
    std::vector<double> D;
    for (const auto& sp : s.species()) D.push_back(sp.D);
    return D;
}

std::string snapshot_name(std::int64_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%08lld.bin", static_cast<long long>(step));
    return buf;
}

}  // namespace

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw IoError(path.string() + ": write failed");
}

DiagnosticSession::DiagnosticSession(const RunConfig& cfg, const fs::path& out_dir)
    : cfg_(cfg), dir_(out_dir), acc_(cfg.diagnostics.hm_order) {
    make_dir(dir_);
    for (const char* name : {"invariants.csv", "radius.csv", "gevrey.csv", "ledger.csv"}) {
        std::error_code ec;
        fs::remove(dir_ / name, ec);
    }
    invariants_ = std::make_unique<CsvSeries>(dir_ / "invariants.csv", invariant_columns(cfg.species.size()));
    radius_ = std::make_unique<CsvSeries>(dir_ / "radius.csv", radius_columns());
    if (!cfg.diagnostics.probes.empty()) {
        std::vector<std::string> cols{"time"};
        for (std::size_t i = 0; i < cfg.diagnostics.probes.size(); ++i) {
            cols.push_back("y_" + std::to_string(i));
        }
        probes_ = std::make_unique<CsvSeries>(dir_ / "gevrey.csv", cols);
    }
}

void DiagnosticSession::write_radius(const SimState& state, double tau_theory, const RadiusFit& fit) {
    RadiusRecord rec;
    rec.time = state.time();
    rec.tau_estimated = fit.tau;
    rec.fit_quality = fit.r_squared;
    rec.tau_theory = tau_theory;
    rec.gevrey_norm_at_tau = std::sqrt(gevrey_energy(state, tau_theory, cfg_.diagnostics.ledger_m));
    radius_->append(radius_row(rec));
}

void DiagnosticSession::observe(const SimState& state) {
    const auto& d = cfg_.diagnostics;
    invariants_->append(invariant_row(invariant_report(state, acc_)));

    if (probes_) {
        std::vector<double> row{state.time()};
        for (const auto& p : d.probes) row.push_back(gevrey_energy(state, p.tau, p.m));
        probes_->append(row);
    }

    const auto fit = fit_or_empty(state, d);
    if (state.model() == Model::NPD) {
        npd_samples_.push_back(npd_ledger_sample(state, d.ledger_m));
        if (cfg_.T0) {
            write_radius(state, npd_radius_bound(state.time(), diffusivities(state), *cfg_.T0), fit);
        } else {
            held_.push_back(state);
            held_fits_.push_back(fit);
        }
    } else {
        const double m = d.ledger_m;
        if (!started_) {
            for (const auto& sp : state.species()) {
                const double cbar = sp.c.mean().real();
                mean_sq_sum_ += cbar * cbar;
                if (sp.c.max_abs_coeff() != 0.0) charged_ = true;
            }
            budget_.emplace(cfg_.tau0, cfg_.C_user, std::sqrt(gevrey_energy(state, cfg_.tau0, m)),
                            charged_);
        }
        const double w = norm(state.omega(), GevreyNorm{0.0, m - 1.0});
        const double B = npe_rate(npe_rate_inputs(state, m, mean_sq_sum_, charged_));
        budget_->push(state.time(), w, B);
        const double tau = budget_->tau().back();
        npe_sqrt_y_.push_back(std::sqrt(gevrey_energy(state, tau, m)));
        write_radius(state, tau, fit);
    }
    started_ = true;
}

void DiagnosticSession::finish(RunSummary& summary) {
    std::vector<std::string> cols;
    GronwallReport report;
    if (cfg_.model == Model::NPD) {
        if (!cfg_.T0 && !held_.empty()) {
            const auto cal = calibrate_npd_T0(held_, cfg_.diagnostics.ledger_m);
            // violated at the first sample after t0: fall back to that sample spacing so T0 stays positive
            double T0 = cal.T0;
            if (!(T0 > 0.0)) {
                T0 = held_.size() > 1 ? held_[1].time() - held_[0].time() : 0.0;
                if (!(T0 > 0.0)) T0 = std::numeric_limits<double>::min();
            }
            summary.T0 = T0;
            summary.T0_calibrated = true;
            summary.T0_saturated = cal.saturated;
            for (std::size_t i = 0; i < held_.size(); ++i) {
                write_radius(held_[i], npd_radius_bound(held_[i].time(), diffusivities(held_[i]), T0),
                             held_fits_[i]);
            }
            held_.clear();
        } else {
            summary.T0 = cfg_.T0;
        }
        report = npd_gronwall_ledger(npd_samples_, cfg_.C_user);
        CsvSeries ledger(dir_ / "ledger.csv", {"time", "L", "bound", "observed", "margin"});
        for (std::size_t i = 0; i < report.times.size(); ++i) {
            ledger.append({report.times[i], report.exponent[i], report.bound[i], report.observed[i],
                           report.margin[i]});
        }
    } else if (budget_) {
        report = npe_gronwall_ledger(*budget_, npe_sqrt_y_);
        CsvSeries ledger(dir_ / "ledger.csv",
                         {"time", "log_g", "A", "Atilde", "B", "tau_theory", "sqrt_y", "margin"});
        for (std::size_t i = 0; i < report.times.size(); ++i) {
            ledger.append({report.times[i], budget_->log_g()[i], budget_->A()[i],
                           budget_->Atilde()[i], budget_->B()[i], budget_->tau()[i],
                           npe_sqrt_y_[i], report.margin[i]});
        }
    }
    summary.ledger_negative = report.any_negative;
}

std::string summary_json(const RunSummary& s) {
    nlohmann::json j;
    j["status"] = s.diverged ? "diverged" : "ok";
    j["steps"] = s.steps;
    j["final_time"] = s.final_time;
    if (!s.error.empty()) j["error"] = s.error;
    j["T0"] = s.T0 ? nlohmann::json(*s.T0) : nlohmann::json(nullptr);
    j["T0_calibrated"] = s.T0_calibrated;
    j["T0_saturated"] = s.T0_saturated;
    j["ledger_negative_margin"] = s.ledger_negative;
    j["warnings"] = s.warnings;
    return j.dump(2) + "\n";
}

RunSummary run_experiment(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    make_dir(out_dir / "snapshots");
    write_text_file(out_dir / "resolved_config.json", resolved_config_text(cfg));

    RunSummary summary;
    const SimState initial = initial_state(cfg, &summary.warnings);
    for (const auto& w : summary.warnings) log << "warning: " << w << '\n';

    DiagnosticSession session(cfg, out_dir);
    {
        std::error_code ec;
        fs::remove(out_dir / "steps.csv", ec);
    }
    CsvSeries steps(out_dir / "steps.csv", step_columns());

    const int cadence = cfg.diagnostics.cadence;
    const int snap_cadence = cfg.diagnostics.snapshot_cadence;
    std::optional<SimState> last;
    std::int64_t last_observed = -1;
    std::int64_t last_saved = -1;

    auto hook = [&](const SimState& s) {
        const std::int64_t k = s.step_index();
        if (k % cadence == 0) {
            session.observe(s);
            last_observed = k;
        }
        if (k == 0 || (snap_cadence > 0 && k % snap_cadence == 0)) {
            write_snapshot(s, out_dir / "snapshots" / snapshot_name(k));
            last_saved = k;
        }
        last = s;
    };

    RunOptions opts;
    opts.cadence = 1;
    opts.keep_snapshots = false;
    const auto traj = run(initial, cfg.stepper, {hook}, opts);

    for (const auto& st : traj.steps) {
        steps.append({static_cast<double>(st.index), st.time, st.dt});
    }
    if (last) {
        if (last->step_index() != last_observed) session.observe(*last);
        if (last->step_index() != last_saved) {
            write_snapshot(*last, out_dir / "snapshots" / snapshot_name(last->step_index()));
        }
        summary.steps = last->step_index();
        summary.final_time = last->time();
    }
    summary.diverged = traj.diverged;
    summary.error = traj.error;
    if (traj.diverged) log << "run diverged at step " << traj.failed_step << ": " << traj.error << '\n';
    session.finish(summary);
    write_text_file(out_dir / "summary.json", summary_json(summary));
    return summary;
}

RunSummary diagnose_run(const fs::path& run_dir, const fs::path& out_dir, std::ostream& log) {
    const fs::path snaps = run_dir / "snapshots";
    if (!fs::is_directory(snaps)) throw IoError(snaps.string() + ": no snapshot directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(snaps)) {
        if (e.path().extension() == ".bin") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError(snaps.string() + ": no snapshots");

    std::vector<SimState> states;
    for (const auto& f : files) states.push_back(read_snapshot(f));
    std::stable_sort(states.begin(), states.end(),
                     [](const SimState& a, const SimState& b) { return a.time() < b.time(); });

    RunConfig cfg;
    const fs::path resolved = run_dir / "resolved_config.json";
    if (fs::exists(resolved)) {
        cfg = parse_config(read_text_file(resolved));
    } else {
        const auto& s0 = states.front();
        cfg.model = s0.model();
        cfg.n = s0.grid().n();
        cfg.species.resize(s0.species().size());
        cfg.diagnostics.fit_k_max = s0.grid().dealias_cutoff();
        if (cfg.model == Model::NPE) cfg.vorticity = FieldSpec{};
    }
    if (states.front().grid().n() != cfg.n || states.front().species().size() != cfg.species.size()) {
        throw IoError(run_dir.string() + ": snapshots do not match the resolved config");
    }
    log << "diagnosing " << states.size() << " snapshots\n";
    RunSummary summary;
    DiagnosticSession session(cfg, out_dir);
    for (const auto& s : states) session.observe(s);
    summary.steps = states.back().step_index();
    summary.final_time = states.back().time();
    session.finish(summary);
    write_text_file(out_dir / "summary.json", summary_json(summary));
    return summary;
}

void dump_spectrum(const fs::path& snapshot, const fs::path& out_csv, int k_min, int k_max,
                   double noise_floor, std::ostream& log) {
    const SimState s = read_snapshot(snapshot);
    if (k_max <= 0) k_max = s.grid().dealias_cutoff();
    std::vector<std::pair<std::string, const SpectralField*>> fields;
    for (std::size_t i = 0; i < s.species().size(); ++i) {
        fields.emplace_back("species_" + std::to_string(i), &s.species()[i].c);
    }
    if (s.model() == Model::NPE) fields.emplace_back("omega", &s.omega());

    std::ostringstream csv;
    csv << "field,shell,k_at_max,max_amplitude,energy\n";
    for (const auto& [name, f] : fields) {
        const auto spec = shell_spectrum(*f);
        for (std::size_t i = 0; i < spec.shell.size(); ++i) {
            csv << name << ',' << spec.shell[i] << ',' << format_number(spec.k_at_max[i]) << ','
                << format_number(spec.max_amplitude[i]) << ',' << format_number(spec.energy[i])
                << '\n';
        }
        try {
            const auto fit = radius_estimate(*f, k_min, k_max, noise_floor);
            log << name << ": tau_est " << format_number(fit.tau) << " R2 "
                << format_number(fit.r_squared) << " shells " << fit.shells_used << '\n';
        } catch (const InsufficientDataError& e) {
            log << name << ": " << e.what() << '\n';
        }
    }
    if (out_csv.has_parent_path()) make_dir(out_csv.parent_path());
    write_text_file(out_csv, csv.str());
}

}  // namespace ionspec
