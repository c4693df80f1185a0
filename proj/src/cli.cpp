#include "ionspec/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ionspec/config.hpp"
#include "ionspec/errors.hpp"
#include "ionspec/harness.hpp"

namespace fs = std::filesystem;

namespace ionspec {

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string target;
    bool resume = false;
    int workers = 1;
    int cadence = 0;
    std::vector<int> band;
    double noise_floor = 1e-14;
};

RunConfig load_config(const Options& o) {
    RunConfig cfg = parse_config(read_text_file(o.config));
    if (o.cadence > 0) cfg.diagnostics.cadence = o.cadence;
    if (!o.out.empty()) cfg.output = o.out;
    return cfg;
}

int cmd_validate(const Options& o, std::ostream& out) {
    const auto cfg = load_config(o);
    out << "valid " << model_name(cfg.model) << " config, n=" << cfg.n << ", "
        << cfg.species.size() << " species\n";
    return kExitOk;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(o);
    const auto summary = run_experiment(cfg, cfg.output, err);
    out << (summary.diverged ? "diverged" : "completed") << " after " << summary.steps
        << " steps at t=" << summary.final_time << ", output in " << cfg.output << '\n';
    return summary.diverged ? kExitDivergence : kExitOk;
}

int cmd_diagnose(const Options& o, std::ostream& out, std::ostream& err) {
    const fs::path run_dir = o.target;
    const fs::path dest = o.out.empty() ? run_dir / "diagnose" : fs::path(o.out);
    const auto summary = diagnose_run(run_dir, dest, err);
    out << "diagnostics for t=" << summary.final_time << " written to " << dest.string() << '\n';
    return kExitOk;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
    int k_min = 1;
    int k_max = 0;
    if (!o.band.empty()) {
        k_min = o.band[0];
        k_max = o.band[1];
    }
    const fs::path dest = o.out.empty() ? fs::path("spectrum.csv") : fs::path(o.out);
    dump_spectrum(o.target, dest, k_min, k_max, o.noise_floor, out);
    return kExitOk;
}

std::string point_dir(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "point_%04zu", index);
    return buf;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.out.empty()) throw ValidationError("--out", "sweep needs an output directory");
    const auto sweep = parse_sweep(read_text_file(o.config));
    auto points = expand_sweep(sweep);
    const fs::path root = o.out;
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError(root.string() + ": " + ec.message());

    const fs::path manifest = root / "manifest.jsonl";
    std::set<std::size_t> done;
    if (o.resume && fs::exists(manifest)) {
        std::ifstream in(manifest);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                const auto j = nlohmann::json::parse(line);
                const std::string status = j.at("status");
                if (status == "ok" || status == "diverged") done.insert(j.at("index").get<std::size_t>());
            } catch (const std::exception&) {
                // a torn final line from an interrupted sweep is rerun
            }
        }
    } else {
        write_text_file(manifest, "");
    }

    std::vector<std::size_t> todo;
    for (const auto& p : points) {
        if (!done.count(p.index)) todo.push_back(p.index);
    }
    out << points.size() << " sweep points, " << todo.size() << " to run\n";

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    int worst = kExitOk;
    std::ofstream man(manifest, std::ios::app);
    if (!man) throw IoError(manifest.string() + ": cannot open for appending");

    auto worker = [&] {
        for (;;) {
            const std::size_t slot = next.fetch_add(1);
            if (slot >= todo.size()) return;
            auto& p = points[todo[slot]];
            const std::string dir = point_dir(p.index);
            p.config.output = (root / dir).string();
            if (o.cadence > 0) p.config.diagnostics.cadence = o.cadence;
            std::ostringstream log;
            std::string status = "ok";
            int code = kExitOk;
            try {
                const auto s = run_experiment(p.config, root / dir, log);
                if (s.diverged) {
                    status = "diverged";
                    code = kExitDivergence;
                }
            } catch (const ConfigError& e) {
                status = "invalid";
                code = kExitValidation;
                log << e.what() << '\n';
            } catch (const std::exception& e) {
                status = "io_error";
                code = kExitIo;
                log << e.what() << '\n';
            }
            nlohmann::json rec{{"index", p.index}, {"dir", dir}, {"params", p.params},
                               {"status", status}, {"exit_code", code}};
            std::lock_guard lock(mu);
            err << log.str();
            man << rec.dump() << '\n';
            man.flush();
            worst = std::max(worst, code);
        }
    };
    const int n_workers = std::max(1, std::min<int>(o.workers, static_cast<int>(todo.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (!man) return kExitIo;
    return worst;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"pseudo-spectral solver for the Nernst-Planck-Euler and Nernst-Planck-Darcy systems"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "integrate a run configuration");
    run->add_option("--config", o.config, "run configuration (JSON)")->required();
    run->add_option("--out", o.out, "output directory (overrides the config)");
    run->add_option("--cadence", o.cadence, "steps between diagnostic rows")->check(CLI::PositiveNumber);

    auto* diag = app.add_subcommand("diagnose", "recompute diagnostics from stored snapshots");
    diag->add_option("run_dir", o.target, "directory of a finished run")->required();
    diag->add_option("--out", o.out, "destination directory (default RUN_DIR/diagnose)");

    auto* spec = app.add_subcommand("spectrum", "dump shell spectra of a snapshot");
    spec->add_option("snapshot", o.target, "snapshot file")->required();
    spec->add_option("--out", o.out, "CSV destination (default spectrum.csv)");
    spec->add_option("--band", o.band, "fit band k_min k_max")->expected(2);
    spec->add_option("--noise-floor", o.noise_floor, "relative noise floor");

    auto* sweep = app.add_subcommand("sweep", "run the cartesian product of parameter axes");
    sweep->add_option("--config", o.config, "sweep document (JSON)")->required();
    sweep->add_option("--out", o.out, "sweep root directory")->required();
    sweep->add_flag("--resume", o.resume, "skip points already in the manifest");
    sweep->add_option("--workers", o.workers, "parallel runs")->check(CLI::PositiveNumber);
    sweep->add_option("--cadence", o.cadence, "steps between diagnostic rows")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "parse and validate a run configuration");
    validate->add_option("--config", o.config, "run configuration (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        if (run->parsed()) return cmd_run(o, out, err);
        if (diag->parsed()) return cmd_diagnose(o, out, err);
        if (spec->parsed()) return cmd_spectrum(o, out);
        if (sweep->parsed()) return cmd_sweep(o, out, err);
        if (validate->parsed()) return cmd_validate(o, out);
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DivergenceError& e) {
        err << "divergence at step " << e.step() << ": " << e.what() << '\n';
        return kExitDivergence;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitValidation;
}

}  // namespace ionspec
