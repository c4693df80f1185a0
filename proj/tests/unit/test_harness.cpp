#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ionspec/cli.hpp"
#include "ionspec/config.hpp"
#include "ionspec/errors.hpp"
#include "ionspec/harness.hpp"
#include "ionspec/initial_condition.hpp"
#include "ionspec/snapshot_io.hpp"
#include "ionspec/timeseries.hpp"
#include "../support/field_helpers.hpp"
#include "../support/oracles.hpp"
#include "../support/temp_dir.hpp"

using namespace ionspec;
using nlohmann::json;
using testing_support::TempDir;

namespace {

const char* kMinimalNpd = R"({
  "model": "NPD",
  "n": 16,
  "species": [
    {"z": 1, "D": 0.5, "initial": {"type": "constant", "value": 1.0}},
    {"z": -1, "D": 1.0, "initial": {"type": "modes", "modes": [{"k": [0, 0], "amplitude": 1.0}, {"k": [1, 0], "amplitude": 0.1}]}}
  ]
})";

json minimal() { return json::parse(kMinimalNpd); }

std::string validation_path(const json& doc) {
    try {
        config_from_json(doc);
    } catch (const ValidationError& e) {
        return e.key_path();
    }
    return "<accepted>";
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    args.insert(args.begin(), "ionspec_cli");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

SimState random_state(int n, std::size_t species, bool npe, std::uint64_t seed) {
    auto g = SpectralGrid::create(n);
    std::vector<IonSpecies> sp;
    for (std::size_t i = 0; i < species; ++i) {
        auto lat = oracle::random_band_limited(n, seed + i, 0.3, false);
        sp.push_back({i % 2 ? -1.0 : 2.0, 0.3 + 0.1 * double(i), testing_support::to_field(lat, g)});
    }
    FluidState fluid = DarcyFluid{};
    if (npe) fluid = EulerFluid{testing_support::to_field(oracle::random_band_limited(n, seed + 99, 0.3, true), g)};
    SimState s(g, std::move(sp), std::move(fluid), 0.125);
    s.set_step_index(17);
    return s;
}

bool bit_identical(const SpectralField& a, const SpectralField& b) {
    auto x = a.data();
    auto y = b.data();
    return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size_bytes()) == 0;
}

}  // namespace

TEST_CASE("minimal config fills defaults and round-trips") {
    const auto cfg = parse_config(kMinimalNpd);
    CHECK(cfg.model == Model::NPD);
    CHECK(cfg.n == 16);
    CHECK(cfg.species.size() == 2);
    CHECK(cfg.stepper.scheme == Scheme::IF_RK4);
    CHECK(cfg.diagnostics.fit_k_max == 5);
    CHECK_FALSE(cfg.T0.has_value());
    CHECK_FALSE(cfg.vorticity.has_value());
    const auto text = resolved_config_text(cfg);
    CHECK(resolved_config_text(parse_config(text)) == text);

    auto npe = minimal();
    npe["model"] = "NPE";
    npe["tau0"] = 0.25;
    npe["vorticity"] = {{"type", "random_band"}, {"shells", {1, 3}}, {"law", "power"}, {"rate", 2.0}};
    npe["diagnostics"] = {{"gevrey_probes", {{{"tau", 0.1}, {"m", 3}}}}};
    npe["seed"] = 12345678901234ULL;
    const auto t2 = resolved_config_text(config_from_json(npe));
    CHECK(resolved_config_text(parse_config(t2)) == t2);
    CHECK(parse_config(t2).seed == 12345678901234ULL);
}

TEST_CASE("malformed configs name the offending key") {
    struct Case {
        std::function<void(json&)> edit;
        std::string path;
    };
    const std::vector<Case> cases{
        {[](json& d) { d["species"][0]["D"] = -1; }, "species[0].D"},
        {[](json& d) { d["n"] = 33; }, "n"},
        {[](json& d) { d["n"] = 6; }, "n"},
        {[](json& d) { d["n"] = "32"; }, "n"},
        {[](json& d) { d.erase("model"); }, "model"},
        {[](json& d) { d["model"] = "NSE"; }, "model"},
        {[](json& d) { d.erase("species"); }, "species"},
        {[](json& d) { d["species"] = json::array(); }, "species"},
        {[](json& d) { d["species"][1].erase("z"); }, "species[1].z"},
        {[](json& d) { d["vorticity"] = {{"type", "constant"}, {"value", 0}}; }, "vorticity"},
        {[](json& d) { d["tau0"] = 0.1; }, "tau0"},
        {[](json& d) { d["colour"] = "red"; }, "colour"},
        {[](json& d) { d["stepper"] = {{"dt", 0}}; }, "stepper.dt"},
        {[](json& d) { d["stepper"] = {{"scheme", "RK3"}}; }, "stepper.scheme"},
        {[](json& d) { d["stepper"] = {{"cfl", 1.5}}; }, "stepper.cfl"},
        {[](json& d) { d["stepper"] = {{"dtt", 0.1}}; }, "stepper.dtt"},
        {[](json& d) { d["diagnostics"] = {{"fit_band", {2, 9}}}; }, "diagnostics.fit_band"},
        {[](json& d) { d["diagnostics"] = {{"cadence", 0}}; }, "diagnostics.cadence"},
        {[](json& d) { d["species"][0]["initial"] = {{"type", "blob"}}; }, "species[0].initial.type"},
        {[](json& d) { d["species"][1]["initial"]["modes"][1]["k"] = {6, 0}; }, "species[1].initial.modes[1].k"},
        {[](json& d) { d["species"][1]["initial"]["modes"][0]["amp"] = 1; }, "species[1].initial.modes[0].amp"},
        {[](json& d) { d["species"][0]["initial"] = {{"type", "random_band"}, {"shells", {1, 9}}}; }, "species[0].initial.shells"},
        {[](json& d) { d["C_user"] = -2; }, "C_user"},
        {[](json& d) { d["T0"] = 0; }, "T0"},
        {[](json& d) { d["seed"] = -1; }, "seed"},
    };
    for (const auto& c : cases) {
        auto doc = minimal();
        c.edit(doc);
        CAPTURE(c.path);
        CHECK(validation_path(doc) == c.path);
    }
    try {
        auto doc = minimal();
        doc["n"] = 33;
        config_from_json(doc);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("n must be even") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("{\"model\": "), ValidationError);
    auto npe = minimal();
    npe["model"] = "NPE";
    npe["T0"] = 1.0;
    CHECK(validation_path(npe) == "T0");
}

TEST_CASE("sweep expansion") {
    SweepConfig sw;
    sw.base = minimal();
    sw.axes = {{"species[*].D", {0.5, 1.0}}, {"n", {32, 64}}};
    const auto pts = expand_sweep(sw);
    REQUIRE(pts.size() == 4);
    CHECK(pts[0].config.n == 32);
    CHECK(pts[1].config.n == 64);
    CHECK(pts[2].config.species[1].D == 1.0);
    CHECK(pts[1].config.species[0].D == 0.5);
    sw.axes = {{"species[3].D", {1.0}}};
    CHECK_THROWS_AS(expand_sweep(sw), ValidationError);
    sw.axes = {{"n", {31}}};
    CHECK_THROWS_AS(expand_sweep(sw), ValidationError);
    json d = minimal();
    set_json_path(d, "stepper.dt", 0.5);
    CHECK(d["stepper"]["dt"] == 0.5);
}

TEST_CASE("initial conditions") {
    auto g = SpectralGrid::create(16);
    FieldSpec c;
    c.value = 2.0;
    auto f = initial_condition(c, g, FieldRole::concentration, 0, 0);
    CHECK(f.coeff(0, 0) == cplx(2.0));
    CHECK(f.max_abs_coeff() == 2.0);

    FieldSpec modes;
    modes.kind = FieldSpec::Kind::modes;
    modes.modes = {{1, 0, 0.5, 0.0}, {-1, 0, 0.5, 0.0}};
    auto cosx = initial_condition(modes, g, FieldRole::vorticity, 0, 0);
    const auto p = cosx.to_physical();
    const double h = g->spacing();
    for (int j1 = 0; j1 < 16; ++j1) {
        CHECK(p[j1 * 16 + 3] == doctest::Approx(std::cos(j1 * h)).epsilon(1e-14));
    }

    FieldSpec rb;
    rb.kind = FieldSpec::Kind::random_band;
    rb.shell_min = 1;
    rb.shell_max = 4;
    rb.mean = 1.0;
    const auto a = initial_condition(rb, g, FieldRole::concentration, 7, species_stream(0));
    const auto b = initial_condition(rb, g, FieldRole::concentration, 7, species_stream(0));
    CHECK(testing_support::max_diff(a, b) == 0.0);
    const auto other = initial_condition(rb, g, FieldRole::concentration, 7, species_stream(1));
    CHECK(testing_support::max_diff(a, other) > 0.0);
    // the draw sequence does not depend on the grid
    const auto big = initial_condition(rb, SpectralGrid::create(32), FieldRole::concentration, 7, species_stream(0));
    CHECK(std::abs(big.coeff(2, 1) - a.coeff(2, 1)) < 1e-15);
    for (int k1 = -8; k1 <= 8; ++k1) {
        for (int k2 = -8; k2 <= 8; ++k2) {
            const double m = std::hypot(double(k1), double(k2));
            if (std::lround(m) > 4 || std::lround(m) < 1) {
                if (k1 || k2) CHECK(a.coeff(k1, k2) == cplx(0.0));
            }
        }
    }

    // negative concentration is lifted, vorticity loses its mean
    FieldSpec neg;
    neg.kind = FieldSpec::Kind::modes;
    neg.modes = {{0, 0, 0.2, 0.0}, {1, 0, 1.0, 0.0}};
    std::vector<std::string> warnings;
    const auto lifted = initial_condition(neg, g, FieldRole::concentration, 0, 0, &warnings);
    const auto lp = lifted.to_physical();
    CHECK(*std::min_element(lp.begin(), lp.end()) >= -1e-14);
    CHECK(warnings.size() == 1);
    const auto w = initial_condition(neg, g, FieldRole::vorticity, 0, 0);
    CHECK(w.mean() == cplx(0.0));
}

TEST_CASE("initial condition from a snapshot file") {
    TempDir dir;
    const auto s = random_state(16, 2, true, 3);
    write_snapshot(s, dir / "s.bin");
    FieldSpec f;
    f.kind = FieldSpec::Kind::file;
    f.path = (dir / "s.bin").string();
    f.field = "species[1]";
    const auto c = initial_condition(f, SpectralGrid::create(16), FieldRole::vorticity, 0, 0);
    CHECK(c.coeff(1, 2) == s.species()[1].c.coeff(1, 2));
    CHECK_THROWS_AS(initial_condition(f, SpectralGrid::create(32), FieldRole::vorticity, 0, 0), IoError);
    f.field = "species[5]";
    CHECK_THROWS_AS(initial_condition(f, SpectralGrid::create(16), FieldRole::vorticity, 0, 0), IoError);
    f.path = (dir / "missing.bin").string();
    CHECK_THROWS_AS(initial_condition(f, SpectralGrid::create(16), FieldRole::vorticity, 0, 0), IoError);
}

TEST_CASE("snapshot round trip is bit-identical") {
    TempDir dir;
    for (bool npe : {false, true}) {
        for (std::size_t count : {1u, 3u}) {
            const auto s = random_state(32, count, npe, 40 + count);
            write_snapshot(s, dir / "x.bin");
            const auto r = read_snapshot(dir / "x.bin");
            CHECK(r.model() == s.model());
            CHECK(r.time() == s.time());
            CHECK(r.step_index() == 17);
            REQUIRE(r.species().size() == count);
            for (std::size_t i = 0; i < count; ++i) {
                CHECK(r.species()[i].z == s.species()[i].z);
                CHECK(r.species()[i].D == s.species()[i].D);
                CHECK(bit_identical(r.species()[i].c, s.species()[i].c));
            }
            if (npe) CHECK(bit_identical(r.omega(), s.omega()));
            CHECK(encode_snapshot(r) == encode_snapshot(s));
        }
    }
}

TEST_CASE("snapshot corruption is detected") {
    TempDir dir;
    const auto s = random_state(16, 2, false, 5);
    auto bytes = encode_snapshot(s);
    auto save = [&](const std::vector<unsigned char>& b) {
        std::ofstream out(dir / "c.bin", std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
    };
    auto cut = bytes;
    cut.resize(cut.size() - 8);
    save(cut);
    CHECK_THROWS_AS(read_snapshot(dir / "c.bin"), SnapshotTruncatedError);
    auto flipped = bytes;
    flipped[100] ^= 0x01;
    save(flipped);
    CHECK_THROWS_AS(read_snapshot(dir / "c.bin"), SnapshotChecksumError);
    auto version = bytes;
    version[8] = 9;
    save(version);
    CHECK_THROWS_AS(read_snapshot(dir / "c.bin"), SnapshotVersionError);
    auto magic = bytes;
    magic[0] = 'X';
    save(magic);
    CHECK_THROWS_AS(read_snapshot(dir / "c.bin"), IoError);
    CHECK_THROWS_AS(read_snapshot(dir / "nothing.bin"), IoError);
    CHECK_THROWS_AS(write_snapshot(s, dir / "no_such_dir" / "x.bin"), IoError);
}

TEST_CASE("time series files") {
    TempDir dir;
    auto g = SpectralGrid::create(16);
    SimState s(g, {{1.0, 1.0, testing_support::single_mode(g, 0, 0, 1.0)}}, DarcyFluid{});
    s.refresh();
    InvariantAccumulator acc;
    const auto path = dir / "invariants.csv";
    timeseries_append(invariant_report(s, acc), path);
    CHECK(read_csv(path).rows.size() == 1);

    RadiusRecord rec;
    CHECK_THROWS_AS(timeseries_append(rec, path), SchemaError);

    for (int i = 1; i < 100; ++i) {
        s.set_time(0.01 * i);
        timeseries_append(invariant_report(s, acc), path);
    }
    std::ifstream in(path);
    int lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    CHECK(lines == 101);
    const auto t = read_csv(path);
    for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i][0] > t.rows[i - 1][0]);
    CHECK(t.columns == invariant_columns(1));

    s.set_time(0.5);
    CHECK_THROWS_AS(timeseries_append(invariant_report(s, acc), path), DataError);

    CsvSeries radius(dir / "radius.csv", radius_columns());
    CHECK_THROWS_AS(radius.append({1.0, 2.0}), SchemaError);
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-300) == "1e-300");
}

TEST_CASE("cli exit codes and outputs") {
    TempDir dir;
    const auto cfg_path = dir / "cfg.json";
    write_text_file(cfg_path, kMinimalNpd);
    CHECK(cli({"validate", "--config", cfg_path.string()}) == kExitOk);

    auto zero = minimal();
    zero["stepper"] = {{"t_end", 0.0}};
    write_text_file(dir / "zero.json", zero.dump());
    CHECK(cli({"run", "--config", (dir / "zero.json").string(), "--out", (dir / "zero").string()}) == kExitOk);
    int snaps = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "zero" / "snapshots")) {
        snaps += e.path().extension() == ".bin";
    }
    CHECK(snaps == 1);
    const auto steps = read_csv(dir / "zero" / "steps.csv");
    CHECK(steps.columns == step_columns());
    CHECK(steps.rows.empty());
    CHECK(read_csv(dir / "zero" / "invariants.csv").rows.size() == 1);

    auto bad = minimal();
    bad["species"][0]["D"] = -1;
    write_text_file(dir / "bad.json", bad.dump());
    std::string err;
    CHECK(cli({"validate", "--config", (dir / "bad.json").string()}, nullptr, &err) == kExitValidation);
    CHECK(err.find("species[0].D") != std::string::npos);
    CHECK(cli({"run", "--config", (dir / "missing.json").string()}) == kExitIo);
    CHECK(cli({"frobnicate"}) == kExitValidation);
    CHECK(cli({}) == kExitValidation);

    auto blow = minimal();
    blow["species"][0]["initial"] = {{"type", "modes"}, {"modes", {{{"k", {0, 0}}, {"amplitude", 1.0}}, {{"k", {5, 0}}, {"amplitude", 50.0}}}}};
    blow["stepper"] = {{"dt", 1.0}, {"t_end", 200.0}, {"scheme", "IF-RK2"}};
    write_text_file(dir / "blow.json", blow.dump());
    CHECK(cli({"run", "--config", (dir / "blow.json").string(), "--out", (dir / "blow").string()}) == kExitDivergence);
    CHECK(read_text_file(dir / "blow" / "summary.json").find("diverged") != std::string::npos);

    json sweep{{"base", minimal()}, {"axes", {{{"key", "species[*].D"}, {"values", {0.5, 1.0}}}, {{"key", "n"}, {"values", {32, 64}}}}}};
    sweep["base"]["stepper"] = {{"t_end", 0.05}};
    write_text_file(dir / "sweep.json", sweep.dump());
    CHECK(cli({"sweep", "--config", (dir / "sweep.json").string(), "--out", (dir / "sw").string(), "--workers", "2"}) == kExitOk);
    int points = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "sw")) points += e.is_directory();
    CHECK(points == 4);
    auto count_lines = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        int n = 0;
        for (std::string l; std::getline(in, l);) n += !l.empty();
        return n;
    };
    CHECK(count_lines(dir / "sw" / "manifest.jsonl") == 4);
    std::string out;
    CHECK(cli({"sweep", "--config", (dir / "sweep.json").string(), "--out", (dir / "sw").string(), "--resume"}, &out) == kExitOk);
    CHECK(out.find("0 to run") != std::string::npos);
    CHECK(count_lines(dir / "sw" / "manifest.jsonl") == 4);

    CHECK(cli({"diagnose", (dir / "zero").string(), "--out", (dir / "diag").string()}) == kExitOk);
    CHECK(std::filesystem::exists(dir / "diag" / "invariants.csv"));
    CHECK(cli({"spectrum", (dir / "zero" / "snapshots" / "snap_00000000.bin").string(), "--out",
               (dir / "spec.csv").string()}) == kExitOk);
    CHECK(read_text_file(dir / "spec.csv").rfind("field,shell,k_at_max,max_amplitude,energy", 0) == 0);
}

TEST_CASE("identical configs give byte-identical series") {
    TempDir dir;
    auto doc = minimal();
    doc["species"][0]["initial"] = {{"type", "random_band"}, {"shells", {1, 4}}, {"amplitude", 0.05}, {"mean", 1.0}};
    doc["stepper"] = {{"dt", 0.01}, {"t_end", 0.2}};
    doc["diagnostics"] = {{"cadence", 2}, {"fit_band", {1, 5}}};
    doc["seed"] = 99;
    const auto cfg = config_from_json(doc);
    std::ostringstream log;
    run_experiment(cfg, dir / "a", log);
    run_experiment(cfg, dir / "b", log);
    for (const char* f : {"invariants.csv", "radius.csv", "ledger.csv", "steps.csv", "summary.json"}) {
        CAPTURE(f);
        CHECK(read_text_file(dir / "a" / f) == read_text_file(dir / "b" / f));
    }
}
