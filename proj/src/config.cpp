#include "ionspec/config.hpp"

#include <cmath>
#include <set>

#include "ionspec/errors.hpp"

namespace ionspec {

using nlohmann::json;

namespace {

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

std::string indexed(const std::string& parent, std::size_t i) {
    return parent + "[" + std::to_string(i) + "]";
}

/// Walks one JSON object, recording the keys it consumed so leftovers can be rejected.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ValidationError(path_, "expected an object");
    }

    const std::string& path() const { return path_; }
    std::string at(const std::string& key) const { return join(path_, key); }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& get(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) throw ValidationError(at(key), "missing required key");
        return *it;
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    double number(const std::string& key) { return as_number(get(key), at(key)); }
    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        return v ? as_number(*v, at(key)) : fallback;
    }

    long long integer(const std::string& key) { return as_integer(get(key), at(key)); }
    long long integer(const std::string& key, long long fallback) {
        const json* v = find(key);
        return v ? as_integer(*v, at(key)) : fallback;
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ValidationError(at(key), "expected true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key) { return as_string(get(key), at(key)); }
    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        return v ? as_string(*v, at(key)) : fallback;
    }

    void finish() const {
        for (const auto& [k, v] : obj_.items()) {
            if (!seen_.count(k)) throw ValidationError(at(k), "unknown key");
        }
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw ValidationError(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ValidationError(path, "must be finite");
        return x;
    }

    static long long as_integer(const json& v, const std::string& path) {
        if (!v.is_number_integer()) throw ValidationError(path, "expected an integer");
        return v.get<long long>();
    }

    static std::string as_string(const json& v, const std::string& path) {
        if (!v.is_string()) throw ValidationError(path, "expected a string");
        return v.get<std::string>();
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

const json& array_at(ObjectReader& r, const std::string& key) {
    const json& v = r.get(key);
    if (!v.is_array()) throw ValidationError(r.at(key), "expected an array");
    return v;
}

void require(bool ok, const std::string& path, const std::string& msg) {
    if (!ok) throw ValidationError(path, msg);
}

std::string_view law_name(AmplitudeLaw law) {
    switch (law) {
        case AmplitudeLaw::exponential: return "exponential";
        case AmplitudeLaw::power: return "power";
        case AmplitudeLaw::gaussian: return "gaussian";
    }
    return "exponential";
}

std::string_view kind_name(FieldSpec::Kind k) {
    switch (k) {
        case FieldSpec::Kind::constant: return "constant";
        case FieldSpec::Kind::modes: return "modes";
        case FieldSpec::Kind::random_band: return "random_band";
        case FieldSpec::Kind::file: return "file";
    }
    return "constant";
}

FieldSpec parse_field(const json& doc, const std::string& path, int n) {
    ObjectReader r(doc, path);
    FieldSpec f;
    const std::string type = r.string("type");
    const int cutoff = (n - 1) / 3;
    if (type == "constant") {
        f.kind = FieldSpec::Kind::constant;
        f.value = r.number("value");
    } else if (type == "modes") {
        f.kind = FieldSpec::Kind::modes;
        const json& list = array_at(r, "modes");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string mp = indexed(r.at("modes"), i);
            ObjectReader m(list[i], mp);
            const json& k = m.get("k");
            require(k.is_array() && k.size() == 2 && k[0].is_number_integer() &&
                        k[1].is_number_integer(),
                    m.at("k"), "expected a pair of integers");
            ModeSpec spec;
            spec.k1 = k[0].get<int>();
            spec.k2 = k[1].get<int>();
            require(3 * std::abs(spec.k1) < n && 3 * std::abs(spec.k2) < n, m.at("k"),
                    "wavenumber outside the dealiased band |k_i| <= " + std::to_string(cutoff));
            spec.amplitude = m.number("amplitude");
            spec.phase = m.number("phase", 0.0);
            m.finish();
            f.modes.push_back(spec);
        }
    } else if (type == "random_band") {
        f.kind = FieldSpec::Kind::random_band;
        const json& shells = r.get("shells");
        require(shells.is_array() && shells.size() == 2 && shells[0].is_number_integer() &&
                    shells[1].is_number_integer(),
                r.at("shells"), "expected [k_min, k_max]");
        f.shell_min = shells[0].get<int>();
        f.shell_max = shells[1].get<int>();
        require(f.shell_min >= 1 && f.shell_max >= f.shell_min, r.at("shells"),
                "need 1 <= k_min <= k_max");
        require(f.shell_max <= cutoff, r.at("shells"),
                "k_max exceeds the dealiasing cutoff " + std::to_string(cutoff));
        f.amplitude = r.number("amplitude", 0.1);
        require(f.amplitude >= 0.0, r.at("amplitude"), "must be nonnegative");
        const std::string law = r.string("law", "exponential");
        if (law == "exponential") {
            f.law = AmplitudeLaw::exponential;
        } else if (law == "power") {
            f.law = AmplitudeLaw::power;
        } else if (law == "gaussian") {
            f.law = AmplitudeLaw::gaussian;
        } else {
            throw ValidationError(r.at("law"), "expected exponential, power or gaussian");
        }
        f.rate = r.number("rate", 1.0);
        require(f.rate >= 0.0, r.at("rate"), "must be nonnegative");
        f.mean = r.number("mean", 0.0);
    } else if (type == "file") {
        f.kind = FieldSpec::Kind::file;
        f.path = r.string("path");
        f.field = r.string("field");
    } else {
        throw ValidationError(r.at("type"), "expected constant, modes, random_band or file");
    }
    r.finish();
    return f;
}

json field_to_json(const FieldSpec& f) {
    json j;
    j["type"] = kind_name(f.kind);
    switch (f.kind) {
        case FieldSpec::Kind::constant:
            j["value"] = f.value;
            break;
        case FieldSpec::Kind::modes: {
            json list = json::array();
            for (const auto& m : f.modes) {
                list.push_back({{"k", {m.k1, m.k2}}, {"amplitude", m.amplitude}, {"phase", m.phase}});
            }
            j["modes"] = list;
            break;
        }
        case FieldSpec::Kind::random_band:
            j["shells"] = {f.shell_min, f.shell_max};
            j["amplitude"] = f.amplitude;
            j["law"] = law_name(f.law);
            j["rate"] = f.rate;
            j["mean"] = f.mean;
            break;
        case FieldSpec::Kind::file:
            j["path"] = f.path;
            j["field"] = f.field;
            break;
    }
    return j;
}

StepperConfig parse_stepper(const json& doc, const std::string& path) {
    ObjectReader r(doc, path);
    StepperConfig s;
    const std::string scheme = r.string("scheme", "IF-RK4");
    try {
        s.scheme = parse_scheme(scheme);
    } catch (const ConfigError&) {
        throw ValidationError(r.at("scheme"), "expected IF-RK2 or IF-RK4");
    }
    s.dt = r.number("dt", s.dt);
    require(s.dt > 0.0, r.at("dt"), "must be positive");
    s.adaptive = r.boolean("adaptive", s.adaptive);
    s.cfl = r.number("cfl", s.cfl);
    require(s.cfl > 0.0 && s.cfl <= 1.0, r.at("cfl"), "must lie in (0, 1]");
    s.t_end = r.number("t_end", s.t_end);
    require(s.t_end >= 0.0, r.at("t_end"), "must be nonnegative");
    s.positivity_clip = r.boolean("positivity_clip", s.positivity_clip);
    s.positivity_tol = r.number("positivity_tol", s.positivity_tol);
    require(s.positivity_tol >= 0.0, r.at("positivity_tol"), "must be nonnegative");
    r.finish();
    return s;
}

DiagnosticsConfig parse_diagnostics(const json& doc, const std::string& path, int n) {
    ObjectReader r(doc, path);
    DiagnosticsConfig d;
    d.cadence = static_cast<int>(r.integer("cadence", d.cadence));
    require(d.cadence >= 1, r.at("cadence"), "must be at least 1");
    d.snapshot_cadence = static_cast<int>(r.integer("snapshot_cadence", d.snapshot_cadence));
    require(d.snapshot_cadence >= 0, r.at("snapshot_cadence"), "must be nonnegative");
    d.hm_order = r.number("hm_order", d.hm_order);
    require(d.hm_order >= 0.0, r.at("hm_order"), "must be nonnegative");
    const int cutoff = (n - 1) / 3;
    if (const json* band = r.find("fit_band")) {
        require(band->is_array() && band->size() == 2 && (*band)[0].is_number_integer() &&
                    (*band)[1].is_number_integer(),
                r.at("fit_band"), "expected [k_min, k_max]");
        d.fit_k_min = (*band)[0].get<int>();
        d.fit_k_max = (*band)[1].get<int>();
    } else {
        d.fit_k_max = cutoff;
    }
    require(d.fit_k_min >= 1 && d.fit_k_max > d.fit_k_min && d.fit_k_max <= cutoff,
            r.at("fit_band"),
            "need 1 <= k_min < k_max <= " + std::to_string(cutoff));
    d.noise_floor = r.number("noise_floor", d.noise_floor);
    require(d.noise_floor >= 0.0, r.at("noise_floor"), "must be nonnegative");
    d.ledger_m = r.number("ledger_m", d.ledger_m);
    require(d.ledger_m >= 1.0, r.at("ledger_m"), "must be at least 1");
    if (r.has("gevrey_probes")) {
        const json& list = array_at(r, "gevrey_probes");
        for (std::size_t i = 0; i < list.size(); ++i) {
            ObjectReader p(list[i], indexed(r.at("gevrey_probes"), i));
            GevreyProbe g;
            g.tau = p.number("tau");
            require(g.tau >= 0.0, p.at("tau"), "must be nonnegative");
            g.m = p.number("m");
            require(g.m >= 1.0, p.at("m"), "must be at least 1");
            p.finish();
            d.probes.push_back(g);
        }
    }
    r.finish();
    return d;
}

}  // namespace

RunConfig config_from_json(const json& doc) {
    ObjectReader r(doc, "");
    RunConfig cfg;

    const std::string model = r.string("model");
    if (model == "NPE") {
        cfg.model = Model::NPE;
    } else if (model == "NPD") {
        cfg.model = Model::NPD;
    } else {
        throw ValidationError("model", "expected NPE or NPD");
    }

    const long long n = r.integer("n");
    require(n % 2 == 0, "n", "n must be even");
    require(n >= 8, "n", "n must be at least 8");
    require(n <= 4096, "n", "n must be at most 4096");
    cfg.n = static_cast<int>(n);

    const json& species = array_at(r, "species");
    require(!species.empty(), "species", "at least one species is required");
    for (std::size_t i = 0; i < species.size(); ++i) {
        ObjectReader s(species[i], indexed("species", i));
        SpeciesConfig sc;
        sc.z = s.number("z");
        sc.D = s.number("D");
        require(sc.D > 0.0, s.at("D"), "diffusivity must be positive");
        sc.initial = parse_field(s.get("initial"), s.at("initial"), cfg.n);
        s.finish();
        cfg.species.push_back(std::move(sc));
    }

    if (const json* v = r.find("vorticity")) {
        require(cfg.model == Model::NPE, "vorticity", "only allowed for model NPE");
        cfg.vorticity = parse_field(*v, "vorticity", cfg.n);
    } else if (cfg.model == Model::NPE) {
        cfg.vorticity = FieldSpec{};
    }

    if (const json* s = r.find("stepper")) cfg.stepper = parse_stepper(*s, "stepper");
    if (const json* d = r.find("diagnostics")) {
        cfg.diagnostics = parse_diagnostics(*d, "diagnostics", cfg.n);
    } else {
        cfg.diagnostics = parse_diagnostics(json::object(), "diagnostics", cfg.n);
    }

    cfg.output = r.string("output", cfg.output);
    require(!cfg.output.empty(), "output", "must not be empty");
    if (const json* seed = r.find("seed")) {
        require(seed->is_number_unsigned() || (seed->is_number_integer() && seed->get<long long>() >= 0),
                "seed", "expected a nonnegative integer");
        cfg.seed = seed->get<std::uint64_t>();
    }
    cfg.C_user = r.number("C_user", cfg.C_user);
    require(cfg.C_user > 0.0, "C_user", "must be positive");

    if (const json* t = r.find("tau0")) {
        require(cfg.model == Model::NPE, "tau0", "only allowed for model NPE");
        cfg.tau0 = ObjectReader::as_number(*t, "tau0");
        require(cfg.tau0 > 0.0, "tau0", "must be positive");
    }
    if (const json* t = r.find("T0")) {
        require(cfg.model == Model::NPD, "T0", "only allowed for model NPD");
        if (!(t->is_string() && t->get<std::string>() == "auto")) {
            const double v = ObjectReader::as_number(*t, "T0");
            require(v > 0.0, "T0", "must be positive or \"auto\"");
            cfg.T0 = v;
        }
    }
    r.finish();
    return cfg;
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("", std::string("malformed document: ") + e.what());
    }
    return config_from_json(doc);
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["model"] = model_name(cfg.model);
    j["n"] = cfg.n;
    json species = json::array();
    for (const auto& s : cfg.species) {
        species.push_back({{"z", s.z}, {"D", s.D}, {"initial", field_to_json(s.initial)}});
    }
    j["species"] = species;
    if (cfg.model == Model::NPE) {
        j["vorticity"] = field_to_json(cfg.vorticity.value_or(FieldSpec{}));
        j["tau0"] = cfg.tau0;
    } else {
        j["T0"] = cfg.T0 ? json(*cfg.T0) : json("auto");
    }
    const auto& st = cfg.stepper;
    j["stepper"] = {{"scheme", scheme_name(st.scheme)}, {"dt", st.dt},
                    {"adaptive", st.adaptive}, {"cfl", st.cfl},
                    {"t_end", st.t_end}, {"positivity_clip", st.positivity_clip},
                    {"positivity_tol", st.positivity_tol}};
    const auto& d = cfg.diagnostics;
    json probes = json::array();
    for (const auto& p : d.probes) probes.push_back({{"tau", p.tau}, {"m", p.m}});
    j["diagnostics"] = {{"cadence", d.cadence},
                        {"snapshot_cadence", d.snapshot_cadence},
                        {"hm_order", d.hm_order},
                        {"fit_band", {d.fit_k_min, d.fit_k_max}},
                        {"noise_floor", d.noise_floor},
                        {"ledger_m", d.ledger_m},
                        {"gevrey_probes", probes}};
    j["output"] = cfg.output;
    j["seed"] = cfg.seed;
    j["C_user"] = cfg.C_user;
    return j;
}

std::string resolved_config_text(const RunConfig& cfg) {
    return config_to_json(cfg).dump(2) + "\n";
}

void set_json_path(json& doc, std::string_view key, const json& value) {
    const std::string k(key);
    if (k.empty()) throw ValidationError("", "empty sweep key");
    // first segment: name, optionally followed by [i] or [*]
    const auto dot = k.find('.');
    std::string head = k.substr(0, dot);
    const std::string rest = dot == std::string::npos ? "" : k.substr(dot + 1);

    std::string index;
    if (const auto br = head.find('['); br != std::string::npos) {
        if (head.back() != ']') throw ValidationError(k, "malformed index");
        index = head.substr(br + 1, head.size() - br - 2);
        head = head.substr(0, br);
    }
    if (!doc.is_object()) throw ValidationError(k, "path does not lead through an object");

    auto assign = [&](json& slot) {
        if (rest.empty()) {
            slot = value;
        } else {
            if (slot.is_null()) slot = json::object();
            set_json_path(slot, rest, value);
        }
    };

    if (index.empty()) {
        assign(doc[head]);
        return;
    }
    auto it = doc.find(head);
    if (it == doc.end() || !it->is_array()) throw ValidationError(k, "'" + head + "' is not an array");
    if (index == "*") {
        for (auto& el : *it) assign(el);
        return;
    }
    std::size_t i = 0;
    try {
        i = std::stoul(index);
    } catch (const std::exception&) {
        throw ValidationError(k, "malformed index");
    }
    if (i >= it->size()) throw ValidationError(k, "index out of range");
    assign((*it)[i]);
}

SweepConfig parse_sweep(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("", std::string("malformed document: ") + e.what());
    }
    ObjectReader r(doc, "");
    SweepConfig sw;
    sw.base = r.get("base");
    require(sw.base.is_object(), "base", "expected an object");
    const json& axes = array_at(r, "axes");
    require(!axes.empty(), "axes", "at least one axis is required");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        ObjectReader a(axes[i], indexed("axes", i));
        SweepAxis axis;
        axis.key = a.string("key");
        const json& values = array_at(a, "values");
        require(!values.empty(), a.at("values"), "at least one value is required");
        axis.values.assign(values.begin(), values.end());
        a.finish();
        sw.axes.push_back(std::move(axis));
    }
    r.finish();
    return sw;
}

std::vector<SweepPoint> expand_sweep(const SweepConfig& sweep) {
    std::size_t total = 1;
    for (const auto& a : sweep.axes) total *= a.values.size();
    std::vector<SweepPoint> points;
    points.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        json doc = sweep.base;
        json params = json::object();
        std::size_t rem = idx;
        std::vector<std::size_t> pick(sweep.axes.size());
        for (std::size_t a = sweep.axes.size(); a-- > 0;) {
            pick[a] = rem % sweep.axes[a].values.size();
            rem /= sweep.axes[a].values.size();
        }
        for (std::size_t a = 0; a < sweep.axes.size(); ++a) {
            const auto& v = sweep.axes[a].values[pick[a]];
            set_json_path(doc, sweep.axes[a].key, v);
            params[sweep.axes[a].key] = v;
        }
        SweepPoint p;
        p.index = idx;
        p.params = params;
        try {
            p.config = config_from_json(doc);
        } catch (const ValidationError& e) {
            throw ValidationError(e.key_path(), "sweep point " + std::to_string(idx) + ": " + e.what());
        }
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace ionspec
