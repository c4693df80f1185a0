#include "ionspec/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

#include "ionspec/errors.hpp"

namespace ionspec {

namespace {

std::string join_line(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
    }
    return s;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::filesystem::path& path) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        // from_chars does not accept "inf"/"nan" spellings produced by to_chars on all libraries
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
        throw IoError(path.string() + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

std::vector<std::string> invariant_columns(std::size_t species_count) {
    std::vector<std::string> c{"time"};
    for (std::size_t i = 0; i < species_count; ++i) {
        const std::string s = "_" + std::to_string(i);
        for (const char* name : {"mass", "min_c", "L2", "L4", "Linf", "H1", "Hm"}) {
            c.push_back(name + s);
        }
    }
    for (const char* name : {"omega_L2", "omega_Linf", "omega_Hm", "dissipation", "mean_u_x",
                             "mean_u_y", "force_mean_x", "force_mean_y"}) {
        c.emplace_back(name);
    }
    return c;
}

std::vector<double> invariant_row(const InvariantReport& r) {
    std::vector<double> v{r.time};
    for (std::size_t i = 0; i < r.mass_per_species.size(); ++i) {
        const auto& n = r.species_norms[i];
        v.insert(v.end(), {r.mass_per_species[i], r.min_concentration_per_species[i], n.l2, n.l4,
                           n.linf, n.h1, n.hm});
    }
    v.insert(v.end(), {r.vorticity_norms.l2, r.vorticity_norms.linf, r.vorticity_norms.hm,
                       r.dissipation, r.mean_velocity[0], r.mean_velocity[1], r.force_mean[0],
                       r.force_mean[1]});
    return v;
}

std::vector<std::string> radius_columns() {
    return {"time", "tau_est", "tau_theory", "fit_r2", "gevrey_norm"};
}

std::vector<double> radius_row(const RadiusRecord& r) {
    return {r.time, r.tau_estimated, r.tau_theory, r.fit_quality, r.gevrey_norm_at_tau};
}

std::vector<std::string> step_columns() { return {"step", "time", "dt"}; }

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvSeries::CsvSeries(std::filesystem::path path, std::vector<std::string> columns)
    : path_(std::move(path)), columns_(std::move(columns)) {
    const auto it = std::find(columns_.begin(), columns_.end(), "time");
    if (it == columns_.end()) throw SchemaError("time series needs a 'time' column");
    time_column_ = static_cast<std::size_t>(it - columns_.begin());

    const std::string header = join_line(columns_);
    std::error_code ec;
    const bool exists = std::filesystem::exists(path_, ec) && std::filesystem::file_size(path_, ec) > 0;
    if (exists) {
        std::ifstream in(path_);
        if (!in) throw IoError(path_.string() + ": cannot open");
        std::string first;
        std::getline(in, first);
        if (first != header) {
            throw SchemaError(path_.string() + ": schema mismatch, file has '" + first +
                              "' but rows are '" + header + "'");
        }
        std::string line;
        std::string last;
        while (std::getline(in, line)) {
            if (!line.empty()) {
                last = line;
                ++rows_;
            }
        }
        if (!last.empty()) {
            const auto cells = split_line(last);
            if (cells.size() != columns_.size()) {
                throw SchemaError(path_.string() + ": last row has " + std::to_string(cells.size()) +
                                  " columns");
            }
            last_time_ = parse_number(cells[time_column_], path_);
            has_last_ = true;
        }
        out_.open(path_, std::ios::app);
    } else {
        out_.open(path_, std::ios::trunc);
        if (out_) out_ << header << '\n';
    }
    if (!out_) throw IoError(path_.string() + ": cannot open for appending");
    out_.flush();
}

void CsvSeries::append(const std::vector<double>& values) {
    if (values.size() != columns_.size()) {
        throw SchemaError(path_.string() + ": row has " + std::to_string(values.size()) +
                          " values, schema has " + std::to_string(columns_.size()));
    }
    const double t = values[time_column_];
    if (has_last_ && !(t > last_time_)) {
        throw DataError(path_.string() + ": time " + format_number(t) +
                        " does not exceed previous " + format_number(last_time_));
    }
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_number(values[i]);
    }
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw IoError(path_.string() + ": write failed");
    has_last_ = true;
    last_time_ = t;
    ++rows_;
}

void timeseries_append(const InvariantReport& r, const std::filesystem::path& path) {
    CsvSeries s(path, invariant_columns(r.mass_per_species.size()));
    s.append(invariant_row(r));
}

void timeseries_append(const RadiusRecord& r, const std::filesystem::path& path) {
    CsvSeries s(path, radius_columns());
    s.append(radius_row(r));
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string() + ": cannot open");
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
    t.columns = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != t.columns.size()) throw SchemaError(path.string() + ": ragged row");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_number(c, path));
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace ionspec
