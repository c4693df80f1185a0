#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ionspec/diagnostics.hpp"
#include "ionspec/radius.hpp"

namespace ionspec {

std::vector<std::string> invariant_columns(std::size_t species_count);
std::vector<double> invariant_row(const InvariantReport& r);

std::vector<std::string> radius_columns();
std::vector<double> radius_row(const RadiusRecord& r);

std::vector<std::string> step_columns();

/// Shortest round-trip decimal form; identical input gives identical bytes.
std::string format_number(double v);

/// Append-only CSV file with a fixed header. Opening an existing file checks its header
/// (SchemaError on mismatch) and recovers the last time so monotonicity survives reopening.
class CsvSeries {
public:
    CsvSeries(std::filesystem::path path, std::vector<std::string> columns);

    /// Throws SchemaError on a wrong column count, DataError unless time strictly increases.
    void append(const std::vector<double>& values);

    const std::filesystem::path& path() const { return path_; }
    std::size_t rows() const { return rows_; }

private:
    std::filesystem::path path_;
    std::vector<std::string> columns_;
    std::size_t time_column_;
    bool has_last_ = false;
    double last_time_ = 0.0;
    std::size_t rows_ = 0;
    std::ofstream out_;
};

/// One-shot appends (reopen, check, append, close).
void timeseries_append(const InvariantReport& r, const std::filesystem::path& path);
void timeseries_append(const RadiusRecord& r, const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ionspec
