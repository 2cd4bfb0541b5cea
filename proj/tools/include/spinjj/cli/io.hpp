#pragma once

// Tabular output (CSV / JSONL) with a metadata header, and the reader for
// trajectory CSV files.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "spinjj/integrator.hpp"

namespace spinjj::cli {

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Ordered key=value pairs written ahead of the data.
class Metadata {
 public:
  void add(std::string key, std::string value);
  void add(std::string key, double value);
  void add_params(const SystemParams& p);
  void add_integrator(const IntegratorConfig& cfg);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::optional<std::string> find(std::string_view key) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

enum class Format { Csv, Jsonl };

std::optional<Format> parse_format(std::string_view s);
std::string_view extension(Format f);

/// Data values: 17 significant digits.
std::string format_value(double v);
/// Parameter values: shortest text that reads back to the same double.
std::string format_param(double v);

/// CSV: "# key=value" lines, a column-name line, then rows.
/// JSONL: {"header": {...}} on the first line, then one object per row.
void write_table(std::ostream& os, const Table& table, const Metadata& meta, Format format);
/// Creates parent directories. Throws IoError if the file cannot be
/// written.
void write_table_file(const std::filesystem::path& path, const Table& table, const Metadata& meta,
                      Format format);

/// t, the 12 amplitude columns, then the derived observables and ledger.
const std::vector<std::string>& trajectory_columns();
Table trajectory_table(const Trajectory& traj);

struct LoadedTrajectory {
  Trajectory traj;
  Metadata meta;
};

/// Reads a trajectory CSV written by write_table(trajectory_table(...)).
/// Parameters come from the header when present; every derived column is
/// recomputed from the amplitudes.
LoadedTrajectory read_trajectory_csv(std::istream& is);
LoadedTrajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace spinjj::cli
