#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "stheat/config.hpp"

namespace stheat {

inline constexpr int kSchemaVersion = 1;

/// Numeric table written as CSV with a header row.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  void write_csv(std::ostream& os) const;
};

/// Outcome of one experiment. `failures` lists every asserted invariant that
/// did not hold; `passed` is true iff it is empty.
struct Report {
  std::string experiment;
  nlohmann::json results = nlohmann::json::object();
  std::vector<Table> tables;
  std::vector<std::string> failures;

  bool passed() const noexcept { return failures.empty(); }
  void check(bool ok, const std::string& what);
};

/// SHA-1 of "blob <size>\0<content>", the object id git assigns to a file.
std::string git_blob_hash(std::string_view content);

/// Full JSON document: schema_version, experiment, config echo, input_hash
/// (of the canonical INI rendering), results, passed, failures.
nlohmann::json report_document(const Report& report, const ExperimentConfig& cfg);

/// Writes <dir>/<experiment>.json and <dir>/<experiment>_<table>.csv.
/// Returns the paths written.
std::vector<std::filesystem::path> write_report(const Report& report, const ExperimentConfig& cfg,
                                                const std::filesystem::path& dir);

}  // namespace stheat
