#include "stheat/report.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <openssl/evp.h>

namespace stheat {

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("Table " + name + ": row has " + std::to_string(row.size()) +
                           " entries for " + std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

void Table::write_csv(std::ostream& os) const {
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << '\n';
  const auto old = os.precision(17);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << '\n';
  }
  os.precision(old);
}

void Report::check(bool ok, const std::string& what) {
  if (!ok) failures.push_back(what);
}

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("git_blob_hash: EVP context allocation failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("git_blob_hash: SHA-1 failed");
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

nlohmann::json report_document(const Report& report, const ExperimentConfig& cfg) {
  return {{"schema_version", kSchemaVersion},
          {"experiment", report.experiment},
          {"config", to_json(cfg)},
          {"input_hash", git_blob_hash(to_ini(cfg))},
          {"results", report.results},
          {"passed", report.passed()},
          {"failures", report.failures}};
}

std::vector<std::filesystem::path> write_report(const Report& report, const ExperimentConfig& cfg,
                                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto json_path = dir / (report.experiment + ".json");
  {
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("cannot write " + json_path.string());
    out << report_document(report, cfg).dump(2) << '\n';
  }
  written.push_back(json_path);
  for (const auto& table : report.tables) {
    const auto csv_path = dir / (report.experiment + "_" + table.name + ".csv");
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path.string());
    table.write_csv(out);
    written.push_back(csv_path);
  }
  return written;
}

}  // namespace stheat
