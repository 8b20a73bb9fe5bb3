#include "lap/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

namespace lap::cli {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string format_number(long long value) { return std::to_string(value); }

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += quote(row[i]);
  }
  out += '\n';
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out = "# schema=";
  out += kTableSchema;
  out += " table=" + table.name + " columns=" + std::to_string(table.columns.size()) + "\n";
  append_row(out, table.columns);
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::logic_error("to_csv: row width differs from the header in table " + table.name);
    append_row(out, row);
  }
  return out;
}

std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config, const CommandOutput& output,
                                                 double wall_seconds) {
  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  std::vector<fs::path> written;
  nlohmann::ordered_json tables = nlohmann::ordered_json::array();
  for (const Table& table : output.tables) {
    const fs::path path = dir / (config.command + "_" + table.name + ".csv");
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << to_csv(table);
    written.push_back(path);
    tables.push_back(path.filename().string());
  }
  nlohmann::ordered_json doc;
  doc["version"] = kVersion;
  doc["command"] = config.command;
  doc["exit_code"] = output.exit_code;
  doc["config"] = config.to_json();
  doc["summary"] = output.summary;
  doc["tables"] = tables;
  doc["timestamp"] = utc_timestamp();
  doc["wall_seconds"] = wall_seconds;
  const fs::path path = dir / (config.command + "_summary.json");
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << doc.dump(2) << "\n";
  written.push_back(path);
  return written;
}

}  // namespace lap::cli
