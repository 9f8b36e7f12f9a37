#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace rcm::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);
std::string utc_now();

/// Record of one invocation. Written when the run starts and rewritten with
/// end time, status and output digests when it finishes.
class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json params, std::filesystem::path out_dir);

  /// Stable id derived from the command and its parameters.
  const std::string& id() const { return id_; }
  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path output(const std::string& name);

  void begin();
  void finish(int exit_code, const std::string& status, nlohmann::json summary = nullptr);

 private:
  void write() const;

  std::string id_;
  std::filesystem::path dir_;
  nlohmann::json doc_;
  std::vector<std::filesystem::path> outputs_;
};

/// CSV file whose first column is the manifest id.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& manifest_id, std::vector<std::string> columns);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream os_;
  std::string id_;
  std::size_t width_;
};

std::string fmt(double v);

}  // namespace rcm::cli
