#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "rcm/lattice.hpp"

namespace rcm::cli {

namespace {

std::string digest_hex(const unsigned char* md, unsigned len) {
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_, data, n) != 1) throw Error("SHA-256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned len = 0;
    if (EVP_DigestFinal_ex(ctx_, md.data(), &len) != 1) throw Error("SHA-256 final failed");
    return digest_hex(md.data(), len);
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (is) {
    is.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(is.gcount()));
  }
  return h.hex();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

RunManifest::RunManifest(std::string command, nlohmann::json params, std::filesystem::path out_dir)
    : dir_(std::move(out_dir)) {
  id_ = sha256_hex(command + "\n" + params.dump()).substr(0, 16);
  doc_["id"] = id_;
  doc_["command"] = std::move(command);
  doc_["params"] = std::move(params);
  doc_["version"] = RCM_VERSION;
}

std::filesystem::path RunManifest::output(const std::string& name) {
  std::filesystem::path p = dir_ / name;
  outputs_.push_back(p);
  return p;
}

void RunManifest::begin() {
  std::filesystem::create_directories(dir_);
  doc_["started"] = utc_now();
  doc_["status"] = "running";
  write();
}

void RunManifest::finish(int exit_code, const std::string& status, nlohmann::json summary) {
  doc_["finished"] = utc_now();
  doc_["status"] = status;
  doc_["exit_code"] = exit_code;
  if (!summary.is_null()) doc_["summary"] = std::move(summary);
  nlohmann::json digests = nlohmann::json::object();
  for (const auto& p : outputs_)
    if (std::filesystem::exists(p)) digests[p.filename().string()] = sha256_file(p);
  doc_["outputs"] = digests;
  write();
}

void RunManifest::write() const {
  std::ofstream os(dir_ / "manifest.json");
  if (!os) throw Error("cannot write manifest in " + dir_.string());
  os << doc_.dump(2) << '\n';
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& manifest_id,
                     std::vector<std::string> columns)
    : os_(path), id_(manifest_id), width_(columns.size()) {
  if (!os_) throw Error("cannot write " + path.string());
  os_ << "manifest_id";
  for (const auto& c : columns) os_ << ',' << c;
  os_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::logic_error("CSV row width mismatch");
  os_ << id_;
  for (const auto& c : cells) {
    if (c.find_first_of(",\"\n") == std::string::npos) {
      os_ << ',' << c;
      continue;
    }
    os_ << ",\"";
    for (char ch : c) os_ << (ch == '"' ? "\"\"" : std::string(1, ch));
    os_ << '"';
  }
  os_ << '\n';
}

std::string fmt(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::logic_error("number formatting failed");
  return {buf.data(), end};
}

}  // namespace rcm::cli
