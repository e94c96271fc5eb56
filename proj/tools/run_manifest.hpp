#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace amvp::cli {

/// 64-bit FNV-1a of the bytes.
std::uint64_t fnv1a64(std::string_view bytes);
/// "fnv1a64:" followed by 16 lowercase hex digits.
std::string digest_string(std::string_view bytes);

/// Record of one CLI run, serialized next to every output.
class RunManifest {
 public:
  explicit RunManifest(std::string subcommand);

  void add_flag(const std::string& name, std::string value) { flags_.emplace_back(name, std::move(value)); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_threads(int n) { threads_ = n; }
  /// Digest of the primary output, without the manifest itself.
  void set_output(std::string_view bytes) { digest_ = digest_string(bytes); }

  nlohmann::json to_json() const;

 private:
  std::string subcommand_;
  std::vector<std::pair<std::string, std::string>> flags_;
  std::optional<std::uint64_t> seed_;
  int threads_ = 1;
  std::string digest_;
  std::chrono::steady_clock::time_point start_;
  std::string started_at_;
};

}  // namespace amvp::cli
