#include "run_manifest.hpp"

#include <cstdio>
#include <ctime>

namespace amvp::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_string(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + buf;
}

RunManifest::RunManifest(std::string subcommand)
    : subcommand_(std::move(subcommand)), start_(std::chrono::steady_clock::now()) {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  started_at_ = buf;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json flags = nlohmann::json::object();
  for (const auto& [name, value] : flags_) flags[name] = value;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return {
      {"subcommand", subcommand_},
      {"flags", flags},
      {"seed", seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr)},
      {"version", AMVP_VERSION},
      {"threads", threads_},
      {"started_at", started_at_},
      {"wall_clock_seconds", wall},
      {"output_digest", digest_},
  };
}

}  // namespace amvp::cli
