#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace lra {

/// Flat ordered key=value record of one CLI run: the command, its
/// configuration, the seed, output paths, and summary metrics. Doubles are
/// stored with 17 significant digits so a replayed run can be compared
/// bit-exactly.
class RunManifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, std::uint64_t value);

  bool contains(const std::string& key) const;
  /// Value for `key`; throws std::out_of_range if absent.
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  void write(const std::filesystem::path& path) const;
  static RunManifest read(const std::filesystem::path& path);

  static std::string format_double(double value);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace lra
