#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vlc {

/// Raised when a value violates a documented invariant or precondition.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Config ingestion failure; `path()` names the offending field (e.g. "bulb.layers[1].board_count").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace vlc
