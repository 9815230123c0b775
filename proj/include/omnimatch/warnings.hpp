#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace omnimatch {

// Collects non-fatal diagnostics (degenerate spectra, zeroed diagonals, ...).
// Library functions take an optional WarningLog*; with none supplied the
// message goes to stderr so it is never silently dropped.
class WarningLog {
 public:
  void warn(std::string message) { messages_.push_back(std::move(message)); }
  const std::vector<std::string>& messages() const { return messages_; }
  bool empty() const { return messages_.empty(); }
  void clear() { messages_.clear(); }

 private:
  std::vector<std::string> messages_;
};

inline void warn_to(WarningLog* log, std::string message) {
  if (log) {
    log->warn(std::move(message));
  } else {
    std::fprintf(stderr, "warning: %s\n", message.c_str());
  }
}

}  // namespace omnimatch
