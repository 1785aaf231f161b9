#pragma once

#include <functional>
#include <iostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eppmzi {

using WarningHandler = std::function<void(std::string_view)>;

inline WarningHandler& warning_handler() {
  static WarningHandler handler = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return handler;
}

inline void warn(std::string_view msg) {
  if (auto& h = warning_handler()) h(msg);
}

// Collects warnings for the lifetime of the object, restoring the previous handler afterwards.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture() : previous_(std::exchange(warning_handler(), [this](std::string_view m) {
                             messages_.emplace_back(m);
                           })) {}
  ~ScopedWarningCapture() { warning_handler() = std::move(previous_); }
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

}  // namespace eppmzi
