#pragma once

#include <mutex>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

namespace launchpulse {

/// Accumulates stage warnings; each is also logged as it arrives.
class Warnings {
 public:
  Warnings() = default;
  Warnings(const Warnings& other) : items_(other.items()) {}
  Warnings& operator=(const Warnings& other) {
    if (this != &other) {
      auto copy = other.items();
      std::lock_guard lock(mu_);
      items_ = std::move(copy);
    }
    return *this;
  }

  void add(std::string message) {
    spdlog::warn("{}", message);
    std::lock_guard lock(mu_);
    items_.push_back(std::move(message));
  }

  void append(const Warnings& other) {
    auto theirs = other.items();
    std::lock_guard lock(mu_);
    items_.insert(items_.end(), theirs.begin(), theirs.end());
  }

  std::vector<std::string> items() const {
    std::lock_guard lock(mu_);
    return items_;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }

  bool empty() const { return size() == 0; }

 private:
  mutable std::mutex mu_;
  std::vector<std::string> items_;
};

}  // namespace launchpulse
