#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <string>

#include <unistd.h>

#include <Eigen/Dense>

#include "launchpulse/http.hpp"
#include "launchpulse/rng.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lp_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path source_dir() { return LAUNCHPULSE_SOURCE_DIR; }

inline Eigen::MatrixXd random_matrix(launchpulse::Rng& rng, Eigen::Index n, Eigen::Index k) {
  Eigen::MatrixXd X(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) X(i, j) = rng.normal();
  return X;
}

inline Eigen::VectorXd random_vector(launchpulse::Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

/// Transport answering from a callback; counts calls.
class LambdaTransport final : public launchpulse::Transport {
 public:
  using Fn = std::function<launchpulse::HttpResponse(const launchpulse::HttpRequest&)>;
  explicit LambdaTransport(Fn fn) : fn_(std::move(fn)) {}
  launchpulse::HttpResponse send(const launchpulse::HttpRequest& r) override {
    ++calls;
    return fn_(r);
  }
  std::atomic<int> calls{0};

 private:
  Fn fn_;
};

inline launchpulse::HttpResponse response(int status, std::string body = "{}") {
  launchpulse::HttpResponse r;
  r.status = status;
  r.body = std::move(body);
  return r;
}

}  // namespace testing
