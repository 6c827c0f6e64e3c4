#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "srsim/params.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("srsim_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

// Generic parameter set with every rate switched on and asymmetric ensembles.
inline srsim::SystemParams busy_params() {
  srsim::SystemParams p;
  p.kappa = 1.3;
  p.delta_c = 0.4;
  for (int e = 0; e < 2; ++e) {
    p.ens[e].n_atoms = 2.0;
    p.ens[e].g = 0.7 + 0.2 * e;
    p.ens[e].gamma = 0.3 + 0.1 * e;
    p.ens[e].chi = 0.11 * (e + 1);
    p.ens[e].delta = -0.5 + e;
    p.ens[e].omega = 0.9 - 2.1 * e;
  }
  return p;
}

}  // namespace testing
