#ifndef MYOHAND_TESTS_SUPPORT_HPP
#define MYOHAND_TESTS_SUPPORT_HPP

#include <filesystem>
#include <random>
#include <string>

#include "myohand/io.hpp"

namespace testing_support {

inline std::filesystem::path data_dir() { return MYOHAND_DATA_DIR; }

inline const myohand::Project& default_project() {
  static const myohand::Project p = myohand::load_project(data_dir() / "variplus.json");
  return p;
}

inline myohand::CableDesign design_file(const std::string& name) {
  return myohand::load_cable_design(data_dir() / name, default_project());
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("myohand_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) { return myohand::read_text_file(p); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testing_support

#endif  // MYOHAND_TESTS_SUPPORT_HPP
