#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace cli {

namespace fs = std::filesystem;

//! Runs the zblab binary with the given arguments; stdout and stderr go to
//! files in `dir`. Returns the exit status.
inline int run(const std::string &args, const fs::path &dir) {
  fs::create_directories(dir);
  const std::string cmd = std::string("\"") + ZBLAB_BINARY + "\" " + args + " > \"" +
                          (dir / "stdout.txt").string() + "\" 2> \"" +
                          (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline fs::path scratch(const std::string &name) {
  const auto dir = fs::temp_directory_path() / ("zblab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline std::string samples(const std::string &file) {
  return (fs::path(ZBLAB_SAMPLES) / file).string();
}

} // namespace cli
