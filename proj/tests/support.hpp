#pragma once

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lexivar/error.hpp"

namespace support {

/// Kind of the lexivar::Error thrown by `fn`; fails the test if none is thrown.
template <typename Fn>
lexivar::ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const lexivar::Error& e) {
    return e.kind();
  }
  FAIL("expected a lexivar::Error");
  return lexivar::ErrorKind::IoError;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lexivar_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
