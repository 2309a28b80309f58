#ifndef VTT_TESTS_TEST_UTIL_HPP
#define VTT_TESTS_TEST_UTIL_HPP

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

namespace vtt_test {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Fresh scratch directory per call; removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    dir_ = std::filesystem::temp_directory_path() /
           ("vtt_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path file(const std::string& name) const { return dir_ / name; }

 private:
  std::filesystem::path dir_;
};

inline std::filesystem::path write_file(const TempDir& dir, const std::string& name,
                                        const std::string& content) {
  const auto path = dir.file(name);
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace vtt_test

#endif  // VTT_TESTS_TEST_UTIL_HPP
