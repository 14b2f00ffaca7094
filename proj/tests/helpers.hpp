#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mixpriv/mixpriv.hpp"

namespace testing_support {

namespace fs = std::filesystem;

// Uniform noise over [0,255]; `smooth` > 0 blurs it into something image-like.
inline mixpriv::Image random_image(std::mt19937_64& gen, int w, int h, int c = 3, double smooth = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 255.0);
  mixpriv::Image img(w, h, c);
  for (double& v : img.data()) v = u(gen);
  if (smooth > 0.0) img = mixpriv::gaussian_blur(img, mixpriv::BlurSpec::from_sigma(smooth));
  return img;
}

inline mixpriv::Image random_u8_image(std::mt19937_64& gen, int w, int h, int c = 3) {
  std::uniform_int_distribution<int> u(0, 255);
  mixpriv::Image img(w, h, c);
  for (double& v : img.data()) v = u(gen);
  return img;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / fmt::format("mixpriv_{}_{:x}", tag, (std::uint64_t{rd()} << 32) | rd());
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

inline fs::path natural_dir() { return fs::path(MIXPRIV_TEST_DATA) / "natural"; }

inline std::vector<fs::path> natural_files() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(natural_dir())) {
    if (e.path().extension() == ".png") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Dataset listing over the first `n` natural images, labels cycling mod `classes`.
inline fs::path write_listing(const fs::path& dir, std::size_t n, int classes) {
  const auto files = natural_files();
  const fs::path listing = dir / "dataset.csv";
  std::ofstream out(listing);
  out << "path,label\n";
  for (std::size_t i = 0; i < n && i < files.size(); ++i) out << files[i].string() << ',' << i % classes << '\n';
  return listing;
}

// Files of a tree (relative path -> bytes).
inline std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), root).string()] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return out;
}

}  // namespace testing_support
