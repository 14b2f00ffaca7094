#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mixpriv/error.hpp"
#include "mixpriv/metrics/common.hpp"

namespace mixpriv {

// Externally computed deep features, one row per image.
class FeatureSet {
 public:
  FeatureSet() = default;
  explicit FeatureSet(std::vector<std::vector<double>> vectors) {
    if (vectors.empty()) throw std::invalid_argument("FeatureSet: no vectors");
    const std::size_t dim = vectors.front().size();
    if (dim == 0) throw std::invalid_argument("FeatureSet: zero-dimensional vectors");
    rows_ = Eigen::MatrixXd(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < vectors.size(); ++r) {
      if (vectors[r].size() != dim) {
        throw DimensionMismatch(fmt::format("FeatureSet: row {} has {} values, expected {}", r, vectors[r].size(), dim));
      }
      for (std::size_t c = 0; c < dim; ++c) rows_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = vectors[r][c];
    }
  }
  explicit FeatureSet(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
    if (rows_.rows() == 0 || rows_.cols() == 0) throw std::invalid_argument("FeatureSet: empty matrix");
  }

  Eigen::Index size() const noexcept { return rows_.rows(); }
  Eigen::Index dim() const noexcept { return rows_.cols(); }
  const Eigen::MatrixXd& rows() const noexcept { return rows_; }

 private:
  Eigen::MatrixXd rows_;
};

// "dim=<d>" header, then one whitespace-separated vector per line. Blank lines
// are skipped.
inline FeatureSet read_feature_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("{}: cannot open", path.string()));
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("dim=")) {
    throw DataError(fmt::format("{}:1: expected header 'dim=<d>'", path.string()));
  }
  std::size_t dim = 0;
  try {
    dim = std::stoul(line.substr(4));
  } catch (const std::exception&) {
    throw DataError(fmt::format("{}:1: bad dimension '{}'", path.string(), line.substr(4)));
  }
  std::vector<std::vector<double>> rows;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw DataError(fmt::format("{}:{}: bad number '{}'", path.string(), lineno, tok));
      }
    }
    if (row.empty()) continue;
    if (row.size() != dim) {
      throw DataError(fmt::format("{}:{}: {} values, expected {}", path.string(), lineno, row.size(), dim));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(fmt::format("{}: no feature vectors", path.string()));
  return FeatureSet(std::move(rows));
}

inline void write_feature_set(const FeatureSet& fs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("{}: cannot write", path.string()));
  out << "dim=" << fs.dim() << '\n';
  for (Eigen::Index r = 0; r < fs.size(); ++r) {
    for (Eigen::Index c = 0; c < fs.dim(); ++c) out << (c ? " " : "") << fmt::format("{}", fs.rows()(r, c));
    out << '\n';
  }
}

namespace detail {

// Symmetric PSD square root; negative eigenvalues (rounding noise) become 0.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  Eigen::VectorXd ev = eig.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

// Sample covariance (n - 1 denominator); a single vector has zero covariance.
inline Eigen::MatrixXd covariance(const Eigen::MatrixXd& rows, const Eigen::RowVectorXd& mean) {
  if (rows.rows() < 2) return Eigen::MatrixXd::Zero(rows.cols(), rows.cols());
  const Eigen::MatrixXd centered = rows.rowwise() - mean;
  return (centered.transpose() * centered) / static_cast<double>(rows.rows() - 1);
}

}  // namespace detail

// ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2)), with
// Tr((S1 S2)^(1/2)) taken as Tr((S1^(1/2) S2 S1^(1/2))^(1/2)) so that only
// symmetric eigenproblems are solved.
inline PrivacyScore frechet_distance(const FeatureSet& f1, const FeatureSet& f2) {
  if (f1.dim() != f2.dim()) {
    throw DimensionMismatch(fmt::format("frechet_distance: dimensions {} vs {}", f1.dim(), f2.dim()));
  }
  const Eigen::RowVectorXd mu1 = f1.rows().colwise().mean();
  const Eigen::RowVectorXd mu2 = f2.rows().colwise().mean();
  const Eigen::MatrixXd s1 = detail::covariance(f1.rows(), mu1);
  const Eigen::MatrixXd s2 = detail::covariance(f2.rows(), mu2);

  const Eigen::MatrixXd r1 = detail::psd_sqrt(s1);
  Eigen::MatrixXd inner = r1 * s2 * r1;
  inner = 0.5 * (inner + inner.transpose());
  const double cross = detail::psd_sqrt(inner).trace();

  const double d = (mu1 - mu2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * cross;
  return {Metric::Fid, std::max(d, 0.0)};
}

}  // namespace mixpriv
