#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mixpriv/detail/csv.hpp"
#include "mixpriv/error.hpp"
#include "mixpriv/metrics/common.hpp"

namespace mixpriv {

// One evaluator outcome for one obfuscated sample under one metric.
struct RecognitionRecord {
  std::string sample_id;
  Metric metric = Metric::Dssim;
  double score = 0.0;
  bool recognized = false;  // evaluator named a correct source label

  friend bool operator==(const RecognitionRecord&, const RecognitionRecord&) = default;
};

// Multi-label survey answers: recognised iff any ticked label is one of the
// sample's source classes. "I cannot tell" overrides everything.
inline bool collapse_answers(std::span<const int> ticked, std::span<const int> source_classes, bool cannot_tell) {
  if (cannot_tell) return false;
  for (int t : ticked) {
    if (std::find(source_classes.begin(), source_classes.end(), t) != source_classes.end()) return true;
  }
  return false;
}

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

// Points ordered by strictly decreasing threshold, starting at the +inf
// sentinel (0,0) and ending at the lowest score (1,1).
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
  std::size_t positives = 0;  // unrecognised records
  std::size_t negatives = 0;  // recognised records
};

struct Thresholds {
  RocPoint acc;     // max TPR - FPR
  RocPoint cutoff;  // closest to (0, 1)
  double t_acc() const noexcept { return acc.threshold; }
  double t_cutoff() const noexcept { return cutoff.threshold; }
};

inline std::vector<RecognitionRecord> filter_metric(std::span<const RecognitionRecord> records, Metric metric) {
  std::vector<RecognitionRecord> out;
  for (const auto& r : records) {
    if (r.metric == metric) out.push_back(r);
  }
  return out;
}

// A sample is predicted private when score >= t. Positives are the records
// the evaluator could not recognise.
inline RocCurve build_roc(std::span<const RecognitionRecord> records) {
  RocCurve roc;
  for (const auto& r : records) {
    if (!std::isfinite(r.score)) throw DataError(fmt::format("build_roc: non-finite score for '{}'", r.sample_id));
    if (r.metric != records.front().metric) throw DataError("build_roc: records mix several metrics");
    (r.recognized ? roc.negatives : roc.positives)++;
  }
  if (roc.positives == 0 || roc.negatives == 0) {
    throw DataError("build_roc: need both recognised and unrecognised records");
  }

  std::vector<RecognitionRecord> sorted(records.begin(), records.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.score > b.score; });

  const double p = static_cast<double>(roc.positives), n = static_cast<double>(roc.negatives);
  roc.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double t = sorted[i].score;
    for (; i < sorted.size() && sorted[i].score == t; ++i) (sorted[i].recognized ? fp : tp)++;
    roc.points.push_back({t, static_cast<double>(fp) / n, static_cast<double>(tp) / p});
  }
  for (std::size_t k = 1; k < roc.points.size(); ++k) {
    const auto& a = roc.points[k - 1];
    const auto& b = roc.points[k];
    roc.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return roc;
}

// Youden (t_acc) and closest-to-corner (t_cutoff) selections. Points are
// visited from the largest threshold down and only strict improvements are
// taken, so ties resolve to the larger, more private threshold.
inline Thresholds select_thresholds(const RocCurve& roc) {
  if (roc.points.empty()) throw std::invalid_argument("select_thresholds: empty curve");
  if (roc.positives == 0 || roc.negatives == 0) throw std::invalid_argument("select_thresholds: curve without counts");
  // Compare in integer counts so that mathematically equal points tie exactly:
  //   J * P * N = tp * N - fp * P,   d^2 * P^2 * N^2 = fp^2 P^2 + (P - tp)^2 N^2.
  using wide = __int128;
  const wide p = static_cast<wide>(roc.positives), n = static_cast<wide>(roc.negatives);
  Thresholds out{roc.points.front(), roc.points.front()};
  bool first = true;
  wide best_j = 0, best_d = 0;
  for (const RocPoint& pt : roc.points) {
    const wide tp = static_cast<wide>(std::llround(pt.tpr * static_cast<double>(roc.positives)));
    const wide fp = static_cast<wide>(std::llround(pt.fpr * static_cast<double>(roc.negatives)));
    const wide j = tp * n - fp * p;
    const wide d = fp * fp * p * p + (p - tp) * (p - tp) * n * n;
    if (first || j > best_j) {
      best_j = j;
      out.acc = pt;
    }
    if (first || d < best_d) {
      best_d = d;
      out.cutoff = pt;
    }
    first = false;
  }
  return out;
}

// Fraction of recognised records of `metric` scoring >= t.
inline double fpr_at(std::span<const RecognitionRecord> records, Metric metric, double t) {
  std::size_t total = 0, above = 0;
  for (const auto& r : records) {
    if (r.metric != metric || !r.recognized) continue;
    ++total;
    if (r.score >= t) ++above;
  }
  if (total == 0) throw DataError(fmt::format("fpr_at: no recognised records for metric {}", metric_name(metric)));
  return static_cast<double>(above) / static_cast<double>(total);
}

inline constexpr std::string_view kRecordsHeader = "sample_id,metric,score,recognized";

inline std::vector<RecognitionRecord> ingest_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("{}: cannot open", path.string()));
  const std::string name = path.string();
  std::string line;
  if (!std::getline(in, line) || detail::join(detail::split_fields(line), ',') != kRecordsHeader) {
    throw DataError(fmt::format("{}:1: expected header '{}'", name, kRecordsHeader));
  }
  std::vector<RecognitionRecord> out;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 4) throw DataError(fmt::format("{}:{}: expected 4 fields, got {}", name, lineno, f.size()));
    RecognitionRecord r;
    r.sample_id = f[0];
    if (r.sample_id.empty()) throw DataError(fmt::format("{}:{}: empty sample_id", name, lineno));
    try {
      r.metric = parse_metric(f[1]);
    } catch (const std::invalid_argument&) {
      throw DataError(fmt::format("{}:{}: unknown metric '{}'", name, lineno, f[1]));
    }
    if (!detail::parse_double(f[2], r.score) || !std::isfinite(r.score)) {
      throw DataError(fmt::format("{}:{}: bad score '{}'", name, lineno, f[2]));
    }
    if (f[3] == "1" || f[3] == "true") {
      r.recognized = true;
    } else if (f[3] == "0" || f[3] == "false") {
      r.recognized = false;
    } else {
      throw DataError(fmt::format("{}:{}: recognized must be 0, 1, true or false, got '{}'", name, lineno, f[3]));
    }
    out.push_back(std::move(r));
  }
  if (out.empty()) throw DataError(fmt::format("{}: no records", name));
  return out;
}

inline void write_records(std::span<const RecognitionRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("{}: cannot write", path.string()));
  out << kRecordsHeader << '\n';
  for (const auto& r : records) {
    out << r.sample_id << ',' << metric_name(r.metric) << ',' << detail::exact(r.score) << ','
        << (r.recognized ? 1 : 0) << '\n';
  }
}

inline void write_roc_csv(const RocCurve& roc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("{}: cannot write", path.string()));
  out << "threshold,fpr,tpr\n";
  for (const auto& p : roc.points) {
    out << detail::sig9(p.threshold) << ',' << detail::sig9(p.fpr) << ',' << detail::sig9(p.tpr) << '\n';
  }
  out << "auc," << detail::sig9(roc.auc) << '\n';
}

// Published operating points for the Stanford Dogs and STL-10 surveys. The
// underlying recognition records are not public, so these are reference values
// to compare against, not something this library can recompute.
struct ReferenceThreshold {
  std::string_view corpus;
  std::string_view evaluator;
  Metric metric;
  double auc;
  RocPoint acc;
  RocPoint cutoff;
};

inline constexpr ReferenceThreshold kReferenceThresholds[] = {
    {"dogs", "human", Metric::Mse, 0.77, {2178, 0.36, 0.79}, {2589, 0.31, 0.69}},
    {"dogs", "human", Metric::Fid, 0.59, {63160, 0.53, 0.69}, {93674, 0.43, 0.56}},
    {"dogs", "human", Metric::Dssim, 0.8, {0.63, 0.27, 0.77}, {0.65, 0.25, 0.74}},
    {"dogs", "human", Metric::Phash, 0.78, {0.28, 0.25, 0.69}, {0.28, 0.25, 0.69}},
    {"dogs", "human", Metric::Dhaar, 0.86, {0.61, 0.23, 0.8}, {0.62, 0.21, 0.78}},
    {"stl10", "human", Metric::Mse, 0.7, {2228, 0.45, 0.8}, {2965, 0.34, 0.65}},
    {"stl10", "human", Metric::Fid, 0.65, {415, 0.54, 0.75}, {34971, 0.4, 0.59}},
    {"stl10", "human", Metric::Dssim, 0.86, {0.66, 0.14, 0.72}, {0.61, 0.22, 0.77}},
    {"stl10", "human", Metric::Phash, 0.75, {0.28, 0.27, 0.65}, {0.28, 0.27, 0.65}},
    {"stl10", "human", Metric::Dhaar, 0.84, {0.6, 0.23, 0.78}, {0.6, 0.22, 0.77}},
    {"dogs", "vision-api", Metric::Mse, 0.81, {1715, 0.28, 0.82}, {2118, 0.26, 0.72}},
    {"dogs", "vision-api", Metric::Fid, 0.62, {100518, 0.26, 0.47}, {80275, 0.46, 0.53}},
    {"dogs", "vision-api", Metric::Dssim, 0.83, {0.47, 0.34, 0.87}, {0.56, 0.25, 0.74}},
    {"dogs", "vision-api", Metric::Phash, 0.81, {0.21, 0.25, 0.74}, {0.21, 0.25, 0.74}},
    {"dogs", "vision-api", Metric::Dhaar, 0.88, {0.56, 0.11, 0.8}, {0.55, 0.19, 0.81}},
    {"stl10", "vision-api", Metric::Mse, 0.8, {1328, 0.39, 0.86}, {1850, 0.29, 0.73}},
    {"stl10", "vision-api", Metric::Fid, 0.6, {181679, 0.23, 0.44}, {146856, 0.47, 0.52}},
    {"stl10", "vision-api", Metric::Dssim, 0.89, {0.48, 0.21, 0.79}, {0.54, 0.19, 0.79}},
    {"stl10", "vision-api", Metric::Phash, 0.79, {0.25, 0.21, 0.66}, {0.25, 0.21, 0.66}},
    {"stl10", "vision-api", Metric::Dhaar, 0.87, {0.54, 0.19, 0.79}, {0.54, 0.19, 0.79}},
};

}  // namespace mixpriv
