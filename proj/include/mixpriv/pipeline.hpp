#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixpriv/detail/csv.hpp"
#include "mixpriv/detail/parallel.hpp"
#include "mixpriv/error.hpp"
#include "mixpriv/image.hpp"
#include "mixpriv/metrics.hpp"
#include "mixpriv/obfuscate.hpp"
#include "mixpriv/png_io.hpp"
#include "mixpriv/raster.hpp"
#include "mixpriv/rng.hpp"

namespace mixpriv {

namespace fs = std::filesystem;

struct DatasetEntry {
  fs::path path;
  int class_id = 0;
};

struct Dataset {
  std::vector<DatasetEntry> entries;
  int num_classes = 2;
  int width = 256;  // canonical size every image is resized to
  int height = 256;

  std::size_t size() const noexcept { return entries.size(); }
  Label label(std::size_t i) const { return Label(entries[i].class_id, num_classes); }

  // Entry indices grouped by class, in dataset order.
  std::map<int, std::vector<std::size_t>> by_class() const {
    std::map<int, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < entries.size(); ++i) out[entries[i].class_id].push_back(i);
    return out;
  }
};

// Either a CSV listing with header "path,label" (paths relative to the file)
// or a directory whose sorted subdirectories are the classes.
inline Dataset read_dataset(const fs::path& source, int width = 256, int height = 256) {
  if (width < 1 || height < 1) throw std::invalid_argument("dataset: canonical size must be >= 1x1");
  Dataset ds;
  ds.width = width;
  ds.height = height;
  int max_class = 0;
  if (fs::is_directory(source)) {
    std::vector<fs::path> classes;
    for (const auto& e : fs::directory_iterator(source)) {
      if (e.is_directory()) classes.push_back(e.path());
    }
    std::sort(classes.begin(), classes.end());
    for (std::size_t c = 0; c < classes.size(); ++c) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(classes[c])) {
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (auto& f : files) ds.entries.push_back({std::move(f), static_cast<int>(c)});
      max_class = static_cast<int>(c);
    }
  } else {
    std::ifstream in(source);
    if (!in) throw DataError(fmt::format("{}: cannot open dataset listing", source.string()));
    std::string line;
    if (!std::getline(in, line) || detail::join(detail::split_fields(line), ',') != "path,label") {
      throw DataError(fmt::format("{}:1: expected header 'path,label'", source.string()));
    }
    for (int lineno = 2; std::getline(in, line); ++lineno) {
      if (line.empty() || line == "\r") continue;
      const auto f = detail::split_fields(line);
      double label = -1;
      if (f.size() != 2 || !detail::parse_double(f[1], label) || label < 0 || label != static_cast<int>(label)) {
        throw DataError(fmt::format("{}:{}: expected '<path>,<class id>'", source.string(), lineno));
      }
      fs::path p = f[0];
      if (p.is_relative()) p = source.parent_path() / p;
      ds.entries.push_back({p, static_cast<int>(label)});
      max_class = std::max(max_class, static_cast<int>(label));
    }
  }
  if (ds.entries.size() < 2) throw DataError(fmt::format("{}: dataset needs at least two images", source.string()));
  ds.num_classes = std::max(2, max_class + 1);
  return ds;
}

// Loads and resizes every entry; grayscale files are promoted to RGB when the
// dataset mixes both kinds.
inline std::vector<Image> load_images(const Dataset& ds, unsigned threads = 0) {
  std::vector<Image> images(ds.size());
  detail::parallel_for(
      ds.size(),
      [&](std::size_t i) {
        images[i] = resize_bilinear(load_image(ds.entries[i].path, AlphaPolicy::Strip), ds.width, ds.height);
      },
      threads);
  const bool any_rgb = std::any_of(images.begin(), images.end(), [](const Image& im) { return im.channels() == 3; });
  if (any_rgb) {
    for (auto& im : images) im = to_rgb(im);
  }
  return images;
}

enum class Pairing { Disjoint, Permutation };
enum class ClassMode { Blind, Intra };

inline Pairing parse_pairing(std::string_view s) {
  if (s == "disjoint") return Pairing::Disjoint;
  if (s == "permutation") return Pairing::Permutation;
  throw std::invalid_argument(fmt::format("unknown pairing '{}'", s));
}
inline ClassMode parse_class_mode(std::string_view s) {
  if (s == "blind") return ClassMode::Blind;
  if (s == "intra") return ClassMode::Intra;
  throw std::invalid_argument(fmt::format("unknown class mode '{}'", s));
}

struct Gate {
  Metric metric = Metric::Dssim;
  double min_score = 0.0;
  int max_attempts = 5;
};

struct EpochConfig {
  ObfuscationParams params = NoiseMixParams{MixWeights::pair(0.75), 20.0};
  Pairing pairing = Pairing::Disjoint;
  ClassMode class_mode = ClassMode::Blind;
  int epoch_index = 0;
  std::uint64_t master_seed = 0;
  std::optional<Gate> gate;
  Metric score_metric = Metric::Dssim;  // recorded score when no gate is set
  double max_reject_fraction = 0.5;
  unsigned threads = 0;

  Metric recorded_metric() const { return gate ? gate->metric : score_metric; }

  void validate() const {
    if (epoch_index < 0) throw std::invalid_argument("epoch index must be >= 0");
    if (weights_of(params).size() != 2) throw std::invalid_argument("epoch pipeline mixes pairs: two weights required");
    if (score_metric == Metric::Fid) throw std::invalid_argument("fid cannot score individual images");
    if (gate) {
      if (gate->metric == Metric::Fid) throw std::invalid_argument("gate: fid cannot score individual images");
      if (gate->max_attempts < 1) throw std::invalid_argument("gate: max attempts must be >= 1");
      const bool in_range = metric_is_bounded(gate->metric) ? (gate->min_score >= 0.0 && gate->min_score <= 1.0)
                                                            : gate->min_score >= 0.0;
      if (!in_range) throw std::invalid_argument(fmt::format("gate: threshold {} outside the metric's range", gate->min_score));
    }
  }
};

struct PairIndex {
  std::size_t first = 0;   // weighted by the first mixing weight
  std::size_t second = 0;
  friend bool operator==(const PairIndex&, const PairIndex&) = default;
};

namespace detail {

// Stream keys so the plan, names and per-sample streams never collide.
inline constexpr std::uint64_t kPlanKey = 0x706c616eULL;
inline constexpr std::uint64_t kNameKey = 0x6e616d65ULL;
inline constexpr std::uint64_t kSampleKey = 0x73616d70ULL;

inline void disjoint_pairs(std::vector<std::size_t> members, int epoch, Rng& rng, std::vector<PairIndex>& out) {
  if (members.size() % 2 == 1) {
    // Rotate the image sitting out so coverage balances across epochs.
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(epoch) % members.size()));
  }
  rng.shuffle(std::span<std::size_t>(members));
  for (std::size_t k = 0; k + 1 < members.size(); k += 2) out.push_back({members[k], members[k + 1]});
}

// Uniform derangement by rejection; expected e tries.
inline void derangement_pairs(const std::vector<std::size_t>& members, Rng& rng, std::vector<PairIndex>& out) {
  const std::size_t n = members.size();
  std::vector<std::size_t> perm(n);
  while (true) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    bool fixed = false;
    for (std::size_t i = 0; i < n && !fixed; ++i) fixed = perm[i] == i;
    if (!fixed) break;
  }
  for (std::size_t i = 0; i < n; ++i) out.push_back({members[i], members[perm[i]]});
}

}  // namespace detail

// Disjoint: a random matching, each image used at most once (an odd one out
// sits the epoch out). Permutation: pairs (i, pi(i)) for a derangement pi, so
// every image leads exactly one pair. Intra mode draws partners from the same
// class only.
inline std::vector<PairIndex> plan_epoch(const Dataset& ds, const EpochConfig& cfg) {
  if (ds.size() < 2) throw DataError("plan_epoch: dataset needs at least two images");
  Rng rng(derive_seed(cfg.master_seed, {detail::kPlanKey, static_cast<std::uint64_t>(cfg.epoch_index)}));
  std::vector<std::vector<std::size_t>> groups;
  if (cfg.class_mode == ClassMode::Intra) {
    for (auto& [cls, members] : ds.by_class()) {
      if (members.size() < 2) {
        throw DataError(fmt::format("plan_epoch: class {} has a single image; intra-class mixing needs two", cls));
      }
      groups.push_back(members);
    }
  } else {
    groups.emplace_back(ds.size());
    std::iota(groups.back().begin(), groups.back().end(), std::size_t{0});
  }
  std::vector<PairIndex> pairs;
  for (const auto& g : groups) {
    if (cfg.pairing == Pairing::Disjoint) {
      detail::disjoint_pairs(g, cfg.epoch_index, rng, pairs);
    } else {
      detail::derangement_pairs(g, rng, pairs);
    }
  }
  if (cfg.pairing == Pairing::Permutation) {
    std::sort(pairs.begin(), pairs.end(), [](const PairIndex& a, const PairIndex& b) { return a.first < b.first; });
  }
  return pairs;
}

struct PublicEntry {
  std::string file;
  int label = 0;
};

struct PrivateEntry {
  std::string file;
  std::vector<std::size_t> sources;  // dataset indices
  MixWeights weights;
  std::uint64_t seed = 0;
  double score = 0.0;
  std::string params;  // scheme description; only serialised by survey generation
};

struct RejectedEntry {
  std::vector<std::size_t> sources;
  MixWeights weights;
  std::uint64_t last_seed = 0;
  double best_score = 0.0;
  int attempts = 0;
};

struct EpochStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double mean = 0.0;
  double min = 0.0;
  double median = 0.0;
};

struct EpochManifest {
  Metric metric = Metric::Dssim;
  std::vector<PublicEntry> public_entries;
  std::vector<PrivateEntry> private_entries;
  std::vector<RejectedEntry> rejected;

  EpochStats stats() const {
    EpochStats s;
    s.accepted = private_entries.size();
    s.rejected = rejected.size();
    if (private_entries.empty()) return s;
    std::vector<double> v;
    for (const auto& e : private_entries) v.push_back(e.score);
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    s.min = v.front();
    const std::size_t m = v.size() / 2;
    s.median = v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
    return s;
  }
};

inline constexpr std::string_view kPublicHeader = "file,label";
inline constexpr std::string_view kPrivateHeader = "file,sources,lambdas,seed,score";

namespace detail {

inline std::string join_ids(const std::vector<std::size_t>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += fmt::format("{}{}", i ? ";" : "", ids[i]);
  return s;
}

inline std::string join_weights(const MixWeights& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? ";" : "") + exact(w[i]);
  return s;
}

inline std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError(fmt::format("{}: cannot write", path.string()));
  return out;
}

}  // namespace detail

inline void write_public_manifest(std::span<const PublicEntry> entries, const fs::path& path) {
  auto out = detail::open_for_write(path);
  out << kPublicHeader << '\n';
  for (const auto& e : entries) out << e.file << ',' << e.label << '\n';
}

// Owner-only permissions where the filesystem supports them.
inline void write_private_manifest(std::span<const PrivateEntry> entries, const fs::path& path) {
  {
    auto out = detail::open_for_write(path);
    out << kPrivateHeader << '\n';
    for (const auto& e : entries) {
      out << e.file << ',' << detail::join_ids(e.sources) << ',' << detail::join_weights(e.weights) << ',' << e.seed
          << ',' << detail::exact(e.score) << '\n';
    }
  }
  std::error_code ec;
  fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace, ec);
}

inline void write_rejected(std::span<const RejectedEntry> entries, const fs::path& path) {
  auto out = detail::open_for_write(path);
  out << "sources,lambdas,last_seed,best_score,attempts\n";
  for (const auto& e : entries) {
    out << detail::join_ids(e.sources) << ',' << detail::join_weights(e.weights) << ',' << e.last_seed << ','
        << detail::exact(e.best_score) << ',' << e.attempts << '\n';
  }
  std::error_code ec;
  fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace, ec);
}

// Generic header + rows reader used to inspect manifests.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("{}: cannot open", path.string()));
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw DataError(fmt::format("{}: empty file", path.string()));
  t.header = detail::split_fields(line);
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty() || line == "\r") continue;
    auto f = detail::split_fields(line);
    if (f.size() != t.header.size()) {
      throw DataError(fmt::format("{}:{}: {} fields, header has {}", path.string(), lineno, f.size(), t.header.size()));
    }
    t.rows.push_back(std::move(f));
  }
  return t;
}

inline std::vector<PublicEntry> read_public_manifest(const fs::path& path) {
  const auto t = read_csv_table(path);
  if (detail::join(t.header, ',') != kPublicHeader) throw DataError(fmt::format("{}: not a public manifest", path.string()));
  std::vector<PublicEntry> out;
  for (const auto& r : t.rows) {
    double label = 0;
    if (!detail::parse_double(r[1], label)) throw DataError(fmt::format("{}: bad label '{}'", path.string(), r[1]));
    out.push_back({r[0], static_cast<int>(label)});
  }
  return out;
}

inline std::vector<PrivateEntry> read_private_manifest(const fs::path& path) {
  const auto t = read_csv_table(path);
  if (detail::join(t.header, ',') != kPrivateHeader) throw DataError(fmt::format("{}: not a private manifest", path.string()));
  std::vector<PrivateEntry> out;
  for (const auto& r : t.rows) {
    PrivateEntry e;
    e.file = r[0];
    try {
      for (const auto& s : detail::split_fields(r[1], ';')) e.sources.push_back(std::stoul(s));
      std::vector<double> w;
      for (const auto& s : detail::split_fields(r[2], ';')) w.push_back(std::stod(s));
      e.weights = MixWeights(std::move(w));
      e.seed = std::stoull(r[3]);
      e.score = std::stod(r[4]);
    } catch (const std::exception& ex) {
      throw DataError(fmt::format("{}: bad row for '{}': {}", path.string(), e.file, ex.what()));
    }
    out.push_back(std::move(e));
  }
  return out;
}

// Obfuscates one epoch of `ds` (images already loaded at canonical size) and
// writes <out_root>/epoch_<e>/{<id>.png, public.csv, private.csv, rejected.csv}.
//
// Pair k, attempt a uses Rng(derive_seed(master_seed, {sample key, e, k, a})),
// so results do not depend on scheduling. Scores are taken on the 8-bit
// quantised output, i.e. exactly what is written to disk. Output names follow
// a seeded shuffle so they carry no pairing order.
inline EpochManifest run_epoch(const Dataset& ds, std::span<const Image> images, const EpochConfig& cfg,
                               const fs::path& out_root) {
  cfg.validate();
  if (images.size() != ds.size()) throw std::invalid_argument("run_epoch: one loaded image per dataset entry required");
  const auto pairs = plan_epoch(ds, cfg);
  const Metric metric = cfg.recorded_metric();
  const int attempts = cfg.gate ? cfg.gate->max_attempts : 1;

  struct Outcome {
    Image image;
    Label label;
    std::uint64_t seed = 0;
    double score = 0.0;
    double best = -1.0;
    int tries = 0;
    bool accepted = false;
  };
  std::vector<Outcome> results(pairs.size());
  detail::parallel_for(
      pairs.size(),
      [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        const LabeledImage src[2] = {{images[i], ds.label(i)}, {images[j], ds.label(j)}};
        const Image originals[2] = {images[i], images[j]};
        Outcome& o = results[k];
        for (int a = 0; a < attempts; ++a) {
          const std::uint64_t seed = derive_seed(
              cfg.master_seed, {detail::kSampleKey, static_cast<std::uint64_t>(cfg.epoch_index), k,
                                static_cast<std::uint64_t>(a)});
          Rng rng(seed);
          auto sample = obfuscate(cfg.params, src, rng);
          Image q = quantized(std::move(sample.image));
          const double s = score_sample(q, originals, metric).value;
          o.tries = a + 1;
          o.seed = seed;
          o.best = std::max(o.best, s);
          if (!cfg.gate || s >= cfg.gate->min_score) {
            o.image = std::move(q);
            o.label = sample.public_label;
            o.score = s;
            o.accepted = true;
            break;
          }
        }
      },
      cfg.threads);

  EpochManifest m;
  m.metric = metric;
  std::vector<std::size_t> accepted;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (results[k].accepted) {
      accepted.push_back(k);
    } else {
      m.rejected.push_back({{pairs[k].first, pairs[k].second}, weights_of(cfg.params), results[k].seed,
                            results[k].best, results[k].tries});
    }
  }
  if (!pairs.empty() &&
      static_cast<double>(m.rejected.size()) > cfg.max_reject_fraction * static_cast<double>(pairs.size())) {
    const auto& g = *cfg.gate;
    throw GateError(fmt::format("epoch {}: gate {} >= {} unmet for {} of {} pairs after {} attempts each",
                                cfg.epoch_index, metric_name(g.metric), g.min_score, m.rejected.size(), pairs.size(),
                                g.max_attempts));
  }

  std::vector<std::size_t> rank(accepted.size());
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  Rng names(derive_seed(cfg.master_seed, {detail::kNameKey, static_cast<std::uint64_t>(cfg.epoch_index)}));
  names.shuffle(std::span<std::size_t>(rank));

  const fs::path dir = out_root / fmt::format("epoch_{}", cfg.epoch_index);
  fs::create_directories(dir);
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (rank, pair)
  for (std::size_t n = 0; n < accepted.size(); ++n) order.emplace_back(rank[n], accepted[n]);
  std::sort(order.begin(), order.end());
  for (const auto& [r, k] : order) {
    const Outcome& o = results[k];
    const std::string file = fmt::format("{:06d}.png", r);
    m.public_entries.push_back({file, o.label.class_id});
    m.private_entries.push_back({file, {pairs[k].first, pairs[k].second}, weights_of(cfg.params), o.seed, o.score, {}});
  }
  detail::parallel_for(
      order.size(), [&](std::size_t n) { save_image(results[order[n].second].image, dir / m.public_entries[n].file); },
      cfg.threads);
  write_public_manifest(m.public_entries, dir / "public.csv");
  write_private_manifest(m.private_entries, dir / "private.csv");
  write_rejected(m.rejected, dir / "rejected.csv");
  return m;
}

// Parameter grids used for survey images.
namespace survey_grid {
inline constexpr double kLambda[] = {0.5, 0.6, 0.7};
inline constexpr double kThreeWay[3][3] = {{0.7, 0.2, 0.1}, {0.5, 0.33, 0.16}, {0.33, 0.33, 0.33}};
inline constexpr double kGraftP[] = {0.5, 0.6, 0.7, 0.8};
inline constexpr int kBlurKernel[] = {17, 35, 45};
inline constexpr int kPixelSquare[] = {16, 20, 32};
inline constexpr int kShuffleBlock[] = {4, 8, 16};
inline constexpr double kNoiseSigma[] = {10, 20, 40};
}  // namespace survey_grid

// Survey question images: the six schemes in turn, parameters drawn uniformly
// from the survey grids, sources drawn class-first so every source has a
// distinct label. Plain mixing alternates at random between two and three
// sources; three-way vectors that do not sum to one are renormalised, and the
// nominal vector is kept in the params description.
//
// Writes images, public.csv, private.csv (dSSIM score), params.csv and
// scores.csv (every image metric against every source) into out_dir.
inline EpochManifest generate_survey_samples(const Dataset& ds, std::span<const Image> images, std::size_t count,
                                             std::uint64_t seed, const fs::path& out_dir, unsigned threads = 0) {
  if (images.size() != ds.size()) throw std::invalid_argument("survey: one loaded image per dataset entry required");
  const auto classes = ds.by_class();
  if (classes.size() < 3) throw DataError(fmt::format("survey: need at least 3 classes, dataset has {}", classes.size()));
  std::vector<int> class_ids;
  for (const auto& [c, _] : classes) class_ids.push_back(c);

  struct Plan {
    ObfuscationParams params;
    std::string nominal;
    std::vector<std::size_t> sources;
    std::uint64_t seed;
  };
  std::vector<Plan> plans;
  Rng rng(seed, detail::kPlanKey);
  auto pick = [&](const auto& grid) { return grid[rng.below(std::size(grid))]; };
  for (std::size_t n = 0; n < count; ++n) {
    const Scheme scheme = kAllSchemes[n % std::size(kAllSchemes)];
    Plan plan;
    std::size_t n_sources = 2;
    MixWeights w = MixWeights::pair(pick(survey_grid::kLambda));
    std::string nominal;
    if (scheme == Scheme::Mix && rng.below(2) == 1) {
      n_sources = 3;
      const auto& v = survey_grid::kThreeWay[rng.below(3)];
      const double sum = v[0] + v[1] + v[2];
      w = MixWeights{v[0] / sum, v[1] / sum, v[2] / sum};
      nominal = fmt::format("weights={}/{}/{}", v[0], v[1], v[2]);
    }
    switch (scheme) {
      case Scheme::Mix: plan.params = MixParams{w}; break;
      case Scheme::GraftMix: plan.params = GraftMixParams{w, pick(survey_grid::kGraftP)}; break;
      case Scheme::ShuffleMix: plan.params = ShuffleMixParams{w, pick(survey_grid::kShuffleBlock)}; break;
      case Scheme::NoiseMix: plan.params = NoiseMixParams{w, pick(survey_grid::kNoiseSigma)}; break;
      case Scheme::PixelizeMix: plan.params = PixelizeMixParams{w, pick(survey_grid::kPixelSquare)}; break;
      case Scheme::BlurMix: plan.params = BlurMixParams{w, BlurSpec::from_kernel(pick(survey_grid::kBlurKernel))}; break;
    }
    plan.nominal = nominal.empty() ? describe(plan.params) : nominal;
    std::vector<int> cls = class_ids;
    rng.shuffle(std::span<int>(cls));
    for (std::size_t s = 0; s < n_sources; ++s) {
      const auto& members = classes.at(cls[s]);
      plan.sources.push_back(members[rng.below(members.size())]);
    }
    plan.seed = derive_seed(seed, {detail::kSampleKey, n});
    plans.push_back(std::move(plan));
  }

  struct Result {
    Image image;
    Label label;
    double score = 0.0;
    std::vector<std::array<double, 4>> pairwise;  // per source, per image metric
  };
  std::vector<Result> results(count);
  detail::parallel_for(
      count,
      [&](std::size_t n) {
        const Plan& p = plans[n];
        std::vector<LabeledImage> src;
        std::vector<Image> originals;
        for (std::size_t id : p.sources) {
          src.push_back({images[id], ds.label(id)});
          originals.push_back(images[id]);
        }
        Rng r(p.seed);
        auto sample = obfuscate(p.params, src, r);
        Result& out = results[n];
        out.image = quantized(std::move(sample.image));
        out.label = sample.public_label;
        out.score = score_sample(out.image, originals, Metric::Dssim).value;
        for (const Image& o : originals) {
          std::array<double, 4> row{};
          for (std::size_t m = 0; m < std::size(kImageMetrics); ++m) row[m] = score(out.image, o, kImageMetrics[m]).value;
          out.pairwise.push_back(row);
        }
      },
      threads);

  fs::create_directories(out_dir);
  EpochManifest m;
  m.metric = Metric::Dssim;
  std::ofstream params_csv = detail::open_for_write(out_dir / "params.csv");
  std::ofstream scores_csv = detail::open_for_write(out_dir / "scores.csv");
  params_csv << "file,scheme,params\n";
  scores_csv << "file,source,metric,score\n";
  for (std::size_t n = 0; n < count; ++n) {
    const std::string file = fmt::format("{:06d}.png", n);
    const Plan& p = plans[n];
    save_image(results[n].image, out_dir / file);
    m.public_entries.push_back({file, results[n].label.class_id});
    m.private_entries.push_back({file, p.sources, weights_of(p.params), p.seed, results[n].score, p.nominal});
    params_csv << file << ',' << scheme_name(scheme_of(p.params)) << ',' << p.nominal << '\n';
    for (std::size_t s = 0; s < p.sources.size(); ++s) {
      for (std::size_t k = 0; k < std::size(kImageMetrics); ++k) {
        scores_csv << file << ',' << p.sources[s] << ',' << metric_name(kImageMetrics[k]) << ','
                   << detail::exact(results[n].pairwise[s][k]) << '\n';
      }
    }
  }
  write_public_manifest(m.public_entries, out_dir / "public.csv");
  write_private_manifest(m.private_entries, out_dir / "private.csv");
  return m;
}

}  // namespace mixpriv
