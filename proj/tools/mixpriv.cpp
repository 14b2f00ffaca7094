// mixpriv command-line front end.
//
// Exit status: 0 success, 1 usage or parameter error, 2 data error,
// 3 privacy gate failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "mixpriv/mixpriv.hpp"

namespace fs = std::filesystem;
using namespace mixpriv;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kGate = 3 };

// Flat "key = value" lines; '#' starts a comment. Each key becomes the long
// flag --key and is placed before the real arguments, so flags win.
std::vector<std::string> config_args(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("{}: cannot open config", path.string()));
  std::vector<std::string> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(fmt::format("{}:{}: expected key = value", path.string(), lineno));
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument(fmt::format("{}:{}: empty key", path.string(), lineno));
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

// Pulls --config out of argv and splices the file's options in right after
// the subcommand name.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<fs::path> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file");
      config = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].starts_with("--config=")) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!config) return args;
  auto extra = config_args(*config);
  auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return !a.starts_with("-"); });
  if (sub == args.end()) throw std::invalid_argument("--config given without a subcommand");
  args.insert(sub + 1, extra.begin(), extra.end());
  return args;
}

struct SchemeOptions {
  std::string scheme = "noise-mix";
  double lambda = 0.75;
  double p = 0.5;
  int block = 4;
  double sigma = 20.0;
  int square = 16;
  int kernel = 17;

  void add_to(CLI::App& app) {
    app.add_option("--scheme", scheme, "mix, graft-mix, shuffle-mix, noise-mix, pixelize-mix or blur-mix")
        ->capture_default_str();
    app.add_option("--lambda", lambda, "weight of the first source")->capture_default_str();
    app.add_option("--p", p, "graft-mix: grafted pixel fraction")->capture_default_str();
    app.add_option("--block", block, "shuffle-mix: tile side")->capture_default_str();
    app.add_option("--sigma", sigma, "noise-mix: noise standard deviation")->capture_default_str();
    app.add_option("--square", square, "pixelize-mix: square side")->capture_default_str();
    app.add_option("--kernel", kernel, "blur-mix: odd Gaussian kernel width")->capture_default_str();
  }

  ObfuscationParams build() const {
    const auto w = MixWeights::pair(lambda);
    switch (parse_scheme(scheme)) {
      case Scheme::Mix: return MixParams{w};
      case Scheme::GraftMix: return GraftMixParams{w, p};
      case Scheme::ShuffleMix: return ShuffleMixParams{w, block};
      case Scheme::NoiseMix: return NoiseMixParams{w, sigma};
      case Scheme::PixelizeMix: return PixelizeMixParams{w, square};
      case Scheme::BlurMix: return BlurMixParams{w, BlurSpec::from_kernel(kernel)};
    }
    throw std::invalid_argument("unknown scheme");
  }
};

struct DatasetOptions {
  std::string dataset;
  int width = 256;
  int height = 256;

  void add_to(CLI::App& app, bool required) {
    auto* opt = app.add_option("--dataset", dataset, "CSV listing (path,label) or directory of class folders");
    if (required) opt->required();
    app.add_option("--width", width, "canonical width")->capture_default_str();
    app.add_option("--height", height, "canonical height")->capture_default_str();
  }
};

void print_stats(int epoch, Metric metric, const EpochStats& s) {
  fmt::print("epoch {}: accepted={} rejected={} {} mean={:.6f} min={:.6f} median={:.6f}\n", epoch, s.accepted,
             s.rejected, metric_name(metric), s.mean, s.min, s.median);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixing-based image obfuscation with privacy scoring"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  // obfuscate
  auto* obf = app.add_subcommand("obfuscate", "obfuscate a dataset for one or more epochs");
  obf->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  SchemeOptions scheme;
  DatasetOptions obf_ds;
  std::string obf_out = "out";
  int epochs = 1;
  int first_epoch = 0;
  std::uint64_t seed = 0;
  std::string pairing = "disjoint";
  std::string class_mode = "blind";
  std::string score_metric = "dssim";
  std::string gate_metric;
  double gate_min = 0.0;
  int gate_attempts = 5;
  scheme.add_to(*obf);
  obf_ds.add_to(*obf, true);
  obf->add_option("--out", obf_out, "output directory")->capture_default_str();
  obf->add_option("--epochs", epochs, "number of epochs")->capture_default_str();
  obf->add_option("--first-epoch", first_epoch, "index of the first epoch")->capture_default_str();
  obf->add_option("--seed", seed, "master seed")->capture_default_str();
  obf->add_option("--pairing", pairing, "disjoint or permutation")->capture_default_str();
  obf->add_option("--class-mode", class_mode, "blind or intra")->capture_default_str();
  obf->add_option("--score-metric", score_metric, "metric recorded when no gate is set")->capture_default_str();
  obf->add_option("--gate-metric", gate_metric, "enable the privacy gate with this metric");
  obf->add_option("--gate-min", gate_min, "minimum gate score")->capture_default_str();
  obf->add_option("--gate-attempts", gate_attempts, "draws per pair before rejecting it")->capture_default_str();
  obf->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  // score
  auto* sc = app.add_subcommand("score", "score an obfuscated image against its sources");
  sc->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string sc_metric = "dssim";
  std::vector<std::string> sc_images;
  std::vector<std::string> sc_features;
  sc->add_option("--metric", sc_metric, "mse, dssim, phash, dhaar or fid")->capture_default_str();
  sc->add_option("images", sc_images, "obfuscated image followed by one or more sources");
  sc->add_option("--features", sc_features, "two feature files (fid)")
      ->expected(2)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  // roc
  auto* roc = app.add_subcommand("roc", "ROC curve, AUC and thresholds from recognition records");
  roc->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string records_path;
  std::string roc_metric;
  std::string roc_out = ".";
  roc->add_option("--records", records_path, "records CSV")->required();
  roc->add_option("--metric", roc_metric, "only this metric (default: every metric in the file)");
  roc->add_option("--out", roc_out, "directory for roc_<metric>.csv")->capture_default_str();
  bool roc_reference = false;
  roc->add_flag("--reference", roc_reference, "also print the published operating points for each metric");

  // attack
  auto* att = app.add_subcommand("attack", "measure how much an attack lowers privacy scores");
  att->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  DatasetOptions att_ds;
  std::string epoch_dir;
  std::string attack_kind = "wiener";
  int window = 3;
  std::optional<double> noise_power;
  int denoise_kernel = 5;
  std::string att_metric = "dssim";
  std::string att_out;
  att_ds.add_to(*att, true);
  att->add_option("--epoch-dir", epoch_dir, "directory holding private.csv and the images")->required();
  att->add_option("--attack", attack_kind, "wiener, gaussian or identity")->capture_default_str();
  att->add_option("--window", window, "wiener: odd window side")->capture_default_str();
  att->add_option("--noise-power", noise_power, "wiener: noise power (default: mean local variance)");
  att->add_option("--denoise-kernel", denoise_kernel, "gaussian: odd kernel width")->capture_default_str();
  att->add_option("--metric", att_metric, "metric to compare")->capture_default_str();
  att->add_option("--out", att_out, "report CSV (default: <epoch-dir>/attack_<attack>.csv)");
  att->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  // survey-gen
  auto* sv = app.add_subcommand("survey-gen", "generate survey question images");
  sv->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  DatasetOptions sv_ds;
  std::size_t count = 6;
  std::uint64_t sv_seed = 0;
  std::string sv_out = "survey";
  sv_ds.add_to(*sv, true);
  sv->add_option("--count", count, "number of samples")->capture_default_str();
  sv->add_option("--seed", sv_seed, "seed")->capture_default_str();
  sv->add_option("--out", sv_out, "output directory")->capture_default_str();
  sv->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }

  try {
    if (*obf) {
      if (epochs < 1) throw std::invalid_argument("--epochs must be >= 1");
      EpochConfig cfg;
      cfg.params = scheme.build();
      cfg.pairing = parse_pairing(pairing);
      cfg.class_mode = parse_class_mode(class_mode);
      cfg.master_seed = seed;
      cfg.score_metric = parse_metric(score_metric);
      cfg.threads = threads;
      if (!gate_metric.empty()) cfg.gate = Gate{parse_metric(gate_metric), gate_min, gate_attempts};
      cfg.validate();
      const auto ds = read_dataset(obf_ds.dataset, obf_ds.width, obf_ds.height);
      const auto images = load_images(ds, threads);
      fmt::print("{}: {} images, {} classes, scheme {}\n", obf_ds.dataset, ds.size(), ds.num_classes,
                 describe(cfg.params));
      for (int e = first_epoch; e < first_epoch + epochs; ++e) {
        cfg.epoch_index = e;
        const auto m = run_epoch(ds, images, cfg, obf_out);
        print_stats(e, m.metric, m.stats());
      }
    } else if (*sc) {
      const Metric metric = parse_metric(sc_metric);
      double value = 0.0;
      if (metric == Metric::Fid) {
        if (sc_features.size() != 2) throw std::invalid_argument("fid needs --features <a> <b>");
        value = frechet_distance(read_feature_set(sc_features[0]), read_feature_set(sc_features[1])).value;
      } else {
        if (sc_images.size() < 2) throw std::invalid_argument("score needs an image and at least one source");
        const Image obfuscated = load_image(sc_images[0]);
        std::vector<Image> sources;
        for (std::size_t k = 1; k < sc_images.size(); ++k) sources.push_back(load_image(sc_images[k]));
        value = score_sample(obfuscated, sources, metric).value;
      }
      fmt::print("{:.9f}\n", value);
    } else if (*roc) {
      const auto records = ingest_records(records_path);
      std::vector<Metric> metrics;
      if (!roc_metric.empty()) {
        metrics.push_back(parse_metric(roc_metric));
      } else {
        for (const auto& r : records) {
          if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end()) metrics.push_back(r.metric);
        }
      }
      fs::create_directories(roc_out);
      for (Metric m : metrics) {
        const auto subset = filter_metric(records, m);
        const auto curve = build_roc(subset);
        const auto t = select_thresholds(curve);
        write_roc_csv(curve, fs::path(roc_out) / fmt::format("roc_{}.csv", metric_name(m)));
        fmt::print("{}: auc={} t_acc={} t_cutoff={} unrecognized={} recognized={}\n", metric_name(m),
                   detail::readable(curve.auc), detail::sig9(t.t_acc()), detail::sig9(t.t_cutoff()), curve.positives,
                   curve.negatives);
        if (!roc_reference) continue;
        for (const auto& ref : kReferenceThresholds) {
          if (ref.metric != m) continue;
          fmt::print("  reference {}/{}: auc={} t_acc={} ({}, {}) t_cutoff={} ({}, {})\n", ref.corpus, ref.evaluator,
                     ref.auc, ref.acc.threshold, ref.acc.fpr, ref.acc.tpr, ref.cutoff.threshold, ref.cutoff.fpr,
                     ref.cutoff.tpr);
        }
      }
    } else if (*att) {
      Attack attack;
      if (attack_kind == "wiener") {
        attack = WienerAttack{window, noise_power};
      } else if (attack_kind == "gaussian") {
        attack = GaussianDenoiseAttack{BlurSpec::from_kernel(denoise_kernel)};
      } else if (attack_kind == "identity") {
        attack = IdentityAttack{};
      } else {
        throw std::invalid_argument(fmt::format("unknown attack '{}'", attack_kind));
      }
      const Metric metric = parse_metric(att_metric);
      if (metric == Metric::Fid) throw std::invalid_argument("fid cannot score individual images");
      const auto ds = read_dataset(att_ds.dataset, att_ds.width, att_ds.height);
      const auto images = load_images(ds, threads);
      const auto entries = read_private_manifest(fs::path(epoch_dir) / "private.csv");
      std::vector<ObfuscatedSample> samples;
      std::vector<std::vector<Image>> sources;
      for (const auto& e : entries) {
        std::vector<Image> src;
        for (std::size_t id : e.sources) {
          if (id >= images.size()) throw DataError(fmt::format("{}: source {} not in dataset", e.file, id));
          src.push_back(images[id]);
        }
        samples.push_back({e.file, load_image(fs::path(epoch_dir) / e.file), Label{}, {}});
        sources.push_back(std::move(src));
      }
      const auto reports = evaluate_attack(samples, sources, attack, metric, threads);
      const fs::path out =
          att_out.empty() ? fs::path(epoch_dir) / fmt::format("attack_{}.csv", attack_name(attack)) : fs::path(att_out);
      write_attack_csv(reports, out);
      const auto s = summarize(reports);
      fmt::print("{} on {} samples ({}): mean before={:.6f} after={:.6f} relative drop={:.2f}%\n",
                 attack_name(attack), reports.size(), metric_name(metric), s.mean_before, s.mean_after,
                 100.0 * s.mean_drop);
    } else if (*sv) {
      const auto ds = read_dataset(sv_ds.dataset, sv_ds.width, sv_ds.height);
      const auto images = load_images(ds, threads);
      const auto m = generate_survey_samples(ds, images, count, sv_seed, sv_out, threads);
      fmt::print("{} survey samples written to {}\n", m.public_entries.size(), sv_out);
    }
  } catch (const GateError& e) {
    std::cerr << "gate failure: " << e.what() << '\n';
    return kGate;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
