#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mixpriv/thresholds.hpp"
#include "oracles.hpp"

using namespace mixpriv;

namespace {

std::vector<RecognitionRecord> records_from(const std::vector<double>& unrec, const std::vector<double>& rec,
                                            Metric m = Metric::Dssim) {
  std::vector<RecognitionRecord> out;
  for (std::size_t i = 0; i < unrec.size(); ++i) out.push_back({"u" + std::to_string(i), m, unrec[i], false});
  for (std::size_t i = 0; i < rec.size(); ++i) out.push_back({"r" + std::to_string(i), m, rec[i], true});
  return out;
}

// Scores on a coarse grid so that ties are frequent.
void random_scores(std::mt19937_64& gen, std::vector<double>& unrec, std::vector<double>& rec) {
  std::uniform_int_distribution<int> size(1, 60), level(0, 12);
  unrec.resize(static_cast<std::size_t>(size(gen)));
  rec.resize(static_cast<std::size_t>(size(gen)));
  for (double& s : unrec) s = (level(gen) + 3) / 20.0;
  for (double& s : rec) s = level(gen) / 20.0;
}

}  // namespace

TEST(Roc, PerfectSeparation) {
  const auto roc = build_roc(records_from({0.8, 0.9}, {0.1, 0.2, 0.3}));
  EXPECT_DOUBLE_EQ(roc.auc, 1.0);
  const auto t = select_thresholds(roc);
  EXPECT_EQ(t.t_acc(), 0.8);
  EXPECT_EQ(t.t_cutoff(), 0.8);
  EXPECT_EQ(t.acc.fpr, 0.0);
  EXPECT_EQ(t.acc.tpr, 1.0);
}

TEST(Roc, CurveShape) {
  const auto roc = build_roc(records_from({0.5, 0.7}, {0.5, 0.2}));
  ASSERT_EQ(roc.points.size(), 4u);
  EXPECT_TRUE(std::isinf(roc.points.front().threshold));
  EXPECT_EQ(roc.points.front(), (RocPoint{roc.points.front().threshold, 0.0, 0.0}));
  EXPECT_EQ(roc.points[1], (RocPoint{0.7, 0.0, 0.5}));
  EXPECT_EQ(roc.points[2], (RocPoint{0.5, 0.5, 1.0}));
  EXPECT_EQ(roc.points[3], (RocPoint{0.2, 1.0, 1.0}));
  EXPECT_DOUBLE_EQ(roc.auc, oracle::mann_whitney_auc({0.5, 0.7}, {0.5, 0.2}));
}

TEST(Roc, AucEqualsPairCounting) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> u, r;
    random_scores(gen, u, r);
    EXPECT_NEAR(build_roc(records_from(u, r)).auc, oracle::mann_whitney_auc(u, r), 1e-12);
  }
}

TEST(Roc, ThresholdsEqualExhaustiveSearch) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> u, r;
    random_scores(gen, u, r);
    const auto t = select_thresholds(build_roc(records_from(u, r)));
    const auto ref = oracle::exhaustive_thresholds(u, r);
    ASSERT_EQ(t.t_acc(), ref.t_acc) << "trial " << trial;
    ASSERT_EQ(t.t_cutoff(), ref.t_cutoff) << "trial " << trial;
  }
}

TEST(Roc, TiesGoToLargerThreshold) {
  // J is 0.5 at both 0.9 and 0.4; the more private 0.9 wins.
  const auto t = select_thresholds(build_roc(records_from({0.9, 0.4}, {0.6, 0.1})));
  EXPECT_EQ(t.t_acc(), 0.9);
}

TEST(Roc, RejectsSingleClassAndMixedMetrics) {
  EXPECT_THROW(build_roc(records_from({0.5, 0.6}, {})), DataError);
  EXPECT_THROW(build_roc(records_from({}, {0.5})), DataError);
  auto mixed = records_from({0.5}, {0.2});
  mixed[1].metric = Metric::Dhaar;
  EXPECT_THROW(build_roc(mixed), DataError);
  EXPECT_EQ(filter_metric(mixed, Metric::Dhaar).size(), 1u);
}

TEST(Roc, FprAtThreshold) {
  const auto recs = records_from({0.9}, {0.1, 0.5, 0.7, 0.63});
  EXPECT_DOUBLE_EQ(fpr_at(recs, Metric::Dssim, 0.63), 0.5);
  EXPECT_THROW(fpr_at(recs, Metric::Phash, 0.5), DataError);
}

TEST(Survey, CollapseAnswers) {
  const int sources[] = {3, 7};
  const int hit[] = {1, 7};
  const int miss[] = {1, 2};
  EXPECT_TRUE(collapse_answers(hit, sources, false));
  EXPECT_FALSE(collapse_answers(miss, sources, false));
  EXPECT_FALSE(collapse_answers(hit, sources, true));
  EXPECT_FALSE(collapse_answers({}, sources, false));
}

TEST(Records, ParseAndRoundTrip) {
  testing_support::TempDir dir("rec");
  std::ofstream(dir / "r.csv") << "sample_id,metric,score,recognized\nim1,dssim,0.63,0\nim2,dhaar,0.1,true\n";
  const auto recs = ingest_records(dir / "r.csv");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0], (RecognitionRecord{"im1", Metric::Dssim, 0.63, false}));
  EXPECT_EQ(recs[1], (RecognitionRecord{"im2", Metric::Dhaar, 0.1, true}));
  write_records(recs, dir / "back.csv");
  EXPECT_EQ(ingest_records(dir / "back.csv"), recs);
}

TEST(Records, ErrorsNameTheLine) {
  testing_support::TempDir dir("rec");
  auto expect_error = [&](const std::string& body, const std::string& fragment) {
    std::ofstream(dir / "bad.csv") << body;
    try {
      ingest_records(dir / "bad.csv");
      FAIL() << "no error for: " << body;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_error("id,metric,score\n", ":1:");
  expect_error("sample_id,metric,score,recognized\na,dssim,0.5,0\nb,dssim,x,1\n", ":3:");
  expect_error("sample_id,metric,score,recognized\na,psnr,0.5,0\n", "unknown metric");
  expect_error("sample_id,metric,score,recognized\na,dssim,0.5,maybe\n", ":2:");
  expect_error("sample_id,metric,score,recognized\n", "no records");
}

TEST(Records, RocCsvLayout) {
  testing_support::TempDir dir("rec");
  write_roc_csv(build_roc(records_from({0.8}, {0.2})), dir / "roc.csv");
  std::ifstream in(dir / "roc.csv");
  std::string all((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(all, "threshold,fpr,tpr\ninf,0,0\n0.8,0,1\n0.2,1,1\nauc,1\n");
}
