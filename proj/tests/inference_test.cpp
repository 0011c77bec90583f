// Copyright 2026 The discex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "discex/inference.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace discex {
namespace {

using testing::explicit_rel;
using testing::Rng;

// Classifier with one fixed row per connective.
class MatrixClassifier : public ExplicitClassifier {
 public:
  MatrixClassifier(LabelSet labels, std::map<std::string, std::vector<double>> rows)
      : labels_(std::move(labels)), rows_(std::move(rows)) {}
  std::string id() const override { return "matrix"; }
  const LabelSet& labels() const override { return labels_; }
  ClassifierOutput classify(std::string_view connective, std::string_view,
                            std::string_view) const override {
    ClassifierOutput out;
    out.dist.probs = rows_.at(std::string(connective));
    return out;
  }

 private:
  LabelSet labels_;
  std::map<std::string, std::vector<double>> rows_;
};

ConnectiveDistribution dist_of(std::vector<double> probs) {
  ConnectiveDistribution d;
  d.probs = std::move(probs);
  return d;
}

TEST(PipelinePredictTest, OneHotInputsGiveThatRowsLabel) {
  const auto inv = ConnectiveInventory::parse("and\nbut");
  MatrixClassifier clf(LabelSet::first_level(),
                       {{"and", {0, 0, 0, 1}}, {"but", {0, 0, 1, 0}}});
  const Prediction p = pipeline_predict(dist_of({0, 1}), inv, clf, "", "");
  EXPECT_EQ(p.label, 2u);
  EXPECT_EQ(p.top_connective, 1u);
  EXPECT_EQ(p.method, InferenceMethod::kPipeline);
}

TEST(PipelinePredictTest, TrainedFrequencyModelPicksComparisonForBut) {
  const auto inv = ConnectiveInventory::parse("and\nbut\nbecause");
  const std::vector<Relation> train = {
      explicit_rel("but", {"Comparison.Contrast"}),
      explicit_rel("but", {"Comparison.Concession"}),
      explicit_rel("but", {"Expansion.Conjunction"}),
      explicit_rel("and", {"Expansion.Conjunction"}),
      explicit_rel("because", {"Contingency.Cause.Reason"})};
  FrequencyClassifier clf(train_frequency(train, LabelSet::first_level(), 1.0));
  const Prediction p =
      pipeline_predict(dist_of({0.2, 0.7, 0.1}), inv, clf, "", "");
  EXPECT_EQ(p.label, 2u);  // Comparison
}

TEST(PipelinePredictTest, SingleConnectiveInventoryMatchesMarginal) {
  const auto inv = ConnectiveInventory::parse("so");
  MatrixClassifier clf(LabelSet::first_level(), {{"so", {0.1, 0.6, 0.1, 0.2}}});
  const auto a = pipeline_predict(dist_of({1.0}), inv, clf, "", "");
  const auto b = marginal_predict(dist_of({1.0}), inv, clf, "", "");
  EXPECT_EQ(a.probs.probs, b.probs.probs);
  EXPECT_EQ(a.label, b.label);
}

TEST(MarginalPredictTest, UniformOverTwoOneHotRows) {
  const auto inv = ConnectiveInventory::parse("and\nbut");
  MatrixClassifier clf(LabelSet::first_level(),
                       {{"and", {1, 0, 0, 0}}, {"but", {0, 1, 0, 0}}});
  const auto p = marginal_predict(dist_of({0.5, 0.5}), inv, clf, "", "");
  EXPECT_EQ(p.probs.probs, (std::vector<double>{0.5, 0.5, 0, 0}));
  EXPECT_EQ(p.label, 0u);  // tie goes to the earlier label
}

TEST(MarginalPredictTest, OneHotConnectiveEqualsPipeline) {
  const auto inv = ConnectiveInventory::parse("and\nbut\nso");
  MatrixClassifier clf(LabelSet::first_level(), {{"and", {0.1, 0.2, 0.3, 0.4}},
                                                 {"but", {0.4, 0.3, 0.2, 0.1}},
                                                 {"so", {0.7, 0.1, 0.1, 0.1}}});
  const auto dist = dist_of({0, 1, 0});
  EXPECT_EQ(marginal_predict(dist, inv, clf, "", "").probs.probs,
            pipeline_predict(dist, inv, clf, "", "").probs.probs);
}

TEST(MarginalPredictTest, MarginalCanDisagreeWithPipeline) {
  // "and" is slightly on top, but the mass on causal connectives wins.
  const auto inv = ConnectiveInventory::parse("and\nbecause\nso");
  MatrixClassifier clf(LabelSet::first_level(), {{"and", {0, 0, 0, 1}},
                                                 {"because", {0, 1, 0, 0}},
                                                 {"so", {0, 1, 0, 0}}});
  const auto dist = dist_of({0.4, 0.3, 0.3});
  EXPECT_EQ(pipeline_predict(dist, inv, clf, "", "").label, 3u);
  EXPECT_EQ(marginal_predict(dist, inv, clf, "", "").label, 1u);
}

TEST(InferenceTest, MismatchedSizesAreRejected) {
  const auto inv = ConnectiveInventory::parse("and\nbut");
  MatrixClassifier clf(LabelSet::first_level(),
                       {{"and", {1, 0, 0, 0}}, {"but", {0, 1, 0}}});
  EXPECT_THROW(pipeline_predict(dist_of({1.0}), inv, clf, "", ""), DataError);
  EXPECT_THROW(marginal_predict(dist_of({0.5, 0.5}), inv, clf, "", ""),
               BackendError);
}

struct RandomFixture {
  ConnectiveInventory inv;
  std::vector<std::vector<double>> rows;  // per connective
  ConnectiveDistribution dist;
  LabelSet labels;

  MatrixClassifier classifier() const {
    std::map<std::string, std::vector<double>> m;
    for (size_t c = 0; c < inv.size(); ++c) m[inv[c]] = rows[c];
    return MatrixClassifier(labels, m);
  }
};

RandomFixture random_fixture(Rng& rng) {
  RandomFixture f;
  f.labels = rng.coin() ? LabelSet::first_level() : LabelSet::eleven_way();
  const size_t n = 1 + rng.index(65);
  std::vector<std::string> conns;
  for (size_t i = 0; i < n; ++i) conns.push_back("c" + std::to_string(i));
  f.inv = ConnectiveInventory(conns);
  for (size_t i = 0; i < n; ++i) f.rows.push_back(rng.simplex(f.labels.size()));
  f.dist = dist_of(rng.simplex(n));
  return f;
}

TEST(InferencePropertyTest, MarginalMatchesBruteForce) {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const RandomFixture f = random_fixture(rng);
    const auto clf = f.classifier();
    const auto p = marginal_predict(f.dist, f.inv, clf, "", "");
    double total = 0.0;
    for (size_t l = 0; l < f.labels.size(); ++l) {
      double expected = 0.0;
      for (size_t c = 0; c < f.inv.size(); ++c) {
        expected += f.rows[c][l] * f.dist[c];
      }
      EXPECT_NEAR(p.probs[l], expected, 1e-12);
      total += p.probs[l];
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_EQ(p.label, argmax_first(p.probs.probs));
  }
}

TEST(InferencePropertyTest, DominantConnectiveMakesMethodsAgree) {
  Rng rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    RandomFixture f = random_fixture(rng);
    const size_t top = rng.index(f.inv.size());
    // Give `top` a row with a unique argmax and a gap g between its best
    // and second-best entries, then put at least 1 - g/2 mass on it.
    std::vector<double> row = rng.simplex(f.labels.size());
    const size_t best = rng.index(row.size());
    row[best] = *std::max_element(row.begin(), row.end()) + 1.0;
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    for (double& v : row) v /= sum;
    f.rows[top] = row;
    double second = 0.0;
    for (size_t l = 0; l < row.size(); ++l) {
      if (l != best) second = std::max(second, row[l]);
    }
    const double eps = (row[best] - second) / 2.0 * 0.99;
    std::vector<double> d(f.inv.size(), 0.0);
    d[top] = 1.0 - eps;
    if (f.inv.size() > 1) {
      const std::vector<double> rest = rng.simplex(f.inv.size() - 1);
      for (size_t c = 0, j = 0; c < f.inv.size(); ++c) {
        if (c != top) d[c] = eps * rest[j++];
      }
    } else {
      d[top] = 1.0;
    }
    f.dist = dist_of(d);
    const auto clf = f.classifier();
    EXPECT_EQ(pipeline_predict(f.dist, f.inv, clf, "", "").label, best);
    EXPECT_EQ(marginal_predict(f.dist, f.inv, clf, "", "").label, best);
  }
}

TEST(InferencePropertyTest, PermutingTheInventoryKeepsLabels) {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const RandomFixture f = random_fixture(rng);
    std::vector<size_t> perm(f.inv.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    RandomFixture g = f;
    std::vector<std::string> conns;
    for (size_t i = 0; i < perm.size(); ++i) {
      conns.push_back(f.inv[perm[i]]);
      g.rows[i] = f.rows[perm[i]];
      g.dist.probs[i] = f.dist[perm[i]];
    }
    g.inv = ConnectiveInventory(conns);
    const auto fc = f.classifier();
    const auto gc = g.classifier();
    const auto a = marginal_predict(f.dist, f.inv, fc, "", "");
    const auto b = marginal_predict(g.dist, g.inv, gc, "", "");
    for (size_t l = 0; l < f.labels.size(); ++l) {
      EXPECT_NEAR(a.probs[l], b.probs[l], 1e-12);
    }
    // Labels may only differ when the marginal vector is (nearly) tied.
    if (a.label != b.label) {
      EXPECT_NEAR(a.probs[a.label], a.probs[b.label], 1e-12);
    }
    // The pipeline picks the same connective unless the top is tied.
    const size_t ta = top_connective(f.dist);
    const size_t tb = top_connective(g.dist);
    if (f.inv[ta] != g.inv[tb]) {
      EXPECT_EQ(f.dist[ta], g.dist[tb]);
    } else {
      EXPECT_EQ(pipeline_predict(f.dist, f.inv, fc, "", "").label,
                pipeline_predict(g.dist, g.inv, gc, "", "").label);
    }
  }
}

Prediction pred(size_t id, size_t label) {
  Prediction p;
  p.relation_id = id;
  p.label = label;
  return p;
}

TEST(LabelShiftTest, IdenticalListsHaveNoShift) {
  const std::vector<Prediction> a = {pred(0, 1), pred(1, 3), pred(2, 0)};
  const auto r = label_shift_report(a, a, LabelSet::first_level());
  EXPECT_EQ(r.changed, 0u);
  EXPECT_EQ(r.changed_fraction(), 0.0);
  EXPECT_EQ(r.matrix[1][1] + r.matrix[3][3] + r.matrix[0][0], 3u);
}

TEST(LabelShiftTest, HandBuiltFixture) {
  // Expansion -> Contingency once; the rest unchanged.
  const std::vector<Prediction> pipe = {pred(0, 3), pred(1, 3), pred(2, 2),
                                        pred(3, 1)};
  const std::vector<Prediction> marg = {pred(0, 1), pred(1, 3), pred(2, 2),
                                        pred(3, 1)};
  const auto r = label_shift_report(pipe, marg, LabelSet::first_level());
  EXPECT_EQ(r.matrix[3][1], 1u);
  EXPECT_EQ(r.matrix[3][3], 1u);
  EXPECT_EQ(r.matrix[2][2], 1u);
  EXPECT_EQ(r.matrix[1][1], 1u);
  EXPECT_EQ(r.changed, 1u);
  EXPECT_DOUBLE_EQ(r.changed_fraction(), 0.25);
}

TEST(LabelShiftTest, MarginsEqualPerMethodLabelCounts) {
  Rng rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = rng.index(50);
    std::vector<Prediction> a, b;
    std::vector<size_t> ca(11, 0), cb(11, 0);
    for (size_t i = 0; i < n; ++i) {
      a.push_back(pred(i, rng.index(11)));
      b.push_back(pred(i, rng.index(11)));
      ++ca[a.back().label];
      ++cb[b.back().label];
    }
    const auto r = label_shift_report(a, b, LabelSet::eleven_way());
    size_t trace = 0;
    for (size_t i = 0; i < 11; ++i) {
      size_t row = 0, col = 0;
      for (size_t j = 0; j < 11; ++j) {
        row += r.matrix[i][j];
        col += r.matrix[j][i];
      }
      EXPECT_EQ(row, ca[i]);
      EXPECT_EQ(col, cb[i]);
      trace += r.matrix[i][i];
    }
    EXPECT_EQ(r.total, n);
    EXPECT_EQ(r.changed, n - trace);
  }
}

TEST(LabelShiftTest, RejectsMisalignedLists) {
  EXPECT_THROW(label_shift_report({pred(0, 0)}, {}, LabelSet::first_level()),
               DataError);
  EXPECT_THROW(label_shift_report({pred(0, 0)}, {pred(1, 0)},
                                  LabelSet::first_level()),
               DataError);
  EXPECT_THROW(label_shift_report({pred(0, 4)}, {pred(0, 0)},
                                  LabelSet::first_level()),
               DataError);
}

}  // namespace
}  // namespace discex
