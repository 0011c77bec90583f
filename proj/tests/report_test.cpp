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


#include "discex/report.hpp"

#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace discex {
namespace {

TEST(ReportTest, Fixed2RoundsToTwoDecimals) {
  EXPECT_EQ(fixed2(17.346), "17.35");
  EXPECT_EQ(fixed2(13.858), "13.86");
  EXPECT_EQ(fixed2(0.0), "0.00");
  EXPECT_EQ(fixed2(100.0), "100.00");
}

TEST(ReportTest, TextTableAlignsColumns) {
  TextTable t({"Method", "F1"});
  t.add({"Pipeline", "7.5"});
  t.add({"X", "100.25"});
  EXPECT_EQ(t.render(),
            "Method        F1\n"
            "----------------\n"
            "Pipeline     7.5\n"
            "X         100.25\n");
}

TEST(ReportTest, CsvFieldQuoting) {
  EXPECT_EQ(csv_field("and"), "and");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"so\""), "\"say \"\"so\"\"\"");
}

TEST(ReportTest, ShortLabels) {
  EXPECT_EQ(short_label("Expansion"), "Exp");
  EXPECT_EQ(short_label("Contingency.Pragmatic cause"), "Cont.PCause");
  EXPECT_EQ(short_label("Temporal.Asynchronous"), "Temp.Async");
  EXPECT_EQ(short_label("Unknown"), "Unknown");
}

TEST(ReportTest, EvalReportJsonKeepsFullPrecision) {
  const auto r = score_predictions(std::vector<size_t>{1, 1, 0},
                                   {{1}, {0}, {0}}, LabelSet::first_level());
  const auto j = to_json(r);
  EXPECT_EQ(j["level"], 1);
  EXPECT_EQ(j["per_class"][1]["label"], "Contingency");
  EXPECT_EQ(j["per_class"][1]["f1"].get<double>(), r.f1[1]);
  EXPECT_EQ(j["metadata"]["convention"], "match-either");
  // Key order is fixed.
  EXPECT_EQ(j.begin().key(), "level");
  const std::string table = eval_table({{"Pipeline", r}});
  EXPECT_NE(table.find("Macro-F1"), std::string::npos);
  EXPECT_NE(table.find(fixed2(r.macro_f1)), std::string::npos);
}

TEST(ReportTest, ConfusionCsv) {
  ConnectiveConfusion c;
  c.gold = {"and", "in fact"};
  c.predicted = {"but"};
  c.counts = {{2, 1}};
  EXPECT_EQ(to_csv(c), "predicted\\gold,and,in fact\nbut,2,1\n");
}

TEST(ReportTest, ShiftTableReportsChangedFraction) {
  LabelShiftReport r;
  r.labels = LabelSet::first_level();
  r.matrix.assign(4, std::vector<size_t>(4, 0));
  r.matrix[3][1] = 1;
  r.matrix[2][2] = 3;
  r.total = 4;
  r.changed = 1;
  EXPECT_NE(shift_table(r).find("changed: 1/4 (25.00%)"), std::string::npos);
  EXPECT_EQ(to_json(r)["changed_fraction"], 0.25);
}

TEST(ReportTest, PredictionRoundTrip) {
  const auto inv = ConnectiveInventory::parse("and\nbut");
  const auto labels = LabelSet::first_level();
  Prediction p;
  p.relation_id = 7;
  p.method = InferenceMethod::kMarginal;
  p.label = 2;
  p.top_connective = 1;
  p.probs.probs = {0.1, 0.2, 0.6, 0.1};
  p.connectives.probs = {0.3, 0.7};
  const auto j = nlohmann::json::parse(to_json(p, labels, inv, true).dump());
  const Prediction back = prediction_from_json(j, labels, inv);
  EXPECT_EQ(back.relation_id, 7u);
  EXPECT_EQ(back.method, InferenceMethod::kMarginal);
  EXPECT_EQ(back.label, 2u);
  EXPECT_EQ(back.top_connective, 1u);
  EXPECT_EQ(back.probs.probs, p.probs.probs);
  EXPECT_EQ(back.connectives.probs, p.connectives.probs);
  EXPECT_FALSE(to_json(p, labels, inv, false).contains("conn_probs"));
}

TEST(ReportTest, PredictionFromJsonRejectsUnknownValues) {
  const auto inv = ConnectiveInventory::parse("and\nbut");
  const auto labels = LabelSet::first_level();
  nlohmann::json j = {{"relation_id", 0},  {"method", "pipeline"},
                      {"label", "Expansion"}, {"top_connective", "and"},
                      {"probs", {0, 0, 0, 1}}};
  EXPECT_NO_THROW(prediction_from_json(j, labels, inv));
  auto bad = j;
  bad["method"] = "vote";
  EXPECT_THROW(prediction_from_json(bad, labels, inv), DataError);
  bad = j;
  bad["label"] = "EntRel";
  EXPECT_THROW(prediction_from_json(bad, labels, inv), DataError);
  bad = j;
  bad["top_connective"] = "so";
  EXPECT_THROW(prediction_from_json(bad, labels, inv), DataError);
  bad = j;
  bad.erase("probs");
  EXPECT_THROW(prediction_from_json(bad, labels, inv), DataError);
}

}  // namespace
}  // namespace discex
