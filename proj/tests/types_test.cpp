// Copyright 2026 The protoscore Authors.
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

#include <random>

#include <gtest/gtest.h>

#include "protoscore/types.hpp"

namespace protoscore {
namespace {

TEST(ScoreConfig, Defaults) {
  const ScoreConfig cfg;
  EXPECT_EQ(cfg.tau, 0.95);
  EXPECT_EQ(cfg.max_step_words, 30);
  EXPECT_EQ(cfg.decay_lambda, 1.5);
  EXPECT_EQ(cfg.deviation_fraction, 0.6);
  EXPECT_EQ(cfg.order_mode, OrderMode::kStrict);
  EXPECT_EQ(cfg.order_combine, Combine::kSum);
  EXPECT_EQ(cfg.scale_combine, Combine::kProduct);
  EXPECT_EQ(cfg.reward_range, RewardRange::kUnit);
  EXPECT_EQ(cfg.obj_gate, 0.5);
  EXPECT_EQ(cfg.verbosity_penalty, VerbosityPenalty::kLiteral);
}

TEST(ScoreConfig, RoundTripsThroughJson) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    ScoreConfig cfg;
    cfg.tau = unit(rng);
    cfg.max_step_words = 1 + static_cast<int>(rng() % 100);
    cfg.decay_lambda = 0.1 + 3 * unit(rng);
    cfg.deviation_fraction = 0.05 + unit(rng);
    cfg.order_mode = rng() % 2 ? OrderMode::kLcs : OrderMode::kStrict;
    cfg.order_combine = rng() % 2 ? Combine::kProduct : Combine::kSum;
    cfg.scale_combine = rng() % 2 ? Combine::kProduct : Combine::kSum;
    cfg.reward_range = static_cast<RewardRange>(rng() % 4);
    cfg.obj_gate = unit(rng);
    cfg.verbosity_penalty = rng() % 2 ? VerbosityPenalty::kRatio : VerbosityPenalty::kLiteral;
    const std::string text = config_to_json(cfg).dump();
    EXPECT_EQ(config_from_json(json::parse(text)), cfg) << text;
  }
}

TEST(ScoreConfig, PartialPatchKeepsOtherFields) {
  const ScoreConfig cfg = apply_config_patch(ScoreConfig{}, json{{"order_mode", "lcs"}, {"tau", 0.5}});
  EXPECT_EQ(cfg.order_mode, OrderMode::kLcs);
  EXPECT_EQ(cfg.tau, 0.5);
  EXPECT_EQ(cfg.decay_lambda, 1.5);
}

TEST(ScoreConfig, RejectsBadFields) {
  EXPECT_THROW(apply_config_patch({}, json{{"nope", 1}}), SchemaError);
  EXPECT_THROW(apply_config_patch({}, json{{"tau", 1.5}}), SchemaError);
  EXPECT_THROW(apply_config_patch({}, json{{"tau", "high"}}), SchemaError);
  EXPECT_THROW(apply_config_patch({}, json{{"max_step_words", 0}}), SchemaError);
  EXPECT_THROW(apply_config_patch({}, json{{"max_step_words", 2.5}}), SchemaError);
  EXPECT_THROW(apply_config_patch({}, json{{"decay_lambda", 0}}), SchemaError);
  EXPECT_THROW(apply_config_patch({}, json{{"reward_range", "huge"}}), SchemaError);
  try {
    apply_config_patch({}, json{{"order_combine", "max"}});
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "order_combine");
  }
}

TEST(Step, MakeNormalizesAndDeduplicates) {
  const Step s = Step::make(" Add ", {"PBS", "pbs", "  ", "Cells"}, {"4 °C", "4  °c"});
  EXPECT_EQ(s.action, "add");
  EXPECT_EQ(s.objects, (std::vector<std::string>{"pbs", "cells"}));
  EXPECT_EQ(s.parameters, (std::vector<std::string>{"4 °c"}));
  EXPECT_THROW(Step::make("   ", {}, {}), SchemaError);
}

TEST(GoldReference, ParsesAndRoundTrips) {
  const json j = json::parse(R"({"id":"p1","steps":[{"action":"Wash","objects":["Cells"],"parameters":[]}],
                                 "orc":["Wash the cells."]})");
  const GoldReference g = gold_from_json(j);
  EXPECT_EQ(g.id, "p1");
  ASSERT_EQ(g.steps.size(), 1u);
  EXPECT_EQ(g.steps[0].action, "wash");
  ASSERT_TRUE(g.orc.has_value());
  EXPECT_EQ(gold_from_json(gold_to_json(g)), g);
}

TEST(GoldReference, ReportsFieldPath) {
  auto path_of = [](const char* text) {
    try {
      gold_from_json(json::parse(text));
    } catch (const SchemaError& e) {
      return e.path();
    }
    return std::string("<no error>");
  };
  EXPECT_EQ(path_of(R"({"id":"x","steps":[{"action":"","objects":[],"parameters":[]}]})"), "steps[0].action");
  EXPECT_EQ(path_of(R"({"id":"x","steps":[{"action":"a","objects":[1],"parameters":[]}]})"), "steps[0].objects[0]");
  EXPECT_EQ(path_of(R"({"id":"x","steps":[{"action":"a","objects":[]}]})"), "steps[0].parameters");
  EXPECT_EQ(path_of(R"({"id":"x","steps":[]})"), "steps");
  EXPECT_EQ(path_of(R"({"steps":[]})"), "id");
}

}  // namespace
}  // namespace protoscore
