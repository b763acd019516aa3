// Copyright 2026 The patsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "patsim/serialize.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "gtest/gtest.h"
#include "patsim/forecaster.h"
#include "patsim/trace_store.h"
#include "test_util.h"

namespace patsim {
namespace {

using nlohmann::json;
using ::patsim::testing::ShippedRegistry;

TEST(CanonicalDumpTest, SortedKeysAndStableReals) {
  json doc = {{"b", 1.0}, {"a", {{"z", 0.1}, {"y", true}}}, {"c", {1, 2.5, nullptr, "s"}}};
  EXPECT_EQ(CanonicalDump(doc),
            R"({"a":{"y":true,"z":0.10000000000000001},"b":1.0,"c":[1,2.5,null,"s"]})");
}

TEST(CanonicalDumpTest, FormatReal) {
  EXPECT_EQ(FormatReal(1.0), "1.0");
  EXPECT_EQ(FormatReal(-0.5), "-0.5");
  EXPECT_EQ(FormatReal(1e-20), "9.9999999999999995e-21");
  EXPECT_EQ(FormatReal(0.85), "0.84999999999999998");
  EXPECT_EQ(std::stod(FormatReal(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(CanonicalDumpTest, EscapesStrings) {
  EXPECT_EQ(CanonicalDump(json("a\"b\\c\n")), R"("a\"b\\c\n")");
}

TEST(Sha256Test, KnownVectors) {
  EXPECT_EQ(Sha256Hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ForecastJsonTest, CarriesFullTrace) {
  PatternRegistry reg = ShippedRegistry();
  auto r = Simulate(reg, reg.scenarios.at("us_china_tech_decoupling").initial_patterns);
  ASSERT_TRUE(r.ok());
  json j = ToJson(*r);
  for (const char* key : {"initial", "steps", "converged_at", "halted_on_fixpoint", "attractors",
                          "primary", "secondary", "bifurcation_points", "c0", "c_final",
                          "config_echo"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["config_echo"]["merge_rule"], "additive_renormalized");
  const json& fired = j["steps"][1]["fired"];
  ASSERT_FALSE(fired.empty());
  for (const auto& c : fired) {
    EXPECT_TRUE(c.contains("trace"));
    EXPECT_TRUE(c.contains("raw_weight"));
    EXPECT_TRUE(c.contains("normalized_posterior"));
  }
  // Round trip through text keeps every number bit-exact.
  json back = json::parse(CanonicalDump(j));
  EXPECT_EQ(CanonicalDump(back), CanonicalDump(j));
  EXPECT_EQ(back["c_final"].get<double>(), r->c_final);
}

TEST(RegistryJsonTest, RoundTrips) {
  PatternRegistry reg = ShippedRegistry();
  json doc = ToJson(reg);
  auto again = ParseRegistry(doc);
  ASSERT_TRUE(again.ok()) << again.status();
  EXPECT_EQ(CanonicalDump(ToJson(*again)), CanonicalDump(doc));
  EXPECT_EQ(doc["patterns"].size(), 18u);
  EXPECT_EQ(doc["composition_table"].size(), 14u);
  EXPECT_EQ(doc["inverse_table"].size(), 18u);
  EXPECT_EQ(doc["vectors"].size(), 18u);
}

TEST(ConfigOverridesTest, AppliesKnownKeys) {
  SimulationConfig cfg;
  ASSERT_TRUE(ApplyConfigOverrides({{"lambda", 0.9}, {"horizon_steps", 4},
                                    {"path_integration_enabled", false},
                                    {"merge_rule", "additive_renormalized"}},
                                   cfg)
                  .ok());
  EXPECT_EQ(cfg.lambda, 0.9);
  EXPECT_EQ(cfg.horizon_steps, 4);
  EXPECT_FALSE(cfg.path_integration_enabled);
}

TEST(ConfigOverridesTest, RejectsUnknownAndMistyped) {
  SimulationConfig cfg;
  EXPECT_FALSE(ApplyConfigOverrides({{"gamma", 1.0}}, cfg).ok());
  EXPECT_FALSE(ApplyConfigOverrides({{"lambda", "high"}}, cfg).ok());
  EXPECT_FALSE(ApplyConfigOverrides({{"merge_rule", "max"}}, cfg).ok());
  EXPECT_FALSE(ApplyConfigOverrides(json::array(), cfg).ok());
}

class TraceStoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    path_ = (std::filesystem::temp_directory_path() /
             ("patsim_traces_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
              "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name() + ".jsonl"))
                .string();
    std::filesystem::remove(path_);
  }
  void TearDown() override { std::filesystem::remove(path_); }
  std::string path_;
};

TEST_F(TraceStoreTest, IdIsContentAddressed) {
  json req = {{"scenario", "x"}};
  json res = {{"v", 1.0}};
  std::string id = TraceStore::ComputeId(req, res);
  EXPECT_EQ(id, Sha256Hex(CanonicalDump(req) + "\n" + CanonicalDump(res)));
  TraceStore store;
  auto t = store.Append("forecast", req, res);
  ASSERT_TRUE(t.ok());
  EXPECT_EQ(t->id, id);
  EXPECT_EQ(t->result_hash, Sha256Hex(CanonicalDump(res)));
  EXPECT_EQ(store.Get(id)->request_kind, "forecast");
  EXPECT_FALSE(store.Get("feed").has_value());
}

TEST_F(TraceStoreTest, PersistsAndDeduplicates) {
  json req = {{"patterns", {"a"}}};
  json res = {{"primary", "a"}};
  std::string id;
  {
    auto store = TraceStore::Open(path_);
    ASSERT_TRUE(store.ok()) << store.status();
    auto first = (*store)->Append("forecast", req, res);
    auto second = (*store)->Append("forecast", req, res);
    ASSERT_TRUE(first.ok() && second.ok());
    EXPECT_EQ(first->created_at, second->created_at);
    id = first->id;
    EXPECT_EQ((*store)->size(), 1u);
  }
  std::ifstream in(path_);
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 1);

  auto reopened = TraceStore::Open(path_);
  ASSERT_TRUE(reopened.ok());
  auto t = (*reopened)->Get(id);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(CanonicalDump(t->result), CanonicalDump(res));
  EXPECT_EQ(CanonicalDump(t->request_echo), CanonicalDump(req));
}

TEST_F(TraceStoreTest, CorruptFileIsAnError) {
  {
    std::ofstream out(path_);
    out << "{not json\n";
  }
  EXPECT_FALSE(TraceStore::Open(path_).ok());
}

}  // namespace
}  // namespace patsim
