// Copyright 2026 The ergolab Authors
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

#include <cstdio>
#include <filesystem>

#include "gtest/gtest.h"

#include "ergolab.hpp"

using namespace ergolab;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ergolab_io_test_" + name)).string();
}

}  // namespace

TEST(StateIo, JsonRoundTrip) {
  const PureState psi = random_state(chain(5, 2, Geometry::ChainPeriodic), 3);
  const PureState back = io::state_from_json(io::state_to_json(psi));
  EXPECT_EQ(back.lattice, psi.lattice);
  EXPECT_EQ((back.amplitudes - psi.amplitudes).norm(), 0.0);
}

TEST(StateIo, BinaryRoundTripIsExact) {
  const PureState psi = random_state(chain(6), 9);
  const auto path = temp_path("state.bin");
  io::write_state_binary(path, psi);
  EXPECT_EQ(std::filesystem::file_size(path), 4u + 8u + 64u * 16u);
  const PureState back = io::read_state_binary(path);
  EXPECT_EQ((back.amplitudes - psi.amplitudes).norm(), 0.0);
  std::remove(path.c_str());
}

TEST(StateIo, BinaryRejectsForeignFiles) {
  const auto path = temp_path("junk.bin");
  io::write_text(path, "not a state");
  EXPECT_THROW(io::read_state_binary(path), StructuralError);
  std::remove(path.c_str());
}

TEST(StateIo, RejectsMalformedPairs) {
  EXPECT_THROW(io::vector_from_json(json::parse("[[1, 0], [2]]")), StructuralError);
  EXPECT_THROW(io::vector_from_json(json::parse("{\"a\": 1}")), StructuralError);
  // Wrong length for the lattice.
  EXPECT_THROW(io::state_from_json(json{{"num_sites", 2}, {"amplitudes", json::parse("[[1, 0]]")}}), StructuralError);
}

TEST(MpsIo, RoundTrip) {
  const MPSSpec s = random_mps(3, 2, 4);
  const MPSSpec back = io::mps_from_json(io::mps_to_json(s));
  ASSERT_EQ(back.tensors.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ((back.tensors[i] - s.tensors[i]).norm(), 0.0);
}

TEST(MpsIo, RowMajorLayout) {
  const auto j = json::parse(R"({"bond_dim": 2, "tensors": [[[1, 0], [2, 0], [3, 0], [4, 1]]]})");
  const MPSSpec s = io::mps_from_json(j);
  EXPECT_EQ(s.tensors[0](0, 1), Complex(2, 0));
  EXPECT_EQ(s.tensors[0](1, 0), Complex(3, 0));
  EXPECT_EQ(s.tensors[0](1, 1), Complex(4, 1));
}

TEST(MpsIo, RejectsWrongTensorSize) {
  const auto j = json::parse(R"({"bond_dim": 2, "tensors": [[[1, 0], [2, 0], [3, 0]]]})");
  EXPECT_THROW(io::mps_from_json(j), StructuralError);
}

TEST(Csv, FormatsRowsWithRoundTripPrecision) {
  io::CsvTable t{{"N", "value"}, {}};
  t.add({8, 0.1});
  EXPECT_EQ(t.str(), "N,value\n8,0.10000000000000001\n");
  EXPECT_THROW(t.add({1}), StructuralError);
}

TEST(Config, Fnv1aReferenceValues) {
  EXPECT_EQ(cli::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(cli::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(cli::fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Config, ExperimentDefaults) {
  const auto c = cli::config_from_json(json{{"experiment", "prop1"}});
  EXPECT_EQ(c.n_grid, (std::vector<int>{6, 8, 10, 12}));
  EXPECT_DOUBLE_EQ(c.epsilon, 0.3);
  const auto s = cli::config_from_json(json{{"experiment", "stability"}});
  EXPECT_EQ(s.n, 10);
  EXPECT_EQ(s.policy.mode, SearchMode::Contiguous);
}

TEST(Config, RejectsUnknownAndMistypedKeys) {
  EXPECT_THROW(cli::config_from_json(json{{"experiment", "gibbs"}, {"temperature", 1}}), cli::ConfigError);
  EXPECT_THROW(cli::config_from_json(json{{"experiment", "gibbs"}, {"params", {{"hy", 1}}}}), cli::ConfigError);
  EXPECT_THROW(cli::config_from_json(json{{"experiment", "gibbs"}, {"N", "eight"}}), cli::ConfigError);
  EXPECT_THROW(cli::config_from_json(json{{"N", 8}}), cli::ConfigError);
  EXPECT_THROW(cli::config_from_json(json{{"experiment", "teleport"}}), cli::ConfigError);
}

TEST(Config, RejectsOutOfRangeValues) {
  EXPECT_THROW(cli::config_from_json(json{{"experiment", "prop1"}, {"epsilon", 1.5}}), cli::ConfigError);
  EXPECT_THROW(cli::config_from_json(json{{"experiment", "prop1"}, {"N_grid", {6, 7, 8}}}), cli::ConfigError);
  EXPECT_THROW(cli::config_from_json(json{{"experiment", "theorem1"}, {"N_grid", {6, 8}}}), cli::ConfigError);
  EXPECT_THROW(cli::config_from_json(json{{"experiment", "gibbs"}, {"params", {{"J", 20}}}}), cli::ConfigError);
  EXPECT_THROW(cli::config_from_json(json{{"experiment", "stability"}, {"policy", {{"mode", "exhaustive"}}}}),
               cli::ConfigError);
  EXPECT_THROW(cli::config_from_json(json{{"experiment", "mps"}, {"mps", {{"source", "file"}}}}), cli::ConfigError);
}

TEST(Config, EmittedConfigReparsesToSameHash) {
  const auto c = cli::config_from_json(json{{"experiment", "equilibrate"}, {"seed", 7}, {"N", 6}});
  const auto again = cli::config_from_json(c.to_json());
  EXPECT_EQ(c.hash(), again.hash());
  EXPECT_EQ(c.to_json(), again.to_json());
}

TEST(Config, HashTracksInputsButNotOutputPaths) {
  const auto a = cli::config_from_json(json{{"experiment", "gibbs"}, {"seed", 1}});
  const auto b = cli::config_from_json(json{{"experiment", "gibbs"}, {"seed", 2}});
  const auto c = cli::config_from_json(json{{"experiment", "gibbs"}, {"seed", 1}, {"output", {{"json", "x.json"}}}});
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Run, GibbsReportCarriesProvenance) {
  const auto c = cli::config_from_json(json{{"experiment", "gibbs"}, {"N", 6}});
  const auto r = cli::run(c);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.report["provenance"]["config_hash"], c.hash());
  EXPECT_EQ(r.report["provenance"]["tolerances"]["structural"], kTol.structural);
  EXPECT_FALSE(r.report["provenance"]["config"].contains("output"));
  EXPECT_EQ(r.report["results"]["check_gibbs_identities"].size(), 3u);
  ASSERT_TRUE(r.csv.has_value());
  EXPECT_EQ(r.csv->rows.size(), 3u);
}

TEST(Run, ResultsAreReproducible) {
  const auto c = cli::config_from_json(json{{"experiment", "equilibrate"}, {"N", 6}, {"initial_states", 2}, {"seed", 4}});
  EXPECT_EQ(cli::run(c).report.dump(), cli::run(c).report.dump());
}

TEST(Run, ResourceGuardSurfaces) {
  const auto c = cli::config_from_json(json{{"experiment", "spectrum"}, {"N", 16}});
  EXPECT_THROW(cli::run(c), ResourceGuardError);
}

TEST(Run, EquilibrateVarianceBelowBound) {
  const auto c = cli::config_from_json(json{{"experiment", "equilibrate"}, {"N", 8}, {"seed", 7}, {"initial_states", 3}});
  const auto r = cli::run(c);
  EXPECT_TRUE(r.pass);
  for (const auto& row : r.report["results"]["check_variance_bounds"])
    EXPECT_LE(row["var_exact"].get<double>(), row["bound_s2"].get<double>());
}
