#include <gtest/gtest.h>

#include "mssgad/config.hpp"
#include "test_util.hpp"

using namespace mssgad;

TEST(ParseConfig, KeysCommentsAndWhitespace) {
  const ConfigMap m = parse_config_text(
      "# experiment\n"
      "dataset_name = MUTAG\n"
      "\n"
      "  epochs=20  \n"
      "hidden_dims = 64, 32\n"
      "normalize = off\n");
  const RunConfig c = run_config_from_map(m);
  EXPECT_EQ(c.dataset_name, "MUTAG");
  EXPECT_EQ(c.train.epochs, 20u);
  EXPECT_EQ(c.train.hidden_dims, (std::vector<std::size_t>{64, 32}));
  EXPECT_FALSE(c.train.normalize);
}

TEST(ParseConfig, UnknownKeyReportsLine) {
  try {
    parse_config_text("epochs = 2\nbatch_sz = 3\n", "exp.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("exp.cfg:2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("batch_sz"), std::string::npos);
  }
  EXPECT_THROW(parse_config_text("epochs 2\n"), ConfigError);
}

TEST(ParseConfig, BadValues) {
  EXPECT_THROW(run_config_from_map({{"epochs", "two"}}), ConfigError);
  EXPECT_THROW(run_config_from_map({{"epochs", "0"}}), ConfigError);
  EXPECT_THROW(run_config_from_map({{"learning_rate", "1e-3x"}}), ConfigError);
  EXPECT_THROW(run_config_from_map({{"normalize", "maybe"}}), ConfigError);
  EXPECT_THROW(run_config_from_map({{"optimizer", "lbfgs"}}), ConfigError);
  EXPECT_THROW(run_config_from_map({{"features", "colour"}}), ConfigError);
  EXPECT_THROW(run_config_from_map({{"folds", "1"}}), ConfigError);
  EXPECT_THROW(run_config_from_map({{"orientations", "some"}}), ConfigError);
  EXPECT_THROW(run_config_from_map({{"hidden_dims", "8"}}), ConfigError);
}

TEST(ParseConfig, DefaultsMatchTrainConfig) {
  const RunConfig c = run_config_from_map({});
  EXPECT_EQ(c.train.epochs, 100u);
  EXPECT_EQ(c.train.batch_size, 64u);
  EXPECT_EQ(c.train.learning_rate, 1e-3);
  EXPECT_EQ(c.train.optimizer, OptimizerKind::kAdam);
  EXPECT_EQ(c.train.hidden_dims, (std::vector<std::size_t>{128, 64, 32}));
  EXPECT_EQ(c.train.anchor_k, 4u);
  EXPECT_EQ(c.folds, 5u);
  EXPECT_EQ(c.threshold, 0.0);
  EXPECT_EQ(c.orientations, "both");
}

TEST(ConfigHash, StableAndSensitive) {
  const RunConfig a = run_config_from_map({{"dataset_name", "X"}, {"epochs", "5"}});
  const RunConfig b = run_config_from_map({{"epochs", "5"}, {"dataset_name", "X"}});
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_NE(a.hash(), run_config_from_map({{"dataset_name", "X"}, {"epochs", "6"}}).hash());
  // Output location and thread count do not change results.
  EXPECT_EQ(a.hash(), run_config_from_map({{"dataset_name", "X"},
                                           {"epochs", "5"},
                                           {"output_dir", "elsewhere"},
                                           {"threads", "4"}})
                          .hash());
}

TEST(ConfigHash, CanonicalRoundTrip) {
  RunConfig c;
  c.dataset_name = "D";
  c.train.learning_rate = 0.1;
  c.train.hidden_dims = {7, 5};
  c.train.fe_kind = PoolKind::kMean;
  const RunConfig back = run_config_from_map(parse_config_text(c.canonical()));
  EXPECT_EQ(back.canonical(), c.canonical());
  EXPECT_EQ(back.hash(), c.hash());
}

TEST(MergeConfig, OverridesWin) {
  const ConfigMap m = merge_config({{"epochs", "5"}, {"seed", "1"}}, {{"epochs", "9"}});
  EXPECT_EQ(m.at("epochs"), "9");
  EXPECT_EQ(m.at("seed"), "1");
}

TEST(ReadConfigFile, MissingAndPresent) {
  testutil::TempDir d("cfg");
  d.write("a.cfg", "seed = 12\n");
  EXPECT_EQ(read_config_file(d.path() / "a.cfg").at("seed"), "12");
  EXPECT_THROW(read_config_file(d.path() / "b.cfg"), ConfigError);
}
