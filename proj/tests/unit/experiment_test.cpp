#include <gtest/gtest.h>

#include "posh/common.hpp"
#include "posh/experiment.hpp"

namespace posh {
namespace {

ExperimentData small_data() {
  const Dataset all = synth_gaussian_mixture(4, 150, 8, 3.0, 1.0, 1);
  const Split s = make_split(all.size(), 0, 2, 60);
  return {subset(all, s.target), subset(all, s.query)};
}

ExperimentConfig small_config(const std::string& method) {
  ExperimentConfig c;
  c.method = method;
  c.code_length = 64;
  c.alpha = 8;
  c.train.epochs = 2;
  c.train_size = 200;
  c.cutoff = 20;
  c.trials = 3;
  return c;
}

TEST(RunTrials, SingleTrialHasZeroInterval) {
  ExperimentConfig c = small_config("fruitfly");
  c.trials = 1;
  const EvalReport r = run_trials(c, small_data());
  ASSERT_EQ(r.per_trial.size(), 1U);
  EXPECT_EQ(r.ci95, 0.0);
  EXPECT_EQ(r.mean, r.per_trial[0]);
}

TEST(RunTrials, SameSeedReproducesAndSeedsDiffer) {
  const ExperimentData data = small_data();
  const ExperimentConfig c = small_config("fruitfly");
  const EvalReport a = run_trials(c, data);
  const EvalReport b = run_trials(c, data);
  EXPECT_EQ(a.per_trial, b.per_trial);
  EXPECT_GT(a.ci95, 0.0);
  for (double v : a.per_trial) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 100.0);
  }
  const auto oracle = build_label_oracle(data.targets.labels, data.queries.labels);
  EXPECT_EQ(run_trial(c, data, oracle, 1).value, a.per_trial[1]);
}

TEST(RunTrials, EveryMethodRuns) {
  const ExperimentData data = small_data();
  for (const char* m : {"fruitfly", "posh", "spherical", "biohash", "bosl", "lsh", "itq",
                        "orthogonal", "knnh-itq"}) {
    ExperimentConfig c = small_config(m);
    c.trials = 1;
    c.bosl_rounds = 2;
    c.itq_iterations = 5;
    if (!is_sparse_method(m)) c.code_length = 8;
    if (std::string(m) == "bosl") c.train_size = 60;
    const EvalReport r = run_trials(c, data);
    EXPECT_GT(r.mean, 0.0) << m;
    EXPECT_EQ(r.alpha, is_sparse_method(m) ? 8U : 0U);
  }
}

TEST(RunTrials, RefinementAndCoarseVariantsRun) {
  const ExperimentData data = small_data();
  ExperimentConfig c = small_config("posh");
  c.trials = 1;
  for (Refinement ref : {Refinement::kLinear, Refinement::kSbiht}) {
    c.refinement = ref;
    c.sbiht_iterations = 5;
    EXPECT_GT(run_trials(c, data).mean, 0.0);
  }
  c.refinement = Refinement::kOff;
  c.nprobe = 1;
  c.metric = "precision";
  EXPECT_GT(run_trials(c, data).mean, 0.0);
  c.relevance = RelevanceMode::kMetric;
  c.relevance_k = 10;
  EXPECT_GT(run_trials(c, data).mean, 0.0);
}

TEST(RunTrials, FailureNamesTheSeed) {
  ExperimentConfig c = small_config("knnh-itq");
  c.code_length = 8;
  c.knnh_k = 200;  // as many neighbours as training samples
  c.seed = 17;
  try {
    run_trials(c, small_data());
    FAIL();
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("seed 17"), std::string::npos) << e.what();
  }
}

TEST(Validate, RejectsInconsistentConfigs) {
  ExperimentConfig c = small_config("posh");
  c.alpha = 65;
  EXPECT_THROW(validate(c), ArgumentError);
  c = small_config("lsh");
  c.refinement = Refinement::kLinear;
  EXPECT_THROW(validate(c), ArgumentError);
  c = small_config("nope");
  EXPECT_THROW(validate(c), ArgumentError);
  c = small_config("posh");
  c.trials = 0;
  EXPECT_THROW(validate(c), ArgumentError);
}

TEST(Report, JsonRoundTripAndAggregate) {
  EvalReport r;
  r.method = "posh";
  r.dataset = "toy";
  r.D = 64;
  r.alpha = 8;
  r.metric = "map";
  r.n = 100;
  r.per_trial = {10.0, 12.0, 14.0};
  aggregate(r);
  EXPECT_DOUBLE_EQ(r.mean, 12.0);
  EXPECT_NEAR(r.ci95, 1.96 * 2.0 / std::sqrt(3.0), 1e-12);
  const EvalReport back = report_from_json(to_json(r));
  EXPECT_EQ(back.per_trial, r.per_trial);
  EXPECT_EQ(back.ci95, r.ci95);
  EXPECT_EQ(back.method, "posh");
  const std::string table = to_table(r);
  EXPECT_NE(table.find("ci95"), std::string::npos);
  EXPECT_NE(table.find("map@100"), std::string::npos);
}

}  // namespace
}  // namespace posh
