#include <doctest.h>

#include <cmath>
#include <vector>

#include "csifb/experiments.hpp"
#include "test_support.hpp"

using namespace csifb;

namespace {

SystemConfig small_sweep_config() {
  SystemConfig cfg;
  cfg.tx_antennas = 2;
  cfg.subcarriers = 2;
  cfg.pilot_subcarriers = 2;
  cfg.training_symbols = 8;
  cfg.snr_downlink = 4.0;
  cfg.distortion_budget = 2.0;
  cfg.epsilon = 0.5;
  return cfg;
}

}  // namespace

TEST_CASE("mc_run is deterministic and validates its inputs") {
  const SystemConfig cfg = small_sweep_config();
  const ChannelModel model = make_identity_covariance(4);
  const McResults a = mc_run(cfg, model, 500, 99);
  const McResults b = mc_run(cfg, model, 500, 99);
  CHECK(a.source_delta.mean == b.source_delta.mean);  // bit-exact
  CHECK(a.distortion_delta.mean == b.distortion_delta.mean);
  CHECK(a.mmse.mean == b.mmse.mean);
  CHECK(a.gap.std_error == b.gap.std_error);
  CHECK(a.total.mean == doctest::Approx(a.direct_rate + a.gap.mean));

  CHECK_THROWS_AS(mc_run(cfg, model, 50, 99), Error);  // needs >= 100 trials
  const ChannelModel wrong = make_identity_covariance(6);
  CHECK_THROWS_AS(mc_run(cfg, wrong, 500, 99), Error);
}

TEST_CASE("per-trial outcomes do not depend on evaluation order") {
  const SystemConfig cfg = small_sweep_config();
  const ChannelModel model = make_kronecker_covariance(2, 2, 0.5, 0.3);
  const std::uint64_t seed = 4242;
  std::vector<TrialOutcome> forward(32), backward(32);
  for (int i = 0; i < 32; ++i) forward[i] = mc_trial(cfg, model, seed, i);
  for (int i = 31; i >= 0; --i) backward[i] = mc_trial(cfg, model, seed, i);
  for (int i = 0; i < 32; ++i) {
    CHECK(forward[i].source_delta == backward[i].source_delta);
    CHECK(forward[i].distortion_delta == backward[i].distortion_delta);
    CHECK(forward[i].d_mmse == backward[i].d_mmse);
  }
}

TEST_CASE("standard error shrinks like the square root of the trial count") {
  const SystemConfig cfg = small_sweep_config();
  const ChannelModel model = make_identity_covariance(4);
  const McResults small_run = mc_run(cfg, model, 2000, 11);
  const McResults big_run = mc_run(cfg, model, 8000, 11);
  const double ratio = small_run.gap.std_error / big_run.gap.std_error;
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("sweep on an identity covariance stays inside the bounds") {
  const SystemConfig cfg = small_sweep_config();
  const ChannelModel model = make_identity_covariance(4);
  const SweepResult sweep =
      sweep_training_symbols(cfg, model, {4, 8, 16, 32}, 2000, 7);
  REQUIRE(sweep.points.size() == 4);
  CHECK(sweep.all_sandwich_ok);
  for (const SweepPoint& p : sweep.points) {
    CHECK(p.sandwich_ok);
    CHECK(p.mc.gap.trials + p.mc.skipped == 2000);
  }
  // Gap shrinks along the grid.
  for (std::size_t i = 1; i < sweep.points.size(); ++i) {
    CHECK(sweep.points[i].mc.gap.mean < sweep.points[i - 1].mc.gap.mean);
  }
  CHECK(sweep.fit_window_begin == 2);
  CHECK(sweep.gap_loglog_slope_valid);
  // mmse decay coefficient lands near the analytic slope.
  const AsymptoticCoefficients c = asymptotic_coefficients(cfg, model);
  CHECK(sweep.mmse_coefficient ==
        doctest::Approx(c.mmse_slope).epsilon(0.25));
}

TEST_CASE("gap stays positive at short training lengths") {
  const SystemConfig cfg = small_sweep_config();
  const ChannelModel model = make_identity_covariance(4);
  for (int n : {2, 4, 8}) {  // up to 4x the antenna count
    SystemConfig point = cfg;
    point.training_symbols = n;
    const McResults mc = mc_run(point, model, 3000, 5);
    CHECK(mc.gap.mean - 3.0 * mc.gap.std_error > 0.0);
  }
}

TEST_CASE("sweep validates the training grid") {
  const SystemConfig cfg = small_sweep_config();
  const ChannelModel model = make_identity_covariance(4);
  CHECK_THROWS_AS(sweep_training_symbols(cfg, model, {}, 500, 1), Error);
  CHECK_THROWS_AS(sweep_training_symbols(cfg, model, {4, 4}, 500, 1), Error);
  CHECK_THROWS_AS(sweep_training_symbols(cfg, model, {8, 4}, 500, 1), Error);
  CHECK_THROWS_AS(sweep_training_symbols(cfg, model, {1, 4}, 500, 1),
                  Error);  // below tx_antennas
}

TEST_CASE("a symbols-equal-antennas point keeps only the valid bounds") {
  SystemConfig cfg = small_sweep_config();
  cfg.training_symbols = 2;  // == tx_antennas
  const ChannelModel model = make_identity_covariance(4);
  const McResults mc = mc_run(cfg, model, 500, 3);
  const BoundSet bounds = evaluate_bounds(cfg, model);
  CHECK(bounds.mmse_lo.valid);
  CHECK(!bounds.mmse_hi.valid);
  CHECK(!bounds.source_delta_hi.valid);
  // The one-sided comparison still applies.
  CHECK(mc.mmse.mean + 3.0 * mc.mmse.std_error >= bounds.mmse_lo.value);
}

TEST_CASE("epsilon violations are monitored") {
  SystemConfig cfg = small_sweep_config();
  cfg.training_symbols = 2;
  cfg.epsilon = 0.9;  // condition d_mmse <= 0.1 * d is hard to meet here
  const ChannelModel model = make_identity_covariance(4);
  const McResults mc = mc_run(cfg, model, 500, 3);
  CHECK(mc.epsilon_violation_fraction > 0.5);
  CHECK(mc.source_delta.epsilon_violation_fraction ==
        doctest::Approx(mc.epsilon_violation_fraction));
}

TEST_CASE("end-to-end distortion check hits the budget (scalar)") {
  SystemConfig cfg;
  cfg.tx_antennas = 1;
  cfg.subcarriers = 1;
  cfg.pilot_subcarriers = 1;
  cfg.training_symbols = 1;
  cfg.snr_downlink = 1.0;
  cfg.distortion_budget = 1.0;
  const ChannelModel model = make_identity_covariance(1);
  const McEstimate est = e2e_distortion_check(cfg, model, 20000, 123);
  CHECK(est.skipped == 0);
  CHECK(std::abs(est.mean - 1.0) <= 3.0 * est.std_error);

  // Same seed, same value.
  const McEstimate again = e2e_distortion_check(cfg, model, 20000, 123);
  CHECK(est.mean == again.mean);
}

TEST_CASE("end-to-end distortion lands on the budget for random setups") {
  Rng rng(314);
  for (int rep = 0; rep < 5; ++rep) {
    const testing::RandomInstance inst = testing::make_random_instance(rng);
    // Probe the estimation-distortion distribution so the budget clears the
    // floor on essentially every draw while staying below the total power.
    double worst_floor = 0.0;
    for (int probe = 0; probe < 100; ++probe) {
      const TrialOutcome out =
          mc_trial(inst.cfg, inst.model, 9000 + rep, probe);
      worst_floor = std::max(worst_floor, out.d_mmse);
    }
    SystemConfig cfg = inst.cfg;
    cfg.distortion_budget = std::min(1.3 * worst_floor + 0.05 * inst.model.trace(),
                                     0.9 * inst.model.trace());
    const McEstimate est = e2e_distortion_check(cfg, inst.model, 4000, 1000 + rep);
    CHECK(est.skipped < 400);
    CHECK(std::abs(est.mean - cfg.distortion_budget) <= 3.0 * est.std_error);
  }
}

TEST_CASE("end-to-end check rejects configurations that mostly skip") {
  SystemConfig cfg;
  cfg.tx_antennas = 1;
  cfg.subcarriers = 2;
  cfg.pilot_subcarriers = 2;
  cfg.training_symbols = 1;
  cfg.snr_downlink = 0.1;
  cfg.distortion_budget = 1.0;  // below the typical estimation distortion
  const ChannelModel model = make_identity_covariance(2);
  try {
    e2e_distortion_check(cfg, model, 500, 9);
    FAIL("expected TooManySkipped");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooManySkipped);
  }
}

TEST_CASE("trial failures carry the trial index") {
  // A covariance whose dimension disagrees with the configuration fails
  // fast with a diagnosable message.
  const SystemConfig cfg = small_sweep_config();
  const ChannelModel model = make_identity_covariance(5);
  try {
    mc_run(cfg, model, 500, 77);
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("dimension") != std::string::npos);
  }
}
