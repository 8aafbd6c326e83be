#include <doctest.h>

#include <cmath>

#include "csifb/pilots.hpp"
#include "test_support.hpp"

using namespace csifb;

namespace {

SystemConfig small_config(int antennas, int subcarriers, int pilots,
                          int symbols, double snr) {
  SystemConfig cfg;
  cfg.tx_antennas = antennas;
  cfg.subcarriers = subcarriers;
  cfg.pilot_subcarriers = pilots;
  cfg.training_symbols = symbols;
  cfg.snr_downlink = snr;
  cfg.distortion_budget = 1.0;
  cfg.epsilon = 0.5;
  return cfg;
}

}  // namespace

TEST_CASE("scalar pilot is a single gaussian draw at full power") {
  const SystemConfig cfg = small_config(1, 1, 1, 1, 4.0);
  Rng rng(3);
  const PilotMatrix pilot = sample_pilot(cfg, rng);
  CHECK(pilot.matrix.rows() == 1);
  CHECK(pilot.matrix.cols() == 1);
  CHECK(pilot.power == doctest::Approx(4.0));

  // Mean squared magnitude over draws matches the full downlink SNR.
  double acc = 0.0;
  Rng rng2(4);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    acc += std::norm(sample_pilot(cfg, rng2).matrix(0, 0));
  }
  CHECK(acc / draws == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("block sparsity pattern is exact") {
  const SystemConfig cfg = small_config(2, 2, 1, 3, 2.0);
  Rng rng(5);
  const PilotMatrix pilot = sample_pilot(cfg, {2}, rng);
  REQUIRE(pilot.matrix.rows() == 4);
  REQUIRE(pilot.matrix.cols() == 3);
  // Subcarrier 1 rows (0,1) are exactly zero; subcarrier 2 rows carry the
  // Gaussian block.
  for (int j = 0; j < 3; ++j) {
    CHECK(pilot.matrix(0, j) == Complex(0.0, 0.0));
    CHECK(pilot.matrix(1, j) == Complex(0.0, 0.0));
    CHECK(pilot.matrix(2, j) != Complex(0.0, 0.0));
    CHECK(pilot.matrix(3, j) != Complex(0.0, 0.0));
  }
}

TEST_CASE("pilot set validation") {
  const SystemConfig cfg = small_config(2, 3, 2, 2, 1.0);
  Rng rng(6);
  try {
    sample_pilot(cfg, {1, 1}, rng);
    FAIL("expected DuplicateSubcarrier");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateSubcarrier);
  }
  try {
    sample_pilot(cfg, {1, 4}, rng);
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexOutOfRange);
  }
  CHECK_THROWS_AS(sample_pilot(cfg, {1, 2, 3}, rng), Error);  // wrong count
}

TEST_CASE("column power meets the transmit constraint in expectation") {
  const SystemConfig cfg = small_config(3, 2, 2, 2, 6.0);
  Rng rng(7);
  double acc = 0.0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const PilotMatrix pilot = sample_pilot(cfg, rng);
    acc += pilot.matrix.col(0).squaredNorm();
  }
  CHECK(acc / draws == doctest::Approx(6.0).epsilon(0.02));
}

TEST_CASE("pilot self-gram expectation and full rank") {
  const SystemConfig cfg = small_config(2, 2, 2, 3, 2.0);
  Rng rng(8);
  Matrix acc = Matrix::Zero(4, 4);
  const int draws = 10000;
  double min_eig = 1e300;
  for (int i = 0; i < draws; ++i) {
    const PilotBlocks blocks =
        sample_pilot_blocks(cfg, default_pilot_set(cfg), rng);
    const Matrix gram = blocks.self_gram(cfg.subcarriers);
    acc += gram;
    if (i < 1000) {
      const Spectrum sp = eigh(gram);
      min_eig = std::min(min_eig, sp.eigenvalues(sp.eigenvalues.size() - 1));
    }
  }
  acc /= draws;
  // E[P P^H] = training_symbols * power * I.
  const double expected = cfg.training_symbols * cfg.pilot_power();
  for (int i = 0; i < 4; ++i) {
    CHECK(acc(i, i).real() == doctest::Approx(expected).epsilon(0.02));
  }
  // Full rank with probability one when symbols >= antennas.
  CHECK(min_eig > 0.0);
}

TEST_CASE("pilot blocks assemble to the same embedded matrix") {
  const SystemConfig cfg = small_config(2, 3, 2, 2, 1.5);
  Rng r1(9), r2(9);
  const PilotBlocks blocks = sample_pilot_blocks(cfg, {1, 3}, r1);
  const PilotMatrix pilot = sample_pilot(cfg, {1, 3}, r2);
  CHECK((blocks.assemble(cfg.subcarriers) - pilot.matrix).norm() == 0.0);
  const Matrix full_gram = pilot.matrix * pilot.matrix.adjoint();
  CHECK((blocks.self_gram(cfg.subcarriers) - full_gram).norm() /
            full_gram.norm() <
        1e-12);
}

TEST_CASE("effective matrix with identity statistics is the pilot itself") {
  const SystemConfig cfg = small_config(2, 2, 2, 2, 1.0);
  const ChannelModel model = make_identity_covariance(4);
  Rng rng(10);
  const PilotMatrix pilot = sample_pilot(cfg, rng);
  const EffectiveMatrix eff = effective_matrix(model, pilot);
  CHECK((eff.matrix - pilot.matrix).norm() < 1e-12);
  CHECK((eff.gram_channel - pilot.matrix * pilot.matrix.adjoint()).norm() <
        1e-10);
}

TEST_CASE("channel-side and observation-side grams share nonzero spectrum") {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const testing::RandomInstance inst = testing::make_random_instance(rng);
    const Spectrum big = eigh(inst.eff.gram_channel);
    const Spectrum small = eigh(inst.eff.observation_gram());
    REQUIRE(big.rank == small.rank);
    for (Index i = 0; i < big.rank; ++i) {
      CHECK(big.eigenvalues(i) ==
            doctest::Approx(small.eigenvalues(i)).epsilon(1e-9));
    }
  }
}

TEST_CASE("effective matrix rejects dimension mismatches") {
  const SystemConfig cfg = small_config(2, 2, 2, 2, 1.0);
  const ChannelModel model = make_identity_covariance(6);
  Rng rng(12);
  const PilotMatrix pilot = sample_pilot(cfg, rng);
  CHECK_THROWS_AS(effective_matrix(model, pilot), Error);
}

TEST_CASE("training observation statistics") {
  // Zero pilot: the observation is pure unit-variance noise.
  const SystemConfig cfg = small_config(1, 1, 1, 1, 1.0);
  const ChannelModel model = make_identity_covariance(1);
  PilotMatrix zero;
  zero.matrix = Matrix::Zero(1, 1);
  zero.pilot_set = {1};
  zero.power = 1.0;
  zero.tx_antennas = zero.training_symbols = zero.subcarriers = 1;

  Rng rng(13);
  double acc = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    acc += sample_training(model, zero, rng).observation.squaredNorm();
  }
  CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.02));

  // Unit pilot entry: observation variance is |pilot|^2 + 1 = 2.
  PilotMatrix unit = zero;
  unit.matrix(0, 0) = Complex(1.0, 0.0);
  Rng rng2(14);
  acc = 0.0;
  for (int i = 0; i < draws; ++i) {
    acc += sample_training(model, unit, rng2).observation.squaredNorm();
  }
  CHECK(acc / draws == doctest::Approx(2.0).epsilon(0.02));
  (void)cfg;
}

TEST_CASE("training sample is reproducible") {
  const SystemConfig cfg = small_config(2, 2, 2, 2, 2.0);
  const ChannelModel model = make_kronecker_covariance(2, 2, 0.4, 0.2);
  Rng r1(15), r2(15);
  const PilotMatrix p1 = sample_pilot(cfg, r1);
  const PilotMatrix p2 = sample_pilot(cfg, r2);
  const TrainingSample s1 = sample_training(model, p1, r1);
  const TrainingSample s2 = sample_training(model, p2, r2);
  CHECK((s1.channel - s2.channel).norm() == 0.0);
  CHECK((s1.observation - s2.observation).norm() == 0.0);
}
