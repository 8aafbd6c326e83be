#include <doctest.h>

#include <cmath>

#include "csifb/estimation.hpp"
#include "test_support.hpp"

using namespace csifb;

namespace {

PilotMatrix manual_pilot(Matrix m, int antennas, int symbols, int subcarriers) {
  PilotMatrix pilot;
  pilot.matrix = std::move(m);
  pilot.pilot_set.resize(pilot.matrix.cols() / symbols);
  for (std::size_t b = 0; b < pilot.pilot_set.size(); ++b) {
    pilot.pilot_set[b] = static_cast<int>(b) + 1;
  }
  pilot.power = 1.0;
  pilot.tx_antennas = antennas;
  pilot.training_symbols = symbols;
  pilot.subcarriers = subcarriers;
  return pilot;
}

}  // namespace

TEST_CASE("scalar estimator with unit pilot") {
  const ChannelModel model = make_identity_covariance(1);
  const PilotMatrix pilot =
      manual_pilot(Matrix::Constant(1, 1, Complex(1.0, 0.0)), 1, 1, 1);
  const EffectiveMatrix eff = effective_matrix(model, pilot);
  const MmseResult est = mmse(model, eff, pilot);

  CHECK(est.est_cov(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(est.d_mmse == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(est.d_mmse_trace_form == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(est.consistent);
  CHECK(est.estimate_rank == 1);

  // Filter arithmetic: S = 1 * (1 + 1)^{-1} * Y^H.
  Vector obs(1);
  obs(0) = Complex(2.0, 0.0);
  const Vector s = estimate(est, obs);
  CHECK(s(0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(estimate(est, Vector::Zero(1)).norm() == 0.0);
}

TEST_CASE("zero pilot yields a zero estimate and full distortion") {
  const ChannelModel model = make_kronecker_covariance(2, 2, 0.5, 0.2);
  const PilotMatrix pilot = manual_pilot(Matrix::Zero(4, 2), 2, 1, 2);
  const EffectiveMatrix eff = effective_matrix(model, pilot);
  const MmseResult est = mmse(model, eff, pilot);
  CHECK(est.est_cov.norm() == doctest::Approx(0.0));
  CHECK(est.d_mmse == doctest::Approx(model.trace()).epsilon(1e-12));
  CHECK(est.estimate_rank == 0);
  CHECK(est.filter.norm() == 0.0);  // (cov - 0) times the zero pilot
}

TEST_CASE("isotropic case matches the closed form") {
  // cov = I_N and A A^H = alpha I give d_mmse = N / (1 + alpha).
  const double alpha = 3.0;
  const ChannelModel model = make_identity_covariance(2);
  Matrix p = std::sqrt(alpha) * Matrix::Identity(2, 2);
  const PilotMatrix pilot = manual_pilot(std::move(p), 2, 2, 1);
  const EffectiveMatrix eff = effective_matrix(model, pilot);
  const MmseResult est = mmse(model, eff, pilot);
  CHECK(est.d_mmse == doctest::Approx(2.0 / (1.0 + alpha)).epsilon(1e-12));
}

TEST_CASE("production filter equals the observation-side solve") {
  Rng rng(21);
  for (int rep = 0; rep < 12; ++rep) {
    const testing::RandomInstance inst = testing::make_random_instance(rng);
    const Index n0 = inst.pilot.matrix.cols();
    // Direct route: cov P (P^H cov P + I)^{-1}, solved at n0 x n0.
    const Matrix inner = inst.pilot.matrix.adjoint() * inst.model.cov *
                             inst.pilot.matrix +
                         Matrix::Identity(n0, n0);
    const Matrix direct =
        inst.model.cov * inst.pilot.matrix * inner.inverse();
    CHECK((inst.est.filter - direct).norm() /
              std::max(direct.norm(), 1e-300) <
          1e-10);
  }
}

TEST_CASE("woodbury identity chain holds on random instances") {
  Rng rng(22);
  for (int rep = 0; rep < 12; ++rep) {
    const testing::RandomInstance inst = testing::make_random_instance(rng);
    const Matrix& a = inst.eff.matrix;
    const Index n = a.rows();
    const Index n0 = a.cols();
    const Matrix small_solve =
        a * (a.adjoint() * a + Matrix::Identity(n0, n0)).inverse() *
        a.adjoint();
    const Matrix big = Matrix::Identity(n, n) + inst.eff.gram_channel;
    const Matrix via_big = big.inverse() * inst.eff.gram_channel;
    const Matrix via_complement = Matrix::Identity(n, n) - big.inverse();

    const double scale = std::max(small_solve.norm(), 1e-300);
    CHECK((small_solve - via_big).norm() / scale < 1e-10);
    CHECK((small_solve - via_complement).norm() / scale < 1e-10);

    // Estimate covariance written with the observation-side solve.
    const Matrix est_direct =
        inst.model.sqrt_cov * small_solve * inst.model.sqrt_cov;
    CHECK((inst.est.est_cov - est_direct).norm() /
              std::max(est_direct.norm(), 1e-300) <
          1e-10);
  }
}

TEST_CASE("distortion bookkeeping is internally consistent") {
  Rng rng(23);
  for (int rep = 0; rep < 12; ++rep) {
    const testing::RandomInstance inst = testing::make_random_instance(rng);
    CHECK(inst.est.consistent);
    // err_cov is PSD and its trace is the reported distortion.
    const Spectrum err = eigh(inst.est.err_cov);
    CHECK(err.eigenvalues.minCoeff() >= 0.0);
    CHECK(inst.est.d_mmse ==
          doctest::Approx(err.trace()).epsilon(1e-10));
    // est_cov never exceeds the prior covariance.
    const Matrix slack = inst.model.cov - inst.est.est_cov;
    const Spectrum slack_sp = eigh(0.5 * (slack + Matrix(slack.adjoint())));
    CHECK(slack_sp.eigenvalues.minCoeff() >= -1e-12);
  }
}

TEST_CASE("more pilot power cannot hurt the estimate") {
  Rng rng(24);
  for (int rep = 0; rep < 8; ++rep) {
    const testing::RandomInstance inst = testing::make_random_instance(rng);
    for (double scale : {1.0, 1.5, 3.0}) {
      PilotMatrix boosted = inst.pilot;
      boosted.matrix *= scale;
      const EffectiveMatrix eff = effective_matrix(inst.model, boosted);
      const MmseCovariances est = mmse_covariances(inst.model, eff.gram_channel);
      CHECK(est.d_mmse <= inst.est.d_mmse * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("estimator is unbiased for the distortion it reports") {
  Rng rng(25);
  const testing::RandomInstance inst = testing::make_random_instance(rng);
  const int trials = 10000;
  std::vector<double> sq_err;
  Matrix cross = Matrix::Zero(inst.model.dim(), inst.model.dim());
  Rng draw(26);
  for (int i = 0; i < trials; ++i) {
    const TrainingSample round = sample_training(inst.model, inst.pilot, draw);
    const Vector s = estimate(inst.est, round.observation);
    const Vector err = round.channel - s;
    sq_err.push_back(err.squaredNorm());
    cross += s * err.adjoint();
  }
  const SampleStats stats = summarize(sq_err);
  CHECK(std::abs(stats.mean - inst.est.d_mmse) <= 3.0 * stats.std_error);
  // Orthogonality of the estimate and its error.
  CHECK((cross / trials).norm() /
            std::max(inst.est.d_mmse, 1e-12) <
        0.08);
}

TEST_CASE("entropies of reference cases") {
  // Identity prior: h(H) = N log(pi e).
  const ChannelModel id4 = make_identity_covariance(4);
  const PilotMatrix zero = manual_pilot(Matrix::Zero(4, 2), 2, 1, 2);
  const EffectiveMatrix eff0 = effective_matrix(id4, zero);
  const MmseResult est0 = mmse(id4, eff0, zero);
  const EntropySet ent0 = entropies(id4, eff0, est0);
  CHECK(ent0.h_channel == doctest::Approx(4.0 * kLogPiE).epsilon(1e-12));
  CHECK(ent0.rank_training == 2);
  CHECK(ent0.rank_training_noiseless == 0);
  CHECK(ent0.h_training == doctest::Approx(2.0 * kLogPiE).epsilon(1e-12));
  CHECK(ent0.h_training_noiseless == doctest::Approx(0.0));

  // Scalar with |pilot|^2 = 1: noisy entropy log(pi e) + log 2, noiseless
  // log(pi e); their difference is log 2.
  const ChannelModel id1 = make_identity_covariance(1);
  const PilotMatrix unit =
      manual_pilot(Matrix::Constant(1, 1, Complex(1.0, 0.0)), 1, 1, 1);
  const EffectiveMatrix eff1 = effective_matrix(id1, unit);
  const MmseResult est1 = mmse(id1, eff1, unit);
  const EntropySet ent1 = entropies(id1, eff1, est1);
  CHECK(ent1.h_training ==
        doctest::Approx(kLogPiE + std::log(2.0)).epsilon(1e-12));
  CHECK(ent1.h_training_noiseless == doctest::Approx(kLogPiE).epsilon(1e-12));
}

TEST_CASE("entropy identities on random full-rank instances") {
  Rng rng(27);
  for (int rep = 0; rep < 12; ++rep) {
    const testing::RandomInstance inst = testing::make_random_instance(rng);
    const EntropySet ent = entropies(inst.model, inst.eff, inst.est);
    REQUIRE(ent.rank_estimate == inst.model.dim());  // full rank a.s.

    // Spectral form of the estimate-vs-channel entropy gap.
    const Spectrum gram = eigh(inst.eff.gram_channel);
    double direct = 0.0;
    for (Index i = 0; i < gram.rank; ++i) {
      direct += std::log(gram.eigenvalues(i)) -
                std::log1p(gram.eigenvalues(i));
    }
    for (Index i = gram.rank; i < gram.eigenvalues.size(); ++i) {
      direct -= std::log1p(gram.eigenvalues(i));
    }
    CHECK(ent.h_estimate - ent.h_channel ==
          doctest::Approx(direct).epsilon(1e-9));

    // Noisy-minus-noiseless training gap equals the same quantity once the
    // support terms are accounted for.
    const double support =
        static_cast<double>(ent.rank_training - ent.rank_training_noiseless) *
        kLogPiE;
    CHECK(ent.h_estimate - ent.h_channel ==
          doctest::Approx(ent.h_training_noiseless - ent.h_training + support)
              .epsilon(1e-9));
  }
}

TEST_CASE("entropies agree with the observation-side covariance route") {
  // The production path works on the channel-side Gram spectrum; the
  // defining covariances live on the observation side. Both must agree.
  Rng rng(29);
  for (int rep = 0; rep < 6; ++rep) {
    const testing::RandomInstance inst = testing::make_random_instance(rng);
    const EntropySet ent = entropies(inst.model, inst.eff, inst.est);
    const Matrix obs_gram = inst.eff.observation_gram();
    const Index n0 = obs_gram.rows();
    const double h_noisy =
        static_cast<double>(n0) * kLogPiE +
        pseudo_logdet(Matrix(obs_gram + Matrix::Identity(n0, n0)));
    const Spectrum obs_sp = eigh(obs_gram);
    const double h_clean =
        static_cast<double>(obs_sp.rank) * kLogPiE + pseudo_logdet(obs_sp);
    CHECK(ent.h_training == doctest::Approx(h_noisy).epsilon(1e-10));
    CHECK(ent.h_training_noiseless ==
          doctest::Approx(h_clean).epsilon(1e-10));
    CHECK(ent.rank_training_noiseless == obs_sp.rank);
  }
}

TEST_CASE("entropy identity is literal for square pilot blocks") {
  // With training_symbols == tx_antennas the observation and channel
  // dimensions agree and no support correction is needed.
  Rng rng(28);
  SystemConfig cfg;
  cfg.tx_antennas = 2;
  cfg.subcarriers = 3;
  cfg.pilot_subcarriers = 3;
  cfg.training_symbols = 2;
  cfg.snr_downlink = 5.0;
  cfg.distortion_budget = 1.0;
  const ChannelModel model = make_kronecker_covariance(2, 3, 0.4, 0.3);
  const PilotMatrix pilot = sample_pilot(cfg, rng);
  const EffectiveMatrix eff = effective_matrix(model, pilot);
  const MmseResult est = mmse(model, eff, pilot);
  const EntropySet ent = entropies(model, eff, est);
  REQUIRE(ent.rank_training == ent.rank_training_noiseless);
  CHECK(ent.h_estimate - ent.h_channel ==
        doctest::Approx(ent.h_training_noiseless - ent.h_training)
            .epsilon(1e-9));
  // Adding receiver noise cannot reduce the entropy at equal rank.
  CHECK(ent.h_training >= ent.h_training_noiseless);
}

TEST_CASE("estimate rejects observations of the wrong length") {
  const ChannelModel model = make_identity_covariance(1);
  const PilotMatrix unit =
      manual_pilot(Matrix::Constant(1, 1, Complex(1.0, 0.0)), 1, 1, 1);
  const MmseResult est = mmse(model, effective_matrix(model, unit), unit);
  CHECK_THROWS_AS(estimate(est, Vector::Zero(3)), Error);
}
