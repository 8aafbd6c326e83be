#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "csifb/config.hpp"
#include "csifb/matrix_io.hpp"
#include "csifb/report.hpp"
#include "test_support.hpp"

using namespace csifb;

TEST_CASE("full config parses with dB conversion and defaults") {
  const char* text = R"(
# sample experiment
antennas = 4
subcarriers = 8
snr_db = 20
distortion = 3.5
training_grid = 8, 16, 32
covariance = three-tier
out_dir = results
)";
  const ExperimentConfig cfg = parse_config_text(text, "sample");
  CHECK(cfg.system.tx_antennas == 4);
  CHECK(cfg.system.subcarriers == 8);
  CHECK(cfg.system.pilot_subcarriers == 8);  // defaults to all subcarriers
  CHECK(cfg.system.snr_downlink == doctest::Approx(100.0));  // 20 dB
  CHECK(cfg.system.training_symbols == 8);  // grid front
  CHECK(cfg.system.epsilon == doctest::Approx(0.5));
  CHECK(cfg.training_grid == std::vector<int>{8, 16, 32});
  CHECK(cfg.trials == 10000);
  CHECK(cfg.seed == 42);
  CHECK(cfg.out_dir == "results");
  CHECK(cfg.cov_kind == CovarianceKind::ThreeTier);
  CHECK(!cfg.rate_in_bits);
  CHECK(rate_scale(cfg) == doctest::Approx(1.0));
}

TEST_CASE("config parser reports precise errors") {
  auto expect_parse_error = [](const char* text, const char* needle) {
    try {
      parse_config_text(text, "cfg");
      FAIL_CHECK("expected a parse error for: " << text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  expect_parse_error("antennas = 1\nwidgets = 3\n", "cfg:2: unknown key");
  expect_parse_error("antennas = 1\nantennas = 2\n", "duplicate key");
  expect_parse_error("antennas = one\n", "expected an integer");
  expect_parse_error("antennas = 1\nsubcarriers = 2\nsnr_db = 0\n"
                     "distortion = 1\ntraining_symbols = 1\n"
                     "pilot_subcarriers = 3\n",
                     "pilot_subcarriers");
  expect_parse_error("antennas = 1\n", "missing required key");
  expect_parse_error(
      "antennas = 1\nsubcarriers = 1\nsnr_db = 0\ndistortion = 1\n",
      "training_symbols");
  expect_parse_error("antennas = 1\nsubcarriers = 1\nsnr_db = 0\n"
                     "distortion = 1\ntraining_grid = 8,4\n",
                     "strictly increasing");
  expect_parse_error("antennas = 1\nsubcarriers = 1\nsnr_db = 0\n"
                     "distortion = 1\ntraining_symbols = 1\nrate_unit = dB\n",
                     "rate_unit");
  expect_parse_error("antennas = 1\nsubcarriers = 1\nsnr_db = 0\n"
                     "distortion = 1\ntraining_symbols = 1\n"
                     "covariance = file\n",
                     "cov_file");
}

TEST_CASE("bits flag scales reported rates") {
  const char* text =
      "antennas = 1\nsubcarriers = 1\nsnr_db = 0\ndistortion = 1\n"
      "training_symbols = 1\nrate_unit = bits\n";
  const ExperimentConfig cfg = parse_config_text(text);
  CHECK(cfg.rate_in_bits);
  CHECK(rate_scale(cfg) == doctest::Approx(1.0 / 0.6931471805599453));
}

TEST_CASE("covariance kinds are buildable from the config") {
  ExperimentConfig cfg = parse_config_text(
      "antennas = 2\nsubcarriers = 2\nsnr_db = 0\ndistortion = 1\n"
      "training_symbols = 2\ncovariance = kronecker\nrho_spatial = 0.5\n"
      "rho_freq = 0.25\n");
  const ChannelModel kron = build_covariance(cfg);
  CHECK(kron.dim() == 4);
  CHECK(kron.cov(0, 1).real() == doctest::Approx(0.5));

  cfg = parse_config_text(
      "antennas = 2\nsubcarriers = 3\nsnr_db = 0\ndistortion = 1\n"
      "training_symbols = 2\ncovariance = three-tier\ntier_trace = 12\n");
  const ChannelModel tier = build_covariance(cfg);
  CHECK(tier.trace() == doctest::Approx(12.0));

  // File-backed covariance round-trips through the text format.
  const std::string path =
      (std::filesystem::temp_directory_path() / "csifb_cfg_cov.txt").string();
  save_matrix_text(tier.cov, path);
  cfg = parse_config_text(
      "antennas = 2\nsubcarriers = 3\nsnr_db = 0\ndistortion = 1\n"
      "training_symbols = 2\ncovariance = file\ncov_file = " + path + "\n");
  const ChannelModel loaded = build_covariance(cfg);
  CHECK((loaded.cov - tier.cov).norm() == 0.0);
  std::filesystem::remove(path);

  // Dimension mismatch between file and config is rejected.
  cfg.system.subcarriers = 2;
  cfg.system.pilot_subcarriers = 2;
  CHECK_THROWS_AS(build_covariance(cfg), Error);
}

TEST_CASE("sweep csv schema is stable and deterministic") {
  SystemConfig sys;
  sys.tx_antennas = 2;
  sys.subcarriers = 2;
  sys.pilot_subcarriers = 2;
  sys.training_symbols = 4;
  sys.snr_downlink = 4.0;
  sys.distortion_budget = 2.0;
  const ChannelModel model = make_identity_covariance(4);
  const SweepResult sweep =
      sweep_training_symbols(sys, model, {4, 8}, 200, 21);

  const std::string csv = sweep_csv(sweep);
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header ==
        "training_symbols,source_delta_mean,source_delta_stderr,mmse_mean,"
        "mmse_stderr,distortion_delta_mean,distortion_delta_stderr,total_mean,"
        "total_stderr,gap_mean,gap_stderr,source_delta_lo,source_delta_hi,"
        "mmse_lo,mmse_hi,distortion_delta_lo,distortion_delta_hi,overall_lo,"
        "overall_hi,direct_rate,skipped,epsilon_violation_fraction,"
        "extended_fraction,sandwich_ok");
  // One row per grid point plus the header.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  // Byte-identical on a rerun with the same seed.
  const SweepResult again =
      sweep_training_symbols(sys, model, {4, 8}, 200, 21);
  CHECK(sweep_csv(again) == csv);

  // Invalid bounds appear as nan (symbols == antennas at the first point).
  SystemConfig tight = sys;
  const SweepResult edge =
      sweep_training_symbols(tight, model, {2, 4}, 200, 21);
  const std::string edge_csv = sweep_csv(edge);
  CHECK(edge_csv.find("nan") != std::string::npos);

  const std::string svg = sweep_svg(sweep);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(sweep_svg(again) == svg);
}
