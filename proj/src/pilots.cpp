#include "csifb/pilots.hpp"

#include <numeric>
#include <set>
#include <sstream>

namespace csifb {

namespace {

void check_pilot_set(const std::vector<int>& pilot_set, int subcarriers,
                     int expected_size) {
  if (static_cast<int>(pilot_set.size()) != expected_size) {
    std::ostringstream oss;
    oss << "pilot set has " << pilot_set.size() << " entries, expected "
        << expected_size;
    raise(ErrorCode::InvalidArgument, oss.str());
  }
  std::set<int> seen;
  for (int s : pilot_set) {
    if (s < 1 || s > subcarriers) {
      std::ostringstream oss;
      oss << "pilot subcarrier " << s << " outside [1, " << subcarriers << "]";
      raise(ErrorCode::IndexOutOfRange, oss.str());
    }
    if (!seen.insert(s).second) {
      std::ostringstream oss;
      oss << "pilot subcarrier " << s << " listed twice";
      raise(ErrorCode::DuplicateSubcarrier, oss.str());
    }
  }
}

}  // namespace

std::vector<int> default_pilot_set(const SystemConfig& cfg) {
  std::vector<int> set(cfg.pilot_subcarriers);
  std::iota(set.begin(), set.end(), 1);
  return set;
}

PilotBlocks sample_pilot_blocks(const SystemConfig& cfg,
                                const std::vector<int>& pilot_set, Rng& rng) {
  cfg.validate();
  check_pilot_set(pilot_set, cfg.subcarriers, cfg.pilot_subcarriers);

  PilotBlocks blocks;
  blocks.pilot_set = pilot_set;
  blocks.power = cfg.pilot_power();
  blocks.tx_antennas = cfg.tx_antennas;
  blocks.training_symbols = cfg.training_symbols;
  blocks.blocks.reserve(pilot_set.size());
  for (std::size_t b = 0; b < pilot_set.size(); ++b) {
    Matrix block(cfg.tx_antennas, cfg.training_symbols);
    for (int col = 0; col < cfg.training_symbols; ++col) {
      for (int row = 0; row < cfg.tx_antennas; ++row) {
        block(row, col) = rng.complex_gaussian(blocks.power);
      }
    }
    blocks.blocks.push_back(std::move(block));
  }
  return blocks;
}

Matrix PilotBlocks::assemble(int subcarriers) const {
  const int n = tx_antennas * subcarriers;
  const int n0 = training_symbols * static_cast<int>(blocks.size());
  Matrix full = Matrix::Zero(n, n0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const int row0 = (pilot_set[b] - 1) * tx_antennas;
    const int col0 = static_cast<int>(b) * training_symbols;
    full.block(row0, col0, tx_antennas, training_symbols) = blocks[b];
  }
  return full;
}

Matrix PilotBlocks::self_gram(int subcarriers) const {
  const int n = tx_antennas * subcarriers;
  Matrix gram = Matrix::Zero(n, n);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const int row0 = (pilot_set[b] - 1) * tx_antennas;
    Matrix w = blocks[b] * blocks[b].adjoint();
    gram.block(row0, row0, tx_antennas, tx_antennas) =
        0.5 * (w + Matrix(w.adjoint()));
  }
  return gram;
}

PilotMatrix sample_pilot(const SystemConfig& cfg,
                         const std::vector<int>& pilot_set, Rng& rng) {
  PilotBlocks blocks = sample_pilot_blocks(cfg, pilot_set, rng);
  PilotMatrix pilot;
  pilot.matrix = blocks.assemble(cfg.subcarriers);
  pilot.pilot_set = std::move(blocks.pilot_set);
  pilot.power = blocks.power;
  pilot.tx_antennas = cfg.tx_antennas;
  pilot.training_symbols = cfg.training_symbols;
  pilot.subcarriers = cfg.subcarriers;
  return pilot;
}

PilotMatrix sample_pilot(const SystemConfig& cfg, Rng& rng) {
  return sample_pilot(cfg, default_pilot_set(cfg), rng);
}

Matrix EffectiveMatrix::observation_gram() const {
  Matrix gram = matrix.adjoint() * matrix;
  return 0.5 * (gram + Matrix(gram.adjoint()));
}

EffectiveMatrix effective_matrix(const ChannelModel& model,
                                 const PilotMatrix& pilot) {
  if (model.dim() != pilot.matrix.rows()) {
    std::ostringstream oss;
    oss << "effective_matrix: model dimension " << model.dim()
        << " != pilot rows " << pilot.matrix.rows();
    raise(ErrorCode::DimensionMismatch, oss.str());
  }
  EffectiveMatrix eff;
  eff.matrix = model.sqrt_cov * pilot.matrix;
  Matrix gram = eff.matrix * eff.matrix.adjoint();
  eff.gram_channel = 0.5 * (gram + Matrix(gram.adjoint()));
  return eff;
}

TrainingSample sample_training(const ChannelModel& model,
                               const PilotMatrix& pilot, Rng& rng) {
  if (model.dim() != pilot.matrix.rows()) {
    raise(ErrorCode::DimensionMismatch,
          "sample_training: model/pilot dimension mismatch");
  }
  TrainingSample sample;
  sample.channel = sample_channel(model, rng);
  const Index n0 = pilot.matrix.cols();
  sample.observation =
      pilot.matrix.adjoint() * sample.channel +
      rng.complex_gaussian_vector(n0, 1.0);
  return sample;
}

}  // namespace csifb
