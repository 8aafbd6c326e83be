#pragma once

#include <utility>
#include <vector>

#include "csifb/channel.hpp"

namespace csifb {

/// Gaussian-ensemble pilot matrix. The full matrix is N x n0 and block
/// sparse: the columns of pilot block b are nonzero only in the antenna
/// rows of subcarrier pilot_set[b]; all other entries are exactly zero.
struct PilotMatrix {
  Matrix matrix;              // N x n0
  std::vector<int> pilot_set; // 1-based subcarrier indices, one per block
  double power = 0.0;         // per-entry variance p = snr / tx_antennas
  int tx_antennas = 0;
  int training_symbols = 0;
  int subcarriers = 0;
};

/// Pilot blocks without the zero embedding; enough to form PP^H cheaply.
struct PilotBlocks {
  std::vector<Matrix> blocks; // one tx_antennas x training_symbols block each
  std::vector<int> pilot_set; // 1-based subcarrier indices
  double power = 0.0;
  int tx_antennas = 0;
  int training_symbols = 0;

  /// Full N x n0 pilot matrix with the block-sparse embedding.
  Matrix assemble(int subcarriers) const;
  /// PP^H: block diagonal N x N, zero on unpiloted subcarriers.
  Matrix self_gram(int subcarriers) const;
};

/// Draw the pilot blocks: i.i.d. CN(0, power) entries, blocks independent.
/// pilot_set entries must be distinct and within [1, subcarriers].
PilotBlocks sample_pilot_blocks(const SystemConfig& cfg,
                                const std::vector<int>& pilot_set, Rng& rng);

PilotMatrix sample_pilot(const SystemConfig& cfg,
                         const std::vector<int>& pilot_set, Rng& rng);
/// Default pilot placement: subcarriers 1..pilot_subcarriers.
PilotMatrix sample_pilot(const SystemConfig& cfg, Rng& rng);
std::vector<int> default_pilot_set(const SystemConfig& cfg);

/// Pilot shaped by the channel statistics, A = cov^{1/2} P, together with
/// the channel-side Gram matrix A A^H. The observation-side Gram A^H A
/// shares its nonzero eigenvalues and is formed on demand (it is n0 x n0
/// and only needed for diagnostics and cross-checks).
struct EffectiveMatrix {
  Matrix matrix;        // A, N x n0
  Matrix gram_channel;  // A A^H, N x N, re-symmetrized

  Matrix observation_gram() const;  // A^H A, n0 x n0, re-symmetrized
};

EffectiveMatrix effective_matrix(const ChannelModel& model,
                                 const PilotMatrix& pilot);

/// One training round: channel realization plus the received observation.
/// `observation` holds the conjugate transpose of the received row vector,
/// i.e. observation = P^H H + w with w ~ CN(0, I).
struct TrainingSample {
  Vector channel;      // H, length N
  Vector observation;  // Y^H, length n0
};

TrainingSample sample_training(const ChannelModel& model,
                               const PilotMatrix& pilot, Rng& rng);

}  // namespace csifb
