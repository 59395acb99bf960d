// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// echo.hpp: synthetic sensing link and grid direction estimator.
//
// Synthesizes the received echo of an extended target — each visible
// subsection reflects a delayed, RCS-weighted copy of the transmit block —
// and estimates the target direction from one observation by a
// concentrated-likelihood search over a fixed candidate grid. Its purpose
// is validation: the empirical estimation error of the simulated link is
// compared against the CRB, never the other way around.

#pragma once

#include <cstdint>
#include <vector>

#include "../core/array.hpp"
#include "../core/crb.hpp"
#include "../core/los.hpp"

namespace isac {

/// Sampling configuration of the synthetic sensing link.
struct SimConfig {
  double sample_rate = 4e8;  ///< complex baseband rate [Hz]
  int num_samples = 256;     ///< observation window length [samples]
  std::uint64_t seed = 0;    ///< master seed for every derived stream
  bool rcs_redraw = true;    ///< fresh RCS draw for every observation

  void validate() const {
    require(sample_rate > 0.0, "sample rate must be positive");
    require(num_samples >= 1, "window must hold at least one sample");
  }
};

/// One synthetic received observation with its generating ground truth.
struct EchoObservation {
  MatC y_s;         ///< N_r x num_samples received baseband samples
  VecC alpha;       ///< RCS draws actually used, one per subsection
  TargetPose pose;  ///< pose the echo was synthesized at
};

/// Per-subsection round-trip delay in whole samples,
/// round(2 d_k / c * sample_rate). Throws kDelayOverflow when a delay
/// falls outside the observation window.
std::vector<int> echo_delays(const LosPartition& partition,
                             const SimConfig& config);

/// Transmit block x = W c with symbols c i.i.d. CN(0,1) per user per
/// sample (uncorrelated users), so the long-run sample covariance of x
/// approaches W W^H. The stream is derived from (seed, observation index).
MatC synthesize_tx(const MatC& W, const SimConfig& config,
                   std::uint64_t observation_index);

/// Noiseless echo for given RCS values:
///   e(:, t) = g sum_k sqrt(l_k) alpha_k b_k a_k^H x(:, t - n_k),
/// columns before a subsection's delay receive no contribution from it.
MatC echo_signal(const MatC& x, const LosPartition& partition,
                 const VecC& alpha, const SensingParams& params,
                 const ArrayGeometry& geometry, const SimConfig& config);

/// Full observation: RCS alpha_k ~ CN(0,1) i.i.d. (redrawn per observation
/// unless rcs_redraw is off, when stream 0 is reused) plus white sensing
/// noise of power sigma_s2 per element. sigma_s2 = 0 yields a noise-free
/// observation.
EchoObservation synthesize_echo(const MatC& x, const LosPartition& partition,
                                const TargetPose& pose,
                                const SensingParams& params,
                                const ArrayGeometry& geometry,
                                const SimConfig& config,
                                std::uint64_t observation_index);

/// Candidate grid for the direction search (inclusive endpoints).
struct DirectionGrid {
  double lo = deg2rad(-8.0);
  double hi = deg2rad(8.0);
  double step = deg2rad(0.05);

  int count() const {
    return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  }
  double at(int i) const { return lo + i * step; }
  void validate() const {
    require(step > 0.0 && hi > lo, "grid needs positive step and span");
  }
};

/// Concentrated-likelihood direction estimator.
///
/// Everything except the target direction is assumed known. For each grid
/// candidate the visible-contour geometry is rebuilt once at construction
/// (the expensive part) and cached; per observation the K subsection gains
/// are fit by least squares — they enter the model linearly — and the
/// candidate with the smallest fit residual wins. Ties keep the lowest
/// candidate, so repeated runs are deterministic.
class DirectionEstimator {
 public:
  DirectionEstimator(const ContourModel& model, const TargetPose& known,
                     int K, const SensingParams& params,
                     const ArrayGeometry& geometry, const SimConfig& config,
                     const DirectionGrid& grid);

  /// Direction estimate for one observation of the transmit block x.
  double estimate(const MatC& x, const MatC& y_s) const;

  int candidates() const { return static_cast<int>(cands_.size()); }
  double candidate_angle(int i) const { return cands_[i].phi; }

 private:
  struct Candidate {
    double phi = 0.0;
    std::vector<int> delay;  ///< per-subsection sample delays
    std::vector<VecC> a;     ///< transmit steering per subsection
    std::vector<VecC> b;     ///< receive steering per subsection
    VecD coef;               ///< g * sqrt(l_k)
  };
  std::vector<Candidate> cands_;
  int num_samples_ = 0;
};

/// One-shot convenience wrapper: build the estimator for a single
/// observation and return its estimate. Monte-Carlo loops should construct
/// DirectionEstimator once and reuse it.
double estimate_direction(const EchoObservation& obs, const MatC& x,
                          const ContourModel& model, const TargetPose& known,
                          int K, const SensingParams& params,
                          const ArrayGeometry& geometry,
                          const SimConfig& config, const DirectionGrid& grid);

}  // namespace isac
