// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// echo.cpp: synthetic sensing link and grid direction estimator.

#include "echo.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "../core/rng.hpp"

namespace isac {

std::vector<int> echo_delays(const LosPartition& partition,
                             const SimConfig& config) {
  config.validate();
  std::vector<int> delays;
  delays.reserve(partition.subsections.size());
  for (const auto& sub : partition.subsections) {
    const double exact = 2.0 * sub.d_k / kSpeedOfLight * config.sample_rate;
    const int n = static_cast<int>(std::llround(exact));
    if (n >= config.num_samples)
      fail(ErrorCode::kDelayOverflow,
           "echo delay " + std::to_string(n) +
               " samples exceeds the observation window of " +
               std::to_string(config.num_samples));
    delays.push_back(n);
  }
  return delays;
}

MatC synthesize_tx(const MatC& W, const SimConfig& config,
                   std::uint64_t observation_index) {
  config.validate();
  require(W.size() > 0, "beamformer matrix must be non-empty");
  Rng rng(config.seed, "tx-symbols", observation_index);
  const MatC c =
      rng.cgaussian_matrix(static_cast<int>(W.cols()), config.num_samples);
  return W * c;
}

MatC echo_signal(const MatC& x, const LosPartition& partition,
                 const VecC& alpha, const SensingParams& params,
                 const ArrayGeometry& geometry, const SimConfig& config) {
  const int K = static_cast<int>(partition.subsections.size());
  const int T = config.num_samples;
  require(x.rows() == geometry.N_t && x.cols() == T,
          "transmit block shape does not match the array and window");
  require(alpha.size() == K, "one RCS value per subsection required");
  const std::vector<int> delays = echo_delays(partition, config);

  MatC e = MatC::Zero(geometry.N_r, T);
  for (int k = 0; k < K; ++k) {
    const auto& sub = partition.subsections[k];
    const VecC a = steer_tx(geometry, sub.phi_k);
    const VecC b = steer_rx(geometry, sub.phi_k);
    const cd weight = params.g * std::sqrt(sub.l_k) * alpha[k];
    const Eigen::RowVectorXcd s = a.adjoint() * x;  // per-sample scalar a^H x
    const int len = T - delays[k];
    e.block(0, delays[k], geometry.N_r, len).noalias() +=
        weight * b * s.head(len);
  }
  return e;
}

EchoObservation synthesize_echo(const MatC& x, const LosPartition& partition,
                                const TargetPose& pose,
                                const SensingParams& params,
                                const ArrayGeometry& geometry,
                                const SimConfig& config,
                                std::uint64_t observation_index) {
  require(params.sigma_s2 >= 0.0, "noise power must be nonnegative");
  const int K = static_cast<int>(partition.subsections.size());

  EchoObservation obs;
  obs.pose = pose;
  Rng rcs(config.seed, "echo-rcs",
          config.rcs_redraw ? observation_index : 0);
  obs.alpha = rcs.cgaussian_vector(K);
  obs.y_s = echo_signal(x, partition, obs.alpha, params, geometry, config);
  if (params.sigma_s2 > 0.0) {
    Rng noise(config.seed, "echo-noise", observation_index);
    obs.y_s += std::sqrt(params.sigma_s2) *
               noise.cgaussian_matrix(geometry.N_r, config.num_samples);
  }
  return obs;
}

DirectionEstimator::DirectionEstimator(const ContourModel& model,
                                       const TargetPose& known, int K,
                                       const SensingParams& params,
                                       const ArrayGeometry& geometry,
                                       const SimConfig& config,
                                       const DirectionGrid& grid)
    : num_samples_(config.num_samples) {
  grid.validate();
  config.validate();
  const int n = grid.count();
  cands_.reserve(n);
  for (int i = 0; i < n; ++i) {
    TargetPose cand_pose = known;
    cand_pose.phi_o = grid.at(i);
    const LosPartition part = compute_los_partition(model, cand_pose, K);
    Candidate cand;
    cand.phi = cand_pose.phi_o;
    cand.delay = echo_delays(part, config);
    cand.coef.resize(K);
    for (int k = 0; k < K; ++k) {
      const auto& sub = part.subsections[k];
      cand.a.push_back(steer_tx(geometry, sub.phi_k));
      cand.b.push_back(steer_rx(geometry, sub.phi_k));
      cand.coef[k] = params.g * std::sqrt(sub.l_k);
    }
    cands_.push_back(std::move(cand));
  }
}

double DirectionEstimator::estimate(const MatC& x, const MatC& y_s) const {
  const int T = num_samples_;
  require(x.cols() == T && y_s.cols() == T,
          "observation window does not match the estimator configuration");

  double best_fit = -std::numeric_limits<double>::infinity();
  double best_phi = cands_.front().phi;

  for (const Candidate& cand : cands_) {
    const int K = static_cast<int>(cand.a.size());
    // Per-subsection scalar sequences s_k = a_k^H x; the model column t is
    // sum_k coef_k alpha_k b_k s_k(t - n_k), linear in the gains alpha.
    std::vector<Eigen::RowVectorXcd> s(K);
    for (int k = 0; k < K; ++k) s[k] = cand.a[k].adjoint() * x;

    // Normal equations of the least-squares gain fit. Entries reduce to
    // scalar correlations because each regressor is (shifted sequence) x
    // (fixed receive steering).
    MatC gram(K, K);
    VecC rhs(K);
    for (int i = 0; i < K; ++i) {
      for (int j = 0; j <= i; ++j) {
        const int start = std::max(cand.delay[i], cand.delay[j]);
        const int len = T - start;
        const cd corr = s[i]
                            .segment(start - cand.delay[i], len)
                            .conjugate()
                            .cwiseProduct(
                                s[j].segment(start - cand.delay[j], len))
                            .sum();
        gram(i, j) = cand.coef[i] * cand.coef[j] *
                     cand.b[i].dot(cand.b[j]) * corr;
        gram(j, i) = std::conj(gram(i, j));
      }
      const Eigen::RowVectorXcd proj = cand.b[i].adjoint() * y_s;
      const int len = T - cand.delay[i];
      rhs[i] = cand.coef[i] * s[i]
                                  .head(len)
                                  .conjugate()
                                  .cwiseProduct(proj.tail(len))
                                  .sum();
    }

    // A hair of ridge keeps near-collinear subsections (adjacent angles lit
    // by the same waveform) from blowing up the solve; it is far below any
    // candidate-separating residual difference.
    gram.diagonal().array() += 1e-12 * gram.diagonal().real().maxCoeff();
    const VecC alpha = gram.ldlt().solve(rhs);
    const double fit = rhs.dot(alpha).real();  // ||y||^2 - residual^2
    if (std::isfinite(fit) && fit > best_fit) {
      best_fit = fit;
      best_phi = cand.phi;
    }
  }
  return best_phi;
}

double estimate_direction(const EchoObservation& obs, const MatC& x,
                          const ContourModel& model, const TargetPose& known,
                          int K, const SensingParams& params,
                          const ArrayGeometry& geometry,
                          const SimConfig& config,
                          const DirectionGrid& grid) {
  const DirectionEstimator est(model, known, K, params, geometry, config,
                               grid);
  return est.estimate(x, obs.y_s);
}

}  // namespace isac
