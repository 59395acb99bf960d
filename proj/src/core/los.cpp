// isacbeam — CRB-optimal transmit beamforming for integrated sensing
// and communication.
//
// SPDX-License-Identifier: MIT
// los.cpp: see los.hpp.

#include "los.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isac {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double circular_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

// ===== adaptive Simpson quadrature ========================================

double simpson_slice(double fa, double fm, double fb, double h) {
  return (fa + 4.0 * fm + fb) * h / 6.0;
}

template <typename F>
double adaptive_simpson(const F& f, double a, double m, double b, double fa,
                        double fm, double fb, double whole, double tol,
                        int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_slice(fa, flm, fm, m - a);
  const double right = simpson_slice(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * tol,
                          depth - 1) +
         adaptive_simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol,
                          depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = simpson_slice(fa, fm, fb, b - a);
  const double tol = std::max(1e-300, rel_tol * std::abs(whole)) + 1e-16;
  return adaptive_simpson(f, a, m, b, fa, fm, fb, whole, tol, 40);
}

// ===== ray casting against a dense contour polyline =======================

struct Polyline {
  std::vector<double> us;   // sample local angles, ascending in [0, 2pi)
  std::vector<Vec2> pts;    // global positions
  std::vector<double> brg;  // bearings
  std::vector<double> rng;  // ranges
};

Polyline sample_contour(const ContourModel& model, const TargetPose& pose,
                        int n) {
  Polyline poly;
  poly.us.resize(n);
  poly.pts.resize(n);
  poly.brg.resize(n);
  poly.rng.resize(n);
  for (int i = 0; i < n; ++i) {
    const double u = kTwoPi * i / n;
    const Vec2 p = global_point(model, pose, u);
    poly.us[i] = u;
    poly.pts[i] = p;
    poly.brg[i] = bearing(p);
    poly.rng[i] = p.norm();
  }
  return poly;
}

double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Does the open segment origin -> target cross segment (s1, s2) strictly
// before reaching the target? Grazing/parallel contact does not count; the
// adjacent polyline segments catch genuine blockage in that case.
bool segment_blocks(const Vec2& target, const Vec2& s1, const Vec2& s2) {
  const Vec2 d2 = s2 - s1;
  const double denom = cross2(target, d2);
  if (std::abs(denom) < 1e-15 * (target.norm() * d2.norm() + 1e-300))
    return false;
  const double t = cross2(s1, d2) / denom;   // along origin -> target
  const double s = cross2(s1, target) / denom;  // along s1 -> s2
  return s >= 0.0 && s <= 1.0 && t > 0.0 && t < 1.0 - 1e-9;
}

// Exact visibility of the contour point at local angle u, tested against a
// precomputed polyline; segments within excl_u of u are the point's own
// neighborhood and are skipped.
bool visible_against(const Polyline& poly, const Vec2& target, double u,
                     double excl_u) {
  const int n = static_cast<int>(poly.pts.size());
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    if (circular_distance(poly.us[i], u) < excl_u ||
        circular_distance(poly.us[j], u) < excl_u)
      continue;
    if (segment_blocks(target, poly.pts[i], poly.pts[j])) return false;
  }
  return true;
}

}  // namespace

double LosPartition::total_arc_length() const {
  double sum = 0.0;
  for (const auto& s : subsections) sum += s.l_k;
  return sum;
}

double arc_length(const ContourModel& model, double u_a, double u_b,
                  double rel_tol) {
  const auto speed = [&](double u) { return contour_deriv(model, u).norm(); };
  return integrate(speed, u_a, u_b, rel_tol);
}

bool line_of_sight_clear(const ContourModel& model, const TargetPose& pose,
                         double u, int polyline_samples) {
  model.validate();
  pose.validate(model);
  const Polyline poly = sample_contour(model, pose, polyline_samples);
  const Vec2 target = global_point(model, pose, u);
  const double excl = 3.0 * kTwoPi / polyline_samples;
  return visible_against(poly, target, u, excl);
}

LosPartition compute_los_partition(const ContourModel& model,
                                   const TargetPose& pose, int K,
                                   int sampling) {
  model.validate();
  pose.validate(model);
  require(K >= 1, "partition size K must be >= 1");
  require(sampling >= 1000, "LoS sampling density must be >= 1000");

  const int n = sampling;
  const Polyline poly = sample_contour(model, pose, n);
  const double excl = 3.0 * kTwoPi / n;
  const auto exact_visible = [&](double u) {
    return visible_against(poly, global_point(model, pose, u), u, excl);
  };

  LosPartition out;

  const double brg_lo = *std::min_element(poly.brg.begin(), poly.brg.end());
  const double brg_hi = *std::max_element(poly.brg.begin(), poly.brg.end());
  const double span = brg_hi - brg_lo;

  double u_lower = 0.0, u_upper = kTwoPi;
  bool full_circle = false;

  if (span < 1e-14) {
    // Degenerate (point-like) target: every sample shares one bearing and
    // one range; the whole parameter circle is trivially visible.
    full_circle = true;
  } else {
    // --- sample-resolution ray casting via bearing-binned minimum range ---
    // Bins are kept several samples wide so each bin contains samples from
    // both the near and far branches of the contour; the per-bin minimum
    // range then identifies a genuinely visible sample.
    const int n_bins = std::max(64, n / 8);
    std::vector<int> winner(n_bins, -1);
    for (int i = 0; i < n; ++i) {
      int b = static_cast<int>((poly.brg[i] - brg_lo) / span * n_bins);
      b = std::clamp(b, 0, n_bins - 1);
      if (winner[b] < 0 || poly.rng[i] < poly.rng[winner[b]]) winner[b] = i;
    }
    std::vector<int> vis;
    vis.reserve(n_bins);
    for (int b = 0; b < n_bins; ++b)
      if (winner[b] >= 0) vis.push_back(winner[b]);
    if (vis.empty())
      fail(ErrorCode::kNoVisibleContour, "ray casting found no visible "
                                         "contour sample");
    std::sort(vis.begin(), vis.end());
    vis.erase(std::unique(vis.begin(), vis.end()), vis.end());

    // --- chain the visible samples into contiguous runs (circular) --------
    const int gap_tol = std::max(16, n / 64);
    const int m = static_cast<int>(vis.size());
    std::vector<int> breaks;  // j such that the gap after vis[j] is large
    for (int j = 0; j < m; ++j) {
      const int next = vis[(j + 1) % m];
      const int gap = (next - vis[j] + n) % n;
      if (gap > gap_tol) breaks.push_back(j);
    }

    int start_i = 0, end_i = 0;
    if (breaks.empty()) {
      full_circle = true;
    } else {
      // Runs start just after each break; keep the one with largest extent.
      double best_extent = -1.0;
      const int nb = static_cast<int>(breaks.size());
      for (int r = 0; r < nb; ++r) {
        const int first = vis[(breaks[r] + 1) % m];
        const int last = vis[breaks[(r + 1) % nb]];
        const double extent = ((last - first + n) % n) * (kTwoPi / n);
        if (extent > best_extent) {
          best_extent = extent;
          start_i = first;
          end_i = last;
        }
      }
      out.contiguous = (nb == 1);
      if (!out.contiguous)
        out.warnings.push_back(
            "NonContiguousLoS: visible set has multiple components; using "
            "the largest contiguous interval");
    }

    if (!full_circle) {
      // --- polish both interval endpoints -----------------------------------
      // Two endpoint mechanisms need different treatment:
      //  * silhouette (tangency): the sight line grazes the contour at the
      //    endpoint itself, which is exactly a local extremum of the bearing
      //    along the contour — located by golden-section search on the true
      //    bearing function, independent of the polyline resolution;
      //  * occlusion: a distant part of the contour blocks the view — the
      //    blocker is crossed transversally, so bisection on the chord-based
      //    visibility predicate is already resolution-robust.
      const double du = kTwoPi / n;
      const double bin_width = span / n_bins;
      const auto brg_of = [&](double u) {
        return bearing(global_point(model, pose, u));
      };

      const auto refine = [&](double u_end, double direction) {
        const double b_end = brg_of(u_end);
        const bool silhouette = std::min(std::abs(b_end - brg_lo),
                                         std::abs(b_end - brg_hi)) <=
                                2.5 * bin_width;
        if (silhouette) {
          // Bracket the bearing extremum near the endpoint, then contract.
          const bool maximize = std::abs(b_end - brg_hi) <
                                std::abs(b_end - brg_lo);
          const double sign = maximize ? 1.0 : -1.0;
          double w = 32.0 * du + (brg_hi - brg_lo) * 0.05;
          for (int attempt = 0; attempt < 4; ++attempt) {
            const int probes = 96;
            double best_u = u_end, best_v = sign * b_end;
            for (int i = 0; i <= probes; ++i) {
              const double u = u_end - w + 2.0 * w * i / probes;
              const double v = sign * brg_of(u);
              if (v > best_v) {
                best_v = v;
                best_u = u;
              }
            }
            const double step = 2.0 * w / probes;
            if (std::abs(best_u - (u_end - w)) < 0.5 * step ||
                std::abs(best_u - (u_end + w)) < 0.5 * step) {
              w *= 2.0;  // extremum not bracketed yet; widen and retry
              continue;
            }
            double lo = best_u - step, hi = best_u + step;
            constexpr double kGolden = 0.61803398874989484820;
            for (int it = 0; it < 120; ++it) {
              const double a = hi - kGolden * (hi - lo);
              const double b = lo + kGolden * (hi - lo);
              if (sign * brg_of(a) < sign * brg_of(b))
                lo = a;
              else
                hi = b;
            }
            return 0.5 * (lo + hi);
          }
          return u_end;  // bracketing failed; keep the sample endpoint
        }

        // Occlusion endpoint: walk inward to a certainly-visible point,
        // outward to an invisible one, then bisect the transition.
        double u_vis = u_end;
        int guard = 0;
        while (!exact_visible(u_vis) && guard++ < gap_tol)
          u_vis -= direction * du;
        if (!exact_visible(u_vis)) return u_end;
        double u_inv = u_vis;
        bool bracketed = false;
        for (int step = 1; step <= 4 * gap_tol + 8; ++step) {
          u_inv = u_vis + direction * step * du;
          if (!exact_visible(u_inv)) {
            bracketed = true;
            break;
          }
        }
        if (!bracketed) return u_inv;  // visible as far as we looked
        double lo = u_inv - direction * du, hi = u_inv;
        for (int it = 0; it < 64; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (exact_visible(mid))
            lo = mid;
          else
            hi = mid;
        }
        return 0.5 * (lo + hi);
      };

      u_lower = refine(poly.us[start_i], -1.0);
      double u_hi_raw = poly.us[end_i];
      if (u_hi_raw < u_lower) u_hi_raw += kTwoPi;  // unwrap
      u_upper = refine(u_hi_raw, +1.0);
      if (u_upper < u_lower) u_upper += kTwoPi;
    }
  }

  out.u_lower = u_lower;
  out.u_upper = u_upper;

  // --- equal-angle partition with midpoint representatives ----------------
  const double delta_u = (u_upper - u_lower) / K;
  out.subsections.resize(K);
  const Vec2 p_o = pose.center();
  const Mat2 v = pose.rotation();
  for (int k = 0; k < K; ++k) {
    LosSubsection& s = out.subsections[k];
    const double a = u_lower + k * delta_u;
    const double b = a + delta_u;
    s.u_k = 0.5 * (a + b);
    s.l_k = arc_length(model, a, b);
    s.r_k = contour_point(model, s.u_k);
    s.p_k = p_o + v * s.r_k;
    s.d_k = s.p_k.norm();
    s.phi_k = bearing(s.p_k);
  }
  return out;
}

}  // namespace isac
