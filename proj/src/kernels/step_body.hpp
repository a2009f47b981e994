#pragma once

// Kernel body shared by every ISA variant. `V` is a lane vector type with
// +, -, *, / and the free functions load, store, splat, greater, select,
// abs_value and max_value. Only this header may change the arithmetic;
// variants differ in lane width alone.

#include <cmath>
#include <cstddef>

#include "ipdrl/kernels/step_kernel.hpp"

namespace ipdrl::kernels::detail {

template <class V>
V load(const double* p);
template <class V>
V splat(double value);

// Scalar lane: one double per lane.
template <>
inline double load<double>(const double* p) {
  return *p;
}
template <>
inline double splat<double>(double value) {
  return value;
}
inline void store(double* p, double v) { *p = v; }
inline bool greater(double a, double b) { return a > b; }
inline double select(bool mask, double a, double b) { return mask ? a : b; }
inline double abs_value(double v) { return std::fabs(v); }
inline double max_value(double a, double b) { return a < b ? b : a; }

template <class V>
inline void step_lanes(const StepParams& prm, double* planes, std::size_t stride, std::size_t lane,
                       double* max_change) {
  const double hi_s = 1.0 - prm.epsilon / 2.0;
  const double lo_s = prm.epsilon / 2.0;
  const V hi = splat<V>(hi_s);
  const V lo = splat<V>(lo_s);
  const V zero = splat<V>(0.0);
  const V one = splat<V>(1.0);
  const V delta = splat<V>(prm.delta);
  const V alpha = splat<V>(prm.alpha);

  // Rewards by next state CC, CD, DC, DD for each seat.
  const V rew[2][4] = {
      {splat<V>(1.0), splat<V>(prm.sucker), splat<V>(prm.temptation), splat<V>(0.0)},
      {splat<V>(1.0), splat<V>(prm.temptation), splat<V>(prm.sucker), splat<V>(0.0)}};

  V q[16];
  for (int k = 0; k < 16; ++k) q[k] = load<V>(planes + k * stride + lane);

  // x[i][s][a]
  V x[2][4][2];
  for (int i = 0; i < 2; ++i) {
    for (int s = 0; s < 4; ++s) {
      const auto coop = greater(q[8 * i + 2 * s], q[8 * i + 2 * s + 1]);
      x[i][s][0] = select(coop, hi, lo);
      x[i][s][1] = select(coop, lo, hi);
    }
  }

  // Joint transition p[s][s'] with s' = 2*a1 + a2, and averaged state rewards.
  V p[4][4];
  V rbar[2][4];
  for (int s = 0; s < 4; ++s) {
    rbar[0][s] = zero;
    rbar[1][s] = zero;
    for (int a1 = 0; a1 < 2; ++a1) {
      for (int a2 = 0; a2 < 2; ++a2) {
        const int n = 2 * a1 + a2;
        p[s][n] = x[0][s][a1] * x[1][s][a2];
        rbar[0][s] = rbar[0][s] + p[s][n] * rew[0][n];
        rbar[1][s] = rbar[1][s] + p[s][n] * rew[1][n];
      }
    }
  }

  // (I - delta P) v = rbar for both seats. Strict diagonal dominance for
  // delta < 1 makes elimination without pivoting stable.
  V a[4][4];
  V v[2][4];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) a[r][c] = (r == c ? one : zero) - delta * p[r][c];
    v[0][r] = rbar[0][r];
    v[1][r] = rbar[1][r];
  }
  for (int c = 0; c < 4; ++c) {
    for (int r = c + 1; r < 4; ++r) {
      const V f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] = a[r][k] - f * a[c][k];
      v[0][r] = v[0][r] - f * v[0][c];
      v[1][r] = v[1][r] - f * v[1][c];
    }
  }
  for (int r = 3; r >= 0; --r) {
    for (int k = r + 1; k < 4; ++k) {
      v[0][r] = v[0][r] - a[r][k] * v[0][k];
      v[1][r] = v[1][r] - a[r][k] * v[1][k];
    }
    v[0][r] = v[0][r] / a[r][r];
    v[1][r] = v[1][r] / a[r][r];
  }

  V change = zero;
  for (int i = 0; i < 2; ++i) {
    const int co = 1 - i;
    // Next state for own action a and co-player action b.
    auto next = [i](int own, int theirs) { return i == 0 ? 2 * own + theirs : 2 * theirs + own; };

    // Strategy-average reward and quality per (s, a).
    V rsa[4][2];
    V qx[4][2];
    for (int s = 0; s < 4; ++s) {
      for (int own = 0; own < 2; ++own) {
        const int nc = next(own, 0);
        const int nd = next(own, 1);
        rsa[s][own] = x[co][s][0] * rew[i][nc] + x[co][s][1] * rew[i][nd];
        qx[s][own] = rsa[s][own] + delta * (x[co][s][0] * v[i][nc] + x[co][s][1] * v[i][nd]);
      }
    }
    // Own-strategy average of the quality at each next state.
    V own_avg[4];
    for (int s = 0; s < 4; ++s) own_avg[s] = x[i][s][0] * qx[s][0] + x[i][s][1] * qx[s][1];

    for (int s = 0; s < 4; ++s) {
      for (int own = 0; own < 2; ++own) {
        const int nc = next(own, 0);
        const int nd = next(own, 1);
        const V nextq = x[co][s][0] * own_avg[nc] + x[co][s][1] * own_avg[nd];
        const int k = 8 * i + 2 * s + own;
        const V updated = q[k] + alpha * (rsa[s][own] + delta * nextq - q[k]);
        change = max_value(change, abs_value(updated - q[k]));
        store(planes + k * stride + lane, updated);
      }
    }
  }
  store(max_change + lane, change);
}

}  // namespace ipdrl::kernels::detail
