#pragma once

// Batched strategy-average learning step over many independent joint
// Q-tables at once (structure-of-arrays, one lane per sample).
//
// A scalar reference and an AVX2 variant share one kernel body; both are
// compiled without FMA contraction, so they produce bit-identical results.
// The variant is chosen at runtime from CPU support, and the environment
// variable IPDRL_ISA=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ipdrl/core_env.hpp"
#include "ipdrl/strategies.hpp"

namespace ipdrl::kernels {

struct StepParams {
  double temptation;
  double sucker;
  double alpha;
  double epsilon;
  double delta;
};

/// Entry (seat, state, action) lives in plane 8*seat + 2*state + action.
inline constexpr int kPlanes = 16;
inline constexpr std::size_t kLaneWidth = 4;

constexpr int plane_index(Seat i, State s, Action a) {
  return 8 * index(i) + 2 * index(s) + index(a);
}

/// Q-tables of both seats for `lanes` samples. Storage is padded to a
/// multiple of kLaneWidth; padding lanes hold zeros and are never read back.
class QBatch {
 public:
  explicit QBatch(std::size_t lanes);

  std::size_t lanes() const { return lanes_; }
  std::size_t stride() const { return stride_; }

  double* plane(int k) { return data_.data() + static_cast<std::size_t>(k) * stride_; }
  const double* plane(int k) const { return data_.data() + static_cast<std::size_t>(k) * stride_; }

  double& at(std::size_t lane, Seat i, State s, Action a) { return plane(plane_index(i, s, a))[lane]; }
  double at(std::size_t lane, Seat i, State s, Action a) const {
    return plane(plane_index(i, s, a))[lane];
  }

  void set(std::size_t lane, const QTable& q1, const QTable& q2);
  QTable get(std::size_t lane, Seat i) const;

 private:
  std::size_t lanes_;
  std::size_t stride_;
  std::vector<double> data_;
};

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);
bool isa_available(Isa isa);

/// Best available variant, honouring IPDRL_ISA.
Isa active_isa();

/// One simultaneous update of every lane:
///   q <- q + alpha * (r(s,a) + delta * nextq(s,a) - q)
/// with both terms evaluated under the current joint epsilon-greedy strategy.
/// max_change[lane] receives max |q' - q| over the 16 entries.
void step_batch(Isa isa, const StepParams& params, QBatch& q, std::span<double> max_change);
void step_batch(const StepParams& params, QBatch& q, std::span<double> max_change);

namespace detail {
// Variant entry points; process lanes [0, stride) in groups of kLaneWidth.
void step_scalar(const StepParams& params, double* planes, std::size_t stride, double* max_change);
void step_avx2(const StepParams& params, double* planes, std::size_t stride, double* max_change);
}  // namespace detail

}  // namespace ipdrl::kernels
