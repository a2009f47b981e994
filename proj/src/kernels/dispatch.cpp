#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ipdrl/kernels/step_kernel.hpp"

namespace ipdrl::kernels {

QBatch::QBatch(std::size_t lanes)
    : lanes_(lanes),
      stride_((lanes + kLaneWidth - 1) / kLaneWidth * kLaneWidth),
      data_(static_cast<std::size_t>(kPlanes) * stride_, 0.0) {}

void QBatch::set(std::size_t lane, const QTable& q1, const QTable& q2) {
  for (State s : kAllStates) {
    for (Action a : kAllActions) {
      at(lane, Seat::One, s, a) = q1(s, a);
      at(lane, Seat::Two, s, a) = q2(s, a);
    }
  }
}

QTable QBatch::get(std::size_t lane, Seat i) const {
  QTable q;
  for (State s : kAllStates) {
    for (Action a : kAllActions) q(s, a) = at(lane, i, s, a);
  }
  return q;
}

std::string_view to_string(Isa isa) { return isa == Isa::Scalar ? "scalar" : "avx2"; }

bool isa_available(Isa isa) {
  if (isa == Isa::Scalar) return true;
#if defined(IPDRL_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() {
  static const Isa isa = [] {
    if (const char* env = std::getenv("IPDRL_ISA"); env != nullptr && std::string(env) == "scalar") {
      return Isa::Scalar;
    }
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  }();
  return isa;
}

void step_batch(Isa isa, const StepParams& params, QBatch& q, std::span<double> max_change) {
  if (max_change.size() < q.stride()) {
    throw std::invalid_argument("max_change must hold one entry per padded lane");
  }
  if (!isa_available(isa)) throw std::invalid_argument("requested ISA is not available");
  if (q.stride() == 0) return;
  switch (isa) {
    case Isa::Scalar:
      detail::step_scalar(params, q.plane(0), q.stride(), max_change.data());
      return;
    case Isa::Avx2:
#if defined(IPDRL_HAVE_AVX2)
      detail::step_avx2(params, q.plane(0), q.stride(), max_change.data());
      return;
#else
      break;
#endif
  }
  throw std::invalid_argument("requested ISA is not available");
}

void step_batch(const StepParams& params, QBatch& q, std::span<double> max_change) {
  step_batch(active_isa(), params, q, max_change);
}

}  // namespace ipdrl::kernels
