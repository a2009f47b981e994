#include "step_body.hpp"

namespace ipdrl::kernels::detail {

void step_scalar(const StepParams& params, double* planes, std::size_t stride, double* max_change) {
  for (std::size_t lane = 0; lane < stride; ++lane) {
    step_lanes<double>(params, planes, stride, lane, max_change);
  }
}

}  // namespace ipdrl::kernels::detail
