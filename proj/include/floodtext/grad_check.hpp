#pragma once

#include <functional>
#include <vector>

#include "floodtext/tensor.hpp"

namespace floodtext::nn {

// Scalar-valued closure over a set of input tensors. When `with_grad` is set
// it must also accumulate d(result)/d(input) into each input's grad buffer.
// The closure must be deterministic: repeated calls on the same values give
// the same result (fix any dropout masks before handing it in).
using GradCheckFn = std::function<double(std::vector<TensorD>& inputs, bool with_grad)>;

// Compares the analytic gradient against central differences
// (f(x+eps) - f(x-eps)) / 2eps per coordinate, all at 64-bit precision.
// Each coordinate contributes |a - n| / max(|a|, |n|, floor); the floor keeps
// finite-difference noise on near-zero gradients from dominating. Returns the
// maximum over all coordinates.
double grad_check(const GradCheckFn& f, std::vector<TensorD> inputs, double eps,
                  double floor = 1e-3);

}  // namespace floodtext::nn
