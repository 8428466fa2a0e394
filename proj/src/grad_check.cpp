#include "floodtext/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace floodtext::nn {

double grad_check(const GradCheckFn& f, std::vector<TensorD> inputs, double eps,
                  double floor) {
  for (auto& t : inputs) {
    t.ensure_grad();
    t.zero_grad();
  }
  f(inputs, true);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(inputs.size());
  for (auto& t : inputs) analytic.push_back(t.grad);

  double max_err = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t j = 0; j < inputs[i].numel(); ++j) {
      const double saved = inputs[i].values[j];
      inputs[i].values[j] = saved + eps;
      const double f_plus = f(inputs, false);
      inputs[i].values[j] = saved - eps;
      const double f_minus = f(inputs, false);
      inputs[i].values[j] = saved;

      const double numeric = (f_plus - f_minus) / (2.0 * eps);
      const double a = analytic[i][j];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      max_err = std::max(max_err, std::abs(a - numeric) / denom);
    }
  }
  return max_err;
}

}  // namespace floodtext::nn
