#include "lrru/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "lrru/error.hpp"

namespace lrru {

double grad_check(const std::function<Tensor(std::span<const Tensor>)>& f,
                  std::vector<Tensor>& inputs, const GradCheckOptions& options) {
  if (options.eps <= 0.0) throw UsageError("grad_check: eps must be positive");
  for (std::size_t idx : options.kink_inputs) {
    if (idx >= inputs.size()) throw UsageError("grad_check: kink input index out of range");
    const double margin = 10.0 * options.eps;
    for (double& v : inputs[idx].mutable_data()) {
      const double r = std::round(v);
      if (std::fabs(v - r) < margin) v = r + margin;
    }
  }
  for (Tensor& t : inputs) {
    t.set_requires_grad(true);
    t.zero_grad();
  }
  Tensor out = f(inputs);
  out.backward();

  double worst = 0.0;
  for (Tensor& t : inputs) {
    const std::vector<double> analytic =
        t.has_grad() ? std::vector<double>(t.grad().begin(), t.grad().end())
                     : std::vector<double>(static_cast<std::size_t>(t.numel()), 0.0);
    auto values = t.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + options.eps;
      const double up = f(inputs).item();
      values[i] = saved - options.eps;
      const double down = f(inputs).item();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * options.eps);
      const double denom = std::max({1.0, std::fabs(analytic[i]), std::fabs(numeric)});
      worst = std::max(worst, std::fabs(analytic[i] - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace lrru
