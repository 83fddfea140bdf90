#include "driveclone/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driveclone/errors.hpp"

namespace driveclone::nn {

GradCheckReport grad_check(const ParamList& params, std::span<const Tensor> analytic,
                           const std::function<double()>& loss_fn, double eps, double tol,
                           double floor) {
  if (analytic.size() != params.size()) {
    throw ShapeError("grad_check: gradient count does not match parameter count");
  }
  GradCheckReport report;
  report.tolerance = tol;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k].tensor;
    require_same_shape(p, analytic[k], "grad_check");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + eps;
      const double plus = loss_fn();
      p[i] = saved - eps;
      const double minus = loss_fn();
      p[i] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double a = analytic[k][i];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++report.checked;
      if (report.checked == 1 || std::isnan(rel) || rel > report.max_rel_error) {
        report.max_rel_error = std::isnan(rel) ? std::numeric_limits<double>::infinity() : rel;
        report.worst_param = params[k].name;
        report.worst_index = i;
        report.analytic_at_worst = a;
        report.numeric_at_worst = numeric;
      }
    }
  }
  report.passed = report.checked > 0 && report.max_rel_error <= tol;
  return report;
}

}  // namespace driveclone::nn
