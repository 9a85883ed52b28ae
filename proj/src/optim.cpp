#include "satforge/optim.hpp"

#include <algorithm>
#include <cmath>

#include "satforge/error.hpp"
#include "satforge/rng.hpp"

namespace satforge {

void AdamState::step(std::span<Parameter*> params, const AdamConfig& config) {
  if (m_.empty()) {
    for (const Parameter* p : params) {
      m_.emplace_back(p->value.rows(), p->value.cols());
      v_.emplace_back(p->value.rows(), p->value.cols());
    }
  }
  if (m_.size() != params.size()) throw ShapeError("AdamState: parameter count changed between steps");
  ++t_;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (!p.value.same_shape(m_[i]) || !p.grad.same_shape(m_[i])) {
      throw ShapeError("AdamState: shape drift in parameter " + p.name);
    }
    auto& w = p.value.values();
    const auto& g = p.grad.values();
    auto& m = m_[i].values();
    auto& v = v_[i].values();
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[k];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      w[k] -= config.lr * mhat / (std::sqrt(vhat) + config.eps);
    }
    p.zero_grad();
  }
}

void AdamState::reset_row(std::size_t index, std::size_t row) {
  if (index >= m_.size()) return;
  for (double& x : m_[index].row(row)) x = 0.0;
  for (double& x : v_[index].row(row)) x = 0.0;
}

GradCheckReport finite_diff_check(const std::function<double()>& loss, std::span<Parameter*> params,
                                  const GradCheckOptions& options) {
  GradCheckReport report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter& p = *params[pi];
    const std::size_t n = p.value.size();
    std::vector<std::size_t> coords;
    if (options.max_coords_per_param == 0 || options.max_coords_per_param >= n) {
      coords.resize(n);
      for (std::size_t k = 0; k < n; ++k) coords[k] = k;
    } else {
      Rng rng(options.seed, Stream::kGeneration, pi);
      coords = rng.sample_distinct(n, options.max_coords_per_param);
    }
    GradCheckEntry entry{p.name, 0.0, coords.size()};
    for (std::size_t k : coords) {
      double& w = p.value.values()[k];
      const double saved = w;
      w = saved + options.eps;
      const double up = loss();
      w = saved - options.eps;
      const double down = loss();
      w = saved;
      const double numeric = (up - down) / (2.0 * options.eps);
      const double analytic = p.grad.values()[k];
      const double denom = std::max(std::abs(analytic) + std::abs(numeric), options.abs_floor);
      entry.max_rel_error = std::max(entry.max_rel_error, std::abs(analytic - numeric) / denom);
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace satforge
