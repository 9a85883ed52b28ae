#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "satforge/matrix.hpp"

namespace satforge {

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() { grad.fill(0.0); }
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam. Moments are created lazily on the first step and must
/// keep the parameter shapes afterwards.
class AdamState {
 public:
  /// Applies one update to every parameter, then zeroes the gradients.
  /// Throws ShapeError if parameter shapes changed since the first step.
  void step(std::span<Parameter*> params, const AdamConfig& config);

  /// Clears both moments of row `row` of parameter `index`.
  void reset_row(std::size_t index, std::size_t row);

  std::uint64_t timestep() const { return t_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }

 private:
  std::uint64_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

struct GradCheckOptions {
  double eps = 1e-5;
  /// Coordinates per parameter to test; 0 means all of them.
  std::size_t max_coords_per_param = 0;
  std::uint64_t seed = 0;
  /// Floor for the relative-error denominator.
  double abs_floor = 1e-8;
};

struct GradCheckEntry {
  std::string param;
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
};

/// Compares the gradients already stored in `params` against central finite
/// differences of `loss`. Relative error per coordinate is
/// |analytic - numeric| / max(|analytic| + |numeric|, abs_floor).
GradCheckReport finite_diff_check(const std::function<double()>& loss, std::span<Parameter*> params,
                                  const GradCheckOptions& options = {});

}  // namespace satforge
