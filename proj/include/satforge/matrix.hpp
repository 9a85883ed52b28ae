#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace satforge {

/// Dense row-major fp64 matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  void fill(double v);
  bool all_finite() const;
  bool same_shape(const Matrix& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

  Matrix& operator+=(const Matrix& other);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& a);

// Each forward op has a matching backward that maps the upstream gradient of a
// scalar loss to gradients w.r.t. the op's inputs. Shape mismatches throw
// ShapeError.

Matrix matmul(const Matrix& a, const Matrix& b);
/// A^T * B without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// A * B^T without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
struct MatmulGrads {
  Matrix da;
  Matrix db;
};
MatmulGrads matmul_backward(const Matrix& a, const Matrix& b, const Matrix& upstream);

Matrix add(const Matrix& a, const Matrix& b);
/// Adds the 1 x cols row vector `bias` to every row of `a`.
Matrix add_row(const Matrix& a, const Matrix& bias);
/// Gradient of add_row w.r.t. the bias: column sums of upstream.
Matrix sum_rows(const Matrix& upstream);

Matrix scale(const Matrix& a, double s);

Matrix relu(const Matrix& x);
/// Subgradient at 0 is 0.
Matrix relu_backward(const Matrix& x, const Matrix& upstream);

Matrix sigmoid(const Matrix& x);
Matrix sigmoid_backward(const Matrix& y, const Matrix& upstream);
double sigmoid(double x);

struct LossAndGrad {
  double value = 0.0;
  Matrix grad;
};

/// Mean squared error over all entries; gradient 2(pred - target)/count.
LossAndGrad mse_loss(const Matrix& pred, const Matrix& target);

/// Mean squared error restricted to entries where mask != 0, averaged over the
/// number of unmasked entries.
LossAndGrad masked_mse_loss(const Matrix& pred, const Matrix& target, const Matrix& mask);

struct VectorLoss {
  double value = 0.0;
  std::vector<double> grad;
};

/// Mean binary cross-entropy on logits, log-sum-exp stable form.
VectorLoss bce_logits_loss(std::span<const double> logits, std::span<const double> labels);

}  // namespace satforge
