#include "satforge/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "satforge/error.hpp"

namespace satforge {
namespace {

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void require_same(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) throw ShapeError(std::string(op) + ": shape mismatch " + shape(a) + " vs " + shape(b));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) throw ShapeError("Matrix: value count does not match shape");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: " + shape(a) + " * " + shape(b));
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* crow = c.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_tn: " + shape(a) + "^T * " + shape(b));
  Matrix c(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* brow = b.row(r).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ari = a(r, i);
      if (ari == 0.0) continue;
      double* crow = c.row(i).data();
      for (std::size_t j = 0; j < n; ++j) crow[j] += ari * brow[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: " + shape(a) + " * " + shape(b) + "^T");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* brow = b.row(j).data();
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += arow[k] * brow[k];
      c(i, j) = s;
    }
  }
  return c;
}

MatmulGrads matmul_backward(const Matrix& a, const Matrix& b, const Matrix& upstream) {
  if (upstream.rows() != a.rows() || upstream.cols() != b.cols() || a.cols() != b.rows()) {
    throw ShapeError("matmul_backward: incompatible shapes");
  }
  return {matmul_nt(upstream, b), matmul_tn(a, upstream)};
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same(a, b, "add");
  Matrix c = a;
  c += b;
  return c;
}

Matrix add_row(const Matrix& a, const Matrix& bias) {
  if (bias.rows() != 1 || bias.cols() != a.cols()) throw ShapeError("add_row: bias " + shape(bias) + " for " + shape(a));
  Matrix c = a;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    auto r = c.row(i);
    for (std::size_t j = 0; j < c.cols(); ++j) r[j] += bias(0, j);
  }
  return c;
}

Matrix sum_rows(const Matrix& upstream) {
  Matrix s(1, upstream.cols());
  for (std::size_t i = 0; i < upstream.rows(); ++i) {
    auto r = upstream.row(i);
    for (std::size_t j = 0; j < upstream.cols(); ++j) s(0, j) += r[j];
  }
  return s;
}

Matrix scale(const Matrix& a, double s) {
  Matrix c = a;
  for (double& v : c.values()) v *= s;
  return c;
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Matrix relu_backward(const Matrix& x, const Matrix& upstream) {
  require_same(x, upstream, "relu_backward");
  Matrix g = upstream;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(x.values()[i] > 0.0)) g.values()[i] = 0.0;
  return g;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix sigmoid(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.values()) v = sigmoid(v);
  return y;
}

Matrix sigmoid_backward(const Matrix& y, const Matrix& upstream) {
  require_same(y, upstream, "sigmoid_backward");
  Matrix g = upstream;
  for (std::size_t i = 0; i < g.size(); ++i) g.values()[i] *= y.values()[i] * (1.0 - y.values()[i]);
  return g;
}

LossAndGrad mse_loss(const Matrix& pred, const Matrix& target) {
  require_same(pred, target, "mse_loss");
  LossAndGrad out{0.0, Matrix(pred.rows(), pred.cols())};
  if (pred.size() == 0) return out;
  const double n = static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred.values()[i] - target.values()[i];
    out.value += d * d;
    out.grad.values()[i] = 2.0 * d / n;
  }
  out.value /= n;
  return out;
}

LossAndGrad masked_mse_loss(const Matrix& pred, const Matrix& target, const Matrix& mask) {
  require_same(pred, target, "masked_mse_loss");
  require_same(pred, mask, "masked_mse_loss");
  LossAndGrad out{0.0, Matrix(pred.rows(), pred.cols())};
  double count = 0.0;
  for (double m : mask.values())
    if (m != 0.0) count += 1.0;
  if (count == 0.0) return out;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mask.values()[i] == 0.0) continue;
    const double d = pred.values()[i] - target.values()[i];
    out.value += d * d;
    out.grad.values()[i] = 2.0 * d / count;
  }
  out.value /= count;
  return out;
}

VectorLoss bce_logits_loss(std::span<const double> logits, std::span<const double> labels) {
  if (logits.size() != labels.size()) throw ShapeError("bce_logits_loss: length mismatch");
  VectorLoss out{0.0, std::vector<double>(logits.size(), 0.0)};
  if (logits.empty()) return out;
  const double n = static_cast<double>(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double x = logits[i];
    const double y = labels[i];
    // max(x,0) - x*y + log(1 + exp(-|x|))
    out.value += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
    out.grad[i] = (sigmoid(x) - y) / n;
  }
  out.value /= n;
  return out;
}

}  // namespace satforge
