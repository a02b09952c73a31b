#include "metasched/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "metasched/error.hpp"

namespace metasched {

namespace {

constexpr double kPivotTolerance = 1e-12;

struct LuFactors {
  Matrix lu;
  std::vector<std::size_t> perm;
};

LuFactors lu_factor(const Matrix& a) {
  if (!a.square()) {
    throw Error(ErrorCode::ShapeMismatch, "LU requires a square matrix");
  }
  const std::size_t n = a.rows();
  LuFactors f{a, std::vector<std::size_t>(n)};
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  Matrix& m = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(m(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(m(r, k)) > best) {
        best = std::abs(m(r, k));
        pivot = r;
      }
    }
    if (best < kPivotTolerance) {
      throw Error(ErrorCode::SingularMatrix,
                  "pivot magnitude " + std::to_string(best) + " at column " + std::to_string(k));
    }
    if (pivot != k) {
      std::swap_ranges(m.row(k).begin(), m.row(k).end(), m.row(pivot).begin());
      std::swap(f.perm[k], f.perm[pivot]);
    }
    const double inv = 1.0 / m(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double factor = m(r, k) * inv;
      m(r, k) = factor;
      if (factor == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) m(r, c) -= factor * m(k, c);
    }
  }
  return f;
}

Vector lu_solve(const LuFactors& f, std::span<const double> b) {
  const std::size_t n = f.lu.rows();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

// Series expansion of P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x); used for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::ShapeMismatch, "entry count does not match rows x cols");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::ShapeMismatch, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "matrix product dimensions");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::ShapeMismatch, "matrix-vector dimensions");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
  return out;
}

Vector linear_solve(const Matrix& a, std::span<const double> b) {
  if (!a.square() || b.size() != a.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "linear_solve needs square A and matching b");
  }
  return lu_solve(lu_factor(a), b);
}

Matrix inverse(const Matrix& a) {
  const auto f = lu_factor(a);
  const std::size_t n = a.rows();
  Matrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = lu_solve(f, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return inv;
}

Matrix kron(const Matrix& a, const Matrix& b, std::size_t max_entries) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (rows != 0 && cols > max_entries / rows) {
    throw Error(ErrorCode::SizeOverflow, "Kronecker product of " + std::to_string(rows) + "x" +
                                             std::to_string(cols) + " exceeds the entry cap");
  }
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double s = a(i, j);
      if (s == 0.0) continue;
      for (std::size_t p = 0; p < b.rows(); ++p) {
        for (std::size_t q = 0; q < b.cols(); ++q) {
          out(i * b.rows() + p, j * b.cols() + q) = s * b(p, q);
        }
      }
    }
  }
  return out;
}

double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi_squared_sf(double x, std::size_t df) {
  if (df == 0) throw Error(ErrorCode::InvalidArgument, "chi-squared needs df >= 1");
  if (!(x > 0.0)) return 1.0;
  return std::clamp(gamma_q(0.5 * static_cast<double>(df), 0.5 * x), 0.0, 1.0);
}

double chi_squared_cdf(double x, std::size_t df) {
  if (df == 0) throw Error(ErrorCode::InvalidArgument, "chi-squared needs df >= 1");
  if (!(x > 0.0)) return 0.0;
  return std::clamp(gamma_p(0.5 * static_cast<double>(df), 0.5 * x), 0.0, 1.0);
}

std::size_t argmax_tiebreak(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

double max_abs(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_row_sum_deviation(const Matrix& m) noexcept {
  double worst = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    const double s = std::accumulate(row.begin(), row.end(), 0.0);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

bool is_row_stochastic(const Matrix& m, double tol) noexcept {
  if (!m.square() || m.rows() == 0) return false;
  for (double v : m.entries()) {
    if (!std::isfinite(v) || v < -tol) return false;
  }
  return max_row_sum_deviation(m) <= tol;
}

}  // namespace metasched
