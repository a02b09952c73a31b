#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace metasched {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Small by construction (the largest
/// instances are MDP aggregate transitions over a product state space).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& entries() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

/// Solves A x = b by LU factorisation with partial pivoting.
/// Throws SingularMatrix when a pivot magnitude falls below 1e-12.
Vector linear_solve(const Matrix& a, std::span<const double> b);

/// Inverse via the same LU routine (used by the simplex basis refresh).
Matrix inverse(const Matrix& a);

inline constexpr std::size_t kDefaultKronCap = std::size_t{1} << 24;

/// Kronecker product; result block (i, j) = a(i, j) * b. SizeOverflow when the
/// result would hold more than `max_entries` entries.
Matrix kron(const Matrix& a, const Matrix& b, std::size_t max_entries = kDefaultKronCap);

/// Regularized lower / upper incomplete gamma functions P(a, x), Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Upper tail P(chi2_df > x). Clamped to [0, 1].
double chi_squared_sf(double x, std::size_t df);
double chi_squared_cdf(double x, std::size_t df);

/// Smallest index attaining the maximum. Throws EmptyInput.
std::size_t argmax_tiebreak(std::span<const double> values);

double max_abs(std::span<const double> v) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Largest |row sum - 1| over all rows.
double max_row_sum_deviation(const Matrix& m) noexcept;
bool is_row_stochastic(const Matrix& m, double tol = 1e-9) noexcept;

}  // namespace metasched
