#ifndef ARCNC_POLY_HPP
#define ARCNC_POLY_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "arcnc/gf.hpp"

namespace arcnc {

/// Dense scalar matrix over F_q. Eigen is used for storage and block
/// manipulation only; all arithmetic goes through the owning Field.
using ScalarMatrix = Eigen::Matrix<Elem, Eigen::Dynamic, Eigen::Dynamic>;
using RowVector = Eigen::Matrix<Elem, 1, Eigen::Dynamic>;

/// Polynomial in the delay variable z; coefficient i multiplies z^i.
/// Trailing zeros are allowed; equality and degree ignore them.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Elem> coeffs) : coeffs_(std::move(coeffs)) {}

  static Poly constant(Elem c) { return Poly({c}); }
  static Poly monomial(Elem c, std::size_t power);

  /// -1 for the zero polynomial.
  int degree() const;
  /// Largest k with z^k dividing this polynomial; -1 for zero.
  int valuation() const;
  bool is_zero() const { return degree() < 0; }

  Elem coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : 0; }
  void set_coeff(std::size_t i, Elem value);
  std::size_t size() const { return coeffs_.size(); }
  const std::vector<Elem>& coeffs() const { return coeffs_; }

  Poly& trim();
  Poly trimmed() const { return Poly(*this).trim(); }

  friend bool operator==(const Poly& a, const Poly& b);

 private:
  std::vector<Elem> coeffs_;
};

Poly add(const Field& f, const Poly& a, const Poly& b);
Poly sub(const Field& f, const Poly& a, const Poly& b);
Poly mul(const Field& f, const Poly& a, const Poly& b);
Poly scale(const Field& f, const Poly& a, Elem c);
/// Product truncated to degree <= t: coefficient i is sum_{j<=i} a_j b_{i-j}.
Poly poly_mul_trunc(const Field& f, const Poly& a, const Poly& b, std::size_t t);
/// Evaluate at a point of F_q.
Elem evaluate(const Field& f, const Poly& p, Elem at);

/// Matrix of polynomials, equivalently the coefficient sequence F_0, F_1, ...
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

  static PolyMatrix identity(std::size_t n);
  /// Throws std::invalid_argument if the blocks disagree in shape.
  static PolyMatrix from_coefficients(std::span<const ScalarMatrix> blocks);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Poly& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Poly& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  /// Maximum entry degree; -1 for the zero matrix.
  int degree() const;
  /// Coefficient matrix of z^i.
  ScalarMatrix coefficient(std::size_t i) const;
  /// F_0 .. F_{count-1}.
  std::vector<ScalarMatrix> coefficients(std::size_t count) const;

  PolyMatrix columns(std::span<const std::size_t> which) const;

  friend bool operator==(const PolyMatrix& a, const PolyMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Poly> entries_;
};

/// Row rank by Gauss-Jordan elimination over F_q.
std::size_t rank_fq(const Field& f, ScalarMatrix m);

/// Block upper-triangular Toeplitz expansion M_t of a coefficient sequence,
/// with block (i, j) = F_{j-i} for j >= i.
///
/// Rank is maintained incrementally: M_t contains [0 | M_{t-1}] as its lower
/// block rows, so in reversed block-column order the row space of M_{t-1}
/// embeds into that of M_t by zero padding. The echelon basis is kept in
/// reversed coordinates and only the m rows of the new top block row are
/// reduced at each extension.
class ToeplitzExpansion {
 public:
  ToeplitzExpansion(const Field& f, std::size_t rows, std::size_t cols);

  /// Append F_{t+1}; returns rank(M_{t+1}) - rank(M_t). Throws
  /// std::invalid_argument on a shape mismatch.
  std::size_t extend(const ScalarMatrix& next);

  /// Index of the last block, -1 before the first extend().
  int t() const { return static_cast<int>(blocks_.size()) - 1; }
  std::size_t rank() const { return basis_.size(); }
  /// rank(M_{t-1}), with rank(M_{-1}) = 0.
  std::size_t previous_rank() const { return previous_rank_; }
  std::size_t block_rows() const { return rows_; }
  std::size_t block_cols() const { return cols_; }
  const std::vector<ScalarMatrix>& blocks() const { return blocks_; }

  /// Explicit M_t, (t+1)*rows by (t+1)*cols.
  ScalarMatrix matrix() const;

 private:
  struct BasisRow {
    std::size_t pivot;
    std::vector<Elem> values;  // reversed-block coordinates; missing tail is zero
  };

  Field field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<ScalarMatrix> blocks_;
  std::vector<BasisRow> basis_;  // sorted by pivot
  std::size_t previous_rank_ = 0;
};

ToeplitzExpansion build_toeplitz(const Field& f, std::span<const ScalarMatrix> blocks);

/// rank(F_0 F_1 ... F_t) == m.
bool rank_condition(const Field& f, std::span<const ScalarMatrix> blocks, std::size_t m);

/// Both sink-side decodability checks: the concatenated-rank pre-filter and
/// rank(M_t) - rank(M_{t-1}) == m. True means x_0 (and by shift invariance
/// every x_k) is recoverable from y_0 .. y_{k+t}.
bool decodable(const Field& f, std::span<const ScalarMatrix> blocks, std::size_t m);

/// Determinant by cofactor expansion.
Poly det_cofactor(const Field& f, const PolyMatrix& a);
/// Determinant by evaluation at deg+1 distinct points and Newton
/// interpolation. Requires q > rows * degree.
Poly det_interpolate(const Field& f, const PolyMatrix& a);
/// Exact determinant of a square polynomial matrix. Cofactor expansion for
/// small matrices or small fields, interpolation otherwise.
Poly det_oracle(const Field& f, const PolyMatrix& a);
PolyMatrix adjugate(const Field& f, const PolyMatrix& a);

/// First m-column subset (lexicographic) with nonzero determinant. Throws
/// std::domain_error when none exists.
std::vector<std::size_t> select_columns(const Field& f, const PolyMatrix& a);

/// y(z) = x(z) F(z) truncated to degree `horizon`; x[t] has F.rows() entries.
std::vector<RowVector> encode_stream(const Field& f, const PolyMatrix& a,
                                     std::span<const RowVector> x, std::size_t horizon);

/// Symbol-by-symbol inverse of a square full-rank F(z). With
/// det F = z^delay u(z), u(0) != 0, the decoder forms
/// x(z) = y(z) adj F(z) u(z)^{-1} z^{-delay}
/// as a power series, so x_t is available once y_{t+delay} has arrived.
class SequentialDecoder {
 public:
  /// Throws std::domain_error if F is singular, std::invalid_argument if it
  /// is not square.
  SequentialDecoder(const Field& f, const PolyMatrix& a);

  std::size_t delay() const { return delay_; }
  const Poly& determinant() const { return det_; }

  /// Feed y_t; returns x_{t-delay} once t >= delay.
  std::optional<RowVector> push(const RowVector& y);

 private:
  Field field_;
  std::size_t m_;
  PolyMatrix adj_;
  Poly det_;
  Poly unit_;  // det / z^delay
  Elem unit0_inv_;
  std::size_t delay_;
  std::vector<RowVector> received_;
  std::vector<RowVector> quotient_;  // coefficients of y adj u^{-1}
};

struct DecodeResult {
  std::size_t delay = 0;
  std::vector<RowVector> symbols;  // x_0 .. x_{horizon-delay}
};

/// Runs SequentialDecoder over y_0 .. y_horizon. Throws std::domain_error if
/// F is singular or horizon < delay.
DecodeResult sequential_decode(const Field& f, const PolyMatrix& a, std::span<const RowVector> y,
                               std::size_t horizon);

}  // namespace arcnc

#endif  // ARCNC_POLY_HPP
