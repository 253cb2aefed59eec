#include "arcnc/poly.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>

namespace arcnc {

// ---------------------------------------------------------------- Poly

Poly Poly::monomial(Elem c, std::size_t power) {
  std::vector<Elem> v(power + 1, 0);
  v[power] = c;
  return Poly(std::move(v));
}

int Poly::degree() const {
  for (std::size_t i = coeffs_.size(); i-- > 0;)
    if (coeffs_[i] != 0) return static_cast<int>(i);
  return -1;
}

int Poly::valuation() const {
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0) return static_cast<int>(i);
  return -1;
}

void Poly::set_coeff(std::size_t i, Elem value) {
  if (i >= coeffs_.size()) {
    if (value == 0) return;
    coeffs_.resize(i + 1, 0);
  }
  coeffs_[i] = value;
}

Poly& Poly::trim() {
  coeffs_.resize(static_cast<std::size_t>(degree() + 1));
  return *this;
}

bool operator==(const Poly& a, const Poly& b) {
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (a.coeff(i) != b.coeff(i)) return false;
  return true;
}

Poly add(const Field& f, const Poly& a, const Poly& b) {
  std::vector<Elem> out(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.add(a.coeff(i), b.coeff(i));
  return Poly(std::move(out)).trim();
}

Poly sub(const Field& f, const Poly& a, const Poly& b) {
  std::vector<Elem> out(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.sub(a.coeff(i), b.coeff(i));
  return Poly(std::move(out)).trim();
}

Poly mul(const Field& f, const Poly& a, const Poly& b) {
  const int da = a.degree(), db = b.degree();
  if (da < 0 || db < 0) return Poly();
  return poly_mul_trunc(f, a, b, static_cast<std::size_t>(da + db));
}

Poly scale(const Field& f, const Poly& a, Elem c) {
  std::vector<Elem> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.mul(a.coeff(i), c);
  return Poly(std::move(out)).trim();
}

Poly poly_mul_trunc(const Field& f, const Poly& a, const Poly& b, std::size_t t) {
  std::vector<Elem> out(t + 1, 0);
  const std::size_t na = std::min(a.size(), t + 1);
  for (std::size_t i = 0; i < na; ++i) {
    const Elem ai = a.coeff(i);
    if (ai == 0) continue;
    const std::size_t nb = std::min(b.size(), t + 1 - i);
    for (std::size_t j = 0; j < nb; ++j) out[i + j] = f.fma(out[i + j], ai, b.coeff(j));
  }
  return Poly(std::move(out)).trim();
}

Elem evaluate(const Field& f, const Poly& p, Elem at) {
  Elem acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = f.fma(p.coeff(i), acc, at);
  return acc;
}

// ---------------------------------------------------------- PolyMatrix

PolyMatrix PolyMatrix::identity(std::size_t n) {
  PolyMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Poly::constant(1);
  return m;
}

PolyMatrix PolyMatrix::from_coefficients(std::span<const ScalarMatrix> blocks) {
  if (blocks.empty()) return PolyMatrix();
  const auto rows = static_cast<std::size_t>(blocks[0].rows());
  const auto cols = static_cast<std::size_t>(blocks[0].cols());
  PolyMatrix m(rows, cols);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (static_cast<std::size_t>(blocks[k].rows()) != rows ||
        static_cast<std::size_t>(blocks[k].cols()) != cols)
      throw std::invalid_argument("coefficient blocks differ in shape");
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c).set_coeff(k, blocks[k](r, c));
  }
  return m;
}

int PolyMatrix::degree() const {
  int d = -1;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

ScalarMatrix PolyMatrix::coefficient(std::size_t i) const {
  ScalarMatrix out(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(r, c) = (*this)(r, c).coeff(i);
  return out;
}

std::vector<ScalarMatrix> PolyMatrix::coefficients(std::size_t count) const {
  std::vector<ScalarMatrix> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(coefficient(i));
  return out;
}

PolyMatrix PolyMatrix::columns(std::span<const std::size_t> which) const {
  PolyMatrix out(rows_, which.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < which.size(); ++k) {
      if (which[k] >= cols_) throw std::out_of_range("column index out of range");
      out(r, k) = (*this)(r, which[k]);
    }
  return out;
}

bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
}

// --------------------------------------------------------------- rank

std::size_t rank_fq(const Field& f, ScalarMatrix m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  Eigen::Index rank = 0;
  for (Eigen::Index c = 0; c < cols && rank < rows; ++c) {
    Eigen::Index pivot = rank;
    while (pivot < rows && m(pivot, c) == 0) ++pivot;
    if (pivot == rows) continue;
    m.row(pivot).swap(m.row(rank));
    const Elem inv = f.inv(m(rank, c));
    for (Eigen::Index j = c; j < cols; ++j) m(rank, j) = f.mul(m(rank, j), inv);
    for (Eigen::Index r = rank + 1; r < rows; ++r) {
      const Elem factor = m(r, c);
      if (factor == 0) continue;
      for (Eigen::Index j = c; j < cols; ++j) m(r, j) = f.sub(m(r, j), f.mul(factor, m(rank, j)));
    }
    ++rank;
  }
  return static_cast<std::size_t>(rank);
}

namespace {

Elem scalar_det(const Field& f, ScalarMatrix m) {
  const Eigen::Index n = m.rows();
  Elem det = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    while (pivot < n && m(pivot, c) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != c) {
      m.row(pivot).swap(m.row(c));
      det = f.neg(det);
    }
    det = f.mul(det, m(c, c));
    const Elem inv = f.inv(m(c, c));
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const Elem factor = f.mul(m(r, c), inv);
      if (factor == 0) continue;
      for (Eigen::Index j = c; j < n; ++j) m(r, j) = f.sub(m(r, j), f.mul(factor, m(c, j)));
    }
  }
  return det;
}

}  // namespace

// ---------------------------------------------------- Toeplitz / checks

ToeplitzExpansion::ToeplitzExpansion(const Field& f, std::size_t rows, std::size_t cols)
    : field_(f), rows_(rows), cols_(cols) {}

std::size_t ToeplitzExpansion::extend(const ScalarMatrix& next) {
  if (static_cast<std::size_t>(next.rows()) != rows_ || static_cast<std::size_t>(next.cols()) != cols_)
    throw std::invalid_argument("Toeplitz block has the wrong shape");
  blocks_.push_back(next);
  previous_rank_ = basis_.size();

  const std::size_t blocks = blocks_.size();
  const std::size_t width = blocks * cols_;
  for (std::size_t r = 0; r < rows_; ++r) {
    // Top block row of M_t in reversed coordinates: F_t, F_{t-1}, ..., F_0.
    std::vector<Elem> row(width);
    for (std::size_t k = 0; k < blocks; ++k)
      for (std::size_t c = 0; c < cols_; ++c) row[k * cols_ + c] = blocks_[blocks - 1 - k](r, c);

    for (const auto& b : basis_) {
      const Elem factor = row[b.pivot];
      if (factor == 0) continue;
      for (std::size_t j = b.pivot; j < b.values.size(); ++j)
        row[j] = field_.sub(row[j], field_.mul(factor, b.values[j]));
    }
    const auto lead = std::find_if(row.begin(), row.end(), [](Elem v) { return v != 0; });
    if (lead == row.end()) continue;
    const auto pivot = static_cast<std::size_t>(lead - row.begin());
    const Elem inv = field_.inv(*lead);
    for (std::size_t j = pivot; j < width; ++j) row[j] = field_.mul(row[j], inv);
    const auto at = std::lower_bound(basis_.begin(), basis_.end(), pivot,
                                     [](const BasisRow& b, std::size_t p) { return b.pivot < p; });
    basis_.insert(at, BasisRow{pivot, std::move(row)});
  }
  return basis_.size() - previous_rank_;
}

ScalarMatrix ToeplitzExpansion::matrix() const {
  const std::size_t n = blocks_.size();
  ScalarMatrix m = ScalarMatrix::Zero(n * rows_, n * cols_);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.block(i * rows_, j * cols_, rows_, cols_) = blocks_[j - i];
  return m;
}

ToeplitzExpansion build_toeplitz(const Field& f, std::span<const ScalarMatrix> blocks) {
  if (blocks.empty()) throw std::invalid_argument("empty coefficient sequence");
  ToeplitzExpansion tx(f, blocks[0].rows(), blocks[0].cols());
  for (const auto& b : blocks) tx.extend(b);
  return tx;
}

bool rank_condition(const Field& f, std::span<const ScalarMatrix> blocks, std::size_t m) {
  if (blocks.empty()) return m == 0;
  const Eigen::Index rows = blocks[0].rows(), cols = blocks[0].cols();
  ScalarMatrix cat(rows, cols * static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t k = 0; k < blocks.size(); ++k) cat.middleCols(static_cast<Eigen::Index>(k) * cols, cols) = blocks[k];
  return rank_fq(f, std::move(cat)) == m;
}

bool decodable(const Field& f, std::span<const ScalarMatrix> blocks, std::size_t m) {
  if (!rank_condition(f, blocks, m)) return false;
  const auto tx = build_toeplitz(f, blocks);
  return tx.rank() - tx.previous_rank() == m;
}

// ---------------------------------------------------------- determinant

Poly det_cofactor(const Field& f, const PolyMatrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  if (n == 0) return Poly::constant(1);
  if (n > 20) throw std::invalid_argument("matrix too large for cofactor expansion");
  // Laplace expansion along rows, memoised on the set of columns still free:
  // minor(mask) is the determinant of rows [n - popcount(mask), n) restricted
  // to the columns in mask.
  std::unordered_map<std::uint32_t, Poly> memo;
  auto minor = [&](auto&& self, std::uint32_t mask) -> Poly {
    if (mask == 0) return Poly::constant(1);
    if (auto it = memo.find(mask); it != memo.end()) return it->second;
    const std::size_t row = n - static_cast<std::size_t>(std::popcount(mask));
    Poly acc;
    int sign_index = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(mask & (1u << c))) continue;
      const Poly& entry = a(row, c);
      if (!entry.is_zero()) {
        Poly term = mul(f, entry, self(self, mask & ~(1u << c)));
        acc = (sign_index % 2 == 0) ? add(f, acc, term) : sub(f, acc, term);
      }
      ++sign_index;
    }
    memo.emplace(mask, acc);
    return acc;
  };
  return minor(minor, (n == 32 ? 0u : (1u << n)) - 1u);
}

Poly det_interpolate(const Field& f, const PolyMatrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  if (n == 0) return Poly::constant(1);
  std::size_t bound = 0;
  for (std::size_t r = 0; r < n; ++r) {
    int row_deg = -1;
    for (std::size_t c = 0; c < n; ++c) row_deg = std::max(row_deg, a(r, c).degree());
    if (row_deg < 0) return Poly();
    bound += static_cast<std::size_t>(row_deg);
  }
  if (bound + 1 > f.order()) throw std::invalid_argument("field too small for interpolation");

  const std::size_t points = bound + 1;
  std::vector<Elem> xs(points), ys(points);
  for (std::size_t i = 0; i < points; ++i) {
    xs[i] = static_cast<Elem>(i);
    ScalarMatrix at(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) at(r, c) = evaluate(f, a(r, c), xs[i]);
    ys[i] = scalar_det(f, std::move(at));
  }
  // Newton divided differences, then expand the Newton form.
  std::vector<Elem> coef = ys;
  for (std::size_t j = 1; j < points; ++j)
    for (std::size_t i = points - 1; i >= j; --i) {
      coef[i] = f.div(f.sub(coef[i], coef[i - 1]), f.sub(xs[i], xs[i - j]));
      if (i == j) break;
    }
  Poly result = Poly::constant(coef[points - 1]);
  for (std::size_t k = points - 1; k-- > 0;) {
    result = mul(f, result, Poly({f.neg(xs[k]), 1}));
    result = add(f, result, Poly::constant(coef[k]));
  }
  return result.trim();
}

Poly det_oracle(const Field& f, const PolyMatrix& a) {
  const std::size_t n = a.rows();
  if (n <= 4) return det_cofactor(f, a);
  const int deg = std::max(a.degree(), 0);
  if (f.order() > n * static_cast<std::size_t>(deg)) return det_interpolate(f, a);
  return det_cofactor(f, a);
}

PolyMatrix adjugate(const Field& f, const PolyMatrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("adjugate of a non-square matrix");
  PolyMatrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = Poly::constant(1);
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      // adj(j, i) = (-1)^{i+j} det(a without row i and column j)
      PolyMatrix minor(n - 1, n - 1);
      for (std::size_t r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (std::size_t c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = a(r, c);
        }
        ++mr;
      }
      Poly d = det_oracle(f, minor);
      adj(j, i) = ((i + j) % 2 == 0) ? d : sub(f, Poly(), d);
    }
  return adj;
}

std::vector<std::size_t> select_columns(const Field& f, const PolyMatrix& a) {
  const std::size_t m = a.rows(), c = a.cols();
  if (c < m) throw std::domain_error("fewer columns than rows");
  std::vector<std::size_t> pick(m);
  for (std::size_t i = 0; i < m; ++i) pick[i] = i;
  while (true) {
    if (!det_oracle(f, a.columns(pick)).is_zero()) return pick;
    // next combination in lexicographic order
    std::size_t i = m;
    while (i > 0 && pick[i - 1] == c - m + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
  throw std::domain_error("no full-rank column subset");
}

std::vector<RowVector> encode_stream(const Field& f, const PolyMatrix& a, std::span<const RowVector> x,
                                     std::size_t horizon) {
  const std::size_t m = a.rows(), c = a.cols();
  std::vector<Poly> inputs(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<Elem> v(horizon + 1, 0);
    for (std::size_t t = 0; t <= horizon && t < x.size(); ++t) v[t] = x[t](k);
    inputs[k] = Poly(std::move(v));
  }
  std::vector<RowVector> y(horizon + 1, RowVector::Zero(c));
  for (std::size_t j = 0; j < c; ++j) {
    Poly out;
    for (std::size_t k = 0; k < m; ++k) out = add(f, out, poly_mul_trunc(f, inputs[k], a(k, j), horizon));
    for (std::size_t t = 0; t <= horizon; ++t) y[t](j) = out.coeff(t);
  }
  return y;
}

// ------------------------------------------------------ sequential decode

SequentialDecoder::SequentialDecoder(const Field& f, const PolyMatrix& a)
    : field_(f), m_(a.rows()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sequential decoding needs a square matrix");
  det_ = det_oracle(f, a);
  if (det_.is_zero()) throw std::domain_error("global kernel matrix is singular");
  delay_ = static_cast<std::size_t>(det_.valuation());
  std::vector<Elem> u(det_.coeffs().begin() + static_cast<std::ptrdiff_t>(delay_), det_.coeffs().end());
  unit_ = Poly(std::move(u)).trim();
  unit0_inv_ = f.inv(unit_.coeff(0));
  adj_ = adjugate(f, a);
}

std::optional<RowVector> SequentialDecoder::push(const RowVector& y) {
  if (static_cast<std::size_t>(y.size()) != m_) throw std::invalid_argument("received row has the wrong width");
  received_.push_back(y);
  const std::size_t t = received_.size() - 1;

  // w_t = sum_i y_{t-i} adj_i
  RowVector w = RowVector::Zero(m_);
  for (std::size_t i = 0; i <= t; ++i) {
    const RowVector& yi = received_[t - i];
    for (std::size_t j = 0; j < m_; ++j) {
      Elem acc = w(j);
      for (std::size_t k = 0; k < m_; ++k) acc = field_.fma(acc, yi(k), adj_(k, j).coeff(i));
      w(j) = acc;
    }
  }
  // v_t = u_0^{-1} (w_t - sum_{i>=1} u_i v_{t-i})
  for (std::size_t i = 1; i <= t && i < unit_.size(); ++i) {
    const Elem ui = unit_.coeff(i);
    if (ui == 0) continue;
    for (std::size_t j = 0; j < m_; ++j) w(j) = field_.sub(w(j), field_.mul(ui, quotient_[t - i](j)));
  }
  for (std::size_t j = 0; j < m_; ++j) w(j) = field_.mul(w(j), unit0_inv_);
  quotient_.push_back(w);
  if (t < delay_) return std::nullopt;
  return w;
}

DecodeResult sequential_decode(const Field& f, const PolyMatrix& a, std::span<const RowVector> y,
                               std::size_t horizon) {
  SequentialDecoder decoder(f, a);
  if (horizon < decoder.delay()) throw std::domain_error("horizon shorter than the decoding delay");
  if (y.size() <= horizon) throw std::invalid_argument("received stream shorter than the horizon");
  DecodeResult result;
  result.delay = decoder.delay();
  for (std::size_t t = 0; t <= horizon; ++t)
    if (auto x = decoder.push(y[t])) result.symbols.push_back(std::move(*x));
  return result;
}

}  // namespace arcnc
