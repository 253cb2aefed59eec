#include <random>
#include <set>
#include <vector>

#include "arcnc/poly.hpp"
#include "doctest.h"

using namespace arcnc;

namespace {

ScalarMatrix mat(std::initializer_list<std::initializer_list<Elem>> rows) {
  ScalarMatrix m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (auto r : rows) {
    Eigen::Index j = 0;
    for (Elem v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

std::vector<ScalarMatrix> random_blocks(std::mt19937_64& rng, const Field& f, std::size_t rows, std::size_t cols,
                                        std::size_t count) {
  std::vector<ScalarMatrix> out;
  for (std::size_t i = 0; i < count; ++i) {
    ScalarMatrix b(rows, cols);
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index c = 0; c < b.cols(); ++c) b(r, c) = static_cast<Elem>(rng() % f.order());
    out.push_back(b);
  }
  return out;
}

// |row space| = q^rank: enumerate every combination of rows.
std::size_t rank_by_enumeration(const Field& f, const ScalarMatrix& m) {
  const std::size_t q = f.order(), rows = m.rows();
  std::set<std::vector<Elem>> span;
  std::vector<Elem> coef(rows, 0);
  for (;;) {
    std::vector<Elem> v(m.cols(), 0);
    for (std::size_t r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) v[c] = f.fma(v[c], coef[r], m(r, c));
    span.insert(v);
    std::size_t i = 0;
    while (i < rows && ++coef[i] == q) coef[i++] = 0;
    if (i == rows) break;
  }
  std::size_t rank = 0, size = 1;
  while (size < span.size()) {
    size *= q;
    ++rank;
  }
  return rank;
}

Poly naive_product(const Field& f, const Poly& a, const Poly& b, std::size_t t) {
  std::vector<Elem> c(t + 1, 0);
  for (std::size_t i = 0; i <= t; ++i)
    for (std::size_t j = 0; j <= i; ++j) c[i] = f.fma(c[i], a.coeff(j), b.coeff(i - j));
  return Poly(c);
}

PolyMatrix poly_matrix(std::initializer_list<std::initializer_list<Poly>> rows) {
  PolyMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (auto r : rows) {
    std::size_t j = 0;
    for (const Poly& p : r) m(i, j++) = p;
    ++i;
  }
  return m;
}

const Poly one = Poly::constant(1);
const Poly z = Poly({0, 1});
const Poly one_plus_z = Poly({1, 1});

}  // namespace

TEST_CASE("poly basics") {
  CHECK(Poly().degree() == -1);
  CHECK(Poly({0, 0}).degree() == -1);
  CHECK(Poly({0, 0, 3, 0}).degree() == 2);
  CHECK(Poly({0, 0, 3, 0}).valuation() == 2);
  CHECK(Poly({1, 2, 0, 0}) == Poly({1, 2}));
  CHECK(Poly({1, 2, 0, 0}).trimmed().size() == 2);
  const Field f3(3);
  CHECK(add(f3, Poly({1, 2}), Poly({2, 2, 1})) == Poly({0, 1, 1}));
  CHECK(sub(f3, Poly({1}), Poly({2})) == Poly({2}));
  CHECK(scale(f3, Poly({1, 2}), 2) == Poly({2, 1}));
  CHECK(evaluate(f3, Poly({1, 1, 1}), 1) == 0);
  CHECK(Poly::monomial(2, 3) == Poly({0, 0, 0, 2}));
}

TEST_CASE("poly_mul_trunc examples") {
  const Field f2(2), f3(3);
  CHECK(poly_mul_trunc(f2, one_plus_z, one_plus_z, 2) == Poly({1, 0, 1}));
  CHECK(poly_mul_trunc(f2, one, one_plus_z, 0) == Poly({1}));
  CHECK(poly_mul_trunc(f3, Poly({1, 2}), Poly({2, 1}), 2) == Poly({2, 2, 2}));
}

TEST_CASE("poly_mul_trunc equals truncated product, exhaustive over F_2 degree <= 3") {
  const Field f2(2);
  for (unsigned a = 0; a < 16; ++a)
    for (unsigned b = 0; b < 16; ++b) {
      const Poly pa({a & 1, a >> 1 & 1, a >> 2 & 1, a >> 3 & 1});
      const Poly pb({b & 1, b >> 1 & 1, b >> 2 & 1, b >> 3 & 1});
      const Poly full = mul(f2, pa, pb);
      for (std::size_t t = 0; t <= 7; ++t) {
        std::vector<Elem> c(t + 1);
        for (std::size_t i = 0; i <= t; ++i) c[i] = full.coeff(i);
        REQUIRE(poly_mul_trunc(f2, pa, pb, t) == Poly(c));
        REQUIRE(poly_mul_trunc(f2, pa, pb, t) == naive_product(f2, pa, pb, t));
      }
    }
}

TEST_CASE("rank_fq examples") {
  const Field f2(2);
  CHECK(rank_fq(f2, ScalarMatrix::Identity(2, 2)) == 2);
  CHECK(rank_fq(f2, mat({{1, 1}, {1, 1}})) == 1);
  CHECK(rank_fq(f2, mat({{1, 1, 0, 1}, {1, 1, 0, 0}})) == 2);
  CHECK(rank_fq(f2, ScalarMatrix::Zero(3, 2)) == 0);
}

TEST_CASE("rank_fq matches row-space enumeration") {
  std::mt19937_64 rng(11);
  for (std::uint32_t q : {2u, 3u, 4u, 5u}) {
    const Field f(q);
    for (int i = 0; i < 300; ++i) {
      const std::size_t rows = 1 + rng() % 4, cols = 1 + rng() % 5;
      const ScalarMatrix m = random_blocks(rng, f, rows, cols, 1)[0];
      REQUIRE(rank_fq(f, m) == rank_by_enumeration(f, m));
    }
  }
}

TEST_CASE("Toeplitz expansion structure and incremental rank") {
  const Field f2(2);
  SUBCASE("t = 0 is F_0") {
    const auto m0 = mat({{1, 0, 1}, {0, 1, 1}});
    const auto tx = build_toeplitz(f2, std::vector<ScalarMatrix>{m0});
    CHECK(tx.matrix() == m0);
    CHECK(tx.rank() == 2);
    CHECK(tx.previous_rank() == 0);
  }
  SUBCASE("unit upper triangular") {
    const auto tx = build_toeplitz(f2, std::vector<ScalarMatrix>{ScalarMatrix::Identity(2, 2), mat({{0, 1}, {0, 0}})});
    CHECK(tx.matrix().rows() == 4);
    CHECK(tx.rank() == 4);
  }
  SUBCASE("fig1 sink r6") {
    const std::vector<ScalarMatrix> blocks{mat({{1, 1}, {1, 1}}), mat({{0, 1}, {0, 0}})};
    const auto tx = build_toeplitz(f2, blocks);
    CHECK(tx.rank() == 3);
    CHECK(tx.previous_rank() == 1);
    const ScalarMatrix expect = mat({{1, 1, 0, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}});
    CHECK(tx.matrix() == expect);
  }
  SUBCASE("random sequences") {
    std::mt19937_64 rng(3);
    for (std::uint32_t q : {2u, 3u, 4u}) {
      const Field f(q);
      for (int i = 0; i < 100; ++i) {
        const std::size_t rows = 1 + rng() % 3, cols = 1 + rng() % 4;
        const auto blocks = random_blocks(rng, f, rows, cols, 5);
        ToeplitzExpansion tx(f, rows, cols);
        std::size_t prev = 0;
        for (std::size_t t = 0; t < blocks.size(); ++t) {
          const std::size_t inc = tx.extend(blocks[t]);
          const ScalarMatrix full = tx.matrix();
          REQUIRE(full.rows() == static_cast<Eigen::Index>((t + 1) * rows));
          // block (i, j) = F_{j-i} above the diagonal, zero below
          for (std::size_t bi = 0; bi <= t; ++bi)
            for (std::size_t bj = 0; bj <= t; ++bj) {
              const ScalarMatrix blk = full.block(bi * rows, bj * cols, rows, cols);
              if (bj >= bi)
                REQUIRE(blk == blocks[bj - bi]);
              else
                REQUIRE(blk.isZero());
            }
          const std::size_t r = rank_fq(f, full);
          REQUIRE(tx.rank() == r);
          REQUIRE(inc == r - prev);
          REQUIRE(inc <= (t + 1) * rows - prev);
          prev = r;
        }
      }
    }
  }
  CHECK_THROWS_AS(ToeplitzExpansion(f2, 2, 2).extend(ScalarMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("decodability examples") {
  const Field f2(2);
  const std::vector<ScalarMatrix> r6_0{mat({{1, 1}, {1, 1}})};
  const std::vector<ScalarMatrix> r6_1{mat({{1, 1}, {1, 1}}), mat({{0, 1}, {0, 0}})};
  CHECK_FALSE(decodable(f2, r6_0, 2));
  CHECK(decodable(f2, r6_1, 2));
  CHECK(rank_condition(f2, r6_1, 2));
  for (std::size_t t = 0; t < 4; ++t) {
    std::vector<ScalarMatrix> blocks{ScalarMatrix::Identity(3, 3)};
    for (std::size_t i = 0; i < t; ++i) blocks.push_back(ScalarMatrix::Zero(3, 3));
    CHECK(decodable(f2, blocks, 3));
  }
}

// The two conditions are checked against the determinant in the directions
// that hold for every matrix: a sink that passes is invertible, and an
// invertible F passes at t = valuation(det F). det != 0 alone does not
// make F pass at every t (counterexample at the end).
TEST_CASE("decodable versus the determinant oracle") {
  std::mt19937_64 rng(2024);
  std::size_t checked = 0;
  for (std::uint32_t q : {2u, 3u, 4u, 5u}) {
    const Field f(q);
    for (int i = 0; i < 400; ++i) {
      const std::size_t m = 1 + rng() % 3, t = rng() % 5;
      const auto blocks = random_blocks(rng, f, m, m, t + 1);
      const PolyMatrix F = PolyMatrix::from_coefficients(blocks);
      const Poly det = det_oracle(f, F);
      if (decodable(f, blocks, m)) {
        REQUIRE_FALSE(det.is_zero());
        REQUIRE(rank_condition(f, blocks, m));
      }
      if (!det.is_zero()) {
        const std::size_t v = static_cast<std::size_t>(det.valuation());
        std::vector<ScalarMatrix> padded = blocks;
        while (padded.size() < v + 1) padded.push_back(ScalarMatrix::Zero(m, m));
        padded.resize(v + 1);
        REQUIRE(decodable(f, padded, m));
        // Passing earlier, at s < v, needs F G = z^s I for some G, so v <= m s.
        for (std::size_t s = 0; s < v; ++s)
          if (decodable(f, std::vector<ScalarMatrix>(padded.begin(), padded.begin() + s + 1), m))
            REQUIRE(v <= m * s);
      }
      ++checked;
    }
  }
  CHECK(checked == 1600);

  const Field f2(2);
  const std::vector<ScalarMatrix> zz{mat({{0, 1}, {0, 0}}), mat({{1, 0}, {0, 1}})};  // [[z, 1], [0, z]]
  CHECK(det_oracle(f2, PolyMatrix::from_coefficients(zz)) == Poly({0, 0, 1}));
  CHECK_FALSE(decodable(f2, zz, 2));
}

TEST_CASE("determinant oracle") {
  const Field f2(2);
  CHECK(det_oracle(f2, poly_matrix({{one, one_plus_z}, {one, one}})) == z);
  CHECK(det_oracle(f2, PolyMatrix::identity(3)) == one);
  CHECK(det_oracle(f2, poly_matrix({{one, one}, {one, one}})).is_zero());

  std::mt19937_64 rng(8);
  const Field big(257);
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = 1 + rng() % 4, t = rng() % 4;
    const PolyMatrix F = PolyMatrix::from_coefficients(random_blocks(rng, big, m, m, t + 1));
    REQUIRE(det_cofactor(big, F) == det_interpolate(big, F));
    // F adj(F) = det(F) I
    const PolyMatrix adj = adjugate(big, F);
    const Poly det = det_cofactor(big, F);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) {
        Poly s;
        for (std::size_t k = 0; k < m; ++k) s = add(big, s, mul(big, F(r, k), adj(k, c)));
        REQUIRE(s == (r == c ? det : Poly()));
      }
  }
}

TEST_CASE("coefficient view round trip") {
  std::mt19937_64 rng(4);
  const Field f(5);
  const auto blocks = random_blocks(rng, f, 2, 3, 4);
  const PolyMatrix F = PolyMatrix::from_coefficients(blocks);
  CHECK(F.rows() == 2);
  CHECK(F.cols() == 3);
  const auto back = F.coefficients(4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(back[i] == blocks[i]);
  CHECK(F.coefficient(9).isZero());
  const std::vector<std::size_t> cols{2, 0};
  const PolyMatrix sub = F.columns(cols);
  CHECK(sub(1, 0) == F(1, 2));
  CHECK(sub(0, 1) == F(0, 0));
}

TEST_CASE("select_columns") {
  const Field f2(2);
  const PolyMatrix wide = PolyMatrix::from_coefficients(std::vector<ScalarMatrix>{mat({{1, 1, 0}, {1, 1, 1}})});
  CHECK(select_columns(f2, wide) == std::vector<std::size_t>{0, 2});
  CHECK(select_columns(f2, PolyMatrix::identity(2)) == std::vector<std::size_t>{0, 1});
  const PolyMatrix flat = PolyMatrix::from_coefficients(std::vector<ScalarMatrix>{mat({{1, 1, 1}, {1, 1, 1}})});
  CHECK_THROWS_AS(select_columns(f2, flat), std::domain_error);
}

TEST_CASE("sequential decoding") {
  const Field f2(2);
  SUBCASE("fig1 sink r6 recovers x_{t-1} at time t") {
    const PolyMatrix F = poly_matrix({{one, one_plus_z}, {one, one}});
    std::mt19937_64 rng(1);
    std::vector<RowVector> x(8, RowVector(2));
    for (auto& v : x) v << static_cast<Elem>(rng() & 1), static_cast<Elem>(rng() & 1);
    const auto y = encode_stream(f2, F, x, 7);
    SequentialDecoder dec(f2, F);
    CHECK(dec.delay() == 1);
    CHECK(dec.determinant() == z);
    CHECK_FALSE(dec.push(y[0]).has_value());
    for (std::size_t t = 1; t < 8; ++t) {
      const auto got = dec.push(y[t]);
      REQUIRE(got.has_value());
      CHECK(*got == x[t - 1]);
    }
  }
  SUBCASE("identity passes symbols through") {
    const std::vector<RowVector> y{RowVector::Constant(2, 1), RowVector::Zero(2)};
    const auto r = sequential_decode(f2, PolyMatrix::identity(2), y, 1);
    CHECK(r.delay == 0);
    CHECK(r.symbols == y);
  }
  SUBCASE("random full-rank matrices round trip") {
    std::mt19937_64 rng(77);
    for (std::uint32_t q : {2u, 3u, 8u}) {
      const Field f(q);
      int done = 0;
      while (done < 100) {
        const std::size_t m = 1 + rng() % 3, t = rng() % 4;
        const PolyMatrix F = PolyMatrix::from_coefficients(random_blocks(rng, f, m, m, t + 1));
        const Poly det = det_oracle(f, F);
        if (det.is_zero()) continue;
        const std::size_t delay = det.valuation(), horizon = delay + 6;
        std::vector<RowVector> x(horizon + 1, RowVector(m));
        for (auto& v : x)
          for (std::size_t j = 0; j < m; ++j) v(j) = static_cast<Elem>(rng() % q);
        const auto y = encode_stream(f, F, x, horizon);
        const auto r = sequential_decode(f, F, y, horizon);
        REQUIRE(r.delay == delay);
        REQUIRE(r.symbols.size() == horizon - delay + 1);
        for (std::size_t i = 0; i < r.symbols.size(); ++i) REQUIRE(r.symbols[i] == x[i]);
        const auto again = encode_stream(f, F, r.symbols, horizon - delay);
        for (std::size_t i = 0; i < again.size(); ++i) REQUIRE(again[i] == y[i]);
        ++done;
      }
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(SequentialDecoder(f2, poly_matrix({{one, one}, {one, one}})), std::domain_error);
    const PolyMatrix F = poly_matrix({{one, one_plus_z}, {one, one}});
    const std::vector<RowVector> y{RowVector::Zero(2)};
    CHECK_THROWS_AS(sequential_decode(f2, F, y, 0), std::domain_error);
    CHECK_THROWS_AS(SequentialDecoder(f2, PolyMatrix(2, 3)), std::invalid_argument);
  }
}
