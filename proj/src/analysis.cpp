#include "arcnc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arcnc {

namespace {

template <class S>
S power(S base, std::uint64_t e) {
  S r = 1;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

template <class S>
S inverse_power(std::uint64_t q, std::uint64_t e) {
  return S(1) / power(S(q), e);
}

void check_q(std::uint64_t q) {
  if (q < 2) throw std::invalid_argument("field order must be at least 2");
}

}  // namespace

std::string to_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

template <class S>
std::optional<S> ho_bound(std::uint64_t d, std::uint64_t q, std::uint64_t eta, std::uint64_t t) {
  check_q(q);
  if (d == 0) return S(1);
  const S qt = power(S(q), t + 1);
  if (qt <= S(d)) return std::nullopt;
  return power(S(1) - S(d) / qt, eta);
}

std::uint64_t t0_for_epsilon(std::uint64_t d, std::uint64_t q, std::uint64_t eta, double eps) {
  check_q(q);
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (d == 0 || eta == 0) throw std::invalid_argument("d and eta must be positive");
  const double lq = std::log(static_cast<double>(q));
  const double x = std::log(static_cast<double>(d)) / lq - std::log1p(-std::pow(1 - eps, 1.0 / eta)) / lq;
  double c = std::ceil(x);
  if (std::abs(x - std::round(x)) < 1e-9) c = std::round(x);
  std::uint64_t t0 = c >= 1 ? static_cast<std::uint64_t>(c) - 1 : 0;
  for (;; ++t0) {
    const auto b = ho_bound<double>(d, q, eta, t0);
    if (b && *b >= 1 - eps - 1e-12) return t0;
  }
}

template <class S>
S full_rank_prob_Q(std::uint64_t q, std::uint64_t m, std::uint64_t t) {
  check_q(q);
  S r = 1;
  for (std::uint64_t l = 1; l <= m; ++l) r *= S(1) - inverse_power<S>(q, t * l);
  return r;
}

double exact_ET(std::uint64_t q, std::uint64_t m, double tol) {
  check_q(q);
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  const double qd = static_cast<double>(q);
  double sum = 0;
  for (std::uint64_t t = 1;; ++t) {
    if (static_cast<double>(m) * std::pow(qd, -static_cast<double>(t)) / (1 - 1 / qd) < tol) break;
    sum += 1 - full_rank_prob_Q<double>(q, m, t);
  }
  return sum;
}

template <class S>
S et_upper(std::uint64_t m, std::uint64_t q) {
  check_q(q);
  S r = 0;
  for (std::uint64_t k = 1; k <= m; ++k) {
    const S term = S(binomial(m, k)) / (power(S(q), k) - 1);
    r += k % 2 ? term : S(-term);
  }
  return r;
}

template <class S>
S et_lower(std::uint64_t m, std::uint64_t q) {
  check_q(q);
  S r = 0;
  for (std::uint64_t k = 1; k <= m; ++k) {
    const S term = S(binomial(m, k)) / (power(S(q), k * m) - 1);
    r += k % 2 ? term : S(-term);
  }
  return r;
}

template <class S>
S et2_upper(std::uint64_t m, std::uint64_t q) {
  S r = 0;
  for (std::uint64_t k = 1; k <= m; ++k) {
    const S qk = power(S(q), k);
    const S ratio = qk / (qk - 1);
    const S term = S(binomial(m, k)) * ratio * ratio;
    r += k % 2 ? term : S(-term);
  }
  return et_upper<S>(m, q) + 2 * r;
}

template <class S>
S rho_lambda_upper(std::uint64_t m, std::uint64_t lambda, std::uint64_t q) {
  if (lambda == 0 || lambda >= m) throw std::invalid_argument("rho needs 0 < lambda < m");
  return et_upper<S>(m, q) * et_upper<S>(m - lambda, q);
}

template <class S>
std::optional<S> rho_upper(std::uint64_t m, std::uint64_t q) {
  if (m < 2) return std::nullopt;
  S best = rho_lambda_upper<S>(m, 1, q);
  for (std::uint64_t l = 2; l < m; ++l) best = std::max(best, rho_lambda_upper<S>(m, l, q));
  return best;
}

template <class S>
S var_upper(std::uint64_t n, std::uint64_t m, std::uint64_t q) {
  if (m == 0 || n < m) throw std::invalid_argument("var_upper needs n >= m >= 1");
  const S d = S(binomial(n, m));
  const S frac = S(m) / S(n);
  const S lb = et_lower<S>(m, q);
  S r = et2_upper<S>(m, q) / d - (1 + frac) * lb * lb;
  if (auto rho = rho_upper<S>(m, q)) r += frac * *rho;
  return r;
}

std::uint64_t shared_parent_count(std::uint64_t n, std::uint64_t m) {
  if (m == 0 || n < m) throw std::invalid_argument("needs n >= m >= 1");
  return binomial(n - 1, m - 1);
}

Rational shared_parent_fraction(std::uint64_t n, std::uint64_t m) {
  return Rational(shared_parent_count(n, m)) / Rational(binomial(n, m));
}

double etn_upper(std::uint64_t d, std::uint64_t q, std::uint64_t eta, double tol) {
  check_q(q);
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  const double qd = static_cast<double>(q);
  double sum = 0;
  for (std::uint64_t t = 1;; ++t) {
    const double qt = std::pow(qd, static_cast<double>(t));
    if (qt > static_cast<double>(d) &&
        static_cast<double>(eta) * static_cast<double>(d) / qt / (1 - 1 / qd) < tol)
      break;
    const auto b = ho_bound<double>(d, q, eta, t - 1);
    sum += b ? 1 - *b : 1.0;
  }
  return sum;
}

#define ARCNC_INSTANTIATE(S)                                                                        \
  template std::optional<S> ho_bound<S>(std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t); \
  template S full_rank_prob_Q<S>(std::uint64_t, std::uint64_t, std::uint64_t);                     \
  template S et_upper<S>(std::uint64_t, std::uint64_t);                                            \
  template S et_lower<S>(std::uint64_t, std::uint64_t);                                            \
  template S et2_upper<S>(std::uint64_t, std::uint64_t);                                           \
  template S rho_lambda_upper<S>(std::uint64_t, std::uint64_t, std::uint64_t);                     \
  template std::optional<S> rho_upper<S>(std::uint64_t, std::uint64_t);                            \
  template S var_upper<S>(std::uint64_t, std::uint64_t, std::uint64_t);

ARCNC_INSTANTIATE(double)
ARCNC_INSTANTIATE(Rational)

#undef ARCNC_INSTANTIATE

}  // namespace arcnc
