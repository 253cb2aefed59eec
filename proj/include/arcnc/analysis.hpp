#ifndef ARCNC_ANALYSIS_HPP
#define ARCNC_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace arcnc {

/// Exact mode for the closed forms. All templates below are instantiated
/// for double and Rational.
using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Rational& r);  // "num/den", or "num" for integers

/// Success-probability lower bound (1 - d/q^{t+1})^eta. nullopt when the
/// bound does not apply (q^{t+1} <= d). d = 0 gives 1.
template <class S>
std::optional<S> ho_bound(std::uint64_t d, std::uint64_t q, std::uint64_t eta, std::uint64_t t);

/// T_0 = ceil(lg_q d - lg_q(1 - (1-eps)^{1/eta})) - 1, clamped at 0 and
/// bumped until ho_bound(d, q, eta, T_0) >= 1 - eps actually holds.
/// Throws std::invalid_argument unless 0 < eps < 1, d >= 1, eta >= 1.
std::uint64_t t0_for_epsilon(std::uint64_t d, std::uint64_t q, std::uint64_t eta, double eps);

/// Q = prod_{l=1..m} (1 - q^{-tl}): probability that an m x m matrix over
/// F_{q^t} is invertible. Q = 0 at t = 0.
template <class S>
S full_rank_prob_Q(std::uint64_t q, std::uint64_t m, std::uint64_t t);

/// sum_{t>=1} (1 - Q(q, m, t)), stopped once the remaining tail is below
/// m q^{-t} / (1 - 1/q) < tol.
double exact_ET(std::uint64_t q, std::uint64_t m, double tol = 1e-9);

/// sum_{k=1..m} (-1)^{k-1} C(m,k) / (q^k - 1)
template <class S>
S et_upper(std::uint64_t m, std::uint64_t q);

/// sum_{k=1..m} (-1)^{k-1} C(m,k) / (q^{km} - 1)
template <class S>
S et_lower(std::uint64_t m, std::uint64_t q);

/// et_upper + 2 sum_{k=1..m} (-1)^{k-1} C(m,k) (q^k / (q^k - 1))^2
template <class S>
S et2_upper(std::uint64_t m, std::uint64_t q);

/// et_upper(m,q) * et_upper(m-lambda,q); requires 0 < lambda < m.
template <class S>
S rho_lambda_upper(std::uint64_t m, std::uint64_t lambda, std::uint64_t q);

/// max over lambda = 1..m-1 of rho_lambda_upper; nullopt for m = 1.
template <class S>
std::optional<S> rho_upper(std::uint64_t m, std::uint64_t q);

/// et2_upper/d + (m/n) rho_upper - (1 + m/n) et_lower^2 with d = C(n,m);
/// the rho term is dropped when m = 1. Requires n >= m >= 1.
template <class S>
S var_upper(std::uint64_t n, std::uint64_t m, std::uint64_t q);

/// Sinks sharing at least one parent with a given sink of the (n,m)
/// combination network, the sink itself included: C(n-1, m-1).
std::uint64_t shared_parent_count(std::uint64_t n, std::uint64_t m);
/// shared_parent_count / C(n,m) = m/n.
Rational shared_parent_fraction(std::uint64_t n, std::uint64_t m);

/// Upper bound on E[T_N]: sum_{t>=1} P(T_N >= t) with each term bounded by
/// 1 - ho_bound(d, q, eta, t-1), or by 1 where that bound does not apply.
double etn_upper(std::uint64_t d, std::uint64_t q, std::uint64_t eta, double tol = 1e-9);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

}  // namespace arcnc

#endif  // ARCNC_ANALYSIS_HPP
