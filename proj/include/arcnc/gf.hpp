#ifndef ARCNC_GF_HPP
#define ARCNC_GF_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace arcnc {

/// Field elements are represented by their integer label in [0, q).
/// For F_{2^k} the label is the coefficient bitmask of a polynomial in the
/// field generator; for prime fields it is the residue.
using Elem = std::uint32_t;

enum class FieldKind { prime, binary_extension };

/// Default reduction polynomials for F_{2^k}, indexed by k (entries 0 and 1
/// unused). All are primitive.
///
///   k=2  x^2+x+1          k=9  x^9+x^4+1
///   k=3  x^3+x+1          k=10 x^10+x^3+1
///   k=4  x^4+x+1          k=11 x^11+x^2+1
///   k=5  x^5+x^2+1        k=12 x^12+x^6+x^4+x+1
///   k=6  x^6+x+1          k=13 x^13+x^4+x^3+x+1
///   k=7  x^7+x+1          k=14 x^14+x^10+x^6+x+1
///   k=8  x^8+x^4+x^3+x^2+1 k=15 x^15+x+1
///                          k=16 x^16+x^12+x^3+x+1
std::uint32_t default_modulus(unsigned k);

/// Carry-less multiply of two F_2[x] polynomials (bitmasks).
std::uint64_t clmul(std::uint64_t a, std::uint64_t b);

/// Irreducibility over F_2 by trial division with every polynomial of
/// degree <= deg/2.
bool is_irreducible_gf2(std::uint32_t poly);

/// A finite field F_q, either prime (modular arithmetic) or F_{2^k} with
/// k <= 16 (log/antilog tables). Copies share the immutable tables.
class Field {
 public:
  /// Throws std::invalid_argument for unsupported q or a reducible /
  /// wrong-degree modulus. The modulus argument is only meaningful for
  /// q = 2^k, k >= 2; q = 2 is always the prime field.
  explicit Field(std::uint32_t q, std::optional<std::uint32_t> modulus = std::nullopt);

  std::uint32_t order() const { return q_; }
  FieldKind kind() const { return kind_; }
  /// Reduction polynomial bitmask; 0 for prime fields.
  std::uint32_t modulus() const { return modulus_; }
  double log2_order() const;
  std::string describe() const;

  bool contains(Elem a) const { return a < q_; }

  Elem add(Elem a, Elem b) const {
    if (kind_ == FieldKind::binary_extension) return a ^ b;
    const Elem s = a + b;
    return s >= q_ ? s - q_ : s;
  }

  Elem neg(Elem a) const {
    if (kind_ == FieldKind::binary_extension || a == 0) return a;
    return q_ - a;
  }

  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }

  Elem mul(Elem a, Elem b) const {
    if (a == 0 || b == 0) return 0;
    if (kind_ == FieldKind::binary_extension) return exp_[log_[a] + log_[b]];
    return static_cast<Elem>((static_cast<std::uint64_t>(a) * b) % q_);
  }

  /// Throws std::domain_error on zero.
  Elem inv(Elem a) const;

  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

  /// a + b*c, the inner step of every convolution and elimination loop.
  Elem fma(Elem a, Elem b, Elem c) const { return add(a, mul(b, c)); }

  friend bool operator==(const Field& a, const Field& b) {
    return a.q_ == b.q_ && a.modulus_ == b.modulus_;
  }

 private:
  struct Tables {
    std::vector<Elem> exp;  // length 2(q-1) so log a + log b never wraps
    std::vector<std::uint32_t> log;
  };

  std::uint32_t q_ = 0;
  FieldKind kind_ = FieldKind::prime;
  std::uint32_t modulus_ = 0;
  std::shared_ptr<const Tables> tables_;
  const Elem* exp_ = nullptr;
  const std::uint32_t* log_ = nullptr;
};

}  // namespace arcnc

#endif  // ARCNC_GF_HPP
