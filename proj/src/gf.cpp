#include "arcnc/gf.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace arcnc {

namespace {

constexpr std::uint32_t kDefaultModuli[17] = {
    0,       0,       0x7,     0xB,     0x13,    0x25,   0x43,   0x83,   0x11D,
    0x211,   0x409,   0x805,   0x1053,  0x201B,  0x4443, 0x8003, 0x1100B,
};

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

int degree_gf2(std::uint64_t p) { return p == 0 ? -1 : 63 - std::countl_zero(p); }

std::uint64_t mod_gf2(std::uint64_t a, std::uint64_t m) {
  const int dm = degree_gf2(m);
  for (int da = degree_gf2(a); da >= dm; da = degree_gf2(a)) a ^= m << (da - dm);
  return a;
}

std::uint32_t mulmod_gf2(std::uint32_t a, std::uint32_t b, std::uint32_t m) {
  return static_cast<std::uint32_t>(mod_gf2(clmul(a, b), m));
}

}  // namespace

std::uint32_t default_modulus(unsigned k) {
  if (k < 2 || k > 16) throw std::invalid_argument("no default modulus for F_2^" + std::to_string(k));
  return kDefaultModuli[k];
}

std::uint64_t clmul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    a <<= 1;
    b >>= 1;
  }
  return r;
}

bool is_irreducible_gf2(std::uint32_t poly) {
  const int deg = degree_gf2(poly);
  if (deg < 1) return false;
  for (std::uint64_t d = 2; degree_gf2(d) <= deg / 2; ++d)
    if (mod_gf2(poly, d) == 0) return false;
  return true;
}

Field::Field(std::uint32_t q, std::optional<std::uint32_t> modulus) : q_(q) {
  if (q < 2) throw std::invalid_argument("field order must be at least 2");
  if (is_prime(q)) {
    if (q > (1u << 31)) throw std::invalid_argument("prime field order too large");
    if (modulus && q != 2) throw std::invalid_argument("modulus given for a prime field");
    kind_ = FieldKind::prime;
    return;
  }
  if (!std::has_single_bit(q) || q > (1u << 16)) {
    std::ostringstream os;
    os << "unsupported field order " << q << ": need a prime or 2^k with k <= 16";
    throw std::invalid_argument(os.str());
  }
  const unsigned k = std::countr_zero(q);
  const std::uint32_t mod = modulus.value_or(default_modulus(k));
  if (degree_gf2(mod) != static_cast<int>(k)) {
    std::ostringstream os;
    os << "modulus 0x" << std::hex << mod << " does not have degree " << std::dec << k;
    throw std::invalid_argument(os.str());
  }
  if (!is_irreducible_gf2(mod)) {
    std::ostringstream os;
    os << "modulus 0x" << std::hex << mod << " is reducible over F_2";
    throw std::invalid_argument(os.str());
  }
  kind_ = FieldKind::binary_extension;
  modulus_ = mod;

  // Tables are built from a primitive element, which need not be x when the
  // caller supplies an irreducible but non-primitive modulus.
  const std::uint32_t group = q - 1;
  auto tables = std::make_shared<Tables>();
  tables->exp.resize(2 * static_cast<std::size_t>(group));
  tables->log.assign(q, 0);
  for (std::uint32_t g = 2; g < q; ++g) {
    std::uint32_t x = 1;
    std::uint32_t i = 0;
    bool primitive = true;
    for (; i < group; ++i) {
      if (i > 0 && x == 1) {
        primitive = false;
        break;
      }
      tables->exp[i] = x;
      tables->log[x] = i;
      x = mulmod_gf2(x, g, mod);
    }
    if (primitive) break;
  }
  for (std::uint32_t i = 0; i < group; ++i) tables->exp[i + group] = tables->exp[i];
  tables_ = std::move(tables);
  exp_ = tables_->exp.data();
  log_ = tables_->log.data();
}

double Field::log2_order() const { return std::log2(static_cast<double>(q_)); }

std::string Field::describe() const {
  std::ostringstream os;
  os << "F_" << q_;
  if (kind_ == FieldKind::binary_extension) os << " (modulus 0x" << std::hex << modulus_ << ")";
  return os.str();
}

Elem Field::inv(Elem a) const {
  if (a == 0 || a >= q_) throw std::domain_error("inverse of zero or out-of-range element");
  if (kind_ == FieldKind::binary_extension) return exp_[(q_ - 1) - log_[a]];
  // Fermat: a^(q-2)
  std::uint64_t result = 1, base = a, e = q_ - 2;
  while (e) {
    if (e & 1) result = result * base % q_;
    base = base * base % q_;
    e >>= 1;
  }
  return static_cast<Elem>(result);
}

}  // namespace arcnc
