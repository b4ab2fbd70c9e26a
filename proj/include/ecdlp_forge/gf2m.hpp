// Binary field arithmetic GF(2^m) in polynomial basis.
//
// This is the classical reference every synthesized circuit is checked
// against. Multiplication here is plain schoolbook product plus long-division
// reduction; it never goes through the reduction-matrix formulation used by
// the circuit generators.
#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ecdlp_forge {

/// Thrown when an inverse of zero is requested.
class NotInvertible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Polynomial over GF(2), trimmed: no zero words past the highest set bit.
class BinaryPoly {
 public:
  BinaryPoly() = default;

  static BinaryPoly from_u64(std::uint64_t v) {
    BinaryPoly p;
    if (v != 0) p.words_.push_back(v);
    return p;
  }

  static BinaryPoly monomial(unsigned degree) {
    BinaryPoly p;
    p.set(degree, true);
    return p;
  }

  // Hexadecimal, bit i = coefficient of x^i. An optional 0x prefix is allowed.
  static BinaryPoly from_hex(std::string_view text) {
    if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
      text.remove_prefix(2);
    if (text.empty()) throw std::invalid_argument("empty hex polynomial");
    BinaryPoly p;
    unsigned bit = 0;
    for (auto it = text.rbegin(); it != text.rend(); ++it, bit += 4) {
      const char ch = *it;
      unsigned nibble = 0;
      if (ch >= '0' && ch <= '9') nibble = static_cast<unsigned>(ch - '0');
      else if (ch >= 'a' && ch <= 'f') nibble = static_cast<unsigned>(ch - 'a' + 10);
      else if (ch >= 'A' && ch <= 'F') nibble = static_cast<unsigned>(ch - 'A' + 10);
      else throw std::invalid_argument("invalid hex digit '" + std::string(1, ch) + "'");
      for (unsigned k = 0; k < 4; ++k)
        if ((nibble >> k) & 1U) p.set(bit + k, true);
    }
    return p;
  }

  std::string to_hex() const {
    if (is_zero()) return "0x0";
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    const unsigned top = *degree();
    for (int nib = static_cast<int>(top / 4); nib >= 0; --nib) {
      unsigned v = 0;
      for (unsigned k = 0; k < 4; ++k)
        if (bit(static_cast<unsigned>(nib) * 4 + k)) v |= 1U << k;
      out.push_back(kDigits[v]);
    }
    return "0x" + out;
  }

  bool is_zero() const { return words_.empty(); }

  /// Degree of the polynomial; empty for the zero polynomial.
  std::optional<unsigned> degree() const {
    if (words_.empty()) return std::nullopt;
    const std::uint64_t top = words_.back();
    return static_cast<unsigned>((words_.size() - 1) * 64 + 63 - std::countl_zero(top));
  }

  bool bit(unsigned i) const {
    const std::size_t w = i / 64;
    return w < words_.size() && ((words_[w] >> (i % 64)) & 1U);
  }

  void set(unsigned i, bool value) {
    const std::size_t w = i / 64;
    if (value) {
      if (w >= words_.size()) words_.resize(w + 1, 0);
      words_[w] |= std::uint64_t{1} << (i % 64);
    } else if (w < words_.size()) {
      words_[w] &= ~(std::uint64_t{1} << (i % 64));
      trim();
    }
  }

  /// Low 64 coefficients.
  std::uint64_t low_word() const { return words_.empty() ? 0 : words_[0]; }

  std::size_t weight() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  friend BinaryPoly operator+(const BinaryPoly& a, const BinaryPoly& b) {
    BinaryPoly r = a.words_.size() >= b.words_.size() ? a : b;
    const BinaryPoly& o = a.words_.size() >= b.words_.size() ? b : a;
    for (std::size_t i = 0; i < o.words_.size(); ++i) r.words_[i] ^= o.words_[i];
    r.trim();
    return r;
  }

  friend BinaryPoly operator*(const BinaryPoly& a, const BinaryPoly& b) {
    BinaryPoly r;
    if (a.is_zero() || b.is_zero()) return r;
    const unsigned da = *a.degree();
    for (unsigned i = 0; i <= da; ++i)
      if (a.bit(i)) r = r + b.shifted(i);
    return r;
  }

  BinaryPoly shifted(unsigned n) const {
    if (is_zero()) return {};
    BinaryPoly r;
    const std::size_t ws = n / 64;
    const unsigned bs = n % 64;
    r.words_.assign(words_.size() + ws + 1, 0);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      r.words_[i + ws] ^= words_[i] << bs;
      if (bs != 0) r.words_[i + ws + 1] ^= words_[i] >> (64 - bs);
    }
    r.trim();
    return r;
  }

  /// Quotient and remainder of long division.
  static std::pair<BinaryPoly, BinaryPoly> divmod(const BinaryPoly& num, const BinaryPoly& den) {
    if (den.is_zero()) throw std::invalid_argument("division by the zero polynomial");
    BinaryPoly q;
    BinaryPoly r = num;
    const unsigned dd = *den.degree();
    while (!r.is_zero() && *r.degree() >= dd) {
      const unsigned shift = *r.degree() - dd;
      q.set(shift, true);
      r = r + den.shifted(shift);
    }
    return {q, r};
  }

  friend BinaryPoly operator%(const BinaryPoly& a, const BinaryPoly& b) { return divmod(a, b).second; }

  static BinaryPoly gcd(BinaryPoly a, BinaryPoly b) {
    while (!b.is_zero()) {
      BinaryPoly t = a % b;
      a = std::move(b);
      b = std::move(t);
    }
    return a;
  }

  friend bool operator==(const BinaryPoly&, const BinaryPoly&) = default;

  friend std::ostream& operator<<(std::ostream& os, const BinaryPoly& p) { return os << p.to_hex(); }

 private:
  void trim() {
    while (!words_.empty() && words_.back() == 0) words_.pop_back();
  }

  std::vector<std::uint64_t> words_;
};

/// Exhaustive trial division; used up to degree 20.
inline bool is_irreducible_by_trial_division(const BinaryPoly& p) {
  const unsigned n = *p.degree();
  for (unsigned d = 1; d <= n / 2; ++d) {
    // every polynomial of exact degree d
    for (std::uint64_t low = 0; low < (std::uint64_t{1} << d); ++low) {
      BinaryPoly divisor = BinaryPoly::from_u64(low);
      divisor.set(d, true);
      if ((p % divisor).is_zero()) return false;
    }
  }
  return true;
}

/// Ben-Or test: no factor of degree k divides p for k <= n/2, checked as
/// gcd(p, x^(2^k) - x mod p) == 1.
inline bool is_irreducible_by_gcd(const BinaryPoly& p) {
  const unsigned n = *p.degree();
  const BinaryPoly x = BinaryPoly::monomial(1);
  BinaryPoly power = x;  // x^(2^k) mod p
  for (unsigned k = 1; k <= n / 2; ++k) {
    power = (power * power) % p;
    if (*BinaryPoly::gcd(p, power + x).degree() != 0) return false;
  }
  return true;
}

inline bool poly_is_irreducible(const BinaryPoly& p) {
  const auto deg = p.degree();
  if (!deg || *deg == 0) throw std::invalid_argument("irreducibility needs degree >= 1");
  return *deg <= 20 ? is_irreducible_by_trial_division(p) : is_irreducible_by_gcd(p);
}

/// GF(2^m) defined by P(x) = x^m + low(x). Supports 2 <= m <= 64.
class FieldSpec {
 public:
  static constexpr unsigned kMaxDegree = 64;

  FieldSpec(unsigned m, const BinaryPoly& p) : m_(m) {
    if (m < 2 || m > kMaxDegree)
      throw std::invalid_argument("field degree must be in [2, 64], got " + std::to_string(m));
    if (p.degree() != m)
      throw std::invalid_argument("polynomial " + p.to_hex() + " does not have degree " + std::to_string(m));
    if (!p.bit(0)) throw std::invalid_argument("polynomial " + p.to_hex() + " is divisible by x");
    if (!poly_is_irreducible(p)) throw std::invalid_argument("polynomial " + p.to_hex() + " is reducible");
    for (unsigned i = 0; i < m; ++i)
      if (p.bit(i)) low_ |= std::uint64_t{1} << i;
  }

  FieldSpec(unsigned m, std::string_view hex) : FieldSpec(m, BinaryPoly::from_hex(hex)) {}

  unsigned m() const { return m_; }
  /// Coefficients c_0..c_{m-1} of P(x).
  std::uint64_t low() const { return low_; }
  std::uint64_t mask() const { return m_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m_) - 1; }
  std::uint64_t order() const { return m_ == 64 ? 0 : std::uint64_t{1} << m_; }

  BinaryPoly poly() const {
    BinaryPoly p = BinaryPoly::from_u64(low_);
    p.set(m_, true);
    return p;
  }

  bool is_trinomial() const { return std::popcount(low_) == 2; }
  bool is_all_one() const { return low_ == mask(); }

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

 private:
  unsigned m_ = 0;
  std::uint64_t low_ = 0;
};

/// Lowest-weight irreducible modulus of degree m: the trinomial x^m+x^k+1 with
/// the smallest k, else the pentanomial with lexicographically smallest
/// (k3, k2, k1) exponents.
inline FieldSpec default_field(unsigned m) {
  const auto try_low = [m](std::uint64_t low) -> std::optional<FieldSpec> {
    BinaryPoly p = BinaryPoly::from_u64(low);
    p.set(m, true);
    if (poly_is_irreducible(p)) return FieldSpec(m, p);
    return std::nullopt;
  };
  for (unsigned k = 1; k < m; ++k)
    if (auto s = try_low((std::uint64_t{1} << k) | 1U)) return *s;
  for (unsigned k3 = 3; k3 < m; ++k3)
    for (unsigned k2 = 2; k2 < k3; ++k2)
      for (unsigned k1 = 1; k1 < k2; ++k1)
        if (auto s = try_low((std::uint64_t{1} << k3) | (std::uint64_t{1} << k2) | (std::uint64_t{1} << k1) | 1U))
          return *s;
  throw std::invalid_argument("no trinomial or pentanomial modulus of degree " + std::to_string(m));
}

namespace detail {

// Carry-less 64x64 -> 128 product.
inline unsigned __int128 clmul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 r = 0;
  for (unsigned i = 0; i < 64; ++i)
    if ((b >> i) & 1U) r ^= static_cast<unsigned __int128>(a) << i;
  return r;
}

inline unsigned deg128(unsigned __int128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 127U - static_cast<unsigned>(std::countl_zero(hi));
  return 63U - static_cast<unsigned>(std::countl_zero(static_cast<std::uint64_t>(v)));
}

// Long division of v by P(x).
inline std::uint64_t reduce(unsigned __int128 v, const FieldSpec& spec) {
  const unsigned m = spec.m();
  const unsigned __int128 p = (static_cast<unsigned __int128>(1) << m) | spec.low();
  while ((v >> m) != 0) v ^= p << (deg128(v) - m);
  return static_cast<std::uint64_t>(v);
}

}  // namespace detail

/// An element of a specific GF(2^m); bit i is the coefficient of x^i.
class FieldElement {
 public:
  FieldElement(const FieldSpec& spec, std::uint64_t bits) : spec_(spec), bits_(bits) {
    if ((bits & ~spec.mask()) != 0) throw std::invalid_argument("element has bits beyond degree m-1");
  }

  static FieldElement zero(const FieldSpec& spec) { return {spec, 0}; }
  static FieldElement one(const FieldSpec& spec) { return {spec, 1}; }

  const FieldSpec& spec() const { return spec_; }
  std::uint64_t bits() const { return bits_; }
  bool bit(unsigned i) const { return (bits_ >> i) & 1U; }
  bool is_zero() const { return bits_ == 0; }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;

  friend std::ostream& operator<<(std::ostream& os, const FieldElement& e) {
    return os << BinaryPoly::from_u64(e.bits_).to_hex();
  }

 private:
  FieldSpec spec_;
  std::uint64_t bits_;
};

namespace detail {
inline void require_same_field(const FieldElement& a, const FieldElement& b) {
  if (!(a.spec() == b.spec())) throw std::invalid_argument("field elements belong to different fields");
}
}  // namespace detail

inline FieldElement field_add(const FieldElement& a, const FieldElement& b) {
  detail::require_same_field(a, b);
  return {a.spec(), a.bits() ^ b.bits()};
}

inline FieldElement field_mul(const FieldElement& a, const FieldElement& b) {
  detail::require_same_field(a, b);
  return {a.spec(), detail::reduce(detail::clmul(a.bits(), b.bits()), a.spec())};
}

inline FieldElement field_square(const FieldElement& a) { return field_mul(a, a); }

namespace detail {
// Per-thread count of field_inv calls, for inversion accounting.
inline std::uint64_t& inversion_counter() {
  thread_local std::uint64_t n = 0;
  return n;
}
}  // namespace detail

inline std::uint64_t inversions_on_this_thread() { return detail::inversion_counter(); }

/// Extended Euclid over GF(2)[x].
inline FieldElement field_inv(const FieldElement& a) {
  if (a.is_zero()) throw NotInvertible("zero has no multiplicative inverse");
  ++detail::inversion_counter();
  const FieldSpec& spec = a.spec();
  using u128 = unsigned __int128;
  // Invariant: r0 = s0 * a (mod P), r1 = s1 * a (mod P).
  u128 r0 = (static_cast<u128>(1) << spec.m()) | spec.low();
  u128 r1 = a.bits();
  u128 s0 = 0;
  u128 s1 = 1;
  while (r1 != 1) {
    u128 q = 0;
    u128 r = r0;
    const unsigned d1 = detail::deg128(r1);
    while (r != 0 && detail::deg128(r) >= d1) {
      const unsigned shift = detail::deg128(r) - d1;
      q ^= static_cast<u128>(1) << shift;
      r ^= r1 << shift;
    }
    // s = s0 - q*s1; degrees stay below m so the products fit.
    u128 qs = 0;
    for (unsigned i = 0; i < 128 && (q >> i) != 0; ++i)
      if ((q >> i) & 1U) qs ^= s1 << i;
    const u128 s = s0 ^ qs;
    r0 = r1;
    r1 = r;
    s0 = s1;
    s1 = s;
  }
  return {spec, static_cast<std::uint64_t>(s1)};
}

/// a^e by square-and-multiply.
inline FieldElement field_pow(FieldElement a, std::uint64_t e) {
  FieldElement r = FieldElement::one(a.spec());
  while (e != 0) {
    if (e & 1U) r = field_mul(r, a);
    a = field_square(a);
    e >>= 1;
  }
  return r;
}

inline FieldElement operator+(const FieldElement& a, const FieldElement& b) { return field_add(a, b); }
inline FieldElement operator*(const FieldElement& a, const FieldElement& b) { return field_mul(a, b); }

}  // namespace ecdlp_forge
