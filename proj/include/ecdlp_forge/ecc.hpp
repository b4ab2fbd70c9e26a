// Curves y^2 + xy = x^3 + a x^2 + b over GF(2^m), b != 0.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ecdlp_forge/gf2m.hpp"

namespace ecdlp_forge {

class CurveParams {
 public:
  CurveParams(const FieldElement& a, const FieldElement& b) : spec_(a.spec()), a_(a), b_(b) {
    detail::require_same_field(a, b);
    if (b.is_zero()) throw std::invalid_argument("curve coefficient b must be nonzero");
  }

  CurveParams(const FieldSpec& spec, std::uint64_t a, std::uint64_t b)
      : CurveParams(FieldElement(spec, a), FieldElement(spec, b)) {}

  const FieldSpec& spec() const { return spec_; }
  const FieldElement& a() const { return a_; }
  const FieldElement& b() const { return b_; }

  friend bool operator==(const CurveParams& l, const CurveParams& r) {
    return l.spec_ == r.spec_ && l.a_ == r.a_ && l.b_ == r.b_;
  }

 private:
  FieldSpec spec_;
  FieldElement a_;
  FieldElement b_;
};

/// Either O or a finite (x, y). The checked constructor enforces the curve
/// equation; unchecked() exists for off-curve coordinates such as sentinels.
class AffinePoint {
 public:
  static AffinePoint infinity() { return AffinePoint(); }

  AffinePoint(const CurveParams& c, const FieldElement& x, const FieldElement& y) : xy_(std::pair{x, y}) {
    detail::require_same_field(x, c.a());
    detail::require_same_field(y, c.a());
    if (!satisfies(c)) throw std::invalid_argument("point is not on the curve");
  }

  static AffinePoint unchecked(const FieldElement& x, const FieldElement& y) {
    AffinePoint p;
    p.xy_ = std::pair{x, y};
    return p;
  }

  bool is_infinity() const { return !xy_.has_value(); }
  const FieldElement& x() const { return finite().first; }
  const FieldElement& y() const { return finite().second; }

  /// y^2 + xy + x^3 + a x^2 + b == 0; O is on every curve.
  bool satisfies(const CurveParams& c) const {
    if (is_infinity()) return true;
    const auto& [x, y] = *xy_;
    if (!(x.spec() == c.spec()) || !(y.spec() == c.spec())) throw std::invalid_argument("point and curve differ in field");
    const FieldElement x2 = x * x;
    return (y * y + x * y + x2 * x + c.a() * x2 + c.b()).is_zero();
  }

  friend bool operator==(const AffinePoint& l, const AffinePoint& r) { return l.xy_ == r.xy_; }

  friend std::ostream& operator<<(std::ostream& os, const AffinePoint& p) {
    if (p.is_infinity()) return os << "O";
    return os << "(" << BinaryPoly::from_u64(p.x().bits()).to_hex() << ", " << BinaryPoly::from_u64(p.y().bits()).to_hex()
              << ")";
  }

 private:
  AffinePoint() = default;
  const std::pair<FieldElement, FieldElement>& finite() const {
    if (!xy_) throw std::logic_error("point at infinity has no coordinates");
    return *xy_;
  }

  std::optional<std::pair<FieldElement, FieldElement>> xy_;
};

/// (X, Y, Z) standing for (X/Z, Y/Z); Z = 0 is O.
struct ProjectivePoint {
  FieldElement X, Y, Z;

  static ProjectivePoint infinity(const FieldSpec& f) {
    return {FieldElement::zero(f), FieldElement::one(f), FieldElement::zero(f)};
  }
  static ProjectivePoint from_affine(const FieldSpec& f, const AffinePoint& p) {
    if (p.is_infinity()) return infinity(f);
    return {p.x(), p.y(), FieldElement::one(f)};
  }

  bool is_infinity() const { return Z.is_zero(); }

  /// Same point: cross-multiplied coordinates agree.
  bool same_class(const ProjectivePoint& o) const {
    if (is_infinity() || o.is_infinity()) return is_infinity() && o.is_infinity();
    return X * o.Z == o.X * Z && Y * o.Z == o.Y * Z;
  }

  friend bool operator==(const ProjectivePoint&, const ProjectivePoint&) = default;
};

inline bool on_curve(const CurveParams& c, const AffinePoint& p) { return p.satisfies(c); }

inline void require_on_curve(const CurveParams& c, const AffinePoint& p) {
  if (!on_curve(c, p)) throw std::invalid_argument("point is not on the curve");
}

inline AffinePoint negate(const CurveParams& c, const AffinePoint& p) {
  require_on_curve(c, p);
  if (p.is_infinity()) return p;
  return AffinePoint::unchecked(p.x(), p.x() + p.y());
}

inline AffinePoint double_affine(const CurveParams& c, const AffinePoint& p) {
  require_on_curve(c, p);
  if (p.is_infinity() || p.x().is_zero()) return AffinePoint::infinity();  // 2-torsion
  const FieldElement lambda = p.x() + p.y() * field_inv(p.x());
  const FieldElement x3 = lambda * lambda + lambda + c.a();
  const FieldElement y3 = p.x() * p.x() + (lambda + FieldElement::one(c.spec())) * x3;
  return AffinePoint::unchecked(x3, y3);
}

inline AffinePoint add_affine(const CurveParams& c, const AffinePoint& p, const AffinePoint& q) {
  require_on_curve(c, p);
  require_on_curve(c, q);
  if (p.is_infinity()) return q;
  if (q.is_infinity()) return p;
  if (p.x() == q.x()) {
    if (p.y() == q.y()) return double_affine(c, p);
    return AffinePoint::infinity();  // q = -p
  }
  const FieldElement lambda = (p.y() + q.y()) * field_inv(p.x() + q.x());
  const FieldElement x3 = lambda * lambda + lambda + p.x() + q.x() + c.a();
  const FieldElement y3 = lambda * (p.x() + x3) + x3 + p.y();
  return AffinePoint::unchecked(x3, y3);
}

/// Doubling in projective form: with num = X^2 + YZ, den = XZ and
/// D = num^2 + num*den + a*den^2 the result is (D den, X^5 Z + D(num+den), den^3).
inline ProjectivePoint double_projective(const CurveParams& c, const ProjectivePoint& p) {
  if (p.is_infinity() || p.X.is_zero()) return ProjectivePoint::infinity(c.spec());
  const FieldElement num = p.X * p.X + p.Y * p.Z;
  const FieldElement den = p.X * p.Z;
  const FieldElement d = num * num + num * den + c.a() * den * den;
  const FieldElement x2 = p.X * p.X;
  return {d * den, x2 * x2 * p.X * p.Z + d * (num + den), den * den * den};
}

/// Intermediates of the generic projective sum, in the order the reversible
/// datapath produces them.
struct ProjectiveSumTrace {
  FieldElement A, B, W, A2, AB, B2, aB2, B3, C, X3, Z3, T, Y3;
};

/// Generic branch of the sum (callers guarantee P, Q finite and x_P != x_Q):
///   A = Y1 Z2 + Y2 Z1, B = X1 Z2 + X2 Z1, W = Z1 Z2
///   C = W (A^2 + AB + a B^2) + B^3
///   X3 = C B, Z3 = B^3 W, Y3 = A (X1 Z2 B^2 + C) + C B + Y1 Z2 B^3
inline ProjectiveSumTrace projective_sum_trace(const CurveParams& c, const ProjectivePoint& p,
                                               const ProjectivePoint& q) {
  const FieldElement A = p.Y * q.Z + q.Y * p.Z;
  const FieldElement B = p.X * q.Z + q.X * p.Z;
  const FieldElement W = p.Z * q.Z;
  const FieldElement A2 = A * A, AB = A * B, B2 = B * B;
  const FieldElement aB2 = c.a() * B2;
  const FieldElement B3 = B2 * B;
  const FieldElement C = W * (A2 + AB + aB2) + B3;
  const FieldElement X3 = C * B;
  const FieldElement Z3 = B3 * W;
  const FieldElement T = p.X * q.Z * B2 + C;
  const FieldElement Y3 = A * T + X3 + p.Y * q.Z * B3;
  return {A, B, W, A2, AB, B2, aB2, B3, C, X3, Z3, T, Y3};
}

/// Division-free sum. O, P = -Q and P = Q are handled by branches; every
/// branch uses a fixed multiplication sequence and no inversion.
inline ProjectivePoint add_projective(const CurveParams& c, const ProjectivePoint& p, const ProjectivePoint& q) {
  if (p.is_infinity()) return q;
  if (q.is_infinity()) return p;
  const FieldElement A = p.Y * q.Z + q.Y * p.Z;
  const FieldElement B = p.X * q.Z + q.X * p.Z;
  if (B.is_zero()) {
    if (A.is_zero()) return double_projective(c, p);
    return ProjectivePoint::infinity(c.spec());
  }
  const auto t = projective_sum_trace(c, p, q);
  return {t.X3, t.Y3, t.Z3};
}

/// The one inversion of a projective computation.
inline AffinePoint to_affine(const ProjectivePoint& p) {
  if (p.is_infinity()) return AffinePoint::infinity();
  const FieldElement zi = field_inv(p.Z);
  return AffinePoint::unchecked(p.X * zi, p.Y * zi);
}

/// k P by left-to-right double-and-add.
inline AffinePoint scalar_mul(const CurveParams& c, std::uint64_t k, const AffinePoint& p) {
  require_on_curve(c, p);
  AffinePoint acc = AffinePoint::infinity();
  for (int bit = 63; bit >= 0; --bit) {
    acc = double_affine(c, acc);
    if ((k >> bit) & 1U) acc = add_affine(c, acc, p);
  }
  return acc;
}

inline constexpr unsigned kMaxEnumerableDegree = 16;

/// O followed by every finite point, sorted by (x, y).
inline std::vector<AffinePoint> enumerate_points(const CurveParams& c) {
  const FieldSpec& f = c.spec();
  if (f.m() > kMaxEnumerableDegree)
    throw std::invalid_argument("point enumeration limited to m <= " + std::to_string(kMaxEnumerableDegree));
  const std::uint64_t n = f.order();
  // roots[w] lists z with z^2 + z = w (each w has 0 or 2 roots)
  std::vector<std::vector<std::uint64_t>> roots(n);
  for (std::uint64_t z = 0; z < n; ++z) {
    const FieldElement ez(f, z);
    roots[(ez * ez + ez).bits()].push_back(z);
  }
  std::vector<AffinePoint> pts{AffinePoint::infinity()};
  // x = 0: y^2 = b, y = b^(2^(m-1))
  FieldElement root_b = c.b();
  for (unsigned i = 0; i + 1 < f.m(); ++i) root_b = root_b * root_b;
  pts.push_back(AffinePoint::unchecked(FieldElement::zero(f), root_b));
  for (std::uint64_t xv = 1; xv < n; ++xv) {
    // y = x z turns the equation into z^2 + z = (x^3 + a x^2 + b) / x^2
    const FieldElement x(f, xv);
    const FieldElement x2 = x * x;
    const FieldElement w = (x2 * x + c.a() * x2 + c.b()) * field_inv(x2);
    std::vector<std::uint64_t> ys;
    for (std::uint64_t z : roots[w.bits()]) ys.push_back((x * FieldElement(f, z)).bits());
    std::sort(ys.begin(), ys.end());
    for (std::uint64_t y : ys) pts.push_back(AffinePoint::unchecked(x, FieldElement(f, y)));
  }
  return pts;
}

inline std::uint64_t group_order(const CurveParams& c) { return enumerate_points(c).size(); }

/// Prime factors in increasing order, without multiplicity.
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) out.push_back(n);
  return out;
}

/// Least r > 0 with r P = O.
inline std::uint64_t order_of(const CurveParams& c, const AffinePoint& p) {
  require_on_curve(c, p);
  if (c.spec().m() <= kMaxEnumerableDegree) {
    std::uint64_t r = group_order(c);
    for (std::uint64_t q : prime_factors(r))
      while (r % q == 0 && scalar_mul(c, r / q, p).is_infinity()) r /= q;
    return r;
  }
  AffinePoint acc = p;
  for (std::uint64_t r = 1;; ++r) {
    if (acc.is_infinity()) return r;
    acc = add_affine(c, acc, p);
  }
}

/// |#E - (q + 1)| <= 2 sqrt(q), checked as (#E - q - 1)^2 <= 4q.
inline bool hasse_bound_holds(const CurveParams& c, std::uint64_t n) {
  const std::int64_t q = static_cast<std::int64_t>(c.spec().order());
  const std::int64_t t = static_cast<std::int64_t>(n) - q - 1;
  return t * t <= 4 * q;
}

struct DeskCurve {
  CurveParams curve;
  AffinePoint generator;
  std::uint64_t subgroup_order;  // prime
  std::uint64_t group_order;
};

/// Generator of the subgroup of largest prime order: (#E/r) Q for the first
/// enumerated Q that does not land on O.
inline DeskCurve subgroup_generator(const CurveParams& c) {
  const auto pts = enumerate_points(c);
  const std::uint64_t n = pts.size();
  const std::uint64_t r = prime_factors(n).back();
  for (const auto& q : pts) {
    if (q.is_infinity()) continue;
    const AffinePoint g = scalar_mul(c, n / r, q);
    if (!g.is_infinity()) return DeskCurve{c, g, r, n};
  }
  throw std::logic_error("no point of order r");  // unreachable by Cauchy
}

/// Scans a in {0, 1} and then b = 1, 2, ... and keeps the first curve whose
/// largest prime factor of #E is largest.
inline DeskCurve find_desk_curve(const FieldSpec& f) {
  std::optional<DeskCurve> best;
  for (std::uint64_t a = 0; a <= 1; ++a)
    for (std::uint64_t b = 1; b < f.order(); ++b) {
      const CurveParams c(f, a, b);
      const std::uint64_t r = prime_factors(group_order(c)).back();
      if (best && r <= best->subgroup_order) continue;
      best = subgroup_generator(c);
    }
  if (!best) throw std::logic_error("no curve found");
  return *best;
}

}  // namespace ecdlp_forge
