#include <gtest/gtest.h>

#include <random>

#include "ecdlp_forge/ecc.hpp"

using namespace ecdlp_forge;

namespace {

// naive point count: try every (x, y)
std::uint64_t brute_count(const CurveParams& c) {
  std::uint64_t n = 1;
  for (std::uint64_t x = 0; x < c.spec().order(); ++x)
    for (std::uint64_t y = 0; y < c.spec().order(); ++y)
      n += on_curve(c, AffinePoint::unchecked(FieldElement(c.spec(), x), FieldElement(c.spec(), y)));
  return n;
}

void check_group_axioms(const CurveParams& c) {
  const auto pts = enumerate_points(c);
  ASSERT_EQ(pts.size(), brute_count(c));
  const auto O = AffinePoint::infinity();
  for (const auto& p : pts) {
    ASSERT_TRUE(on_curve(c, p));
    EXPECT_EQ(add_affine(c, p, O), p);
    EXPECT_EQ(negate(c, negate(c, p)), p);
    EXPECT_TRUE(add_affine(c, p, negate(c, p)).is_infinity());
    for (const auto& q : pts) {
      const auto pq = add_affine(c, p, q);
      ASSERT_TRUE(on_curve(c, pq));
      ASSERT_EQ(pq, add_affine(c, q, p));
      for (const auto& s : pts) ASSERT_EQ(add_affine(c, pq, s), add_affine(c, p, add_affine(c, q, s)));
    }
  }
}

}  // namespace

TEST(Curve, RejectsZeroB) { EXPECT_THROW(CurveParams(default_field(4), 1, 0), std::invalid_argument); }

TEST(Curve, OnCurveBasics) {
  const CurveParams c(default_field(4), 1, 3);
  EXPECT_TRUE(on_curve(c, AffinePoint::infinity()));
  // x = 0 reads y^2 = b
  const FieldSpec& f = c.spec();
  for (std::uint64_t y = 0; y < 16; ++y) {
    const FieldElement ey(f, y);
    EXPECT_EQ(on_curve(c, AffinePoint::unchecked(FieldElement::zero(f), ey)), ey * ey == c.b());
  }
  EXPECT_THROW(AffinePoint(c, FieldElement::zero(f), FieldElement::zero(f)), std::invalid_argument);
  EXPECT_THROW(negate(c, AffinePoint::unchecked(FieldElement::zero(f), FieldElement::zero(f))), std::invalid_argument);
}

TEST(Curve, GroupAxiomsM4) { check_group_axioms(find_desk_curve(default_field(4)).curve); }

TEST(Curve, GroupAxiomsM5) { check_group_axioms(find_desk_curve(default_field(5)).curve); }

TEST(Curve, GroupAxiomsOtherCoefficients) {
  check_group_axioms(CurveParams(default_field(4), 0, 1));
  check_group_axioms(CurveParams(default_field(3), 5, 7));
}

TEST(Curve, ProjectiveCommutingSquare) {
  for (const auto& c : {find_desk_curve(default_field(4)).curve, CurveParams(default_field(4), 0, 9),
                        CurveParams(default_field(5), 3, 17)}) {
    const FieldSpec& f = c.spec();
    const auto pts = enumerate_points(c);
    std::mt19937_64 rng(4);
    for (const auto& p : pts)
      for (const auto& q : pts) {
        const FieldElement lp(f, 1 + rng() % (f.order() - 1)), lq(f, 1 + rng() % (f.order() - 1));
        auto pp = ProjectivePoint::from_affine(f, p), qq = ProjectivePoint::from_affine(f, q);
        pp = {pp.X * lp, pp.Y * lp, pp.Z * lp};
        qq = {qq.X * lq, qq.Y * lq, qq.Z * lq};
        EXPECT_EQ(to_affine(add_projective(c, pp, qq)), add_affine(c, p, q));
      }
  }
}

TEST(Curve, ToAffine) {
  const FieldSpec f = default_field(4);
  const FieldElement x(f, 3), y(f, 5), l(f, 7);
  EXPECT_EQ(to_affine({x, y, FieldElement::one(f)}), AffinePoint::unchecked(x, y));
  EXPECT_EQ(to_affine({x * l, y * l, l}), AffinePoint::unchecked(x, y));
  EXPECT_TRUE(to_affine({x, y, FieldElement::zero(f)}).is_infinity());
}

TEST(Curve, ScalarMul) {
  const auto desk = find_desk_curve(default_field(5));
  const auto& c = desk.curve;
  const auto& p = desk.generator;
  EXPECT_TRUE(scalar_mul(c, 0, p).is_infinity());
  EXPECT_EQ(scalar_mul(c, 1, p), p);
  EXPECT_TRUE(scalar_mul(c, desk.subgroup_order, p).is_infinity());
  AffinePoint acc = AffinePoint::infinity();
  for (std::uint64_t k = 0; k <= 20; ++k) {
    EXPECT_EQ(scalar_mul(c, k, p), acc);
    acc = add_affine(c, acc, p);
  }
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const std::uint64_t j = rng() % 1000, k = rng() % 1000;
    EXPECT_EQ(scalar_mul(c, j + k, p), add_affine(c, scalar_mul(c, j, p), scalar_mul(c, k, p)));
  }
}

TEST(Curve, OrdersAndHasse) {
  for (unsigned m = 3; m <= 8; ++m) {
    const FieldSpec f = default_field(m);
    for (std::uint64_t b = 1; b < f.order(); b += 3) {
      const CurveParams c(f, b & 1U, b);
      const auto pts = enumerate_points(c);
      EXPECT_TRUE(hasse_bound_holds(c, pts.size()));
      for (std::size_t k = 0; k < pts.size(); k += 5) {
        const std::uint64_t r = order_of(c, pts[k]);
        EXPECT_EQ(pts.size() % r, 0U);
        EXPECT_TRUE(scalar_mul(c, r, pts[k]).is_infinity());
        for (std::uint64_t s = 1; s < r && s < 40; ++s) EXPECT_FALSE(scalar_mul(c, s, pts[k]).is_infinity());
      }
    }
  }
}

TEST(Curve, EnumerationGuard) {
  EXPECT_THROW(enumerate_points(CurveParams(default_field(17), 0, 1)), std::invalid_argument);
}

TEST(DeskCurve, SearchIsDeterministicAndPrime) {
  for (unsigned m : {4U, 5U, 6U}) {
    const auto d1 = find_desk_curve(default_field(m));
    const auto d2 = find_desk_curve(default_field(m));
    EXPECT_EQ(d1.curve, d2.curve);
    EXPECT_EQ(d1.generator, d2.generator);
    EXPECT_EQ(prime_factors(d1.subgroup_order).size(), 1U);
    EXPECT_EQ(prime_factors(d1.subgroup_order).front(), d1.subgroup_order);
    EXPECT_EQ(order_of(d1.curve, d1.generator), d1.subgroup_order);
    EXPECT_EQ(d1.group_order % d1.subgroup_order, 0U);
    EXPECT_TRUE(hasse_bound_holds(d1.curve, d1.group_order));
  }
}
