#include <gtest/gtest.h>

#include "ecdlp_forge/shor.hpp"

using namespace ecdlp_forge;

namespace {

ECDLPInstance desk_instance(unsigned m, std::uint64_t d) {
  const auto desk = find_desk_curve(default_field(m));
  return ECDLPInstance::make(desk.curve, desk.generator, scalar_mul(desk.curve, d, desk.generator));
}

}  // namespace

TEST(Instance, RejectsQOutsideSubgroup) {
  const auto desk = find_desk_curve(default_field(4));
  const auto pts = enumerate_points(desk.curve);
  int rejected = 0;
  for (const auto& q : pts) {
    try {
      ECDLPInstance::make(desk.curve, desk.generator, q);
    } catch (const NotInSubgroup&) {
      ++rejected;
    }
  }
  EXPECT_EQ(rejected, static_cast<int>(pts.size() - desk.subgroup_order));
}

TEST(Schedule, DoublingChain) {
  const auto inst = desk_instance(5, 7);
  const auto s = double_and_add_schedule(inst);
  EXPECT_EQ(s.size(), 2 * exponent_bits(inst.r));
  EXPECT_EQ(s.p_multiples[0], inst.P);
  EXPECT_EQ(s.q_multiples[0], inst.Q);
  for (std::size_t k = 1; k < s.p_multiples.size(); ++k) {
    EXPECT_EQ(s.p_multiples[k], double_affine(inst.curve, s.p_multiples[k - 1]));
    EXPECT_EQ(s.q_multiples[k], double_affine(inst.curve, s.q_multiples[k - 1]));
  }
}

TEST(StateTable, FibresAreUniform) {
  for (std::uint64_t d : {0U, 1U, 3U}) {
    const auto inst = desk_instance(5, d);
    const auto t = state_table(inst);
    EXPECT_EQ(t.classes.size(), inst.r);
    std::vector<std::uint64_t> size(t.classes.size(), 0);
    for (auto c : t.class_of) ++size[c];
    for (auto s : size) EXPECT_EQ(s, inst.r);
    // (0, 0) lands on the sentinel class
    const ProjectivePoint o = sentinel(inst.curve);
    EXPECT_EQ(t.classes[t.at(0, 0)], (ClassKey{o.X.bits(), o.Y.bits()}));
    // every branch agrees with the affine oracle
    for (std::uint64_t x = 0; x < inst.r; ++x)
      for (std::uint64_t y = 0; y < inst.r; ++y) {
        const auto pt = scalar_mul(inst.curve, (x + d * y) % inst.r, inst.P);
        const ClassKey want = pt.is_infinity() ? ClassKey{o.X.bits(), o.Y.bits()} : ClassKey{pt.x().bits(), pt.y().bits()};
        ASSERT_EQ(t.classes[t.at(x, y)], want);
      }
  }
}

TEST(StateTable, CircuitAndOracleAgree) {
  for (unsigned m : {4U, 5U}) {
    const auto inst = desk_instance(m, 2);
    const auto a = state_table(inst, Backend::Oracle);
    const auto b = state_table(inst, Backend::Circuit);
    EXPECT_EQ(a.classes, b.classes);
    EXPECT_EQ(a.class_of, b.class_of);
    EXPECT_GT(b.datapath_adds, 0U);
    EXPECT_EQ(b.inversions.in_point_adds, 0U);
    EXPECT_EQ(b.inversions.to_affine_stage_runs, 1U);
    EXPECT_EQ(b.inversions.in_to_affine_stage, 1U);
    EXPECT_EQ(b.inversions.total(), 1U);
    EXPECT_EQ(b.inversions.finite_branches, inst.r * inst.r - inst.r);
  }
}

TEST(StateTable, Guard) {
  const auto desk = find_desk_curve(default_field(4));
  const ECDLPInstance inst{desk.curve, desk.generator, desk.generator, kMaxDeskOrder + 1};
  EXPECT_THROW(state_table(inst), std::invalid_argument);
}

TEST(Distribution, SupportIsTheLineK2EqualsDK1) {
  for (unsigned m : {4U, 5U}) {
    const auto desk = find_desk_curve(default_field(m));
    for (std::uint64_t d = 0; d < desk.subgroup_order; ++d) {
      const auto inst = desk_instance(m, d);
      const auto dist = outcome_distribution(state_table(inst));
      EXPECT_NEAR(dist.total(), 1.0, 1e-9);
      for (std::uint64_t k1 = 0; k1 < inst.r; ++k1)
        for (std::uint64_t k2 = 0; k2 < inst.r; ++k2) {
          const double p = dist.at(k1, k2);
          EXPECT_GE(p, 0.0);
          if ((d * k1) % inst.r == k2)
            EXPECT_NEAR(p, 1.0 / inst.r, 1e-9);
          else
            EXPECT_LT(p, 1e-12);
        }
      EXPECT_EQ(recover_d(dist), d);
    }
  }
}

TEST(Distribution, DegenerateDZero) {
  const auto inst = desk_instance(4, 0);
  const auto sup = outcome_distribution(state_table(inst)).support();
  ASSERT_EQ(sup.size(), inst.r);
  for (const auto& [k1, k2] : sup) EXPECT_EQ(k2, 0U);
}

TEST(Recover, RejectsNonInvertible) {
  EXPECT_FALSE(recover_d(0, 0, 5).has_value());
  EXPECT_EQ(recover_d(2, 4, 5), 2U);
  EXPECT_FALSE(recover_d(3, 0, 9).has_value());
  EXPECT_EQ(inverse_mod(3, 7), 5U);
}

TEST(Solve, RoundTripsAndIsDeterministic) {
  const auto desk = find_desk_curve(default_field(5));
  for (std::uint64_t k : {1U, 5U, 18U, 40U}) {
    const auto q = scalar_mul(desk.curve, k, desk.generator);
    const auto rep = ecdlp_solve(desk.curve, desk.generator, q, 11);
    EXPECT_EQ(rep.d, k % desk.subgroup_order);
    EXPECT_TRUE(rep.verified);
    const auto again = ecdlp_solve(desk.curve, desk.generator, q, 11);
    EXPECT_EQ(again.samples, rep.samples);
  }
  EXPECT_EQ(ecdlp_solve(desk.curve, desk.generator, desk.generator, 3).d, 1U);
}

TEST(Solve, OffSubgroupIsReported) {
  const auto desk = find_desk_curve(default_field(4));
  for (const auto& q : enumerate_points(desk.curve)) {
    if (scalar_mul(desk.curve, desk.subgroup_order, q).is_infinity()) continue;
    EXPECT_THROW(ecdlp_solve(desk.curve, desk.generator, q, 1), NotInSubgroup);
    return;
  }
  FAIL() << "every point is in the subgroup";
}

TEST(Solve, SamplingNeedsFewSamples) {
  const auto desk = find_desk_curve(default_field(4));
  const auto q = scalar_mul(desk.curve, 3, desk.generator);
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto rep = ecdlp_solve(desk.curve, desk.generator, q, seed);
    EXPECT_EQ(rep.d, 3U);
    EXPECT_LE(rep.samples.size(), 10U);
    total += rep.samples.size();
  }
  EXPECT_LT(static_cast<double>(total) / 100.0, 4.0);
}
