// Exact desk-scale emulation of the discrete-log algorithm on a curve
// subgroup of prime or composite order r.
//
// The two exponent registers range over Z_r. Every (x, y) branch computes
// the class of xP + yQ with the classically precomputed 2^k P and 2^k Q, then
// a 2-D Fourier transform over Z_r x Z_r is evaluated exactly:
//   Pr(k1, k2) = r^-4 sum_class |sum_{(x,y) in class} w^(x k1 + y k2)|^2
// With Q = dP the class of (x, y) is x + d y, so the inner sum vanishes unless
// k2 = d k1 (mod r), and each of those r outcomes has probability 1/r.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ecdlp_forge/ecadd_circuit.hpp"
#include "ecdlp_forge/ecc.hpp"
#include "ecdlp_forge/parallel.hpp"

namespace ecdlp_forge {

class NotInSubgroup : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint64_t kMaxDeskOrder = 4096;

struct ECDLPInstance {
  CurveParams curve;
  AffinePoint P;
  AffinePoint Q;
  std::uint64_t r;

  /// Computes r = ord(P) and rejects Q outside <P>.
  static ECDLPInstance make(const CurveParams& c, const AffinePoint& p, const AffinePoint& q) {
    require_on_curve(c, p);
    require_on_curve(c, q);
    if (p.is_infinity()) throw std::invalid_argument("generator must be finite");
    const std::uint64_t r = order_of(c, p);
    AffinePoint acc = AffinePoint::infinity();
    for (std::uint64_t k = 0; k < r; ++k) {
      if (acc == q) return ECDLPInstance{c, p, q, r};
      acc = add_affine(c, acc, p);
    }
    throw NotInSubgroup("Q is not a multiple of P");
  }
};

/// Number of bits of an exponent in Z_r.
inline unsigned exponent_bits(std::uint64_t r) { return r <= 1 ? 0 : static_cast<unsigned>(std::bit_width(r - 1)); }

struct DoubleAndAddSchedule {
  std::vector<AffinePoint> p_multiples;  // 2^k P
  std::vector<AffinePoint> q_multiples;  // 2^k Q
  std::size_t size() const { return p_multiples.size() + q_multiples.size(); }
};

inline DoubleAndAddSchedule double_and_add_schedule(const ECDLPInstance& inst) {
  DoubleAndAddSchedule s;
  AffinePoint p = inst.P, q = inst.Q;
  for (unsigned k = 0; k < exponent_bits(inst.r); ++k) {
    if (!on_curve(inst.curve, p) || !on_curve(inst.curve, q)) throw std::logic_error("schedule left the curve");
    s.p_multiples.push_back(p);
    s.q_multiples.push_back(q);
    p = double_affine(inst.curve, p);
    q = double_affine(inst.curve, q);
  }
  return s;
}

enum class Backend { Oracle, Circuit };

inline const char* to_string(Backend b) { return b == Backend::Oracle ? "oracle" : "circuit"; }

/// Canonical class label: affine (x, y), or the sentinel's (X, Y) for O.
using ClassKey = std::pair<std::uint64_t, std::uint64_t>;

struct InversionAccounting {
  std::uint64_t in_point_adds = 0;       // must stay 0
  std::uint64_t to_affine_stage_runs = 0;  // the one final inversion stage
  std::uint64_t in_to_affine_stage = 0;    // 1 unless every branch is O
  std::uint64_t finite_branches = 0;

  std::uint64_t total() const { return in_point_adds + in_to_affine_stage; }
};

struct StateTable {
  std::uint64_t r = 0;
  std::vector<ClassKey> classes;        // sorted
  std::vector<std::uint32_t> class_of;  // index x * r + y
  std::uint64_t point_adds = 0;
  std::uint64_t datapath_adds = 0;  // generic adds through the oracle or circuit
  std::map<PointAddCase, std::uint64_t> policy_cases;
  InversionAccounting inversions;

  std::uint32_t at(std::uint64_t x, std::uint64_t y) const { return class_of[x * r + y]; }
};

/// Classes of xP + yQ for all (x, y) in Z_r^2.
inline StateTable state_table(const ECDLPInstance& inst, Backend backend = Backend::Oracle) {
  const std::uint64_t r = inst.r;
  if (r > kMaxDeskOrder) throw std::invalid_argument("subgroup order exceeds the desk-scale limit of 4096");
  const CurveParams& c = inst.curve;
  const FieldSpec& f = c.spec();
  const auto sched = double_and_add_schedule(inst);
  const ProjectivePoint o = sentinel(c);

  StateTable t;
  t.r = r;
  std::vector<ProjectivePoint> acc(r * r, o);

  struct Step {
    AffinePoint point;
    bool on_x;
    unsigned bit;
  };
  std::vector<Step> steps;
  // adding O is a no-op (Q = O when d = 0)
  for (unsigned k = 0; k < sched.p_multiples.size(); ++k)
    if (!sched.p_multiples[k].is_infinity()) steps.push_back({sched.p_multiples[k], true, k});
  for (unsigned k = 0; k < sched.q_multiples.size(); ++k)
    if (!sched.q_multiples[k].is_infinity()) steps.push_back({sched.q_multiples[k], false, k});

  // Circuit synthesis inverts the known constants classically (b^-1 for the
  // constant multipliers); that is precomputation, not datapath work.
  std::vector<PointAddCircuit> circuits;
  if (backend == Backend::Circuit)
    for (const Step& s : steps) circuits.push_back(synth_point_add_known(c, s.point));

  const std::uint64_t inv_before = inversions_on_this_thread();
  for (std::size_t si = 0; si < steps.size(); ++si) {
    const Step& s = steps[si];
    std::vector<std::size_t> generic;
    std::vector<ProjectivePoint> generic_in;
    for (std::uint64_t x = 0; x < r; ++x)
      for (std::uint64_t y = 0; y < r; ++y) {
        if ((((s.on_x ? x : y) >> s.bit) & 1U) == 0) continue;
        const std::size_t i = x * r + y;
        ++t.point_adds;
        const auto res = exceptional_case_policy(c, acc[i], s.point);
        if (res.kind != PointAddCase::Generic) {
          ++t.policy_cases[res.kind];
          acc[i] = res.result;
          continue;
        }
        generic.push_back(i);
        generic_in.push_back(acc[i]);
      }
    if (generic.empty()) continue;
    t.datapath_adds += generic.size();
    std::vector<ProjectivePoint> out;
    if (backend == Backend::Circuit) {
      out = simulate_point_add(circuits[si], generic_in);
    } else {
      const ProjectivePoint rr = ProjectivePoint::from_affine(f, s.point);
      out.reserve(generic_in.size());
      for (const auto& p : generic_in) out.push_back(add_projective(c, p, rr));
    }
    for (std::size_t k = 0; k < generic.size(); ++k) acc[generic[k]] = out[k];
  }
  t.inversions.in_point_adds = inversions_on_this_thread() - inv_before;

  // The single inversion stage: all finite branches share one field_inv
  // through prefix products of Z (simultaneous inversion). O keeps the
  // sentinel's label.
  std::vector<ClassKey> keys(r * r, ClassKey{o.X.bits(), o.Y.bits()});
  std::vector<std::size_t> finite;
  for (std::size_t i = 0; i < acc.size(); ++i)
    if (!(acc[i] == o || acc[i].is_infinity())) finite.push_back(i);
  const std::uint64_t stage_before = inversions_on_this_thread();
  if (!finite.empty()) {
    std::vector<FieldElement> prefix;
    prefix.reserve(finite.size());
    for (std::size_t i : finite) prefix.push_back(prefix.empty() ? acc[i].Z : prefix.back() * acc[i].Z);
    FieldElement inv = field_inv(prefix.back());
    for (std::size_t k = finite.size(); k-- > 0;) {
      const ProjectivePoint& p = acc[finite[k]];
      const FieldElement zinv = k == 0 ? inv : inv * prefix[k - 1];
      inv = inv * p.Z;
      keys[finite[k]] = {(p.X * zinv).bits(), (p.Y * zinv).bits()};
    }
  }
  t.inversions.to_affine_stage_runs = 1;
  t.inversions.in_to_affine_stage = inversions_on_this_thread() - stage_before;
  t.inversions.finite_branches = finite.size();

  std::map<ClassKey, std::uint32_t> index;
  for (const auto& k : keys) index.emplace(k, 0);
  std::uint32_t next = 0;
  for (auto& [k, v] : index) {
    v = next++;
    t.classes.push_back(k);
  }
  t.class_of.resize(r * r);
  for (std::size_t i = 0; i < keys.size(); ++i) t.class_of[i] = index[keys[i]];
  return t;
}

struct OutcomeDistribution {
  std::uint64_t r = 0;
  std::vector<double> prob;  // index k1 * r + k2

  double at(std::uint64_t k1, std::uint64_t k2) const { return prob[k1 * r + k2]; }

  double total() const {
    double s = 0;
    for (double p : prob) s += p;
    return s;
  }

  /// Outcomes with probability above eps, row-major.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> support(double eps = 1e-9) const {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::uint64_t k1 = 0; k1 < r; ++k1)
      for (std::uint64_t k2 = 0; k2 < r; ++k2)
        if (at(k1, k2) > eps) out.emplace_back(k1, k2);
    return out;
  }
};

/// Exact post-transform probabilities. Each (k1, k2) is summed by one worker
/// in a fixed order, so the result does not depend on the thread count.
inline OutcomeDistribution outcome_distribution(const StateTable& t) {
  const std::uint64_t r = t.r;
  if (r > kMaxDeskOrder) throw std::invalid_argument("subgroup order exceeds the desk-scale limit of 4096");
  std::vector<std::complex<double>> w(r);
  for (std::uint64_t j = 0; j < r; ++j) w[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / r);
  OutcomeDistribution d;
  d.r = r;
  d.prob.assign(r * r, 0.0);
  const double norm = 1.0 / (static_cast<double>(r) * r * r * r);
  parallel_for(r, [&](std::size_t k1) {
    std::vector<std::complex<double>> sums(t.classes.size());
    for (std::uint64_t k2 = 0; k2 < r; ++k2) {
      std::fill(sums.begin(), sums.end(), std::complex<double>{});
      for (std::uint64_t x = 0; x < r; ++x) {
        const std::uint64_t base = (x * k1) % r;
        for (std::uint64_t y = 0; y < r; ++y) sums[t.at(x, y)] += w[(base + y * k2) % r];
      }
      double p = 0;
      for (const auto& s : sums) p += std::norm(s);
      d.prob[k1 * r + k2] = p * norm;
    }
  });
  return d;
}

/// Inverse-CDF sampler over the row-major outcome order.
class OutcomeSampler {
 public:
  OutcomeSampler(const OutcomeDistribution& d, std::uint64_t seed) : d_(d), rng_(seed) {
    cdf_.reserve(d.prob.size());
    double s = 0;
    for (double p : d.prob) cdf_.push_back(s += p);
  }

  std::pair<std::uint64_t, std::uint64_t> next() {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53 * cdf_.back();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    if (i >= cdf_.size()) i = cdf_.size() - 1;
    while (d_.prob[i] == 0.0 && i > 0) --i;
    return {i / d_.r, i % d_.r};
  }

 private:
  const OutcomeDistribution& d_;
  std::mt19937_64 rng_;
  std::vector<double> cdf_;
};

/// Inverse of a mod n, if gcd(a, n) = 1.
inline std::optional<std::uint64_t> inverse_mod(std::uint64_t a, std::uint64_t n) {
  std::int64_t t = 0, new_t = 1;
  std::int64_t rr = static_cast<std::int64_t>(n), new_r = static_cast<std::int64_t>(a % n);
  while (new_r != 0) {
    const std::int64_t q = rr / new_r;
    std::tie(t, new_t) = std::pair{new_t, t - q * new_t};
    std::tie(rr, new_r) = std::pair{new_r, rr - q * new_r};
  }
  if (rr != 1) return std::nullopt;
  return static_cast<std::uint64_t>((t % static_cast<std::int64_t>(n) + static_cast<std::int64_t>(n)) %
                                    static_cast<std::int64_t>(n));
}

/// d from one outcome on the line k2 = d k1; needs k1 invertible mod r.
inline std::optional<std::uint64_t> recover_d(std::uint64_t k1, std::uint64_t k2, std::uint64_t r) {
  if (r == 1) return 0;
  const auto inv = inverse_mod(k1, r);
  if (!inv) return std::nullopt;
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(k2) * *inv) % r);
}

/// First usable outcome of the exact distribution in row-major order.
inline std::optional<std::uint64_t> recover_d(const OutcomeDistribution& d) {
  for (const auto& [k1, k2] : d.support())
    if (auto v = recover_d(k1, k2, d.r)) return v;
  return std::nullopt;
}

class NoInvertibleOutcome : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveReport {
  std::uint64_t d = 0;
  std::uint64_t r = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> samples;
  bool verified = false;
  StateTable table;
  OutcomeDistribution distribution;
};

/// Full pipeline: order, state table, exact distribution, seeded sampling,
/// recovery, and the check d P = Q.
inline SolveReport ecdlp_solve(const CurveParams& c, const AffinePoint& p, const AffinePoint& q, std::uint64_t seed,
                               Backend backend = Backend::Oracle, std::size_t sample_budget = 64) {
  const ECDLPInstance inst = ECDLPInstance::make(c, p, q);
  SolveReport rep;
  rep.r = inst.r;
  rep.table = state_table(inst, backend);
  rep.distribution = outcome_distribution(rep.table);
  OutcomeSampler sampler(rep.distribution, seed);
  for (std::size_t k = 0; k < sample_budget; ++k) {
    const auto s = sampler.next();
    rep.samples.push_back(s);
    const auto d = recover_d(s.first, s.second, inst.r);
    if (d && scalar_mul(c, *d, p) == q) {
      rep.d = *d;
      rep.verified = true;
      return rep;
    }
  }
  throw NoInvertibleOutcome("no usable outcome within " + std::to_string(sample_budget) + " samples");
}

}  // namespace ecdlp_forge
