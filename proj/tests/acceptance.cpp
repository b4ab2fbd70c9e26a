// Acceptance run: one PASS/FAIL line per criterion, with the measured numbers.
// Exits 1 if any line fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ecdlp_forge/circuit.hpp"
#include "ecdlp_forge/ecadd_circuit.hpp"
#include "ecdlp_forge/ecc.hpp"
#include "ecdlp_forge/mastrovito.hpp"
#include "ecdlp_forge/shor.hpp"

using namespace ecdlp_forge;

namespace {

int failures = 0;

void line(const std::string& id, bool ok, const std::string& what, const std::string& detail, double secs = -1) {
  failures += !ok;
  std::printf("%s %-4s %s: %s", ok ? "PASS" : "FAIL", id.c_str(), what.c_str(), detail.c_str());
  if (secs >= 0) std::printf(" [%.2f s]", secs);
  std::printf("\n");
  std::fflush(stdout);
}

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

template <typename... T>
std::string fmt(T&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

bool products_match(const FieldSpec& f, const Circuit& c, const MultiplierIo& io,
                    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs) {
  std::vector<std::uint64_t> got;
  try {
    got = simulate_products(c, io, pairs);
  } catch (const std::logic_error&) {
    return false;
  }
  for (std::size_t k = 0; k < pairs.size(); ++k)
    if (got[k] != field_mul(FieldElement(f, pairs[k].first), FieldElement(f, pairs[k].second)).bits()) return false;
  return true;
}

void criterion1() {
  Stopwatch sw;
  bool ok = true;
  std::string detail;
  for (auto [m, poly] : {std::pair{4U, "0x13"}, {7U, "0x83"}, {15U, "0x8003"}}) {
    const std::size_t n = synth_multiplier(FieldSpec(m, poly)).size();
    ok &= n == m * m + m - 1;
    detail += fmt("m=", m, ":", n, "/", m * m + m - 1, " ");
  }
  const std::size_t pent = synth_multiplier(FieldSpec(8, "0x11b")).size();
  ok &= pent <= 127;
  detail += fmt("m=8 pentanomial:", pent, "<=127");
  line("1", ok && sw.secs() < 1, "multiplier gate counts", detail, sw.secs());
}

void criterion2() {
  Stopwatch sw;
  const Circuit c = synth_multiplier(FieldSpec(4, "0x13"));
  const auto& g = c.gates();
  const auto all = [&](std::size_t from, std::size_t to, GateKind k) {
    for (std::size_t i = from; i < to; ++i)
      if (g[i].kind() != k) return false;
    return true;
  };
  const bool ok = g.size() == 19 && all(0, 6, GateKind::Toffoli) && all(6, 9, GateKind::Cnot) &&
                  all(9, 19, GateKind::Toffoli);
  line("2", ok && sw.secs() < 1, "m=4 stage shape", "gates 1-6 TOF, 7-9 CNOT, 10-19 TOF", sw.secs());
}

void criterion3() {
  Stopwatch sw;
  std::string detail;
  bool ok = true;
  for (unsigned m : {4U, 5U, 8U, 16U}) {
    const FieldSpec f = default_field(m);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    if (m <= 5) {
      for (std::uint64_t a = 0; a < f.order(); ++a)
        for (std::uint64_t b = 0; b < f.order(); ++b) pairs.emplace_back(a, b);
    } else {
      std::mt19937_64 rng(m);
      for (int k = 0; k < 10000; ++k) pairs.emplace_back(rng() & f.mask(), rng() & f.mask());
    }
    const bool plain = products_match(f, synth_multiplier(f), MultiplierIo::unrouted(m), pairs);
    const auto routed = route_lnn(f);
    const bool lnn = products_match(f, routed.circuit, MultiplierIo::routed(routed, m), pairs);
    ok &= plain && lnn;
    detail += fmt("m=", m, ":", pairs.size(), (plain ? "" : " unrouted-mismatch"), (lnn ? "" : " routed-mismatch"),
                  " ");
  }
  line("3", ok && sw.secs() < 30, "functional equivalence (unrouted and LNN-routed)", detail + "pairs pass", sw.secs());
}

void criterion4() {
  Stopwatch sw;
  const std::vector<unsigned> ms{4, 8, 16, 32};
  bool formulas = true;
  std::string fd;
  std::vector<double> depth;
  for (unsigned m : ms) {
    const FieldSpec f = default_field(m);
    const std::size_t e = ecdlp_forge::depth(synth_e_stage(f)), d = ecdlp_forge::depth(synth_d_stage(f));
    formulas &= e == 2 * m - 3 && d == 2 * m - 1;
    depth.push_back(static_cast<double>(ecdlp_forge::depth(synth_multiplier(f))));
    fd += fmt("m=", m, ":e", e, ",d", d, " ");
  }
  line("4a", formulas, "e/d stage depths 2m-3 and 2m-1", fd);

  // C = max(depth - 9m) makes the bound hold by construction; what matters is
  // whether depth is exactly affine in m.
  double c = -1e300;
  for (std::size_t i = 0; i < ms.size(); ++i) c = std::max(c, depth[i] - 9.0 * ms[i]);
  std::string dd;
  for (std::size_t i = 0; i < ms.size(); ++i) dd += fmt("m=", ms[i], ":", depth[i], " ");
  line("4b", true, "unrouted depth <= 9m + C", dd + fmt("C=", c));

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    sx += ms[i];
    sy += depth[i];
    sxx += double(ms[i]) * ms[i];
    sxy += ms[i] * depth[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double worst = 0;
  std::string rd;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double res = depth[i] - (slope * ms[i] + icpt);
    worst = std::max(worst, std::abs(res));
    rd += fmt(std::lround(res * 100) / 100.0, " ");
  }
  line("4c", worst < 1e-9 && sw.secs() < 5, "degree-1 fit of unrouted depth has zero residuals",
       fmt("slope=", slope, " residuals ", rd, "(M-stage depth varies with the pentanomial)"), sw.secs());
}

FieldSpec random_irreducible(unsigned m, std::mt19937_64& rng) {
  const std::uint64_t low_mask = (std::uint64_t{1} << m) - 1;
  for (;;) {
    BinaryPoly p = BinaryPoly::from_u64((rng() & low_mask) | 1U);
    p.set(m, true);
    if (poly_is_irreducible(p)) return FieldSpec(m, p);
  }
}

void criterion5() {
  Stopwatch sw;
  std::mt19937_64 rng(5);
  bool ok = true;
  std::string detail;
  for (unsigned m : {4U, 8U, 16U}) {
    std::size_t worst = 0;
    for (int k = 0; k < 20; ++k) worst = std::max(worst, synth_reduction_stage(random_irreducible(m, rng)).size());
    ok &= worst <= m * m - 1;
    detail += fmt("m=", m, " max ", worst, "<=", m * m - 1, " ");
  }
  line("5a", ok, "M-stage CNOTs over 20 random irreducibles", detail);

  bool tri = true;
  std::string td;
  for (auto [m, poly] : {std::pair{4U, "0x13"}, {7U, "0x83"}, {9U, "0x211"}, {15U, "0x8003"}, {31U, "0x80000009"}}) {
    const std::size_t n = synth_reduction_stage(FieldSpec(m, poly)).size();
    tri &= n == m - 1;
    td += fmt(poly, ":", n, " ");
  }
  line("5b", tri && sw.secs() < 5, "trinomial M-stage uses m-1 CNOTs", td, sw.secs());
}

void criterion6() {
  Stopwatch sw;
  bool legal = true;
  std::map<unsigned, double> dec;
  std::string detail;
  for (unsigned m : {4U, 8U, 16U, 32U, 64U}) {
    const auto r = route_lnn(default_field(m));
    const bool l = is_lnn(r.circuit) && r.stats.swap_stages <= 2 * r.stats.computational_stages;
    legal &= l;
    dec[m] = static_cast<double>(ecdlp_forge::depth(decompose_toffoli(r.circuit)));
    detail += fmt("m=", m, ":comp ", r.stats.computational_stages, " swap ", r.stats.swap_stages, " ");
  }
  line("6a", legal, "routed multipliers are LNN, swap stages <= 2x computational", detail);
  std::string dd;
  for (auto [m, d] : dec) dd += fmt("m=", m, ":", d, " (", std::lround(d / m * 100) / 100.0, "m) ");
  const double s1 = (dec[32] - dec[16]) / 16, s2 = (dec[64] - dec[32]) / 32;
  const bool stable = std::abs(s2 - s1) / s1 <= 0.05;
  line("6b", stable && sw.secs() < 60, "decomposed depth linear in m",
       dd + fmt("slope 16-32 ", s1, " vs 32-64 ", s2, "; reference 34m"), sw.secs());
}

bool group_axioms(const CurveParams& c, std::size_t& triples) {
  const auto pts = enumerate_points(c);
  const AffinePoint o = AffinePoint::infinity();
  std::map<std::pair<std::size_t, std::size_t>, AffinePoint> table;
  const auto index = [&](const AffinePoint& p) {
    return static_cast<std::size_t>(std::find(pts.begin(), pts.end(), p) - pts.begin());
  };
  std::vector<std::vector<std::size_t>> sum(pts.size(), std::vector<std::size_t>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (add_affine(c, pts[i], o) != pts[i]) return false;
    if (!add_affine(c, pts[i], negate(c, pts[i])).is_infinity()) return false;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const AffinePoint s = add_affine(c, pts[i], pts[j]);
      if (!s.is_infinity() && !on_curve(c, s)) return false;
      sum[i][j] = index(s);
      if (sum[i][j] == pts.size()) return false;
    }
  }
  triples = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (sum[i][j] != sum[j][i]) return false;
      for (std::size_t k = 0; k < pts.size(); ++k, ++triples)
        if (sum[sum[i][j]][k] != sum[i][sum[j][k]]) return false;
    }
  return true;
}

void criterion7() {
  Stopwatch sw;
  bool ok = true;
  std::string detail;
  for (unsigned m : {4U, 5U}) {
    const auto desk = find_desk_curve(default_field(m));
    std::size_t triples = 0;
    ok &= group_axioms(desk.curve, triples);
    detail += fmt("m=", m, ":", desk.group_order, " points, ", triples, " triples; ");
  }
  const auto desk = find_desk_curve(default_field(4));
  const auto pts = enumerate_points(desk.curve);
  const FieldSpec& f = desk.curve.spec();
  std::size_t pairs = 0;
  for (const auto& p : pts)
    for (const auto& q : pts) {
      ++pairs;
      const auto s = add_projective(desk.curve, ProjectivePoint::from_affine(f, p), ProjectivePoint::from_affine(f, q));
      ok &= to_affine(s) == add_affine(desk.curve, p, q);
    }
  detail += fmt("commuting square on ", pairs, " pairs");
  line("7", ok && sw.secs() < 30, "group law and projective/affine agreement", detail, sw.secs());
}

void criterion8() {
  Stopwatch sw;
  const auto desk = find_desk_curve(default_field(4));
  const CurveParams& c = desk.curve;
  const FieldSpec& f = c.spec();
  const auto pts = enumerate_points(c);
  std::size_t checked = 0, mismatched = 0, dirty = 0;
  for (const auto& r : pts) {
    if (r.is_infinity()) continue;
    const ProjectivePoint rr = ProjectivePoint::from_affine(f, r);
    std::vector<ProjectivePoint> accs;
    for (const auto& p : pts) {
      if (p.is_infinity() || p.x() == r.x()) continue;  // O, R and -R take the exceptional path
      for (std::uint64_t l = 1; l < f.order(); ++l) {
        const FieldElement lam(f, l);
        accs.push_back({lam * p.x(), lam * p.y(), lam});
      }
    }
    const PointAddCircuit fwd = synth_point_add_known(c, r);
    const auto out = simulate_point_add(fwd, accs);
    for (std::size_t k = 0; k < accs.size(); ++k, ++checked) mismatched += !(out[k] == add_projective(c, accs[k], rr));

    // uncompute pass: everything except inputs and the copies returns to zero
    const PointAddCircuit full = with_uncompute(fwd);
    std::vector<BitState> states;
    for (const auto& p : accs) {
      BitState s(full.circuit.n_wires());
      s.store(full.map.x.wires(), p.X.bits());
      s.store(full.map.y.wires(), p.Y.bits());
      s.store(full.map.z.wires(), p.Z.bits());
      states.push_back(std::move(s));
    }
    const auto after = run_batch(full.circuit, states);
    for (std::size_t k = 0; k < accs.size(); ++k) {
      const auto want = add_projective(c, accs[k], rr);
      bool clean = after[k].load(full.map.x_out.wires()) == want.X.bits() &&
                   after[k].load(full.map.y_out.wires()) == want.Y.bits() &&
                   after[k].load(full.map.z_out.wires()) == want.Z.bits();
      for (const auto& a : full.map.ancillas) {
        if (a == full.map.x_out || a == full.map.y_out || a == full.map.z_out) continue;
        clean &= after[k].load(a.wires()) == 0;
      }
      dirty += !clean;
    }
  }
  line("8", mismatched == 0 && dirty == 0 && sw.secs() < 60, "point-add circuit vs oracle, uncompute",
       fmt(checked, " generic (acc, R) pairs incl. all Z scalings, ", mismatched, " mismatches, ", dirty,
           " unclean after uncompute"),
       sw.secs());
}

void criterion9_10() {
  Stopwatch sw;
  std::size_t stated_line_matches = 0, total_d = 0, prob_bad = 0, recover_bad = 0, samples_max = 0, backend_bad = 0;
  std::size_t inv_bad = 0, inv_total = 0;
  std::string curves;
  for (unsigned m : {4U, 5U}) {
    const auto desk = find_desk_curve(default_field(m));
    const std::uint64_t r = desk.subgroup_order;
    curves += fmt("m=", m, " r=", r, " ");
    for (std::uint64_t d = 0; d < r; ++d, ++total_d) {
      const auto inst = ECDLPInstance::make(desk.curve, desk.generator, scalar_mul(desk.curve, d, desk.generator));
      const auto oracle = state_table(inst, Backend::Oracle);
      const auto circuit = state_table(inst, Backend::Circuit);
      backend_bad += oracle.class_of != circuit.class_of || oracle.classes != circuit.classes;
      const auto dist = outcome_distribution(circuit);

      bool stated = true;
      for (std::uint64_t k1 = 0; k1 < r; ++k1)
        for (std::uint64_t k2 = 0; k2 < r; ++k2) {
          const double p = dist.at(k1, k2);
          const bool on_stated = (k1 + d * k2) % r == 0;
          const bool on_true = (d * k1) % r == k2;
          stated &= on_stated ? std::abs(p - 1.0 / r) <= 1e-9 : p < 1e-9;
          prob_bad += on_true ? std::abs(p - 1.0 / r) > 1e-9 : p > 1e-12;
        }
      stated_line_matches += stated;
      recover_bad += recover_d(dist) != d;

      const auto& inv = circuit.inversions;
      inv_bad += inv.in_point_adds != 0 || inv.to_affine_stage_runs != 1 || inv.total() != 1;
      inv_total += inv.total();
    }
  }
  line("9a", stated_line_matches == total_d, "support equals {k1 + d*k2 = 0 mod r}",
       fmt(curves, "matches for ", stated_line_matches, "/", total_d,
           " values of d (only where d^2 = -1 mod r); the transform of the class of x + d*y lives on k2 = d*k1"));
  line("9b", prob_bad == 0 && recover_bad == 0, "support equals {k2 = d*k1 mod r}, each 1/r +- 1e-9",
       fmt(total_d, " values of d, ", prob_bad, " bad cells, ", recover_bad, " recovery errors"));

  std::size_t ok_trials = 0, trials = 0;
  for (unsigned m : {4U, 5U}) {
    const auto desk = find_desk_curve(default_field(m));
    std::mt19937_64 pick(m);
    for (std::uint64_t seed = 0; seed < 100; ++seed, ++trials) {
      const std::uint64_t d = pick() % desk.subgroup_order;
      const auto q = scalar_mul(desk.curve, d, desk.generator);
      try {
        const auto rep = ecdlp_solve(desk.curve, desk.generator, q, seed, Backend::Oracle, 10);
        samples_max = std::max(samples_max, rep.samples.size());
        ok_trials += rep.verified && rep.d == d;
      } catch (const NoInvertibleOutcome&) {
        samples_max = std::max<std::size_t>(samples_max, 11);
      }
    }
  }
  line("9c", ok_trials == trials, "seeded sampling recovers d",
       fmt(ok_trials, "/", trials, " trials (100 per curve), max ", samples_max, " samples"));
  line("9d", backend_bad == 0 && sw.secs() < 120, "circuit-backed and oracle-backed state tables agree",
       fmt(total_d - backend_bad, "/", total_d, " instances"), sw.secs());
  line("10", inv_bad == 0, "single inversion stage",
       fmt("circuit-backed runs call field_inv ", inv_total, " times over ", total_d,
           " instances (0 in point adds, 1 in the batched to_affine stage each). Asymptotic O(m^2) total depth is not measured at this scale; see 4, 6, 8"));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9_10();
  std::printf("%d failing line(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
