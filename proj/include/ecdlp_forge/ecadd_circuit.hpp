// Reversible datapath adding a classically known point R to a projective
// point register (X, Y, Z).
//
// With R = (xR, yR, 1) the generic sum needs
//   A = Y + yR Z, B = X + xR Z, W = Z
//   C = W (A^2 + AB + a B^2) + B^3
//   X' = C B, Z' = B^3 W, Y' = A (X B^2 + C) + C B + Y B^3
// Every product lands in its own zeroed register (the multiplier only adds
// into a zero target) and nothing is uncomputed, so the intermediates stay
// available for a later inverse pass.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ecdlp_forge/bitsim.hpp"
#include "ecdlp_forge/circuit.hpp"
#include "ecdlp_forge/ecc.hpp"
#include "ecdlp_forge/mastrovito.hpp"

namespace ecdlp_forge {

struct WireRange {
  std::string name;
  std::size_t first = 0;
  std::size_t width = 0;

  std::vector<std::size_t> wires() const {
    std::vector<std::size_t> w(width);
    for (std::size_t i = 0; i < width; ++i) w[i] = first + i;
    return w;
  }
  friend bool operator==(const WireRange&, const WireRange&) = default;
};

/// Wire ranges of a point-add circuit. Inputs X, Y, Z come first; every other
/// register is an ancilla that must start at zero. x_out/y_out/z_out name the
/// ancillas holding the sum.
struct PointRegisterMap {
  unsigned m = 0;
  WireRange x, y, z;
  std::vector<WireRange> ancillas;
  WireRange x_out, y_out, z_out;

  std::size_t n_wires() const { return ancillas.empty() ? 3 * std::size_t{m} : ancillas.back().first + m; }

  const WireRange& find(const std::string& name) const {
    for (const WireRange* r : {&x, &y, &z})
      if (r->name == name) return *r;
    for (const auto& r : ancillas)
      if (r.name == name) return r;
    throw std::out_of_range("no register named " + name);
  }

  /// Sidecar text: "INPUT|ANCILLA name first width" per register, then an
  /// "OUTPUT name" line per sum coordinate.
  std::string to_text() const {
    std::ostringstream os;
    os << "M " << m << '\n';
    for (const WireRange* r : {&x, &y, &z}) os << "INPUT " << r->name << ' ' << r->first << ' ' << r->width << '\n';
    for (const auto& r : ancillas) os << "ANCILLA " << r.name << ' ' << r.first << ' ' << r.width << '\n';
    for (const WireRange* r : {&x_out, &y_out, &z_out}) os << "OUTPUT " << r->name << '\n';
    return os.str();
  }
};

struct PointAddCircuit {
  Circuit circuit;
  PointRegisterMap map;
};

namespace detail {

class PointAddBuilder {
 public:
  explicit PointAddBuilder(unsigned m) : m_(m) {
    map_.m = m;
    map_.x = reg("X");
    map_.y = reg("Y");
    map_.z = reg("Z");
  }

  WireRange ancilla(const std::string& name) {
    WireRange r = reg(name);
    map_.ancillas.push_back(r);
    return r;
  }

  std::vector<std::string> labels() const { return labels_; }
  PointRegisterMap& map() { return map_; }
  unsigned m() const { return m_; }

 private:
  WireRange reg(const std::string& name) {
    WireRange r{name, labels_.size(), m_};
    for (unsigned i = 0; i < m_; ++i) labels_.push_back(name + std::to_string(i));
    return r;
  }

  unsigned m_;
  std::vector<std::string> labels_;
  PointRegisterMap map_;
};

inline void xor_into(CircuitBuilder& b, const WireRange& src, const WireRange& dst) {
  for (std::size_t i = 0; i < src.width; ++i) b.cnot(src.first + i, dst.first + i);
}

}  // namespace detail

/// Circuit for (X, Y, Z) + R on generic inputs: (X:Y:Z) not O, R or -R.
inline PointAddCircuit synth_point_add_known(const CurveParams& c, const AffinePoint& r) {
  if (r.is_infinity()) throw std::invalid_argument("known point must be finite");
  require_on_curve(c, r);
  const FieldSpec& f = c.spec();
  const unsigned m = f.m();

  // register layout first, so the builder knows every label
  detail::PointAddBuilder layout(m);
  const WireRange scratch = layout.ancilla("S");
  const WireRange A = layout.ancilla("A"), B = layout.ancilla("B");
  const WireRange A2 = layout.ancilla("A2"), AB = layout.ancilla("AB"), B2 = layout.ancilla("B2");
  const WireRange aB2 = layout.ancilla("aB2"), U = layout.ancilla("U"), B3 = layout.ancilla("B3");
  const WireRange C = layout.ancilla("C"), X3 = layout.ancilla("X3"), Z3 = layout.ancilla("Z3");
  const WireRange T = layout.ancilla("T"), Y3 = layout.ancilla("Y3"), YB3 = layout.ancilla("YB3");
  const PointRegisterMap& regs = layout.map();
  const WireRange X = regs.x, Y = regs.y, Z = regs.z;

  CircuitBuilder b(layout.labels());
  const auto mul = [&](const WireRange& u, const WireRange& v, const WireRange& out) {
    append_multiplier(b, f, u.wires(), v.wires(), out.wires());
  };
  const auto square = [&](const WireRange& u, const WireRange& out) {
    detail::xor_into(b, u, scratch);
    mul(u, scratch, out);
    detail::xor_into(b, u, scratch);
  };
  // out ^= k * u through the scratch register; synth_known_mul clears it.
  const auto known_mul = [&](const FieldElement& k, const WireRange& u, const WireRange& out) {
    if (k.is_zero()) return;
    detail::xor_into(b, u, scratch);
    std::vector<std::size_t> wires = scratch.wires();
    const auto o = out.wires();
    wires.insert(wires.end(), o.begin(), o.end());
    b.append(synth_known_mul(f, k), wires);
  };

  known_mul(r.y(), Z, A);
  detail::xor_into(b, Y, A);
  known_mul(r.x(), Z, B);
  detail::xor_into(b, X, B);
  square(A, A2);
  mul(A, B, AB);
  square(B, B2);
  known_mul(c.a(), B2, aB2);
  mul(B2, B, B3);
  detail::xor_into(b, A2, U);
  detail::xor_into(b, AB, U);
  detail::xor_into(b, aB2, U);
  mul(Z, U, C);
  detail::xor_into(b, B3, C);
  mul(C, B, X3);
  mul(B3, Z, Z3);
  mul(X, B2, T);
  detail::xor_into(b, C, T);
  mul(A, T, Y3);
  detail::xor_into(b, X3, Y3);
  mul(Y, B3, YB3);
  detail::xor_into(b, YB3, Y3);

  PointRegisterMap map = regs;
  map.x_out = X3;
  map.y_out = Y3;
  map.z_out = Z3;
  return {std::move(b).build(), std::move(map)};
}

/// Forward pass, copy of the sum into fresh registers, then the inverse of the
/// forward pass: every ancilla returns to zero and the copies keep the sum.
inline PointAddCircuit with_uncompute(const PointAddCircuit& fwd) {
  std::vector<std::string> labels = fwd.circuit.wire_labels();
  PointRegisterMap map = fwd.map;
  const unsigned m = map.m;
  std::vector<WireRange> copies;
  for (const char* name : {"Xs", "Ys", "Zs"}) {
    WireRange r{name, labels.size(), m};
    for (unsigned i = 0; i < m; ++i) labels.push_back(name + std::to_string(i));
    map.ancillas.push_back(r);
    copies.push_back(r);
  }
  CircuitBuilder b(labels);
  b.append(fwd.circuit);
  detail::xor_into(b, fwd.map.x_out, copies[0]);
  detail::xor_into(b, fwd.map.y_out, copies[1]);
  detail::xor_into(b, fwd.map.z_out, copies[2]);
  b.append(inverse(fwd.circuit));
  map.x_out = copies[0];
  map.y_out = copies[1];
  map.z_out = copies[2];
  return {std::move(b).build(), std::move(map)};
}

/// Runs the circuit on each input point with zeroed ancillas. Throws
/// std::logic_error if the inputs are not restored.
inline std::vector<ProjectivePoint> simulate_point_add(const PointAddCircuit& pac, std::span<const ProjectivePoint> in) {
  const auto& map = pac.map;
  const auto xw = map.x.wires(), yw = map.y.wires(), zw = map.z.wires();
  std::vector<BitState> states;
  states.reserve(in.size());
  for (const auto& p : in) {
    BitState s(pac.circuit.n_wires());
    s.store(xw, p.X.bits());
    s.store(yw, p.Y.bits());
    s.store(zw, p.Z.bits());
    states.push_back(std::move(s));
  }
  const auto outs = run_batch(pac.circuit, states);
  const FieldSpec& f = in.empty() ? default_field(2) : in.front().X.spec();
  std::vector<ProjectivePoint> result;
  result.reserve(in.size());
  for (std::size_t k = 0; k < in.size(); ++k) {
    const auto& s = outs[k];
    if (s.load(xw) != in[k].X.bits() || s.load(yw) != in[k].Y.bits() || s.load(zw) != in[k].Z.bits())
      throw std::logic_error("point-add circuit modified its input register");
    result.push_back({FieldElement(f, s.load(map.x_out.wires())), FieldElement(f, s.load(map.y_out.wires())),
                      FieldElement(f, s.load(map.z_out.wires()))});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Exceptional cases
// ---------------------------------------------------------------------------

/// Fixed stand-in for O in point registers: the first (X, Y, 1) in
/// lexicographic order that is not on the curve.
inline ProjectivePoint sentinel(const CurveParams& c) {
  const FieldSpec& f = c.spec();
  const std::uint64_t limit = f.m() >= 32 ? std::uint64_t{1} << 32 : f.order();
  for (std::uint64_t x = 0; x < limit; ++x)
    for (std::uint64_t y = 0; y < limit; ++y)
      if (!on_curve(c, AffinePoint::unchecked(FieldElement(f, x), FieldElement(f, y))))
        return {FieldElement(f, x), FieldElement(f, y), FieldElement::one(f)};
  throw std::logic_error("every coordinate pair is on the curve");
}

inline bool is_identity_rep(const CurveParams& c, const ProjectivePoint& p) {
  return p.is_infinity() || p == sentinel(c);
}

enum class PointAddCase { Generic, AccumulatorIsIdentity, SumIsIdentity, Doubling };

inline const char* to_string(PointAddCase k) {
  switch (k) {
    case PointAddCase::Generic: return "generic";
    case PointAddCase::AccumulatorIsIdentity: return "accumulator-identity";
    case PointAddCase::SumIsIdentity: return "sum-identity";
    case PointAddCase::Doubling: return "doubling";
  }
  return "?";
}

struct PointAddResolution {
  PointAddCase kind;
  ProjectivePoint result;  // meaningful unless kind == Generic
};

/// Harness-level rule for acc + R when the datapath cannot be used. Class
/// tests are cross-multiplications and 2R is doubled projectively, so no
/// inversion happens here.
inline PointAddResolution exceptional_case_policy(const CurveParams& c, const ProjectivePoint& acc,
                                                  const AffinePoint& r) {
  const FieldSpec& f = c.spec();
  if (r.is_infinity()) throw std::invalid_argument("known point must be finite");
  const ProjectivePoint o = sentinel(c);
  const ProjectivePoint r_rep{r.x(), r.y(), FieldElement::one(f)};
  if (acc.is_infinity() || acc == o) return {PointAddCase::AccumulatorIsIdentity, r_rep};
  if (acc.X == r.x() * acc.Z) {
    if (acc.Y == r.y() * acc.Z) {
      const ProjectivePoint twice = double_projective(c, r_rep);
      return {PointAddCase::Doubling, twice.is_infinity() ? o : twice};
    }
    return {PointAddCase::SumIsIdentity, o};  // acc = -R
  }
  return {PointAddCase::Generic, acc};
}

}  // namespace ecdlp_forge
