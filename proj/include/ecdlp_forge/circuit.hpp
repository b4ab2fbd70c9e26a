// Reversible circuit IR: gates, circuits, greedy depth scheduling, linear
// nearest-neighbour legality, Toffoli decomposition accounting and the .rqc
// text format.
//
// Wire index is the physical position on the line. Layout tracking (which
// logical qubit sits on which position) is the router's business.
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ecdlp_forge {

enum class GateKind : std::uint8_t { Not, Cnot, Toffoli, Swap, Opaque2q };

inline std::size_t arity(GateKind k) {
  switch (k) {
    case GateKind::Not: return 1;
    case GateKind::Cnot:
    case GateKind::Swap:
    case GateKind::Opaque2q: return 2;
    case GateKind::Toffoli: return 3;
  }
  return 0;
}

inline std::string_view mnemonic(GateKind k) {
  switch (k) {
    case GateKind::Not: return "NOT";
    case GateKind::Cnot: return "CNOT";
    case GateKind::Toffoli: return "TOF";
    case GateKind::Swap: return "SWAP";
    case GateKind::Opaque2q: return "G2";
  }
  return "?";
}

/// A gate; for CNOT and TOFFOLI the target is the last wire.
class Gate {
 public:
  static Gate not_gate(std::size_t t) { return Gate(GateKind::Not, {t, 0, 0}); }
  static Gate cnot(std::size_t c, std::size_t t) { return Gate(GateKind::Cnot, {c, t, 0}); }
  static Gate toffoli(std::size_t c1, std::size_t c2, std::size_t t) { return Gate(GateKind::Toffoli, {c1, c2, t}); }
  static Gate swap(std::size_t a, std::size_t b) { return Gate(GateKind::Swap, {a, b, 0}); }
  static Gate opaque(std::size_t a, std::size_t b) { return Gate(GateKind::Opaque2q, {a, b, 0}); }

  static Gate make(GateKind kind, const std::vector<std::size_t>& wires) {
    if (wires.size() != arity(kind))
      throw std::invalid_argument(std::string(mnemonic(kind)) + " expects " + std::to_string(arity(kind)) +
                                  " wires, got " + std::to_string(wires.size()));
    std::array<std::size_t, 3> q{0, 0, 0};
    std::copy(wires.begin(), wires.end(), q.begin());
    return Gate(kind, q);
  }

  GateKind kind() const { return kind_; }
  std::size_t size() const { return arity(kind_); }
  std::size_t operator[](std::size_t i) const { return q_[i]; }
  std::size_t target() const { return q_[size() - 1]; }
  const std::size_t* begin() const { return q_.data(); }
  const std::size_t* end() const { return q_.data() + size(); }

  bool touches(std::size_t w) const { return std::find(begin(), end(), w) != end(); }

  /// Same gate with every wire w replaced by map[w].
  template <typename Map>
  Gate remapped(const Map& map) const {
    Gate g = *this;
    for (std::size_t i = 0; i < size(); ++i) g.q_[i] = map[q_[i]];
    return g;
  }

  friend bool operator==(const Gate& a, const Gate& b) {
    return a.kind_ == b.kind_ && std::equal(a.begin(), a.end(), b.begin());
  }

 private:
  Gate(GateKind k, std::array<std::size_t, 3> q) : kind_(k), q_(q) {}

  GateKind kind_;
  std::array<std::size_t, 3> q_;
};

class CircuitBuilder;

/// Immutable ordered gate list over labelled wires. Build through CircuitBuilder.
class Circuit {
 public:
  Circuit() = default;

  std::size_t n_wires() const { return labels_.size(); }
  const std::vector<std::string>& wire_labels() const { return labels_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }

  std::size_t count(GateKind k) const {
    return static_cast<std::size_t>(std::count_if(gates_.begin(), gates_.end(), [k](const Gate& g) { return g.kind() == k; }));
  }

  /// Position of a label, or n_wires() if absent.
  std::size_t wire_of(std::string_view label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    return static_cast<std::size_t>(it - labels_.begin());
  }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  friend class CircuitBuilder;
  std::vector<std::string> labels_;
  std::vector<Gate> gates_;
};

class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::size_t n_wires) {
    c_.labels_.reserve(n_wires);
    for (std::size_t i = 0; i < n_wires; ++i) c_.labels_.push_back("w" + std::to_string(i));
  }

  explicit CircuitBuilder(std::vector<std::string> labels) {
    std::set<std::string> seen;
    for (const auto& l : labels) {
      if (l.empty() || l.find_first_of(" \t\r\n#") != std::string::npos)
        throw std::invalid_argument("invalid wire label '" + l + "'");
      if (!seen.insert(l).second) throw std::invalid_argument("duplicate wire label '" + l + "'");
    }
    c_.labels_ = std::move(labels);
  }

  std::size_t n_wires() const { return c_.labels_.size(); }
  std::size_t size() const { return c_.gates_.size(); }

  CircuitBuilder& add(const Gate& g) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] >= n_wires())
        throw std::out_of_range("wire " + std::to_string(g[i]) + " outside circuit of " + std::to_string(n_wires()) +
                                " wires");
      for (std::size_t j = 0; j < i; ++j)
        if (g[i] == g[j]) throw std::invalid_argument("gate uses wire " + std::to_string(g[i]) + " twice");
    }
    c_.gates_.push_back(g);
    return *this;
  }

  CircuitBuilder& not_gate(std::size_t t) { return add(Gate::not_gate(t)); }
  CircuitBuilder& cnot(std::size_t c, std::size_t t) { return add(Gate::cnot(c, t)); }
  CircuitBuilder& toffoli(std::size_t c1, std::size_t c2, std::size_t t) { return add(Gate::toffoli(c1, c2, t)); }
  CircuitBuilder& swap(std::size_t a, std::size_t b) { return add(Gate::swap(a, b)); }
  CircuitBuilder& opaque(std::size_t a, std::size_t b) { return add(Gate::opaque(a, b)); }

  /// Appends every gate of `sub`, sending its wire w to wire_map[w].
  CircuitBuilder& append(const Circuit& sub, const std::vector<std::size_t>& wire_map) {
    if (wire_map.size() != sub.n_wires()) throw std::invalid_argument("wire map size does not match sub-circuit");
    for (const Gate& g : sub.gates()) add(g.remapped(wire_map));
    return *this;
  }

  CircuitBuilder& append(const Circuit& sub) {
    if (sub.n_wires() > n_wires()) throw std::invalid_argument("sub-circuit has more wires than the builder");
    for (const Gate& g : sub.gates()) add(g);
    return *this;
  }

  Circuit build() const& { return c_; }
  Circuit build() && { return std::move(c_); }

 private:
  Circuit c_;
};

/// Partition of a circuit's gate indices into parallel layers.
struct Schedule {
  std::vector<std::vector<std::size_t>> layers;
  std::size_t depth() const { return layers.size(); }
};

/// Greedy as-soon-as-possible layer of every gate (0-based).
inline std::vector<std::size_t> asap_layers(const Circuit& c) {
  std::vector<std::size_t> wire_free(c.n_wires(), 0);  // first layer where the wire is free
  std::vector<std::size_t> layer_of;
  layer_of.reserve(c.size());
  for (const Gate& g : c.gates()) {
    std::size_t layer = 0;
    for (std::size_t w : g) layer = std::max(layer, wire_free[w]);
    for (std::size_t w : g) wire_free[w] = layer + 1;
    layer_of.push_back(layer);
  }
  return layer_of;
}

inline Schedule schedule(const Circuit& c) {
  Schedule s;
  const auto layer_of = asap_layers(c);
  for (std::size_t i = 0; i < layer_of.size(); ++i) {
    if (layer_of[i] >= s.layers.size()) s.layers.resize(layer_of[i] + 1);
    s.layers[layer_of[i]].push_back(i);
  }
  return s;
}

inline std::size_t depth(const Circuit& c) {
  std::vector<std::size_t> wire_free(c.n_wires(), 0);
  std::size_t d = 0;
  for (const Gate& g : c.gates()) {
    std::size_t layer = 0;
    for (std::size_t w : g) layer = std::max(layer, wire_free[w]);
    for (std::size_t w : g) wire_free[w] = layer + 1;
    d = std::max(d, layer + 1);
  }
  return d;
}

inline bool is_lnn(const Gate& g) {
  switch (g.kind()) {
    case GateKind::Not: return true;
    case GateKind::Cnot:
    case GateKind::Swap:
    case GateKind::Opaque2q: return (g[0] > g[1] ? g[0] - g[1] : g[1] - g[0]) == 1;
    case GateKind::Toffoli: {
      const auto [lo, hi] = std::minmax({g[0], g[1], g[2]});
      return hi - lo == 2;  // wires are distinct, so this is {lo, lo+1, lo+2}
    }
  }
  return false;
}

inline bool is_lnn(const Circuit& c) {
  return std::all_of(c.gates().begin(), c.gates().end(), [](const Gate& g) { return is_lnn(g); });
}

/// Two-qubit gates per Toffoli in decompose_toffoli's template.
inline constexpr std::size_t kToffoliTemplateSize = 5;

/// Replaces every Toffoli on positions {p, p+1, p+2} by five opaque
/// two-qubit gates alternating over the adjacent pairs (p+1,p+2) and
/// (p,p+1), depth 5. No single-qubit fix-ups are emitted. The result is for
/// depth and count accounting only and cannot be simulated.
inline Circuit decompose_toffoli(const Circuit& c) {
  CircuitBuilder b(c.wire_labels());
  for (const Gate& g : c.gates()) {
    if (g.kind() != GateKind::Toffoli) {
      b.add(g);
      continue;
    }
    if (!is_lnn(g)) throw std::invalid_argument("Toffoli on non-consecutive wires; route the circuit first");
    const std::size_t lo = std::min({g[0], g[1], g[2]});
    b.opaque(lo + 1, lo + 2).opaque(lo, lo + 1).opaque(lo + 1, lo + 2).opaque(lo, lo + 1).opaque(lo + 1, lo + 2);
  }
  return std::move(b).build();
}

/// Gate counts by kind, keyed by mnemonic.
inline std::map<std::string, std::size_t> gate_counts(const Circuit& c) {
  std::map<std::string, std::size_t> out;
  for (GateKind k : {GateKind::Not, GateKind::Cnot, GateKind::Toffoli, GateKind::Swap, GateKind::Opaque2q})
    out[std::string(mnemonic(k))] = c.count(k);
  return out;
}

// ---------------------------------------------------------------------------
// .rqc text format
//
//   # comment
//   WIRES n
//   LABEL i name
//   NOT t | CNOT c t | TOF c1 c2 t | SWAP a b | G2 a b
// ---------------------------------------------------------------------------

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline std::string emit_text(const Circuit& c) {
  std::ostringstream os;
  os << "WIRES " << c.n_wires() << '\n';
  for (std::size_t i = 0; i < c.n_wires(); ++i) os << "LABEL " << i << ' ' << c.wire_labels()[i] << '\n';
  for (const Gate& g : c.gates()) {
    os << mnemonic(g.kind());
    for (std::size_t w : g) os << ' ' << w;
    os << '\n';
  }
  return os.str();
}

inline Circuit parse_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::size_t n_wires = 0;
  bool have_header = false;
  std::vector<std::string> labels;
  std::vector<bool> labelled;
  std::vector<std::pair<std::size_t, Gate>> gates;

  const auto parse_index = [&](std::istringstream& ls, const char* what) {
    std::string tok;
    if (!(ls >> tok)) throw ParseError(lineno, std::string("missing ") + what);
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(tok, &pos);
    } catch (const std::exception&) {
      throw ParseError(lineno, std::string("bad ") + what + " '" + tok + "'");
    }
    if (pos != tok.size() || tok[0] == '-' || tok[0] == '+')
      throw ParseError(lineno, std::string("bad ") + what + " '" + tok + "'");
    return static_cast<std::size_t>(v);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    if (op == "WIRES") {
      if (have_header) throw ParseError(lineno, "duplicate WIRES header");
      n_wires = parse_index(ls, "wire count");
      have_header = true;
      labels.resize(n_wires);
      labelled.assign(n_wires, false);
    } else if (!have_header) {
      throw ParseError(lineno, "expected WIRES header before '" + op + "'");
    } else if (op == "LABEL") {
      const std::size_t i = parse_index(ls, "wire index");
      std::string name;
      if (!(ls >> name)) throw ParseError(lineno, "missing label name");
      if (i >= n_wires) throw ParseError(lineno, "label index " + std::to_string(i) + " out of range");
      if (labelled[i]) throw ParseError(lineno, "wire " + std::to_string(i) + " labelled twice");
      labels[i] = name;
      labelled[i] = true;
    } else {
      GateKind kind;
      if (op == "NOT") kind = GateKind::Not;
      else if (op == "CNOT") kind = GateKind::Cnot;
      else if (op == "TOF") kind = GateKind::Toffoli;
      else if (op == "SWAP") kind = GateKind::Swap;
      else if (op == "G2") kind = GateKind::Opaque2q;
      else throw ParseError(lineno, "unknown gate '" + op + "'");
      std::vector<std::size_t> wires;
      for (std::size_t k = 0; k < arity(kind); ++k) wires.push_back(parse_index(ls, "wire index"));
      gates.emplace_back(lineno, Gate::make(kind, wires));
    }
    std::string extra;
    if (ls >> extra) throw ParseError(lineno, "unexpected token '" + extra + "'");
  }
  if (!have_header) throw ParseError(lineno, "missing WIRES header");
  for (std::size_t i = 0; i < n_wires; ++i)
    if (!labelled[i]) labels[i] = "w" + std::to_string(i);

  std::unique_ptr<CircuitBuilder> b;
  try {
    b = std::make_unique<CircuitBuilder>(labels);
  } catch (const std::exception& e) {
    throw ParseError(lineno, e.what());
  }
  for (const auto& [ln, g] : gates) {
    try {
      b->add(g);
    } catch (const std::exception& e) {
      throw ParseError(ln, e.what());
    }
  }
  return std::move(*b).build();
}

/// Gates of `first` then `second` over the wires of `first`.
inline Circuit concat(const Circuit& first, const Circuit& second) {
  if (first.n_wires() != second.n_wires()) throw std::invalid_argument("concat needs equal wire counts");
  CircuitBuilder b(first.wire_labels());
  b.append(first).append(second);
  return std::move(b).build();
}

}  // namespace ecdlp_forge
