// Computational-basis simulation of reversible circuits.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecdlp_forge/circuit.hpp"
#include "ecdlp_forge/parallel.hpp"

namespace ecdlp_forge {

class NotSimulatable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One classical value per wire.
class BitState {
 public:
  BitState() = default;
  explicit BitState(std::size_t n) : bits_(n, 0) {}

  /// '0'/'1' characters, wire 0 first.
  static BitState from_string(std::string_view s) {
    BitState st(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("bit string may only contain 0 and 1");
      st.bits_[i] = s[i] == '1';
    }
    return st;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }

  /// Writes the low `wires.size()` bits of v, bit k to wires[k].
  void store(std::span<const std::size_t> wires, std::uint64_t v) {
    for (std::size_t k = 0; k < wires.size(); ++k) set(wires[k], (v >> k) & 1U);
  }

  std::uint64_t load(std::span<const std::size_t> wires) const {
    std::uint64_t v = 0;
    for (std::size_t k = 0; k < wires.size(); ++k)
      if ((*this)[wires[k]]) v |= std::uint64_t{1} << k;
    return v;
  }

  friend bool operator==(const BitState&, const BitState&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

inline void apply_gate_in_place(BitState& s, const Gate& g) {
  switch (g.kind()) {
    case GateKind::Not: s.flip(g[0]); break;
    case GateKind::Cnot:
      if (s[g[0]]) s.flip(g[1]);
      break;
    case GateKind::Toffoli:
      if (s[g[0]] && s[g[1]]) s.flip(g[2]);
      break;
    case GateKind::Swap: {
      const bool a = s[g[0]];
      s.set(g[0], s[g[1]]);
      s.set(g[1], a);
      break;
    }
    case GateKind::Opaque2q: throw NotSimulatable("opaque two-qubit gates are not simulatable");
  }
}

inline BitState apply_gate(BitState s, const Gate& g) {
  for (std::size_t w : g)
    if (w >= s.size()) throw std::out_of_range("gate wire beyond state length");
  apply_gate_in_place(s, g);
  return s;
}

inline void require_simulatable(const Circuit& c) {
  if (c.count(GateKind::Opaque2q) != 0) throw NotSimulatable("circuit contains opaque two-qubit gates");
}

inline BitState run(const Circuit& c, BitState s) {
  if (s.size() != c.n_wires())
    throw std::invalid_argument("state has " + std::to_string(s.size()) + " bits, circuit has " +
                                std::to_string(c.n_wires()) + " wires");
  require_simulatable(c);
  for (const Gate& g : c.gates()) apply_gate_in_place(s, g);
  return s;
}

/// Runs many inputs at once: 64 inputs are packed per machine word and every
/// gate becomes a few word operations. Chunks of 64 run in parallel.
inline std::vector<BitState> run_batch(const Circuit& c, std::span<const BitState> inputs) {
  require_simulatable(c);
  const std::size_t n = c.n_wires();
  for (const auto& s : inputs)
    if (s.size() != n) throw std::invalid_argument("batch input length does not match circuit");
  std::vector<BitState> out(inputs.size(), BitState(n));
  const std::size_t chunks = (inputs.size() + 63) / 64;
  parallel_for(chunks, [&](std::size_t chunk) {
    const std::size_t lo = chunk * 64;
    const std::size_t hi = std::min(inputs.size(), lo + 64);
    std::vector<std::uint64_t> lanes(n, 0);
    for (std::size_t k = lo; k < hi; ++k)
      for (std::size_t w = 0; w < n; ++w)
        if (inputs[k][w]) lanes[w] |= std::uint64_t{1} << (k - lo);
    for (const Gate& g : c.gates()) {
      switch (g.kind()) {
        case GateKind::Not: lanes[g[0]] = ~lanes[g[0]]; break;
        case GateKind::Cnot: lanes[g[1]] ^= lanes[g[0]]; break;
        case GateKind::Toffoli: lanes[g[2]] ^= lanes[g[0]] & lanes[g[1]]; break;
        case GateKind::Swap: std::swap(lanes[g[0]], lanes[g[1]]); break;
        case GateKind::Opaque2q: break;  // rejected above
      }
    }
    for (std::size_t k = lo; k < hi; ++k)
      for (std::size_t w = 0; w < n; ++w) out[k].set(w, (lanes[w] >> (k - lo)) & 1U);
  });
  return out;
}

/// Gates in reverse order. Every gate in the simulatable set is self-inverse.
inline Circuit inverse(const Circuit& c) {
  require_simulatable(c);
  CircuitBuilder b(c.wire_labels());
  for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it) b.add(*it);
  return std::move(b).build();
}

}  // namespace ecdlp_forge
