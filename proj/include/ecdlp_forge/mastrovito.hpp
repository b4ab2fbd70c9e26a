// Reversible GF(2^m) multipliers in polynomial basis.
//
// The multiplier works in three stages on registers a, b and a zeroed
// ancilla c:
//   1. e-stage:  c_{i+j-m} ^= a_i b_j  for i+j >= m   (e = U b)
//   2. M-stage:  c <- F c, F the invertible m x m extension of the reduction
//                matrix M (column j of M holds x^(m+j) mod P)
//   3. d-stage:  c_{i+j} ^= a_i b_j    for i+j < m    (d = L b)
// leaving c = d + M e = a*b. Toffolis of a stage are emitted grouped by the
// diagonal i-j, so the greedy scheduler finds depth 2m-3 for the e-stage and
// 2m-1 for the d-stage.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ecdlp_forge/bitsim.hpp"
#include "ecdlp_forge/circuit.hpp"
#include "ecdlp_forge/gf2_matrix.hpp"
#include "ecdlp_forge/gf2m.hpp"

namespace ecdlp_forge {

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// m x (m-1) matrix whose column j is x^(m+j) mod P(x).
inline GF2Matrix build_reduction_matrix(const FieldSpec& spec) {
  const unsigned m = spec.m();
  GF2Matrix mat(m, m - 1);
  std::uint64_t col = spec.low();  // x^m mod P
  for (unsigned j = 0; j + 1 < m; ++j) {
    for (unsigned r = 0; r < m; ++r) mat.set(r, j, (col >> r) & 1U);
    const bool carry = (col >> (m - 1)) & 1U;
    col = (m == 64 ? col << 1 : (col << 1) & spec.mask());
    if (carry) col ^= spec.low();
  }
  return mat;
}

/// The reduction matrix completed to an invertible m x m map by a last column
/// e_{m-1}: wire c_{m-1} is zero when the M-stage runs and simply receives its
/// row. Always invertible, since a combination S(x) of degree <= m-2 with
/// x^m S(x) = x^(m-1) mod P would mean S = x^-1, which has degree m-1.
inline GF2Matrix extended_reduction_map(const FieldSpec& spec) {
  const unsigned m = spec.m();
  const GF2Matrix red = build_reduction_matrix(spec);
  GF2Matrix f(m, m);
  for (unsigned r = 0; r < m; ++r) {
    for (unsigned c = 0; c + 1 < m; ++c) f.set(r, c, red(r, c));
    f.set(r, m - 1, r == m - 1);
  }
  if (!f.is_invertible()) throw std::logic_error("reduction map extension is singular");
  return f;
}

// ---------------------------------------------------------------------------
// Linear reversible synthesis
// ---------------------------------------------------------------------------

/// In-place CNOT circuit for v <- F v by Gauss-Jordan elimination with the
/// lowest-index pivot. Uses at most n^2 - 1 CNOTs.
inline Circuit synth_linear(const GF2Matrix& f) {
  if (f.rows() != f.cols()) throw std::invalid_argument("linear synthesis needs a square matrix");
  const std::size_t n = f.rows();
  GF2Matrix a = f;
  std::vector<std::pair<std::size_t, std::size_t>> ops;  // (target row, source row)
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && !a(p, c)) ++p;
    if (p == n) throw std::invalid_argument("matrix is not invertible over GF(2)");
    if (p != c) {
      a.add_row(c, p);
      ops.emplace_back(c, p);
    }
    for (std::size_t r = 0; r < n; ++r)
      if (r != c && a(r, c)) {
        a.add_row(r, c);
        ops.emplace_back(r, c);
      }
  }
  // ops_k ... ops_1 F = I, so F = ops_1 ... ops_k: apply in reverse.
  CircuitBuilder b(n);
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) b.cnot(it->second, it->first);
  return std::move(b).build();
}

// ---------------------------------------------------------------------------
// Register conventions
// ---------------------------------------------------------------------------

/// A named multiplier qubit: register 'a', 'b' or 'c' and bit index.
struct Qubit {
  char reg;
  unsigned index;

  std::string label() const { return std::string(1, reg) + std::to_string(index); }
  friend auto operator<=>(const Qubit&, const Qubit&) = default;
};

/// Unrouted multiplier wires: a_i -> i, b_j -> m+j, c_k -> 2m+k.
struct MultiplierWires {
  unsigned m;

  std::size_t a(unsigned i) const { return i; }
  std::size_t b(unsigned j) const { return m + j; }
  std::size_t c(unsigned k) const { return 2 * std::size_t{m} + k; }

  std::vector<std::size_t> a_wires() const { return range(0); }
  std::vector<std::size_t> b_wires() const { return range(m); }
  std::vector<std::size_t> c_wires() const { return range(2 * std::size_t{m}); }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (char r : {'a', 'b', 'c'})
      for (unsigned i = 0; i < m; ++i) out.push_back(Qubit{r, i}.label());
    return out;
  }

 private:
  std::vector<std::size_t> range(std::size_t base) const {
    std::vector<std::size_t> v(m);
    for (unsigned i = 0; i < m; ++i) v[i] = base + i;
    return v;
  }
};

/// One a_i b_j product term and the ancilla bit it lands on.
struct ProductTerm {
  unsigned i, j, k;
  friend auto operator<=>(const ProductTerm&, const ProductTerm&) = default;
};

/// e-stage terms (i+j >= m), grouped by ascending i-j.
inline std::vector<ProductTerm> e_stage_terms(unsigned m) {
  std::vector<ProductTerm> out;
  const int lim = static_cast<int>(m) - 2;
  for (int delta = -lim; delta <= lim; ++delta)
    for (unsigned i = 0; i < m; ++i) {
      const int j = static_cast<int>(i) - delta;
      if (j < 0 || j >= static_cast<int>(m) || i + static_cast<unsigned>(j) < m) continue;
      out.push_back({i, static_cast<unsigned>(j), i + static_cast<unsigned>(j) - m});
    }
  return out;
}

/// d-stage terms (i+j < m), grouped by ascending i-j.
inline std::vector<ProductTerm> d_stage_terms(unsigned m) {
  std::vector<ProductTerm> out;
  const int lim = static_cast<int>(m) - 1;
  for (int delta = -lim; delta <= lim; ++delta)
    for (unsigned i = 0; i < m; ++i) {
      const int j = static_cast<int>(i) - delta;
      if (j < 0 || j >= static_cast<int>(m) || i + static_cast<unsigned>(j) >= m) continue;
      out.push_back({i, static_cast<unsigned>(j), i + static_cast<unsigned>(j)});
    }
  return out;
}

namespace detail {

inline void append_terms(CircuitBuilder& b, std::span<const ProductTerm> terms, std::span<const std::size_t> a,
                         std::span<const std::size_t> bw, std::span<const std::size_t> c) {
  for (const auto& t : terms) b.toffoli(a[t.i], bw[t.j], c[t.k]);
}

// b operand is a classical constant: a Toffoli with a known control becomes a
// CNOT (control 1) or vanishes (control 0).
inline void append_const_terms(CircuitBuilder& b, std::span<const ProductTerm> terms, std::span<const std::size_t> a,
                               std::uint64_t constant, std::span<const std::size_t> c) {
  for (const auto& t : terms)
    if ((constant >> t.j) & 1U) b.cnot(a[t.i], c[t.k]);
}

inline void append_linear(CircuitBuilder& b, const Circuit& linear, std::span<const std::size_t> c) {
  b.append(linear, std::vector<std::size_t>(c.begin(), c.end()));
}

}  // namespace detail

/// Gates of the M-stage on an m-wire register.
inline Circuit synth_reduction_stage(const FieldSpec& spec) { return synth_linear(extended_reduction_map(spec)); }

/// Appends c ^= ... a*b for a zeroed c (the full three-stage multiplier).
inline void append_multiplier(CircuitBuilder& b, const FieldSpec& spec, std::span<const std::size_t> a,
                              std::span<const std::size_t> bw, std::span<const std::size_t> c) {
  const unsigned m = spec.m();
  if (a.size() != m || bw.size() != m || c.size() != m) throw std::invalid_argument("register width must equal m");
  detail::append_terms(b, e_stage_terms(m), a, bw, c);
  detail::append_linear(b, synth_reduction_stage(spec), c);
  detail::append_terms(b, d_stage_terms(m), a, bw, c);
}

/// The multiplier specialised to a classical second operand.
inline void append_const_multiplier(CircuitBuilder& b, const FieldSpec& spec, std::span<const std::size_t> a,
                                    std::uint64_t constant, std::span<const std::size_t> c) {
  const unsigned m = spec.m();
  if (a.size() != m || c.size() != m) throw std::invalid_argument("register width must equal m");
  detail::append_const_terms(b, e_stage_terms(m), a, constant, c);
  detail::append_linear(b, synth_reduction_stage(spec), c);
  detail::append_const_terms(b, d_stage_terms(m), a, constant, c);
}

inline Circuit synth_e_stage(const FieldSpec& spec) {
  const MultiplierWires w{spec.m()};
  CircuitBuilder b(w.labels());
  detail::append_terms(b, e_stage_terms(spec.m()), w.a_wires(), w.b_wires(), w.c_wires());
  return std::move(b).build();
}

inline Circuit synth_d_stage(const FieldSpec& spec) {
  const MultiplierWires w{spec.m()};
  CircuitBuilder b(w.labels());
  detail::append_terms(b, d_stage_terms(spec.m()), w.a_wires(), w.b_wires(), w.c_wires());
  return std::move(b).build();
}

/// |a>|b>|0> -> |a>|b>|a*b> on 3m wires laid out as MultiplierWires.
inline Circuit synth_multiplier(const FieldSpec& spec) {
  const MultiplierWires w{spec.m()};
  CircuitBuilder b(w.labels());
  append_multiplier(b, spec, w.a_wires(), w.b_wires(), w.c_wires());
  return std::move(b).build();
}

/// Multiplication by a known nonzero constant on wires x_0..x_{m-1},
/// y_0..y_{m-1}: |a>|0> -> |0>|a*b>.
///
/// The forward multiplier specialised to b writes a*b into y; then the
/// multiplier specialised to b^-1 (input y, target x) is run backwards, which
/// clears x because (a*b)*b^-1 = a.
inline Circuit synth_known_mul(const FieldSpec& spec, const FieldElement& b) {
  if (!(b.spec() == spec)) throw std::invalid_argument("constant belongs to a different field");
  if (b.is_zero()) throw std::invalid_argument("known multiplier constant must be nonzero");
  const unsigned m = spec.m();
  std::vector<std::string> labels;
  std::vector<std::size_t> x(m), y(m);
  for (unsigned i = 0; i < m; ++i) {
    labels.push_back("x" + std::to_string(i));
    x[i] = i;
  }
  for (unsigned i = 0; i < m; ++i) {
    labels.push_back("y" + std::to_string(i));
    y[i] = m + i;
  }
  CircuitBuilder out(labels);
  append_const_multiplier(out, spec, x, b.bits(), y);

  CircuitBuilder clear(labels);
  append_const_multiplier(clear, spec, y, field_inv(b).bits(), x);
  out.append(inverse(std::move(clear).build()));
  return std::move(out).build();
}

// ---------------------------------------------------------------------------
// Linear nearest-neighbour routing
// ---------------------------------------------------------------------------

/// Bijection between physical positions and multiplier qubits.
class MultiplierLayout {
 public:
  explicit MultiplierLayout(std::vector<Qubit> at) : at_(std::move(at)) {
    std::set<Qubit> seen(at_.begin(), at_.end());
    if (seen.size() != at_.size()) throw std::invalid_argument("layout is not a bijection");
  }

  /// c_0 .. c_{m-1}, a_{m-1}, b_0, a_{m-2}, b_1, ..., a_0, b_{m-1}
  static MultiplierLayout connectivity_pattern(unsigned m) {
    std::vector<Qubit> at;
    for (unsigned k = 0; k < m; ++k) at.push_back({'c', k});
    for (unsigned t = 0; t < m; ++t) {
      at.push_back({'a', m - 1 - t});
      at.push_back({'b', t});
    }
    return MultiplierLayout(std::move(at));
  }

  std::size_t size() const { return at_.size(); }
  const Qubit& at(std::size_t pos) const { return at_[pos]; }
  const std::vector<Qubit>& qubits() const { return at_; }

  std::size_t position_of(Qubit q) const {
    const auto it = std::find(at_.begin(), at_.end(), q);
    if (it == at_.end()) throw std::out_of_range("qubit " + q.label() + " not in layout");
    return static_cast<std::size_t>(it - at_.begin());
  }

  std::vector<std::size_t> positions(char reg, unsigned m) const {
    std::vector<std::size_t> out(m);
    for (unsigned i = 0; i < m; ++i) out[i] = position_of({reg, i});
    return out;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& q : at_) out.push_back(q.label());
    return out;
  }

  friend bool operator==(const MultiplierLayout&, const MultiplierLayout&) = default;

 private:
  std::vector<Qubit> at_;
};

struct RoutingStats {
  std::size_t computational_stages = 0;  // layers of Toffolis or CNOTs
  std::size_t swap_stages = 0;           // SWAP-only blocks of depth <= 2
  std::size_t e_stage_stages = 0;
  std::size_t d_stage_stages = 0;
  std::size_t linear_depth = 0;
};

struct RoutedMultiplier {
  Circuit circuit;
  MultiplierLayout initial;
  MultiplierLayout final_layout;
  RoutingStats stats;
};

namespace detail {

class LnnRouter {
 public:
  LnnRouter(const MultiplierLayout& start) : at_(start.qubits()), builder_(start.labels()) {}

  const std::vector<Qubit>& layout() const { return at_; }
  RoutingStats& stats() { return stats_; }

  /// Computational layers and swap stages from the layer log: every maximal
  /// run of SWAP layers is cut into stages of depth <= 2.
  void close_stats() {
    stats_.computational_stages = 0;
    stats_.swap_stages = 0;
    std::size_t run = 0;
    for (char kind : log_) {
      if (kind == 'S') {
        ++run;
        continue;
      }
      stats_.swap_stages += (run + 1) / 2;
      run = 0;
      ++stats_.computational_stages;
    }
    stats_.swap_stages += (run + 1) / 2;
  }

  Circuit take() && { return std::move(builder_).build(); }

  /// Odd-even transposition sort to `target`; at most n rounds.
  void sort_to(const std::vector<Qubit>& target) {
    const std::size_t n = at_.size();
    std::map<Qubit, std::size_t> rank;
    for (std::size_t p = 0; p < n; ++p) rank[target[p]] = p;
    for (std::size_t round = 0; at_ != target; ++round) {
      if (round > n + 1) throw std::logic_error("odd-even transposition sort did not converge");
      bool any = false;
      for (std::size_t p = round % 2; p + 1 < n; p += 2)
        if (rank[at_[p]] > rank[at_[p + 1]]) {
          swap_at(p);
          any = true;
        }
      if (any) log_.push_back('S');
    }
  }

  /// The product stage with depth-2 swap stages between computational
  /// stages. Returns the number of computational stages.
  std::size_t product_stage(std::span<const ProductTerm> term_list) {
    std::set<ProductTerm> terms(term_list.begin(), term_list.end());
    std::set<Qubit> started;
    const auto is_done = [&terms](const Qubit& q) {
      return std::none_of(terms.begin(), terms.end(), [&q](const ProductTerm& t) {
        return (q.reg == 'a' && t.i == q.index) || (q.reg == 'b' && t.j == q.index) ||
               (q.reg == 'c' && t.k == q.index);
      });
    };
    const std::size_t n = at_.size();
    std::size_t stages = 0;
    while (!terms.empty()) {
      std::vector<std::size_t> fired;
      for (std::size_t p = 0; p + 2 < n; ++p) {
        if (!fired.empty() && fired.back() + 2 >= p) continue;
        const Qubit& c = at_[p];
        const Qubit& a = at_[p + 1];
        const Qubit& b = at_[p + 2];
        if (c.reg != 'c' || a.reg != 'a' || b.reg != 'b') continue;
        const auto it = terms.find(ProductTerm{a.index, b.index, c.index});
        if (it == terms.end()) continue;
        terms.erase(it);
        started.insert(c);
        fired.push_back(p);
        builder_.toffoli(p + 1, p + 2, p);
      }
      if (fired.empty()) throw std::logic_error("LNN product stage stalled");
      ++stages;
      log_.push_back('C');
      if (terms.empty()) break;

      // x c a b  ->  x a c b  ->  a x b c
      std::vector<bool> busy(n, false);
      for (std::size_t p : fired) {
        swap_at(p);
        busy[p] = busy[p + 1] = true;
        if (p > 0) busy[p - 1] = true;
        busy[p + 2] = true;
      }
      drift_finished(busy, started, is_done);
      log_.push_back('S');
      std::fill(busy.begin(), busy.end(), false);
      for (std::size_t p : fired) {
        if (p > 0) {
          swap_at(p - 1);
          busy[p - 1] = busy[p] = true;
        }
        swap_at(p + 1);
        busy[p + 1] = busy[p + 2] = true;
      }
      drift_finished(busy, started, is_done);
      log_.push_back('S');
    }
    return stages;
  }

  /// In-place v <- F v on the c register, which must occupy a contiguous
  /// block. F = P L U: U and L are each applied while the block is reversed
  /// by odd-even transposition, adding a CNOT at each crossing that needs
  /// one; P is absorbed into the layout.
  void linear_stage(const GF2Matrix& f, unsigned m) {
    std::vector<std::size_t> pos(m);
    for (unsigned k = 0; k < m; ++k)
      pos[k] = static_cast<std::size_t>(std::find(at_.begin(), at_.end(), Qubit{'c', k}) - at_.begin());
    const std::size_t start = *std::min_element(pos.begin(), pos.end());
    if (*std::max_element(pos.begin(), pos.end()) != start + m - 1)
      throw std::logic_error("c register is not contiguous");
    std::vector<unsigned> logical(m);  // block offset -> logical index
    for (unsigned k = 0; k < m; ++k) logical[pos[k] - start] = k;
    GF2Matrix local(m, m);
    for (unsigned r = 0; r < m; ++r)
      for (unsigned c = 0; c < m; ++c) local.set(r, c, f(logical[r], logical[c]));

    const auto plu = plu_decompose(local);
    if (!plu) throw std::invalid_argument("linear stage matrix is not invertible");
    const std::size_t before = builder_.size();

    std::vector<unsigned> element(m);  // block offset -> vector index
    for (unsigned t = 0; t < m; ++t) element[t] = t;
    triangular_reversal(plu->upper, /*lower=*/false, start, element);
    triangular_reversal(plu->lower, /*lower=*/true, start, element);

    std::vector<Qubit> relabel(m);
    for (unsigned i = 0; i < m; ++i) relabel[plu->row_of[i]] = Qubit{'c', logical[i]};
    for (unsigned t = 0; t < m; ++t) at_[start + t] = relabel[t];

    CircuitBuilder part(builder_.n_wires());
    const Circuit sofar = builder_.build();
    for (std::size_t g = before; g < sofar.size(); ++g) part.add(sofar.gates()[g]);
    stats_.linear_depth = depth(std::move(part).build());
  }

 private:
  void swap_at(std::size_t p) {
    builder_.swap(p, p + 1);
    std::swap(at_[p], at_[p + 1]);
  }

  template <typename DonePred>
  void drift_finished(std::vector<bool>& busy, const std::set<Qubit>& started, const DonePred& is_done) {
    // A finished qubit steps left past a c that has not joined the wave yet,
    // so waiting c's stay packed against the active region.
    for (std::size_t q = 1; q < at_.size(); ++q) {
      if (busy[q] || busy[q - 1]) continue;
      const Qubit& left = at_[q - 1];
      if (!is_done(at_[q]) || left.reg != 'c' || is_done(left) || started.count(left)) continue;
      swap_at(q - 1);
      busy[q - 1] = busy[q] = true;
    }
  }

  // Applies the unit triangular map t (lower: sources have smaller index)
  // while reversing the block order. element[o] is the vector index at block
  // offset o and is updated to the reversed order.
  void triangular_reversal(const GF2Matrix& t, bool lower, std::size_t start, std::vector<unsigned>& element) {
    const std::size_t n = element.size();
    struct Meeting {
      std::size_t round, offset;
      unsigned upper_elem, lower_elem;  // element at offset, offset+1
    };
    std::vector<unsigned> target_offset(n);
    for (std::size_t o = 0; o < n; ++o) target_offset[element[o]] = static_cast<unsigned>(n - 1 - o);
    std::vector<Meeting> meetings;
    std::vector<unsigned> ord = element;
    for (std::size_t round = 0; round < n + 1; ++round)
      for (std::size_t o = round % 2; o + 1 < n; o += 2)
        if (target_offset[ord[o]] > target_offset[ord[o + 1]]) {
          meetings.push_back({round, o, ord[o], ord[o + 1]});
          std::swap(ord[o], ord[o + 1]);
        }
    for (std::size_t o = 0; o < n; ++o)
      if (target_offset[ord[o]] != o) throw std::logic_error("reversal network incomplete");

    // meeting_of[src][dst] -> index into meetings
    std::vector<std::vector<std::size_t>> meeting_of(n, std::vector<std::size_t>(n, SIZE_MAX));
    for (std::size_t k = 0; k < meetings.size(); ++k) {
      meeting_of[meetings[k].upper_elem][meetings[k].lower_elem] = k;
      meeting_of[meetings[k].lower_elem][meetings[k].upper_elem] = k;
    }
    const auto is_source_of = [lower](unsigned src, unsigned dst) { return lower ? src < dst : src > dst; };

    // fires[k] set when meeting k carries a CNOT source -> receiver.
    std::vector<bool> fires(meetings.size(), false);
    // value(e, round): contents of element e's wire just before `round`, as a
    // mask over original vector indices.
    const auto value = [&](auto&& self, unsigned e, std::size_t round) -> std::uint64_t {
      std::uint64_t v = std::uint64_t{1} << e;
      for (unsigned s = 0; s < n; ++s) {
        if (!is_source_of(s, e)) continue;
        const std::size_t k = meeting_of[s][e];
        if (fires[k] && meetings[k].round < round) v ^= self(self, s, meetings[k].round);
      }
      return v;
    };
    std::vector<unsigned> receivers(n);
    for (unsigned i = 0; i < n; ++i) receivers[i] = lower ? i : static_cast<unsigned>(n - 1 - i);
    for (unsigned i : receivers) {
      std::uint64_t want = 0;
      for (unsigned j = 0; j < n; ++j)
        if (j != i && t(i, j)) want |= std::uint64_t{1} << j;
      // Each source's current value has its own index as the leading term
      // (highest for lower, lowest for upper), so peel sources off in order.
      for (unsigned step = 0; step < n; ++step) {
        const unsigned j = lower ? static_cast<unsigned>(n - 1 - step) : step;
        if (!is_source_of(j, i) || !((want >> j) & 1U)) continue;
        const std::size_t k = meeting_of[j][i];
        fires[k] = true;
        want ^= value(value, j, meetings[k].round);
      }
      if (want != 0) throw std::logic_error("triangular map not realisable on reversal network");
    }

    std::size_t k = 0;
    for (std::size_t round = 0; round < n + 1; ++round) {
      const std::size_t first = k;
      bool any_cnot = false;
      for (; k < meetings.size() && meetings[k].round == round; ++k) {
        if (!fires[k]) continue;
        const auto& mt = meetings[k];
        const bool upper_is_source = is_source_of(mt.upper_elem, mt.lower_elem);
        const std::size_t up = start + mt.offset;
        builder_.cnot(upper_is_source ? up : up + 1, upper_is_source ? up + 1 : up);
        any_cnot = true;
      }
      if (any_cnot) log_.push_back('C');
      if (first == k) continue;
      for (std::size_t q = first; q < k; ++q) swap_at(start + meetings[q].offset);
      log_.push_back('S');
    }
    element = ord;
  }

  std::vector<Qubit> at_;
  CircuitBuilder builder_;
  RoutingStats stats_;
  std::string log_;  // 'C' computational layer, 'S' swap layer
};

}  // namespace detail

/// Full multiplier in which every gate acts on neighbouring positions.
///
/// Qubits start in the connectivity pattern. The route is: sort into the
/// e-stage layout; e-stage with swap stages; sort back to the pattern; M-stage
/// on the contiguous c block; restore c order; d-stage with swap stages. The
/// product stages move each target c through the a/b pairs (x c a b -> a x b c
/// after every Toffoli), so the pairs shift by one against each other as each
/// c passes. Finished qubits drift left past waiting c's.
inline RoutedMultiplier route_lnn(const FieldSpec& spec) {
  const unsigned m = spec.m();
  const auto pattern = MultiplierLayout::connectivity_pattern(m);
  detail::LnnRouter router(pattern);

  // e-stage is the d-stage scheme under i -> m-1-i, j -> m-1-j, k -> m-2-k.
  std::vector<Qubit> e_layout{{'a', 0}, {'b', 0}, {'c', m - 1}};
  for (unsigned k = 0; k + 1 < m; ++k) e_layout.push_back({'c', m - 2 - k});
  for (unsigned t = 0; t + 1 < m; ++t) {
    e_layout.push_back({'a', 1 + t});
    e_layout.push_back({'b', m - 1 - t});
  }
  router.sort_to(e_layout);
  router.stats().e_stage_stages = router.product_stage(e_stage_terms(m));

  router.sort_to(pattern.qubits());
  router.linear_stage(extended_reduction_map(spec), m);
  router.sort_to(pattern.qubits());
  router.stats().d_stage_stages = router.product_stage(d_stage_terms(m));

  router.close_stats();
  RoutingStats stats = router.stats();
  MultiplierLayout final_layout(router.layout());
  return RoutedMultiplier{std::move(router).take(), pattern, std::move(final_layout), stats};
}

// ---------------------------------------------------------------------------
// Simulation helpers
// ---------------------------------------------------------------------------

/// Where a multiplier circuit reads a, b and leaves a, b, a*b.
struct MultiplierIo {
  std::vector<std::size_t> a_in, b_in, a_out, b_out, c_out;

  static MultiplierIo unrouted(unsigned m) {
    const MultiplierWires w{m};
    return {w.a_wires(), w.b_wires(), w.a_wires(), w.b_wires(), w.c_wires()};
  }

  static MultiplierIo routed(const RoutedMultiplier& r, unsigned m) {
    return {r.initial.positions('a', m), r.initial.positions('b', m), r.final_layout.positions('a', m),
            r.final_layout.positions('b', m), r.final_layout.positions('c', m)};
  }
};

/// Runs the circuit on every (a, b) pair. Returns the c outputs, or throws
/// std::logic_error if an input register is not restored.
inline std::vector<std::uint64_t> simulate_products(const Circuit& c, const MultiplierIo& io,
                                                    std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs) {
  std::vector<BitState> inputs;
  inputs.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    BitState s(c.n_wires());
    s.store(io.a_in, a);
    s.store(io.b_in, b);
    inputs.push_back(std::move(s));
  }
  const auto outputs = run_batch(c, inputs);
  std::vector<std::uint64_t> products;
  products.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (outputs[k].load(io.a_out) != pairs[k].first || outputs[k].load(io.b_out) != pairs[k].second)
      throw std::logic_error("multiplier did not restore its inputs");
    products.push_back(outputs[k].load(io.c_out));
  }
  return products;
}

}  // namespace ecdlp_forge
