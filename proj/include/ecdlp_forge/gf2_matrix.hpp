// Dense matrices over GF(2).
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ecdlp_forge {

class GF2Matrix {
 public:
  GF2Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols, 0) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("GF2Matrix dimensions must be positive");
  }

  GF2Matrix(std::initializer_list<std::initializer_list<int>> rows)
      : GF2Matrix(rows.size(), rows.size() == 0 ? 0 : rows.begin()->size()) {
    std::size_t r = 0;
    for (const auto& row : rows) {
      if (row.size() != cols_) throw std::invalid_argument("ragged GF2Matrix initializer");
      std::size_t c = 0;
      for (int v : row) set(r, c++, v != 0);
      ++r;
    }
  }

  static GF2Matrix identity(std::size_t n) {
    GF2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool operator()(std::size_t r, std::size_t c) const { return e_[r * cols_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { e_[r * cols_ + c] = v ? 1 : 0; }

  /// row r += row s
  void add_row(std::size_t r, std::size_t s) {
    for (std::size_t c = 0; c < cols_; ++c) e_[r * cols_ + c] ^= e_[s * cols_ + c];
  }

  void swap_rows(std::size_t r, std::size_t s) {
    for (std::size_t c = 0; c < cols_; ++c) std::swap(e_[r * cols_ + c], e_[s * cols_ + c]);
  }

  /// Matrix-vector product; v and the result are bit-packed (bit i = entry i).
  std::uint64_t apply(std::uint64_t v) const {
    if (rows_ > 64 || cols_ > 64) throw std::invalid_argument("apply supports at most 64x64");
    std::uint64_t out = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
      bool acc = false;
      for (std::size_t c = 0; c < cols_; ++c) acc ^= (*this)(r, c) && ((v >> c) & 1U);
      if (acc) out |= std::uint64_t{1} << r;
    }
    return out;
  }

  friend GF2Matrix operator*(const GF2Matrix& a, const GF2Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("GF2Matrix dimension mismatch");
    GF2Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k)
        if (a(i, k))
          for (std::size_t j = 0; j < b.cols_; ++j) r.e_[i * r.cols_ + j] ^= b.e_[k * b.cols_ + j];
    return r;
  }

  std::size_t rank() const {
    GF2Matrix w = *this;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
      std::size_t p = rank;
      while (p < rows_ && !w(p, c)) ++p;
      if (p == rows_) continue;
      w.swap_rows(rank, p);
      for (std::size_t r = 0; r < rows_; ++r)
        if (r != rank && w(r, c)) w.add_row(r, rank);
      ++rank;
    }
    return rank;
  }

  bool is_invertible() const { return rows_ == cols_ && rank() == rows_; }

  /// Column c as a packed vector.
  std::uint64_t column(std::size_t c) const {
    std::uint64_t v = 0;
    for (std::size_t r = 0; r < rows_ && r < 64; ++r)
      if ((*this)(r, c)) v |= std::uint64_t{1} << r;
    return v;
  }

  std::size_t weight() const {
    std::size_t n = 0;
    for (auto v : e_) n += v;
    return n;
  }

  friend bool operator==(const GF2Matrix&, const GF2Matrix&) = default;

  friend std::ostream& operator<<(std::ostream& os, const GF2Matrix& m) {
    for (std::size_t r = 0; r < m.rows_; ++r) {
      for (std::size_t c = 0; c < m.cols_; ++c) os << (m(r, c) ? '1' : '0');
      os << '\n';
    }
    return os;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint8_t> e_;
};

/// F = P * L * U with L unit lower triangular, U unit upper triangular and P
/// a permutation, given as row_of: (P w)_i = w_{row_of[i]}.
struct PluFactors {
  std::vector<std::size_t> row_of;
  GF2Matrix lower;
  GF2Matrix upper;
};

inline std::optional<PluFactors> plu_decompose(const GF2Matrix& f) {
  if (f.rows() != f.cols()) throw std::invalid_argument("PLU needs a square matrix");
  const std::size_t n = f.rows();
  GF2Matrix a = f;
  GF2Matrix lower = GF2Matrix::identity(n);
  std::vector<std::size_t> perm(n);  // row k of a came from row perm[k] of f
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && !a(p, k)) ++p;
    if (p == n) return std::nullopt;
    if (p != k) {
      a.swap_rows(k, p);
      std::swap(perm[k], perm[p]);
      for (std::size_t c = 0; c < k; ++c) {
        const bool t = lower(k, c);
        lower.set(k, c, lower(p, c));
        lower.set(p, c, t);
      }
    }
    for (std::size_t r = k + 1; r < n; ++r)
      if (a(r, k)) {
        a.add_row(r, k);
        lower.set(r, k, true);
      }
  }
  // a = U and Perm * f = L * U where (Perm f)_k = f_{perm[k]}; so f = Perm^T L U
  // and (Perm^T w)_{perm[k]} = w_k.
  std::vector<std::size_t> row_of(n);
  for (std::size_t k = 0; k < n; ++k) row_of[perm[k]] = k;
  return PluFactors{std::move(row_of), std::move(lower), std::move(a)};
}

}  // namespace ecdlp_forge
