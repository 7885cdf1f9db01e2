#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "dglhom/error.hpp"
#include "dglhom/rational.hpp"

namespace dglhom {

struct Triple {
  int row = 0;
  int col = 0;
  Rat val;
};

// Sparse matrix over Q. Entries are sorted row-major, hold no zeros and no
// duplicate (row, col) pairs; values are immutable after construction.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}

  static SparseMatrix zero(int rows, int cols) { return SparseMatrix(rows, cols); }

  static SparseMatrix identity(int n) {
    SparseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.entries_.push_back({i, i, Rat(1)});
    return m;
  }

  static SparseMatrix from_triples(int rows, int cols, std::vector<Triple> ts) {
    std::map<std::pair<int, int>, Rat> acc;
    for (Triple& t : ts) {
      if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
        throw ShapeMismatch("matrix entry out of range");
      acc[{t.row, t.col}] += t.val;
    }
    SparseMatrix m(rows, cols);
    for (auto& [rc, v] : acc)
      if (v != 0) m.entries_.push_back({rc.first, rc.second, v});
    return m;
  }

  static SparseMatrix from_dense_columns(int rows, const std::vector<QVec>& cols) {
    SparseMatrix m(rows, static_cast<int>(cols.size()));
    std::vector<Triple> ts;
    for (int j = 0; j < static_cast<int>(cols.size()); ++j)
      for (int i = 0; i < rows; ++i)
        if (cols[j][static_cast<size_t>(i)] != 0) ts.push_back({i, j, cols[j][static_cast<size_t>(i)]});
    return from_triples(rows, static_cast<int>(cols.size()), std::move(ts));
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<Triple>& entries() const& { return entries_; }
  // calling entries() on a temporary hands out a copy, never a dangling ref
  std::vector<Triple> entries() && { return std::move(entries_); }
  bool is_zero() const { return entries_.empty(); }

  Rat at(int r, int c) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(r, c),
                               [](const Triple& t, const std::pair<int, int>& rc) {
                                 return std::make_pair(t.row, t.col) < rc;
                               });
    if (it != entries_.end() && it->row == r && it->col == c) return it->val;
    return Rat(0);
  }

  QVec apply(const QVec& v) const {
    if (static_cast<int>(v.size()) != cols_) throw ShapeMismatch("apply: size mismatch");
    QVec out = qvec_zero(rows_);
    for (const Triple& t : entries_) out[static_cast<size_t>(t.row)] += t.val * v[static_cast<size_t>(t.col)];
    return out;
  }

  // v^T * M (row vector times matrix).
  QVec apply_transposed(const QVec& v) const {
    if (static_cast<int>(v.size()) != rows_) throw ShapeMismatch("apply_transposed: size mismatch");
    QVec out = qvec_zero(cols_);
    for (const Triple& t : entries_) out[static_cast<size_t>(t.col)] += t.val * v[static_cast<size_t>(t.row)];
    return out;
  }

  SparseMatrix transpose() const {
    std::vector<Triple> ts;
    ts.reserve(entries_.size());
    for (const Triple& t : entries_) ts.push_back({t.col, t.row, t.val});
    return from_triples(cols_, rows_, std::move(ts));
  }

  SparseMatrix operator*(const SparseMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw ShapeMismatch("matrix product shape");
    std::vector<std::vector<std::pair<int, Rat>>> rhs_rows(static_cast<size_t>(rhs.rows_));
    for (const Triple& t : rhs.entries_) rhs_rows[static_cast<size_t>(t.row)].push_back({t.col, t.val});
    std::map<std::pair<int, int>, Rat> acc;
    for (const Triple& t : entries_)
      for (const auto& [c, v] : rhs_rows[static_cast<size_t>(t.col)]) acc[{t.row, c}] += t.val * v;
    SparseMatrix m(rows_, rhs.cols_);
    for (auto& [rc, v] : acc)
      if (v != 0) m.entries_.push_back({rc.first, rc.second, v});
    return m;
  }

  SparseMatrix operator+(const SparseMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw ShapeMismatch("matrix sum shape");
    std::vector<Triple> ts = entries_;
    ts.insert(ts.end(), rhs.entries_.begin(), rhs.entries_.end());
    return from_triples(rows_, cols_, std::move(ts));
  }

  SparseMatrix operator-(const SparseMatrix& rhs) const { return *this + rhs.scaled(Rat(-1)); }

  SparseMatrix scaled(const Rat& c) const {
    SparseMatrix m(rows_, cols_);
    if (c == 0) return m;
    m.entries_ = entries_;
    for (Triple& t : m.entries_) t.val *= c;
    return m;
  }

  bool operator==(const SparseMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_ || entries_.size() != rhs.entries_.size()) return false;
    for (size_t i = 0; i < entries_.size(); ++i) {
      const Triple &a = entries_[i], &b = rhs.entries_[i];
      if (a.row != b.row || a.col != b.col || a.val != b.val) return false;
    }
    return true;
  }
  bool operator!=(const SparseMatrix& rhs) const { return !(*this == rhs); }

  std::vector<QVec> dense_columns() const {
    std::vector<QVec> cols(static_cast<size_t>(cols_), qvec_zero(rows_));
    for (const Triple& t : entries_) cols[static_cast<size_t>(t.col)][static_cast<size_t>(t.row)] = t.val;
    return cols;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Triple> entries_;
};

// Accumulating builder; duplicate coordinates sum up.
class MatBuilder {
 public:
  MatBuilder(int rows, int cols) : rows_(rows), cols_(cols) {}
  void add(int r, int c, const Rat& v) {
    if (v != 0) acc_[{r, c}] += v;
  }
  void add_column(int c, const QVec& v) {
    for (int i = 0; i < static_cast<int>(v.size()); ++i) add(i, c, v[static_cast<size_t>(i)]);
  }
  SparseMatrix build() const {
    std::vector<Triple> ts;
    ts.reserve(acc_.size());
    for (const auto& [rc, v] : acc_)
      if (v != 0) ts.push_back({rc.first, rc.second, v});
    return SparseMatrix::from_triples(rows_, cols_, std::move(ts));
  }

 private:
  int rows_, cols_;
  std::map<std::pair<int, int>, Rat> acc_;
};

}  // namespace dglhom
