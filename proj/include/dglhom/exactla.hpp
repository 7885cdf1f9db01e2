#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "dglhom/sparse.hpp"

namespace dglhom::exactla {

// Sparse integer row, sorted by column, content 1.
using ZRow = std::vector<std::pair<int, Int>>;

inline ZRow zrow_from(const QVec& v) {
  Int lcm = 1;
  for (const Rat& x : v)
    if (x != 0) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den().get_mpz_t());
  ZRow r;
  for (int j = 0; j < static_cast<int>(v.size()); ++j) {
    if (v[static_cast<size_t>(j)] == 0) continue;
    Rat s = v[static_cast<size_t>(j)] * Rat(lcm);
    r.push_back({j, s.get_num()});
  }
  return r;
}

inline void zrow_reduce_content(ZRow& r) {
  Int g = 0;
  for (auto& [c, v] : r) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  if (g > 1)
    for (auto& [c, v] : r) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
}

// a*ra + b*rb with content normalization.
inline ZRow zrow_combine(const Int& a, const ZRow& ra, const Int& b, const ZRow& rb) {
  ZRow out;
  out.reserve(ra.size() + rb.size());
  size_t i = 0, j = 0;
  while (i < ra.size() || j < rb.size()) {
    if (j == rb.size() || (i < ra.size() && ra[i].first < rb[j].first)) {
      out.push_back({ra[i].first, a * ra[i].second});
      ++i;
    } else if (i == ra.size() || rb[j].first < ra[i].first) {
      out.push_back({rb[j].first, b * rb[j].second});
      ++j;
    } else {
      Int v = a * ra[i].second + b * rb[j].second;
      if (v != 0) out.push_back({ra[i].first, v});
      ++i;
      ++j;
    }
  }
  zrow_reduce_content(out);
  return out;
}

// Fraction-free Gauss-Jordan elimination kept fully reduced as rows arrive.
// Integer arithmetic throughout; rational normalization (pivot = 1) happens
// only when canonical output is requested. Since the reduced row echelon
// form over Q is unique, every derived basis is reproducible run to run.
class Rref {
 public:
  explicit Rref(int cols) : cols_(cols) {}

  int cols() const { return cols_; }
  int rank() const { return static_cast<int>(rows_.size()); }
  const std::vector<int>& pivot_cols() const { return pivots_; }

  // Returns true if the row increased the rank.
  bool add_row(ZRow r) {
    reduce_z(r);
    if (r.empty()) return false;
    int pc = r[0].first;
    // back-substitute into existing rows
    for (size_t k = 0; k < rows_.size(); ++k) {
      Int c = coeff_at(rows_[k], pc);
      if (c != 0) rows_[k] = zrow_combine(r[0].second, rows_[k], -c, r);
    }
    size_t pos = static_cast<size_t>(
        std::lower_bound(pivots_.begin(), pivots_.end(), pc) - pivots_.begin());
    pivots_.insert(pivots_.begin() + static_cast<long>(pos), pc);
    rows_.insert(rows_.begin() + static_cast<long>(pos), std::move(r));
    return true;
  }

  bool add_row(const QVec& v) { return add_row(zrow_from(v)); }

  // Fully reduces v against the stored rows; result has zeros in all pivot
  // columns.
  QVec reduce(QVec v) const {
    for (size_t k = 0; k < rows_.size(); ++k) {
      const Rat& c = v[static_cast<size_t>(pivots_[k])];
      if (c == 0) continue;
      Rat f = c / Rat(leading(rows_[k]));
      for (const auto& [col, val] : rows_[k]) v[static_cast<size_t>(col)] -= f * Rat(val);
    }
    return v;
  }

  bool contains(const QVec& v) const { return is_zero(reduce(v)); }

  // Coordinates of v in the row space (coefficients against canonical rows),
  // or nullopt if v is outside.
  std::optional<QVec> coordinates(QVec v) const {
    QVec coords = qvec_zero(rank());
    for (size_t k = 0; k < rows_.size(); ++k) {
      const Rat& c = v[static_cast<size_t>(pivots_[k])];
      if (c == 0) continue;
      Rat f = c / Rat(leading(rows_[k]));
      coords[k] = c;  // canonical rows have pivot value 1
      for (const auto& [col, val] : rows_[k]) v[static_cast<size_t>(col)] -= f * Rat(val);
    }
    if (!is_zero(v)) return std::nullopt;
    return coords;
  }

  // Canonical rational rows: pivot entries 1, pivot columns ascending.
  std::vector<QVec> q_rows() const {
    std::vector<QVec> out;
    out.reserve(rows_.size());
    for (const ZRow& r : rows_) {
      QVec v = qvec_zero(cols_);
      Rat lead(leading(r));
      for (const auto& [col, val] : r) v[static_cast<size_t>(col)] = Rat(val) / lead;
      out.push_back(std::move(v));
    }
    return out;
  }

  // Canonical basis of the null space { v : row * v stays reducible }: for
  // the row space of a matrix M this is ker(M).
  std::vector<QVec> null_space() const {
    std::vector<QVec> out;
    std::vector<bool> is_pivot(static_cast<size_t>(cols_), false);
    for (int p : pivots_) is_pivot[static_cast<size_t>(p)] = true;
    std::vector<QVec> qr = q_rows();
    for (int j = 0; j < cols_; ++j) {
      if (is_pivot[static_cast<size_t>(j)]) continue;
      QVec v = qvec_zero(cols_);
      v[static_cast<size_t>(j)] = 1;
      for (size_t k = 0; k < qr.size(); ++k) v[static_cast<size_t>(pivots_[k])] = -qr[k][static_cast<size_t>(j)];
      out.push_back(primitive(std::move(v)));
    }
    return out;
  }

 private:
  static Int coeff_at(const ZRow& r, int col) {
    auto it = std::lower_bound(r.begin(), r.end(), col,
                               [](const std::pair<int, Int>& e, int c) { return e.first < c; });
    if (it != r.end() && it->first == col) return it->second;
    return 0;
  }
  static const Int& leading(const ZRow& r) { return r[0].second; }

  void reduce_z(ZRow& r) const {
    for (size_t k = 0; k < rows_.size() && !r.empty(); ++k) {
      Int c = coeff_at(r, pivots_[k]);
      if (c != 0) r = zrow_combine(leading(rows_[k]), r, -c, rows_[k]);
    }
  }

  int cols_;
  std::vector<ZRow> rows_;
  std::vector<int> pivots_;
};

inline Rref row_space(const SparseMatrix& m) {
  Rref r(m.cols());
  std::vector<QVec> rows(static_cast<size_t>(m.rows()), qvec_zero(m.cols()));
  for (const Triple& t : m.entries()) rows[static_cast<size_t>(t.row)][static_cast<size_t>(t.col)] = t.val;
  for (const QVec& v : rows) r.add_row(v);
  return r;
}

inline Rref column_space(const SparseMatrix& m) { return row_space(m.transpose()); }

// Kernel of M (vectors v in Q^cols with Mv = 0), canonical primitive basis.
inline std::vector<QVec> kernel_basis(const SparseMatrix& m) { return row_space(m).null_space(); }

// Canonical basis of the column space of M, as vectors in Q^rows.
inline std::vector<QVec> image_basis(const SparseMatrix& m) {
  std::vector<QVec> out;
  for (QVec& v : column_space(m).q_rows()) out.push_back(primitive(std::move(v)));
  return out;
}

struct KernelImage {
  std::vector<QVec> kernel;
  std::vector<QVec> image;
};

inline KernelImage kernel_image(const SparseMatrix& m) {
  KernelImage ki{kernel_basis(m), image_basis(m)};
  // rank-nullity, checked on every call
  if (static_cast<int>(ki.kernel.size() + ki.image.size()) != m.cols())
    throw Error("Internal", "rank-nullity violated");
  return ki;
}

struct SubquotientBasis {
  int ambient = 0;
  std::vector<QVec> kernel;   // basis of ker(d_out)
  std::vector<QVec> image;    // basis of im(d_in)
  std::vector<QVec> reps;     // kernel vectors spanning ker/im
  int dim() const { return static_cast<int>(reps.size()); }
};

// Homology of the two-step complex  . --d_in--> . --d_out--> .
// Representatives complete the image basis to a kernel basis in pivot
// order and are reduced against the image.
inline SubquotientBasis subquotient_homology(const SparseMatrix& d_in, const SparseMatrix& d_out) {
  if (d_in.rows() != d_out.cols()) throw ShapeMismatch("subquotient: middle dimension mismatch");
  if (!(d_out * d_in).is_zero()) throw CompositionNonzero("d_out * d_in != 0");
  SubquotientBasis s;
  s.ambient = d_in.rows();
  s.kernel = kernel_basis(d_out);
  s.image = image_basis(d_in);
  Rref img(s.ambient);
  for (const QVec& v : s.image) img.add_row(v);
  Rref span = img;
  for (const QVec& v : s.kernel) {
    QVec red = img.reduce(v);
    if (span.add_row(red)) s.reps.push_back(primitive(img.reduce(std::move(red))));
  }
  if (s.dim() != static_cast<int>(s.kernel.size() - s.image.size()))
    throw Error("Internal", "homology dimension mismatch");
  return s;
}

// Deterministic particular solution of A x = b (free variables zero); nullopt
// if the system is infeasible.
inline std::optional<QVec> solve(const SparseMatrix& a, const QVec& b) {
  if (static_cast<int>(b.size()) != a.rows()) throw ShapeMismatch("solve: rhs size");
  // eliminate on rows of [A | b]; the rhs column is never a pivot
  Rref r(a.cols() + 1);
  std::vector<QVec> rows(static_cast<size_t>(a.rows()), qvec_zero(a.cols() + 1));
  for (const Triple& t : a.entries()) rows[static_cast<size_t>(t.row)][static_cast<size_t>(t.col)] = t.val;
  for (int i = 0; i < a.rows(); ++i) {
    rows[static_cast<size_t>(i)][static_cast<size_t>(a.cols())] = b[static_cast<size_t>(i)];
    r.add_row(rows[static_cast<size_t>(i)]);
  }
  QVec x = qvec_zero(a.cols());
  std::vector<QVec> qr = r.q_rows();
  const std::vector<int>& piv = r.pivot_cols();
  for (size_t k = 0; k < qr.size(); ++k) {
    if (piv[k] == a.cols()) return std::nullopt;  // 0 = 1 row
    x[static_cast<size_t>(piv[k])] = -qr[k][static_cast<size_t>(a.cols())];
  }
  // rhs appears negated in the row [coeffs | -? ]: row reads sum coeff*x - rhs
  for (Rat& v : x) v = -v;
  // verify exactly
  QVec ax = a.apply(x);
  for (size_t i = 0; i < ax.size(); ++i)
    if (ax[i] != b[i]) throw Error("Internal", "solve verification failed");
  return x;
}

// Span utility: canonical Rref of a list of vectors.
inline Rref span_of(const std::vector<QVec>& vs, int dim) {
  Rref r(dim);
  for (const QVec& v : vs) r.add_row(v);
  return r;
}

}  // namespace dglhom::exactla
