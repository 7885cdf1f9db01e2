#pragma once

#include <map>
#include <string>
#include <vector>

#include "dglhom/exactla.hpp"
#include "dglhom/koszul.hpp"
#include "dglhom/sparse.hpp"

namespace dglhom {

// Finite-dimensional Z-graded Q-vector space. Only nonzero degrees are
// stored. Basis labels are optional and purely cosmetic.
struct GradedSpace {
  std::map<int, int> dims;
  std::map<int, std::vector<std::string>> labels;

  GradedSpace() = default;
  explicit GradedSpace(std::map<int, int> d) : dims(std::move(d)) { prune(); }

  static GradedSpace line(int degree) {
    std::map<int, int> d;
    d[degree] = 1;
    return GradedSpace(std::move(d));
  }

  void prune() {
    for (auto it = dims.begin(); it != dims.end();)
      it = (it->second == 0) ? dims.erase(it) : std::next(it);
  }

  int dim(int degree) const {
    auto it = dims.find(degree);
    return it == dims.end() ? 0 : it->second;
  }

  int total_dim() const {
    int n = 0;
    for (auto& [d, k] : dims) n += k;
    return n;
  }

  std::vector<int> degrees() const {
    std::vector<int> out;
    for (auto& [d, k] : dims) out.push_back(d);
    return out;
  }

  int min_degree() const { return dims.empty() ? 0 : dims.begin()->first; }
  int max_degree() const { return dims.empty() ? 0 : dims.rbegin()->first; }

  std::string label(int degree, int i) const {
    auto it = labels.find(degree);
    if (it != labels.end() && i < static_cast<int>(it->second.size())) return it->second[static_cast<size_t>(i)];
    return std::to_string(degree) + ":" + std::to_string(i);
  }

  // Global index: degrees ascending, then index within degree.
  int global_dim() const { return total_dim(); }
  int global_index(int degree, int i) const {
    int off = 0;
    for (auto& [d, k] : dims) {
      if (d == degree) return off + i;
      off += k;
    }
    throw ShapeMismatch("global_index: no such degree");
  }
  std::pair<int, int> from_global(int g) const {
    for (auto& [d, k] : dims) {
      if (g < k) return {d, g};
      g -= k;
    }
    throw ShapeMismatch("from_global: out of range");
  }

  bool operator==(const GradedSpace& o) const { return dims == o.dims; }
  bool operator!=(const GradedSpace& o) const { return !(*this == o); }
};

inline GradedSpace shift_space(const GradedSpace& s, int n) {
  GradedSpace out;
  for (auto& [d, k] : s.dims) out.dims[d - n] = k;
  for (auto& [d, l] : s.labels) out.labels[d - n] = l;
  return out;
}

// Degree-homogeneous linear map between graded spaces, stored as one sparse
// block per source degree.
struct GradedMap {
  GradedSpace source, target;
  int degree = 0;
  std::map<int, SparseMatrix> blocks;  // source degree -> matrix

  GradedMap() = default;
  GradedMap(GradedSpace src, GradedSpace tgt, int deg)
      : source(std::move(src)), target(std::move(tgt)), degree(deg) {}

  static GradedMap zero(GradedSpace src, GradedSpace tgt, int deg) { return GradedMap(std::move(src), std::move(tgt), deg); }

  static GradedMap id(const GradedSpace& s) {
    GradedMap f(s, s, 0);
    for (auto& [d, k] : s.dims) f.blocks.emplace(d, SparseMatrix::identity(k));
    return f;
  }

  SparseMatrix block(int src_degree) const {
    auto it = blocks.find(src_degree);
    if (it != blocks.end()) return it->second;
    return SparseMatrix::zero(target.dim(src_degree + degree), source.dim(src_degree));
  }

  void set_block(int src_degree, SparseMatrix m) {
    if (m.rows() != target.dim(src_degree + degree) || m.cols() != source.dim(src_degree))
      throw ShapeMismatch("set_block: block shape");
    if (!m.is_zero()) blocks[src_degree] = std::move(m);
  }

  void check_shapes() const {
    for (auto& [d, m] : blocks)
      if (m.rows() != target.dim(d + degree) || m.cols() != source.dim(d))
        throw ShapeMismatch("graded map block shape");
  }

  bool is_zero() const {
    for (auto& [d, m] : blocks)
      if (!m.is_zero()) return false;
    return true;
  }

  QVec apply(int src_degree, const QVec& v) const { return block(src_degree).apply(v); }

  GradedMap operator+(const GradedMap& o) const {
    if (degree != o.degree || source != o.source || target != o.target) throw ShapeMismatch("graded map sum");
    GradedMap out(source, target, degree);
    for (auto& [d, m] : blocks) out.set_block(d, m + o.block(d));
    for (auto& [d, m] : o.blocks)
      if (!blocks.count(d)) out.set_block(d, m);
    return out;
  }

  GradedMap operator-(const GradedMap& o) const { return *this + o.scaled(Rat(-1)); }

  GradedMap scaled(const Rat& c) const {
    GradedMap out(source, target, degree);
    if (c == 0) return out;
    for (auto& [d, m] : blocks) out.blocks.emplace(d, m.scaled(c));
    return out;
  }

  bool operator==(const GradedMap& o) const {
    if (degree != o.degree || source != o.source || target != o.target) return false;
    for (auto& [d, k] : source.dims)
      if (block(d) != o.block(d)) return false;
    return true;
  }
  bool operator!=(const GradedMap& o) const { return !(*this == o); }
};

// g after f.
inline GradedMap compose(const GradedMap& g, const GradedMap& f) {
  if (f.target != g.source) throw ShapeMismatch("compose: middle space mismatch");
  GradedMap out(f.source, g.target, f.degree + g.degree);
  for (auto& [d, k] : f.source.dims) out.set_block(d, g.block(d + f.degree) * f.block(d));
  return out;
}

// Cochain complex over Q: differentials have degree +1 and square to zero.
struct ComplexQ {
  GradedSpace space;
  GradedMap d;

  ComplexQ() = default;
  explicit ComplexQ(GradedSpace s) : space(s), d(GradedMap::zero(s, s, 1)) {}
  ComplexQ(GradedSpace s, GradedMap diff) : space(std::move(s)), d(std::move(diff)) {
    if (d.source != space || d.target != space || d.degree != 1) throw ShapeMismatch("complex differential shape");
  }

  void check() const {
    d.check_shapes();
    if (!compose(d, d).is_zero()) throw AxiomFailure("d*d != 0");
  }
};

// X[n]: degrees shift down by n, differential picks up (-1)^n.
inline ComplexQ shift(const ComplexQ& c, int n) {
  GradedSpace s = shift_space(c.space, n);
  GradedMap d(s, s, 1);
  for (auto& [deg, m] : c.d.blocks) d.set_block(deg - n, m.scaled(Rat(koszul::shift_diff_sign(n))));
  return ComplexQ(s, d);
}

// Differential of a degree-n map f: X -> Y, i.e. d_Y f - (-1)^n f d_X.
// f is a chain map of complexes exactly when this vanishes.
inline GradedMap dmap(const ComplexQ& x, const ComplexQ& y, const GradedMap& f) {
  GradedMap a = compose(y.d, f);
  GradedMap b = compose(f, x.d);
  return a - b.scaled(Rat(koszul::sign_pow(f.degree)));
}

inline bool is_chain_map(const ComplexQ& x, const ComplexQ& y, const GradedMap& f) {
  return dmap(x, y, f).is_zero();
}

// Homology dimensions per degree, restricted to [lo, hi].
inline std::map<int, exactla::SubquotientBasis> homology(const ComplexQ& c, int lo, int hi) {
  std::map<int, exactla::SubquotientBasis> out;
  for (int deg = lo; deg <= hi; ++deg) {
    if (c.space.dim(deg) == 0) continue;
    out.emplace(deg, exactla::subquotient_homology(c.d.block(deg - 1), c.d.block(deg)));
  }
  return out;
}

}  // namespace dglhom
