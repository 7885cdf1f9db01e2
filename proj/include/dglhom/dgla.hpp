#pragma once

#include <optional>
#include <sstream>

#include "dglhom/powers.hpp"

namespace dglhom {

// Dg Lie algebra over Q: a complex plus bracket structure constants.
// Bracket blocks map g^p tensor g^q -> g^{p+q}; the column index of the
// (p,q) block for the pair (a,b) is a*dim(q)+b.
struct DGLA {
  ComplexQ cx;
  std::map<std::pair<int, int>, SparseMatrix> bracket;

  const GradedSpace& space() const { return cx.space; }

  SparseMatrix bracket_block(int p, int q) const {
    auto it = bracket.find({p, q});
    if (it != bracket.end()) return it->second;
    return SparseMatrix::zero(space().dim(p + q), space().dim(p) * space().dim(q));
  }

  void set_bracket_entry(int p, int a, int q, int b, int target_index, const Rat& c) {
    pending_.push_back({p, a, q, b, target_index, c});
  }

  void finalize_brackets() {
    std::map<std::pair<int, int>, MatBuilder> bld;
    for (auto& e : pending_) {
      auto key = std::make_pair(e.p, e.q);
      if (!bld.count(key)) bld.emplace(key, MatBuilder(space().dim(e.p + e.q), space().dim(e.p) * space().dim(e.q)));
      bld.at(key).add(e.target, e.a * space().dim(e.q) + e.b, e.c);
    }
    bracket.clear();
    for (auto& [key, b] : bld) {
      SparseMatrix m = b.build();
      if (!m.is_zero()) bracket.emplace(key, std::move(m));
    }
    pending_.clear();
  }

  // bracket of two global basis elements, as a sparse list of
  // (global index, coefficient).
  std::vector<std::pair<int, Rat>> bra_basis(int gi, int gj) const {
    auto [p, a] = space().from_global(gi);
    auto [q, b] = space().from_global(gj);
    std::vector<std::pair<int, Rat>> out;
    auto it = bracket.find({p, q});
    if (it == bracket.end()) return out;
    int col = a * space().dim(q) + b;
    for (const Triple& t : it->second.entries())
      if (t.col == col) out.push_back({space().global_index(p + q, t.row), t.val});
    return out;
  }

  QVec bra(int p, const QVec& x, int q, const QVec& y) const {
    QVec out = qvec_zero(space().dim(p + q));
    SparseMatrix blk = bracket_block(p, q);
    QVec xy = qvec_zero(space().dim(p) * space().dim(q));
    for (int a = 0; a < space().dim(p); ++a)
      for (int b = 0; b < space().dim(q); ++b)
        xy[static_cast<size_t>(a * space().dim(q) + b)] = x[static_cast<size_t>(a)] * y[static_cast<size_t>(b)];
    return blk.apply(xy);
  }

  // bracket on global sparse vectors
  std::map<int, Rat> bra_sparse(const std::map<int, Rat>& x, const std::map<int, Rat>& y) const {
    std::map<int, Rat> out;
    for (auto& [gi, ci] : x)
      for (auto& [gj, cj] : y)
        for (auto& [gk, ck] : bra_basis(gi, gj)) {
          out[gk] += ci * cj * ck;
        }
    for (auto it = out.begin(); it != out.end();) it = (it->second == 0) ? out.erase(it) : std::next(it);
    return out;
  }

  int degree_of(int gi) const { return space().from_global(gi).first; }

  std::vector<std::pair<int, Rat>> d_basis(int gi) const {
    auto [p, a] = space().from_global(gi);
    std::vector<std::pair<int, Rat>> out;
    for (const Triple& t : cx.d.block(p).entries())
      if (t.col == a) out.push_back({space().global_index(p + 1, t.row), t.val});
    return out;
  }

 private:
  struct Pending {
    int p, a, q, b, target;
    Rat c;
  };
  std::vector<Pending> pending_;
};

inline DGLA abelian_dgla(ComplexQ cx) {
  DGLA g;
  g.cx = std::move(cx);
  return g;
}

// ---------------------------------------------------------------------------
// Axiom checking

struct AxiomViolation {
  std::string axiom;
  std::vector<int> witness;  // global basis indices
  std::string detail;
};

struct AxiomReport {
  bool pass = true;
  std::vector<AxiomViolation> violations;

  void fail(std::string axiom, std::vector<int> witness, std::string detail = "") {
    pass = false;
    violations.push_back({std::move(axiom), std::move(witness), std::move(detail)});
  }
  std::string str() const {
    if (pass) return "pass";
    std::ostringstream os;
    for (auto& v : violations) {
      os << v.axiom << " fails at (";
      for (size_t i = 0; i < v.witness.size(); ++i) os << (i ? "," : "") << v.witness[i];
      os << ")";
      if (!v.detail.empty()) os << " " << v.detail;
      os << "; ";
    }
    return os.str();
  }
};

// Skew symmetry, graded Jacobi, Leibniz. Witnesses are the first failing
// basis tuples in lexicographic order; failures are data, not exceptions.
inline AxiomReport check_dgla(const DGLA& g) {
  AxiomReport rep;
  int n = g.space().global_dim();
  g.cx.check();
  auto add = [](std::map<int, Rat>& acc, const std::vector<std::pair<int, Rat>>& terms, const Rat& c) {
    for (auto& [k, v] : terms) acc[k] += c * v;
  };
  auto is_zero_map = [](const std::map<int, Rat>& m) {
    for (auto& [k, v] : m)
      if (v != 0) return false;
    return true;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::map<int, Rat> acc;
      add(acc, g.bra_basis(i, j), Rat(1));
      add(acc, g.bra_basis(j, i), Rat(koszul::swap_sign(g.degree_of(i), g.degree_of(j))));
      if (!is_zero_map(acc)) rep.fail("skew", {i, j});
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // Leibniz: d[x,y] = [dx,y] + (-1)^{|x|}[x,dy]
      std::map<int, Rat> acc;
      for (auto& [k, c] : g.bra_basis(i, j)) add(acc, g.d_basis(k), c);
      for (auto& [k, c] : g.d_basis(i)) add(acc, g.bra_basis(k, j), -c);
      for (auto& [k, c] : g.d_basis(j)) {
        std::map<int, Rat> t;
        add(t, g.bra_basis(i, k), c);
        for (auto& [kk, vv] : t) acc[kk] -= Rat(koszul::sign_pow(g.degree_of(i))) * vv;
      }
      if (!is_zero_map(acc)) rep.fail("leibniz", {i, j});
    }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        // [x,[y,z]] + (-1)^{|x|(|y|+|z|)}[y,[z,x]] + (-1)^{|z|(|x|+|y|)}[z,[x,y]] = 0
        int dx = g.degree_of(i), dy = g.degree_of(j), dz = g.degree_of(k);
        std::map<int, Rat> acc;
        for (auto& [m, c] : g.bra_basis(j, k)) add(acc, g.bra_basis(i, m), c);
        for (auto& [m, c] : g.bra_basis(k, i)) {
          std::map<int, Rat> t;
          add(t, g.bra_basis(j, m), c);
          for (auto& [kk, vv] : t) acc[kk] += Rat(koszul::sign_pow(static_cast<long>(dx) * (dy + dz))) * vv;
        }
        for (auto& [m, c] : g.bra_basis(i, j)) {
          std::map<int, Rat> t;
          add(t, g.bra_basis(k, m), c);
          for (auto& [kk, vv] : t) acc[kk] += Rat(koszul::sign_pow(static_cast<long>(dz) * (dx + dy))) * vv;
        }
        if (!is_zero_map(acc)) rep.fail("jacobi", {i, j, k});
      }
  return rep;
}

// ---------------------------------------------------------------------------
// Standard complex C(g) = S(g[1]). A monomial is a sorted tuple of global
// g-indices read as a product in the free graded-commutative algebra on
// g[1]; all signs use the shifted grading. A basis vector of odd g-degree
// may repeat, one of even g-degree may not (its square dies over Q).
// Exterior coordinates Lambda^n(g)[n] are reached through decalage.

using Mono = std::vector<int>;

struct StandardComplex {
  DGLA g;
  int arity_cap = 0;
  int lo = 0, hi = 0;  // enumerated C-degree window

  std::map<int, std::vector<Mono>> basis;  // C-degree -> monomials (arity asc, lex)
  std::map<int, std::map<Mono, int>> index;
  std::map<int, std::vector<int>> arity_counts;  // per degree: #monomials of arity <= m, m = 0..cap
  ComplexQ cx;
  GradedMap d_arity_down;  // bracket part (arity -1)
  GradedMap d_internal;    // internal part (arity 0)

  int arity(int cdeg, int idx) const { return static_cast<int>(basis.at(cdeg)[static_cast<size_t>(idx)].size()); }

  int mono_cdegree(const Mono& m) const {
    int s = 0;
    for (int gi : m) s += g.degree_of(gi);
    return s - static_cast<int>(m.size());
  }

  int mono_index(int cdeg, const Mono& m) const {
    auto it = index.find(cdeg);
    if (it == index.end()) throw ShapeMismatch("standard complex: degree outside window");
    auto jt = it->second.find(m);
    if (jt == it->second.end()) throw ShapeMismatch("standard complex: unknown monomial");
    return jt->second;
  }

  bool in_window(int cdeg) const { return cdeg >= lo && cdeg <= hi; }

  // Product normalization in S(g[1]): sort with Koszul signs in the shifted
  // grading, kill forbidden squares.
  std::pair<int, Mono> normalize(const Mono& w) const {
    std::vector<std::pair<int, int>> keyed;
    for (int gi : w) keyed.push_back({gi, g.degree_of(gi) - 1});
    int sign = koszul::sort_sign(keyed, /*antisym=*/false);
    Mono out;
    for (auto& [gi, dd] : keyed) out.push_back(gi);
    for (size_t i = 1; i < out.size(); ++i)
      if (out[i] == out[i - 1] && g.degree_of(out[i]) % 2 == 0) return {0, {}};
    return {sign, out};
  }

  // Decalage prefactor carrying the sorted monomial to exterior coordinates
  // Lambda^n(g)[n].
  int dec_sign(const Mono& m) const {
    std::vector<int> degs;
    for (int gi : m) degs.push_back(g.degree_of(gi));
    return koszul::decalage_sign(degs);
  }

  std::vector<int> shifted_degrees(const Mono& m) const {
    std::vector<int> degs;
    for (int gi : m) degs.push_back(g.degree_of(gi) - 1);
    return degs;
  }

  // Comultiplication on a basis monomial: all subset splits with unshuffle
  // signs in the shifted grading, including the empty and full pieces.
  struct DeltaTerm {
    Mono left, right;
    int sign;
  };
  std::vector<DeltaTerm> comult(const Mono& m) const {
    std::vector<DeltaTerm> out;
    size_t n = m.size();
    std::vector<int> degs = shifted_degrees(m);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<bool> flag(n, false);
      Mono left, right;
      for (size_t s = 0; s < n; ++s) {
        if (mask & (1u << s)) {
          flag[s] = true;
          left.push_back(m[s]);
        } else {
          right.push_back(m[s]);
        }
      }
      out.push_back({std::move(left), std::move(right), koszul::unshuffle_sign(degs, flag, /*antisym=*/false)});
    }
    return out;
  }
};

namespace detail {

inline void enumerate_ce(const DGLA& g, int arity, size_t depth, int min_next, int partial_deg, int lo, int hi,
                         Mono& cur, std::vector<Mono>& out) {
  int remaining = arity - static_cast<int>(depth);
  if (remaining == 0) {
    int cdeg = partial_deg - arity;
    if (cdeg >= lo && cdeg <= hi) out.push_back(cur);
    return;
  }
  int n = g.space().global_dim();
  int maxdeg = g.space().max_degree();
  for (int gi = min_next; gi < n; ++gi) {
    int dg = g.degree_of(gi);
    if (!cur.empty() && gi == cur.back() && dg % 2 == 0) continue;
    // prune: degrees are nondecreasing along the global order
    int min_total = partial_deg + dg * remaining;
    int max_total = partial_deg + dg + maxdeg * (remaining - 1);
    if (min_total - arity > hi || max_total - arity < lo) {
      if (min_total - arity > hi) break;  // later indices only increase degree
      continue;
    }
    cur.push_back(gi);
    enumerate_ce(g, arity, depth + 1, gi, partial_deg + dg, lo, hi, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

// Standard complex truncated to arity <= cap and C-degrees in [lo, hi].
// The arity filtration F_m consists of monomials of arity <= m; it is a
// subcomplex since the bracket part lowers arity.
inline StandardComplex standard_complex(const DGLA& g, int cap, int lo, int hi) {
  StandardComplex sc;
  sc.g = g;
  sc.arity_cap = cap;
  sc.lo = lo;
  sc.hi = hi;
  for (int n = 0; n <= cap; ++n) {
    std::vector<Mono> monos;
    Mono cur;
    detail::enumerate_ce(g, n, 0, 0, 0, lo, hi, cur, monos);
    std::sort(monos.begin(), monos.end());
    for (auto& m : monos) {
      int cdeg = sc.mono_cdegree(m);
      sc.index[cdeg][m] = static_cast<int>(sc.basis[cdeg].size());
      sc.basis[cdeg].push_back(m);
    }
  }
  GradedSpace space;
  for (auto& [deg, ms] : sc.basis) space.dims[deg] = static_cast<int>(ms.size());
  space.prune();
  for (auto& [deg, ms] : sc.basis) {
    std::vector<int> counts(static_cast<size_t>(cap) + 1, 0);
    for (auto& m : ms)
      for (int a = static_cast<int>(m.size()); a <= cap; ++a) counts[static_cast<size_t>(a)] += 1;
    sc.arity_counts[deg] = counts;
  }

  GradedMap dI(space, space, 1), dII(space, space, 1);
  std::map<int, MatBuilder> bI, bII;
  for (auto& [deg, ms] : sc.basis) {
    bI.emplace(deg, MatBuilder(space.dim(deg + 1), static_cast<int>(ms.size())));
    bII.emplace(deg, MatBuilder(space.dim(deg + 1), static_cast<int>(ms.size())));
  }
  for (auto& [deg, ms] : sc.basis) {
    for (int col = 0; col < static_cast<int>(ms.size()); ++col) {
      const Mono& m = ms[static_cast<size_t>(col)];
      std::vector<int> degs = sc.shifted_degrees(m);
      size_t n = m.size();
      // bracket part: the coderivation extending x.y |-> (-1)^{|x|_g}[x,y]
      for (size_t s = 0; s < n; ++s)
        for (size_t t = s + 1; t < n; ++t) {
          std::vector<bool> flag(n, false);
          flag[s] = flag[t] = true;
          int us = koszul::unshuffle_sign(degs, flag, /*antisym=*/false);
          int b2 = koszul::sign_pow(sc.g.degree_of(m[s]));
          Mono rest;
          for (size_t u = 0; u < n; ++u)
            if (u != s && u != t) rest.push_back(m[u]);
          for (auto& [gk, c] : sc.g.bra_basis(m[s], m[t])) {
            Mono w;
            w.push_back(gk);
            w.insert(w.end(), rest.begin(), rest.end());
            auto [sg, norm] = sc.normalize(w);
            if (sg == 0) continue;
            int tdeg = sc.mono_cdegree(norm);
            if (!sc.in_window(tdeg)) continue;
            bI.at(deg).add(sc.mono_index(tdeg, norm), col, Rat(us * b2 * sg) * c);
          }
        }
      // internal part: S^n of the shifted differential d_{g[1]} = -d_g
      for (size_t s = 0; s < n; ++s) {
        int pre = koszul::prefix_sign(degs, s);
        for (auto& [gk, c] : sc.g.d_basis(m[s])) {
          Mono w = m;
          w[s] = gk;
          auto [sg, norm] = sc.normalize(w);
          if (sg == 0) continue;
          int tdeg = sc.mono_cdegree(norm);
          if (!sc.in_window(tdeg)) continue;
          bII.at(deg).add(sc.mono_index(tdeg, norm), col, Rat(-pre * sg) * c);
        }
      }
    }
  }
  for (auto& [deg, b] : bI) dI.set_block(deg, b.build());
  for (auto& [deg, b] : bII) dII.set_block(deg, b.build());
  sc.d_arity_down = dI;
  sc.d_internal = dII;
  sc.cx = ComplexQ(space, dI + dII);
  return sc;
}

// Subcomplex of arities <= m (basis prefixes per degree).
inline ComplexQ filtration_piece(const StandardComplex& sc, int m) {
  GradedSpace space;
  for (auto& [deg, counts] : sc.arity_counts) space.dims[deg] = counts[static_cast<size_t>(std::min(m, sc.arity_cap))];
  space.prune();
  GradedMap d(space, space, 1);
  for (auto& [deg, k] : space.dims) {
    MatBuilder b(space.dim(deg + 1), k);
    SparseMatrix full = sc.cx.d.block(deg);
    for (const Triple& t : full.entries())
      if (t.col < k && t.row < space.dim(deg + 1)) b.add(t.row, t.col, t.val);
    d.set_block(deg, b.build());
  }
  return ComplexQ(space, d);
}

// dim gr_m at each degree (monomials of arity exactly m).
inline std::map<int, int> gr_dims(const StandardComplex& sc, int m) {
  std::map<int, int> out;
  for (auto& [deg, counts] : sc.arity_counts) {
    int k = counts[static_cast<size_t>(m)] - (m ? counts[static_cast<size_t>(m - 1)] : 0);
    if (k) out[deg] = k;
  }
  return out;
}

inline StandardComplex ce_complex(const DGLA& g, int cap, int lo, int hi) {
  AxiomReport rep = check_dgla(g);
  if (!rep.pass) throw AxiomFailure(rep.str());
  return standard_complex(g, cap, lo, hi);
}

// ---------------------------------------------------------------------------
// Lie homology with the arity filtration

struct LieHomologyResult {
  int cap = 0;
  int lo_index = 0, hi_index = 0;  // homology indices i, H_i = H^{-i}
  std::map<int, int> dims;                          // i -> dim H_i
  std::map<std::pair<int, int>, int> filt_dims;     // (m, i) -> dim F_m H_i
  std::map<int, exactla::SubquotientBasis> full;    // per i
  std::map<std::pair<int, int>, exactla::SubquotientBasis> filt;  // per (m, i), vectors over F_m basis
  // maps realized on representatives
  std::map<std::pair<int, int>, SparseMatrix> up;      // F_{m-1}H_i -> F_m H_i
  std::map<std::pair<int, int>, SparseMatrix> to_full; // F_m H_i -> H_i
  std::map<std::pair<int, int>, SparseMatrix> to_gr;   // F_m H_i -> H^{m-i}(Lambda^m)
  std::map<std::pair<int, int>, int> gr_dims_;         // (m, i) -> dim H^{m-i}(Lambda^m g)
};

// Class coordinates of a cycle in a computed subquotient.
inline std::optional<QVec> class_coords(const exactla::SubquotientBasis& h, const QVec& cycle) {
  SparseMatrix cols = SparseMatrix::from_dense_columns(
      h.ambient, [&] {
        std::vector<QVec> c = h.reps;
        c.insert(c.end(), h.image.begin(), h.image.end());
        return c;
      }());
  auto sol = exactla::solve(cols, cycle);
  if (!sol) return std::nullopt;
  return QVec(sol->begin(), sol->begin() + static_cast<long>(h.reps.size()));
}

// Detects standard-complex content beyond the arity cap inside the degree
// range [lo, hi]: arity n contributes C-degrees in [n*m1, n*m2] where
// m1/m2 bound the degrees of g[1].
inline bool arity_leak(const DGLA& g, int cap, int lo, int hi) {
  if (g.space().dims.empty()) return false;
  long m1 = g.space().min_degree() - 1, m2 = g.space().max_degree() - 1;
  auto contributes = [&](long n) { return n * m1 <= hi && n * m2 >= lo; };
  if (m1 <= 0 && 0 <= m2) {
    // intervals grow in both directions (or stick at zero)
    if (m1 == 0 && m2 == 0) return lo <= 0 && 0 <= hi;
    for (long n = cap + 1;; ++n) {
      if (contributes(n)) return true;
      bool can_still = (m1 < 0 ? true : n * m1 <= hi) && (m2 > 0 ? true : n * m2 >= lo);
      if (!can_still) return false;
      if (n > cap + 1 + (std::abs(lo) + std::abs(hi) + 2)) return true;  // growing envelope caught the window
    }
  }
  long bound;
  if (m2 < 0)
    bound = lo / m2;  // n*m2 >= lo  =>  n <= lo/m2
  else
    bound = hi / m1;  // m1 > 0: n*m1 <= hi  =>  n <= hi/m1
  for (long n = cap + 1; n <= bound; ++n)
    if (contributes(n)) return true;
  return false;
}

// H^{Lie}_i = H^{-i}(C(g)) for i in [lo_i, hi_i], with all filtration
// stages through the cap and the comparison maps between them.
inline LieHomologyResult lie_homology(const DGLA& g, int cap, int lo_i, int hi_i) {
  int lo_deg = -hi_i - 1, hi_deg = -lo_i + 1;
  if (arity_leak(g, cap, lo_deg, hi_deg))
    throw TruncationTooSmall("arities beyond the cap contribute to the requested window");
  StandardComplex sc = ce_complex(g, cap, lo_deg, hi_deg);
  LieHomologyResult res;
  res.cap = cap;
  res.lo_index = lo_i;
  res.hi_index = hi_i;
  std::map<int, ComplexQ> pieces;
  for (int m = 0; m <= cap; ++m) pieces.emplace(m, filtration_piece(sc, m));
  for (int i = lo_i; i <= hi_i; ++i) {
    int deg = -i;
    auto h = exactla::subquotient_homology(sc.cx.d.block(deg - 1), sc.cx.d.block(deg));
    res.dims[i] = h.dim();
    res.full.emplace(i, std::move(h));
    for (int m = 0; m <= cap; ++m) {
      const ComplexQ& fm = pieces.at(m);
      auto hm = exactla::subquotient_homology(fm.d.block(deg - 1), fm.d.block(deg));
      res.filt_dims[{m, i}] = hm.dim();
      res.filt.emplace(std::make_pair(m, i), std::move(hm));
    }
  }
  // comparison maps on representatives
  for (int i = lo_i; i <= hi_i; ++i) {
    int deg = -i;
    for (int m = 0; m <= cap; ++m) {
      const auto& hm = res.filt.at({m, i});
      auto pad = [&](const QVec& v, int target_dim) {
        QVec w = qvec_zero(target_dim);
        for (size_t k = 0; k < v.size(); ++k) w[k] = v[k];
        return w;
      };
      if (m > 0) {
        const auto& hprev = res.filt.at({m - 1, i});
        MatBuilder mb(hm.dim(), hprev.dim());
        for (int c = 0; c < hprev.dim(); ++c) {
          auto coords = class_coords(hm, pad(hprev.reps[static_cast<size_t>(c)], hm.ambient));
          if (!coords) throw Error("Internal", "filtration map fell outside target classes");
          for (int r = 0; r < hm.dim(); ++r) mb.add(r, c, (*coords)[static_cast<size_t>(r)]);
        }
        res.up.emplace(std::make_pair(m, i), mb.build());
      }
      {
        const auto& hfull = res.full.at(i);
        MatBuilder mb(hfull.dim(), hm.dim());
        for (int c = 0; c < hm.dim(); ++c) {
          auto coords = class_coords(hfull, pad(hm.reps[static_cast<size_t>(c)], hfull.ambient));
          if (!coords) throw Error("Internal", "filtration-to-total map fell outside classes");
          for (int r = 0; r < hfull.dim(); ++r) mb.add(r, c, (*coords)[static_cast<size_t>(r)]);
        }
        res.to_full.emplace(std::make_pair(m, i), mb.build());
      }
      {
        // gr_m projection: drop arity < m coordinates; homology of gr_m with
        // the induced differential (the internal part restricted to arity m)
        int prev = m ? sc.arity_counts.count(deg) ? sc.arity_counts.at(deg)[static_cast<size_t>(m - 1)] : 0 : 0;
        auto gr_block = [&](int at_deg) {
          int p = m ? (sc.arity_counts.count(at_deg) ? sc.arity_counts.at(at_deg)[static_cast<size_t>(m - 1)] : 0) : 0;
          int q = sc.arity_counts.count(at_deg) ? sc.arity_counts.at(at_deg)[static_cast<size_t>(m)] : 0;
          return std::make_pair(p, q);
        };
        auto project = [&](const SparseMatrix& full_block, int sdeg) {
          auto [ps, qs] = gr_block(sdeg);
          auto [pt, qt] = gr_block(sdeg + 1);
          MatBuilder b(qt - pt, qs - ps);
          for (const Triple& t : full_block.entries())
            if (t.col >= ps && t.col < qs && t.row >= pt && t.row < qt) b.add(t.row - pt, t.col - ps, t.val);
          return b.build();
        };
        SparseMatrix din = project(sc.cx.d.block(deg - 1), deg - 1);
        SparseMatrix dout = project(sc.cx.d.block(deg), deg);
        auto hgr = exactla::subquotient_homology(din, dout);
        res.gr_dims_[{m, i}] = hgr.dim();
        MatBuilder mb(hgr.dim(), hm.dim());
        for (int c = 0; c < hm.dim(); ++c) {
          const QVec& rep = hm.reps[static_cast<size_t>(c)];
          QVec grpart = qvec_zero(hgr.ambient);
          for (int k = prev; k < static_cast<int>(rep.size()); ++k) grpart[static_cast<size_t>(k - prev)] = rep[static_cast<size_t>(k)];
          auto coords = class_coords(hgr, grpart);
          if (!coords) throw Error("Internal", "gr projection fell outside classes");
          for (int r = 0; r < hgr.dim(); ++r) mb.add(r, c, (*coords)[static_cast<size_t>(r)]);
        }
        res.to_gr.emplace(std::make_pair(m, i), mb.build());
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Unital cocommutative dg coalgebras (finite data) and Maurer-Cartan

struct UnitalCoalgebra {
  ComplexQ cx;
  // comultiplication per global basis index
  std::vector<std::vector<std::tuple<int, int, Rat>>> delta;
  QVec counit;
  int unit_index = -1;       // the unit must be a basis vector of degree 0
  std::vector<int> filt;     // filtration level per basis index

  int dim() const { return cx.space.global_dim(); }

  void check() const {
    if (unit_index < 0 || unit_index >= dim()) throw UnitViolation("unit index out of range");
    if (cx.space.from_global(unit_index).first != 0) throw UnitViolation("unit not in degree 0");
    // group-like: Delta(u) = u tensor u, eps(u) = 1, du = 0
    auto& du = delta[static_cast<size_t>(unit_index)];
    if (du.size() != 1 || std::get<0>(du[0]) != unit_index || std::get<1>(du[0]) != unit_index ||
        std::get<2>(du[0]) != Rat(1))
      throw UnitViolation("unit is not group-like");
    if (counit[static_cast<size_t>(unit_index)] != 1) throw UnitViolation("counit(unit) != 1");
    for (auto& [k, c] : [&] {
           auto [p, a] = cx.space.from_global(unit_index);
           std::vector<std::pair<int, Rat>> out;
           for (const Triple& t : cx.d.block(p).entries())
             if (t.col == a) out.push_back({t.row, t.val});
           return out;
         }())
      if (c != 0) throw UnitViolation("d(unit) != 0");
    // counit axiom: (eps tensor id) Delta = id
    for (int gi = 0; gi < dim(); ++gi) {
      std::map<int, Rat> acc;
      for (auto& [l, r, c] : delta[static_cast<size_t>(gi)]) acc[r] += counit[static_cast<size_t>(l)] * c;
      acc[gi] -= 1;
      for (auto& [k, v] : acc)
        if (v != 0) throw AxiomFailure("counit axiom fails at basis " + std::to_string(gi));
    }
  }

  int degree_of(int gi) const { return cx.space.from_global(gi).first; }

  // Sparse iterated comultiplication on a basis vector.
  std::vector<std::pair<std::vector<int>, Rat>> delta_iter(int gi, int n) const {
    std::vector<std::pair<std::vector<int>, Rat>> cur{{{gi}, Rat(1)}};
    for (int step = 1; step < n; ++step) {
      std::vector<std::pair<std::vector<int>, Rat>> next;
      for (auto& [tuple, c] : cur)
        for (auto& [l, r, dc] : delta[static_cast<size_t>(tuple[0])]) {
          std::vector<int> t2;
          t2.push_back(l);
          t2.push_back(r);
          t2.insert(t2.end(), tuple.begin() + 1, tuple.end());
          next.push_back({std::move(t2), c * dc});
        }
      cur = std::move(next);
    }
    return cur;
  }
};

// The standard complex as a unital coalgebra datum. All subset splits of
// stored monomials must themselves be stored, so the window has to be wide
// enough to contain them.
inline UnitalCoalgebra ce_as_coalgebra(const StandardComplex& sc) {
  UnitalCoalgebra a;
  a.cx = sc.cx;
  int n = a.cx.space.global_dim();
  a.delta.assign(static_cast<size_t>(n), {});
  a.counit = qvec_zero(n);
  a.filt.assign(static_cast<size_t>(n), 0);
  for (auto& [deg, ms] : sc.basis)
    for (int i = 0; i < static_cast<int>(ms.size()); ++i) {
      const Mono& m = ms[static_cast<size_t>(i)];
      int gi = a.cx.space.global_index(deg, i);
      a.filt[static_cast<size_t>(gi)] = static_cast<int>(m.size());
      if (m.empty()) {
        a.unit_index = gi;
        a.counit[static_cast<size_t>(gi)] = 1;
      }
      for (auto& t : sc.comult(m)) {
        if (t.sign == 0) continue;
        int dl = sc.mono_cdegree(t.left), dr = sc.mono_cdegree(t.right);
        if (!sc.index.count(dl) || !sc.index.at(dl).count(t.left) || !sc.index.count(dr) ||
            !sc.index.at(dr).count(t.right))
          throw CapExceeded("comultiplication leaves the stored window");
        a.delta[static_cast<size_t>(gi)].push_back({a.cx.space.global_index(dl, sc.index.at(dl).at(t.left)),
                                                    a.cx.space.global_index(dr, sc.index.at(dr).at(t.right)),
                                                    Rat(t.sign)});
      }
    }
  if (a.unit_index < 0) throw CapExceeded("window does not contain the unit monomial");
  return a;
}

// df_1 + (1/2)[f_1, f_1] for f_1: A -> g[1] (a degree +1 graded map into g)
// with f_1(1_A) = 0.
inline GradedMap mc_residual(const UnitalCoalgebra& a, const DGLA& g, const GradedMap& f1) {
  if (f1.degree != 1) throw ShapeMismatch("mc_residual: f1 must have degree +1");
  {
    auto [p, idx] = a.cx.space.from_global(a.unit_index);
    QVec u = qvec_zero(a.cx.space.dim(p));
    u[static_cast<size_t>(idx)] = 1;
    if (!is_zero(f1.apply(p, u))) throw UnitViolation("f1(1_A) != 0");
  }
  GradedMap res(a.cx.space, g.space(), 2);
  std::map<int, MatBuilder> bld;
  for (auto& [p, k] : a.cx.space.dims) bld.emplace(p, MatBuilder(g.space().dim(p + 2), k));
  auto f1_basis = [&](int gi) {
    auto [p, idx] = a.cx.space.from_global(gi);
    QVec v = qvec_zero(a.cx.space.dim(p));
    v[static_cast<size_t>(idx)] = 1;
    return std::make_pair(p + 1, f1.apply(p, v));  // degree in g, coords
  };
  for (int gi = 0; gi < a.dim(); ++gi) {
    auto [p, idx] = a.cx.space.from_global(gi);
    std::map<int, Rat> acc;  // over global g indices at degree p+2
    auto add_vec = [&](int gdeg, const QVec& v, const Rat& c) {
      for (int t = 0; t < static_cast<int>(v.size()); ++t)
        if (v[static_cast<size_t>(t)] != 0) acc[g.space().global_index(gdeg, t)] += c * v[static_cast<size_t>(t)];
    };
    // d_g f1
    {
      auto [gdeg, val] = f1_basis(gi);
      if (g.space().dim(gdeg)) add_vec(gdeg + 1, g.cx.d.block(gdeg).apply(val), Rat(1));
    }
    // f1 d_A
    for (const Triple& t : a.cx.d.block(p).entries()) {
      if (t.col != idx) continue;
      auto [gdeg, val] = f1_basis(a.cx.space.global_index(p + 1, t.row));
      add_vec(gdeg, val, t.val);
    }
    // (1/2)[f1, f1] via Delta
    for (auto& [l, r, c] : a.delta[static_cast<size_t>(gi)]) {
      auto [dl, vl] = f1_basis(l);
      auto [dr, vr] = f1_basis(r);
      if (is_zero(vl) || is_zero(vr)) continue;
      QVec br = g.bra(dl, vl, dr, vr);
      add_vec(dl + dr, br, Rat(koszul::sign_pow(a.degree_of(l))) * c / 2);
    }
    for (auto& [gk, c] : acc) {
      auto [gdeg, gidx] = g.space().from_global(gk);
      if (gdeg == p + 2 + 0 && c != 0) bld.at(p).add(gidx, idx, c);
    }
  }
  for (auto& [p, b] : bld) res.set_block(p, b.build());
  return res;
}

struct CoalgebraLift {
  GradedMap f;                 // A -> C(g) (exterior coordinates)
  std::vector<GradedMap> f_n;  // components by arity, 0..cap
};

// f_n = (1/n!) pi_{S,n} f_1^{tensor n} Delta^{(n)}; requires a vanishing
// Maurer-Cartan residual.
inline CoalgebraLift coalgebra_lift(const UnitalCoalgebra& a, const DGLA& g, const GradedMap& f1,
                                    const StandardComplex& ce) {
  if (!mc_residual(a, g, f1).is_zero()) throw NotMaurerCartan("f1 does not satisfy the Maurer-Cartan equation");
  CoalgebraLift out;
  std::map<int, MatBuilder> bld;
  for (auto& [p, k] : a.cx.space.dims) bld.emplace(p, MatBuilder(ce.cx.space.dim(p), k));
  std::vector<std::map<int, MatBuilder>> bld_n(static_cast<size_t>(ce.arity_cap) + 1);
  for (int n = 0; n <= ce.arity_cap; ++n)
    for (auto& [p, k] : a.cx.space.dims) bld_n[static_cast<size_t>(n)].emplace(p, MatBuilder(ce.cx.space.dim(p), k));

  auto f1_sparse = [&](int gi) {
    auto [p, idx] = a.cx.space.from_global(gi);
    QVec v = qvec_zero(a.cx.space.dim(p));
    v[static_cast<size_t>(idx)] = 1;
    QVec img = f1.apply(p, v);
    std::vector<std::pair<int, Rat>> out;  // global g index, coeff
    for (int t = 0; t < static_cast<int>(img.size()); ++t)
      if (img[static_cast<size_t>(t)] != 0) out.push_back({g.space().global_index(p + 1, t), img[static_cast<size_t>(t)]});
    return out;
  };

  for (int gi = 0; gi < a.dim(); ++gi) {
    auto [p, idx] = a.cx.space.from_global(gi);
    // n = 0 piece: counit
    if (a.counit[static_cast<size_t>(gi)] != 0 && p == 0) {
      int row = ce.mono_index(0, {});
      bld.at(p).add(row, idx, a.counit[static_cast<size_t>(gi)]);
      bld_n[0].at(p).add(row, idx, a.counit[static_cast<size_t>(gi)]);
    }
    int max_n = std::min(ce.arity_cap, a.filt.empty() ? ce.arity_cap : a.filt[static_cast<size_t>(gi)]);
    for (int n = 1; n <= max_n; ++n) {
      Rat inv_fact(1);
      for (int k = 2; k <= n; ++k) inv_fact /= k;
      for (auto& [tuple, c] : a.delta_iter(gi, n)) {
        // expand f1 on each slot
        std::vector<std::vector<std::pair<int, Rat>>> vals;
        bool dead = false;
        for (int s : tuple) {
          vals.push_back(f1_sparse(s));
          if (vals.back().empty()) {
            dead = true;
            break;
          }
        }
        if (dead) continue;
        std::vector<size_t> pick(tuple.size(), 0);
        while (true) {
          Mono word;
          Rat coeff = c * inv_fact;
          for (size_t s = 0; s < pick.size(); ++s) {
            word.push_back(vals[s][pick[s]].first);
            coeff *= vals[s][pick[s]].second;
          }
          auto [sg, norm] = ce.normalize(word);
          if (sg != 0) {
            int tdeg = ce.mono_cdegree(norm);
            if (ce.in_window(tdeg) && tdeg == p) {
              int row = ce.mono_index(tdeg, norm);
              bld.at(p).add(row, idx, coeff * sg);
              bld_n[static_cast<size_t>(n)].at(p).add(row, idx, coeff * sg);
            }
          }
          size_t s = 0;
          while (s < pick.size() && ++pick[s] == vals[s].size()) pick[s++] = 0;
          if (s == pick.size()) break;
        }
      }
    }
  }
  GradedMap f(a.cx.space, ce.cx.space, 0);
  for (auto& [p, b] : bld) f.set_block(p, b.build());
  out.f = std::move(f);
  for (int n = 0; n <= ce.arity_cap; ++n) {
    GradedMap fn(a.cx.space, ce.cx.space, 0);
    for (auto& [p, b] : bld_n[static_cast<size_t>(n)]) fn.set_block(p, b.build());
    out.f_n.push_back(std::move(fn));
  }
  return out;
}

// ---------------------------------------------------------------------------
// E_1 page: E_1^{-n, q} = H^q(Lambda^n(g))

struct E1Page {
  std::map<std::pair<int, int>, int> dims;  // (arity n, q)
};

inline E1Page e1_page(const DGLA& g, int max_arity) {
  E1Page out;
  for (int n = 0; n <= max_arity; ++n) {
    PowerComplex p = power(g.cx, n, PowerKind::Exterior);
    for (auto& [q, k] : p.cx.space.dims) {
      auto h = exactla::subquotient_homology(p.cx.d.block(q - 1), p.cx.d.block(q));
      if (h.dim()) out.dims[{n, q}] = h.dim();
    }
  }
  return out;
}

// Kunneth anti-invariants: dim Lambda^n(H)^q for a graded space H of
// homology dimensions, by monomial count.
inline int kunneth_anti_invariants_dim(const GradedSpace& h, int n, int q) {
  ComplexQ hc(h);
  PowerComplex p = power(hc, n, PowerKind::Exterior);
  return p.cx.space.dim(q);
}

}  // namespace dglhom
