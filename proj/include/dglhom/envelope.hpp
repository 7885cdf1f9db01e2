#pragma once

#include <functional>

#include "dglhom/dgla.hpp"

namespace dglhom {

// Universal enveloping algebra of a dg Lie algebra, truncated at a fixed
// PBW length. Basis monomials are nondecreasing words in the global basis
// of the algebra (ordered by degree, then index); an odd generator never
// repeats since its square is half its self-bracket. Products are
// straightened with the rewriting rule xy -> (-1)^{|x||y|} yx + [x,y]
// applied leftmost-innermost.
struct TruncEnvelope {
  DGLA a;
  int cap = 0;

  using Word = std::vector<int>;
  using Elem = std::map<Word, Rat>;  // sparse over sorted monomials

  std::map<int, std::vector<Word>> basis;  // total degree -> monomials (length, lex)
  std::map<int, std::map<Word, int>> index;
  std::map<int, std::vector<int>> length_counts;  // per degree: #monomials of length <= l
  GradedSpace space;

  int word_degree(const Word& w) const {
    int s = 0;
    for (int gi : w) s += a.degree_of(gi);
    return s;
  }

  std::vector<int> word_degrees(const Word& w) const {
    std::vector<int> degs;
    for (int gi : w) degs.push_back(a.degree_of(gi));
    return degs;
  }

  int mono_index(const Word& w) const {
    int deg = word_degree(w);
    auto it = index.find(deg);
    if (it == index.end()) throw ShapeMismatch("envelope: unknown monomial degree");
    auto jt = it->second.find(w);
    if (jt == it->second.end()) throw ShapeMismatch("envelope: unknown monomial");
    return jt->second;
  }

  bool repeat_allowed(int gi) const { return a.degree_of(gi) % 2 == 0; }

  // Straightened normal form of an arbitrary word.
  const Elem& nf(const Word& w) const {
    auto it = nf_cache_.find(w);
    if (it != nf_cache_.end()) return it->second;
    Elem out;
    size_t viol = w.size();
    for (size_t t = 0; t + 1 < w.size(); ++t) {
      if (w[t] > w[t + 1] || (w[t] == w[t + 1] && !repeat_allowed(w[t]))) {
        viol = t;
        break;
      }
    }
    if (viol == w.size()) {
      out[w] = 1;
    } else {
      int x = w[viol], y = w[viol + 1];
      auto splice = [&](const std::vector<std::pair<int, Rat>>& mid, const Rat& c) {
        for (auto& [gk, ck] : mid) {
          Word w2(w.begin(), w.begin() + static_cast<long>(viol));
          w2.push_back(gk);
          w2.insert(w2.end(), w.begin() + static_cast<long>(viol) + 2, w.end());
          for (auto& [m, v] : nf(w2)) {
            out[m] += c * ck * v;
          }
        }
      };
      if (x > y) {
        Word w2 = w;
        std::swap(w2[viol], w2[viol + 1]);
        Rat sw(koszul::swap_sign(a.degree_of(x), a.degree_of(y)));
        for (auto& [m, v] : nf(w2)) out[m] += sw * v;
        splice(a.bra_basis(x, y), Rat(1));
      } else {
        splice(a.bra_basis(x, x), Rat(1, 2));
      }
    }
    for (auto it2 = out.begin(); it2 != out.end();) it2 = (it2->second == 0) ? out.erase(it2) : std::next(it2);
    return nf_cache_.emplace(w, std::move(out)).first->second;
  }

  Elem mul(const Elem& u, const Elem& v) const {
    Elem out;
    for (auto& [wu, cu] : u)
      for (auto& [wv, cv] : v) {
        if (static_cast<int>(wu.size() + wv.size()) > cap)
          throw CapExceeded("envelope product exceeds the PBW cap");
        Word w = wu;
        w.insert(w.end(), wv.begin(), wv.end());
        for (auto& [m, c] : nf(w)) out[m] += cu * cv * c;
      }
    for (auto it = out.begin(); it != out.end();) it = (it->second == 0) ? out.erase(it) : std::next(it);
    return out;
  }

  // Hopf comultiplication: generators are primitive, so a monomial splits
  // into signed unshuffles of subwords.
  struct DeltaTerm {
    Word left, right;
    int sign;
  };
  std::vector<DeltaTerm> comult(const Word& w) const {
    std::vector<DeltaTerm> out;
    std::vector<int> degs = word_degrees(w);
    size_t n = w.size();
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<bool> flag(n, false);
      Word l, r;
      for (size_t s = 0; s < n; ++s) {
        if (mask & (1u << s)) {
          flag[s] = true;
          l.push_back(w[s]);
        } else {
          r.push_back(w[s]);
        }
      }
      out.push_back({std::move(l), std::move(r), koszul::unshuffle_sign(degs, flag, /*antisym=*/false)});
    }
    return out;
  }

  // The differential is the derivation extending d_a.
  Elem differential(const Word& w) const {
    Elem out;
    std::vector<int> degs = word_degrees(w);
    for (size_t s = 0; s < w.size(); ++s) {
      int pre = koszul::prefix_sign(degs, s);
      for (auto& [gk, c] : a.d_basis(w[s])) {
        Word w2 = w;
        w2[s] = gk;
        for (auto& [m, v] : nf(w2)) out[m] += Rat(pre) * c * v;
      }
    }
    for (auto it = out.begin(); it != out.end();) it = (it->second == 0) ? out.erase(it) : std::next(it);
    return out;
  }

  ComplexQ cx() const {
    GradedMap d(space, space, 1);
    std::map<int, MatBuilder> bld;
    for (auto& [deg, k] : space.dims) bld.emplace(deg, MatBuilder(space.dim(deg + 1), k));
    for (auto& [deg, ms] : basis)
      for (int col = 0; col < static_cast<int>(ms.size()); ++col)
        for (auto& [m, c] : differential(ms[static_cast<size_t>(col)]))
          bld.at(deg).add(mono_index(m), col, c);
    for (auto& [deg, b] : bld) d.set_block(deg, b.build());
    return ComplexQ(space, d);
  }

 private:
  mutable std::map<Word, Elem> nf_cache_;
};

namespace detail {

inline void enumerate_pbw(const DGLA& a, int len, size_t depth, int min_next, TruncEnvelope::Word& cur,
                          std::vector<TruncEnvelope::Word>& out) {
  if (depth == static_cast<size_t>(len)) {
    out.push_back(cur);
    return;
  }
  for (int gi = min_next; gi < a.space().global_dim(); ++gi) {
    if (!cur.empty() && gi == cur.back() && a.degree_of(gi) % 2 != 0) continue;
    cur.push_back(gi);
    enumerate_pbw(a, len, depth + 1, gi, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline TruncEnvelope env_truncated(const DGLA& a, int cap) {
  TruncEnvelope env;
  env.a = a;
  env.cap = cap;
  for (int len = 0; len <= cap; ++len) {
    std::vector<TruncEnvelope::Word> ws;
    TruncEnvelope::Word cur;
    detail::enumerate_pbw(a, len, 0, 0, cur, ws);
    std::sort(ws.begin(), ws.end());
    for (auto& w : ws) {
      int deg = env.word_degree(w);
      env.index[deg][w] = static_cast<int>(env.basis[deg].size());
      env.basis[deg].push_back(w);
    }
  }
  for (auto& [deg, ms] : env.basis) env.space.dims[deg] = static_cast<int>(ms.size());
  env.space.prune();
  for (auto& [deg, ms] : env.basis) {
    std::vector<int> counts(static_cast<size_t>(cap) + 1, 0);
    for (auto& m : ms)
      for (int l = static_cast<int>(m.size()); l <= cap; ++l) counts[static_cast<size_t>(l)] += 1;
    env.length_counts[deg] = counts;
  }
  return env;
}

// The truncated envelope as a unital coalgebra datum (unit = the empty
// word, filtration = word length).
inline UnitalCoalgebra env_as_coalgebra(const TruncEnvelope& env) {
  UnitalCoalgebra a;
  a.cx = env.cx();
  int n = a.cx.space.global_dim();
  a.delta.assign(static_cast<size_t>(n), {});
  a.counit = qvec_zero(n);
  a.filt.assign(static_cast<size_t>(n), 0);
  for (auto& [deg, ms] : env.basis)
    for (int i = 0; i < static_cast<int>(ms.size()); ++i) {
      const TruncEnvelope::Word& w = ms[static_cast<size_t>(i)];
      int gi = a.cx.space.global_index(deg, i);
      a.filt[static_cast<size_t>(gi)] = static_cast<int>(w.size());
      if (w.empty()) {
        a.unit_index = gi;
        a.counit[static_cast<size_t>(gi)] = 1;
      }
      for (auto& t : env.comult(w)) {
        if (t.sign == 0) continue;
        int dl = env.word_degree(t.left), dr = env.word_degree(t.right);
        a.delta[static_cast<size_t>(gi)].push_back({a.cx.space.global_index(dl, env.index.at(dl).at(t.left)),
                                                    a.cx.space.global_index(dr, env.index.at(dr).at(t.right)),
                                                    Rat(t.sign)});
      }
    }
  return a;
}

// ---------------------------------------------------------------------------
// Cone of an ideal inclusion, with its canonical projections

struct ConeDGLA {
  DGLA h, g;
  GradedMap incl;  // i: h -> g
  DGLA cone;       // underlying space h[1] (+) g
  GradedMap phi;   // cone -> h, degree +1 (chain map onto h[1])
  GradedMap theta; // cone -> g, degree 0 (graded Lie map, not a chain map)

  // basis layout per cone degree n: h^{n+1} block first, then g^n block
  int h_offset(int n) const { return 0; }
  int g_offset(int n) const { return h.space().dim(n + 1); }
};

// Pull a vector of g back along the inclusion; the ideal condition
// guarantees solvability wherever this is used.
inline QVec pull_back(const GradedMap& incl, int hdeg, const QVec& g_value) {
  auto sol = exactla::solve(incl.block(hdeg), g_value);
  if (!sol) throw NotAnIdeal("value does not lie in the embedded ideal");
  return *sol;
}

inline ConeDGLA cone_dgla(const DGLA& h, const GradedMap& incl, const DGLA& g) {
  if (incl.degree != 0 || incl.source != h.space() || incl.target != g.space())
    throw ShapeMismatch("cone: inclusion shape");
  if (!is_chain_map(h.cx, g.cx, incl)) throw NotAnIdeal("inclusion is not a chain map");
  for (auto& [deg, k] : h.space().dims)
    if (exactla::row_space(incl.block(deg)).rank() != k) throw NotAnIdeal("inclusion is not injective");
  // i is a Lie map and lands on an ideal
  for (int hi = 0; hi < h.space().global_dim(); ++hi)
    for (int hj = 0; hj < h.space().global_dim(); ++hj) {
      auto [p, a] = h.space().from_global(hi);
      auto [q, b] = h.space().from_global(hj);
      QVec lhs = g.bra(p, incl.apply(p, qvec_unit(h.space().dim(p), a)), q,
                       incl.apply(q, qvec_unit(h.space().dim(q), b)));
      QVec rhs = incl.apply(p + q, h.bra(p, qvec_unit(h.space().dim(p), a), q, qvec_unit(h.space().dim(q), b)));
      if (lhs != rhs) throw NotAnIdeal("inclusion is not a morphism of Lie algebras");
    }
  for (int gi = 0; gi < g.space().global_dim(); ++gi)
    for (int hj = 0; hj < h.space().global_dim(); ++hj) {
      auto [p, a] = g.space().from_global(gi);
      auto [q, b] = h.space().from_global(hj);
      QVec br = g.bra(p, qvec_unit(g.space().dim(p), a), q, incl.apply(q, qvec_unit(h.space().dim(q), b)));
      if (!exactla::solve(incl.block(p + q), br)) throw NotAnIdeal("[g, i(h)] leaves i(h)");
    }

  ConeDGLA c;
  c.h = h;
  c.g = g;
  c.incl = incl;
  GradedSpace space;
  for (int n = std::min(h.space().min_degree() - 1, g.space().min_degree());
       n <= std::max(h.space().max_degree() - 1, g.space().max_degree()); ++n) {
    int k = h.space().dim(n + 1) + g.space().dim(n);
    if (k) space.dims[n] = k;
  }
  DGLA cone;
  cone.cx = ComplexQ(space);
  GradedMap d(space, space, 1);
  for (auto& [n, k] : space.dims) {
    MatBuilder b(space.dim(n + 1), k);
    int hs = h.space().dim(n + 1), gs = g.space().dim(n);
    int ht = h.space().dim(n + 2);
    // h part: eta |-> (-d_h eta, i(eta))
    for (const Triple& t : h.cx.d.block(n + 1).entries()) b.add(t.row, t.col, -t.val);
    for (const Triple& t : incl.block(n + 1).entries()) b.add(ht + t.row, t.col, t.val);
    // g part: gamma |-> (0, d_g gamma)
    for (const Triple& t : g.cx.d.block(n).entries()) b.add(ht + t.row, hs + t.col, t.val);
    (void)gs;
    d.set_block(n, b.build());
  }
  cone.cx = ComplexQ(space, d);

  // bracket per components; pull adjoint values back into h
  for (auto& [p, kp] : space.dims)
    for (auto& [q, kq] : space.dims) {
      int hp = h.space().dim(p + 1), hq = h.space().dim(q + 1);
      for (int ai = 0; ai < kp; ++ai)
        for (int bi = 0; bi < kq; ++bi) {
          bool a_is_h = ai < hp, b_is_h = bi < hq;
          if (a_is_h && b_is_h) continue;
          if (!a_is_h && !b_is_h) {
            QVec br = g.bra(p, qvec_unit(g.space().dim(p), ai - hp), q, qvec_unit(g.space().dim(q), bi - hq));
            for (int t = 0; t < static_cast<int>(br.size()); ++t)
              if (br[static_cast<size_t>(t)] != 0)
                cone.set_bracket_entry(p, ai, q, bi, h.space().dim(p + q + 1) + t, br[static_cast<size_t>(t)]);
          } else if (a_is_h) {
            // [(eta,0),(0,gamma)] = ([eta,gamma], 0)
            QVec br = g.bra(p + 1, incl.apply(p + 1, qvec_unit(hp, ai)), q, qvec_unit(g.space().dim(q), bi - hq));
            QVec hb = pull_back(incl, p + q + 1, br);
            for (int t = 0; t < static_cast<int>(hb.size()); ++t)
              if (hb[static_cast<size_t>(t)] != 0) cone.set_bracket_entry(p, ai, q, bi, t, hb[static_cast<size_t>(t)]);
          } else {
            // [(0,gamma),(eta,0)] = ((-1)^{|gamma|}[gamma,eta], 0)
            QVec br = g.bra(p, qvec_unit(g.space().dim(p), ai - hp), q + 1, incl.apply(q + 1, qvec_unit(hq, bi)));
            QVec hb = pull_back(incl, p + q + 1, br);
            Rat sign(koszul::sign_pow(p));
            for (int t = 0; t < static_cast<int>(hb.size()); ++t)
              if (hb[static_cast<size_t>(t)] != 0)
                cone.set_bracket_entry(p, ai, q, bi, t, sign * hb[static_cast<size_t>(t)]);
          }
        }
    }
  cone.finalize_brackets();
  c.cone = cone;

  GradedMap phi(space, h.space(), 1), theta(space, g.space(), 0);
  for (auto& [n, k] : space.dims) {
    int hs = h.space().dim(n + 1);
    MatBuilder bp(h.space().dim(n + 1), k), bt(g.space().dim(n), k);
    for (int i = 0; i < hs; ++i) bp.add(i, i, Rat(1));
    for (int i = hs; i < k; ++i) bt.add(i - hs, i, Rat(1));
    phi.set_block(n, bp.build());
    theta.set_block(n, bt.build());
  }
  c.phi = phi;
  c.theta = theta;

  AxiomReport rep = check_dgla(c.cone);
  if (!rep.pass) throw AxiomFailure("cone is not a dg Lie algebra: " + rep.str());
  // d theta = -i phi
  if (dmap(c.cone.cx, g.cx, theta) != compose(incl, phi).scaled(Rat(-1)))
    throw AxiomFailure("d(theta) != -i(phi) on the cone");
  return c;
}

// ---------------------------------------------------------------------------
// Connecting morphism

// c_1: F_N U(cone) -> h[1], by the recursion c_1(x u) = (-1)^{|x|} [theta(x), c_1(u)].
inline GradedMap connecting_c1(const ConeDGLA& cone, const TruncEnvelope& env) {
  const DGLA& h = cone.h;
  GradedMap c1(env.space, h.space(), 1);
  std::map<int, MatBuilder> bld;
  for (auto& [deg, k] : env.space.dims) bld.emplace(deg, MatBuilder(h.space().dim(deg + 1), k));
  // evaluate the recursion on a word of cone generators
  std::function<QVec(const TruncEnvelope::Word&)> eval = [&](const TruncEnvelope::Word& w) -> QVec {
    int deg = env.word_degree(w);
    if (w.empty()) return qvec_zero(h.space().dim(1));
    auto [p, idx] = cone.cone.space().from_global(w[0]);
    if (w.size() == 1) return cone.phi.apply(p, qvec_unit(cone.cone.space().dim(p), idx));
    TruncEnvelope::Word rest(w.begin() + 1, w.end());
    QVec tail = eval(rest);
    int tail_deg = env.word_degree(rest) + 1;
    QVec th = cone.theta.apply(p, qvec_unit(cone.cone.space().dim(p), idx));
    QVec br = cone.g.bra(p, th, tail_deg, cone.incl.apply(tail_deg, tail));
    QVec hb = pull_back(cone.incl, deg + 1, br);
    Rat sign(koszul::sign_pow(p));
    for (Rat& x : hb) x *= sign;
    return hb;
  };
  for (auto& [deg, ms] : env.basis)
    for (int col = 0; col < static_cast<int>(ms.size()); ++col) {
      QVec v = eval(ms[static_cast<size_t>(col)]);
      for (int r = 0; r < static_cast<int>(v.size()); ++r)
        if (v[static_cast<size_t>(r)] != 0) bld.at(deg).add(r, col, v[static_cast<size_t>(r)]);
    }
  for (auto& [deg, b] : bld) c1.set_block(deg, b.build());
  return c1;
}

struct ConnectingMorphism {
  TruncEnvelope env;
  UnitalCoalgebra coalg;
  StandardComplex ce;
  GradedMap c1;
  CoalgebraLift c;
  bool chain_map = false;
  bool coalgebra_map = false;
  bool filtered = false;
};

// The full connecting morphism c: F_N U(cone) -> F_N C(h), obtained by
// lifting c_1. A nonzero Maurer-Cartan residual would be an internal error
// and is treated as fatal.
inline ConnectingMorphism connecting_c(const ConeDGLA& cone, int cap) {
  ConnectingMorphism out;
  out.env = env_truncated(cone.cone, cap);
  out.coalg = env_as_coalgebra(out.env);
  out.coalg.check();
  // full window for F_N C(h)
  int m1 = cone.h.space().min_degree() - 1, m2 = cone.h.space().max_degree() - 1;
  int lo = std::min({0, cap * m1, cap * m2}), hi = std::max({0, cap * m1, cap * m2});
  out.ce = ce_complex(cone.h, cap, lo, hi);
  out.c1 = connecting_c1(cone, out.env);
  out.c = coalgebra_lift(out.coalg, cone.h, out.c1, out.ce);

  out.chain_map = is_chain_map(out.coalg.cx, out.ce.cx, out.c.f);
  // coalgebra map: Delta(c(w)) = (c tensor c)(Delta(w)) on basis monomials
  out.coalgebra_map = true;
  for (auto& [deg, ms] : out.env.basis)
    for (int col = 0; col < static_cast<int>(ms.size()); ++col) {
      const TruncEnvelope::Word& w = ms[static_cast<size_t>(col)];
      std::map<std::pair<Mono, Mono>, Rat> lhs, rhs;
      QVec img = out.c.f.apply(deg, qvec_unit(out.env.space.dim(deg), col));
      for (int r = 0; r < static_cast<int>(img.size()); ++r) {
        if (img[static_cast<size_t>(r)] == 0) continue;
        const Mono& mono = out.ce.basis.at(deg)[static_cast<size_t>(r)];
        for (auto& t : out.ce.comult(mono))
          if (t.sign) lhs[{t.left, t.right}] += img[static_cast<size_t>(r)] * Rat(t.sign);
      }
      for (auto& t : out.env.comult(w)) {
        if (!t.sign) continue;
        int dl = out.env.word_degree(t.left), dr = out.env.word_degree(t.right);
        QVec vl = out.c.f.apply(dl, qvec_unit(out.env.space.dim(dl), out.env.index.at(dl).at(t.left)));
        QVec vr = out.c.f.apply(dr, qvec_unit(out.env.space.dim(dr), out.env.index.at(dr).at(t.right)));
        for (int rl = 0; rl < static_cast<int>(vl.size()); ++rl) {
          if (vl[static_cast<size_t>(rl)] == 0) continue;
          for (int rr = 0; rr < static_cast<int>(vr.size()); ++rr) {
            if (vr[static_cast<size_t>(rr)] == 0) continue;
            rhs[{out.ce.basis.at(dl)[static_cast<size_t>(rl)], out.ce.basis.at(dr)[static_cast<size_t>(rr)]}] +=
                Rat(t.sign) * vl[static_cast<size_t>(rl)] * vr[static_cast<size_t>(rr)];
          }
        }
      }
      for (auto it = lhs.begin(); it != lhs.end();) it = (it->second == 0) ? lhs.erase(it) : std::next(it);
      for (auto it = rhs.begin(); it != rhs.end();) it = (it->second == 0) ? rhs.erase(it) : std::next(it);
      if (lhs != rhs) out.coalgebra_map = false;
    }
  // filtration: a length-l monomial maps into arities <= l
  out.filtered = true;
  for (auto& [deg, ms] : out.env.basis)
    for (int col = 0; col < static_cast<int>(ms.size()); ++col) {
      QVec img = out.c.f.apply(deg, qvec_unit(out.env.space.dim(deg), col));
      for (int r = 0; r < static_cast<int>(img.size()); ++r)
        if (img[static_cast<size_t>(r)] != 0 &&
            static_cast<int>(out.ce.basis.at(deg)[static_cast<size_t>(r)].size()) >
                static_cast<int>(ms[static_cast<size_t>(col)].size()))
          out.filtered = false;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Schur polynomials: exp(sum alpha_p t^p / p!) = sum P_n t^n / n!

struct SchurPoly {
  // exponent vector (n_1, ..., n_s) over alpha_1..alpha_s -> coefficient
  std::map<std::vector<int>, Rat> terms;
};

inline SchurPoly schur(int n) {
  SchurPoly p;
  if (n == 0) {
    p.terms[{}] = 1;
    return p;
  }
  Rat nfact(1);
  for (int k = 2; k <= n; ++k) nfact *= k;
  // enumerate (n_1,...,n_s) with sum j*n_j = n
  std::vector<int> part(static_cast<size_t>(n) + 1, 0);
  std::function<void(int, int)> rec = [&](int j, int remaining) {
    if (remaining == 0) {
      std::vector<int> expo;
      int top = 0;
      for (int t = 1; t <= n; ++t)
        if (part[static_cast<size_t>(t)]) top = t;
      for (int t = 1; t <= top; ++t) expo.push_back(part[static_cast<size_t>(t)]);
      Rat denom(1);
      for (int t = 1; t <= n; ++t) {
        Rat tf(1);
        for (int k = 2; k <= t; ++k) tf *= k;
        for (int r = 0; r < part[static_cast<size_t>(t)]; ++r) denom *= tf;
        Rat cf(1);
        for (int k = 2; k <= part[static_cast<size_t>(t)]; ++k) cf *= k;
        denom *= cf;
      }
      p.terms[expo] = nfact / denom;
      return;
    }
    if (j > remaining) return;
    for (int cnt = 0; cnt * j <= remaining; ++cnt) {
      part[static_cast<size_t>(j)] = cnt;
      rec(j + 1, remaining - cnt * j);
    }
    part[static_cast<size_t>(j)] = 0;
  };
  rec(1, n);
  return p;
}

}  // namespace dglhom
