#pragma once

#include "dglhom/envelope.hpp"
#include "dglhom/weil.hpp"

namespace dglhom {

// Dg Lie algebroid over a Weil base: a free O-module on graded generators,
// an O-linear anchor into the derivations, bracket structure constants
// with O-coefficients, and an optional differential. Kernel generators
// (anchor zero) come first in the generator order.
struct Algebroid {
  WeilBase base;
  struct Gen {
    std::string name;
    int degree = 0;
    bool kernel = true;
  };
  std::vector<Gen> gens;
  std::vector<std::vector<QVec>> anchor;  // [gen][var] -> O-element
  std::map<std::pair<int, int>, std::vector<std::pair<int, QVec>>> bracket;  // (i,j) -> (k, O-coeff)
  std::map<int, std::vector<std::pair<int, QVec>>> diff;                     // i -> (k, O-coeff)

  int rank() const { return static_cast<int>(gens.size()); }
  int kernel_rank() const {
    int k = 0;
    for (auto& g : gens)
      if (g.kernel) ++k;
    return k;
  }

  const std::vector<std::pair<int, QVec>>& bra(int i, int j) const {
    static const std::vector<std::pair<int, QVec>> empty;
    auto it = bracket.find({i, j});
    return it == bracket.end() ? empty : it->second;
  }
  const std::vector<std::pair<int, QVec>>& d_of(int i) const {
    static const std::vector<std::pair<int, QVec>> empty;
    auto it = diff.find(i);
    return it == diff.end() ? empty : it->second;
  }

  // pi(gen_i)(f)
  QVec anchor_apply(int i, const QVec& f, Validity& v) const {
    QVec out = qvec_zero(base.dim());
    for (int p = 0; p < base.vars; ++p) {
      if (is_zero(anchor[static_cast<size_t>(i)][static_cast<size_t>(p)])) continue;
      QVec df = base.derive(p, f);
      QVec term = base.mul(anchor[static_cast<size_t>(i)][static_cast<size_t>(p)], df, v);
      out += term;
    }
    return out;
  }

  bool gen_has_anchor(int i) const {
    for (int p = 0; p < base.vars; ++p)
      if (!is_zero(anchor[static_cast<size_t>(i)][static_cast<size_t>(p)])) return true;
    return false;
  }
};

// O-linear combinations of generators: gen index -> O-element.
using OSection = std::map<int, QVec>;

inline OSection osec_scale(const WeilBase& w, const QVec& f, const OSection& s, Validity& v) {
  OSection out;
  for (auto& [g, c] : s) {
    QVec fc = w.mul(f, c, v);
    if (!is_zero(fc)) out[g] = fc;
  }
  return out;
}

inline void osec_add(OSection& a, const OSection& b, const Rat& scale = Rat(1)) {
  for (auto& [g, c] : b) {
    auto it = a.find(g);
    if (it == a.end()) it = a.emplace(g, qvec_zero(static_cast<int>(c.size()))).first;
    for (size_t t = 0; t < c.size(); ++t) it->second[t] += scale * c[t];
  }
  for (auto it = a.begin(); it != a.end();) it = is_zero(it->second) ? a.erase(it) : std::next(it);
}

// Bracket of O-sections with the twisted Leibniz extension
// [f a, g b] = fg [a,b] + f pi(a)(g) b - (-1)^{|a||b|} g pi(b)(f) a.
inline OSection osec_bracket(const Algebroid& A, const OSection& x, const OSection& y, Validity& v) {
  OSection out;
  for (auto& [i, f] : x)
    for (auto& [j, g] : y) {
      QVec fg = A.base.mul(f, g, v);
      for (auto& [k, c] : A.bra(i, j)) {
        OSection t{{k, A.base.mul(fg, c, v)}};
        osec_add(out, t);
      }
      QVec pf = A.anchor_apply(i, g, v);
      if (!is_zero(pf)) {
        OSection t{{j, A.base.mul(f, pf, v)}};
        osec_add(out, t);
      }
      QVec pg = A.anchor_apply(j, f, v);
      if (!is_zero(pg)) {
        OSection t{{i, A.base.mul(g, pg, v)}};
        osec_add(out, t, Rat(-koszul::swap_sign(A.gens[static_cast<size_t>(i)].degree,
                                                A.gens[static_cast<size_t>(j)].degree)));
      }
    }
  return out;
}

inline OSection osec_d(const Algebroid& A, const OSection& x, Validity& v) {
  OSection out;
  for (auto& [i, f] : x)
    for (auto& [k, c] : A.d_of(i)) {
      OSection t{{k, A.base.mul(f, c, v)}};
      osec_add(out, t);
    }
  return out;
}

// anchor of a section, as a vector of O-elements over the partials
inline std::vector<QVec> osec_anchor(const Algebroid& A, const OSection& x, Validity& v) {
  std::vector<QVec> out(static_cast<size_t>(A.base.vars), qvec_zero(A.base.dim()));
  for (auto& [i, f] : x)
    for (int p = 0; p < A.base.vars; ++p) {
      QVec t = A.base.mul(f, A.anchor[static_cast<size_t>(i)][static_cast<size_t>(p)], v);
      out[static_cast<size_t>(p)] += t;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Axiom checking. Axiom instances whose evaluation truncates are outside
// the validity degree and are skipped (counted, not failed).

struct AlgebroidReport {
  bool pass = true;
  int skipped_by_validity = 0;
  std::vector<AxiomViolation> violations;
  void fail(std::string axiom, std::vector<int> witness) {
    pass = false;
    violations.push_back({std::move(axiom), std::move(witness), ""});
  }
  std::string str() const {
    AxiomReport r;
    r.pass = pass;
    r.violations = violations;
    return r.str();
  }
};

inline AlgebroidReport check_algebroid(const Algebroid& A) {
  AlgebroidReport rep;
  int r = A.rank(), od = A.base.dim();
  // generators ordered by (degree, kernel flag): kernel part first
  for (int i = 0; i + 1 < r; ++i)
    if (A.gens[static_cast<size_t>(i)].degree > A.gens[static_cast<size_t>(i + 1)].degree)
      throw ShapeMismatch("algebroid generators must be sorted by degree");
  // kernel generators have zero anchor
  for (int i = 0; i < r; ++i)
    if (A.gens[static_cast<size_t>(i)].kernel && A.gen_has_anchor(i)) rep.fail("kernel-anchor", {i});

  auto osec_gen = [&](int i, int mono) {
    OSection s;
    s[i] = qvec_unit(od, mono);
    return s;
  };

  // skew and O-Jacobi on monomial sections within validity
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j) {
      Validity v;
      OSection lhs = osec_bracket(A, osec_gen(i, 0), osec_gen(j, 0), v);
      OSection rhs = osec_bracket(A, osec_gen(j, 0), osec_gen(i, 0), v);
      osec_add(lhs, rhs, Rat(koszul::swap_sign(A.gens[static_cast<size_t>(i)].degree,
                                               A.gens[static_cast<size_t>(j)].degree)));
      if (!v.truncated && !lhs.empty()) rep.fail("skew", {i, j});
      if (v.truncated) ++rep.skipped_by_validity;
    }
  for (int i = 0; i < r; ++i)
    for (int mi = 0; mi < od; ++mi)
      for (int j = i; j < r; ++j)
        for (int mj = (j == i ? mi : 0); mj < od; ++mj)
          for (int k = j; k < r; ++k)
            for (int mk = (k == j ? mj : 0); mk < od; ++mk) {
              Validity v;
              int di = A.gens[static_cast<size_t>(i)].degree, dj = A.gens[static_cast<size_t>(j)].degree,
                  dk = A.gens[static_cast<size_t>(k)].degree;
              OSection x = osec_gen(i, mi), y = osec_gen(j, mj), z = osec_gen(k, mk);
              OSection acc = osec_bracket(A, x, osec_bracket(A, y, z, v), v);
              osec_add(acc, osec_bracket(A, y, osec_bracket(A, z, x, v), v),
                       Rat(koszul::sign_pow(static_cast<long>(di) * (dj + dk))));
              osec_add(acc, osec_bracket(A, z, osec_bracket(A, x, y, v), v),
                       Rat(koszul::sign_pow(static_cast<long>(dk) * (di + dj))));
              if (v.truncated) {
                ++rep.skipped_by_validity;
                continue;
              }
              if (!acc.empty()) rep.fail("jacobi", {i, mi, j, mj, k, mk});
            }
  // Leibniz for the differential
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Validity v;
      OSection acc = osec_d(A, osec_bracket(A, osec_gen(i, 0), osec_gen(j, 0), v), v);
      osec_add(acc, osec_bracket(A, osec_d(A, osec_gen(i, 0), v), osec_gen(j, 0), v), Rat(-1));
      osec_add(acc, osec_bracket(A, osec_gen(i, 0), osec_d(A, osec_gen(j, 0), v), v),
               Rat(-koszul::sign_pow(A.gens[static_cast<size_t>(i)].degree)));
      if (v.truncated) {
        ++rep.skipped_by_validity;
        continue;
      }
      if (!acc.empty()) rep.fail("leibniz", {i, j});
    }
  // d^2 = 0
  for (int i = 0; i < r; ++i) {
    Validity v;
    OSection acc = osec_d(A, osec_d(A, osec_gen(i, 0), v), v);
    if (!v.truncated && !acc.empty()) rep.fail("d-squared", {i});
  }
  // the anchor is a morphism of Lie algebras into the derivations:
  // pi([x,y])(f) = pi(x)(pi(y)(f)) - (-1)^{|x||y|} pi(y)(pi(x)(f))
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int mf = 0; mf < od; ++mf) {
        Validity v;
        QVec f = qvec_unit(od, mf);
        OSection br = osec_bracket(A, osec_gen(i, 0), osec_gen(j, 0), v);
        QVec lhs = qvec_zero(od);
        for (auto& [k, c] : br) {
          OSection one{{k, c}};
          // pi(c * gen_k)(f) = c * pi(gen_k)(f)
          QVec t = A.base.mul(c, A.anchor_apply(k, f, v), v);
          lhs += t;
        }
        QVec rhs = A.anchor_apply(i, A.anchor_apply(j, f, v), v);
        QVec rhs2 = A.anchor_apply(j, A.anchor_apply(i, f, v), v);
        int sg = koszul::swap_sign(A.gens[static_cast<size_t>(i)].degree, A.gens[static_cast<size_t>(j)].degree);
        for (size_t t = 0; t < rhs.size(); ++t) rhs[t] -= Rat(sg) * rhs2[t];
        if (v.truncated) {
          ++rep.skipped_by_validity;
          continue;
        }
        if (lhs != rhs) rep.fail("anchor-lie", {i, j, mf});
      }
  // pi o d = 0 (the tangent module sits in degree 0 with zero differential)
  for (int i = 0; i < r; ++i) {
    Validity v;
    std::vector<QVec> a = osec_anchor(A, osec_d(A, osec_gen(i, 0), v), v);
    bool nonzero = false;
    for (auto& c : a)
      if (!is_zero(c)) nonzero = true;
    if (!v.truncated && nonzero) rep.fail("anchor-chain", {i});
  }
  // kernel span really is ker(pi): rank of the anchor on non-kernel
  // generators must be full
  {
    Validity v;
    MatBuilder b(A.base.dim() * A.base.vars, A.rank() * A.base.dim());
    for (int i = 0; i < r; ++i)
      for (int mo = 0; mo < od; ++mo) {
        std::vector<QVec> av = osec_anchor(A, osec_gen(i, mo), v);
        for (int p = 0; p < A.base.vars; ++p)
          for (int t = 0; t < od; ++t)
            if (av[static_cast<size_t>(p)][static_cast<size_t>(t)] != 0)
              b.add(p * od + t, i * od + mo, av[static_cast<size_t>(p)][static_cast<size_t>(t)]);
      }
    int anchor_rank = exactla::row_space(b.build()).rank();
    int expected = (A.rank() - A.kernel_rank()) * od;
    if (!v.truncated && anchor_rank != expected) rep.fail("kernel-span", {anchor_rank, expected});
  }
  return rep;
}

inline bool is_transitive(const Algebroid& A) {
  // the anchor hits every partial: with the free split this means exactly
  // m degree-zero non-kernel generators mapping onto the partials
  Validity v;
  MatBuilder b(A.base.dim() * A.base.vars, A.rank() * A.base.dim());
  int od = A.base.dim();
  for (int i = 0; i < A.rank(); ++i) {
    if (A.gens[static_cast<size_t>(i)].degree != 0) continue;
    for (int mo = 0; mo < od; ++mo) {
      OSection s{{i, qvec_unit(od, mo)}};
      std::vector<QVec> av = osec_anchor(A, s, v);
      for (int p = 0; p < A.base.vars; ++p)
        for (int t = 0; t < od; ++t)
          if (av[static_cast<size_t>(p)][static_cast<size_t>(t)] != 0)
            b.add(p * od + t, i * od + mo, av[static_cast<size_t>(p)][static_cast<size_t>(t)]);
    }
  }
  return exactla::row_space(b.build()).rank() == A.base.vars * od;
}

// The tangent algebroid T_O: generators are the partials themselves.
inline Algebroid tangent_algebroid(const WeilBase& w) {
  Algebroid a;
  a.base = w;
  for (int p = 0; p < w.vars; ++p) {
    Algebroid::Gen g;
    g.name = "d" + std::to_string(p + 1);
    g.degree = 0;
    g.kernel = false;
    a.gens.push_back(g);
  }
  a.anchor.assign(static_cast<size_t>(w.vars), std::vector<QVec>(static_cast<size_t>(w.vars), qvec_zero(w.dim())));
  for (int p = 0; p < w.vars; ++p) a.anchor[static_cast<size_t>(p)][static_cast<size_t>(p)] = w.one();
  return a;
}

}  // namespace dglhom
