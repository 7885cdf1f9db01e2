#pragma once

#include <algorithm>

#include "dglhom/tensor.hpp"

namespace dglhom {

enum class PowerKind { Symmetric, Exterior };

// In a symmetric power a basis vector may repeat only in even degree
// (odd squares die in coinvariants over Q); in an exterior power only in
// odd degree.
inline bool power_repeat_ok(PowerKind k, int degree) {
  return (k == PowerKind::Symmetric) ? degree % 2 == 0 : degree % 2 != 0;
}

// S^n(C) or Lambda^n(C) as (anti)coinvariants of the Koszul-signed
// symmetric group action on T^n(C). Monomials are nondecreasing slot
// tuples; projection and section realize the canonical splitting.
struct PowerComplex {
  ComplexQ base;
  int n = 0;
  PowerKind kind = PowerKind::Symmetric;

  using Mono = Tensor::Word;  // sorted (degree, index) tuples
  std::map<int, std::vector<Mono>> basis;
  std::map<int, std::map<Mono, int>> index;
  ComplexQ cx;

  int mono_index(int degree, const Mono& m) const {
    auto it = index.find(degree);
    if (it == index.end()) throw ShapeMismatch("power: no such degree");
    auto jt = it->second.find(m);
    if (jt == it->second.end()) throw ShapeMismatch("power: no such monomial");
    return jt->second;
  }

  // Projection of a slot tuple: 0 or +-monomial.
  std::pair<int, Mono> normalize(Mono w) const {
    std::vector<std::pair<std::pair<int, int>, int>> keyed;
    for (auto& s : w) keyed.push_back({s, s.first});
    int sign = koszul::sort_sign(keyed, kind == PowerKind::Exterior);
    Mono out;
    for (auto& [slot, deg] : keyed) out.push_back(slot);
    for (size_t i = 1; i < out.size(); ++i)
      if (out[i] == out[i - 1] && !power_repeat_ok(kind, out[i].first)) return {0, {}};
    return {sign, out};
  }
};

namespace detail {

inline void enumerate_monos(const ComplexQ& c, PowerKind kind, int n, size_t depth, PowerComplex::Mono& cur,
                            std::vector<PowerComplex::Mono>& out) {
  if (depth == static_cast<size_t>(n)) {
    out.push_back(cur);
    return;
  }
  // slots nondecreasing in (degree, index)
  std::pair<int, int> lo = cur.empty() ? std::pair<int, int>{INT32_MIN, 0} : cur.back();
  for (auto& [d, k] : c.space.dims) {
    if (d < lo.first) continue;
    for (int i = 0; i < k; ++i) {
      std::pair<int, int> slot{d, i};
      if (slot < lo) continue;
      if (!cur.empty() && slot == cur.back() && !power_repeat_ok(kind, d)) continue;
      cur.push_back(slot);
      enumerate_monos(c, kind, n, depth + 1, cur, out);
      cur.pop_back();
    }
  }
}

}  // namespace detail

inline PowerComplex power(const ComplexQ& c, int n, PowerKind kind) {
  PowerComplex p;
  p.base = c;
  p.n = n;
  p.kind = kind;
  std::vector<PowerComplex::Mono> monos;
  PowerComplex::Mono cur;
  detail::enumerate_monos(c, kind, n, 0, cur, monos);
  for (auto& m : monos) {
    int deg = Tensor::word_degree(m);
    p.index[deg][m] = static_cast<int>(p.basis[deg].size());
    p.basis[deg].push_back(m);
  }
  GradedSpace space;
  for (auto& [deg, ms] : p.basis) space.dims[deg] = static_cast<int>(ms.size());
  space.prune();
  GradedMap d(space, space, 1);
  std::map<int, MatBuilder> builders;
  for (auto& [deg, ms] : p.basis) builders.emplace(deg, MatBuilder(space.dim(deg + 1), space.dim(deg)));
  for (auto& [deg, ms] : p.basis) {
    auto& bld = builders.at(deg);
    for (int col = 0; col < static_cast<int>(ms.size()); ++col) {
      const PowerComplex::Mono& m = ms[static_cast<size_t>(col)];
      std::vector<int> degs;
      for (auto& [dd, ii] : m) degs.push_back(dd);
      for (size_t s = 0; s < m.size(); ++s) {
        int pre = koszul::prefix_sign(degs, s);
        const SparseMatrix& blk = c.d.block(m[s].first);
        for (const Triple& e : blk.entries()) {
          if (e.col != m[s].second) continue;
          PowerComplex::Mono m2 = m;
          m2[s] = {m[s].first + 1, e.row};
          auto [sg, norm] = p.normalize(m2);
          if (sg == 0) continue;
          bld.add(p.mono_index(deg + 1, norm), col, Rat(pre * sg) * e.val);
        }
      }
    }
  }
  for (auto& [deg, bld] : builders) d.set_block(deg, bld.build());
  p.cx = ComplexQ(space, d);
  return p;
}

// pi: T^n -> S^n/Lambda^n.
inline GradedMap power_projection(const PowerComplex& p, const Tensor& tn) {
  GradedMap f(tn.cx.space, p.cx.space, 0);
  std::map<int, MatBuilder> builders;
  for (auto& [deg, ws] : tn.basis) builders.emplace(deg, MatBuilder(p.cx.space.dim(deg), static_cast<int>(ws.size())));
  for (auto& [deg, ws] : tn.basis)
    for (int col = 0; col < static_cast<int>(ws.size()); ++col) {
      auto [sg, norm] = p.normalize(ws[static_cast<size_t>(col)]);
      if (sg == 0) continue;
      builders.at(deg).add(p.mono_index(deg, norm), col, Rat(sg));
    }
  for (auto& [deg, bld] : builders) f.set_block(deg, bld.build());
  return f;
}

// The canonical section i: S^n/Lambda^n -> T^n averaging over the signed
// orbit; pi o i = id.
inline GradedMap power_section(const PowerComplex& p, const Tensor& tn) {
  GradedMap f(p.cx.space, tn.cx.space, 0);
  Rat inv_fact(1);
  for (int k = 2; k <= p.n; ++k) inv_fact /= k;
  std::map<int, MatBuilder> builders;
  for (auto& [deg, ms] : p.basis) builders.emplace(deg, MatBuilder(tn.cx.space.dim(deg), static_cast<int>(ms.size())));
  for (auto& [deg, ms] : p.basis)
    for (int col = 0; col < static_cast<int>(ms.size()); ++col) {
      const PowerComplex::Mono& m = ms[static_cast<size_t>(col)];
      std::vector<int> perm(m.size());
      for (size_t i = 0; i < m.size(); ++i) perm[i] = static_cast<int>(i);
      std::sort(perm.begin(), perm.end());
      do {
        // sign of acting with this permutation on the sorted tuple
        std::vector<std::pair<int, int>> keyed;  // (position in target, degree)
        for (size_t i = 0; i < m.size(); ++i) keyed.push_back({perm[i], m[i].first});
        int sg = koszul::sort_sign(keyed, p.kind == PowerKind::Exterior);
        Tensor::Word w(m.size(), {0, 0});
        for (size_t i = 0; i < m.size(); ++i) w[static_cast<size_t>(perm[i])] = m[i];
        builders.at(deg).add(tn.word_index(deg, w), col, Rat(sg) * inv_fact);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  for (auto& [deg, bld] : builders) f.set_block(deg, bld.build());
  return f;
}

// Decalage S^n(C[1]) -> Lambda^n(C)[n]: bijective degree-zero chain map.
// sym is power(shift(C,1), n, Symmetric); ext is power(C, n, Exterior).
inline GradedMap decalage(const PowerComplex& sym, const PowerComplex& ext) {
  if (sym.kind != PowerKind::Symmetric || ext.kind != PowerKind::Exterior) throw ShapeMismatch("decalage kinds");
  ComplexQ target = shift(ext.cx, ext.n);
  GradedMap f(sym.cx.space, target.space, 0);
  std::map<int, MatBuilder> builders;
  for (auto& [deg, ms] : sym.basis) builders.emplace(deg, MatBuilder(target.space.dim(deg), static_cast<int>(ms.size())));
  for (auto& [deg, ms] : sym.basis)
    for (int col = 0; col < static_cast<int>(ms.size()); ++col) {
      PowerComplex::Mono unshifted = ms[static_cast<size_t>(col)];
      std::vector<int> xdegs;
      for (auto& s : unshifted) {
        s.first += 1;  // degree in C
        xdegs.push_back(s.first);
      }
      int row = ext.mono_index(deg + ext.n, unshifted);
      builders.at(deg).add(row, col, Rat(koszul::decalage_sign(xdegs)));
    }
  for (auto& [deg, bld] : builders) f.set_block(deg, bld.build());
  return f;
}

}  // namespace dglhom
