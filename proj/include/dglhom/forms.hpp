#pragma once

#include <functional>

#include "dglhom/graded.hpp"

namespace dglhom {

// Polynomial differential forms on the p-simplex in the coordinates
// t_1..t_p (t_0 eliminated), truncated at polynomial-plus-form total
// degree <= cap. Basis monomials are t^a dt^alpha with alpha a bitmask.
struct FormAlgebra {
  int level = 0;
  int cap = 0;

  struct FMono {
    std::vector<int> a;
    unsigned alpha = 0;
  };
  std::vector<FMono> monos;                                  // ordered (form degree, a, alpha)
  std::map<std::pair<std::vector<int>, unsigned>, int> idx;  // (a, alpha) -> index
  std::map<int, std::vector<int>> by_degree;                 // form degree -> mono indices

  int dim() const { return static_cast<int>(monos.size()); }
  int form_degree(int i) const { return __builtin_popcount(monos[static_cast<size_t>(i)].alpha); }
  int total_degree(int i) const {
    int s = form_degree(i);
    for (int e : monos[static_cast<size_t>(i)].a) s += e;
    return s;
  }

  int index_of(const std::vector<int>& a, unsigned alpha) const {
    auto it = idx.find({a, alpha});
    return it == idx.end() ? -1 : it->second;
  }

  // sparse element: mono index -> coefficient
  using Elem = std::map<int, Rat>;
};

inline FormAlgebra form_algebra(int level, int cap) {
  if (level < 0 || cap < 0) throw ShapeMismatch("form algebra level/cap");
  FormAlgebra f;
  f.level = level;
  f.cap = cap;
  // enumerate alpha masks by popcount, then exponent vectors
  std::vector<std::pair<int, unsigned>> masks;
  for (unsigned m = 0; m < (1u << level); ++m) masks.push_back({__builtin_popcount(m), m});
  std::sort(masks.begin(), masks.end());
  for (auto& [n, mask] : masks) {
    if (n > cap) continue;
    std::vector<std::vector<int>> exps;
    std::vector<int> cur(static_cast<size_t>(level), 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == level) {
        exps.push_back(cur);
        return;
      }
      for (int e = 0; e <= left; ++e) {
        cur[static_cast<size_t>(pos)] = e;
        rec(pos + 1, left - e);
        cur[static_cast<size_t>(pos)] = 0;
      }
    };
    rec(0, cap - n);
    std::sort(exps.begin(), exps.end());
    for (auto& a : exps) {
      f.idx[{a, mask}] = f.dim();
      f.by_degree[n].push_back(f.dim());
      f.monos.push_back({a, mask});
    }
  }
  return f;
}

// de Rham differential d(t^a dt^alpha); total degree is preserved, so the
// truncation is exact.
inline FormAlgebra::Elem de_rham(const FormAlgebra& f, int mono) {
  FormAlgebra::Elem out;
  const auto& m = f.monos[static_cast<size_t>(mono)];
  for (int i = 0; i < f.level; ++i) {
    int e = m.a[static_cast<size_t>(i)];
    if (e == 0 || (m.alpha & (1u << i))) continue;
    std::vector<int> a = m.a;
    a[static_cast<size_t>(i)] -= 1;
    // dt_i moves into position: count the dt_j with j < i
    int cross = __builtin_popcount(m.alpha & ((1u << i) - 1));
    int id2 = f.index_of(a, m.alpha | (1u << i));
    if (id2 < 0) throw ShapeMismatch("de Rham left the truncation");
    out[id2] += Rat(koszul::sign_pow(cross) * e);
  }
  return out;
}

// wedge of two monomials, valued in a target algebra big enough to hold
// the product (zero when the dt masks overlap or the target misses it)
inline std::pair<int, Rat> wedge(const FormAlgebra& f1, int m1, const FormAlgebra& f2, int m2,
                                 const FormAlgebra& target) {
  const auto& a = f1.monos[static_cast<size_t>(m1)];
  const auto& b = f2.monos[static_cast<size_t>(m2)];
  if (a.alpha & b.alpha) return {-1, Rat(0)};
  std::vector<int> e(static_cast<size_t>(target.level), 0);
  for (int i = 0; i < f1.level; ++i) e[static_cast<size_t>(i)] += a.a[static_cast<size_t>(i)];
  for (int i = 0; i < f2.level; ++i) e[static_cast<size_t>(i)] += b.a[static_cast<size_t>(i)];
  // sign: each dt in b crosses the dts of a that sit at higher positions
  long crossings = 0;
  for (int j = 0; j < f2.level; ++j)
    if (b.alpha & (1u << j)) crossings += __builtin_popcount(a.alpha >> (j + 1));
  int id = target.index_of(e, a.alpha | b.alpha);
  if (id < 0) return {-1, Rat(0)};
  return {id, Rat(koszul::sign_pow(crossings))};
}

namespace detail {

// substitution images: t_j |-> polynomial (as Elem of the target at form
// degree 0), dt_j |-> 1-form
struct Subst {
  std::vector<FormAlgebra::Elem> t_img;   // per variable 1..level (0-indexed)
  std::vector<FormAlgebra::Elem> dt_img;
};

inline FormAlgebra::Elem elem_mul(const FormAlgebra& target, const FormAlgebra::Elem& x,
                                  const FormAlgebra::Elem& y) {
  FormAlgebra::Elem out;
  for (auto& [i, ci] : x)
    for (auto& [j, cj] : y) {
      auto [k, s] = wedge(target, i, target, j, target);
      if (k >= 0 && s != 0) out[k] += ci * cj * s;
    }
  for (auto it = out.begin(); it != out.end();) it = (it->second == 0) ? out.erase(it) : std::next(it);
  return out;
}

inline FormAlgebra::Elem apply_subst(const FormAlgebra& src, int mono, const Subst& sub, const FormAlgebra& target) {
  const auto& m = src.monos[static_cast<size_t>(mono)];
  FormAlgebra::Elem acc;
  acc[target.index_of(std::vector<int>(static_cast<size_t>(target.level), 0), 0)] = 1;
  for (int i = 0; i < src.level; ++i)
    for (int e = 0; e < m.a[static_cast<size_t>(i)]; ++e) acc = elem_mul(target, acc, sub.t_img[static_cast<size_t>(i)]);
  for (int i = 0; i < src.level; ++i)
    if (m.alpha & (1u << i)) acc = elem_mul(target, acc, sub.dt_img[static_cast<size_t>(i)]);
  return acc;
}

}  // namespace detail

// Simplicial face d_i: forms at level p -> level p-1, 0 <= i <= p.
inline SparseMatrix face_matrix(const FormAlgebra& src, const FormAlgebra& tgt, int i) {
  if (tgt.level != src.level - 1) throw ShapeMismatch("face target level");
  detail::Subst sub;
  auto zero = FormAlgebra::Elem{};
  auto var = [&](int j) {  // t_j in target, 1-indexed
    FormAlgebra::Elem e;
    std::vector<int> a(static_cast<size_t>(tgt.level), 0);
    a[static_cast<size_t>(j - 1)] = 1;
    e[tgt.index_of(a, 0)] = 1;
    return e;
  };
  auto dvar = [&](int j) {
    FormAlgebra::Elem e;
    std::vector<int> a(static_cast<size_t>(tgt.level), 0);
    e[tgt.index_of(a, 1u << (j - 1))] = 1;
    return e;
  };
  for (int j = 1; j <= src.level; ++j) {
    FormAlgebra::Elem tj, dtj;
    if (i == 0) {
      if (j == 1) {
        // t_1 -> 1 - sum t_k, dt_1 -> -sum dt_k
        std::vector<int> a(static_cast<size_t>(tgt.level), 0);
        tj[tgt.index_of(a, 0)] = 1;
        for (int k = 1; k <= tgt.level; ++k) {
          for (auto& [id, c] : var(k)) tj[id] -= c;
          for (auto& [id, c] : dvar(k)) dtj[id] -= c;
        }
      } else {
        tj = var(j - 1);
        dtj = dvar(j - 1);
      }
    } else {
      if (j < i) {
        tj = var(j);
        dtj = dvar(j);
      } else if (j == i) {
        tj = zero;
        dtj = zero;
      } else {
        tj = var(j - 1);
        dtj = dvar(j - 1);
      }
    }
    sub.t_img.push_back(tj);
    sub.dt_img.push_back(dtj);
  }
  MatBuilder b(tgt.dim(), src.dim());
  for (int mono = 0; mono < src.dim(); ++mono)
    for (auto& [id, c] : detail::apply_subst(src, mono, sub, tgt)) b.add(id, mono, c);
  return b.build();
}

// Simplicial degeneracy s_i: forms at level p -> level p+1, 0 <= i <= p.
inline SparseMatrix degeneracy_matrix(const FormAlgebra& src, const FormAlgebra& tgt, int i) {
  if (tgt.level != src.level + 1) throw ShapeMismatch("degeneracy target level");
  detail::Subst sub;
  auto var = [&](int j) {
    FormAlgebra::Elem e;
    std::vector<int> a(static_cast<size_t>(tgt.level), 0);
    a[static_cast<size_t>(j - 1)] = 1;
    e[tgt.index_of(a, 0)] = 1;
    return e;
  };
  auto dvar = [&](int j) {
    FormAlgebra::Elem e;
    std::vector<int> a(static_cast<size_t>(tgt.level), 0);
    e[tgt.index_of(a, 1u << (j - 1))] = 1;
    return e;
  };
  for (int j = 1; j <= src.level; ++j) {
    FormAlgebra::Elem tj, dtj;
    if (i == 0) {
      tj = var(j + 1);
      dtj = dvar(j + 1);
    } else if (j < i) {
      tj = var(j);
      dtj = dvar(j);
    } else if (j == i) {
      tj = var(i);
      for (auto& [id, c] : var(i + 1)) tj[id] += c;
      dtj = dvar(i);
      for (auto& [id, c] : dvar(i + 1)) dtj[id] += c;
    } else {
      tj = var(j + 1);
      dtj = dvar(j + 1);
    }
    sub.t_img.push_back(tj);
    sub.dt_img.push_back(dtj);
  }
  MatBuilder b(tgt.dim(), src.dim());
  for (int mono = 0; mono < src.dim(); ++mono)
    for (auto& [id, c] : detail::apply_subst(src, mono, sub, tgt)) b.add(id, mono, c);
  return b.build();
}

// Dirichlet integral of the top form t^a dt_1 ^ ... ^ dt_p over the
// standard simplex: prod a_i! / (p + sum a_i)!.
inline Rat simplex_integral(const std::vector<int>& a) {
  Int num = 1;
  long total = static_cast<long>(a.size());
  for (int e : a) {
    for (int k = 2; k <= e; ++k) num *= k;
    total += e;
  }
  Int den = 1;
  for (long k = 2; k <= total; ++k) den *= k;
  Rat r{Rat(num) / Rat(den)};
  return r;
}

}  // namespace dglhom
