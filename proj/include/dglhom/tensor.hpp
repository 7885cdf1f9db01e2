#pragma once

#include <vector>

#include "dglhom/graded.hpp"

namespace dglhom {

// Tensor product of complexes, kept as a flat factor list so that nested
// products of the same factors produce literally the same basis: the
// associativity isomorphism is then the identity on chosen bases.
//
// A basis element of degree k is a tuple ((d_1,i_1),...,(d_r,i_r)) with
// sum d_j = k; tuples are enumerated lexicographically.
struct Tensor {
  std::vector<ComplexQ> factors;
  ComplexQ cx;

  using Slot = std::pair<int, int>;   // (degree, index within degree)
  using Word = std::vector<Slot>;
  std::map<int, std::vector<Word>> basis;  // total degree -> words
  std::map<int, std::map<Word, int>> index;

  int word_index(int degree, const Word& w) const {
    auto it = index.find(degree);
    if (it == index.end()) throw ShapeMismatch("tensor: no such degree");
    auto jt = it->second.find(w);
    if (jt == it->second.end()) throw ShapeMismatch("tensor: no such word");
    return jt->second;
  }

  static int word_degree(const Word& w) {
    int s = 0;
    for (auto& [d, i] : w) s += d;
    return s;
  }
};

namespace detail {

inline void enumerate_words(const std::vector<ComplexQ>& fs, size_t k, Tensor::Word& cur, int deg_so_far,
                            std::vector<std::pair<int, Tensor::Word>>& out) {
  if (k == fs.size()) {
    out.push_back({deg_so_far, cur});
    return;
  }
  for (auto& [d, n] : fs[k].space.dims)
    for (int i = 0; i < n; ++i) {
      cur.push_back({d, i});
      enumerate_words(fs, k + 1, cur, deg_so_far + d, out);
      cur.pop_back();
    }
}

}  // namespace detail

inline Tensor tensor_product(std::vector<ComplexQ> factors) {
  Tensor t;
  t.factors = std::move(factors);
  std::vector<std::pair<int, Tensor::Word>> all;
  Tensor::Word cur;
  detail::enumerate_words(t.factors, 0, cur, 0, all);
  for (auto& [deg, w] : all) {
    t.index[deg][w] = static_cast<int>(t.basis[deg].size());
    t.basis[deg].push_back(w);
  }
  GradedSpace space;
  for (auto& [deg, ws] : t.basis) space.dims[deg] = static_cast<int>(ws.size());
  space.prune();
  GradedMap d(space, space, 1);
  std::map<int, MatBuilder> builders;
  for (auto& [deg, ws] : t.basis) builders.emplace(deg, MatBuilder(space.dim(deg + 1), space.dim(deg)));
  for (auto& [deg, ws] : t.basis) {
    auto& bld = builders.at(deg);
    for (int col = 0; col < static_cast<int>(ws.size()); ++col) {
      const Tensor::Word& w = ws[static_cast<size_t>(col)];
      std::vector<int> degs;
      for (auto& [dd, ii] : w) degs.push_back(dd);
      for (size_t s = 0; s < w.size(); ++s) {
        int sign = koszul::prefix_sign(degs, s);
        const SparseMatrix& blk = t.factors[s].d.block(w[s].first);
        for (const Triple& e : blk.entries()) {
          if (e.col != w[s].second) continue;
          Tensor::Word w2 = w;
          w2[s] = {w[s].first + 1, e.row};
          bld.add(t.word_index(deg + 1, w2), col, Rat(sign) * e.val);
        }
      }
    }
  }
  for (auto& [deg, bld] : builders) d.set_block(deg, bld.build());
  t.cx = ComplexQ(space, d);
  return t;
}

inline Tensor tensor_product(const ComplexQ& a, const ComplexQ& b) { return tensor_product(std::vector<ComplexQ>{a, b}); }

// Quillen commutativity R: X tensor Y -> Y tensor X, x tensor y |->
// (-1)^{|x||y|} y tensor x. An isomorphism of complexes.
inline GradedMap commutativity(const Tensor& xy, const Tensor& yx) {
  if (xy.factors.size() != 2 || yx.factors.size() != 2) throw ShapeMismatch("commutativity wants binary tensors");
  GradedMap r(xy.cx.space, yx.cx.space, 0);
  std::map<int, MatBuilder> builders;
  for (auto& [deg, ws] : xy.basis) builders.emplace(deg, MatBuilder(yx.cx.space.dim(deg), static_cast<int>(ws.size())));
  for (auto& [deg, ws] : xy.basis)
    for (int col = 0; col < static_cast<int>(ws.size()); ++col) {
      const Tensor::Word& w = ws[static_cast<size_t>(col)];
      Tensor::Word swapped{w[1], w[0]};
      builders.at(deg).add(yx.word_index(deg, swapped), col, Rat(koszul::swap_sign(w[0].first, w[1].first)));
    }
  for (auto& [deg, bld] : builders) r.set_block(deg, bld.build());
  return r;
}

// Canonical X[n] tensor Y[m] -> (X tensor Y)[n+m], carrying (-1)^{im} on
// x tensor y with x of degree i in X.
inline GradedMap shift_tensor_iso(const ComplexQ& x, int n, const ComplexQ& y, int m) {
  Tensor shifted = tensor_product(shift(x, n), shift(y, m));
  Tensor plain = tensor_product(x, y);
  ComplexQ target = shift(plain.cx, n + m);
  GradedMap f(shifted.cx.space, target.space, 0);
  std::map<int, MatBuilder> builders;
  for (auto& [deg, ws] : shifted.basis) builders.emplace(deg, MatBuilder(target.space.dim(deg), static_cast<int>(ws.size())));
  for (auto& [deg, ws] : shifted.basis)
    for (int col = 0; col < static_cast<int>(ws.size()); ++col) {
      const Tensor::Word& w = ws[static_cast<size_t>(col)];
      int i = w[0].first + n;  // degree in X
      Tensor::Word plain_word{{i, w[0].second}, {w[1].first + m, w[1].second}};
      int row = plain.word_index(deg + n + m, plain_word);
      builders.at(deg).add(row, col, Rat(koszul::shift_tensor_sign(i, m)));
    }
  for (auto& [deg, bld] : builders) f.set_block(deg, bld.build());
  return f;
}

}  // namespace dglhom
