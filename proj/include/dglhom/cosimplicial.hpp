#pragma once

#include <functional>

#include "dglhom/graded.hpp"

namespace dglhom {

// Cosimplicial module with finitely many stored levels. Levels may carry
// an internal grading (each level is a complex); plain modules sit in
// internal degree zero. Cofaces delta^i: Y^{n-1} -> Y^n (0 <= i <= n) and
// codegeneracies sigma^i: Y^{n+1} -> Y^n (0 <= i <= n) are chain maps.
struct CosimplicialModule {
  std::vector<ComplexQ> level;
  std::vector<std::vector<GradedMap>> coface;   // coface[n][i]: level n-1 -> n, for n >= 1
  std::vector<std::vector<GradedMap>> codegen;  // codegen[n][i]: level n+1 -> n, for n <= top-1

  int top() const { return static_cast<int>(level.size()) - 1; }

  const GradedMap& delta(int n, int i) const { return coface[static_cast<size_t>(n)][static_cast<size_t>(i)]; }
  const GradedMap& sigma(int n, int i) const { return codegen[static_cast<size_t>(n)][static_cast<size_t>(i)]; }

  // Matrix check of the cosimplicial identities between stored levels.
  void check_identities() const {
    for (int n = 0; n <= top(); ++n) {
      if (n >= 1 && static_cast<int>(coface[static_cast<size_t>(n)].size()) != n + 1)
        throw ShapeMismatch("coface count at level " + std::to_string(n));
      if (n < top() && static_cast<int>(codegen[static_cast<size_t>(n)].size()) != n + 1)
        throw ShapeMismatch("codegeneracy count at level " + std::to_string(n));
    }
    for (int n = 2; n <= top(); ++n)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j <= n; ++j)
          if (compose(delta(n, j), delta(n - 1, i)) != compose(delta(n, i), delta(n - 1, j - 1)))
            throw AxiomFailure("coface identity fails");
    for (int n = 0; n + 2 <= top(); ++n)
      for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j)
          if (compose(sigma(n, j), sigma(n + 1, i)) != compose(sigma(n, i), sigma(n + 1, j + 1)))
            throw AxiomFailure("codegeneracy identity fails");
    for (int n = 0; n + 1 <= top(); ++n)
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n + 1; ++i) {
          GradedMap lhs = compose(sigma(n, j), delta(n + 1, i));
          if (i < j) {
            if (n >= 1 && lhs != compose(delta(n, i), sigma(n - 1, j - 1))) throw AxiomFailure("mixed identity fails");
          } else if (i == j || i == j + 1) {
            if (lhs != GradedMap::id(level[static_cast<size_t>(n)].space)) throw AxiomFailure("mixed identity: not id");
          } else {
            if (lhs != compose(delta(n, i - 1), sigma(n - 1, j))) throw AxiomFailure("mixed identity fails");
          }
        }
    for (auto& l : level) l.check();
    for (int n = 1; n <= top(); ++n)
      for (int i = 0; i <= n; ++i)
        if (!is_chain_map(level[static_cast<size_t>(n - 1)], level[static_cast<size_t>(n)], delta(n, i)))
          throw AxiomFailure("coface is not a chain map");
  }
};

// ---------------------------------------------------------------------------
// Normalization N(Y): intersection of the codegeneracy kernels, with the
// alternating coface sum as differential. The flattened total complex puts
// level n, internal degree q in degree n + q.
struct Normalization {
  std::map<std::pair<int, int>, std::vector<QVec>> basis;  // (level, internal degree) -> vectors in Y^n_q
  ComplexQ total;
  std::map<int, std::vector<std::pair<int, int>>> layout;  // total degree -> blocks (n, q) with sizes implicit
  std::map<std::pair<int, int>, int> offset;               // block -> offset inside its total degree

  int block_dim(int n, int q) const {
    auto it = basis.find({n, q});
    return it == basis.end() ? 0 : static_cast<int>(it->second.size());
  }
};

inline Normalization normalize(const CosimplicialModule& y) {
  Normalization out;
  for (int n = 0; n <= y.top(); ++n)
    for (auto& [q, dimq] : y.level[static_cast<size_t>(n)].space.dims) {
      if (n == 0) {
        std::vector<QVec> all;
        for (int i = 0; i < dimq; ++i) all.push_back(qvec_unit(dimq, i));
        out.basis[{0, q}] = std::move(all);
        continue;
      }
      // intersection of kernels of all sigma^i at this internal degree
      MatBuilder rows(0, dimq);
      std::vector<Triple> ts;
      int row_off = 0;
      for (int i = 0; i < n; ++i) {
        SparseMatrix blk = y.sigma(n - 1, i).block(q);
        for (const Triple& t : blk.entries()) ts.push_back({row_off + t.row, t.col, t.val});
        row_off += blk.rows();
      }
      SparseMatrix sys = SparseMatrix::from_triples(row_off, dimq, std::move(ts));
      out.basis[{n, q}] = exactla::kernel_basis(sys);
    }
  // total complex
  GradedSpace space;
  for (auto& [nq, vs] : out.basis) {
    if (vs.empty()) continue;
    int deg = nq.first + nq.second;
    out.offset[nq] = space.dims.count(deg) ? space.dims[deg] : 0;
    out.layout[deg].push_back(nq);
    space.dims[deg] += static_cast<int>(vs.size());
  }
  space.prune();
  GradedMap d(space, space, 1);
  std::map<int, MatBuilder> bld;
  for (auto& [deg, k] : space.dims) bld.emplace(deg, MatBuilder(space.dim(deg + 1), k));
  auto coords_in = [&](int n, int q, const QVec& v) -> std::optional<QVec> {
    auto it = out.basis.find({n, q});
    if (it == out.basis.end() || it->second.empty()) {
      if (is_zero(v)) return QVec{};
      return std::nullopt;
    }
    SparseMatrix cols = SparseMatrix::from_dense_columns(static_cast<int>(v.size()), it->second);
    return exactla::solve(cols, v);
  };
  for (auto& [nq, vs] : out.basis) {
    auto [n, q] = nq;
    int deg = n + q;
    if (!space.dims.count(deg)) continue;
    for (int col = 0; col < static_cast<int>(vs.size()); ++col) {
      // alternating coface sum into (n+1, q)
      if (n + 1 <= y.top()) {
        QVec img = qvec_zero(y.level[static_cast<size_t>(n + 1)].space.dim(q));
        for (int i = 0; i <= n + 1; ++i) {
          QVec t = y.delta(n + 1, i).apply(q, vs[static_cast<size_t>(col)]);
          for (size_t s = 0; s < img.size(); ++s) img[s] += Rat(koszul::sign_pow(i)) * t[s];
        }
        auto c = coords_in(n + 1, q, img);
        if (!c) throw Error("Internal", "normalized differential leaves the normalization");
        for (int r = 0; r < static_cast<int>(c->size()); ++r)
          if ((*c)[static_cast<size_t>(r)] != 0)
            bld.at(deg).add(out.offset.at({n + 1, q}) + r, out.offset.at(nq) + col, (*c)[static_cast<size_t>(r)]);
      }
      // internal differential with the level sign
      {
        QVec img = y.level[static_cast<size_t>(n)].d.block(q).apply(vs[static_cast<size_t>(col)]);
        if (!is_zero(img)) {
          auto c = coords_in(n, q + 1, img);
          if (!c) throw Error("Internal", "internal differential leaves the normalization");
          for (int r = 0; r < static_cast<int>(c->size()); ++r)
            if ((*c)[static_cast<size_t>(r)] != 0)
              bld.at(deg).add(out.offset.at({n, q + 1}) + r, out.offset.at(nq) + col,
                              Rat(koszul::sign_pow(n)) * (*c)[static_cast<size_t>(r)]);
        }
      }
    }
  }
  for (auto& [deg, b] : bld) d.set_block(deg, b.build());
  out.total = ComplexQ(space, d);
  return out;
}

// ---------------------------------------------------------------------------
// Monotone maps and the Dold-Puppe decomposition. A monotone injection
// f: [m] -> [n] avoids the top faces exactly when f(m) = n.

using MonoMap = std::vector<int>;  // images, strictly increasing

inline std::vector<MonoMap> lambda_maps(int m, int n) {
  std::vector<MonoMap> out;
  if (m > n || m < 0) return out;
  MonoMap cur(static_cast<size_t>(m) + 1);
  std::function<void(int, int)> rec = [&](int pos, int lo) {
    if (pos == m + 1) {
      if (cur.back() == n) out.push_back(cur);
      return;
    }
    for (int v = lo; v <= n; ++v) {
      cur[static_cast<size_t>(pos)] = v;
      rec(pos + 1, v + 1);
    }
  };
  rec(0, 0);
  return out;
}

// matrix of f = composite of cofaces on internal degree q
inline SparseMatrix monomap_matrix(const CosimplicialModule& y, const MonoMap& f, int q) {
  int m = static_cast<int>(f.size()) - 1;
  int n = f.back();
  // factor f as delta^{i_1} ... delta^{i_{n-m}} with descending i
  std::vector<int> missing;
  {
    size_t pos = 0;
    for (int v = 0; v <= n; ++v) {
      if (pos < f.size() && f[pos] == v)
        ++pos;
      else
        missing.push_back(v);
    }
  }
  SparseMatrix acc = SparseMatrix::identity(y.level[static_cast<size_t>(m)].space.dim(q));
  int cur_level = m;
  for (auto it = missing.begin(); it != missing.end(); ++it) {
    // apply ascending missing values from the smallest: delta^{i} at stage
    // cur_level+1 with i = *it
    acc = y.delta(cur_level + 1, *it).block(q) * acc;
    ++cur_level;
  }
  return acc;
}

struct DoldPuppe {
  // per (m, f in Lambda_{m,n}): the component projection of Y^n
  std::vector<std::tuple<int, MonoMap>> pieces;
  std::map<std::pair<int, int>, SparseMatrix> assemble;  // not used externally
  bool reconstructs = true;
};

// Y^n = sum over m, f in Lambda_{mn} of f(N^m): verify bijectivity and
// return the components of each basis vector via triangular inversion with
// the left inverses.
inline bool dold_puppe_check(const CosimplicialModule& y, const Normalization& nor, int n, int q) {
  int dim_n = y.level[static_cast<size_t>(n)].space.dim(q);
  std::vector<QVec> cols;
  for (int m = 0; m <= n; ++m) {
    auto it = nor.basis.find({m, q});
    if (it == nor.basis.end()) continue;
    for (auto& f : lambda_maps(m, n)) {
      SparseMatrix fm = monomap_matrix(y, f, q);
      for (auto& v : it->second) cols.push_back(fm.apply(v));
    }
  }
  if (static_cast<int>(cols.size()) != dim_n) return false;
  exactla::Rref span(dim_n);
  for (auto& c : cols) span.add_row(c);
  return span.rank() == dim_n;
}

// Components x_f of x in Y^n_q by descending-f triangular extraction,
// using the left inverses f^l (reversed codegeneracy composites).
inline std::map<std::pair<int, MonoMap>, QVec> dold_puppe_components(const CosimplicialModule& y,
                                                                     const Normalization& nor, int n, int q,
                                                                     const QVec& x) {
  std::map<std::pair<int, MonoMap>, QVec> out;
  auto left_inverse = [&](const MonoMap& f) {
    // f = delta^{i_1}...delta^{i_r}, i_1 > ... > i_r; f^l = sigma^{i_r}...sigma^{i_1}
    int m = static_cast<int>(f.size()) - 1;
    int nn = f.back();
    std::vector<int> missing;
    size_t pos = 0;
    for (int v = 0; v <= nn; ++v) {
      if (pos < f.size() && f[pos] == v)
        ++pos;
      else
        missing.push_back(v);
    }
    // descending missing = i_1 > ... > i_r; apply sigma^{i_1} first
    SparseMatrix acc = SparseMatrix::identity(y.level[static_cast<size_t>(nn)].space.dim(q));
    int cur = nn;
    for (auto it = missing.rbegin(); it != missing.rend(); ++it) {
      acc = y.sigma(cur - 1, *it).block(q) * acc;
      --cur;
    }
    (void)m;
    return acc;
  };
  QVec rem = x;
  for (int m = 0; m <= n; ++m) {
    auto bit = nor.basis.find({m, q});
    int bdim = (bit == nor.basis.end()) ? 0 : static_cast<int>(bit->second.size());
    std::vector<MonoMap> fs = lambda_maps(m, n);
    // descending order of the face-index sequences = descending lex on missàs
    std::sort(fs.begin(), fs.end(), [](const MonoMap& a, const MonoMap& b) { return a > b; });
    std::map<MonoMap, QVec> got;
    for (auto& f : fs) {
      QVec val = left_inverse(f).apply(rem);
      // subtract contributions of already-extracted same-level components
      for (auto& [g, xg] : got) {
        SparseMatrix fg = left_inverse(f) * monomap_matrix(y, g, q);
        QVec t = fg.apply(xg);
        for (size_t s = 0; s < val.size(); ++s) val[s] -= t[s];
      }
      if (bdim == 0) {
        got[f] = qvec_zero(y.level[static_cast<size_t>(m)].space.dim(q));
        continue;
      }
      got[f] = val;
    }
    for (auto& [f, xf] : got) {
      out[{m, f}] = xf;
      QVec img = monomap_matrix(y, f, q).apply(xf);
      for (size_t s = 0; s < rem.size(); ++s) rem[s] -= img[s];
    }
  }
  if (!is_zero(rem)) throw Error("Internal", "Dold-Puppe components do not reassemble");
  return out;
}

// ---------------------------------------------------------------------------
// Inverse construction: the cosimplicial module with N(Y) equal to a given
// complex (levels in internal degree zero).

inline CosimplicialModule cosimplicial_from_complex(const ComplexQ& ncx, int levels) {
  // ncx: degrees 0..d hold the normalized pieces
  CosimplicialModule y;
  struct Basis {
    int m;
    MonoMap f;
    int idx;
  };
  std::vector<std::vector<Basis>> basis(static_cast<size_t>(levels) + 1);
  for (int n = 0; n <= levels; ++n) {
    for (int m = 0; m <= n; ++m)
      for (auto& f : lambda_maps(m, n))
        for (int i = 0; i < ncx.space.dim(m); ++i) basis[static_cast<size_t>(n)].push_back({m, f, i});
    GradedSpace sp;
    sp.dims[0] = static_cast<int>(basis[static_cast<size_t>(n)].size());
    sp.prune();
    y.level.push_back(ComplexQ(sp));
  }
  auto find_index = [&](int n, int m, const MonoMap& f, int i) {
    auto& bs = basis[static_cast<size_t>(n)];
    for (int k = 0; k < static_cast<int>(bs.size()); ++k)
      if (bs[static_cast<size_t>(k)].m == m && bs[static_cast<size_t>(k)].f == f && bs[static_cast<size_t>(k)].idx == i)
        return k;
    throw ShapeMismatch("synthesized basis lookup");
  };
  // epi-mono factorization of g o f for monotone g
  auto act = [&](const std::vector<int>& g_imgs, int n_target, int m, const MonoMap& f, int i) {
    // compute h = g o f as a list of images with possible repeats
    std::vector<int> h;
    for (int v : f) h.push_back(g_imgs[static_cast<size_t>(v)]);
    // epi part: repeats kill normalized elements
    for (size_t s = 0; s + 1 < h.size(); ++s)
      if (h[s] == h[s + 1]) return std::map<int, Rat>{};
    MonoMap phi(h.begin(), h.end());
    std::map<int, Rat> out;
    if (phi.back() == n_target) {
      out[find_index(n_target, m, phi, i)] += 1;
      return out;
    }
    // phi = rho o delta^{m+1} with rho = phi + top value n_target
    MonoMap rho = phi;
    rho.push_back(n_target);
    // delta^{m+1}(z) = (-1)^{m+1} (d z - sum_{j<=m} (-1)^j delta^j z)
    int sign = koszul::sign_pow(m + 1);
    for (const Triple& t : ncx.d.block(m).entries()) {
      if (t.col != i) continue;
      out[find_index(n_target, m + 1, rho, t.row)] += Rat(sign) * t.val;
    }
    for (int j = 0; j <= m; ++j) {
      // rho o delta^j: insert: images of delta^j then rho
      MonoMap comp;
      for (int v = 0; v <= m; ++v) {
        int dj = (v < j) ? v : v + 1;
        comp.push_back(rho[static_cast<size_t>(dj)]);
      }
      out[find_index(n_target, m, comp, i)] += Rat(-sign * koszul::sign_pow(j));
    }
    return out;
  };
  y.coface.resize(static_cast<size_t>(levels) + 1);
  y.codegen.resize(static_cast<size_t>(levels) + 1);
  for (int n = 1; n <= levels; ++n)
    for (int i = 0; i <= n; ++i) {
      // delta^i: level n-1 -> n; as a map [n-1] -> [n] skipping i
      std::vector<int> g;
      for (int v = 0; v < n; ++v) g.push_back(v < i ? v : v + 1);
      MatBuilder b(y.level[static_cast<size_t>(n)].space.dim(0), y.level[static_cast<size_t>(n - 1)].space.dim(0));
      auto& bs = basis[static_cast<size_t>(n - 1)];
      for (int col = 0; col < static_cast<int>(bs.size()); ++col)
        for (auto& [row, c] : act(g, n, bs[static_cast<size_t>(col)].m, bs[static_cast<size_t>(col)].f,
                                  bs[static_cast<size_t>(col)].idx))
          b.add(row, col, c);
      GradedMap f(y.level[static_cast<size_t>(n - 1)].space, y.level[static_cast<size_t>(n)].space, 0);
      f.set_block(0, b.build());
      y.coface[static_cast<size_t>(n)].push_back(f);
    }
  for (int n = 0; n < levels; ++n)
    for (int i = 0; i <= n; ++i) {
      // sigma^i: level n+1 -> n; as the monotone surjection [n+1] -> [n]
      std::vector<int> g;
      for (int v = 0; v <= n + 1; ++v) g.push_back(v <= i ? std::min(v, i) : v - 1);
      MatBuilder b(y.level[static_cast<size_t>(n)].space.dim(0), y.level[static_cast<size_t>(n + 1)].space.dim(0));
      auto& bs = basis[static_cast<size_t>(n + 1)];
      for (int col = 0; col < static_cast<int>(bs.size()); ++col)
        for (auto& [row, c] : act(g, n, bs[static_cast<size_t>(col)].m, bs[static_cast<size_t>(col)].f,
                                  bs[static_cast<size_t>(col)].idx))
          b.add(row, col, c);
      GradedMap f(y.level[static_cast<size_t>(n + 1)].space, y.level[static_cast<size_t>(n)].space, 0);
      f.set_block(0, b.build());
      y.codegen[static_cast<size_t>(n)].push_back(f);
    }
  return y;
}

// ---------------------------------------------------------------------------
// Path object and strict homotopies

// (Y^I)^n = product over the n+2 threshold maps [n] -> [1]; the component
// at threshold j is "1 on t > j", j = -1..n.
struct PathObject {
  CosimplicialModule yi;
  // block offsets: at level n, component j in -1..n sits at slot j+1
};

inline PathObject path_object(const CosimplicialModule& y) {
  PathObject p;
  CosimplicialModule& yi = p.yi;
  int top = y.top();
  auto block_count = [](int n) { return n + 2; };
  for (int n = 0; n <= top; ++n) {
    GradedSpace sp;
    for (auto& [q, k] : y.level[static_cast<size_t>(n)].space.dims) sp.dims[q] = k * block_count(n);
    sp.prune();
    GradedMap d(sp, sp, 1);
    for (auto& [q, k] : y.level[static_cast<size_t>(n)].space.dims) {
      MatBuilder b(sp.dim(q + 1), sp.dim(q));
      SparseMatrix blk = y.level[static_cast<size_t>(n)].d.block(q);
      int rows = y.level[static_cast<size_t>(n)].space.dim(q + 1);
      for (int s = 0; s < block_count(n); ++s)
        for (const Triple& t : blk.entries()) b.add(s * rows + t.row, s * k + t.col, t.val);
      d.set_block(q, b.build());
    }
    yi.level.push_back(ComplexQ(sp, d));
  }
  yi.coface.resize(static_cast<size_t>(top) + 1);
  yi.codegen.resize(static_cast<size_t>(top) + 1);
  // threshold composite: s_j o f for f: [m] -> [n] monotone is the
  // threshold at j' = #{u : f(u) <= j} - 1
  auto compose_threshold = [](const std::vector<int>& f_imgs, int j) {
    int cnt = 0;
    for (int v : f_imgs)
      if (v <= j) ++cnt;
    return cnt - 1;
  };
  for (int n = 1; n <= top; ++n)
    for (int i = 0; i <= n; ++i) {
      std::vector<int> g;
      for (int v = 0; v < n; ++v) g.push_back(v < i ? v : v + 1);
      GradedMap f(yi.level[static_cast<size_t>(n - 1)].space, yi.level[static_cast<size_t>(n)].space, 0);
      for (auto& [q, k] : y.level[static_cast<size_t>(n - 1)].space.dims) {
        int rows_unit = y.level[static_cast<size_t>(n)].space.dim(q);
        MatBuilder b(yi.level[static_cast<size_t>(n)].space.dim(q), yi.level[static_cast<size_t>(n - 1)].space.dim(q));
        SparseMatrix blk = y.delta(n, i).block(q);
        for (int jt = -1; jt <= n; ++jt) {
          int src_slot = compose_threshold(g, jt) + 1;
          for (const Triple& t : blk.entries())
            b.add((jt + 1) * rows_unit + t.row, src_slot * k + t.col, t.val);
        }
        f.set_block(q, b.build());
      }
      yi.coface[static_cast<size_t>(n)].push_back(f);
    }
  for (int n = 0; n < top; ++n)
    for (int i = 0; i <= n; ++i) {
      std::vector<int> g;
      for (int v = 0; v <= n + 1; ++v) g.push_back(v <= i ? std::min(v, i) : v - 1);
      GradedMap f(yi.level[static_cast<size_t>(n + 1)].space, yi.level[static_cast<size_t>(n)].space, 0);
      for (auto& [q, k] : y.level[static_cast<size_t>(n + 1)].space.dims) {
        int rows_unit = y.level[static_cast<size_t>(n)].space.dim(q);
        MatBuilder b(yi.level[static_cast<size_t>(n)].space.dim(q), yi.level[static_cast<size_t>(n + 1)].space.dim(q));
        SparseMatrix blk = y.sigma(n, i).block(q);
        for (int jt = -1; jt <= n; ++jt) {
          int src_slot = compose_threshold(g, jt) + 1;
          for (const Triple& t : blk.entries())
            b.add((jt + 1) * rows_unit + t.row, src_slot * k + t.col, t.val);
        }
        f.set_block(q, b.build());
      }
      yi.codegen[static_cast<size_t>(n)].push_back(f);
    }
  return p;
}

// projections pr_0 (thresholds constant 0 <=> j = n) and pr_1 (j = -1),
// and the diagonal embedding
inline GradedMap path_projection(const CosimplicialModule& y, const PathObject& p, int n, int value) {
  int slot = (value == 0) ? n + 1 : 0;
  GradedMap f(p.yi.level[static_cast<size_t>(n)].space, y.level[static_cast<size_t>(n)].space, 0);
  for (auto& [q, k] : y.level[static_cast<size_t>(n)].space.dims) {
    MatBuilder b(k, p.yi.level[static_cast<size_t>(n)].space.dim(q));
    for (int i = 0; i < k; ++i) b.add(i, slot * k + i, Rat(1));
    f.set_block(q, b.build());
  }
  return f;
}

inline GradedMap path_diagonal(const CosimplicialModule& y, const PathObject& p, int n) {
  GradedMap f(y.level[static_cast<size_t>(n)].space, p.yi.level[static_cast<size_t>(n)].space, 0);
  for (auto& [q, k] : y.level[static_cast<size_t>(n)].space.dims) {
    MatBuilder b(p.yi.level[static_cast<size_t>(n)].space.dim(q), k);
    for (int s = 0; s < n + 2; ++s)
      for (int i = 0; i < k; ++i) b.add(s * k + i, i, Rat(1));
    f.set_block(q, b.build());
  }
  return f;
}

// Total complex of a plain cosimplicial module (internal degree folded in).
inline ComplexQ total_complex(const CosimplicialModule& y) {
  GradedSpace space;
  std::map<std::pair<int, int>, int> offset;
  for (int n = 0; n <= y.top(); ++n)
    for (auto& [q, k] : y.level[static_cast<size_t>(n)].space.dims) {
      offset[{n, q}] = space.dims.count(n + q) ? space.dims[n + q] : 0;
      space.dims[n + q] += k;
    }
  space.prune();
  GradedMap d(space, space, 1);
  std::map<int, MatBuilder> bld;
  for (auto& [deg, k] : space.dims) bld.emplace(deg, MatBuilder(space.dim(deg + 1), k));
  for (int n = 0; n <= y.top(); ++n)
    for (auto& [q, k] : y.level[static_cast<size_t>(n)].space.dims) {
      int deg = n + q;
      if (n + 1 <= y.top() && y.level[static_cast<size_t>(n + 1)].space.dim(q)) {
        for (int i = 0; i <= n + 1; ++i) {
          SparseMatrix blk = y.delta(n + 1, i).block(q);
          for (const Triple& t : blk.entries())
            bld.at(deg).add(offset.at({n + 1, q}) + t.row, offset.at({n, q}) + t.col,
                            Rat(koszul::sign_pow(i)) * t.val);
        }
      }
      SparseMatrix internal = y.level[static_cast<size_t>(n)].d.block(q);
      for (const Triple& t : internal.entries())
        bld.at(deg).add(offset.at({n, q + 1}) + t.row, offset.at({n, q}) + t.col,
                        Rat(koszul::sign_pow(n)) * t.val);
    }
  for (auto& [deg, b] : bld) d.set_block(deg, b.build());
  return ComplexQ(space, d);
}

// Chain homotopy induced by a strict homotopy F: X -> Y^I between
// pr_0 F and pr_1 F: h(x) = sum (-1)^i sigma^i(y_{alpha_i}) with alpha_i
// the threshold at i.
struct PathHomotopy {
  GradedMap f0, f1;  // on total complexes
  GradedMap h;       // degree -1
  bool valid = false;
};

inline PathHomotopy path_homotopy(const CosimplicialModule& x, const CosimplicialModule& y, const PathObject& p,
                                  const std::vector<GradedMap>& big_f) {
  // big_f[n]: x.level[n] -> p.yi.level[n]
  PathHomotopy out;
  ComplexQ tx = total_complex(x), ty = total_complex(y);
  // offsets
  auto offsets = [&](const CosimplicialModule& m) {
    std::map<std::pair<int, int>, int> off;
    std::map<int, int> run;
    for (int n = 0; n <= m.top(); ++n)
      for (auto& [q, k] : m.level[static_cast<size_t>(n)].space.dims) {
        off[{n, q}] = run[n + q];
        run[n + q] += k;
      }
    return off;
  };
  auto xoff = offsets(x), yoff = offsets(y);
  auto assemble = [&](std::function<std::pair<int, SparseMatrix>(int, int)> block_of, int degree_shift) {
    GradedMap g(tx.space, ty.space, degree_shift);
    std::map<int, MatBuilder> bld;
    for (auto& [deg, k] : tx.space.dims) bld.emplace(deg, MatBuilder(ty.space.dim(deg + degree_shift), k));
    for (int n = 0; n <= x.top(); ++n)
      for (auto& [q, k] : x.level[static_cast<size_t>(n)].space.dims) {
        auto [tn, blk] = block_of(n, q);
        if (tn < 0) continue;
        for (const Triple& t : blk.entries())
          bld.at(n + q).add(yoff.at({tn, q}) + t.row, xoff.at({n, q}) + t.col, t.val);
      }
    for (auto& [deg, b] : bld) g.set_block(deg, b.build());
    return g;
  };
  out.f0 = assemble(
      [&](int n, int q) { return std::make_pair(n, compose(path_projection(y, p, n, 0), big_f[static_cast<size_t>(n)]).block(q)); },
      0);
  out.f1 = assemble(
      [&](int n, int q) { return std::make_pair(n, compose(path_projection(y, p, n, 1), big_f[static_cast<size_t>(n)]).block(q)); },
      0);
  // h(x) at level n: sum_{i=0}^{n-1} (-1)^i sigma^i(y_{alpha_i}), alpha_i =
  // threshold at i (component slot i+1)
  out.h = assemble(
      [&](int n, int q) -> std::pair<int, SparseMatrix> {
        if (n == 0) return {-1, SparseMatrix()};
        int kx = x.level[static_cast<size_t>(n)].space.dim(q);
        int ky = y.level[static_cast<size_t>(n)].space.dim(q);
        MatBuilder b(y.level[static_cast<size_t>(n - 1)].space.dim(q), kx);
        SparseMatrix fb = big_f[static_cast<size_t>(n)].block(q);
        for (int i = 0; i <= n - 1; ++i) {
          SparseMatrix sig = y.sigma(n - 1, i).block(q);
          // component at slot i+1 of F
          MatBuilder comp(ky, kx);
          for (const Triple& t : fb.entries()) {
            int slot = t.row / ky;
            if (slot == i + 1) comp.add(t.row - slot * ky, t.col, t.val);
          }
          SparseMatrix term = sig * comp.build();
          for (const Triple& t : term.entries()) b.add(t.row, t.col, Rat(koszul::sign_pow(i)) * t.val);
        }
        return {n - 1, b.build()};
      },
      -1);
  GradedMap dh = compose(ty.d, out.h) + compose(out.h, tx.d);
  out.valid = (dh == out.f0 - out.f1);
  return out;
}

// ---------------------------------------------------------------------------
// Solving for prescribed codegeneracy values (level-n element with
// sigma^i(x) = y^i for i in the index set)

struct DegeneracySolution {
  QVec x;
};

inline DegeneracySolution solve_degeneracies(const CosimplicialModule& y, int n, int q, const std::vector<int>& idx,
                                             const std::vector<QVec>& targets) {
  // compatibility: sigma^{j-1} y^i = sigma^i y^j for i < j
  for (size_t a = 0; a < idx.size(); ++a)
    for (size_t b = 0; b < idx.size(); ++b) {
      int i = idx[a], j = idx[b];
      if (i >= j) continue;
      QVec lhs = y.sigma(n - 2, j - 1).block(q).apply(targets[a]);
      QVec rhs = y.sigma(n - 2, i).block(q).apply(targets[b]);
      if (lhs != rhs)
        throw Incompatible("codegeneracy targets incompatible at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  int dim = y.level[static_cast<size_t>(n)].space.dim(q);
  std::vector<Triple> rows;
  QVec rhs;
  int off = 0;
  for (size_t a = 0; a < idx.size(); ++a) {
    SparseMatrix blk = y.sigma(n - 1, idx[a]).block(q);
    for (const Triple& t : blk.entries()) rows.push_back({off + t.row, t.col, t.val});
    for (int r = 0; r < blk.rows(); ++r) rhs.push_back(targets[a][static_cast<size_t>(r)]);
    off += blk.rows();
  }
  auto sol = exactla::solve(SparseMatrix::from_triples(off, dim, std::move(rows)), rhs);
  if (!sol) throw NoSolution("no element with the prescribed codegeneracy values");
  return {*sol};
}

}  // namespace dglhom
