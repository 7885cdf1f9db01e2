#pragma once

#include <functional>
#include <numeric>

#include "dglhom/sparse.hpp"

namespace dglhom {

// Truncated polynomial base O = Q[x_1..x_m]/(monomials of degree > D),
// with the partial derivatives acting on canonical representatives. The
// truncation breaks the Leibniz rule above degree D, so every product
// records whether it dropped a nonzero term; operations that must stay
// exact consult the tracker.
struct Validity {
  bool truncated = false;
  std::string witness;

  void drop(const std::string& w) {
    if (!truncated) witness = w;
    truncated = true;
  }
  void require(const std::string& what) const {
    if (truncated) throw ValidityExceeded(what + " needs degree beyond the base truncation (" + witness + ")");
  }
};

struct WeilBase {
  int vars = 0;
  int order = 1;
  std::vector<std::vector<int>> monos;          // exponent vectors, (total degree, lex)
  std::map<std::vector<int>, int> mono_index;
  std::vector<int> mono_degree;
  std::vector<std::vector<int>> prod;           // prod[i][j] = index or -1 when truncated
  std::vector<std::vector<std::pair<int, Rat>>> partial;  // [p][i] -> (index, coeff), (-1,0) if zero

  int dim() const { return static_cast<int>(monos.size()); }
  int unit() const { return 0; }
  bool is_rational() const { return vars == 0; }

  static WeilBase make(int m, int D) {
    if (m < 0 || D < 1) throw ShapeMismatch("weil base needs m >= 0, D >= 1");
    WeilBase w;
    w.vars = m;
    w.order = D;
    std::vector<int> cur(static_cast<size_t>(m), 0);
    // enumerate by total degree for the canonical order
    for (int total = 0; total <= D; ++total) {
      std::vector<std::vector<int>> level;
      std::function<void(int, int)> rec2 = [&](int pos, int left) {
        if (pos == m) {
          if (left == 0) level.push_back(cur);
          return;
        }
        for (int e = 0; e <= left; ++e) {
          cur[static_cast<size_t>(pos)] = e;
          rec2(pos + 1, left - e);
          cur[static_cast<size_t>(pos)] = 0;
        }
      };
      rec2(0, total);
      std::sort(level.begin(), level.end());
      for (auto& mo : level) w.monos.push_back(mo);
      if (m == 0) break;
    }
    for (int i = 0; i < w.dim(); ++i) {
      w.mono_index[w.monos[static_cast<size_t>(i)]] = i;
      w.mono_degree.push_back(std::accumulate(w.monos[static_cast<size_t>(i)].begin(),
                                              w.monos[static_cast<size_t>(i)].end(), 0));
    }
    w.prod.assign(static_cast<size_t>(w.dim()), std::vector<int>(static_cast<size_t>(w.dim()), -1));
    for (int i = 0; i < w.dim(); ++i)
      for (int j = 0; j < w.dim(); ++j) {
        std::vector<int> s(static_cast<size_t>(m));
        for (int t = 0; t < m; ++t)
          s[static_cast<size_t>(t)] = w.monos[static_cast<size_t>(i)][static_cast<size_t>(t)] +
                                      w.monos[static_cast<size_t>(j)][static_cast<size_t>(t)];
        auto it = w.mono_index.find(s);
        w.prod[static_cast<size_t>(i)][static_cast<size_t>(j)] = (it == w.mono_index.end()) ? -1 : it->second;
      }
    w.partial.assign(static_cast<size_t>(m), std::vector<std::pair<int, Rat>>(static_cast<size_t>(w.dim()), {-1, Rat(0)}));
    for (int p = 0; p < m; ++p)
      for (int i = 0; i < w.dim(); ++i) {
        std::vector<int> e = w.monos[static_cast<size_t>(i)];
        if (e[static_cast<size_t>(p)] == 0) continue;
        int k = e[static_cast<size_t>(p)];
        e[static_cast<size_t>(p)] -= 1;
        w.partial[static_cast<size_t>(p)][static_cast<size_t>(i)] = {w.mono_index.at(e), Rat(k)};
      }
    return w;
  }

  std::string mono_str(int i) const {
    std::string s;
    for (int p = 0; p < vars; ++p) {
      int e = monos[static_cast<size_t>(i)][static_cast<size_t>(p)];
      if (!e) continue;
      s += "x" + std::to_string(p + 1);
      if (e > 1) s += "^" + std::to_string(e);
    }
    return s.empty() ? "1" : s;
  }

  QVec one() const { return qvec_unit(dim(), 0); }

  QVec mul(const QVec& f, const QVec& g, Validity& v) const {
    QVec out = qvec_zero(dim());
    for (int i = 0; i < dim(); ++i) {
      if (f[static_cast<size_t>(i)] == 0) continue;
      for (int j = 0; j < dim(); ++j) {
        if (g[static_cast<size_t>(j)] == 0) continue;
        int k = prod[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (k < 0)
          v.drop(mono_str(i) + "*" + mono_str(j));
        else
          out[static_cast<size_t>(k)] += f[static_cast<size_t>(i)] * g[static_cast<size_t>(j)];
      }
    }
    return out;
  }

  QVec mul_mono(int i, const QVec& g, Validity& v) const {
    QVec f = qvec_zero(dim());
    f[static_cast<size_t>(i)] = 1;
    return mul(f, g, v);
  }

  QVec derive(int p, const QVec& f) const {
    QVec out = qvec_zero(dim());
    for (int i = 0; i < dim(); ++i) {
      if (f[static_cast<size_t>(i)] == 0) continue;
      auto& [k, c] = partial[static_cast<size_t>(p)][static_cast<size_t>(i)];
      if (k >= 0) out[static_cast<size_t>(k)] += c * f[static_cast<size_t>(i)];
    }
    return out;
  }

  // evaluation at the closed point (all variables zero)
  Rat at_origin(const QVec& f) const { return f[0]; }
};

inline WeilBase weil_base(int m, int D) {
  WeilBase w = WeilBase::make(m, D);
  // partials commute, exactly
  for (int p = 0; p < m; ++p)
    for (int q = p + 1; q < m; ++q)
      for (int i = 0; i < w.dim(); ++i) {
        QVec f = qvec_unit(w.dim(), i);
        if (w.derive(p, w.derive(q, f)) != w.derive(q, w.derive(p, f)))
          throw AxiomFailure("partial derivatives fail to commute");
      }
  return w;
}

}  // namespace dglhom
