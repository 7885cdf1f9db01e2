#pragma once

#include <memory>

#include "dglhom/boundary.hpp"

namespace dglhom {

// Cocycle lifts a_p = (-alpha_p, gamma_p) with pi(gamma_p) = d_p and
// d(gamma_p) = i(alpha_p).
struct KsLift {
  OSection alpha;  // over kernel-part generators, degree 1
  OSection gamma;  // over A generators, degree 0
};

// Solve the linear system for a lift of the p-th partial; deterministic
// pivot solution when the space of lifts is positive-dimensional.
inline KsLift solve_ks_lift(const Algebroid& A, int p) {
  const Algebroid h = kernel_part(A);
  int od = A.base.dim();
  // unknown coordinates: gamma over degree-0 generators, alpha over
  // degree-1 kernel generators
  std::vector<int> gamma_gens, alpha_gens;  // indices into A resp. h
  for (int i = 0; i < A.rank(); ++i)
    if (A.gens[static_cast<size_t>(i)].degree == 0) gamma_gens.push_back(i);
  for (int k = 0; k < h.rank(); ++k)
    if (h.gens[static_cast<size_t>(k)].degree == 1) alpha_gens.push_back(k);
  int n_gamma = static_cast<int>(gamma_gens.size()) * od;
  int n_alpha = static_cast<int>(alpha_gens.size()) * od;

  std::vector<int> kernel_of_a;
  for (int i = 0; i < A.rank(); ++i)
    if (A.gens[static_cast<size_t>(i)].kernel) kernel_of_a.push_back(i);

  // rows: anchor equations (vars x od) then differential equations over
  // degree-1 A-coordinates (rank x od)
  int n_anchor = A.base.vars * od;
  int n_diff = A.rank() * od;
  MatBuilder mb(n_anchor + n_diff, n_gamma + n_alpha);
  QVec rhs = qvec_zero(n_anchor + n_diff);
  rhs[static_cast<size_t>(p * od + A.base.unit())] = 1;  // pi(gamma) = d_p
  Validity v;
  for (int gcol = 0; gcol < static_cast<int>(gamma_gens.size()); ++gcol)
    for (int mo = 0; mo < od; ++mo) {
      OSection s{{gamma_gens[static_cast<size_t>(gcol)], qvec_unit(od, mo)}};
      std::vector<QVec> anc = osec_anchor(A, s, v);
      for (int q = 0; q < A.base.vars; ++q)
        for (int t = 0; t < od; ++t)
          if (anc[static_cast<size_t>(q)][static_cast<size_t>(t)] != 0)
            mb.add(q * od + t, gcol * od + mo, anc[static_cast<size_t>(q)][static_cast<size_t>(t)]);
      OSection ds = osec_d(A, s, v);
      for (auto& [g, c] : ds)
        for (int t = 0; t < od; ++t)
          if (c[static_cast<size_t>(t)] != 0) mb.add(n_anchor + g * od + t, gcol * od + mo, c[static_cast<size_t>(t)]);
    }
  for (int acol = 0; acol < static_cast<int>(alpha_gens.size()); ++acol)
    for (int mo = 0; mo < od; ++mo) {
      int in_a = kernel_of_a[static_cast<size_t>(alpha_gens[static_cast<size_t>(acol)])];
      mb.add(n_anchor + in_a * od + mo, n_gamma + acol * od + mo, Rat(-1));
    }
  auto sol = exactla::solve(mb.build(), rhs);
  if (!sol) throw NoLift("no cocycle lift of the requested vector field");
  KsLift lift;
  for (int gcol = 0; gcol < static_cast<int>(gamma_gens.size()); ++gcol) {
    QVec c = qvec_zero(od);
    bool nz = false;
    for (int mo = 0; mo < od; ++mo) {
      c[static_cast<size_t>(mo)] = (*sol)[static_cast<size_t>(gcol * od + mo)];
      if (c[static_cast<size_t>(mo)] != 0) nz = true;
    }
    if (nz) lift.gamma[gamma_gens[static_cast<size_t>(gcol)]] = c;
  }
  for (int acol = 0; acol < static_cast<int>(alpha_gens.size()); ++acol) {
    QVec c = qvec_zero(od);
    bool nz = false;
    for (int mo = 0; mo < od; ++mo) {
      c[static_cast<size_t>(mo)] = (*sol)[static_cast<size_t>(n_gamma + acol * od + mo)];
      if (c[static_cast<size_t>(mo)] != 0) nz = true;
    }
    if (nz) lift.alpha[alpha_gens[static_cast<size_t>(acol)]] = c;
  }
  return lift;
}

// alpha(d_I) = ad(gamma_{i_1}) ... ad(gamma_{i_{s-1}})(-alpha_{i_s}),
// valued on kernel-part generators.
inline OSection ks_alpha_chain(const Algebroid& A, const ConeAlgebroid& ca, const std::vector<KsLift>& lifts,
                               const std::vector<int>& subword, Validity& v) {
  std::map<int, int> a_to_kernel;
  for (int k = 0; k < static_cast<int>(ca.kernel_of_a.size()); ++k) a_to_kernel[ca.kernel_of_a[static_cast<size_t>(k)]] = k;
  OSection val;
  {
    const OSection& alpha = lifts[static_cast<size_t>(subword.back())].alpha;
    for (auto& [k, c] : alpha) {
      QVec neg = c;
      for (Rat& x : neg) x = -x;
      val[k] = neg;
    }
  }
  for (int s = static_cast<int>(subword.size()) - 2; s >= 0; --s) {
    OSection in_a;
    for (auto& [k, c] : val) in_a[ca.kernel_of_a[static_cast<size_t>(k)]] = c;
    OSection br = osec_bracket(A, lifts[static_cast<size_t>(subword[static_cast<size_t>(s)])].gamma, in_a, v);
    OSection next;
    for (auto& [g, c] : br) next[a_to_kernel.at(g)] = c;
    val = std::move(next);
  }
  return val;
}

struct KsCocycle {
  std::vector<int> partials;
  QVec connecting;        // ce coordinates in degree 0
  QVec explicit_formula;  // (0, kappa^(1), ..., kappa^(n)) partition sums
  bool is_cocycle = false;
  bool classes_equal = false;
};

struct KsResult {
  std::shared_ptr<BoundaryMorphism> bm;
  std::vector<KsLift> lifts;
  std::vector<KsCocycle> table;
};

// Coordinates in the envelope of the element a_{i_1} ... a_{i_n}.
inline TwistedEnvelope::OElem ks_word_element(const BoundaryMorphism& bm, const std::vector<KsLift>& lifts,
                                              const std::vector<int>& partials, Validity& v) {
  TwistedEnvelope::OElem u{{{}, bm.cone.cone.base.one()}};
  for (int p : partials) {
    TwistedEnvelope::OElem a;
    for (auto& [k, c] : lifts[static_cast<size_t>(p)].alpha) {
      QVec neg = c;
      for (Rat& x : neg) x = -x;
      a[{bm.cone.shifted_pos[static_cast<size_t>(k)]}] = neg;
    }
    for (auto& [g, c] : lifts[static_cast<size_t>(p)].gamma) a[{bm.cone.orig_pos[static_cast<size_t>(g)]}] = c;
    u = bm.env.mul(u, a, v);
  }
  return u;
}

// Classes of the higher Kodaira-Spencer map on monomials in the partials,
// together with the explicit partition-sum cocycles.
inline KsResult higher_ks(const Algebroid& A, int n, std::vector<KsLift> lifts = {}) {
  KsResult out;
  out.bm = std::make_shared<BoundaryMorphism>(boundary_morphism(A, n));
  const BoundaryMorphism& bm = *out.bm;
  if (lifts.empty())
    for (int p = 0; p < A.base.vars; ++p) lifts.push_back(solve_ks_lift(A, p));
  out.lifts = lifts;

  // all nondecreasing words in the partials of length 0..n
  std::vector<std::vector<int>> words;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int start, int left) {
    if (left == 0) {
      words.push_back(cur);
      return;
    }
    for (int p = start; p < A.base.vars; ++p) {
      cur.push_back(p);
      rec(p, left - 1);
      cur.pop_back();
    }
  };
  for (int len = 0; len <= n; ++len) rec(0, len);

  for (auto& w : words) {
    Validity v;
    KsCocycle kc;
    kc.partials = w;
    TwistedEnvelope::OElem u = ks_word_element(bm, lifts, w, v);
    kc.connecting = bm.c_flat.apply(0, bm.env.to_coords(0, u));
    kc.is_cocycle = is_zero(bm.ce.cx.d.block(0).apply(kc.connecting));
    // explicit formula: sum over p of the partition sums; the empty
    // monomial maps to the unit of C_O
    CEComplexO::CElem expl;
    if (w.empty()) expl[{}] = A.base.one();
    for (int p = 1; p <= static_cast<int>(w.size()); ++p) {
      std::vector<int> assign(w.size(), 0);
      Rat inv_fact(1);
      for (int k = 2; k <= p; ++k) inv_fact /= k;
      std::function<void(size_t)> rec2 = [&](size_t pos) {
        if (pos == w.size()) {
          std::vector<bool> used(static_cast<size_t>(p), false);
          for (int a : assign) used[static_cast<size_t>(a)] = true;
          for (bool uu : used)
            if (!uu) return;
          std::vector<OSection> vals(static_cast<size_t>(p));
          for (int b = 0; b < p; ++b) {
            std::vector<int> sub;
            for (size_t i = 0; i < w.size(); ++i)
              if (assign[i] == b) sub.push_back(w[i]);
            vals[static_cast<size_t>(b)] = ks_alpha_chain(A, bm.cone, lifts, sub, v);
            if (vals[static_cast<size_t>(b)].empty()) return;
          }
          std::vector<std::vector<std::pair<int, QVec>>> lists;
          for (auto& val : vals) lists.emplace_back(val.begin(), val.end());
          std::vector<size_t> pick(static_cast<size_t>(p), 0);
          while (true) {
            CEComplexO::Word word;
            QVec coeff = A.base.one();
            for (int b = 0; b < p; ++b) {
              word.push_back(lists[static_cast<size_t>(b)][pick[static_cast<size_t>(b)]].first);
              coeff = A.base.mul(coeff, lists[static_cast<size_t>(b)][pick[static_cast<size_t>(b)]].second, v);
            }
            auto [sg, norm] = bm.ce.normalize(word);
            if (sg != 0 && !is_zero(coeff)) {
              auto it = expl.find(norm);
              if (it == expl.end()) it = expl.emplace(norm, qvec_zero(A.base.dim())).first;
              for (size_t t = 0; t < coeff.size(); ++t) it->second[t] += Rat(sg) * inv_fact * coeff[t];
            }
            size_t s = 0;
            while (s < pick.size() && ++pick[s] == lists[s].size()) pick[s++] = 0;
            if (s == pick.size()) break;
          }
          return;
        }
        for (int b = 0; b < p; ++b) {
          assign[pos] = b;
          rec2(pos + 1);
        }
        assign[pos] = 0;
      };
      rec2(0);
    }
    kc.explicit_formula = bm.ce.to_coords(0, expl);
    // class equality modulo exact coboundaries inside the word's stage
    QVec diff = kc.connecting;
    for (size_t t = 0; t < diff.size(); ++t) diff[t] -= kc.explicit_formula[t];
    ComplexQ fn = filtration_piece_o(bm.ce, static_cast<int>(w.size()));
    QVec diff_fn(diff.begin(), diff.begin() + fn.space.dim(0));
    for (int t = fn.space.dim(0); t < static_cast<int>(diff.size()); ++t)
      if (diff[static_cast<size_t>(t)] != 0) throw Error("Internal", "KS cocycle leaves the filtration stage");
    kc.classes_equal = exactla::solve(fn.d.block(-1), diff_fn).has_value();
    if (!kc.is_cocycle || !kc.classes_equal) v.require("higher KS class comparison");
    out.table.push_back(std::move(kc));
  }
  return out;
}

// Evaluation of a Schur polynomial on the iterated brackets
// alpha_i = (ad gamma)^{i-1}(-alpha); the class of the n-th power of the
// lifted field is represented by P_n(alpha_1, ..., alpha_n).
struct KsExponentialReport {
  QVec connecting;  // class-level cocycle of kappa^{<=n}(d^n)
  QVec schur_value;
  bool classes_equal = false;
};

inline KsExponentialReport ks_exponential(const Algebroid& A, const KsLift& lift, int n) {
  if (A.base.vars != 1) throw ShapeMismatch("ks_exponential expects a one-variable base");
  KsResult ks = higher_ks(A, n, {lift});
  const BoundaryMorphism& bm = *ks.bm;
  Validity v;
  // alpha_i chains
  std::vector<OSection> alphas;  // alpha_1..alpha_n on kernel generators
  for (int i = 1; i <= n; ++i) {
    std::vector<int> sub(static_cast<size_t>(i), 0);
    alphas.push_back(ks_alpha_chain(A, bm.cone, ks.lifts, sub, v));
  }
  CEComplexO::CElem val;
  for (auto& [expo, coeff] : schur(n).terms) {
    // product alpha_1^{e_1} ... alpha_s^{e_s}
    std::vector<std::vector<std::pair<int, QVec>>> lists;
    bool dead = false;
    for (size_t p = 0; p < expo.size() && !dead; ++p)
      for (int rep = 0; rep < expo[p] && !dead; ++rep) {
        if (alphas[p].empty())
          dead = true;
        else
          lists.emplace_back(alphas[p].begin(), alphas[p].end());
      }
    if (dead) continue;
    if (lists.empty()) {
      auto it = val.find({});
      if (it == val.end()) it = val.emplace(CEComplexO::Word{}, qvec_zero(A.base.dim())).first;
      it->second[0] += coeff;
      continue;
    }
    std::vector<size_t> pick(lists.size(), 0);
    while (true) {
      CEComplexO::Word word;
      QVec c = A.base.one();
      for (size_t b = 0; b < lists.size(); ++b) {
        word.push_back(lists[b][pick[b]].first);
        c = A.base.mul(c, lists[b][pick[b]].second, v);
      }
      auto [sg, norm] = bm.ce.normalize(word);
      if (sg != 0 && !is_zero(c)) {
        auto it = val.find(norm);
        if (it == val.end()) it = val.emplace(norm, qvec_zero(A.base.dim())).first;
        for (size_t t = 0; t < c.size(); ++t) it->second[t] += Rat(sg) * coeff * c[t];
      }
      size_t s = 0;
      while (s < pick.size() && ++pick[s] == lists[s].size()) pick[s++] = 0;
      if (s == pick.size()) break;
    }
  }
  KsExponentialReport rep;
  const KsCocycle* top = nullptr;
  for (auto& kc : ks.table)
    if (static_cast<int>(kc.partials.size()) == n) top = &kc;
  if (!top) throw ShapeMismatch("ks_exponential: missing top entry");
  rep.connecting = top->connecting;
  rep.schur_value = bm.ce.to_coords(0, val);
  QVec diff = rep.connecting;
  for (size_t t = 0; t < diff.size(); ++t) diff[t] -= rep.schur_value[t];
  ComplexQ fn = filtration_piece_o(bm.ce, n);
  QVec diff_fn(diff.begin(), diff.begin() + fn.space.dim(0));
  rep.classes_equal = exactla::solve(fn.d.block(-1), diff_fn).has_value();
  if (!rep.classes_equal) v.require("ks_exponential class comparison");
  return rep;
}

}  // namespace dglhom
