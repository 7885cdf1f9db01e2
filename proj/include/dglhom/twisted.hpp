#pragma once

#include "dglhom/algebroid.hpp"

namespace dglhom {

// Twisted enveloping algebra U_O(A) of a dg Lie algebroid, truncated at a
// PBW length. Basis: O-monomial times a nondecreasing generator word (odd
// generators never repeat). Straightening rewrites out-of-order generator
// pairs with the Lie relation and moves O-coefficients leftward with
// a . f = f a + pi(a)(f).
struct TwistedEnvelope {
  Algebroid A;
  int cap = 0;

  using Word = std::vector<int>;
  using OElem = std::map<Word, QVec>;  // word -> O-coefficient vector

  std::map<int, std::vector<std::pair<int, Word>>> basis;  // degree -> (O-mono, word)
  std::map<int, std::map<std::pair<int, Word>, int>> index;
  std::map<int, std::vector<int>> length_counts;
  GradedSpace space;

  int word_degree(const Word& w) const {
    int s = 0;
    for (int gi : w) s += A.gens[static_cast<size_t>(gi)].degree;
    return s;
  }

  std::vector<int> word_degrees(const Word& w) const {
    std::vector<int> out;
    for (int gi : w) out.push_back(A.gens[static_cast<size_t>(gi)].degree);
    return out;
  }

  int elem_index(int mono, const Word& w) const {
    int deg = word_degree(w);
    return index.at(deg).at({mono, w});
  }

  bool repeat_allowed(int gi) const { return A.gens[static_cast<size_t>(gi)].degree % 2 == 0; }

  struct Atom {
    int gen = -1;
    QVec coef;  // used when gen < 0
    bool is_gen() const { return gen >= 0; }
  };

  // normal form of an atom word
  OElem nf(std::vector<Atom> atoms, Validity& v) const {
    // move coefficients left, merge them, then straighten generators
    for (size_t t = 0; t < atoms.size(); ++t) {
      if (atoms[t].is_gen()) continue;
      if (is_zero(atoms[t].coef)) return {};
      if (t == 0) continue;
      if (!atoms[t - 1].is_gen()) {
        // merge adjacent coefficients
        std::vector<Atom> merged(atoms.begin(), atoms.end());
        merged[t - 1].coef = A.base.mul(atoms[t - 1].coef, atoms[t].coef, v);
        merged.erase(merged.begin() + static_cast<long>(t));
        return nf(std::move(merged), v);
      }
      // generator followed by a coefficient: g f = f g + pi(g)(f)
      int g = atoms[t - 1].gen;
      OElem out;
      std::vector<Atom> swapped(atoms.begin(), atoms.end());
      std::swap(swapped[t - 1], swapped[t]);
      out = nf(std::move(swapped), v);
      QVec pg = A.anchor_apply(g, atoms[t].coef, v);
      if (!is_zero(pg)) {
        std::vector<Atom> reduced(atoms.begin(), atoms.end());
        reduced[t - 1] = Atom{-1, pg};
        reduced.erase(reduced.begin() + static_cast<long>(t));
        for (auto& [w, c] : nf(std::move(reduced), v)) {
          auto it = out.find(w);
          if (it == out.end()) it = out.emplace(w, qvec_zero(A.base.dim())).first;
          it->second += c;
        }
      }
      for (auto it = out.begin(); it != out.end();) it = is_zero(it->second) ? out.erase(it) : std::next(it);
      return out;
    }
    // all coefficients sit in front (at most one); straighten generators
    size_t first_gen = 0;
    while (first_gen < atoms.size() && !atoms[first_gen].is_gen()) ++first_gen;
    for (size_t t = first_gen; t + 1 < atoms.size(); ++t) {
      int x = atoms[t].gen, y = atoms[t + 1].gen;
      bool swap_needed = x > y, square = (x == y && !repeat_allowed(x));
      if (!swap_needed && !square) continue;
      OElem out;
      auto add_all = [&](OElem part, const Rat& scale) {
        for (auto& [w, c] : part) {
          auto it = out.find(w);
          if (it == out.end()) it = out.emplace(w, qvec_zero(A.base.dim())).first;
          for (size_t s = 0; s < c.size(); ++s) it->second[s] += scale * c[s];
        }
      };
      if (swap_needed) {
        std::vector<Atom> swapped(atoms.begin(), atoms.end());
        std::swap(swapped[t], swapped[t + 1]);
        add_all(nf(std::move(swapped), v),
                Rat(koszul::swap_sign(A.gens[static_cast<size_t>(x)].degree, A.gens[static_cast<size_t>(y)].degree)));
      }
      const auto& br = swap_needed ? A.bra(x, y) : A.bra(x, x);
      Rat half = swap_needed ? Rat(1) : Rat(1, 2);
      for (auto& [k, c] : br) {
        std::vector<Atom> spliced;
        spliced.insert(spliced.end(), atoms.begin(), atoms.begin() + static_cast<long>(t));
        spliced.push_back(Atom{-1, c});
        spliced.push_back(Atom{k, {}});
        spliced.insert(spliced.end(), atoms.begin() + static_cast<long>(t) + 2, atoms.end());
        add_all(nf(std::move(spliced), v), half);
      }
      for (auto it = out.begin(); it != out.end();) it = is_zero(it->second) ? out.erase(it) : std::next(it);
      return out;
    }
    // sorted word with an optional front coefficient
    Word w;
    for (size_t t = first_gen; t < atoms.size(); ++t) w.push_back(atoms[t].gen);
    QVec coef = first_gen ? atoms[0].coef : qvec_unit(A.base.dim(), A.base.unit());
    if (first_gen > 1) throw Error("Internal", "unmerged coefficients");
    OElem out;
    if (!is_zero(coef)) out[w] = coef;
    return out;
  }

  OElem nf_word(const Word& w, Validity& v) const {
    auto key = w;
    auto it = word_cache_.find(key);
    if (it != word_cache_.end()) {
      if (it->second.second.truncated) v.drop(it->second.second.witness);
      return it->second.first;
    }
    std::vector<Atom> atoms;
    for (int g : w) atoms.push_back(Atom{g, {}});
    Validity local;
    OElem res = nf(std::move(atoms), local);
    if (local.truncated) v.drop(local.witness);
    word_cache_.emplace(std::move(key), std::make_pair(res, local));
    return res;
  }

  OElem mul(const OElem& a, const OElem& b, Validity& v) const {
    OElem out;
    for (auto& [wa, ca] : a)
      for (auto& [wb, cb] : b) {
        if (static_cast<int>(wa.size() + wb.size()) > cap) throw CapExceeded("twisted product exceeds the PBW cap");
        // atoms: ca, gens(wa), cb, gens(wb); nf moves cb leftward
        std::vector<Atom> atoms;
        atoms.push_back(Atom{-1, ca});
        for (int g : wa) atoms.push_back(Atom{g, {}});
        atoms.push_back(Atom{-1, cb});
        for (int g : wb) atoms.push_back(Atom{g, {}});
        for (auto& [wn, cn] : nf(std::move(atoms), v)) {
          auto it = out.find(wn);
          if (it == out.end()) it = out.emplace(wn, qvec_zero(A.base.dim())).first;
          it->second += cn;
        }
      }
    for (auto it = out.begin(); it != out.end();) it = is_zero(it->second) ? out.erase(it) : std::next(it);
    return out;
  }

  // Hopf comultiplication over O: generators are primitive and coefficients
  // ride on the left factor.
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

  OElem differential(const Word& w, Validity& v) const {
    OElem out;
    std::vector<int> degs = word_degrees(w);
    for (size_t s = 0; s < w.size(); ++s) {
      int pre = koszul::prefix_sign(degs, s);
      for (auto& [gk, c] : A.d_of(w[static_cast<size_t>(s)])) {
        std::vector<Atom> atoms;
        for (size_t t = 0; t < w.size(); ++t) {
          if (t == s) {
            atoms.push_back(Atom{-1, c});
            atoms.push_back(Atom{gk, {}});
          } else {
            atoms.push_back(Atom{w[t], {}});
          }
        }
        for (auto& [wn, cn] : nf(std::move(atoms), v)) {
          auto it = out.find(wn);
          if (it == out.end()) it = out.emplace(wn, qvec_zero(A.base.dim())).first;
          for (size_t q = 0; q < cn.size(); ++q) it->second[q] += Rat(pre) * cn[q];
        }
      }
    }
    for (auto it = out.begin(); it != out.end();) it = is_zero(it->second) ? out.erase(it) : std::next(it);
    return out;
  }

  QVec to_coords(int degree, const OElem& e) const {
    QVec out = qvec_zero(space.dim(degree));
    for (auto& [w, c] : e) {
      if (word_degree(w) != degree) throw ShapeMismatch("twisted element is not homogeneous");
      for (int mo = 0; mo < A.base.dim(); ++mo)
        if (c[static_cast<size_t>(mo)] != 0) out[static_cast<size_t>(elem_index(mo, w))] = c[static_cast<size_t>(mo)];
    }
    return out;
  }

 private:
  mutable std::map<Word, std::pair<OElem, Validity>> word_cache_;
};

namespace detail {

inline void enumerate_twisted(const Algebroid& a, int len, size_t depth, int min_next, TwistedEnvelope::Word& cur,
                              std::vector<TwistedEnvelope::Word>& out) {
  if (depth == static_cast<size_t>(len)) {
    out.push_back(cur);
    return;
  }
  for (int gi = min_next; gi < a.rank(); ++gi) {
    if (!cur.empty() && gi == cur.back() && a.gens[static_cast<size_t>(gi)].degree % 2 != 0) continue;
    cur.push_back(gi);
    enumerate_twisted(a, len, depth + 1, gi, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline TwistedEnvelope twisted_env(const Algebroid& a, int cap) {
  TwistedEnvelope env;
  env.A = a;
  env.cap = cap;
  std::vector<std::pair<int, TwistedEnvelope::Word>> all;  // (length) implicit via word size
  for (int len = 0; len <= cap; ++len) {
    std::vector<TwistedEnvelope::Word> ws;
    TwistedEnvelope::Word cur;
    detail::enumerate_twisted(a, len, 0, 0, cur, ws);
    std::sort(ws.begin(), ws.end());
    for (auto& w : ws)
      for (int mo = 0; mo < a.base.dim(); ++mo) all.push_back({mo, w});
  }
  for (auto& [mo, w] : all) {
    int deg = env.word_degree(w);
    env.index[deg][{mo, w}] = static_cast<int>(env.basis[deg].size());
    env.basis[deg].push_back({mo, w});
  }
  for (auto& [deg, ms] : env.basis) env.space.dims[deg] = static_cast<int>(ms.size());
  env.space.prune();
  for (auto& [deg, ms] : env.basis) {
    std::vector<int> counts(static_cast<size_t>(cap) + 1, 0);
    for (auto& [mo, w] : ms)
      for (int l = static_cast<int>(w.size()); l <= cap; ++l) counts[static_cast<size_t>(l)] += 1;
    env.length_counts[deg] = counts;
  }
  return env;
}

// ---------------------------------------------------------------------------
// PBW verification: spanning rank of straightened words against the free
// symmetric count, plus associativity of the straightened product.

struct PbwReport {
  bool dims_match = true;
  bool associative = true;
  int skipped_by_validity = 0;
  std::vector<std::pair<int, std::pair<int, int>>> dims;  // i -> (span rank, PBW count)
  std::string first_failure;
};

inline PbwReport pbw_check(const Algebroid& a, int cap) {
  PbwReport rep;
  TwistedEnvelope env = twisted_env(a, cap);
  // global coordinates across degrees
  std::map<int, int> offset;
  int total = 0;
  for (auto& [deg, k] : env.space.dims) {
    offset[deg] = total;
    total += k;
  }
  auto flat = [&](const TwistedEnvelope::OElem& e) {
    QVec out = qvec_zero(total);
    for (auto& [w, c] : e) {
      int deg = env.word_degree(w);
      for (int mo = 0; mo < a.base.dim(); ++mo)
        if (c[static_cast<size_t>(mo)] != 0)
          out[static_cast<size_t>(offset.at(deg) + env.elem_index(mo, w))] = c[static_cast<size_t>(mo)];
    }
    return out;
  };
  // spanning: products of generators with arbitrary leading monomial
  exactla::Rref span(total);
  std::vector<TwistedEnvelope::Word> words{{}};
  for (int i = 0; i <= cap; ++i) {
    if (i > 0) {
      std::vector<TwistedEnvelope::Word> next;
      for (auto& w : words)
        if (static_cast<int>(w.size()) == i - 1)
          for (int g = 0; g < a.rank(); ++g) {
            TwistedEnvelope::Word w2 = w;
            w2.push_back(g);
            next.push_back(w2);
          }
      words.insert(words.end(), next.begin(), next.end());
    }
    for (auto& w : words) {
      if (static_cast<int>(w.size()) != i) continue;
      Validity v;
      TwistedEnvelope::OElem e = env.nf_word(w, v);
      if (v.truncated) {
        ++rep.skipped_by_validity;
        continue;
      }
      for (int mo = 0; mo < a.base.dim(); ++mo) {
        Validity v2;
        TwistedEnvelope::OElem scaled;
        for (auto& [wn, c] : e) {
          QVec fc = a.base.mul_mono(mo, c, v2);
          if (!is_zero(fc)) scaled[wn] = fc;
        }
        if (v2.truncated) {
          ++rep.skipped_by_validity;
          continue;
        }
        span.add_row(flat(scaled));
      }
    }
    int pbw_count = 0;
    for (auto& [deg, ms] : env.basis)
      for (auto& [mo, w] : ms)
        if (static_cast<int>(w.size()) <= i) ++pbw_count;
    rep.dims.push_back({i, {span.rank(), pbw_count}});
    if (span.rank() != pbw_count) {
      rep.dims_match = false;
      if (rep.first_failure.empty()) rep.first_failure = "span rank mismatch at filtration " + std::to_string(i);
    }
  }
  // associativity on basis triples through the cap
  for (auto& [d1, ms1] : env.basis)
    for (auto& [mo1, w1] : ms1) {
      if (w1.empty() || w1.size() > 1) continue;  // length-1 against everything is enough with induction
      for (auto& [d2, ms2] : env.basis)
        for (auto& [mo2, w2] : ms2)
          for (auto& [d3, ms3] : env.basis)
            for (auto& [mo3, w3] : ms3) {
              if (w2.empty() || w3.empty()) continue;
              if (static_cast<int>(w1.size() + w2.size() + w3.size()) > cap) continue;
              if (mo2 != 0 || mo1 != 0) continue;  // O-linearity covers leading monomials
              Validity v;
              TwistedEnvelope::OElem e1{{w1, qvec_unit(a.base.dim(), mo1)}};
              TwistedEnvelope::OElem e2{{w2, qvec_unit(a.base.dim(), mo2)}};
              TwistedEnvelope::OElem e3{{w3, qvec_unit(a.base.dim(), mo3)}};
              TwistedEnvelope::OElem lhs = env.mul(env.mul(e1, e2, v), e3, v);
              TwistedEnvelope::OElem rhs = env.mul(e1, env.mul(e2, e3, v), v);
              if (v.truncated) {
                ++rep.skipped_by_validity;
                continue;
              }
              if (lhs != rhs) {
                rep.associative = false;
                if (rep.first_failure.empty()) rep.first_failure = "associativity fails";
              }
            }
    }
  return rep;
}

}  // namespace dglhom
