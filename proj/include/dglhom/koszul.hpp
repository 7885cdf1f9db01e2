#pragma once

#include <utility>
#include <vector>

namespace dglhom::koszul {

// Every sign in the library comes from the routines in this header: the
// Quillen rule "moving degree p past degree q costs (-1)^{pq}", plus its
// standard consequences. No other file hardcodes a sign convention.

inline int sign_pow(long e) { return (e % 2 == 0) ? 1 : -1; }

// Moving one symbol of degree p past one of degree q.
inline int swap_sign(int p, int q) { return sign_pow(static_cast<long>(p) * q); }

// Sign accrued when sorting a sequence of (key, degree) pairs into
// nondecreasing key order by adjacent transpositions. With antisym set,
// each transposition contributes an extra (-1) (exterior flavor). Sorting
// is stable; equal keys never cross.
template <typename Key>
inline int sort_sign(std::vector<std::pair<Key, int>>& seq, bool antisym) {
  int sign = 1;
  for (size_t i = 1; i < seq.size(); ++i)
    for (size_t j = i; j > 0 && seq[j].first < seq[j - 1].first; --j) {
      sign *= swap_sign(seq[j].second, seq[j - 1].second);
      if (antisym) sign = -sign;
      std::swap(seq[j], seq[j - 1]);
    }
  return sign;
}

// Sign of the unshuffle pulling the flagged positions to the front while
// keeping relative orders: one crossing for each pair (i unflagged, j
// flagged, i < j).
inline int unshuffle_sign(const std::vector<int>& degrees, const std::vector<bool>& flagged, bool antisym) {
  int sign = 1;
  for (size_t j = 0; j < degrees.size(); ++j) {
    if (!flagged[j]) continue;
    for (size_t i = 0; i < j; ++i)
      if (!flagged[i]) {
        sign *= swap_sign(degrees[i], degrees[j]);
        if (antisym) sign = -sign;
      }
  }
  return sign;
}

// Koszul prefix: sign for moving a degree-d operator past the first k
// symbols of the listed degrees (derivation rule).
inline int prefix_sign(const std::vector<int>& degrees, size_t k, int d = 1) {
  long acc = 0;
  for (size_t i = 0; i < k; ++i) acc += degrees[i];
  return sign_pow(acc * d);
}

// X[n] tensor Y[m] -> (X tensor Y)[n+m] sends x tensor y, x of degree i in
// X, to (-1)^{im} x tensor y.
inline int shift_tensor_sign(int i, int m) { return sign_pow(static_cast<long>(i) * m); }

// Shifting a complex by n multiplies the differential by (-1)^n.
inline int shift_diff_sign(int n) { return sign_pow(n); }

// Decalage S^n(X[1]) -> Lambda^n(X)[n]: x_1 ... x_n with x_i of degree p_i
// in X goes to (-1)^{sum (n-i) p_i} x_1 ^ ... ^ x_n.
inline int decalage_sign(const std::vector<int>& x_degrees) {
  long e = 0;
  long n = static_cast<long>(x_degrees.size());
  for (size_t i = 0; i < x_degrees.size(); ++i) e += (n - 1 - static_cast<long>(i)) * x_degrees[i];
  return sign_pow(e);
}

}  // namespace dglhom::koszul
