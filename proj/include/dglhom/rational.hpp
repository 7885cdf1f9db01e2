#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace dglhom {

// Exact scalars. All arithmetic in the library is over Q; there is no
// floating-point mode anywhere.
using Rat = mpq_class;
using Int = mpz_class;

using QVec = std::vector<Rat>;

inline Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Parses "p", "-p" or "p/q". Throws std::invalid_argument on garbage.
inline Rat rat_parse(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  r.canonicalize();
  return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline bool is_zero(const QVec& v) {
  for (const Rat& x : v)
    if (x != 0) return false;
  return true;
}

inline QVec qvec_zero(int n) { return QVec(static_cast<size_t>(n), Rat(0)); }

inline QVec qvec_unit(int n, int i) {
  QVec v = qvec_zero(n);
  v[static_cast<size_t>(i)] = 1;
  return v;
}

inline QVec& operator+=(QVec& a, const QVec& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline QVec& operator-=(QVec& a, const QVec& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline QVec operator*(const Rat& c, QVec v) {
  for (Rat& x : v) x *= c;
  return v;
}

// Scales to an integer vector with content 1 and first nonzero entry
// positive. Canonical representative of the spanned line.
inline QVec primitive(QVec v) {
  Int lcm_den = 1;
  for (const Rat& x : v)
    if (x != 0) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den().get_mpz_t());
  Int gcd_num = 0;
  for (Rat& x : v) {
    x *= Rat(lcm_den);
    mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), x.get_num().get_mpz_t());
  }
  if (gcd_num == 0) return v;
  for (Rat& x : v) x /= Rat(gcd_num);
  for (const Rat& x : v) {
    if (x == 0) continue;
    if (x < 0)
      for (Rat& y : v) y = -y;
    break;
  }
  return v;
}

}  // namespace dglhom
