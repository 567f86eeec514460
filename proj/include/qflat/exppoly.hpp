#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qflat {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/** Library-wide default tolerances. */
namespace tol {
inline constexpr double freq = 1e-9;      // frequency identification / merging
inline constexpr double coeff = 1e-13;    // coefficient pruning in canonical form
inline constexpr double identity = 1e-10; // symbolic identity checks
inline constexpr double numeric = 1e-8;   // pointwise numeric checks
inline constexpr double rank = 1e-8;      // singular value threshold
inline constexpr double solve = 1e-11;    // moduli solver convergence
}  // namespace tol

/** Principal square root with signed zeros scrubbed first.
 *
 * std::sqrt(complex) follows the C99 branch cut, so sqrt(-1 - 0.0i) = -i
 * while sqrt(-1 + 0.0i) = +i.  Negating a real-axis value produces the
 * -0.0 imaginary part, which would silently flip signs in curve
 * constructions of the form sqrt(-w).  Scrub both components.
 */
inline cplx sqrt_principal(cplx v) {
  if (v.real() == 0.0) v = cplx(0.0, v.imag());
  if (v.imag() == 0.0) v = cplx(v.real(), 0.0);
  return std::sqrt(v);
}

/**
 * ExpPoly: finite sum  sum_k c_k exp(a_k z - conj(a_k) conj(z)),  c_k, a_k complex.
 *
 * Each basis wave exp(a z - a~ z~) = exp(2i Im(a z)) has unit modulus, so an
 * ExpPoly is a trigonometric polynomial on the plane indexed by complex
 * frequencies a_k.  The family is closed under +, *, complex conjugation and
 * both Wirtinger derivatives:
 *
 *     conj:  (c, a) -> (conj c, -a)
 *     d/dz:  (c, a) -> (c a, a)
 *     d/dz~: (c, a) -> (-c conj(a), a)
 *
 * Canonical form invariants (maintained by every operation):
 *   - terms sorted lexicographically by (Re a, Im a);
 *   - no two stored frequencies within tol::freq of each other (merging is a
 *     deterministic sweep that folds each term into the first cluster head
 *     within tolerance);
 *   - no term with |c| <= tol::coeff.
 *
 * Distinct waves are linearly independent functions, so p == q as functions
 * iff (p - q) has an empty term list; that is what makes symbolic identity
 * checks possible throughout the geometry layers.
 */
class ExpPoly {
 public:
  struct Term {
    cplx freq;
    cplx coeff;
  };

  ExpPoly() = default;

  /** The constant c (frequency 0). */
  static ExpPoly constant(cplx c) { return wave(cplx(0.0), c); }

  /** Single wave c exp(a z - conj(a) conj(z)). */
  static ExpPoly wave(cplx freq, cplx coeff = cplx(1.0)) {
    ExpPoly p;
    p.terms_.push_back({scrub(freq), coeff});
    p.canonicalize();
    return p;
  }

  /** Build from an arbitrary (unsorted, repeating) term list. */
  static ExpPoly from_terms(std::vector<Term> raw) {
    ExpPoly p;
    p.terms_ = std::move(raw);
    for (Term& t : p.terms_) t.freq = scrub(t.freq);
    p.canonicalize();
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  ExpPoly& operator+=(const ExpPoly& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    canonicalize();
    return *this;
  }
  ExpPoly& operator-=(const ExpPoly& o) { return *this += (-o); }

  friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) { return a += b; }
  friend ExpPoly operator-(ExpPoly a, const ExpPoly& b) { return a -= b; }

  ExpPoly operator-() const {
    ExpPoly p(*this);
    for (Term& t : p.terms_) t.coeff = -t.coeff;
    return p;
  }

  ExpPoly operator*(const ExpPoly& o) const {
    std::vector<Term> raw;
    raw.reserve(terms_.size() * o.terms_.size());
    append_product(*this, o, raw);
    return from_terms(std::move(raw));
  }
  ExpPoly& operator*=(const ExpPoly& o) { return *this = *this * o; }

  ExpPoly operator*(cplx s) const {
    ExpPoly p(*this);
    for (Term& t : p.terms_) t.coeff *= s;
    p.prune();
    return p;
  }
  friend ExpPoly operator*(cplx s, const ExpPoly& p) { return p * s; }

  /** Complex conjugate of the function: (c, a) -> (conj c, -a). */
  ExpPoly conj() const {
    ExpPoly p;
    p.terms_.reserve(terms_.size());
    for (const Term& t : terms_)
      p.terms_.push_back({scrub(-t.freq), std::conj(t.coeff)});
    std::sort(p.terms_.begin(), p.terms_.end(), term_less);
    return p;  // merging cannot be needed: negation is a bijection on frequencies
  }

  /** Wirtinger derivative d/dz. */
  ExpPoly dz() const {
    ExpPoly p;
    p.terms_.reserve(terms_.size());
    for (const Term& t : terms_) p.terms_.push_back({t.freq, t.coeff * t.freq});
    p.prune();
    return p;
  }

  /** Wirtinger derivative d/dz~. */
  ExpPoly dzbar() const {
    ExpPoly p;
    p.terms_.reserve(terms_.size());
    for (const Term& t : terms_)
      p.terms_.push_back({t.freq, -t.coeff * std::conj(t.freq)});
    p.prune();
    return p;
  }

  cplx eval(cplx z) const {
    cplx acc(0.0);
    for (const Term& t : terms_)
      acc += t.coeff * std::polar(1.0, 2.0 * std::imag(t.freq * z));
    return acc;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const Term& t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
  }

  /** Zero as a function, up to coefficient tolerance. */
  bool is_zero(double coeff_tol = tol::coeff) const {
    return max_abs_coeff() <= coeff_tol;
  }

  /** All mass at frequency 0, up to tolerance on the other coefficients. */
  bool is_constant(double coeff_tol = tol::coeff) const {
    for (const Term& t : terms_)
      if (std::abs(t.freq) > tol::freq && std::abs(t.coeff) > coeff_tol)
        return false;
    return true;
  }

  /** Coefficient of the zero-frequency term (0 if absent). */
  cplx constant_part() const {
    for (const Term& t : terms_)
      if (std::abs(t.freq) <= tol::freq) return t.coeff;
    return cplx(0.0);
  }

  /** Value of a poly known to be constant; throws otherwise. */
  cplx constant_value(double coeff_tol = tol::identity) const {
    if (!is_constant(coeff_tol))
      throw std::domain_error("ExpPoly: constant_value on a non-constant poly");
    return constant_part();
  }

  /** Raw product terms of a*b appended to out (no canonicalization).
   *  Lets matrix products canonicalize one accumulated list per entry. */
  static void append_product(const ExpPoly& a, const ExpPoly& b,
                             std::vector<Term>& out) {
    for (const Term& s : a.terms_)
      for (const Term& t : b.terms_)
        out.push_back({scrub(s.freq + t.freq), s.coeff * t.coeff});
  }

 private:
  std::vector<Term> terms_;

  static cplx scrub(cplx v) {  // normalize -0.0 components for stable ordering
    if (v.real() == 0.0) v = cplx(0.0, v.imag());
    if (v.imag() == 0.0) v = cplx(v.real(), 0.0);
    return v;
  }

  static bool term_less(const Term& s, const Term& t) {
    if (s.freq.real() != t.freq.real()) return s.freq.real() < t.freq.real();
    return s.freq.imag() < t.freq.imag();
  }

  void prune() {
    terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                [](const Term& t) {
                                  return std::abs(t.coeff) <= tol::coeff;
                                }),
                 terms_.end());
  }

  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(), term_less);
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (const Term& t : terms_) {
      // Candidate cluster heads share Re(freq) up to tolerance; equal-Re
      // frequencies with different Im may interleave in the lex order, so
      // scan every head in the Re band, not just the most recent one.
      bool placed = false;
      for (std::size_t k = merged.size(); k-- > 0;) {
        if (merged[k].freq.real() < t.freq.real() - tol::freq) break;
        if (std::abs(t.freq - merged[k].freq) <= tol::freq) {
          merged[k].coeff += t.coeff;
          placed = true;
          break;
        }
      }
      if (!placed) merged.push_back(t);
    }
    terms_ = std::move(merged);
    prune();
  }
};

/* ------------------------- component-vector helpers ------------------------ */

using ExpVec = std::vector<ExpPoly>;

inline ExpVec conj(const ExpVec& v) {
  ExpVec out;
  out.reserve(v.size());
  for (const ExpPoly& p : v) out.push_back(p.conj());
  return out;
}

inline ExpVec dz(const ExpVec& v) {
  ExpVec out;
  out.reserve(v.size());
  for (const ExpPoly& p : v) out.push_back(p.dz());
  return out;
}

inline ExpVec dzbar(const ExpVec& v) {
  ExpVec out;
  out.reserve(v.size());
  for (const ExpPoly& p : v) out.push_back(p.dzbar());
  return out;
}

inline ExpVec operator*(const ExpPoly& s, ExpVec v) {
  for (ExpPoly& p : v) p = s * p;
  return v;
}

inline ExpVec operator*(cplx s, ExpVec v) {
  for (ExpPoly& p : v) p = p * s;
  return v;
}

inline ExpVec operator+(ExpVec a, const ExpVec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("ExpVec: size mismatch in +");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline ExpVec operator-(ExpVec a, const ExpVec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("ExpVec: size mismatch in -");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

/** Hermitian pairing <u,v> = sum_i u_i conj(v_i)  (linear in the first slot). */
inline ExpPoly hermitian_inner(const ExpVec& u, const ExpVec& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("ExpVec: size mismatch in hermitian_inner");
  std::vector<ExpPoly::Term> raw;
  for (std::size_t i = 0; i < u.size(); ++i)
    ExpPoly::append_product(u[i], v[i].conj(), raw);
  return ExpPoly::from_terms(std::move(raw));
}

/** Bilinear pairing (u,v) = sum_i u_i v_i  (no conjugation). */
inline ExpPoly bilinear_pair(const ExpVec& u, const ExpVec& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("ExpVec: size mismatch in bilinear_pair");
  std::vector<ExpPoly::Term> raw;
  for (std::size_t i = 0; i < u.size(); ++i)
    ExpPoly::append_product(u[i], v[i], raw);
  return ExpPoly::from_terms(std::move(raw));
}

inline double max_abs_coeff(const ExpVec& v) {
  double m = 0.0;
  for (const ExpPoly& p : v) m = std::max(m, p.max_abs_coeff());
  return m;
}

/** Deterministic, platform-independent sample points for numeric checks.
 *  splitmix64 stream mapped into the square [-1,1] x [-1,1]. */
class SamplePoints {
 public:
  explicit SamplePoints(std::uint64_t seed) : state_(seed) {}

  cplx next() {
    const double x = unit();
    const double y = unit();
    return {2.0 * x - 1.0, 2.0 * y - 1.0};
  }

  std::uint64_t next_u64() { return splitmix(); }

  double unit() {  // in [0,1)
    return static_cast<double>(splitmix() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
  std::uint64_t splitmix() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

}  // namespace qflat
