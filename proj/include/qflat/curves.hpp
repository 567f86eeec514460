#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qflat/expmatrix.hpp"
#include "qflat/moduli.hpp"

namespace qflat {

/**
 * Curve: a unit section C -> C^N whose components are ExpPolys.
 *
 * freq_mult, when non-empty, records a per-component frequency multiplier:
 * shifting the curve k steps along its harmonic sequence multiplies component
 * j by freq_mult[j]^k (and by (-conj(freq_mult[j]))^|k| for k < 0, matching
 * the sign the Gauss transform produces).  It is present for the canonical
 * diagonal sections and absent for general unitary images, where shifts fall
 * back to the Gauss transform.
 */
struct Curve {
  ExpVec f;
  std::vector<cplx> freq_mult;

  std::size_t dim() const { return f.size(); }
};

/** V0 for a moduli solution: components sqrt(r_j) e^{a_j z - ...}, zero-padded
 *  to `ambient` if that exceeds n+1. */
inline Curve canonical_section(const ModuliSolution& ms, std::size_t ambient = 0) {
  validate(ms);
  const std::vector<cplx> a = ms.freqs();
  Curve c;
  const std::size_t N = std::max(ambient, a.size());
  c.f.reserve(N);
  c.freq_mult.reserve(N);
  for (std::size_t j = 0; j < a.size(); ++j) {
    c.f.push_back(ExpPoly::wave(a[j], std::sqrt(ms.r[j])));
    c.freq_mult.push_back(a[j]);
  }
  for (std::size_t j = a.size(); j < N; ++j) {
    c.f.emplace_back();
    c.freq_mult.emplace_back(1.0, 0.0);
  }
  return c;
}

/** M * c, padding c with zero components up to M.cols(). */
inline Curve apply_matrix(const Eigen::MatrixXcd& M, const Curve& c) {
  const std::size_t rows = static_cast<std::size_t>(M.rows());
  const std::size_t cols = static_cast<std::size_t>(M.cols());
  if (c.dim() > cols)
    throw std::invalid_argument("apply_matrix: curve wider than matrix");
  Curve out;
  out.f.assign(rows, ExpPoly());
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<ExpPoly::Term> raw;
    for (std::size_t j = 0; j < c.dim(); ++j) {
      const cplx m = M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (std::abs(m) == 0.0) continue;
      for (const auto& t : c.f[j].terms()) raw.push_back({t.freq, m * t.coeff});
    }
    out.f[i] = ExpPoly::from_terms(std::move(raw));
  }
  return out;  // unitary mixing destroys per-component shift structure
}

inline Curve conj(const Curve& c) {
  Curve out;
  out.f = conj(c.f);
  for (const cplx& m : c.freq_mult) out.freq_mult.push_back(std::conj(m));
  return out;
}

/** |c|^2 - 1 as an ExpPoly (zero iff the section is unit). */
inline ExpPoly unit_norm_residual(const Curve& c) {
  return hermitian_inner(c.f, c.f) - ExpPoly::constant(1.0);
}

namespace detail {

/** One Gauss-transform step: forward (dz) or backward (dzbar), projecting off
 *  the section itself.  Requires |f|^2 constant. */
inline Curve gauss_step(const Curve& c, bool forward) {
  const ExpPoly norm2 = hermitian_inner(c.f, c.f);
  if (!norm2.is_constant(tol::identity))
    throw std::domain_error("harmonic_shift: section norm is not constant");
  const cplx n2 = norm2.constant_part();
  if (std::abs(n2) < 1e-12)
    throw std::domain_error("harmonic_shift: section norm vanishes");
  const ExpVec d = forward ? dz(c.f) : dzbar(c.f);
  const ExpPoly comp = hermitian_inner(d, c.f) * (1.0 / n2);
  Curve out;
  out.f = d - (comp * c.f);
  return out;
}

}  // namespace detail

/** k-th member of the harmonic sequence through c (k may be negative).
 *  Uses the recorded frequency multipliers when available, otherwise iterated
 *  Gauss transforms.  The two paths agree exactly on diagonal sections. */
inline Curve harmonic_shift(const Curve& c, int k) {
  if (k == 0) return c;
  if (!c.freq_mult.empty()) {
    Curve out = c;
    for (std::size_t j = 0; j < out.f.size(); ++j) {
      const cplx base = k > 0 ? c.freq_mult[j] : -std::conj(c.freq_mult[j]);
      cplx factor(1.0);
      for (int s = 0; s < std::abs(k); ++s) factor *= base;
      out.f[j] = out.f[j] * factor;
      // freq_mult unchanged: the shifted section is still diagonal
    }
    return out;
  }
  Curve cur = c;
  for (int s = 0; s < std::abs(k); ++s) cur = detail::gauss_step(cur, k > 0);
  return cur;
}

/* --------------------------------- frames --------------------------------- */

/**
 * FrameFields: xi = dX - <dX,X>X and eta = dzbar X - <dzbar X,X>X for a unit
 * section X, together with their squared lengths, the conformal factor
 * lambda2 = (|xi|^2+|eta|^2)/2, and the 2x2 connection form
 * S = diag(<dX,X>, <X, dzbar X>).
 */
struct FrameFields {
  ExpVec xi, eta;
  ExpPoly xi2, eta2, lambda2;
  ExpMatrix S;
};

inline FrameFields frame_fields(const Curve& c) {
  const ExpPoly norm = unit_norm_residual(c);
  if (!norm.is_zero(tol::identity))
    throw std::domain_error("frame_fields: section is not unit");
  FrameFields ff;
  const ExpVec dX = dz(c.f), dbX = dzbar(c.f);
  const ExpPoly p = hermitian_inner(dX, c.f);   // <dX, X>
  const ExpPoly q = hermitian_inner(dbX, c.f);  // <dzbar X, X>
  ff.xi = dX - (p * c.f);
  ff.eta = dbX - (q * c.f);
  ff.xi2 = hermitian_inner(ff.xi, ff.xi);
  ff.eta2 = hermitian_inner(ff.eta, ff.eta);
  ff.lambda2 = (ff.xi2 + ff.eta2) * 0.5;
  ff.S = ExpMatrix(2, 2);
  ff.S(0, 0) = p;
  ff.S(1, 1) = q.conj();  // <X, dzbar X>
  return ff;
}

/** (<xi,eta>, <xi,X>, <eta,X>): all vanish for a conformal frame. */
inline std::array<ExpPoly, 3> frame_orthogonality(const FrameFields& ff, const Curve& c) {
  return {hermitian_inner(ff.xi, ff.eta), hermitian_inner(ff.xi, c.f),
          hermitian_inner(ff.eta, c.f)};
}

/** dzbar S + dz S^* - [S, S^*] - diag(|xi|^2-|eta|^2, |eta|^2-|xi|^2);
 *  vanishes identically for any frame derived from a unit conformal section. */
inline ExpMatrix gauge_residual(const FrameFields& ff) {
  const ExpMatrix Sstar = ff.S.adjoint();
  ExpMatrix rhs(2, 2);
  rhs(0, 0) = ff.xi2 - ff.eta2;
  rhs(1, 1) = ff.eta2 - ff.xi2;
  return ff.S.dzbar() + Sstar.dz() - commutator(ff.S, Sstar) - rhs;
}

/**
 * First-order frame equations for a quadric curve (bilinear(X,X) = 0):
 *
 *   dzbar xi + |xi|^2 X + (xi,eta) X~ - <dzbar X,X> xi = 0
 *   dz  eta + |eta|^2 X + (xi,eta) X~ - <dz X,X> eta  = 0
 *
 * where (xi,eta) is the bilinear pairing and X~ the conjugate section.
 */
inline std::pair<ExpVec, ExpVec> first_order_residual(const FrameFields& ff,
                                                      const Curve& c) {
  const ExpVec Xb = conj(c.f);
  const ExpPoly cross = bilinear_pair(ff.xi, ff.eta);
  const ExpPoly pzb = hermitian_inner(dzbar(c.f), c.f);
  const ExpPoly pz = hermitian_inner(dz(c.f), c.f);
  ExpVec r1 = dzbar(ff.xi) + (ff.xi2 * c.f) + (cross * Xb) - (pzb * ff.xi);
  ExpVec r2 = dz(ff.eta) + (ff.eta2 * c.f) + (cross * Xb) - (pz * ff.eta);
  return {std::move(r1), std::move(r2)};
}

/** The invariant a = |xi|^2 / lambda^2 and the angle 2 acos(sqrt(a/2)).
 *  Requires a constant conformal factor (true for the flat curves here). */
struct KahlerAngle {
  ExpPoly a;

  double theta(cplx z) const {
    const double v = a.eval(z).real();
    if (v < -1e-8 || v > 2.0 + 1e-8)
      throw std::domain_error("KahlerAngle: invariant outside [0,2]");
    return 2.0 * std::acos(std::sqrt(std::clamp(v, 0.0, 2.0) / 2.0));
  }
};

inline KahlerAngle kahler_angle(const FrameFields& ff) {
  if (!ff.lambda2.is_constant(tol::identity))
    throw std::domain_error("kahler_angle: conformal factor is not constant");
  const cplx l2 = ff.lambda2.constant_part();
  if (std::abs(l2) < 1e-12)
    throw std::domain_error("kahler_angle: conformal factor vanishes");
  return {ff.xi2 * (1.0 / l2)};
}

/** Densities of the two Hopf-type differentials: <dzbar xi, eta>/lambda^2 (dz)
 *  and <dz xi, eta> (dz^3). */
struct HopfDensities {
  ExpPoly first_order;   // coefficient of dz
  ExpPoly third_order;   // coefficient of dz^3
};

inline HopfDensities hopf_densities(const FrameFields& ff) {
  if (!ff.lambda2.is_constant(tol::identity))
    throw std::domain_error("hopf_densities: conformal factor is not constant");
  const cplx l2 = ff.lambda2.constant_part();
  if (std::abs(l2) < 1e-12)
    throw std::domain_error("hopf_densities: conformal factor vanishes");
  return {hermitian_inner(dzbar(ff.xi), ff.eta) * (1.0 / l2),
          hermitian_inner(dz(ff.xi), ff.eta)};
}

/* -------------------------------- projector ------------------------------- */

/**
 * ProjectorData: phi = u u^* + v v^* for two orthonormal sections (u, v),
 * with the connection pieces A_z = (2 phi - I) dz phi and
 * A_zbar = (2 phi - I) dzbar phi.  For a quadric curve X the generators are
 * (conj X, X) and phi is the rank-two real projector onto the moving plane.
 */
struct ProjectorData {
  ExpMatrix phi, Az, Azbar;
};

inline ProjectorData projector(const Curve& first, const Curve& second,
                               bool validate = true) {
  if (first.dim() != second.dim())
    throw std::invalid_argument("projector: section dimensions differ");
  if (validate) {
    if (!unit_norm_residual(first).is_zero(tol::identity) ||
        !unit_norm_residual(second).is_zero(tol::identity))
      throw std::domain_error("projector: sections are not unit");
    if (!hermitian_inner(first.f, second.f).is_zero(tol::identity))
      throw std::domain_error("projector: sections are not orthogonal");
  }
  ProjectorData pd;
  pd.phi = ExpMatrix::outer_herm(first.f, first.f) +
           ExpMatrix::outer_herm(second.f, second.f);
  const ExpMatrix s = pd.phi * cplx(2.0) - ExpMatrix::identity(first.dim());
  pd.Az = s * pd.phi.dz();
  pd.Azbar = s * pd.phi.dzbar();
  return pd;
}

/** Convenience overload for a quadric curve: generators (conj X, X). */
inline ProjectorData projector(const Curve& c, bool validate = true) {
  return projector(conj(c), c, validate);
}

/** dzbar A_z - [A_z, A_zbar]; vanishes iff the projector map is harmonic. */
inline ExpMatrix harmonic_residual(const ProjectorData& pd) {
  return pd.Az.dzbar() - commutator(pd.Az, pd.Azbar);
}

/** -tr(A_z A_zbar): the induced metric density (constant 4 for the flat
 *  normalized catalog curves). */
inline ExpPoly metric_density(const ProjectorData& pd) {
  return -(pd.Az * pd.Azbar).trace();
}

/** Defects of the rank-one expansions
 *    A_z    = X eta^* + X~ (xi~)^* - xi X^* - eta~ (X~)^*
 *    A_zbar = X xi^*  + X~ (eta~)^* - eta X^* - xi~ (X~)^*
 *  against the assembled projector data. */
inline std::pair<ExpMatrix, ExpMatrix> rank_one_defect(const ProjectorData& pd,
                                                       const FrameFields& ff,
                                                       const Curve& c) {
  const ExpVec X = c.f, Xb = conj(c.f);
  const ExpVec xib = conj(ff.xi), etab = conj(ff.eta);
  const ExpMatrix ez = ExpMatrix::outer_herm(X, ff.eta) +
                       ExpMatrix::outer_herm(Xb, xib) -
                       ExpMatrix::outer_herm(ff.xi, X) -
                       ExpMatrix::outer_herm(etab, Xb);
  const ExpMatrix ezb = ExpMatrix::outer_herm(X, ff.xi) +
                        ExpMatrix::outer_herm(Xb, etab) -
                        ExpMatrix::outer_herm(ff.eta, X) -
                        ExpMatrix::outer_herm(xib, Xb);
  return {pd.Az - ez, pd.Azbar - ezb};
}

/* --------------------------- second fundamental form ---------------------- */

/**
 * SffData: P = dz(A_z)/(4 lambda^2), P^* = -dzbar(A_zbar)/(4 lambda^2), and
 * the squared norm computed two independent ways:
 *   norm_trace     = 4 tr(P P^*)
 *   norm_projected = (|pi dz xi|^2 + |pi dzbar eta|^2)/2,
 * pi the projection off span{X, conj X}.  The two must agree identically.
 */
struct SffData {
  ExpMatrix P, Pstar;
  ExpPoly norm_trace;
  ExpPoly norm_projected;
};

inline SffData second_fundamental_form(const ProjectorData& pd,
                                       const FrameFields& ff, const Curve& c) {
  const ExpPoly m = metric_density(pd);
  if (!m.is_constant(tol::identity))
    throw std::domain_error("second_fundamental_form: metric density is not constant");
  const cplx four_lambda2 = m.constant_part();
  if (std::abs(four_lambda2) < 1e-12)
    throw std::domain_error("second_fundamental_form: metric density vanishes");

  SffData s;
  s.P = pd.Az.dz() * (1.0 / four_lambda2);
  s.Pstar = pd.Azbar.dzbar() * (-1.0 / four_lambda2);
  s.norm_trace = (s.P * s.Pstar).trace() * 4.0;

  const ExpVec X = c.f, Xb = conj(c.f);
  const auto perp = [&](const ExpVec& v) {
    return v - (hermitian_inner(v, X) * X) - (hermitian_inner(v, Xb) * Xb);
  };
  const ExpVec px = perp(dz(ff.xi));
  const ExpVec pe = perp(dzbar(ff.eta));
  s.norm_projected =
      (hermitian_inner(px, px) + hermitian_inner(pe, pe)) * 0.5;
  return s;
}

/* ------------------------------ rank & splitting -------------------------- */

/** Rank of the next osculating space span{pi dz u, pi dz v} for the plane
 *  spanned by orthonormal sections (u, v), sampled at `npts` deterministic
 *  points.  Throws if the sampled rank is not constant. */
inline int osculating_rank(const Curve& u, const Curve& v, int npts = 5,
                           std::uint64_t seed = 17, double sv_tol = tol::rank) {
  const ExpVec U = u.f, V = v.f;
  const auto perp = [&](const ExpVec& w) {
    return w - (hermitian_inner(w, U) * U) - (hermitian_inner(w, V) * V);
  };
  const ExpVec w1 = perp(dz(U)), w2 = perp(dz(V));
  SamplePoints pts(seed);
  int rank = -1;
  for (int k = 0; k < npts; ++k) {
    const cplx z = pts.next();
    Eigen::MatrixXcd M(static_cast<Eigen::Index>(U.size()), 2);
    M.col(0) = eval(w1, z);
    M.col(1) = eval(w2, z);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    int rk = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > sv_tol) ++rk;
    if (rank < 0) rank = rk;
    else if (rank != rk)
      throw std::domain_error("osculating_rank: rank varies across sample points");
  }
  return rank;
}

/**
 * Orthogonality pattern along the harmonic sequence: for k = 0..k_max checks
 * that (f_k, f_-k) and (f_-k, f_{k+1}) vanish identically under the bilinear
 * pairing (equivalently <f_k, conj f_-k> = <conj f_-k, f_{k+1}> = 0).
 */
struct SplittingReport {
  std::vector<double> opposite;  // |(f_k, f_-k)| per k
  std::vector<double> adjacent;  // |(f_-k, f_{k+1})| per k
  double worst = 0.0;

  bool pass(double tolerance = tol::identity) const { return worst <= tolerance; }
};

inline SplittingReport splitting_check(const Curve& c, int k_max) {
  SplittingReport rep;
  for (int k = 0; k <= k_max; ++k) {
    const Curve fk = harmonic_shift(c, k);
    const Curve fmk = harmonic_shift(c, -k);
    const Curve fk1 = harmonic_shift(c, k + 1);
    const double d1 = bilinear_pair(fk.f, fmk.f).max_abs_coeff();
    const double d2 = bilinear_pair(fmk.f, fk1.f).max_abs_coeff();
    rep.opposite.push_back(d1);
    rep.adjacent.push_back(d2);
    rep.worst = std::max({rep.worst, d1, d2});
  }
  return rep;
}

}  // namespace qflat
