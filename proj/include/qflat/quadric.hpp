#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <numbers>
#include <string>
#include <utility>

#include "qflat/curves.hpp"

namespace qflat {

/* ------------------------------- W matrices ------------------------------- */

/** W = U^T U for unitary U: the symmetric unitary matrix governing the
 *  quadric condition of the curve U V0. */
inline Eigen::MatrixXcd w_from_u(const Eigen::MatrixXcd& U) {
  return U.transpose() * U;
}

/** Throws unless W is square, symmetric and unitary within `tol_check`. */
inline void require_symmetric_unitary(const Eigen::MatrixXcd& W,
                                      double tol_check = tol::numeric) {
  const Eigen::Index N = W.rows();
  if (W.cols() != N)
    throw std::invalid_argument("require_symmetric_unitary: matrix not square");
  if ((W - W.transpose()).cwiseAbs().maxCoeff() > tol_check)
    throw std::invalid_argument("require_symmetric_unitary: matrix not symmetric");
  if ((W * W.adjoint() - Eigen::MatrixXcd::Identity(N, N)).cwiseAbs().maxCoeff() >
      tol_check)
    throw std::invalid_argument("require_symmetric_unitary: matrix not unitary");
}

/**
 * Takagi factorization of a symmetric unitary W: returns unitary U with
 * U^T U = W.  Since Re W and Im W are commuting real symmetric matrices,
 * a joint real orthogonal eigenbasis O exists; the diagonal of O^T W O is
 * unimodular and U = diag(exp(i arg/2)) O^T.  The eigenbasis is made
 * deterministic by canonical column signs, so the factor is reproducible.
 */
inline Eigen::MatrixXcd takagi_factor(const Eigen::MatrixXcd& W,
                                      double tol_check = tol::numeric) {
  require_symmetric_unitary(W, tol_check);
  const Eigen::Index N = W.rows();
  const Eigen::MatrixXd A = W.real(), B = W.imag();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw std::domain_error("takagi_factor: eigensolver failed");
  Eigen::MatrixXd O = es.eigenvectors();
  const Eigen::VectorXd ev = es.eigenvalues();

  // Within each cluster of equal Re-eigenvalues, rediagonalize Im W so the
  // joint basis diagonalizes both parts.
  Eigen::Index start = 0;
  while (start < N) {
    Eigen::Index end = start + 1;
    while (end < N && ev(end) - ev(start) < 1e-7) ++end;
    if (end - start > 1) {
      const Eigen::MatrixXd Ob = O.middleCols(start, end - start);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(Ob.transpose() * B * Ob);
      if (es2.info() != Eigen::Success)
        throw std::domain_error("takagi_factor: cluster eigensolver failed");
      O.middleCols(start, end - start) = Ob * es2.eigenvectors();
    }
    start = end;
  }

  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = 0; i < N; ++i) {
      if (std::abs(O(i, j)) > 1e-8) {
        if (O(i, j) < 0.0) O.col(j) *= -1.0;
        break;
      }
    }
  }

  const Eigen::VectorXcd d = (O.transpose() * W * O).diagonal();
  Eigen::VectorXcd s(N);
  for (Eigen::Index j = 0; j < N; ++j)
    s(j) = std::polar(1.0, std::arg(d(j)) / 2.0);
  const Eigen::MatrixXcd U = s.asDiagonal() * O.transpose().cast<cplx>();

  if ((U.transpose() * U - W).cwiseAbs().maxCoeff() > tol_check)
    throw std::domain_error("takagi_factor: residual exceeds tolerance");
  return U;
}

/** Gauge between two factors of the same W: O = U1 U2^dagger must be real
 *  orthogonal.  Reports how real and how orthogonal it is, plus det(Re O). */
struct GaugeReport {
  Eigen::MatrixXcd O;
  double realness = 0.0;
  double orthogonality = 0.0;
  double det = 0.0;
};

inline GaugeReport so_gauge(const Eigen::MatrixXcd& U1, const Eigen::MatrixXcd& U2) {
  if (U1.rows() != U2.rows() || U1.cols() != U2.cols())
    throw std::invalid_argument("so_gauge: dimension mismatch");
  GaugeReport g;
  g.O = U1 * U2.adjoint();
  g.realness = g.O.imag().cwiseAbs().maxCoeff();
  const Eigen::MatrixXd Or = g.O.real();
  g.orthogonality =
      (Or.transpose() * Or - Eigen::MatrixXd::Identity(Or.rows(), Or.cols()))
          .cwiseAbs()
          .maxCoeff();
  g.det = Or.determinant();
  return g;
}

/* --------------------------- frequency constraints ------------------------ */

/** Index pairs (i <= j) whose frequency sums a_i + a_j coincide. */
struct FrequencyClass {
  cplx freq;
  std::vector<std::pair<int, int>> pairs;
};

inline std::vector<FrequencyClass> frequency_classes(const ModuliSolution& ms,
                                                     double class_tol = 1e-7) {
  validate(ms);
  const std::vector<cplx> a = ms.freqs();
  std::vector<FrequencyClass> classes;
  for (int i = 0; i <= ms.n; ++i) {
    for (int j = i; j <= ms.n; ++j) {
      const cplx s = a[static_cast<std::size_t>(i)] + a[static_cast<std::size_t>(j)];
      bool placed = false;
      for (auto& cl : classes) {
        if (std::abs(cl.freq - s) < class_tol) {
          cl.pairs.emplace_back(i, j);
          placed = true;
          break;
        }
      }
      if (!placed) classes.push_back({s, {{i, j}}});
    }
  }
  std::sort(classes.begin(), classes.end(),
            [](const FrequencyClass& x, const FrequencyClass& y) {
              if (x.freq.real() != y.freq.real()) return x.freq.real() < y.freq.real();
              return x.freq.imag() < y.freq.imag();
            });
  return classes;
}

/**
 * One linear constraint on the entries of W induced by a frequency class:
 * sum of coeff[k] * W(i_k, j_k) over the class must vanish, with
 * coeff = (i==j ? 1 : 2) sqrt(r_i r_j).  A singleton class forces its
 * single entry to zero.
 */
struct WConstraint {
  cplx freq;
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> coeff;

  bool forces_zero() const { return pairs.size() == 1; }
};

inline std::vector<WConstraint> derive_constraints(const ModuliSolution& ms,
                                                   double class_tol = 1e-7) {
  const std::vector<FrequencyClass> classes = frequency_classes(ms, class_tol);
  std::vector<WConstraint> cons;
  std::size_t covered = 0;
  for (const auto& cl : classes) {
    WConstraint c;
    c.freq = cl.freq;
    c.pairs = cl.pairs;
    for (const auto& [i, j] : cl.pairs) {
      const double w = (i == j ? 1.0 : 2.0) *
                       std::sqrt(ms.r[static_cast<std::size_t>(i)] *
                                 ms.r[static_cast<std::size_t>(j)]);
      c.coeff.push_back(w);
    }
    covered += c.pairs.size();
    cons.push_back(std::move(c));
  }
  const std::size_t expect =
      static_cast<std::size_t>(ms.n + 1) * static_cast<std::size_t>(ms.n + 2) / 2;
  if (covered != expect)
    throw std::logic_error("derive_constraints: pair cover is not a partition");
  return cons;
}

/** Worst violation of the constraint ledger by the leading block of W. */
inline double constraint_residual(const Eigen::MatrixXcd& W,
                                  const std::vector<WConstraint>& cons) {
  double worst = 0.0;
  for (const auto& c : cons) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < c.pairs.size(); ++k)
      acc += c.coeff[k] * W(c.pairs[k].first, c.pairs[k].second);
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

/** The quadric form sum w_ij sqrt(r_i r_j) E_{a_i + a_j} as an ExpPoly; the
 *  curve U V0 lies on the quadric iff this vanishes identically. */
inline ExpPoly quadric_form(const Eigen::MatrixXcd& W, const ModuliSolution& ms) {
  validate(ms);
  if (W.rows() < ms.n + 1 || W.cols() < ms.n + 1)
    throw std::invalid_argument("quadric_form: W smaller than moduli block");
  const std::vector<cplx> a = ms.freqs();
  std::vector<ExpPoly::Term> raw;
  for (int i = 0; i <= ms.n; ++i) {
    for (int j = i; j <= ms.n; ++j) {
      const double mult = (i == j ? 1.0 : 2.0);
      const cplx coeff = mult * W(i, j) *
                         std::sqrt(ms.r[static_cast<std::size_t>(i)] *
                                   ms.r[static_cast<std::size_t>(j)]);
      raw.push_back({a[static_cast<std::size_t>(i)] + a[static_cast<std::size_t>(j)],
                     coeff});
    }
  }
  return ExpPoly::from_terms(std::move(raw));
}

inline double quadric_residual(const Eigen::MatrixXcd& W, const ModuliSolution& ms) {
  return quadric_form(W, ms).max_abs_coeff();
}

inline double quadric_residual(const Curve& c) {
  return bilinear_pair(c.f, c.f).max_abs_coeff();
}

/* ------------------------------ pairing profile --------------------------- */

/** Antipodal structure of the frequency set: which indices are matched by
 *  a_i + a_j = 0 and which are free. */
struct PairingProfile {
  std::vector<std::pair<int, int>> antipodal;
  std::vector<int> free_indices;
  std::string label;  // "all-free", "all-paired" or "mixed"
};

inline PairingProfile pairing_profile(const ModuliSolution& ms,
                                      double class_tol = 1e-7) {
  validate(ms);
  const std::vector<cplx> a = ms.freqs();
  PairingProfile p;
  std::vector<bool> matched(a.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (std::abs(a[i] + a[j]) < class_tol) {
        p.antipodal.emplace_back(static_cast<int>(i), static_cast<int>(j));
        matched[i] = matched[j] = true;
      }
    }
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!matched[i]) p.free_indices.push_back(static_cast<int>(i));
  if (p.antipodal.empty()) p.label = "all-free";
  else if (p.free_indices.empty()) p.label = "all-paired";
  else p.label = "mixed";
  return p;
}

/* --------------------------------- catalog -------------------------------- */

/** A fully assembled flat quadric curve: moduli, unitary U, W = U^T U and the
 *  curve f0 = U V0 in C^N. */
struct CatalogEntry {
  std::string name;
  int n = 0;
  int N = 0;
  ModuliSolution ms;
  Eigen::MatrixXcd U;
  Eigen::MatrixXcd W;
  Curve f0;
  std::string label;
  std::string note;
};

namespace detail {

inline CatalogEntry assemble(std::string name, const ModuliSolution& ms,
                             Eigen::MatrixXcd U, std::string note) {
  CatalogEntry e;
  e.name = std::move(name);
  e.n = ms.n;
  e.N = static_cast<int>(U.rows());
  e.ms = ms;
  e.U = std::move(U);
  e.W = w_from_u(e.U);
  e.f0 = apply_matrix(e.U, canonical_section(ms, static_cast<std::size_t>(e.N)));
  e.label = pairing_profile(ms).label;
  e.note = std::move(note);
  return e;
}

}  // namespace detail

/**
 * Doubling construction, valid for any moduli: column j of U is
 * (e_{2j} + i e_{2j+1})/sqrt(2) and column n+1+j its conjugate, so the
 * leading block of W = U^T U vanishes and the quadric condition is trivially
 * satisfied.  N = 2(n+1).
 */
inline CatalogEntry catalog_doubling(const ModuliSolution& ms) {
  validate(ms);
  const int n = ms.n;
  const int N = 2 * (n + 1);
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(N, N);
  const double inv = 1.0 / std::sqrt(2.0);
  for (int j = 0; j <= n; ++j) {
    U(2 * j, j) = inv;
    U(2 * j + 1, j) = cplx(0.0, inv);
    U(2 * j, n + 1 + j) = inv;
    U(2 * j + 1, n + 1 + j) = cplx(0.0, -inv);
  }
  return detail::assemble("doubling-n" + std::to_string(n), ms, std::move(U),
                          "conjugate-doubled columns; leading W block zero");
}

inline CatalogEntry catalog_doubling(int n) {
  return catalog_doubling(clifford(n));
}

/**
 * Paired construction for odd n: frequencies split into antipodal pairs
 * (k, k+m+1), m = (n-1)/2, and each pair carries a unimodular weight w_k
 * with sum_k w_k sqrt(r_k r_{k+m+1}) = 0.  N = n+1: the curve is linearly
 * full in the smallest possible ambient space.
 */
inline CatalogEntry catalog_paired(const ModuliSolution& ms,
                                   const std::vector<cplx>& weights,
                                   const std::string& tag = "") {
  validate(ms);
  const int n = ms.n;
  if (n % 2 == 0)
    throw std::invalid_argument("catalog_paired: odd n required");
  const int m = (n - 1) / 2;
  const PairingProfile prof = pairing_profile(ms);
  if (prof.label != "all-paired")
    throw std::invalid_argument("catalog_paired: moduli are not fully paired");
  for (const auto& [i, j] : prof.antipodal) {
    if (j != i + m + 1)
      throw std::invalid_argument("catalog_paired: pairs are not (k, k+m+1)");
  }
  if (static_cast<int>(weights.size()) != m + 1)
    throw std::invalid_argument("catalog_paired: one weight per pair required");
  cplx balance = 0.0;
  for (int k = 0; k <= m; ++k) {
    if (std::abs(std::abs(weights[static_cast<std::size_t>(k)]) - 1.0) > tol::numeric)
      throw std::invalid_argument("catalog_paired: weights must be unimodular");
    balance += weights[static_cast<std::size_t>(k)] *
               std::sqrt(ms.r[static_cast<std::size_t>(k)] *
                         ms.r[static_cast<std::size_t>(k + m + 1)]);
  }
  if (std::abs(balance) > tol::numeric)
    throw std::invalid_argument("catalog_paired: weights do not balance the pair products");

  const int N = n + 1;
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(N, N);
  const double inv = 1.0 / std::sqrt(2.0);
  for (int k = 0; k <= m; ++k) {
    const cplx w = weights[static_cast<std::size_t>(k)];
    const cplx sw = sqrt_principal(w) * inv;
    const cplx smw = sqrt_principal(-w) * inv;
    U(k, k) = sw;
    U(k, k + m + 1) = sw;
    U(n - k, k) = smw;
    U(n - k, k + m + 1) = -smw;
  }
  std::string name = "paired-n" + std::to_string(n);
  if (!tag.empty()) name += "-" + tag;
  return detail::assemble(std::move(name), ms, std::move(U),
                          "antipodal pairs with balanced unimodular weights; N = n+1");
}

/** The mixed five-frequency family: one angle theta1 in (pi/2, 2pi/3) fixes
 *  the moduli in closed form (two antipodal pairs plus one free frequency)
 *  and a unimodular t parametrizes the remaining W entry.  N = 6. */
inline ModuliSolution mixed_family_moduli(double theta1 = 0.6 * std::numbers::pi) {
  if (!(theta1 > 0.5 * std::numbers::pi && theta1 < 2.0 * std::numbers::pi / 3.0))
    throw std::invalid_argument("mixed_family_moduli: theta1 outside (pi/2, 2pi/3)");
  const double c = std::cos(theta1);  // negative on the admissible interval
  const double s = 1.0 / (2.0 + 2.0 * std::abs(c));
  const double r_free = 2.0 * s * std::abs(c);
  const double d = s * std::abs(c) / std::cos(theta1 / 2.0);
  ModuliSolution ms;
  ms.n = 4;
  const double hi = (s + d) / 2.0, lo = (s - d) / 2.0;
  ms.r = {hi, hi, lo, r_free, lo};
  ms.theta = {theta1, std::numbers::pi, theta1 / 2.0 + std::numbers::pi, theta1 + std::numbers::pi};
  validate(ms);
  return ms;
}

inline CatalogEntry catalog_mixed_family(cplx t, double theta1 = 0.6 * std::numbers::pi) {
  if (std::abs(std::abs(t) - 1.0) > tol::numeric)
    throw std::invalid_argument("catalog_mixed_family: t must be unimodular");
  const ModuliSolution ms = mixed_family_moduli(theta1);
  // antipodal pairs (0,2) weight +1 and (1,4) weight -1; index 3 free
  const int N = 6;
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(N, N);
  const double inv = 1.0 / std::sqrt(2.0);
  const cplx iu(0.0, 1.0);
  U(0, 0) = inv;
  U(0, 2) = inv;
  U(1, 0) = iu * inv;
  U(1, 2) = -iu * inv;
  U(2, 1) = inv;
  U(2, 4) = -inv;
  U(3, 1) = iu * inv;
  U(3, 4) = iu * inv;
  const cplx st = sqrt_principal(t) * inv;
  const cplx smt = sqrt_principal(-t) * inv;
  U(4, 3) = st;
  U(4, 5) = st;
  U(5, 3) = smt;
  U(5, 5) = -smt;
  CatalogEntry e = detail::assemble("mixed-family", ms, std::move(U),
                                    "two weighted antipodal pairs plus one free "
                                    "frequency; W(3,5) carries the family parameter");
  return e;
}

/** Weights (1, omega, omega^2), omega a primitive cube root of unity: balance
 *  any paired moduli with equal pair products r_k r_{k+m+1}. */
inline std::vector<cplx> cube_root_weights() {
  const cplx omega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  return {cplx(1.0), omega, omega * omega};
}

/** Fully paired non-Clifford six-frequency moduli: equally spaced angles but
 *  alternating weights r = (7/60, 13/60, ...), still satisfying all three
 *  moment constraints and equal pair products. */
inline ModuliSolution skew_paired_moduli() {
  ModuliSolution ms;
  ms.n = 5;
  const double lo = (1.0 / 3.0 - 0.1) / 2.0, hi = (1.0 / 3.0 + 0.1) / 2.0;
  ms.r = {lo, hi, lo, hi, lo, hi};
  ms.theta = {std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0, std::numbers::pi, 4.0 * std::numbers::pi / 3.0, 5.0 * std::numbers::pi / 3.0};
  validate(ms);
  return ms;
}

/** Named registry used by the CLI and the verification battery. */
inline CatalogEntry catalog(const std::string& name) {
  if (name == "doubling-n2") return catalog_doubling(2);
  if (name == "doubling-n3") return catalog_doubling(3);
  if (name == "doubling-n5") return catalog_doubling(5);
  if (name == "paired-n3") return catalog_paired(clifford(3), {1.0, -1.0});
  if (name == "paired-n5") return catalog_paired(clifford(5), cube_root_weights());
  if (name == "paired-n5-skew")
    return catalog_paired(skew_paired_moduli(), cube_root_weights(), "skew");
  if (name == "mixed-family") return catalog_mixed_family(cplx(1.0));
  throw std::invalid_argument("catalog: unknown entry '" + name + "'");
}

inline std::vector<std::string> catalog_names() {
  return {"doubling-n2", "doubling-n3",    "doubling-n5",  "paired-n3",
          "paired-n5",   "paired-n5-skew", "mixed-family"};
}

/* ------------------------------- verification ----------------------------- */

/** Residual battery for one catalog entry; every field should be ~0. */
struct EntryChecks {
  double unitarity = 0.0;       // ||U U* - I||
  double unit_norm = 0.0;       // || |f0|^2 - 1 ||
  double quadric = 0.0;         // bilinear self-pairing of f0
  double quadric_via_w = 0.0;   // same through the W-form
  double ledger = 0.0;          // frequency-class constraints on W
  double harmonic = 0.0;        // dzbar A_z - [A_z, A_zbar]
  double metric_flatness = 0.0; // -tr(A_z A_zbar) - 4
  double first_order = 0.0;     // frame equations
  double orthogonality = 0.0;   // frame orthogonality relations

  double worst() const {
    return std::max({unitarity, unit_norm, quadric, quadric_via_w, ledger,
                     harmonic, metric_flatness, first_order, orthogonality});
  }
};

inline EntryChecks verify_entry(const CatalogEntry& e) {
  EntryChecks c;
  c.unitarity = (e.U * e.U.adjoint() -
                 Eigen::MatrixXcd::Identity(e.U.rows(), e.U.cols()))
                    .cwiseAbs()
                    .maxCoeff();
  c.unit_norm = unit_norm_residual(e.f0).max_abs_coeff();
  c.quadric = quadric_residual(e.f0);
  c.quadric_via_w = quadric_residual(e.W, e.ms);
  c.ledger = constraint_residual(e.W, derive_constraints(e.ms));

  const ProjectorData pd = projector(e.f0);
  c.harmonic = harmonic_residual(pd).max_abs_coeff();
  c.metric_flatness =
      (metric_density(pd) - ExpPoly::constant(4.0)).max_abs_coeff();

  const FrameFields ff = frame_fields(e.f0);
  const auto [r1, r2] = first_order_residual(ff, e.f0);
  c.first_order = std::max(max_abs_coeff(r1), max_abs_coeff(r2));
  const auto orth = frame_orthogonality(ff, e.f0);
  c.orthogonality = std::max(
      {orth[0].max_abs_coeff(), orth[1].max_abs_coeff(), orth[2].max_abs_coeff()});
  return c;
}

}  // namespace qflat
