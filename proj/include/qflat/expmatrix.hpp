#pragma once

#include <Eigen/Dense>

#include "qflat/exppoly.hpp"

namespace qflat {

/**
 * ExpMatrix: dense matrix with ExpPoly entries.
 *
 * Carries the projector / Maurer-Cartan data of the geometry layer: the
 * rank-two projector phi, the flat-connection pieces A_z and A_zbar, and the
 * residuals of the structure equations.  Products canonicalize one gathered
 * term list per output entry, which keeps the N^3 pipelines cheap.
 */
class ExpMatrix {
 public:
  ExpMatrix() = default;
  ExpMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ExpMatrix identity(std::size_t n) {
    ExpMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = ExpPoly::constant(1.0);
    return m;
  }

  /** u v^* : entry (i,j) = u_i conj(v_j). */
  static ExpMatrix outer_herm(const ExpVec& u, const ExpVec& v) {
    ExpMatrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j].conj();
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  ExpPoly& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const ExpPoly& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  ExpMatrix operator+(const ExpMatrix& o) const {
    check_same_shape(o, "+");
    ExpMatrix m(*this);
    for (std::size_t k = 0; k < data_.size(); ++k) m.data_[k] += o.data_[k];
    return m;
  }

  ExpMatrix operator-(const ExpMatrix& o) const {
    check_same_shape(o, "-");
    ExpMatrix m(*this);
    for (std::size_t k = 0; k < data_.size(); ++k) m.data_[k] -= o.data_[k];
    return m;
  }

  ExpMatrix operator*(const ExpMatrix& o) const {
    if (cols_ != o.rows_)
      throw std::invalid_argument("ExpMatrix: shape mismatch in *");
    ExpMatrix m(rows_, o.cols_);
    std::vector<ExpPoly::Term> raw;
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < o.cols_; ++j) {
        raw.clear();
        for (std::size_t k = 0; k < cols_; ++k)
          ExpPoly::append_product((*this)(i, k), o(k, j), raw);
        m(i, j) = ExpPoly::from_terms(raw);
      }
    }
    return m;
  }

  ExpMatrix operator*(cplx s) const {
    ExpMatrix m(*this);
    for (ExpPoly& p : m.data_) p = p * s;
    return m;
  }
  friend ExpMatrix operator*(cplx s, const ExpMatrix& m) { return m * s; }

  ExpMatrix conj() const { return map([](const ExpPoly& p) { return p.conj(); }); }
  ExpMatrix dz() const { return map([](const ExpPoly& p) { return p.dz(); }); }
  ExpMatrix dzbar() const { return map([](const ExpPoly& p) { return p.dzbar(); }); }

  ExpMatrix transpose() const {
    ExpMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  ExpMatrix adjoint() const { return conj().transpose(); }

  ExpPoly trace() const {
    if (rows_ != cols_) throw std::invalid_argument("ExpMatrix: trace of non-square");
    ExpPoly t;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  Eigen::MatrixXcd eval(cplx z) const {
    Eigen::MatrixXcd m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).eval(z);
    return m;
  }

  double max_abs_coeff() const {
    double v = 0.0;
    for (const ExpPoly& p : data_) v = std::max(v, p.max_abs_coeff());
    return v;
  }

  bool is_zero(double coeff_tol = tol::coeff) const {
    return max_abs_coeff() <= coeff_tol;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<ExpPoly> data_;

  template <class F>
  ExpMatrix map(F f) const {
    ExpMatrix m(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) m.data_[k] = f(data_[k]);
    return m;
  }

  void check_same_shape(const ExpMatrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument(std::string("ExpMatrix: shape mismatch in ") + op);
  }
};

/** [a,b] = ab - ba. */
inline ExpMatrix commutator(const ExpMatrix& a, const ExpMatrix& b) {
  return a * b - b * a;
}

inline Eigen::VectorXcd eval(const ExpVec& v, cplx z) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i].eval(z);
  return out;
}

}  // namespace qflat
