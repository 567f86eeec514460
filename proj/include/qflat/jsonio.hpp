#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "qflat/curves.hpp"
#include "qflat/moduli.hpp"

namespace qflat {

using nlohmann::json;

namespace detail {

inline void require_schema(const json& j, const char* tag) {
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string() ||
      j["schema"].get<std::string>() != tag)
    throw std::invalid_argument(std::string("jsonio: expected schema \"") + tag + "\"");
}

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/* terms are stored as [re_freq, im_freq, re_coeff, im_coeff] quadruples */
inline json to_json(const ExpPoly& p) {
  json terms = json::array();
  for (const ExpPoly::Term& t : p.terms())
    terms.push_back({t.freq.real(), t.freq.imag(), t.coeff.real(), t.coeff.imag()});
  return json{{"schema", "qflat-exppoly/1"}, {"terms", std::move(terms)}};
}

inline ExpPoly exppoly_from_json(const json& j) {
  detail::require_schema(j, "qflat-exppoly/1");
  if (!j.contains("terms") || !j["terms"].is_array())
    throw std::invalid_argument("jsonio: exppoly needs a terms array");
  std::vector<ExpPoly::Term> terms;
  for (const json& t : j["terms"]) {
    if (!t.is_array() || t.size() != 4)
      throw std::invalid_argument("jsonio: each term is a [re_freq, im_freq, re_coeff, im_coeff] quadruple");
    terms.push_back({cplx(t[0].get<double>(), t[1].get<double>()),
                     cplx(t[2].get<double>(), t[3].get<double>())});
  }
  return ExpPoly::from_terms(terms);
}

inline json to_json(const Curve& c) {
  json comps = json::array();
  for (const ExpPoly& p : c.f) comps.push_back(to_json(p));
  json fm = json::array();
  for (const cplx& a : c.freq_mult) fm.push_back({a.real(), a.imag()});
  return json{{"schema", "qflat-curve/1"},
              {"components", std::move(comps)},
              {"freq_mult", std::move(fm)}};
}

inline Curve curve_from_json(const json& j) {
  detail::require_schema(j, "qflat-curve/1");
  if (!j.contains("components") || !j["components"].is_array() || j["components"].empty())
    throw std::invalid_argument("jsonio: curve needs a nonempty components array");
  Curve c;
  for (const json& comp : j["components"]) c.f.push_back(exppoly_from_json(comp));
  if (j.contains("freq_mult")) {
    for (const json& a : j["freq_mult"]) {
      if (!a.is_array() || a.size() != 2)
        throw std::invalid_argument("jsonio: freq_mult entries are [re, im] pairs");
      c.freq_mult.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
  }
  return c;
}

inline json to_json(const ModuliSolution& ms) {
  return json{{"schema", "qflat-moduli/1"}, {"n", ms.n}, {"r", ms.r}, {"theta", ms.theta}};
}

inline ModuliSolution moduli_from_json(const json& j) {
  detail::require_schema(j, "qflat-moduli/1");
  for (const char* key : {"n", "r", "theta"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("jsonio: moduli needs \"") + key + "\"");
  ModuliSolution ms;
  ms.n = j["n"].get<int>();
  ms.r = j["r"].get<std::vector<double>>();
  ms.theta = j["theta"].get<std::vector<double>>();
  validate(ms);
  return ms;
}

inline json to_json(const Eigen::MatrixXcd& M) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      rrow.push_back(M(i, j).real());
      irow.push_back(M(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"schema", "qflat-matrix/1"},
              {"rows", M.rows()},
              {"cols", M.cols()},
              {"re", std::move(re)},
              {"im", std::move(im)}};
}

inline Eigen::MatrixXcd matrix_from_json(const json& j) {
  detail::require_schema(j, "qflat-matrix/1");
  for (const char* key : {"rows", "cols", "re", "im"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("jsonio: matrix needs \"") + key + "\"");
  const Eigen::Index rows = j["rows"].get<Eigen::Index>();
  const Eigen::Index cols = j["cols"].get<Eigen::Index>();
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("jsonio: matrix dimensions must be positive");
  Eigen::MatrixXcd M(rows, cols);
  const json& re = j["re"];
  const json& im = j["im"];
  if (!re.is_array() || !im.is_array() || static_cast<Eigen::Index>(re.size()) != rows ||
      static_cast<Eigen::Index>(im.size()) != rows)
    throw std::invalid_argument("jsonio: matrix re/im row counts disagree with rows");
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(re[i].size()) != cols ||
        static_cast<Eigen::Index>(im[i].size()) != cols)
      throw std::invalid_argument("jsonio: matrix re/im column counts disagree with cols");
    for (Eigen::Index jj = 0; jj < cols; ++jj)
      M(i, jj) = cplx(re[i][jj].get<double>(), im[i][jj].get<double>());
  }
  return M;
}

/**
 * Curve samples as CSV: one row per sample point, columns re_z, im_z and
 * re/im of every component, all printed with %.17g so the file is a
 * bit-deterministic function of the inputs.
 */
inline std::string curve_samples_csv(const Curve& c, const std::vector<cplx>& zs) {
  std::string out = "re_z,im_z";
  for (std::size_t k = 0; k < c.f.size(); ++k) {
    out += ",re_f" + std::to_string(k);
    out += ",im_f" + std::to_string(k);
  }
  out += "\n";
  for (const cplx& z : zs) {
    out += detail::g17(z.real()) + "," + detail::g17(z.imag());
    for (const ExpPoly& p : c.f) {
      const cplx v = p.eval(z);
      out += "," + detail::g17(v.real()) + "," + detail::g17(v.imag());
    }
    out += "\n";
  }
  return out;
}

}  // namespace qflat
