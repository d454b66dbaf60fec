// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#include "chernlab/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace chernlab {

namespace {

bool is_scalar(const Json& j) { return !j.is_structured(); }

bool is_flat(const Json& j) {
  if (!j.is_array()) return false;
  for (const auto& x : j) {
    if (is_scalar(x)) continue;
    if (!x.is_array()) return false;
    for (const auto& y : x)
      if (!is_scalar(y)) return false;
  }
  return true;
}

void write_scalar(std::string& out, const Json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      out += "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
    return;
  }
  out += j.dump();
}

void write(std::string& out, const Json& j, int indent, int level) {
  if (is_scalar(j)) {
    write_scalar(out, j);
    return;
  }
  const bool inline_form = indent < 0 || is_flat(j);
  const std::string pad = inline_form ? "" : "\n" + std::string((level + 1) * indent, ' ');
  const std::string close = inline_form ? "" : "\n" + std::string(level * indent, ' ');
  const char* sep = inline_form && indent >= 0 ? ", " : ",";
  if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    out += "[";
    bool first = true;
    for (const auto& x : j) {
      if (!first) out += sep;
      first = false;
      out += pad;
      write(out, x, inline_form ? -1 : indent, level + 1);
    }
    out += close + "]";
    return;
  }
  if (j.empty()) {
    out += "{}";
    return;
  }
  out += "{";
  bool first = true;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!first) out += ",";
    first = false;
    out += pad;
    out += Json(it.key()).dump();
    out += indent >= 0 ? ": " : ":";
    write(out, it.value(), indent, level + 1);
  }
  out += close + "}";
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("json: missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw Error("json: complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) throw Error("json: vector must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = cplx_from_json(j[i]);
  return v;
}

Json to_json(const Mat& a) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) data.push_back(to_json(a(i, k)));
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"data", data}};
}

Mat mat_from_json(const Json& j) {
  const int r = field(j, "rows").get<int>(), c = field(j, "cols").get<int>();
  const Json& d = field(j, "data");
  if (r < 0 || c < 0 || !d.is_array() || d.size() != static_cast<size_t>(r) * c)
    throw Error("json: matrix data does not match rows * cols");
  Mat a(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) a(i, k) = cplx_from_json(d[static_cast<size_t>(i) * c + k]);
  return a;
}

Json to_json(const DgAlgebra& A) {
  Json mul = Json::array(), diff = Json::array();
  for (const auto& t : A.mul_triplets())
    mul.push_back(Json::array({t.i, t.j, t.k, t.c.real(), t.c.imag()}));
  for (const auto& t : A.diff_entries()) diff.push_back(Json::array({t.i, t.j, t.c.real(), t.c.imag()}));
  Json j = {{"name", A.name()}, {"dim", A.dim()},  {"degrees", A.degrees()},
            {"unit_index", A.unit()}, {"mul", mul}, {"diff", diff}};
  if (A.is_extension()) j["extension_base_dim"] = A.base_dim();
  return j;
}

AlgebraPtr algebra_from_json(const Json& j) {
  const auto degrees = field(j, "degrees").get<std::vector<int>>();
  const int dim = field(j, "dim").get<int>();
  if (dim != static_cast<int>(degrees.size())) throw Error("json: algebra dim does not match degrees");
  std::vector<DgAlgebra::MulTriplet> mul;
  for (const auto& t : field(j, "mul")) {
    if (!t.is_array() || t.size() != 5) throw Error("json: mul entries are [i, j, k, re, im]");
    mul.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>(), {t[3].get<double>(), t[4].get<double>()}});
  }
  std::vector<DgAlgebra::DiffEntry> diff;
  for (const auto& t : field(j, "diff")) {
    if (!t.is_array() || t.size() != 4) throw Error("json: diff entries are [i, j, re, im]");
    diff.push_back({t[0].get<int>(), t[1].get<int>(), {t[2].get<double>(), t[3].get<double>()}});
  }
  auto A = std::make_shared<DgAlgebra>(j.value("name", std::string("algebra")), degrees,
                                       field(j, "unit_index").get<int>(), mul, diff);
  if (j.contains("extension_base_dim")) A->set_extension_base(j["extension_base_dim"].get<int>());
  return A;
}

Json to_json(const CliffordModule& cm) {
  Json e = Json::array();
  for (const auto& x : cm.e) e.push_back(to_json(x));
  return {{"q", cm.q}, {"parity", cm.H.parity}, {"e", e}};
}

CliffordModule clifford_from_json(const Json& j) {
  CliffordModule cm;
  cm.q = field(j, "q").get<int>();
  cm.H.parity = field(j, "parity").get<std::vector<int>>();
  for (const auto& x : field(j, "e")) cm.e.push_back(mat_from_json(x));
  if (static_cast<int>(cm.e.size()) != cm.q) throw Error("json: clifford needs q generators");
  for (const auto& x : cm.e)
    if (x.rows() != cm.dim() || x.cols() != cm.dim()) throw Error("json: clifford generator has wrong size");
  return cm;
}

namespace {

Json c_list(const std::vector<Mat>& c) {
  Json a = Json::array();
  for (const auto& x : c) a.push_back(to_json(x));
  return a;
}

std::vector<Mat> c_from(const Json& j, int alg_dim, int hdim) {
  std::vector<Mat> c;
  for (const auto& x : j) c.push_back(mat_from_json(x));
  if (static_cast<int>(c.size()) != alg_dim) throw Error("json: module needs one c matrix per basis element");
  for (const auto& x : c)
    if (x.rows() != hdim || x.cols() != hdim) throw Error("json: module c matrix has wrong size");
  return c;
}

}  // namespace

Json to_json(const CqModule& M) {
  return {{"kind", "cq_module"},      {"name", M.name}, {"algebra", to_json(*M.alg)},
          {"clifford", to_json(M.cm)}, {"c", c_list(M.c)}, {"Q", to_json(M.Q)},
          {"weak", M.weak}};
}

CqModule cq_module_from_json(const Json& j) {
  CqModule M;
  M.alg = algebra_from_json(field(j, "algebra"));
  M.cm = clifford_from_json(field(j, "clifford"));
  M.Q = mat_from_json(field(j, "Q"));
  if (M.Q.rows() != M.dim() || M.Q.cols() != M.dim()) throw Error("json: Q has wrong size");
  M.c = c_from(field(j, "c"), M.alg->dim(), M.dim());
  M.weak = field(j, "weak").get<bool>();
  M.name = j.value("name", std::string());
  return M;
}

Json to_json(const OddModule& M) {
  return {{"kind", "odd_module"}, {"name", M.name}, {"algebra", to_json(*M.alg)},
          {"c", c_list(M.c)},     {"Q", to_json(M.Q)}, {"weak", M.weak}};
}

OddModule odd_module_from_json(const Json& j) {
  OddModule M;
  M.alg = algebra_from_json(field(j, "algebra"));
  M.Q = mat_from_json(field(j, "Q"));
  if (M.Q.rows() != M.Q.cols()) throw Error("json: Q must be square");
  M.c = c_from(field(j, "c"), M.alg->dim(), M.dim());
  M.weak = field(j, "weak").get<bool>();
  M.name = j.value("name", std::string());
  return M;
}

Json to_json(const DgAlgebra& A, const MatrixElement& x) {
  Json e = Json::array();
  for (const auto& v : x.entries) e.push_back(to_json(v));
  return {{"kind", "matrix_element"}, {"algebra", to_json(A)}, {"m", x.m}, {"entries", e}};
}

MatrixElement matrix_element_from_json(const DgAlgebra& A, const Json& j) {
  MatrixElement x;
  x.m = field(j, "m").get<int>();
  if (x.m < 1) throw Error("json: matrix element needs m >= 1");
  for (const auto& v : field(j, "entries")) x.entries.push_back(vec_from_json(v));
  if (x.entries.size() != static_cast<size_t>(x.m) * x.m) throw Error("json: matrix element needs m*m entries");
  for (const auto& v : x.entries)
    if (v.size() != A.dim()) throw Error("json: matrix element entry has wrong length");
  return x;
}

Json to_json(const Chain& c) {
  Json terms = Json::array();
  for (const auto& t : c.terms()) {
    Json slots = Json::array();
    for (int i = 0; i < t.word.size(); ++i) slots.push_back(to_json(Vec(c.alg().basis(t.word[i]))));
    terms.push_back({{"coeff", to_json(t.coeff)}, {"slots", slots}});
  }
  return {{"algebra", c.alg().name()},
          {"kind", c.kind() == ChainKind::cyclic ? "cyclic" : "bar"},
          {"terms", terms}};
}

Chain chain_from_json(const AlgebraPtr& A, const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind != "cyclic" && kind != "bar") throw Error("json: chain kind must be cyclic or bar");
  const ChainKind k = kind == "cyclic" ? ChainKind::cyclic : ChainKind::bar;
  Chain out(A, k);
  for (const auto& t : field(j, "terms")) {
    ElementWord w;
    for (const auto& s : field(t, "slots")) {
      w.push_back(vec_from_json(s));
      if (w.back().size() != A->dim()) throw Error("json: chain slot has wrong length");
    }
    out.add_chain(expand(A, w, k, cplx_from_json(field(t, "coeff"))));
  }
  out.canonicalize();
  return out;
}

bool same_algebra(const DgAlgebra& a, const DgAlgebra& b) {
  if (a.dim() != b.dim() || a.unit() != b.unit() || a.degrees() != b.degrees()) return false;
  for (int i = 0; i < a.dim(); ++i) {
    if (a.diff(i).size() != b.diff(i).size()) return false;
    for (size_t t = 0; t < a.diff(i).size(); ++t)
      if (a.diff(i)[t].index != b.diff(i)[t].index || a.diff(i)[t].coeff != b.diff(i)[t].coeff) return false;
    for (int k = 0; k < a.dim(); ++k) {
      const auto &x = a.product(i, k), &y = b.product(i, k);
      if (x.size() != y.size()) return false;
      for (size_t t = 0; t < x.size(); ++t)
        if (x[t].index != y[t].index || x[t].coeff != y[t].coeff) return false;
    }
  }
  return true;
}

}  // namespace chernlab
