// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#include "chernlab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/QR>

namespace chernlab {

void ValidationReport::add(std::string name, double residual, double tol) {
  items.push_back({std::move(name), residual, tol, residual <= tol});
}

bool ValidationReport::pass() const {
  return std::all_of(items.begin(), items.end(), [](const ValidationItem& i) { return i.pass; });
}

double ValidationReport::max_residual() const {
  double r = 0.0;
  for (const auto& i : items) r = std::max(r, i.residual);
  return r;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os.precision(3);
  for (const auto& i : items)
    os << (i.pass ? "ok   " : "FAIL ") << i.name << "  residual=" << i.residual << " tol=" << i.tol
       << "\n";
  return os.str();
}

DgAlgebra::DgAlgebra(std::string name, std::vector<int> degrees, int unit_index,
                     const std::vector<MulTriplet>& mul, const std::vector<DiffEntry>& diff)
    : name_(std::move(name)), degrees_(std::move(degrees)), unit_(unit_index) {
  const int n = dim();
  if (n < 1) throw Error("DgAlgebra: dim must be positive");
  if (unit_ < 0 || unit_ >= n) throw Error("DgAlgebra: unit_index out of range");
  mul_.assign(static_cast<size_t>(n) * n, {});
  diff_.assign(n, {});
  for (const auto& t : mul) {
    if (t.i < 0 || t.j < 0 || t.k < 0 || t.i >= n || t.j >= n || t.k >= n)
      throw Error("DgAlgebra: structure constant index out of range");
    if (t.c == cplx(0.0)) continue;
    auto& s = mul_[static_cast<size_t>(t.i) * n + t.j];
    auto it = std::find_if(s.begin(), s.end(), [&](const SparseTerm& x) { return x.index == t.k; });
    if (it != s.end())
      it->coeff += t.c;
    else
      s.push_back({t.k, t.c});
  }
  for (const auto& t : diff) {
    if (t.i < 0 || t.j < 0 || t.i >= n || t.j >= n)
      throw Error("DgAlgebra: differential index out of range");
    if (t.c == cplx(0.0)) continue;
    auto& s = diff_[t.j];
    auto it = std::find_if(s.begin(), s.end(), [&](const SparseTerm& x) { return x.index == t.i; });
    if (it != s.end())
      it->coeff += t.c;
    else
      s.push_back({t.i, t.c});
  }
  auto by_index = [](const SparseTerm& a, const SparseTerm& b) { return a.index < b.index; };
  for (auto& s : mul_) std::sort(s.begin(), s.end(), by_index);
  for (auto& s : diff_) std::sort(s.begin(), s.end(), by_index);
}

std::vector<DgAlgebra::MulTriplet> DgAlgebra::mul_triplets() const {
  std::vector<MulTriplet> out;
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j)
      for (const auto& t : product(i, j)) out.push_back({i, j, t.index, t.coeff});
  return out;
}

std::vector<DgAlgebra::DiffEntry> DgAlgebra::diff_entries() const {
  std::vector<DiffEntry> out;
  for (int j = 0; j < dim(); ++j)
    for (const auto& t : diff(j)) out.push_back({t.index, j, t.coeff});
  return out;
}

int DgAlgebra::sigma_index() const {
  if (!is_extension()) throw Error("algebra is not an acyclic extension");
  return base_dim_ + unit_;
}

Vec DgAlgebra::basis(int i) const {
  Vec v = zero();
  v(i) = 1.0;
  return v;
}

Vec DgAlgebra::multiply(const Vec& a, const Vec& b) const {
  Vec out = zero();
  for (int i = 0; i < dim(); ++i) {
    if (a(i) == cplx(0.0)) continue;
    for (int j = 0; j < dim(); ++j) {
      if (b(j) == cplx(0.0)) continue;
      const cplx ab = a(i) * b(j);
      for (const auto& t : product(i, j)) out(t.index) += ab * t.coeff;
    }
  }
  return out;
}

Vec DgAlgebra::d(const Vec& a) const {
  Vec out = zero();
  for (int j = 0; j < dim(); ++j) {
    if (a(j) == cplx(0.0)) continue;
    for (const auto& t : diff(j)) out(t.index) += a(j) * t.coeff;
  }
  return out;
}

std::optional<int> DgAlgebra::homogeneous_degree(const Vec& a, double tol) const {
  std::optional<int> deg;
  for (int i = 0; i < dim(); ++i) {
    if (std::abs(a(i)) <= tol) continue;
    if (deg && *deg != degrees_[i]) return std::nullopt;
    deg = degrees_[i];
  }
  return deg;
}

Vec DgAlgebra::degree_part(const Vec& a, int deg) const {
  Vec out = zero();
  for (int i = 0; i < dim(); ++i)
    if (degrees_[i] == deg) out(i) = a(i);
  return out;
}

std::vector<int> DgAlgebra::degrees_present(const Vec& a, double tol) const {
  std::vector<int> out;
  for (int i = 0; i < dim(); ++i)
    if (std::abs(a(i)) > tol) out.push_back(degrees_[i]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> DgAlgebra::basis_of_degree(int deg) const {
  std::vector<int> out;
  for (int i = 0; i < dim(); ++i)
    if (degrees_[i] == deg) out.push_back(i);
  return out;
}

namespace {

void accumulate(Vec& v, const Sparse& s, cplx a) {
  for (const auto& t : s) v(t.index) += a * t.coeff;
}

}  // namespace

ValidationReport dga_validate(const DgAlgebra& alg, double tol) {
  ValidationReport rep;
  const int n = alg.dim();
  const int u = alg.unit();

  double unit_res = 0.0;
  for (int j = 0; j < n; ++j) {
    Vec l = alg.zero(), r = alg.zero();
    accumulate(l, alg.product(u, j), 1.0);
    accumulate(r, alg.product(j, u), 1.0);
    l(j) -= 1.0;
    r(j) -= 1.0;
    unit_res = std::max({unit_res, l.cwiseAbs().maxCoeff(), r.cwiseAbs().maxCoeff()});
  }
  rep.add("unit laws", unit_res, tol);

  double grading_res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (const auto& t : alg.product(i, j))
        if (alg.degree(t.index) != alg.degree(i) + alg.degree(j))
          grading_res = std::max(grading_res, std::abs(t.coeff));
  double dgrading_res = 0.0;
  for (int j = 0; j < n; ++j)
    for (const auto& t : alg.diff(j))
      if (alg.degree(t.index) != alg.degree(j) + 1)
        dgrading_res = std::max(dgrading_res, std::abs(t.coeff));
  rep.add("product grading", grading_res, tol);
  rep.add("differential degree", dgrading_res, tol);

  double d1 = 0.0;
  for (const auto& t : alg.diff(u)) d1 = std::max(d1, std::abs(t.coeff));
  rep.add("unit differential", d1, tol);

  double dd = 0.0;
  for (int j = 0; j < n; ++j) {
    Vec v = alg.zero();
    for (const auto& t : alg.diff(j)) accumulate(v, alg.diff(t.index), t.coeff);
    dd = std::max(dd, v.cwiseAbs().maxCoeff());
  }
  rep.add("d^2 = 0", dd, tol);

  double assoc = 0.0;
  Vec lhs = alg.zero(), rhs = alg.zero();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Sparse& ij = alg.product(i, j);
      for (int l = 0; l < n; ++l) {
        lhs.setZero();
        rhs.setZero();
        for (const auto& t : ij) accumulate(lhs, alg.product(t.index, l), t.coeff);
        for (const auto& t : alg.product(j, l)) accumulate(rhs, alg.product(i, t.index), t.coeff);
        if (lhs.size()) assoc = std::max(assoc, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
  rep.add("associativity", assoc, tol);

  double leib = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      lhs.setZero();
      rhs.setZero();
      for (const auto& t : alg.product(i, j)) accumulate(lhs, alg.diff(t.index), t.coeff);
      for (const auto& t : alg.diff(i)) accumulate(rhs, alg.product(t.index, j), t.coeff);
      const double s = sign_of(alg.degree(i));
      for (const auto& t : alg.diff(j)) accumulate(rhs, alg.product(i, t.index), s * t.coeff);
      leib = std::max(leib, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  rep.add("graded Leibniz", leib, tol);
  return rep;
}

AlgebraPtr acyclic_extension(const DgAlgebra& alg) {
  if (alg.is_extension()) throw Error("acyclic_extension: algebra is already extended");
  const int n = alg.dim();
  std::vector<int> deg(2 * n);
  for (int i = 0; i < n; ++i) {
    deg[i] = alg.degree(i);
    deg[n + i] = alg.degree(i) - 1;
  }
  std::vector<DgAlgebra::MulTriplet> mul;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (const auto& t : alg.product(i, j)) {
        mul.push_back({i, j, t.index, t.coeff});
        // a (sigma b) = (-1)^|a| sigma a b ; (sigma a) b = sigma a b
        mul.push_back({i, n + j, n + t.index, sign_of(alg.degree(i)) * t.coeff});
        mul.push_back({n + i, j, n + t.index, t.coeff});
      }
  std::vector<DgAlgebra::DiffEntry> diff;
  for (int j = 0; j < n; ++j) {
    for (const auto& t : alg.diff(j)) {
      diff.push_back({t.index, j, t.coeff});
      diff.push_back({n + t.index, n + j, -t.coeff});
    }
    diff.push_back({j, n + j, -1.0});
  }
  auto out = std::make_shared<DgAlgebra>(alg.name() + "_T", deg, alg.unit(), mul, diff);
  out->set_extension_base(n);
  return out;
}

AlgebraPtr mat_lift(const DgAlgebra& alg, int m) {
  if (m < 1) throw Error("mat_lift: m must be positive");
  const int n = alg.dim();
  const int u = alg.unit();
  const int p = u;  // index of E_00 (x) 1
  auto idx = [&](int a, int b, int i) { return (a * m + b) * n + i; };
  const int big = m * m * n;
  std::vector<int> deg(big);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int i = 0; i < n; ++i) deg[idx(a, b, i)] = alg.degree(i);

  // Old coordinates -> new coordinates (identity placed at p).
  auto to_new = [&](Vec& v) {
    const cplx xp = v(p);
    for (int a = 1; a < m; ++a) v(idx(a, a, u)) -= xp;
  };
  auto old_basis = [&](int k) {
    Vec v = Vec::Zero(big);
    if (k == p)
      for (int a = 0; a < m; ++a) v(idx(a, a, u)) = 1.0;
    else
      v(k) = 1.0;
    return v;
  };
  auto old_mul = [&](const Vec& x, const Vec& y) {
    Vec out = Vec::Zero(big);
    for (int k = 0; k < big; ++k) {
      if (x(k) == cplx(0.0)) continue;
      const int a = k / (m * n), b = (k / n) % m, i = k % n;
      for (int dd = 0; dd < m; ++dd)
        for (int j = 0; j < n; ++j) {
          const int l = idx(b, dd, j);
          if (y(l) == cplx(0.0)) continue;
          for (const auto& t : alg.product(i, j)) out(idx(a, dd, t.index)) += x(k) * y(l) * t.coeff;
        }
    }
    return out;
  };
  std::vector<DgAlgebra::MulTriplet> mul;
  for (int k = 0; k < big; ++k) {
    Vec xk = old_basis(k);
    for (int l = 0; l < big; ++l) {
      // Cheap skip: E_ab E_cd = 0 unless b == c.
      if (k != p && l != p) {
        const int b = (k / n) % m, c = l / (m * n);
        if (b != c) continue;
        const int i = k % n, j = l % n;
        if (alg.product(i, j).empty()) continue;
      }
      Vec r = old_mul(xk, old_basis(l));
      to_new(r);
      for (int t = 0; t < big; ++t)
        if (r(t) != cplx(0.0)) mul.push_back({k, l, t, r(t)});
    }
  }
  std::vector<DgAlgebra::DiffEntry> diff;
  for (int k = 0; k < big; ++k) {
    if (k == p) continue;
    const int a = k / (m * n), b = (k / n) % m, i = k % n;
    Vec r = Vec::Zero(big);
    for (const auto& t : alg.diff(i)) r(idx(a, b, t.index)) += t.coeff;
    to_new(r);
    for (int t = 0; t < big; ++t)
      if (r(t) != cplx(0.0)) diff.push_back({t, k, r(t)});
  }
  return std::make_shared<DgAlgebra>("Mat" + std::to_string(m) + "(" + alg.name() + ")", deg, p,
                                     mul, diff);
}

MatrixElement mat_zero(const DgAlgebra& alg, int m) {
  MatrixElement x;
  x.m = m;
  x.entries.assign(static_cast<size_t>(m) * m, alg.zero());
  return x;
}

MatrixElement mat_identity(const DgAlgebra& alg, int m) {
  MatrixElement x = mat_zero(alg, m);
  for (int a = 0; a < m; ++a) x.at(a, a) = alg.one();
  return x;
}

MatrixElement mat_mul(const DgAlgebra& alg, const MatrixElement& x, const MatrixElement& y) {
  if (x.m != y.m) throw Error("mat_mul: size mismatch");
  MatrixElement z = mat_zero(alg, x.m);
  for (int a = 0; a < x.m; ++a)
    for (int c = 0; c < x.m; ++c)
      for (int b = 0; b < x.m; ++b) z.at(a, c) += alg.multiply(x.at(a, b), y.at(b, c));
  return z;
}

MatrixElement mat_add(const MatrixElement& x, const MatrixElement& y, cplx b) {
  if (x.m != y.m) throw Error("mat_add: size mismatch");
  MatrixElement z = x;
  for (size_t i = 0; i < z.entries.size(); ++i) z.entries[i] += b * y.entries[i];
  return z;
}

MatrixElement mat_scale(const MatrixElement& x, cplx a) {
  MatrixElement z = x;
  for (auto& e : z.entries) e *= a;
  return z;
}

MatrixElement mat_d(const DgAlgebra& alg, const MatrixElement& x) {
  MatrixElement z = x;
  for (auto& e : z.entries) e = alg.d(e);
  return z;
}

double mat_max_abs(const MatrixElement& x) {
  double r = 0.0;
  for (const auto& e : x.entries)
    if (e.size()) r = std::max(r, e.cwiseAbs().maxCoeff());
  return r;
}

Vec lift_coordinates(const DgAlgebra& alg, const MatrixElement& x) {
  const int n = alg.dim(), m = x.m, u = alg.unit();
  Vec v(static_cast<Eigen::Index>(m) * m * n);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) v.segment((a * m + b) * n, n) = x.at(a, b);
  const cplx xp = v(u);
  for (int a = 1; a < m; ++a) v((a * m + a) * n + u) -= xp;
  return v;
}

MatrixElement unlift_coordinates(const DgAlgebra& alg, int m, const Vec& v) {
  const int n = alg.dim(), u = alg.unit();
  Vec w = v;
  for (int a = 1; a < m; ++a) w((a * m + a) * n + u) += w(u);
  MatrixElement x = mat_zero(alg, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) x.at(a, b) = w.segment((a * m + b) * n, n);
  return x;
}

MatrixElement mat_to_extension(const DgAlgebra& ext, const MatrixElement& x) {
  MatrixElement z = mat_zero(ext, x.m);
  for (size_t i = 0; i < x.entries.size(); ++i) {
    if (x.entries[i].size() != ext.base_dim()) throw Error("mat_to_extension: dimension mismatch");
    z.entries[i].head(ext.base_dim()) = x.entries[i];
  }
  return z;
}

MatrixElement mat_sigma(const DgAlgebra& ext, const MatrixElement& x) {
  const Vec s = ext.basis(ext.sigma_index());
  MatrixElement z = x;
  for (auto& e : z.entries) e = ext.multiply(s, e);
  return z;
}

MatrixElement mat_inverse(const DgAlgebra& alg, const MatrixElement& g) {
  const int m = g.m, n = alg.dim();
  for (const auto& e : g.entries) {
    auto ds = alg.degrees_present(e);
    if (!ds.empty() && (ds.size() > 1 || ds[0] != 0))
      throw Error("mat_inverse: entries must have degree 0");
  }
  const std::vector<int> b0 = alg.basis_of_degree(0);
  const int k0 = static_cast<int>(b0.size());
  // Unknown x_{bc} in span(b0); equation (g x)_{ac} = delta_ac 1.
  Mat sys = Mat::Zero(static_cast<Eigen::Index>(m) * m * n, static_cast<Eigen::Index>(m) * m * k0);
  Vec rhs = Vec::Zero(sys.rows());
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) {
      rhs((a * m + c) * n + alg.unit()) = a == c ? 1.0 : 0.0;
      for (int b = 0; b < m; ++b)
        for (int t = 0; t < k0; ++t) {
          Vec prod = alg.multiply(g.at(a, b), alg.basis(b0[t]));
          sys.block((a * m + c) * n, (b * m + c) * k0 + t, n, 1) += prod;
        }
    }
  Vec sol = sys.colPivHouseholderQr().solve(rhs);
  MatrixElement x = mat_zero(alg, m);
  for (int b = 0; b < m; ++b)
    for (int c = 0; c < m; ++c)
      for (int t = 0; t < k0; ++t) x.at(b, c)(b0[t]) = sol((b * m + c) * k0 + t);
  const MatrixElement id = mat_identity(alg, m);
  const double r1 = mat_max_abs(mat_add(mat_mul(alg, g, x), id, -1.0));
  const double r2 = mat_max_abs(mat_add(mat_mul(alg, x, g), id, -1.0));
  const double scale = std::max(1.0, mat_max_abs(x) * mat_max_abs(g));
  if (!(r1 <= 1e-9 * scale && r2 <= 1e-9 * scale)) throw Error("mat_inverse: matrix is not invertible");
  return x;
}

MaurerCartan maurer_cartan(const DgAlgebra& alg, const MatrixElement& g, const MatrixElement* ginv) {
  MaurerCartan out;
  out.g = g;
  out.ginv = ginv ? *ginv : mat_inverse(alg, g);
  if (ginv) {
    const MatrixElement id = mat_identity(alg, g.m);
    if (mat_max_abs(mat_add(mat_mul(alg, g, *ginv), id, -1.0)) > 1e-9)
      throw Error("maurer_cartan: supplied inverse does not invert g");
    for (const auto& e : g.entries) {
      auto ds = alg.degrees_present(e);
      if (!ds.empty() && (ds.size() > 1 || ds[0] != 0))
        throw Error("maurer_cartan: entries of g must have degree 0");
    }
  }
  const MatrixElement dg = mat_d(alg, g);
  out.omega = mat_mul(alg, out.ginv, dg);
  out.mc_residual =
      mat_max_abs(mat_add(mat_d(alg, out.omega), mat_mul(alg, out.omega, out.omega)));
  const MatrixElement rhs = mat_mul(alg, mat_mul(alg, out.ginv, dg), out.ginv);
  out.inverse_residual = mat_max_abs(mat_add(mat_d(alg, out.ginv), rhs));
  return out;
}

AlgebraPtr algebra_complex() {
  return std::make_shared<DgAlgebra>("C", std::vector<int>{0}, 0,
                                     std::vector<DgAlgebra::MulTriplet>{{0, 0, 0, 1.0}},
                                     std::vector<DgAlgebra::DiffEntry>{});
}

AlgebraPtr algebra_exterior(int k, bool twisted_d) {
  if (k < 1 || k > 8) throw Error("algebra_exterior: k out of range");
  if (twisted_d && k < 2) throw Error("algebra_exterior: twisted differential needs k >= 2");
  const int n = 1 << k;
  std::vector<int> deg(n);
  for (int s = 0; s < n; ++s) deg[s] = __builtin_popcount(static_cast<unsigned>(s));
  std::vector<DgAlgebra::MulTriplet> mul;
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      if (s & t) continue;
      int inv = 0;
      for (int a = 0; a < k; ++a)
        if (s & (1 << a))
          for (int b = 0; b < a; ++b)
            if (t & (1 << b)) ++inv;
      mul.push_back({s, t, s | t, sign_of(inv)});
    }
  std::vector<DgAlgebra::DiffEntry> diff;
  if (twisted_d) {
    DgAlgebra tmp("tmp", deg, 0, mul, {});
    // d e_S by Leibniz from d e_0 = e_0 e_1 and d e_a = 0 otherwise.
    std::vector<Vec> dv(n, tmp.zero());
    for (int s = 1; s < n; ++s) {
      const int low = __builtin_ctz(static_cast<unsigned>(s));
      const int rest = s & ~(1 << low);
      Vec dfirst = tmp.zero();
      if (low == 0) dfirst(3) = 1.0;
      dv[s] = tmp.multiply(dfirst, tmp.basis(rest)) - tmp.multiply(tmp.basis(1 << low), dv[rest]);
    }
    for (int s = 0; s < n; ++s)
      for (int i = 0; i < n; ++i)
        if (dv[s](i) != cplx(0.0)) diff.push_back({i, s, dv[s](i)});
  }
  std::string name = "Lambda" + std::to_string(k) + (twisted_d ? "d" : "");
  return std::make_shared<DgAlgebra>(name, deg, 0, mul, diff);
}

namespace {

struct CircleRep {
  std::vector<cplx> f, p, m;
};

CircleRep circle_rep(int n, const Vec& v) {
  CircleRep r{std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n)};
  for (int x = 0; x < n; ++x) {
    r.f[x] = v(0) + (x > 0 ? v(x) : cplx(0.0));
    r.p[x] = v(n + x);
    r.m[x] = v(2 * n + x);
  }
  return r;
}

Vec circle_coords(int n, const CircleRep& r) {
  Vec v = Vec::Zero(3 * n);
  v(0) = r.f[0];
  for (int x = 1; x < n; ++x) v(x) = r.f[x] - r.f[0];
  for (int x = 0; x < n; ++x) {
    v(n + x) = r.p[x];
    v(2 * n + x) = r.m[x];
  }
  return v;
}

}  // namespace

AlgebraPtr algebra_discrete_circle(int n) {
  if (n < 2) throw Error("algebra_discrete_circle: n must be at least 2");
  const int dim = 3 * n;
  std::vector<int> deg(dim, 1);
  for (int x = 0; x < n; ++x) deg[x] = 0;
  auto up = [n](int x) { return (x + 1) % n; };
  auto dn = [n](int x) { return (x + n - 1) % n; };
  std::vector<DgAlgebra::MulTriplet> mul;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      Vec a = Vec::Zero(dim), b = Vec::Zero(dim);
      a(i) = 1.0;
      b(j) = 1.0;
      CircleRep ra = circle_rep(n, a), rb = circle_rep(n, b), rc;
      rc.f.resize(n);
      rc.p.resize(n);
      rc.m.resize(n);
      for (int x = 0; x < n; ++x) {
        rc.f[x] = ra.f[x] * rb.f[x];
        rc.p[x] = ra.f[x] * rb.p[x] + ra.p[x] * rb.f[up(x)];
        rc.m[x] = ra.f[x] * rb.m[x] + ra.m[x] * rb.f[dn(x)];
      }
      Vec c = circle_coords(n, rc);
      for (int k = 0; k < dim; ++k)
        if (c(k) != cplx(0.0)) mul.push_back({i, j, k, c(k)});
    }
  std::vector<DgAlgebra::DiffEntry> diff;
  for (int j = 0; j < n; ++j) {
    Vec a = Vec::Zero(dim);
    a(j) = 1.0;
    CircleRep ra = circle_rep(n, a), rd;
    rd.f.assign(n, 0.0);
    rd.p.resize(n);
    rd.m.resize(n);
    for (int x = 0; x < n; ++x) {
      rd.p[x] = ra.f[up(x)] - ra.f[x];
      rd.m[x] = ra.f[dn(x)] - ra.f[x];
    }
    Vec c = circle_coords(n, rd);
    for (int k = 0; k < dim; ++k)
      if (c(k) != cplx(0.0)) diff.push_back({k, j, c(k)});
  }
  return std::make_shared<DgAlgebra>("circle" + std::to_string(n), deg, 0, mul, diff);
}

Vec dc_function(const DgAlgebra& alg, int n, const std::vector<cplx>& values) {
  if (static_cast<int>(values.size()) != n) throw Error("dc_function: wrong number of values");
  Vec v = alg.zero();
  v(0) = values[0];
  for (int x = 1; x < n; ++x) v(x) = values[x] - values[0];
  return v;
}

std::vector<cplx> dc_values(int n, const Vec& f) {
  std::vector<cplx> out(n);
  for (int x = 0; x < n; ++x) out[x] = f(0) + (x > 0 ? f(x) : cplx(0.0));
  return out;
}

}  // namespace chernlab
