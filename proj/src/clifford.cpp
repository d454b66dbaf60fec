// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#include "chernlab/clifford.hpp"

#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

namespace chernlab {

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

double rel(const Mat& a, const Mat& b) {
  const double s = std::max(1.0, std::max(a.norm(), b.norm()));
  return (a - b).norm() / s;
}

void check_square(const Mat& H, const char* who) {
  if (H.rows() != H.cols()) throw Error(std::string(who) + ": H not square");
}

}  // namespace

bool is_hermitian(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

Mat GradedHilbert::gamma() const {
  Mat g = Mat::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) g(i, i) = parity[i];
  return g;
}

int GradedHilbert::even_dim() const {
  int n = 0;
  for (int p : parity) n += p > 0;
  return n;
}

Mat GradedHilbert::even_part(const Mat& a) const {
  Mat r = a;
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j)
      if (parity[i] != parity[j]) r(i, j) = 0.0;
  return r;
}

Mat GradedHilbert::odd_part(const Mat& a) const { return a - even_part(a); }

int GradedHilbert::operator_parity(const Mat& a, double tol) const {
  if (a.rows() != dim() || a.cols() != dim()) throw Error("operator_parity: dimension mismatch");
  const double ev = even_part(a).norm();
  const double od = odd_part(a).norm();
  const double s = std::max(1.0, a.norm());
  if (od <= tol * s) return 0;
  if (ev <= tol * s) return 1;
  throw Error("operator_parity: operator is not homogeneous");
}

Mat GradedHilbert::supercommutator(const Mat& a, int pa, const Mat& b, int pb) const {
  return a * b - sign_of(pa * pb) * b * a;
}

Mat CliffordModule::volume() const {
  Mat g = Mat::Identity(dim(), dim());
  for (const auto& x : e) g = g * x;
  return g;
}

CliffordModule clifford_standard(int q, const std::vector<int>& mult) {
  if (q < 0) throw Error("clifford_standard: negative q");
  if (mult.empty()) throw Error("clifford_standard: empty multiplicity space");
  const int modes = (q + 1) / 2;
  Mat Z(2, 2), X(2, 2), Y(2, 2), I2 = Mat::Identity(2, 2);
  Z << 1, 0, 0, -1;
  X << 0, 1, 1, 0;
  Y << 0, cplx(0, -1), cplx(0, 1), 0;
  const int sdim = 1 << modes;
  const int wdim = static_cast<int>(mult.size());
  Mat W = Mat::Identity(wdim, wdim);

  CliffordModule cm;
  cm.q = q;
  for (int s = 0; s < sdim; ++s) {
    const int ps = sign_of(__builtin_popcount(static_cast<unsigned>(s))) > 0 ? 1 : -1;
    for (int w = 0; w < wdim; ++w) cm.H.parity.push_back(ps * mult[w]);
  }
  for (int a = 0; a < q; ++a) {
    const int j = a / 2;
    Mat op = Mat::Identity(1, 1);
    for (int k = 0; k < modes; ++k) {
      const Mat& f = k < j ? Z : k == j ? (a % 2 == 0 ? Y : X) : I2;
      op = kron(op, f);
    }
    cm.e.push_back(cplx(0, 1) * kron(op, W));
  }
  return cm;
}

CliffordModule clifford_trivial(const std::vector<int>& parity) {
  CliffordModule cm;
  cm.H.parity = parity;
  return cm;
}

ValidationReport clifford_validate(const CliffordModule& cm, double tol) {
  if (static_cast<int>(cm.e.size()) != cm.q) throw Error("clifford_validate: wrong generator count");
  for (int p : cm.H.parity)
    if (p != 1 && p != -1) throw Error("clifford_validate: parity entries must be +1 or -1");
  const int n = cm.dim();
  for (const auto& x : cm.e)
    if (x.rows() != n || x.cols() != n) throw Error("clifford_validate: dimension mismatch");
  ValidationReport rep;
  const Mat G = cm.H.gamma();
  const Mat I = Mat::Identity(n, n);
  double rel_res = 0, skew = 0, odd = 0;
  for (int i = 0; i < cm.q; ++i) {
    skew = std::max(skew, max_abs(cm.e[i].adjoint() + cm.e[i]));
    odd = std::max(odd, max_abs(cm.e[i] * G + G * cm.e[i]));
    for (int j = 0; j < cm.q; ++j) {
      Mat r = cm.e[i] * cm.e[j] + cm.e[j] * cm.e[i] + (i == j ? 2.0 : 0.0) * I;
      rel_res = std::max(rel_res, max_abs(r));
    }
  }
  rep.add("grading involution", max_abs(G * G - I), tol);
  rep.add("clifford relations", rel_res, tol);
  rep.add("skew-adjoint generators", skew, tol);
  rep.add("odd generators", odd, tol);
  return rep;
}

cplx supertrace(const GradedHilbert& h, const Mat& a) {
  if (a.rows() != h.dim() || a.cols() != h.dim()) throw Error("supertrace: dimension mismatch");
  cplx s = 0;
  for (int i = 0; i < h.dim(); ++i) s += static_cast<double>(h.parity[i]) * a(i, i);
  return s;
}

cplx cstr(const CliffordModule& cm, const Mat& a) {
  return std::ldexp(1.0, -cm.q) * supertrace(cm.H, cm.volume() * a);
}

Mat equivariant_project(const CliffordModule& cm, const Mat& a) {
  Mat parts[2] = {cm.H.even_part(a), cm.H.odd_part(a)};
  for (int p = 0; p < 2; ++p)
    for (const auto& e : cm.e) {
      // pi(A) = (-1)^p e^{-1} A e, with e^{-1} = -e
      parts[p] = 0.5 * (parts[p] - sign_of(p) * e * parts[p] * e);
    }
  return parts[0] + parts[1];
}

double equivariance_residual(const CliffordModule& cm, const Mat& a) {
  const Mat parts[2] = {cm.H.even_part(a), cm.H.odd_part(a)};
  double r = 0;
  for (int p = 0; p < 2; ++p)
    for (const auto& e : cm.e) r = std::max(r, max_abs(e * parts[p] - sign_of(p) * parts[p] * e));
  return r;
}

Mat random_equivariant_unitary(const CliffordModule& cm, Rng& rng, double scale) {
  Mat h = cm.H.even_part(equivariant_project(cm, rng.hermitian(cm.dim())));
  h = 0.5 * (h + h.adjoint());
  return expm(cplx(0, scale) * h);
}

Mat augmented_exp(const Mat& H, int states, const std::vector<Transition>& trans) {
  check_square(H, "augmented_exp");
  const Eigen::Index d = H.rows();
  Mat M = Mat::Zero(states * d, states * d);
  for (int s = 0; s < states; ++s) M.block(s * d, s * d, d, d) = -H;
  for (const auto& t : trans) {
    if (t.from < 0 || t.to >= states || t.from >= t.to)
      throw Error("augmented_exp: transitions must go forward between valid states");
    if (t.block.rows() != d || t.block.cols() != d) throw Error("augmented_exp: block size");
    M.block(t.from * d, t.to * d, d, d) += t.block;
  }
  return expm(M);
}

namespace {

std::vector<Mat> toeplitz_mul(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  const size_t K = a.size();
  std::vector<Mat> c(K, Mat::Zero(a[0].rows(), a[0].cols()));
  for (size_t i = 0; i < K; ++i) {
    if (a[i].isZero(0.0)) continue;
    for (size_t j = 0; i + j < K; ++j)
      if (!b[j].isZero(0.0)) c[i + j].noalias() += a[i] * b[j];
  }
  return c;
}

}  // namespace

std::vector<Mat> toeplitz_exp(const std::vector<Mat>& gen, int K) {
  if (gen.empty() || K < 0) throw Error("toeplitz_exp: empty generator");
  const Eigen::Index b = gen[0].rows();
  for (const auto& g : gen)
    if (g.rows() != b || g.cols() != b) throw Error("toeplitz_exp: block size");
  double nrm = 0;
  for (size_t j = 0; j < gen.size() && static_cast<int>(j) <= K; ++j)
    nrm += gen[j].cwiseAbs().colwise().sum().maxCoeff();
  const int sq = nrm > 0.5 ? static_cast<int>(std::ceil(std::log2(nrm / 0.5))) : 0;
  const double scale = std::ldexp(1.0, -sq);
  std::vector<Mat> A(K + 1, Mat::Zero(b, b));
  for (size_t j = 0; j < gen.size() && static_cast<int>(j) <= K; ++j) A[j] = scale * gen[j];
  // Taylor polynomial of degree 18 by Horner; |A| <= 1/2 keeps the error
  // below 1e-22.
  constexpr int p = 18;
  std::vector<Mat> P(K + 1, Mat::Zero(b, b));
  P[0] = Mat::Identity(b, b);
  for (int k = p; k >= 1; --k) {
    P = toeplitz_mul(A, P);
    for (auto& x : P) x /= static_cast<double>(k);
    P[0] += Mat::Identity(b, b);
  }
  for (int i = 0; i < sq; ++i) P = toeplitz_mul(P, P);
  return P;
}

Mat heat_bracket(const Mat& H, const std::vector<Mat>& a) {
  check_square(H, "heat_bracket");
  if (!is_hermitian(H)) throw Error("heat_bracket: H is not Hermitian");
  const int N = static_cast<int>(a.size());
  if (N > kBracketMax)
    throw Error("heat_bracket: " + std::to_string(N) + " insertions exceeds the maximum of " +
                std::to_string(kBracketMax));
  const Eigen::Index d = H.rows();
  if (N == 0) return expm(-H);
  std::vector<Transition> t;
  for (int i = 0; i < N; ++i) t.push_back({i, i + 1, a[i]});
  return augmented_exp(H, N + 1, t).block(0, N * d, d, d);
}

Mat bracket_oracle(const Mat& H, const std::vector<Mat>& a, int nodes) {
  check_square(H, "bracket_oracle");
  if (!is_hermitian(H)) throw Error("bracket_oracle: H is not Hermitian");
  const int N = static_cast<int>(a.size());
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.adjoint()));
  const Mat& V = es.eigenvectors();
  const Eigen::VectorXd lam = es.eigenvalues();
  std::vector<Mat> b;
  for (const auto& x : a) b.push_back(V.adjoint() * x * V);
  const Quadrature qd = gauss_legendre(nodes);
  auto heat = [&](double t) { return (-t * lam.array()).exp().matrix().cast<cplx>(); };

  // {B_k..B_N}_{tH} = int_0^1 (1-u)^{N-k} e^{-utH} B_k {B_{k+1}..}_{(1-u)tH} du
  std::function<Mat(int, double)> rec = [&](int k, double t) -> Mat {
    if (k == N) return heat(t).asDiagonal();
    Mat acc = Mat::Zero(H.rows(), H.cols());
    for (int j = 0; j < nodes; ++j) {
      const double u = qd.nodes[j];
      const double w = qd.weights[j] * std::pow(1.0 - u, N - k - 1);
      acc += w * (heat(u * t).asDiagonal() * (b[k] * rec(k + 1, (1.0 - u) * t)));
    }
    return acc;
  };
  return V * rec(0, 1.0) * V.adjoint();
}

InsertUnitResult bracket_insert_unit(const Mat& H, const std::vector<Mat>& a, int j) {
  const int N = static_cast<int>(a.size());
  if (j < 0 || j > N) throw Error("bracket_insert_unit: slot out of range");
  const Eigen::Index d = H.rows();
  const Mat I = Mat::Identity(d, d);
  auto inserted = [&](int slot) {
    std::vector<Mat> w(a.begin(), a.begin() + slot);
    w.push_back(I);
    w.insert(w.end(), a.begin() + slot, a.end());
    return heat_bracket(H, w);
  };
  InsertUnitResult r;
  r.value = inserted(j);

  // Gap-weighted integral: derivative of the bracket when the j-th gap is
  // shifted by +eps, via the Frechet block trick.
  const Eigen::Index D = (N + 1) * d;
  Mat M = Mat::Zero(2 * D, 2 * D);
  for (int s = 0; s <= N; ++s) {
    M.block(s * d, s * d, d, d) = -H;
    M.block(D + s * d, D + s * d, d, d) = -H;
  }
  for (int s = 0; s < N; ++s) {
    M.block(s * d, (s + 1) * d, d, d) = a[s];
    M.block(D + s * d, D + (s + 1) * d, d, d) = a[s];
  }
  M.block(j * d, D + j * d, d, d) = I;
  const Mat weighted = expm(M).block(0, D + N * d, d, d);
  r.weighted_residual = rel(r.value, weighted);

  Mat sum = Mat::Zero(d, d);
  for (int s = 0; s <= N; ++s) sum += s == j ? r.value : inserted(s);
  r.sum_residual = rel(sum, heat_bracket(H, a));
  return r;
}

SplitResult bracket_split(const Mat& H, const std::vector<Mat>& a, const Mat& b, int k,
                          int nodes) {
  const int N = static_cast<int>(a.size());
  if (k < 1 || k > N + 1) throw Error("bracket_split: k out of range");
  std::vector<Mat> pre(a.begin(), a.begin() + (k - 1)), post(a.begin() + (k - 1), a.end());
  std::vector<Mat> all = pre;
  all.push_back(b);
  all.insert(all.end(), post.begin(), post.end());
  SplitResult r;
  r.lhs = heat_bracket(H, all);
  r.rhs = Mat::Zero(H.rows(), H.cols());
  const Quadrature qd = gauss_legendre(nodes);
  for (int j = 0; j < nodes; ++j) {
    const double u = qd.nodes[j];
    const double w = qd.weights[j] * std::pow(u, k - 1) * std::pow(1.0 - u, N - k + 1);
    r.rhs += w * heat_bracket(u * H, pre) * b * heat_bracket((1.0 - u) * H, post);
  }
  r.residual = rel(r.lhs, r.rhs);
  return r;
}

CyclicSumResult cstr_cyclic_sum(const CliffordModule& cm, const Mat& H, const std::vector<Mat>& a) {
  if (a.empty()) throw Error("cstr_cyclic_sum: need A_0");
  const int N = static_cast<int>(a.size()) - 1;
  std::vector<int> p;
  for (const auto& x : a) {
    if (equivariance_residual(cm, x) > 1e-10 * std::max(1.0, max_abs(x)))
      throw Error("cstr_cyclic_sum: input does not supercommute with the Clifford action");
    p.push_back(cm.H.operator_parity(x));
  }
  CyclicSumResult r;
  for (int j = 0; j <= N; ++j) {
    long left = 0, right = 0;
    for (int i = 0; i <= j; ++i) left += p[i];
    for (int i = j + 1; i <= N; ++i) right += p[i];
    std::vector<Mat> w(a.begin() + j + 1, a.end());
    w.insert(w.end(), a.begin(), a.begin() + j + 1);
    r.lhs += sign_of(left * right) * cstr(cm, heat_bracket(H, w));
  }
  std::vector<Mat> tail(a.begin() + 1, a.end());
  r.rhs = cstr(cm, a[0] * heat_bracket(H, tail));
  double s = expm(-H).cwiseAbs().sum();
  for (const auto& x : a) s *= std::max(1.0, op_norm(x));
  r.scale = std::max(1.0, s);
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

double bracket_trace_bound(const Mat& H, double T, const std::vector<Mat>& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
  double tr = (-0.5 * es.eigenvalues().array()).exp().sum();
  double b = tr * std::exp(0.5 * T);
  for (size_t i = 0; i < a.size(); ++i) b *= op_norm(a[i]) / static_cast<double>(i + 1);
  return b;
}

}  // namespace chernlab
