// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#include "chernlab/fixtures.hpp"

namespace chernlab {

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

Mat ket_bra(int n, int i, int j) {
  Mat e = Mat::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

void require_valid(const ValidationReport& rep, const std::string& who) {
  if (!rep.pass()) throw Error(who + ": fixture failed validation\n" + rep.summary());
}

}  // namespace

Mat random_odd_equivariant_hermitian(const CliffordModule& cm, Rng& rng, double scale) {
  Mat q = cm.H.odd_part(equivariant_project(cm, rng.hermitian(cm.dim())));
  return scale * 0.5 * (q + q.adjoint());
}

OddModule fixture_discrete_circle(int n, std::uint64_t seed, double hop, double onsite) {
  if (n < 2) throw Error("discrete_circle: n must be at least 2");
  AlgebraPtr A = algebra_discrete_circle(n);
  Rng rng(seed);
  const Mat a = hop * rng.matrix(2, 2) / std::sqrt(2.0);
  Mat U = Mat::Zero(n, n);  // (U psi)(x) = psi(x+1)
  for (int x = 0; x < n; ++x) U(x, (x + 1) % n) = 1.0;
  OddModule M;
  M.alg = A;
  M.weak = false;
  M.name = "discrete_circle_n" + std::to_string(n);
  M.c.assign(A->dim(), Mat());
  const Mat I2 = Mat::Identity(2, 2);
  for (int i = 0; i < n; ++i) {
    const std::vector<cplx> v = dc_values(n, A->basis(i));
    Mat f = Mat::Zero(n, n);
    for (int x = 0; x < n; ++x) f(x, x) = v[x];
    M.c[i] = kron(f, I2);
  }
  for (int x = 0; x < n; ++x) {
    M.c[n + x] = kron(ket_bra(n, x, (x + 1) % n), a);
    M.c[2 * n + x] = kron(ket_bra(n, x, (x + n - 1) % n), a.adjoint());
  }
  M.Q = kron(U, a) + kron(U.adjoint(), a.adjoint());
  for (int x = 0; x < n; ++x) M.Q += kron(ket_bra(n, x, x), onsite * rng.hermitian(2));
  M.Q = 0.5 * (M.Q + M.Q.adjoint());
  require_valid(odd_module_validate(M), "discrete_circle");
  return M;
}

Mat circle_onsite_perturbation(int n, std::uint64_t seed, double scale) {
  Rng rng(seed);
  Mat V = Mat::Zero(2 * n, 2 * n);
  for (int x = 0; x < n; ++x) V.block(2 * x, 2 * x, 2, 2) = scale * rng.hermitian(2);
  return V;
}

CqModule fixture_random_weak_cq(int dim, int q, std::uint64_t seed, AlgebraPtr alg) {
  if (!alg) alg = algebra_discrete_circle(2);
  const int sdim = 1 << ((q + 1) / 2);
  if (dim < sdim || dim % sdim) throw Error("random_weak_cq: dim must be a multiple of 2^ceil(q/2)");
  std::vector<int> mult;
  for (int i = 0; i < dim / sdim; ++i) mult.push_back(i % 2 ? -1 : 1);
  Rng rng(seed);
  CqModule M;
  M.alg = alg;
  M.cm = clifford_standard(q, mult);
  M.weak = true;
  M.name = "random_weak_cq";
  for (int i = 0; i < alg->dim(); ++i) {
    if (i == alg->unit()) {
      M.c.push_back(Mat::Identity(dim, dim));
      continue;
    }
    Mat x = equivariant_project(M.cm, 0.5 * rng.matrix(dim, dim));
    M.c.push_back(parity_of(alg->degree(i)) ? M.cm.H.odd_part(x) : M.cm.H.even_part(x));
  }
  M.Q = random_odd_equivariant_hermitian(M.cm, rng);
  require_valid(module_validate(M), "random_weak_cq");
  return M;
}

CqModule fixture_exterior_strong(int k, bool twisted, int q, int mult, std::uint64_t seed) {
  if (mult < 1) throw Error("exterior_strong: multiplicity must be positive");
  std::vector<int> mp;
  for (int i = 0; i < mult; ++i) mp.push_back(i % 2 ? -1 : 1);
  CqModule M = fixture_random_weak_cq(clifford_standard(q, mp).dim(), q, seed,
                                      algebra_exterior(k, twisted));
  M.weak = false;
  M.name = "exterior_strong";
  require_valid(module_validate(M), "exterior_strong");
  return M;
}

OddModule fixture_getzler_trivial(int dim, std::uint64_t seed) {
  if (dim < 2 || dim % 2) throw Error("getzler_trivial: dim must be even");
  AlgebraPtr A = mat_lift(*algebra_complex(), 2);
  Rng rng(seed);
  const Mat S = expm(cplx(0, 1) * rng.hermitian(dim));
  const Mat I = Mat::Identity(dim / 2, dim / 2);
  OddModule M;
  M.alg = A;
  M.weak = true;
  M.name = "getzler_trivial";
  for (int i = 0; i < 4; ++i) {
    const int a = i / 2, b = i % 2;
    M.c.push_back(S * kron(ket_bra(2, a, b), I) * S.adjoint());
  }
  M.c[A->unit()] = Mat::Identity(dim, dim);
  M.Q = rng.hermitian(dim);
  require_valid(odd_module_validate(M), "getzler_trivial");
  return M;
}

MatrixElement fixture_circle_g(const DgAlgebra& A, int n, int m, std::uint64_t seed, double eps) {
  Rng rng(seed);
  MatrixElement g = mat_zero(A, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      std::vector<cplx> v(n);
      for (auto& z : v) z = (a == b ? cplx(1.0) : cplx(0.0)) + eps * rng.cnormal();
      g.at(a, b) = dc_function(A, n, v);
    }
  return g;
}

}  // namespace chernlab
