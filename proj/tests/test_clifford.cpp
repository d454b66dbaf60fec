#include <cmath>
#include <vector>

#include "chernlab/clifford.hpp"
#include "doctest.h"

using namespace chernlab;

namespace {

Mat random_psd(Rng& rng, int n, double scale = 1.0) {
  Mat q = rng.hermitian(n);
  return scale * q * q;
}

std::vector<Mat> random_ops(Rng& rng, int n, int N) {
  std::vector<Mat> a;
  for (int i = 0; i < N; ++i) a.push_back(rng.matrix(n, n));
  return a;
}

double rel(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

// Random homogeneous operator of parity p supercommuting with the action.
Mat random_equivariant(const CliffordModule& cm, Rng& rng, int p) {
  Mat x = equivariant_project(cm, rng.matrix(cm.dim(), cm.dim()));
  return p == 0 ? cm.H.even_part(x) : cm.H.odd_part(x);
}

}  // namespace

TEST_CASE("clifford modules validate") {
  auto c0 = clifford_trivial({1, 1, -1});
  CHECK(clifford_validate(c0).pass());
  CHECK(max_abs(c0.volume() - Mat::Identity(3, 3)) == 0.0);

  auto c1 = clifford_standard(1);
  REQUIRE(c1.dim() == 2);
  Mat want(2, 2);
  want << 0, 1, -1, 0;
  CHECK(max_abs(c1.e[0] - want) < 1e-15);
  CHECK(c1.H.parity == std::vector<int>{1, -1});
  CHECK(clifford_validate(c1).pass());

  for (int q = 2; q <= 5; ++q) {
    auto cm = clifford_standard(q, {1, -1, 1});
    INFO("q=" << q);
    CHECK(clifford_validate(cm).pass());
  }

  auto bad = c1;
  bad.e[0] = bad.e[0].adjoint().eval() * -1.0;  // still skew
  bad.e[0](0, 1) = 1;
  bad.e[0](1, 0) = 1;  // self-adjoint now
  CHECK_FALSE(clifford_validate(bad).pass());

  auto wrong = c1;
  wrong.e[0] = Mat::Identity(3, 3);
  CHECK_THROWS_AS(clifford_validate(wrong), Error);
}

TEST_CASE("supertrace and clifford supertrace") {
  auto h = clifford_trivial({1, 1, -1, 1, -1});
  CHECK(std::abs(supertrace(h.H, Mat::Identity(5, 5)) - cplx(1.0)) == 0.0);
  Rng rng(3);
  Mat a = rng.matrix(5, 5);
  CHECK(std::abs(cstr(h, a) - supertrace(h.H, a)) == 0.0);

  // CStr vanishes on supercommutators of equivariant operators.
  for (int q : {1, 2, 3}) {
    auto cm = clifford_standard(q, {1, -1});
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
      const int pa = rng.integer(0, 1), pb = rng.integer(0, 1);
      Mat A = random_equivariant(cm, rng, pa), B = random_equivariant(cm, rng, pb);
      const double v = std::abs(cstr(cm, cm.H.supercommutator(A, pa, B, pb)));
      worst = std::max(worst, v / (op_norm(A) * op_norm(B)));
    }
    INFO("q=" << q);
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("equivariant projection") {
  Rng rng(8);
  auto cm = clifford_standard(3, {1, -1});
  Mat a = rng.matrix(cm.dim(), cm.dim());
  Mat p = equivariant_project(cm, a);
  CHECK(equivariance_residual(cm, p) < 1e-13);
  CHECK(max_abs(equivariant_project(cm, p) - p) < 1e-13);
  CHECK(equivariance_residual(cm, a) > 0.1);
  Mat u = random_equivariant_unitary(cm, rng);
  CHECK(max_abs(u * u.adjoint() - Mat::Identity(cm.dim(), cm.dim())) < 1e-12);
  CHECK(equivariance_residual(cm, u) < 1e-12);
  CHECK(cm.H.operator_parity(u) == 0);
}

TEST_CASE("heat bracket basic cases") {
  Rng rng(17);
  Mat H = random_psd(rng, 4);
  CHECK(max_abs(heat_bracket(H, {}) - expm(-H)) == 0.0);
  CHECK(rel(heat_bracket(H, {Mat::Identity(4, 4)}), expm(-H)) < 1e-13);
  // two units: simplex volume 1/2
  Mat I = Mat::Identity(4, 4);
  CHECK(rel(heat_bracket(H, {I, I}), 0.5 * expm(-H)) < 1e-13);
  // scalar H: {A}_{hI} = e^{-h} A
  Mat A = rng.matrix(4, 4);
  CHECK(rel(heat_bracket(2.0 * I, {A}), std::exp(-2.0) * A) < 1e-13);
  CHECK_THROWS_AS(heat_bracket(rng.matrix(4, 4), {A}), Error);
  CHECK_THROWS_AS(heat_bracket(H, std::vector<Mat>(13, A)), Error);
}

TEST_CASE("heat bracket agrees with quadrature oracle") {
  Rng rng(1234);
  Mat H = random_psd(rng, 4);
  auto a = random_ops(rng, 4, 3);
  CHECK(rel(heat_bracket(H, a), bracket_oracle(H, a)) <= 1e-8);

  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = rng.integer(1, 8);
    const int N = rng.integer(0, 4);
    Mat Hn = random_psd(rng, n, 0.5);
    auto b = random_ops(rng, n, N);
    const int nodes = N <= 2 ? 64 : N == 3 ? 32 : 16;
    worst = std::max(worst, rel(heat_bracket(Hn, b), bracket_oracle(Hn, b, nodes)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("repeated eigenvalues are handled") {
  Mat H = Mat::Identity(3, 3);
  H(2, 2) = 0.0;
  Rng rng(2);
  auto a = random_ops(rng, 3, 2);
  CHECK(rel(heat_bracket(H, a), bracket_oracle(H, a)) <= 1e-10);
}

TEST_CASE("pulling out the unit") {
  Rng rng(99);
  Mat H = random_psd(rng, 3);
  auto r0 = bracket_insert_unit(H, {}, 0);
  CHECK(rel(r0.value, expm(-H)) < 1e-13);
  auto a = random_ops(rng, 3, 2);
  for (int j = 0; j <= 2; ++j) {
    auto r = bracket_insert_unit(H, a, j);
    CHECK(r.sum_residual <= 1e-10);
    CHECK(r.weighted_residual <= 1e-10);
  }
  // reversal + adjoint maps slot 0 to slot N for Hermitian insertions
  std::vector<Mat> h{rng.hermitian(3), rng.hermitian(3)};
  std::vector<Mat> hr{h[1], h[0]};
  Mat v0 = bracket_insert_unit(H, h, 0).value;
  Mat vN = bracket_insert_unit(H, hr, 2).value;
  CHECK(rel(v0.adjoint(), vN) < 1e-12);
}

TEST_CASE("bracket split identity") {
  Rng rng(5);
  Mat H = random_psd(rng, 3);
  Mat B = rng.matrix(3, 3);
  auto s0 = bracket_split(H, {}, B, 1);
  CHECK(s0.residual <= 1e-12);
  auto a = random_ops(rng, 3, 2);
  for (int k = 1; k <= 3; ++k) {
    auto s = bracket_split(H, a, B, k);
    INFO("k=" << k);
    CHECK(s.residual <= 1e-8);
  }
}

TEST_CASE("clifford supertrace cyclic property") {
  Rng rng(41);
  auto cm = clifford_standard(1, {1, -1});
  const int n = cm.dim();
  Mat Q = cm.H.odd_part(equivariant_project(cm, rng.hermitian(n)));
  Q = 0.5 * (Q + Q.adjoint());
  Mat H = Q * Q;

  Mat A0 = random_equivariant(cm, rng, 0);
  auto r0 = cstr_cyclic_sum(cm, H, {A0});
  CHECK(r0.residual <= 1e-12 * r0.scale);

  for (int t = 0; t < 20; ++t) {
    std::vector<Mat> a;
    for (int i = 0; i < 3; ++i) a.push_back(random_equivariant(cm, rng, rng.integer(0, 1)));
    auto r = cstr_cyclic_sum(cm, H, a);
    CHECK(r.residual <= 1e-9 * r.scale);
  }
  // all even
  std::vector<Mat> ev;
  for (int i = 0; i < 3; ++i) ev.push_back(random_equivariant(cm, rng, 0));
  auto re = cstr_cyclic_sum(cm, H, ev);
  CHECK(re.residual <= 1e-9 * re.scale);

  CHECK_THROWS_AS(cstr_cyclic_sum(cm, H, {rng.matrix(n, n)}), Error);
}

TEST_CASE("trace norm bound") {
  Rng rng(71);
  for (int t = 0; t < 50; ++t) {
    const int n = rng.integer(1, 6);
    const int N = rng.integer(0, 4);
    const double T = rng.uniform(0.1, 2.0);
    Mat Q = rng.hermitian(n);
    Mat H = T * Q * Q;
    auto a = random_ops(rng, n, N);
    std::vector<Mat> ta;
    for (auto& x : a) ta.push_back(T * x);
    CHECK(trace_norm(heat_bracket(H, ta)) <= bracket_trace_bound(H, T, ta));
  }
}
