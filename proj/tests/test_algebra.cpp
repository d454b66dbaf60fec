#include <algorithm>
#include <vector>

#include "chernlab/algebra.hpp"
#include "doctest.h"

using namespace chernlab;

namespace {

// Independent exterior product on generator lists: sort with sign.
std::pair<int, double> wedge(int s, int t) {
  if (s & t) return {0, 0.0};
  std::vector<int> seq;
  for (int a = 0; a < 8; ++a)
    if (s & (1 << a)) seq.push_back(a);
  for (int a = 0; a < 8; ++a)
    if (t & (1 << a)) seq.push_back(a);
  double sign = 1.0;
  for (size_t i = 0; i < seq.size(); ++i)
    for (size_t j = 0; j + 1 < seq.size() - i; ++j)
      if (seq[j] > seq[j + 1]) {
        std::swap(seq[j], seq[j + 1]);
        sign = -sign;
      }
  return {s | t, sign};
}

Vec random_element(const DgAlgebra& A, Rng& rng, int deg) {
  Vec v = A.zero();
  for (int i : A.basis_of_degree(deg)) v(i) = rng.cnormal();
  return v;
}

}  // namespace

TEST_CASE("complex numbers validate with zero residuals") {
  auto c = algebra_complex();
  auto rep = dga_validate(*c);
  CHECK(rep.pass());
  CHECK(rep.max_residual() == 0.0);
}

TEST_CASE("exterior algebra structure constants match an independent wedge") {
  auto L = algebra_exterior(2);
  REQUIRE(L->dim() == 4);
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) {
      auto [k, sign] = wedge(s, t);
      Vec got = L->multiply(L->basis(s), L->basis(t));
      Vec want = L->zero();
      if (sign != 0.0) want(k) = sign;
      CHECK((got - want).norm() == 0.0);
    }
  double assoc = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        Vec l = L->multiply(L->multiply(L->basis(a), L->basis(b)), L->basis(c));
        Vec r = L->multiply(L->basis(a), L->multiply(L->basis(b), L->basis(c)));
        assoc = std::max(assoc, (l - r).norm());
      }
  CHECK(assoc == 0.0);
  CHECK(dga_validate(*L).pass());
}

TEST_CASE("twisted exterior differential and discrete circle are dg algebras") {
  CHECK(dga_validate(*algebra_exterior(2, true)).pass());
  CHECK(dga_validate(*algebra_exterior(3, true)).pass());
  for (int n : {2, 3, 6}) {
    auto rep = dga_validate(*algebra_discrete_circle(n));
    INFO(rep.summary());
    CHECK(rep.pass());
  }
}

TEST_CASE("injected unit differential fails validation") {
  DgAlgebra bad("bad", {0, 1}, 0, {{0, 0, 0, 1.0}, {0, 1, 1, 1.0}, {1, 0, 1, 1.0}}, {{1, 0, 1.0}});
  auto rep = dga_validate(bad);
  CHECK_FALSE(rep.pass());
  auto it = std::find_if(rep.items.begin(), rep.items.end(),
                         [](const ValidationItem& i) { return i.name == "unit differential"; });
  REQUIRE(it != rep.items.end());
  CHECK(it->residual > 0.5);
}

TEST_CASE("malformed structure constants are construction errors") {
  CHECK_THROWS_AS(DgAlgebra("x", {0}, 0, {{0, 0, 3, 1.0}}, {}), Error);
  CHECK_THROWS_AS(DgAlgebra("x", {0}, 2, {}, {}), Error);
}

TEST_CASE("acyclic extension of C") {
  auto T = acyclic_extension(*algebra_complex());
  REQUIRE(T->dim() == 2);
  const int s = T->sigma_index();
  CHECK(T->degree(s) == -1);
  Vec ds = T->d(T->basis(s));
  CHECK(ds(0) == cplx(-1.0));
  CHECK(ds(1) == cplx(0.0));
  CHECK(T->d(T->one()).norm() == 0.0);
  CHECK(T->multiply(T->basis(s), T->basis(s)).norm() == 0.0);
  CHECK(dga_validate(*T).pass());
}

TEST_CASE("sigma anticommutes with odd elements of Lambda(C^1)") {
  auto T = acyclic_extension(*algebra_exterior(1));
  const Vec sig = T->basis(T->sigma_index());
  const Vec a = T->basis(1);  // e_1, odd
  CHECK((T->multiply(sig, a) + T->multiply(a, sig)).norm() == 0.0);
}

TEST_CASE("acyclic extensions validate and restrict to d") {
  std::vector<AlgebraPtr> base{algebra_complex(), algebra_exterior(2), algebra_exterior(2, true),
                               algebra_discrete_circle(3)};
  for (const auto& A : base) {
    auto T = acyclic_extension(*A);
    auto rep = dga_validate(*T);
    INFO(A->name() << "\n" << rep.summary());
    CHECK(rep.pass());
    for (int i = 0; i < A->dim(); ++i) {
      Vec x = T->zero();
      x.head(A->dim()) = A->basis(i);
      Vec dx = T->d(x);
      CHECK((dx.head(A->dim()) - A->d(A->basis(i))).norm() == 0.0);
      CHECK(dx.tail(A->dim()).norm() == 0.0);
    }
  }
}

TEST_CASE("mat_lift") {
  auto C = algebra_complex();
  auto M1 = mat_lift(*C, 1);
  CHECK(M1->dim() == 1);
  CHECK(dga_validate(*M1).pass());
  auto M2 = mat_lift(*C, 2);
  CHECK(M2->dim() == 4);
  CHECK(dga_validate(*M2).pass());

  auto L = algebra_exterior(1);
  auto ML = mat_lift(*L, 2);
  CHECK(dga_validate(*ML).pass());
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixElement x = mat_zero(*L, 2), y = mat_zero(*L, 2);
    for (auto& e : x.entries) e = random_element(*L, rng, 0) + random_element(*L, rng, 1);
    for (auto& e : y.entries) e = random_element(*L, rng, 0) + random_element(*L, rng, 1);
    // Lifted product agrees with entrywise product.
    Vec p = ML->multiply(lift_coordinates(*L, x), lift_coordinates(*L, y));
    MatrixElement pe = mat_mul(*L, x, y);
    CHECK((p - lift_coordinates(*L, pe)).norm() < 1e-12);
    CHECK(mat_max_abs(mat_add(unlift_coordinates(*L, 2, p), pe, -1.0)) < 1e-12);
  }
  auto T = acyclic_extension(*algebra_discrete_circle(2));
  auto MT = mat_lift(*T, 2);
  CHECK(dga_validate(*MT).pass());
}

TEST_CASE("Maurer-Cartan form") {
  auto A = algebra_discrete_circle(5);
  const int n = 5;
  // identity
  auto mc1 = maurer_cartan(*A, mat_identity(*A, 1));
  CHECK(mat_max_abs(mc1.omega) == 0.0);

  // m = 1, explicit function: omega_+(x) = (f(x+1)-f(x))/f(x)
  std::vector<cplx> vals{{1.0, 0.2}, {2.0, -0.5}, {0.7, 0.1}, {1.5, 1.0}, {-1.2, 0.3}};
  MatrixElement g = mat_zero(*A, 1);
  g.at(0, 0) = dc_function(*A, n, vals);
  auto mc = maurer_cartan(*A, g);
  for (int x = 0; x < n; ++x) {
    const cplx wp = (vals[(x + 1) % n] - vals[x]) / vals[x];
    const cplx wm = (vals[(x + n - 1) % n] - vals[x]) / vals[x];
    CHECK(std::abs(mc.omega.at(0, 0)(n + x) - wp) < 1e-13);
    CHECK(std::abs(mc.omega.at(0, 0)(2 * n + x) - wm) < 1e-13);
  }
  CHECK(mc.mc_residual <= 1e-12);
  CHECK(mc.inverse_residual <= 1e-12);

  // random GL_2
  Rng rng(5);
  MatrixElement g2 = mat_zero(*A, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      std::vector<cplx> v(n);
      for (auto& z : v) z = rng.cnormal() + (a == b ? cplx(3.0) : cplx(0.0));
      g2.at(a, b) = dc_function(*A, n, v);
    }
  auto mc2 = maurer_cartan(*A, g2);
  CHECK(mc2.mc_residual <= 1e-10);
  CHECK(mc2.inverse_residual <= 1e-10);

  // errors
  MatrixElement sing = mat_zero(*A, 1);
  std::vector<cplx> zv(n, 1.0);
  zv[2] = 0.0;
  sing.at(0, 0) = dc_function(*A, n, zv);
  CHECK_THROWS_AS(maurer_cartan(*A, sing), Error);
  MatrixElement odd = mat_identity(*A, 1);
  odd.at(0, 0)(n) = 1.0;
  CHECK_THROWS_AS(maurer_cartan(*A, odd), Error);
}
