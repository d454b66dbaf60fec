#include <cmath>
#include <vector>

#include "chernlab/fixtures.hpp"
#include "chernlab/fredholm.hpp"
#include "doctest.h"

using namespace chernlab;

namespace {

CqModule module_over_C(int q, std::uint64_t seed) {
  Rng rng(seed);
  CqModule M;
  M.alg = algebra_complex();
  M.cm = q == 0 ? clifford_trivial({1, -1, 1, -1}) : clifford_standard(q, {1, -1});
  M.c = {Mat::Identity(M.dim(), M.dim())};
  M.Q = random_odd_equivariant_hermitian(M.cm, rng);
  M.weak = false;
  return M;
}

double rel(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

}  // namespace

TEST_CASE("module validation") {
  auto M0 = module_over_C(0, 1);
  CHECK(module_validate(M0).pass());

  auto W = fixture_random_weak_cq(6, 1, 7);
  CHECK(module_validate(W).pass());
  auto Ws = W;
  Ws.weak = false;
  CHECK_FALSE(module_validate(Ws).pass());

  auto S = fixture_exterior_strong(2, true, 0, 4, 3);
  CHECK(module_validate(S).pass());
  auto bad = S;
  bad.c[1] = bad.c[1] + 0.1 * bad.cm.H.even_part(Mat::Ones(bad.dim(), bad.dim()));
  CHECK_FALSE(module_validate(bad).pass());

  auto dc = fixture_discrete_circle(6, 11);
  CHECK(multiplicativity_residual(dc.alg, dc.c, dc.Q) <= 1e-12);
  auto dcbad = dc;
  dcbad.Q(0, 2) += 1.0;  // hopping not of the form U (x) A breaks [Q, c(f)] = c(df)
  dcbad.Q(2, 0) += 1.0;
  CHECK(multiplicativity_residual(dcbad.alg, dcbad.c, dcbad.Q) > 0.5);

  auto bad_shape = M0;
  bad_shape.c.push_back(Mat::Identity(4, 4));
  CHECK_THROWS_AS(module_validate(bad_shape), Error);
}

TEST_CASE("doubling and acyclic extension") {
  auto M = fixture_discrete_circle(3, 5);
  auto D = double_odd(M);
  CHECK(module_validate(D).pass());
  const int d = M.dim();
  Mat Q2 = D.Q * D.Q;
  CHECK(max_abs(Q2.block(0, 0, d, d) - M.Q * M.Q) < 1e-13);
  CHECK(max_abs(Q2.block(0, d, d, d)) == 0.0);
  CHECK(max_abs(D.cm.e[0] * D.cm.e[0] + Mat::Identity(2 * d, 2 * d)) == 0.0);
  for (int i = 0; i < M.alg->dim(); ++i)
    if (M.alg->degree(i) == 0) CHECK(D.cm.H.operator_parity(D.c[i]) == 0);

  auto T = acyclic_extension(*M.alg);
  auto DT = acyclic_extend_module(D, T);
  CHECK(module_validate(DT).pass());
  CHECK(max_abs(DT.c[T->sigma_index()]) == 0.0);
  for (int i = 0; i < M.alg->dim(); ++i) CHECK(max_abs(DT.c[i] - D.c[i]) == 0.0);
  // doubling commutes with the extension
  auto TD = double_odd(acyclic_extend_odd(M, T));
  for (int i = 0; i < T->dim(); ++i) CHECK(max_abs(TD.c[i] - DT.c[i]) == 0.0);
  CHECK(max_abs(TD.Q - DT.Q) == 0.0);
}

TEST_CASE("curvature components") {
  auto M = double_odd(fixture_discrete_circle(4, 2));
  Curvature F(M);
  const auto& A = *M.alg;
  for (int f : A.basis_of_degree(0)) {
    CHECK(max_abs(F.F1(f)) < 1e-13);
    for (int t = 0; t < A.dim(); ++t) CHECK(max_abs(F.F2(f, t)) < 1e-13);
  }
  auto MT = acyclic_extend_module(M);
  Curvature FT(MT);
  const int s = MT.alg->sigma_index();
  CHECK(max_abs(FT.F1(s) - Mat::Identity(M.dim(), M.dim())) < 1e-13);
  for (int t = 0; t < MT.alg->dim(); ++t) CHECK(max_abs(FT.F2(s, t)) < 1e-13);

  // trivially graded, d = 0: F1 = [Q, c]
  auto G = double_odd(fixture_getzler_trivial(4, 9));
  Curvature FG(G);
  for (int i = 0; i < G.alg->dim(); ++i)
    CHECK(max_abs(FG.F1(i) - (G.Q * G.c[i] - G.c[i] * G.Q)) < 1e-13);

  // vector forms agree with the basis cache
  Rng rng(3);
  Vec a = A.zero(), b = A.zero();
  for (int i = 0; i < A.dim(); ++i) a(i) = rng.cnormal(), b(i) = rng.cnormal();
  Mat f2 = Mat::Zero(M.dim(), M.dim());
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < A.dim(); ++j) f2 += a(i) * b(j) * F.F2(i, j);
  CHECK(rel(F.F2(a, b), f2) < 1e-12);
}

TEST_CASE("quantization") {
  auto M = fixture_random_weak_cq(4, 1, 21, algebra_exterior(2, true));
  ChernEngine E(M, 0.7);
  CHECK(max_abs(E.phi(Word()) - expm(-0.7 * M.Q * M.Q)) < 1e-13);
  Curvature F(M);
  const Word w1{1};
  CHECK(rel(E.phi(w1), -0.7 * heat_bracket(0.7 * M.Q * M.Q, {F.F1(1)})) < 1e-12);
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const Word w = random_bar_word(*M.alg, rng, rng.integer(1, 5));
    Mat pruned = quantize_enumerated(M, 0.7, w, true);
    Mat full = quantize_enumerated(M, 0.7, w, false);
    CHECK(rel(full, pruned) < 1e-13);
    CHECK(rel(E.phi(w), pruned) < 1e-10);
  }
  CHECK_THROWS_AS(E.phi(Word(std::string(13, '\1'))), Error);
}

TEST_CASE("chern character parity and invariance") {
  Rng rng(12);
  for (int q : {0, 1, 2}) {
    auto M = fixture_exterior_strong(2, true, q, 2, 40 + q);
    ChernEngine E(M);
    const auto& A = *M.alg;
    // N = 0
    for (int i = 0; i < A.dim(); ++i) {
      const cplx want = cstr(M.cm, M.c[i] * expm(-M.Q * M.Q));
      CHECK(std::abs(E.chern(Word{i}) - want) < 1e-13);
    }
    int checked = 0;
    for (int t = 0; t < 200 && checked < 30; ++t) {
      Word w = random_cyclic_word(A, rng, rng.integer(0, 3));
      if (parity_of(word_degree(A, w, ChainKind::cyclic)) == parity_of(q)) continue;
      ++checked;
      CHECK(std::abs(E.chern(w)) <= 1e-12);
    }
    CHECK(checked == 30);

    Mat U = random_equivariant_unitary(M.cm, rng);
    ChernEngine EU(conjugate_module(M, U));
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
      Word w = random_cyclic_word(A, rng, rng.integer(0, 3));
      worst = std::max(worst, std::abs(E.chern(w) - EU.chern(w)));
    }
    CHECK(worst <= 1e-11);
  }
}

TEST_CASE("coclosedness") {
  auto M0 = module_over_C(0, 5);
  ChernEngine E0(M0);
  auto r = coclosed_residual(E0, Word{0});
  CHECK(std::abs(r.value) == 0.0);

  Rng rng(6);
  auto L = fixture_exterior_strong(1, false, 0, 2, 8);
  for (const auto& M : {L, acyclic_extend_module(L)}) {
    ChernEngine E(M);
    for (int t = 0; t < 60; ++t) {
      Word w = random_cyclic_word(*M.alg, rng, rng.integer(0, 3));
      auto c = coclosed_residual(E, w);
      CHECK(std::abs(c.value) <= 1e-9 * std::max(1.0, c.scale));
    }
  }
  auto DT = acyclic_extend_module(double_odd(fixture_discrete_circle(3, 2)));
  ChernEngine ET(DT);
  for (int t = 0; t < 60; ++t) {
    Word w = random_cyclic_word(*DT.alg, rng, rng.integer(0, 2));
    auto c = coclosed_residual(ET, w);
    CHECK(std::abs(c.value) <= 1e-8 * std::max(1.0, c.scale));
  }
}

TEST_CASE("chen vanishing") {
  Rng rng(13);
  auto D = double_odd(fixture_discrete_circle(3, 4));
  auto rep = chen_vanish(D, 25, 2, rng);
  for (const auto& f : rep.families) {
    INFO(f.family << " words=" << f.words << " max=" << f.max_value);
    CHECK(f.words == 25);
    CHECK(f.max_value <= 1e-9 * std::max(1.0, f.max_scale));
  }
  auto S = fixture_exterior_strong(2, true, 2, 1, 5);
  auto rep2 = chen_vanish(S, 25, 2, rng);
  CHECK(rep2.worst_relative() <= 1e-9);
  CHECK_THROWS_AS(chen_vanish(fixture_random_weak_cq(4, 1, 3), 5, 2, rng), Error);
}

TEST_CASE("chern pullback along alpha and restriction") {
  Rng rng(77);
  auto M = fixture_exterior_strong(2, true, 1, 1, 9);
  auto MT = acyclic_extend_module(M);
  ChernEngine E(M), ET(MT);
  for (int t = 0; t < 40; ++t) {
    Word w = random_cyclic_word(*MT.alg, rng, rng.integer(0, 3));
    CHECK(std::abs(ET.chern(w) - chern_via_alpha(ET, w)) <= 1e-9);
    Word v = random_cyclic_word(*M.alg, rng, rng.integer(0, 3));
    CHECK(std::abs(ET.chern(v) - E.chern(v)) <= 1e-14);
  }
}

TEST_CASE("psi cochain and Bianchi identity") {
  Rng rng(31);
  auto M = fixture_exterior_strong(2, true, 0, 4, 17);
  const Mat V = random_odd_equivariant_hermitian(M.cm, rng, 0.5);
  auto h = linear_homotopy(M, V);
  // arity 0 with c fixed: -T {V}_{TQ^2}
  const double T = 0.6;
  const Mat Q = M.Q + 0.3 * V;
  CHECK(rel(psi_cochain(h, 0.3, T, Word()), -T * heat_bracket(T * Q * Q, {V})) < 1e-12);
  // small T
  const Word w{1, 2};
  const double n1 = psi_cochain(h, 0.3, 1e-4, w).norm(), n2 = psi_cochain(h, 0.3, 2e-4, w).norm();
  CHECK(n1 < 1e-3);
  CHECK(n2 / n1 > 1.5);

  for (int t = 0; t < 20; ++t) {
    Word b = random_bar_word(*M.alg, rng, rng.integer(0, 3));
    auto r = bianchi_check(h, rng.uniform(0.1, 0.9), b);
    INFO(b.str());
    CHECK(r.residual <= 1e-6);
  }
  // with a varying representation as well
  Homotopy hc;
  const Mat C = M.cm.H.odd_part(equivariant_project(M.cm, 0.3 * rng.matrix(M.dim(), M.dim())));
  hc.module = [M, V, C](double s) {
    CqModule r = M;
    r.Q = M.Q + s * V;
    r.c[1] = M.c[1] + s * C;
    return r;
  };
  hc.dQ = [V](double) { return V; };
  hc.dc = [M, C](double) {
    std::vector<Mat> dc(M.alg->dim(), Mat::Zero(M.dim(), M.dim()));
    dc[1] = C;
    return dc;
  };
  for (int t = 0; t < 20; ++t) {
    Word b = random_bar_word(*M.alg, rng, rng.integer(0, 3));
    auto r = bianchi_check(hc, rng.uniform(0.1, 0.9), b);
    INFO(b.str());
    CHECK(r.residual <= 1e-6);
  }
}

TEST_CASE("transgression") {
  Rng rng(55);
  auto M = fixture_exterior_strong(2, true, 0, 4, 23);
  auto T = acyclic_extension(*M.alg);
  std::vector<Word> words;
  for (int t = 0; t < 10; ++t) words.push_back(random_cyclic_word(*T, rng, rng.integer(0, 2)));

  auto zero = extend_homotopy(linear_homotopy(M, Mat::Zero(M.dim(), M.dim())), T);
  auto r0 = transgression_check(zero, words, 8);
  CHECK(r0.max_residual == 0.0);

  const Mat V = random_odd_equivariant_hermitian(M.cm, rng, 0.5);
  auto h = extend_homotopy(linear_homotopy(M, V), T);
  auto r = transgression_check(h, words, 16);
  CHECK(r.cs_parity == 1);
  CHECK(r.max_residual <= 1e-6);
}

TEST_CASE("getzler comparison") {
  auto M = fixture_getzler_trivial(4, 3);
  auto D = double_odd(M);
  ChernEngine E(D);
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    Word w = random_cyclic_word(*M.alg, rng, rng.integer(0, 5));
    const cplx g = getzler_closed_form(M, w);
    if ((w.size() - 1) % 2 == 0) CHECK(g == cplx(0.0));
    CHECK(std::abs(g - E.chern(w)) <= 1e-9);
  }
  // N = 1 specialisation
  const Mat K = M.Q * M.c[1] - M.c[1] * M.Q;
  const cplx want = -(M.c[2] * heat_bracket(M.Q * M.Q, {K})).trace();
  CHECK(std::abs(getzler_closed_form(M, Word{2, 1}) - want) < 1e-13);
  CHECK_THROWS_AS(getzler_closed_form(fixture_discrete_circle(3, 1), Word{0}), Error);
}

TEST_CASE("fundamental estimate") {
  Rng rng(90);
  std::vector<CqModule> mods{fixture_random_weak_cq(4, 1, 2, algebra_exterior(2, true)),
                             acyclic_extend_module(double_odd(fixture_discrete_circle(3, 1)))};
  for (const auto& M : mods) {
    auto nu = calibrate_seminorm(M);
    for (double T : {0.25, 1.0, 4.0}) {
      ChernEngine E(M, T);
      for (int t = 0; t < 30; ++t) {
        Word w = random_bar_word(*M.alg, rng, rng.integer(0, 6));
        CHECK(trace_norm(E.phi(w)) <= fundamental_bound(M, nu, T, w));
      }
    }
  }
}
