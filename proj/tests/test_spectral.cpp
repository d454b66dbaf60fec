#include <cmath>
#include <vector>

#include "chernlab/fixtures.hpp"
#include "chernlab/spectral.hpp"
#include "doctest.h"

using namespace chernlab;

namespace {

// g = diag(g1, 1).
MatrixElement block_with_one(const DgAlgebra& A, const MatrixElement& g1) {
  MatrixElement g = mat_identity(A, 2);
  g.at(0, 0) = g1.at(0, 0);
  return g;
}

MatrixElement unitary_circle_g(const DgAlgebra& A, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> v(n);
  for (auto& z : v) z = std::polar(1.0, rng.uniform(0.0, 2 * M_PI));
  MatrixElement g = mat_zero(A, 1);
  g.at(0, 0) = dc_function(A, n, v);
  return g;
}

}  // namespace

TEST_CASE("toeplitz exponential matches the dense augmented exponential") {
  Rng rng(4);
  const Mat H = rng.hermitian(4);
  const Mat a = rng.matrix(4, 4), b = 0.3 * rng.matrix(4, 4);
  const int K = 5;
  std::vector<Transition> tr;
  for (int i = 0; i < K; ++i) {
    tr.push_back({i, i + 1, a});
    if (i + 2 <= K) tr.push_back({i, i + 2, b});
  }
  const Mat E = augmented_exp(H * H, K + 1, tr);
  const auto T = toeplitz_exp({-H * H, a, b}, K);
  for (int k = 0; k <= K; ++k) CHECK(max_abs(T[k] - E.block(0, 4 * k, 4, 4)) < 1e-12);
}

TEST_CASE("generalized trace and matrix Chen generators") {
  auto A = algebra_discrete_circle(3);
  auto T = acyclic_extension(*A);
  Rng rng(2);
  MatrixElement x = mat_zero(*T, 1), y = mat_zero(*T, 1), f = mat_zero(*T, 1);
  for (int i = 0; i < T->dim(); ++i) {
    x.at(0, 0)(i) = rng.cnormal();
    y.at(0, 0)(i) = rng.cnormal();
  }
  y.at(0, 0)(T->unit()) = 0.0;  // the traced word must already be reduced
  f.at(0, 0) = mat_to_extension(*T, fixture_circle_g(*A, 3, 1, 9, 0.5)).at(0, 0);
  const Chain direct = expand(T, {x.at(0, 0), y.at(0, 0)}, ChainKind::cyclic);
  CHECK((generalized_trace(T, {x, y}) - direct).norm() == 0.0);
  for (int i = 0; i <= 1; ++i) {
    const Chain a = chen_T_matrix(T, f, i, {x, y});
    const Chain b = chen_Ti(f.at(0, 0), i, direct);
    CHECK((a - b).norm() <= 1e-12 * b.norm());
  }
  // Tr of identities over Mat_2 counts the diagonal
  const MatrixElement one = mat_identity(*T, 2);
  const Chain t = generalized_trace(T, {one});
  CHECK(std::abs(t.coefficient(Word{T->unit()}) - 2.0) < 1e-15);
}

TEST_CASE("odd Chern character of g") {
  const int n = 3;
  auto A = algebra_discrete_circle(n);
  auto g = fixture_circle_g(*A, n, 1, 5, 0.3);
  auto ch = ch_g(A, g, 4);
  CHECK(ch.terms[0].empty());
  for (int N = 1; N <= 4; ++N) {
    CHECK_FALSE(ch.terms[N].empty());
    for (const auto& t : ch.terms[N].terms())
      CHECK(parity_of(word_degree(*ch.ext, t.word, ChainKind::cyclic)) == 1);
  }
  // exact s-integration: more nodes change nothing
  auto ch2 = ch_g(A, g, 4, 40);
  for (int N = 1; N <= 4; ++N) CHECK((ch.terms[N] - ch2.terms[N]).norm() <= 1e-13);

  auto one = ch_g(A, mat_identity(*A, 1), 3);
  for (const auto& c : one.terms) CHECK(c.empty());

  // block embedding diag(g, 1) gives the same chain
  auto chb = ch_g(A, block_with_one(*A, g), 3, 0, ch.ext);
  for (int N = 1; N <= 3; ++N) CHECK((chb.terms[N] - ch.terms[N]).norm() <= 1e-13);

  MatrixElement sing = mat_zero(*A, 1);
  sing.at(0, 0) = dc_function(*A, n, {1.0, 0.0, 2.0});
  CHECK_THROWS_AS(ch_g(A, sing, 2), Error);
  CHECK_THROWS_AS(ch_g(A, g, kMaxLetters), Error);
}

TEST_CASE("Ch(g) closedness modulo Chen") {
  const int n = 2;
  auto A = algebra_discrete_circle(n);
  auto g = fixture_circle_g(*A, n, 1, 3, 0.3);
  auto ch = ch_g(A, g, 6);
  auto rep = ch_g_closed(ch);
  REQUIRE(rep.levels.size() == 5);
  for (const auto& l : rep.levels) {
    CHECK(l.db_identity <= 1e-12);
    CHECK(l.B_part == 0.0);
    CHECK(l.chen_residual <= 1e-10);
    CHECK(l.raw_residual > 0.1);  // without the telescope the residual is O(1)
    CHECK(std::abs(l.lambda_bound - l.lambda_predicted) <= 1e-10 * l.lambda_predicted);
    for (auto c : l.coefficients) CHECK(std::abs(std::abs(c) - 1.0) < 1e-10);
  }
  // the full D_tot agrees with the level-wise assembly
  const Chain D = d_total(ch.total());
  for (const auto& l : rep.levels) {
    const int N = l.N;
    const Chain lev = d_cyclic(ch.terms[N]) + b_cyclic(ch.terms[N + 1]) - B_connes(ch.terms[N - 1]);
    CHECK((D.component(N) - lev.component(N)).norm() <= 1e-12);
  }

  // Level 1 lies in the generic Chen subspace after the telescope correction.
  ChenOptions opt;
  opt.N_max = 1;
  opt.window_N = 2;
  opt.close_total = false;
  const Subspace sub = chen_subspace(ch.ext, opt);
  const MatrixElement w = mat_to_extension(*ch.ext, ch.mc.omega);
  const MatrixElement dg = mat_to_extension(*ch.ext, mat_d(*A, g));
  const MatrixElement dgi = mat_to_extension(*ch.ext, mat_d(*A, ch.mc.ginv));
  const MatrixElement one = mat_identity(*ch.ext, 1);
  const Chain lambda2 = generalized_trace(ch.ext, {one, dgi, dg});
  const Chain R1 = D.component(1);
  CHECK(chen_residual(R1 - lambda2, sub) <= 1e-10);
  CHECK(chen_residual(R1, sub) > 1e-3);

  // Mat_2 version through the generalized trace
  auto ch2 = ch_g(A, block_with_one(*A, g), 4, 0, ch.ext);
  auto rep2 = ch_g_closed(ch2);
  for (const auto& l : rep2.levels) CHECK(l.chen_residual <= 1e-10);

  // lambda decays at the entire rate for g close to 1
  auto gs = fixture_circle_g(*A, n, 1, 3, 0.05);
  auto rs = ch_g_closed(ch_g(A, gs, 6));
  for (size_t i = 1; i < rs.levels.size(); ++i)
    CHECK(rs.levels[i].lambda_bound < rs.levels[i - 1].lambda_bound);
}

TEST_CASE("twisted family identities") {
  const int n = 4;
  auto M = fixture_discrete_circle(n, 7);
  auto g = fixture_circle_g(*M.alg, n, 2, 8, 0.2);
  auto tf = twisted_family(M, g);
  CHECK(tf.omega_identity <= 1e-12);
  CHECK(tf.square_identity <= 1e-12);
  CHECK(tf.similarity <= 1e-12);
  CHECK(max_abs(tf.Q(0.0) - tf.Qm) == 0.0);
  CHECK(tf.x_skew > 0.0);  // X_s is not Hermitian in general
  Eigen::SelfAdjointEigenSolver<Mat> e0(tf.Qm);
  Eigen::ComplexEigenSolver<Mat> e1(tf.Q(1.0));
  std::vector<double> ev;
  for (Eigen::Index i = 0; i < e1.eigenvalues().size(); ++i) {
    CHECK(std::abs(e1.eigenvalues()(i).imag()) < 1e-9);
    ev.push_back(e1.eigenvalues()(i).real());
  }
  std::sort(ev.begin(), ev.end());
  for (size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - e0.eigenvalues()(i)) < 1e-9);

  auto weak = M;
  weak.weak = true;
  CHECK_THROWS_AS(twisted_family(weak, g), Error);
}

TEST_CASE("perturbation series") {
  const int n = 4;
  auto M = fixture_discrete_circle(n, 7);
  auto tf1 = twisted_family(M, mat_identity(*M.alg, 1));
  auto p0 = perturbation_series(tf1, 0.5, 1.0, 3);
  CHECK(max_abs(p0.value - expm(-(tf1.Qm * tf1.Qm))) < 1e-13);

  auto tf = twisted_family(M, fixture_circle_g(*M.alg, n, 1, 2, 0.3));
  auto p = perturbation_series(tf, 0.7, 1.0, 14);
  CHECK(p.error <= 1e-8);
  for (int k = 0; k <= 14; ++k) {
    const double bound = dyson_tail_bound(std::real(expm(-(tf.Qm * tf.Qm)).trace()),
                                          op_norm(tf.X(0.7)), k);
    CHECK(p.error_by_order[k] <= bound * (1 + 1e-9) + 1e-14);
  }
  for (int k = 3; k <= 12; ++k) CHECK(p.error_by_order[k + 1] < p.error_by_order[k]);
  auto ps = perturbation_series(tf, 0.0, 2.0, 2);
  CHECK(max_abs(ps.value - expm(-2.0 * tf.Qm * tf.Qm)) < 1e-13);
  CHECK_THROWS_AS(perturbation_series(tf, 0.7, 1.0, 2, 1e-12), Error);
}

TEST_CASE("spectral flow integral") {
  const int n = 4;
  auto M = fixture_discrete_circle(n, 7);
  auto tf1 = twisted_family(M, mat_identity(*M.alg, 1));
  CHECK(std::abs(sf_integral(tf1).direct) == 0.0);

  auto tf = twisted_family(M, fixture_circle_g(*M.alg, n, 2, 2, 0.3));
  auto sf = sf_integral(tf);
  CHECK(std::abs(sf.direct) <= 1e-8);  // Q_{g,1} is similar to Q_{g,0}
  CHECK(sf.methods_residual <= 1e-8);
  CHECK(sf.oracle_residual <= 1e-8);

  Rng rng(3);
  const Mat Q0 = rng.hermitian(6), Q1 = rng.hermitian(6);
  auto aff = sf_integral_affine(Q0, Q1);
  CHECK(std::abs(aff.oracle) > 0.05);
  CHECK(aff.oracle_residual <= 1e-8);
  CHECK(aff.methods_residual <= 1e-8);
}

TEST_CASE("partition resummation") {
  const int n = 4;
  auto M = fixture_discrete_circle(n, 7);
  auto tf = twisted_family(M, fixture_circle_g(*M.alg, n, 1, 2, 0.3));
  auto r0 = partition_resum_check(tf, 0.0, 1.0, 2);
  const Mat heat = expm(-tf.doubled->Q * tf.doubled->Q);
  CHECK(max_abs(r0.lhs - heat) < 1e-13);
  CHECK(max_abs(r0.rhs - heat) < 1e-13);
  auto r1 = partition_resum_check(tf, 0.6, 1.0, 1);
  CHECK(r1.residual <= 1e-12);
  auto r3 = partition_resum_check(tf, 0.6, 0.5, 3);
  CHECK(r3.residual <= 1e-8);
  CHECK(r3.unfiltered_residual > r3.residual);
}

TEST_CASE("pairing and the spectral flow terms") {
  const int n = 3;
  auto M = fixture_discrete_circle(n, 11);
  auto rep1 = pairing(M, mat_identity(*M.alg, 1), 4, 0, 1e-6);
  for (const auto& t : rep1.terms) CHECK(std::abs(t.pairing_term) == 0.0);

  for (int m : {1, 2}) {
    auto g = fixture_circle_g(*M.alg, n, m, 3, 0.05);
    auto rep = pairing(M, g, 10, 0, 1e-5);
    CHECK(rep.tail_bound <= 1e-5);
    for (const auto& t : rep.terms) {
      CHECK(t.residual <= 1e-10);
      if (t.N <= 4) CHECK(std::abs(t.pairing_term) > 1e-8);
      if (t.N <= 4) CHECK(t.plus_sign_residual > std::abs(t.pairing_term));
    }
    CHECK(rep.curvature_AB == 0.0);
    CHECK(rep.curvature_BA == 0.0);
    CHECK(rep.curvature_B <= 1e-14);
    CHECK(rep.curvature_X <= 1e-12);
    CHECK(rep.module_reshuffle_residual == 0.0);
    CHECK(rep.reshuffle_residual <= 1e-13);
    CHECK(rep.sf_residual <= 1e-6);
    CHECK(std::abs(rep.pointwise_direct) > 1e-6);
    CHECK(rep.pointwise_residual <= 1e-5 * std::abs(rep.pointwise_direct));

    // literal evaluation of Ch_M on the expanded chain Ch(g)
    auto ch = ch_g(M.alg, g, 3);
    ChernEngine E(double_odd(acyclic_extend_odd(M, ch.ext)));
    for (int N = 1; N <= 3; ++N) {
      const cplx lit = E.chern(ch.terms[N]);
      CHECK(std::abs(lit - rep.terms[N - 1].pairing_term) <= 1e-12 * std::max(1.0, std::abs(lit)));
    }
  }
  auto gbig = fixture_circle_g(*M.alg, n, 1, 3, 0.3);
  CHECK_THROWS_WITH_AS(pairing(M, gbig, 3, 0, 1e-9), doctest::Contains("suggested N_max"), Error);
}

TEST_CASE("eigenvalue crossings") {
  Mat Q0 = Mat::Identity(3, 3), Q1 = Mat::Identity(3, 3);
  Q0(0, 0) = -1.0;
  auto c = eigenvalue_crossings(Q0, Q1, 100);
  CHECK(c.spectral_flow() == 1);
  auto back = eigenvalue_crossings(Q1, Q0, 100);
  CHECK(back.spectral_flow() == -1);

  const int n = 4;
  auto M = fixture_discrete_circle(n, 7);
  auto g = unitary_circle_g(*M.alg, n, 12);
  auto tf = twisted_family(M, g);
  CHECK(is_hermitian(tf.Q(1.0), 1e-12));
  auto cr = eigenvalue_crossings(tf.Qm, tf.Q(1.0), 400);
  CHECK(cr.spectral_flow() == 0);
  CHECK_THROWS_AS(eigenvalue_crossings(tf.Qm, tf.Q(1.0) + Mat::Identity(8, 8) * cplx(0, 1), 10),
                  Error);
}
