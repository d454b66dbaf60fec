// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#include "chernlab/spectral.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>

namespace chernlab {

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

MatrixElement checked_inverse(const DgAlgebra& A, const MatrixElement& g, const char* who) {
  MatrixElement gi;
  try {
    gi = mat_inverse(A, g);
  } catch (const Error& e) {
    throw Error(std::string(who) + ": g is not invertible (" + e.what() + ")");
  }
  const MatrixElement id = mat_identity(A, g.m);
  const double r1 = mat_max_abs(mat_add(mat_mul(A, g, gi), id, -1.0));
  const double r2 = mat_max_abs(mat_add(mat_mul(A, gi, g), id, -1.0));
  if (!(std::max(r1, r2) <= 1e-9)) throw Error(std::string(who) + ": g is not invertible");
  return gi;
}

// Least squares of target against generators in word coordinates.
struct Fit {
  double residual = 0;
  std::vector<cplx> coeff;
};

Fit fit_chains(const Chain& target, const std::vector<Chain>& gens) {
  std::unordered_map<Word, int, WordHash> pos;
  auto index = [&](const Word& w) {
    auto it = pos.find(w);
    if (it != pos.end()) return it->second;
    const int k = static_cast<int>(pos.size());
    pos.emplace(w, k);
    return k;
  };
  for (const auto& t : target.terms()) index(t.word);
  for (const auto& g : gens)
    for (const auto& t : g.terms()) index(t.word);
  const Eigen::Index R = static_cast<Eigen::Index>(pos.size());
  Mat A = Mat::Zero(R, static_cast<Eigen::Index>(gens.size()));
  Vec b = Vec::Zero(R);
  for (const auto& t : target.terms()) b(pos.at(t.word)) += t.coeff;
  for (size_t j = 0; j < gens.size(); ++j)
    for (const auto& t : gens[j].terms()) A(pos.at(t.word), static_cast<Eigen::Index>(j)) += t.coeff;
  Fit f;
  if (gens.empty() || R == 0) {
    f.residual = b.norm();
    return f;
  }
  const Vec x = A.completeOrthogonalDecomposition().solve(b);
  f.residual = (A * x - b).norm();
  for (Eigen::Index j = 0; j < x.size(); ++j) f.coeff.push_back(x(j));
  return f;
}

}  // namespace

// (.., x_i, f x_{i+1}, ..) - (.., x_i f, x_{i+1}, ..) - (.., x_i, df, x_{i+1}, ..),
// with f x_0 in slot 0 when i is the last slot.
Chain chen_T_matrix(const AlgebraPtr& A, const MatrixElement& f, int i,
                    const std::vector<MatrixElement>& w) {
  const int N = static_cast<int>(w.size()) - 1;
  if (i < 0 || i > N) throw Error("traced_T: slot out of range");
  Chain out(A, ChainKind::cyclic);
  const int tgt = i < N ? i + 1 : 0;
  auto w1 = w;
  w1[tgt] = mat_mul(*A, f, w[tgt]);
  out.add_chain(generalized_trace(A, w1));
  auto w2 = w;
  w2[i] = mat_mul(*A, w[i], f);
  out.add_chain(generalized_trace(A, w2, -1.0));
  auto w3 = w;
  w3.insert(w3.begin() + i + 1, mat_d(*A, f));
  out.add_chain(generalized_trace(A, w3, -1.0));
  out.canonicalize();
  return out;
}

namespace {

double l1_entries(const MatrixElement& x) {
  double s = 0;
  for (const auto& e : x.entries) s += e.cwiseAbs().sum();
  return s;
}

Mat c_matrix(const OddModule& M, const MatrixElement& x) {
  const int m = x.m, d = M.dim();
  Mat r = Mat::Zero(m * d, m * d);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) r.block(a * d, b * d, d, d) = M.c_of(x.at(a, b));
  return r;
}

Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

double heat_trace(const Mat& H) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(H), Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().unaryExpr([](double x) { return std::exp(-x); }).sum();
}

double F_erf(double x) { return 0.5 * std::sqrt(M_PI) * std::erf(x); }

}  // namespace

Chain generalized_trace(const AlgebraPtr& alg, const std::vector<MatrixElement>& word, cplx coeff) {
  Chain out(alg, ChainKind::cyclic);
  if (word.empty()) return out;
  const int m = word[0].m;
  const int L = static_cast<int>(word.size());
  for (const auto& x : word)
    if (x.m != m) throw Error("generalized_trace: matrix sizes differ");
  std::vector<int> idx(L, 0);
  while (true) {
    ElementWord ew;
    bool zero = false;
    for (int k = 0; k < L && !zero; ++k) {
      const Vec& e = word[k].at(idx[k], idx[(k + 1) % L]);
      if (e.cwiseAbs().maxCoeff() == 0.0) zero = true;
      ew.push_back(e);
    }
    if (!zero) out.add_chain(expand(alg, ew, ChainKind::cyclic, coeff));
    int k = L - 1;
    while (k >= 0 && ++idx[k] == m) idx[k--] = 0;
    if (k < 0) break;
  }
  out.canonicalize();
  return out;
}

Chain OddChernChain::total() const {
  Chain c(ext, ChainKind::cyclic);
  for (const auto& t : terms) c.add_chain(t);
  c.canonicalize();
  return c;
}

OddChernChain ch_g(const AlgebraPtr& base, const MatrixElement& g, int N_max, int s_nodes,
                   AlgebraPtr ext) {
  if (N_max < 0) throw Error("ch_g: N_max must be non-negative");
  if (N_max + 2 > kMaxLetters)
    throw Error("ch_g: truncation N_max = " + std::to_string(N_max) +
                " overflows the word window of " + std::to_string(kMaxLetters) + " letters");
  if (!ext) ext = acyclic_extension(*base);
  const DgAlgebra& E = *ext;
  OddChernChain ch;
  ch.base = base;
  ch.ext = ext;
  const MatrixElement gi = checked_inverse(*base, g, "ch_g");
  ch.mc = maurer_cartan(*base, g, &gi);
  ch.N_max = N_max;
  ch.s_nodes = std::max(s_nodes, N_max + 1);
  const int m = g.m;
  const MatrixElement w = mat_to_extension(E, ch.mc.omega);
  const MatrixElement sw = mat_sigma(E, w);
  const MatrixElement sw2 = mat_sigma(E, mat_mul(E, w, w));
  const bool has_sq = mat_max_abs(sw2) > 0.0;
  const MatrixElement one = mat_identity(E, m);
  const Quadrature q = gauss_legendre(ch.s_nodes);

  // Rough size guard: terms per level grow like N * (support of omega)^N.
  double support = 0;
  for (const auto& e : w.entries) support += static_cast<double>((e.array() != cplx(0.0)).count());
  for (int N = 1; N <= N_max; ++N)
    if (N * std::pow(std::max(support, 1.0), N) * (has_sq ? std::pow(2.0, N - 1) : 1.0) > 2e7)
      throw Error("ch_g: truncation N_max = " + std::to_string(N_max) +
                  " exceeds the expansion window; lower N_max");

  ch.terms.assign(N_max + 1, Chain(ext, ChainKind::cyclic));
  for (int N = 1; N <= N_max; ++N) {
    Chain c(ext, ChainKind::cyclic);
    const int masks = has_sq ? (1 << (N - 1)) : 1;
    for (int k = 1; k <= N; ++k)
      for (int mask = 0; mask < masks; ++mask) {
        const int b = std::popcount(static_cast<unsigned>(mask));
        // coefficient of s^(N-1-b) (s^2 - s)^b integrated over [0,1]
        double coef = 0;
        for (size_t j = 0; j < q.nodes.size(); ++j) {
          const double s = q.nodes[j];
          coef += q.weights[j] * std::pow(s, N - 1 - b) * std::pow(s * s - s, b);
        }
        std::vector<MatrixElement> word{one};
        int slot = 0;
        for (int p = 1; p <= N; ++p) {
          if (p == k) {
            word.push_back(sw);
            continue;
          }
          word.push_back(((mask >> slot) & 1) ? sw2 : w);
          ++slot;
        }
        c.add_chain(generalized_trace(ext, word, coef));
      }
    c.canonicalize();
    ch.terms[N] = std::move(c);
  }
  return ch;
}

double ChGClosedReport::max_chen_residual() const {
  double r = 0;
  for (const auto& l : levels) r = std::max(r, l.chen_residual);
  return r;
}

ChGClosedReport ch_g_closed(const OddChernChain& ch) {
  const AlgebraPtr& A = ch.ext;
  const DgAlgebra& E = *A;
  const DgAlgebra& base = *ch.base;
  const int m = ch.mc.g.m;
  const MatrixElement one = mat_identity(E, m);
  const MatrixElement g = mat_to_extension(E, ch.mc.g);
  const MatrixElement gi = mat_to_extension(E, ch.mc.ginv);
  const MatrixElement w = mat_to_extension(E, ch.mc.omega);
  const MatrixElement dg = mat_to_extension(E, mat_d(base, ch.mc.g));
  const MatrixElement dgi = mat_to_extension(E, mat_d(base, ch.mc.ginv));

  auto lambda = [&](int N) {
    if (N < 2) return Chain(A, ChainKind::cyclic);
    std::vector<MatrixElement> word{one};
    for (int i = 0; i < N - 2; ++i) word.push_back(w);
    word.push_back(dgi);
    word.push_back(dg);
    return generalized_trace(A, word);
  };
  const double lw = l1_entries(w), ldg = l1_entries(dg), ldgi = l1_entries(dgi);

  ChGClosedReport rep;
  const int Nmax = ch.N_max;
  for (int N = 1; N + 1 <= Nmax; ++N) {
    ChGLevel lev;
    lev.N = N;
    Chain db = d_cyclic(ch.terms[N]) + b_cyclic(ch.terms[N + 1]);
    db = db.component(N);
    Chain Bp = B_connes(ch.terms[N - 1]).component(N);
    lev.B_part = Bp.norm();
    const Chain R = db - Bp;

    std::vector<MatrixElement> pw{one};
    for (int i = 0; i < N; ++i) pw.push_back(w);
    lev.db_identity = (db - generalized_trace(A, pw)).norm();

    std::vector<Chain> gens;
    if (N == 1) {
      gens.push_back(chen_T_matrix(A, gi, 0, {one, dg}));
      lev.labels.push_back("T_0^(g^-1)(1, dg)");
      gens.push_back(chen_T_matrix(A, g, 0, {gi}));
      lev.labels.push_back("T_0^(g)(g^-1)");
    } else {
      std::vector<MatrixElement> src{one};
      for (int i = 0; i < N - 1; ++i) src.push_back(w);
      src.push_back(dg);
      gens.push_back(chen_T_matrix(A, gi, N - 1, src));
      lev.labels.push_back("T_" + std::to_string(N - 1) + "^(g^-1)(1, omega^" +
                           std::to_string(N - 1) + ", dg)");
    }
    lev.raw_residual = fit_chains(R, gens).residual;
    const Chain lam_next = lambda(N + 1);
    const Chain target = R + lambda(N) - lam_next;
    const Fit f = fit_chains(target, gens);
    lev.chen_residual = f.residual;
    lev.coefficients = f.coeff;
    lev.lambda_bound = entire_bound(lam_next).value;
    lev.lambda_predicted = std::pow(lw, N - 1) * ldgi * ldg / factorial((N + 1) / 2);
    rep.levels.push_back(std::move(lev));
  }
  return rep;
}

Mat TwistedFamily::X(double s) const {
  return s * (Qm * c_omega + c_omega * Qm) + s * s * c_omega * c_omega;
}

Mat TwistedFamily::X_doubled(double s) const {
  const Mat ct = doubled->c_of(v_omega);
  return s * (doubled->Q * ct + ct * doubled->Q) + s * s * ct * ct;
}

TwistedFamily twisted_family(const OddModule& M, const MatrixElement& g) {
  if (M.weak) throw Error("twisted_family: the module must be strong");
  const ValidationReport vr = odd_module_validate(M);
  if (!vr.pass()) throw Error("twisted_family: module axioms fail\n" + vr.summary());
  TwistedFamily tf;
  tf.M = M;
  tf.m = g.m;
  const DgAlgebra& A = *M.alg;
  const MatrixElement gi = checked_inverse(A, g, "twisted_family");
  tf.mc = maurer_cartan(A, g, &gi);
  const int m = g.m;
  tf.Qm = kron(Mat::Identity(m, m), M.Q);
  tf.c_g = c_matrix(M, g);
  tf.c_ginv = c_matrix(M, gi);
  tf.c_omega = c_matrix(M, tf.mc.omega);
  tf.omega_identity = max_abs(tf.c_omega - tf.c_ginv * (tf.Qm * tf.c_g - tf.c_g * tf.Qm));
  for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const Mat Qs = tf.Q(s);
    tf.square_identity = std::max(tf.square_identity, max_abs(Qs * Qs - tf.Qm * tf.Qm - tf.X(s)));
  }
  tf.similarity = max_abs(tf.Q(1.0) - tf.c_ginv * tf.Qm * tf.c_g);
  const Mat X1 = tf.X(1.0);
  tf.x_skew = max_abs(X1 - X1.adjoint());

  tf.ext = acyclic_extension(A);
  tf.lifted = mat_lift(*tf.ext, m);
  tf.doubled = std::make_shared<const CqModule>(
      double_odd(odd_mat_lift(acyclic_extend_odd(M, tf.ext), m, tf.lifted)));
  tf.F = std::make_shared<const Curvature>(*tf.doubled);
  const DgAlgebra& E = *tf.ext;
  const MatrixElement w = mat_to_extension(E, tf.mc.omega);
  tf.v_omega = lift_coordinates(E, w);
  tf.v_sigma_omega = lift_coordinates(E, mat_sigma(E, w));
  tf.v_sigma_omega2 = lift_coordinates(E, mat_sigma(E, mat_mul(E, w, w)));
  return tf;
}

double dyson_tail_bound(double heat, double x, int M_max) {
  // sum_{M > M_max} x^M / M! <= x^(M_max+1) / (M_max+1)! e^x
  return heat * std::exp((M_max + 1) * std::log(std::max(x, 1e-300)) - std::lgamma(M_max + 2.0) + x);
}

PerturbationResult perturbation_series(const TwistedFamily& tf, double s, double T, int M_max,
                                       double tail_tol) {
  if (T <= 0) throw Error("perturbation_series: T must be positive");
  if (M_max < 0) throw Error("perturbation_series: M_max must be non-negative");
  const Mat H = hermitize(T * tf.Qm * tf.Qm);
  const Mat X = tf.X(s);
  const double heat = heat_trace(H);
  const double x = T * op_norm(X);
  PerturbationResult r;
  r.M_max = M_max;
  r.tail_bound = dyson_tail_bound(heat, x, M_max);
  if (tail_tol >= 0 && !(r.tail_bound <= tail_tol)) {
    int k = M_max;
    while (k < 2000 && !(dyson_tail_bound(heat, x, k) <= tail_tol)) ++k;
    throw Error("perturbation_series: tail bound " + std::to_string(r.tail_bound) +
                " exceeds tolerance at M_max = " + std::to_string(M_max) + "; try M_max >= " +
                std::to_string(k));
  }
  const Mat Qs = tf.Q(s);
  r.direct = expm(-T * (Qs * Qs));
  const int d = static_cast<int>(H.rows());
  const std::vector<Mat> Eaug = toeplitz_exp({-H, -T * X}, M_max);
  r.value = Mat::Zero(d, d);
  for (int j = 0; j <= M_max; ++j) {
    r.value += Eaug[j];
    r.error_by_order.push_back(trace_norm(r.value - r.direct));
  }
  r.error = r.error_by_order.back();
  return r;
}

namespace {

SfIntegral sf_generic(const Mat& Q0, const Mat& Qdot, const Mat& Q1, int s_nodes) {
  SfIntegral r;
  r.s_nodes = s_nodes;
  const Quadrature q = gauss_legendre(s_nodes);
  const Mat H = hermitize(Q0 * Q0);
  const double heat = heat_trace(H);
  const int d = static_cast<int>(Q0.rows());
  const double qd = op_norm(Qdot);
  for (size_t j = 0; j < q.nodes.size(); ++j) {
    const double s = q.nodes[j];
    const Mat Qs = Q0 + s * Qdot;
    r.direct += q.weights[j] * (Qdot * expm(-(Qs * Qs))).trace();
    const Mat X = s * (Q0 * Qdot + Qdot * Q0) + s * s * Qdot * Qdot;
    const double x = op_norm(X);
    int M = 1;
    while (M < 400 && dyson_tail_bound(heat, x, M) > 1e-14 * heat) ++M;
    r.series_order = std::max(r.series_order, M);
    r.series_tail += q.weights[j] * qd * dyson_tail_bound(heat, x, M);
    const std::vector<Mat> Eaug = toeplitz_exp({-H, -X}, M);
    Mat partial = Mat::Zero(d, d);
    for (const auto& e : Eaug) partial += e;
    r.series += q.weights[j] * (Qdot * partial).trace();
  }
  auto trF = [](const Mat& Q) {
    Eigen::ComplexEigenSolver<Mat> es(Q, false);
    double t = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) t += F_erf(es.eigenvalues()(i).real());
    return t;
  };
  r.oracle = trF(Q1) - trF(Q0);
  r.methods_residual = std::abs(r.direct - r.series);
  r.oracle_residual = std::abs(r.direct - r.oracle);
  return r;
}

}  // namespace

SfIntegral sf_integral(const TwistedFamily& tf, int s_nodes) {
  return sf_generic(tf.Qm, tf.c_omega, tf.Q(1.0), s_nodes);
}

SfIntegral sf_integral_affine(const Mat& Q0, const Mat& Q1, int s_nodes) {
  if (!is_hermitian(Q0) || !is_hermitian(Q1))
    throw Error("sf_integral_affine: endpoints must be Hermitian");
  return sf_generic(Q0, Q1 - Q0, Q1, s_nodes);
}

PartitionResumResult partition_resum_check(const TwistedFamily& tf, double s, double T, int M_max) {
  if (T <= 0) throw Error("partition_resum_check: T must be positive");
  if (M_max < 0) throw Error("partition_resum_check: M_max must be non-negative");
  const CqModule& D = *tf.doubled;
  const Curvature& F = *tf.F;
  const int d = D.dim();
  const Mat H = hermitize(T * F.F0());
  const Mat Xt = tf.X_doubled(s);
  const Vec a = tf.A_coords(s);
  const Mat F1 = F.F1(a), F2 = F.F2(a, a);
  PartitionResumResult r;

  r.lhs = Mat::Zero(d, d);
  for (const auto& e : toeplitz_exp({-H, -T * Xt}, M_max)) r.lhs += e;

  // States (letters n, blocks b) with b <= n <= 2b, ordered by b.
  std::map<std::pair<int, int>, int> id;
  for (int b = 0; b <= M_max; ++b)
    for (int n = b; n <= 2 * b; ++n) id[{b, n}] = static_cast<int>(id.size());
  std::vector<Transition> tr;
  for (const auto& [k, v] : id) {
    const auto [b, n] = k;
    if (b == M_max) continue;
    tr.push_back({v, id.at({b + 1, n + 1}), -T * F1});
    tr.push_back({v, id.at({b + 1, n + 2}), -T * F2});
  }
  const Mat R = augmented_exp(H, static_cast<int>(id.size()), tr);
  r.rhs = Mat::Zero(d, d);
  for (const auto& kv : id) r.rhs += R.block(0, kv.second * d, d, d);

  r.rhs_unfiltered = Mat::Zero(d, d);
  for (const auto& e : toeplitz_exp({-H, -T * F1, -T * F2}, 2 * M_max)) r.rhs_unfiltered += e;

  const double scale = std::max(1e-300, r.lhs.norm());
  r.residual = (r.lhs - r.rhs).norm() / scale;
  r.unfiltered_residual = (r.lhs - r.rhs_unfiltered).norm() / scale;
  return r;
}

CrossingReport eigenvalue_crossings(const Mat& Q0, const Mat& Q1, int grid) {
  if (grid < 1) throw Error("eigenvalue_crossings: grid must be positive");
  const double tol = 1e-9 * std::max(1.0, std::max(Q0.norm(), Q1.norm()));
  if (max_abs(Q0 - Q0.adjoint()) > tol || max_abs(Q1 - Q1.adjoint()) > tol)
    throw Error("eigenvalue_crossings: path is not Hermitian");
  auto negatives = [](const Mat& Q) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(Q), Eigen::EigenvaluesOnly);
    return static_cast<int>((es.eigenvalues().array() < 0.0).count());
  };
  CrossingReport r;
  r.grid = grid;
  int prev = negatives(Q0);
  for (int k = 1; k <= grid; ++k) {
    const double s = static_cast<double>(k) / grid;
    const int cur = negatives((1 - s) * Q0 + s * Q1);
    if (cur < prev) r.up += prev - cur;
    if (cur > prev) r.down += cur - prev;
    prev = cur;
  }
  return r;
}

double pairing_tail_bound(const TwistedFamily& tf, int N_max) {
  const Curvature& F = *tf.F;
  const Vec& w = tf.v_omega;
  const Vec& sw = tf.v_sigma_omega;
  const Vec& sw2 = tf.v_sigma_omega2;
  const double a = op_norm(F.F1(w)) + 0.25 * op_norm(F.F1(sw2));
  const double b = op_norm(F.F2(w, w)) +
                   4.0 / 27.0 * (op_norm(F.F2(w, sw2)) + op_norm(F.F2(sw2, w))) +
                   op_norm(F.F2(sw2, sw2)) / 16.0;
  const double beta = op_norm(F.F1(sw));
  const double beta2 = op_norm(F.F2(w, sw)) + op_norm(F.F2(sw, w)) +
                       0.25 * (op_norm(F.F2(sw2, sw)) + op_norm(F.F2(sw, sw2)));
  const double heat = heat_trace(F.F0());
  const double pref = std::ldexp(heat, -tf.doubled->cm.q);
  // [z^k] exp(a z + b z^2): (k+1) e_{k+1} = a e_k + 2 b e_{k-1}
  const int L = std::max(N_max + 200, 400);
  std::vector<double> e(L + 1, 0.0);
  e[0] = 1.0;
  for (int k = 0; k < L; ++k) e[k + 1] = (a * e[k] + (k >= 1 ? 2 * b * e[k - 1] : 0.0)) / (k + 1);
  double tail = 0;
  for (int N = N_max + 1; N <= L; ++N) tail += beta * e[N - 1] + (N >= 2 ? beta2 * e[N - 2] : 0.0);
  // Cauchy estimate at radius 2 for the remainder beyond L.
  const double r = 2.0;
  tail += (beta * r + beta2 * r * r) * std::exp(a * r + b * r * r - L * std::log(r)) / (r - 1.0);
  return pref * tail;
}

namespace {

struct NodeTerms {
  std::vector<cplx> pair, sf;
  double ab = 0, ba = 0, bfact = 0, x = 0;
};

std::vector<NodeTerms> pairing_nodes(const TwistedFamily& tf, const CqModule& D, const Curvature& F,
                                     const Vec& vA_w, const Vec& vA_sw2, const Vec& vB,
                                     const Quadrature& q, int N_max, int threads, bool facts) {
  const int d = D.dim();
  const Mat H = hermitize(F.F0());
  const Mat ct = D.c_of(vA_w);
  std::vector<NodeTerms> out(q.nodes.size());
  parallel_for(static_cast<int>(q.nodes.size()), threads, [&](int j) {
    const double s = q.nodes[j];
    const Vec a = s * vA_w + (s * s - s) * vA_sw2;
    const Mat F1A = F.F1(a), F2AA = F.F2(a, a), F1B = F.F1(vB);
    const Mat F2AB = F.F2(a, vB), F2BA = F.F2(vB, a);
    // Levels n carry a flag for whether the B letter has been used; blocks
    // are 2d x 2d with the flag as the inner index.
    const Mat Z = Mat::Zero(d, d);
    auto blk = [&](const Mat& same, const Mat& flip) {
      Mat b = Mat::Zero(2 * d, 2 * d);
      b.topLeftCorner(d, d) = same;
      b.bottomRightCorner(d, d) = same;
      b.topRightCorner(d, d) = flip;
      return b;
    };
    const std::vector<Mat> gen{blk(-H, Z), blk(-F1A, -F1B), blk(-F2AA, -(F2AB + F2BA))};
    const std::vector<Mat> E = toeplitz_exp(gen, N_max);
    NodeTerms& t = out[j];
    for (int N = 1; N <= N_max; ++N) {
      t.pair.push_back(cstr(D.cm, E[N].topRightCorner(d, d)));
      t.sf.push_back(cstr(D.cm, ct * E[N - 1].topLeftCorner(d, d)));
    }
    if (facts) {
      t.ab = max_abs(F2AB);
      t.ba = max_abs(F2BA);
      t.bfact = max_abs(F1B - ct);
      t.x = max_abs(F1A + F2AA - tf.X_doubled(s));
    }
  });
  return out;
}

}  // namespace

PairingReport pairing(const OddModule& M, const MatrixElement& g, int N_max, int s_nodes,
                      double tail_tol, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  if (N_max < 1) throw Error("pairing: N_max must be at least 1");
  const TwistedFamily tf = twisted_family(M, g);
  PairingReport rep;
  rep.fixture = M.name;
  rep.m = tf.m;
  rep.N_used = N_max;
  rep.s_nodes = std::max(s_nodes, std::max(32, 2 * N_max + 2));
  rep.tail_bound = pairing_tail_bound(tf, N_max);
  if (!(rep.tail_bound <= tail_tol)) {
    int k = N_max;
    while (k < 200 && !(pairing_tail_bound(tf, k) <= tail_tol)) ++k;
    throw Error("pairing: certified tail " + std::to_string(rep.tail_bound) +
                " exceeds tolerance at N_max = " + std::to_string(N_max) + "; suggested N_max = " +
                std::to_string(k));
  }
  const Quadrature q = gauss_legendre(rep.s_nodes);
  const auto nodes = pairing_nodes(tf, *tf.doubled, *tf.F, tf.v_omega, tf.v_sigma_omega2,
                                   tf.v_sigma_omega, q, N_max, threads, true);
  rep.terms.resize(N_max);
  for (int N = 1; N <= N_max; ++N) rep.terms[N - 1].N = N;
  for (size_t j = 0; j < nodes.size(); ++j) {
    const auto& t = nodes[j];
    for (int N = 1; N <= N_max; ++N) {
      rep.terms[N - 1].pairing_term += q.weights[j] * t.pair[N - 1];
      rep.terms[N - 1].sf_term += q.weights[j] * t.sf[N - 1];
    }
    rep.curvature_AB = std::max(rep.curvature_AB, t.ab);
    rep.curvature_BA = std::max(rep.curvature_BA, t.ba);
    rep.curvature_B = std::max(rep.curvature_B, t.bfact);
    rep.curvature_X = std::max(rep.curvature_X, t.x);
  }
  for (auto& t : rep.terms) {
    t.residual = std::abs(t.pairing_term - kPairingSign * t.sf_term);
    t.plus_sign_residual = std::abs(t.pairing_term - t.sf_term);
    rep.term_residual_max = std::max(rep.term_residual_max, t.residual);
    rep.pairing_total += t.pairing_term;
    rep.sf_terms_total += t.sf_term;
  }
  rep.sf = sf_integral(tf, rep.s_nodes);
  rep.sf_residual = std::abs(rep.pairing_total - kPairingSign * rep.sf.direct);
  rep.sf_plus_sign_residual = std::abs(rep.pairing_total - rep.sf.direct);
  {
    const double s = rep.pointwise_s;
    const Quadrature one{{s}, {1.0}};
    const auto pt = pairing_nodes(tf, *tf.doubled, *tf.F, tf.v_omega, tf.v_sigma_omega2,
                                  tf.v_sigma_omega, one, N_max, 1, false);
    const Mat Qs = tf.Q(s);
    rep.pointwise_direct = (tf.c_omega * expm(-(Qs * Qs))).trace();
    for (int N = 1; N <= N_max; ++N) {
      rep.pointwise_sf_sum += pt[0].sf[N - 1];
      rep.pointwise_pairing_sum += pt[0].pair[N - 1];
    }
    rep.pointwise_residual = std::max(std::abs(rep.pointwise_sf_sum - rep.pointwise_direct),
                                      std::abs(rep.pointwise_pairing_sum -
                                               kPairingSign * rep.pointwise_direct));
  }
  rep.getzler_normalized = rep.sf.direct.real() / std::sqrt(M_PI);

  // Same pairing through the lift of the double, conjugated by the reshuffle.
  const CqModule D2 = cq_mat_lift(double_odd(acyclic_extend_odd(M, tf.ext)), tf.m, tf.lifted);
  const Mat P = reshuffle_unitary(M.dim(), tf.m);
  double mr = max_abs(P * tf.doubled->Q * P.adjoint() - D2.Q);
  for (size_t i = 0; i < D2.c.size(); ++i)
    mr = std::max(mr, max_abs(P * tf.doubled->c[i] * P.adjoint() - D2.c[i]));
  mr = std::max(mr, max_abs(P * tf.doubled->cm.e[0] * P.adjoint() - D2.cm.e[0]));
  mr = std::max(mr, max_abs(P * tf.doubled->cm.H.gamma() * P.adjoint() - D2.cm.H.gamma()));
  rep.module_reshuffle_residual = mr;
  const Curvature F2(D2);
  const auto nodes2 = pairing_nodes(tf, D2, F2, tf.v_omega, tf.v_sigma_omega2, tf.v_sigma_omega, q,
                                    N_max, threads, false);
  for (int N = 1; N <= N_max; ++N) {
    cplx p2 = 0;
    for (size_t j = 0; j < nodes2.size(); ++j) p2 += q.weights[j] * nodes2[j].pair[N - 1];
    rep.reshuffle_residual = std::max(rep.reshuffle_residual, std::abs(p2 - rep.terms[N - 1].pairing_term));
  }

  const Mat I = Mat::Identity(tf.c_g.rows(), tf.c_g.cols());
  if (max_abs(tf.c_g.adjoint() * tf.c_g - I) < 1e-10) {
    rep.crossing_sf = eigenvalue_crossings(tf.Qm, hermitize(tf.Q(1.0))).spectral_flow();
    rep.crossing_available = true;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace chernlab
