// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#include "chernlab/fredholm.hpp"

#include <cmath>

namespace chernlab {

namespace {

Mat lin_comb(const std::vector<Mat>& ops, const Vec& theta, int dim) {
  Mat r = Mat::Zero(dim, dim);
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    if (theta(i) != cplx(0.0)) r += theta(i) * ops[i];
  return r;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

void check_shapes(const DgAlgebra& A, const std::vector<Mat>& c, const Mat& Q, int dim,
                  const char* who) {
  if (static_cast<int>(c.size()) != A.dim())
    throw Error(std::string(who) + ": need one operator per algebra basis element");
  if (Q.rows() != dim || Q.cols() != dim) throw Error(std::string(who) + ": Q has wrong shape");
  for (const auto& x : c)
    if (x.rows() != dim || x.cols() != dim)
      throw Error(std::string(who) + ": representation matrix has wrong shape");
}

std::vector<int> bar_signs(const DgAlgebra& A, const Word& w) {
  std::vector<int> n(w.size() + 1, 0);
  for (int k = 1; k <= w.size(); ++k) n[k] = n[k - 1] + A.degree(w[k - 1]) - 1;
  return n;
}

cplx graded_trace(const Mat& X, const Mat& Phi, const std::vector<int>& parity) {
  cplx s = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    s += static_cast<double>(parity[i]) * X.row(i).transpose().cwiseProduct(Phi.col(i)).sum();
  return s;
}

}  // namespace

Mat CqModule::c_of(const Vec& theta) const { return lin_comb(c, theta, dim()); }
Mat OddModule::c_of(const Vec& theta) const { return lin_comb(c, theta, dim()); }

double multiplicativity_residual(const AlgebraPtr& alg, const std::vector<Mat>& c, const Mat& Q) {
  const DgAlgebra& A = *alg;
  const int d = static_cast<int>(Q.rows());
  double r = 0;
  for (int f : A.basis_of_degree(0)) {
    if (A.is_extension() && f >= A.base_dim()) continue;
    const Mat cf = c[f];
    r = std::max(r, max_abs(Q * cf - cf * Q - lin_comb(c, A.d(A.basis(f)), d)));
    for (int t = 0; t < A.dim(); ++t) {
      r = std::max(r, max_abs(lin_comb(c, A.multiply(A.basis(f), A.basis(t)), d) - cf * c[t]));
      r = std::max(r, max_abs(lin_comb(c, A.multiply(A.basis(t), A.basis(f)), d) - c[t] * cf));
    }
  }
  return r;
}

ValidationReport module_validate(const CqModule& M, double tol) {
  const DgAlgebra& A = *M.alg;
  const int d = M.dim();
  check_shapes(A, M.c, M.Q, d, "module_validate");
  ValidationReport rep = clifford_validate(M.cm, tol);
  rep.add("unit", max_abs(M.c[A.unit()] - Mat::Identity(d, d)), tol);
  double grading = 0, equiv = 0;
  for (int i = 0; i < A.dim(); ++i) {
    const Mat wrong = parity_of(A.degree(i)) ? M.cm.H.even_part(M.c[i]) : M.cm.H.odd_part(M.c[i]);
    grading = std::max(grading, max_abs(wrong));
    equiv = std::max(equiv, equivariance_residual(M.cm, M.c[i]));
  }
  rep.add("grading-preserving c", grading, tol);
  rep.add("Clifford supercommutation of c", equiv, tol);
  rep.add("Q odd", max_abs(M.cm.H.even_part(M.Q)), tol);
  rep.add("Q Hermitian", max_abs(M.Q - M.Q.adjoint()), tol);
  rep.add("Clifford supercommutation of Q", equivariance_residual(M.cm, M.Q), tol);
  if (!M.weak) rep.add("multiplicativity", multiplicativity_residual(M.alg, M.c, M.Q), tol);
  return rep;
}

ValidationReport odd_module_validate(const OddModule& M, double tol) {
  const DgAlgebra& A = *M.alg;
  const int d = M.dim();
  check_shapes(A, M.c, M.Q, d, "odd_module_validate");
  ValidationReport rep;
  rep.add("unit", max_abs(M.c[A.unit()] - Mat::Identity(d, d)), tol);
  rep.add("Q Hermitian", max_abs(M.Q - M.Q.adjoint()), tol);
  if (!M.weak) rep.add("multiplicativity", multiplicativity_residual(M.alg, M.c, M.Q), tol);
  return rep;
}

CqModule acyclic_extend_module(const CqModule& M, AlgebraPtr ext) {
  if (!ext) ext = acyclic_extension(*M.alg);
  if (!ext->is_extension() || ext->base_dim() != M.alg->dim())
    throw Error("acyclic_extend_module: extension does not match the module algebra");
  CqModule r = M;
  r.alg = ext;
  r.weak = true;
  r.name = M.name + "_T";
  const int d = M.dim();
  for (int i = 0; i < M.alg->dim(); ++i) r.c.push_back(Mat::Zero(d, d));
  return r;
}

OddModule acyclic_extend_odd(const OddModule& M, AlgebraPtr ext) {
  if (!ext) ext = acyclic_extension(*M.alg);
  if (!ext->is_extension() || ext->base_dim() != M.alg->dim())
    throw Error("acyclic_extend_odd: extension does not match the module algebra");
  OddModule r = M;
  r.alg = ext;
  r.weak = true;
  r.name = M.name + "_T";
  for (int i = 0; i < M.alg->dim(); ++i) r.c.push_back(Mat::Zero(M.dim(), M.dim()));
  return r;
}

CqModule double_odd(const OddModule& M) {
  const int d = M.dim();
  CqModule r;
  r.alg = M.alg;
  r.weak = M.weak;
  r.name = M.name + "~";
  r.cm.q = 1;
  r.cm.H.parity.assign(d, 1);
  r.cm.H.parity.resize(2 * d, -1);
  const Mat I = Mat::Identity(d, d);
  Mat g = Mat::Zero(2 * d, 2 * d);
  g.block(0, d, d, d) = I;
  g.block(d, 0, d, d) = -I;
  r.cm.e = {g};
  for (int i = 0; i < M.alg->dim(); ++i) {
    Mat x = Mat::Zero(2 * d, 2 * d);
    if (parity_of(M.alg->degree(i)) == 0) {
      x.block(0, 0, d, d) = M.c[i];
      x.block(d, d, d, d) = M.c[i];
    } else {
      x.block(0, d, d, d) = M.c[i];
      x.block(d, 0, d, d) = M.c[i];
    }
    r.c.push_back(x);
  }
  r.Q = Mat::Zero(2 * d, 2 * d);
  r.Q.block(0, d, d, d) = M.Q;
  r.Q.block(d, 0, d, d) = M.Q;
  return r;
}

namespace {

template <class Module>
void lift_common(const Module& M, int m, const DgAlgebra& L, Module& r) {
  const DgAlgebra& A = *M.alg;
  const int n = A.dim();
  if (L.dim() != m * m * n) throw Error("mat lift: lifted algebra has the wrong dimension");
  const int d = M.dim();
  r.c.assign(L.dim(), Mat());
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Mat E = Mat::Zero(m, m);
      E(a, b) = 1.0;
      for (int i = 0; i < n; ++i) r.c[(a * m + b) * n + i] = kron(E, M.c[i]);
    }
  r.c[A.unit()] = Mat::Identity(m * d, m * d);
  r.Q = kron(Mat::Identity(m, m), M.Q);
}

}  // namespace

OddModule odd_mat_lift(const OddModule& M, int m, AlgebraPtr lifted) {
  if (m < 1) throw Error("odd_mat_lift: m must be positive");
  if (!lifted) lifted = mat_lift(*M.alg, m);
  OddModule r = M;
  r.alg = lifted;
  r.name = M.name + "^(" + std::to_string(m) + ")";
  lift_common(M, m, *lifted, r);
  return r;
}

CqModule cq_mat_lift(const CqModule& M, int m, AlgebraPtr lifted) {
  if (m < 1) throw Error("cq_mat_lift: m must be positive");
  if (!lifted) lifted = mat_lift(*M.alg, m);
  CqModule r = M;
  r.alg = lifted;
  r.name = M.name + "^(" + std::to_string(m) + ")";
  lift_common(M, m, *lifted, r);
  r.cm.H.parity.clear();
  for (int a = 0; a < m; ++a)
    r.cm.H.parity.insert(r.cm.H.parity.end(), M.cm.H.parity.begin(), M.cm.H.parity.end());
  for (auto& e : r.cm.e) e = kron(Mat::Identity(m, m), e);
  return r;
}

Mat reshuffle_unitary(int hdim, int m) {
  const int D = 2 * m * hdim;
  Mat P = Mat::Zero(D, D);
  for (int l = 0; l < 2; ++l)
    for (int a = 0; a < m; ++a)
      for (int h = 0; h < hdim; ++h) P(a * 2 * hdim + l * hdim + h, l * m * hdim + a * hdim + h) = 1;
  return P;
}

CqModule conjugate_module(const CqModule& M, const Mat& U) {
  CqModule r = M;
  for (auto& x : r.c) x = U * x * U.adjoint();
  r.Q = U * M.Q * U.adjoint();
  return r;
}

Curvature::Curvature(const CqModule& M) : M_(&M) {
  const DgAlgebra& A = *M.alg;
  const int d = M.dim();
  F0_ = M.Q * M.Q;
  for (int i = 0; i < A.dim(); ++i) {
    const Mat& c = M.c[i];
    Mat f = M.Q * c - sign_of(A.degree(i)) * c * M.Q - lin_comb(M.c, A.d(A.basis(i)), d);
    F1_.push_back(f);
  }
}

const Mat& Curvature::F2(int i, int j) const {
  const long key = static_cast<long>(i) * M_->alg->dim() + j;
  auto it = F2_.find(key);
  if (it != F2_.end()) return it->second;
  const DgAlgebra& A = *M_->alg;
  Mat f = sign_of(A.degree(i)) *
          (lin_comb(M_->c, A.multiply(A.basis(i), A.basis(j)), M_->dim()) - M_->c[i] * M_->c[j]);
  return F2_.emplace(key, std::move(f)).first->second;
}

Mat Curvature::F1(const Vec& theta) const { return lin_comb(F1_, theta, M_->dim()); }

Mat Curvature::F2(const Vec& a, const Vec& b) const {
  const DgAlgebra& A = *M_->alg;
  Vec ae = A.zero(), ao = A.zero();
  for (int i = 0; i < A.dim(); ++i) (parity_of(A.degree(i)) ? ao : ae)(i) = a(i);
  const Mat cb = M_->c_of(b);
  Mat even = M_->c_of(A.multiply(ae, b)) - M_->c_of(ae) * cb;
  Mat odd = M_->c_of(A.multiply(ao, b)) - M_->c_of(ao) * cb;
  return even - odd;
}

ChernEngine::ChernEngine(const CqModule& M, double T) : M_(M), F_(M_), T_(T) {
  if (T <= 0) throw Error("ChernEngine: T must be positive");
  H_ = T * F_.F0();
  H_ = 0.5 * (H_ + H_.adjoint());
  const Mat vol = M_.cm.volume();
  for (const auto& c : M_.c) gc_.push_back(vol * c);
}

const Mat& ChernEngine::phi(const Word& w) {
  auto it = cache_.find(w);
  if (it != cache_.end()) return it->second;
  const int N = w.size();
  if (N > kBracketMax)
    throw Error("quantize: word length " + std::to_string(N) + " exceeds the bracket maximum " +
                std::to_string(kBracketMax));
  const int d = M_.dim();
  std::vector<Transition> tr;
  for (int i = 0; i < N; ++i) {
    tr.push_back({i, i + 1, -T_ * F_.F1(w[i])});
    if (i + 1 < N) tr.push_back({i, i + 2, -T_ * F_.F2(w[i], w[i + 1])});
  }
  const Mat E = augmented_exp(H_, N + 1, tr);
  for (int i = 0; i <= N; ++i)
    for (int j = i; j <= N; ++j) {
      Word sub(w.data() + i, j - i);
      if (!cache_.count(sub)) cache_.emplace(sub, E.block(i * d, j * d, d, d));
    }
  return cache_.at(w);
}

Mat ChernEngine::phi(const Chain& c) {
  if (c.kind() != ChainKind::bar) throw Error("phi: expected a bar chain");
  Mat r = Mat::Zero(M_.dim(), M_.dim());
  for (const auto& t : c.terms()) r += t.coeff * phi(t.word);
  return r;
}

cplx ChernEngine::chern(const Word& w) {
  if (w.size() < 1) throw Error("chern: empty cyclic word");
  const Mat& P = phi(Word(w.data() + 1, w.size() - 1));
  return std::ldexp(1.0, -M_.cm.q) * graded_trace(gc_[w[0]], P, M_.cm.H.parity);
}

cplx ChernEngine::chern(const Chain& c) {
  if (c.kind() != ChainKind::cyclic) throw Error("chern: expected a cyclic chain");
  cplx s = 0;
  for (const auto& t : c.terms()) s += t.coeff * chern(t.word);
  return s;
}

double ChernEngine::scale(const Chain& c) {
  double s = 0;
  for (const auto& t : c.terms()) {
    const Word& w = t.word;
    const Mat& P = phi(Word(w.data() + 1, w.size() - 1));
    s += std::abs(t.coeff) * M_.c[w[0]].norm() * P.norm();
  }
  return std::ldexp(s, -M_.cm.q);
}

Mat quantize_enumerated(const CqModule& M, double T, const Word& w, bool prune) {
  Curvature F(M);
  const int N = w.size();
  const int d = M.dim();
  const Mat H = T * F.F0();
  Mat total = Mat::Zero(d, d);
  std::vector<int> blocks;
  std::function<void(int)> rec = [&](int pos) {
    if (pos == N) {
      std::vector<Mat> ins;
      int at = 0;
      for (int b : blocks) {
        if (b == 1) ins.push_back(F.F1(w[at]));
        else if (b == 2) ins.push_back(F.F2(w[at], w[at + 1]));
        else ins.push_back(Mat::Zero(d, d));
        at += b;
      }
      const int Mb = static_cast<int>(blocks.size());
      total += std::pow(-T, Mb) * heat_bracket(H, ins);
      return;
    }
    const int maxb = prune ? 2 : N - pos;
    for (int b = 1; b <= maxb && pos + b <= N; ++b) {
      blocks.push_back(b);
      rec(pos + b);
      blocks.pop_back();
    }
  };
  rec(0);
  return total;
}

CalibratedSeminorm calibrate_seminorm(const CqModule& M) {
  Curvature F(M);
  CalibratedSeminorm s;
  const int n = M.alg->dim();
  for (int i = 0; i < n; ++i) {
    s.a = std::max(s.a, op_norm(F.F1(i)));
    for (int j = 0; j < n; ++j) s.b = std::max(s.b, op_norm(F.F2(i, j)));
  }
  s.constant = 4.0 * std::max(s.a, std::sqrt(s.b));
  return s;
}

double fundamental_bound(const CqModule& M, const CalibratedSeminorm& nu, double T, const Word& w) {
  Eigen::SelfAdjointEigenSolver<Mat> es(M.Q * M.Q, Eigen::EigenvaluesOnly);
  const double tr = (-0.5 * T * es.eigenvalues().array()).exp().sum();
  const int N = w.size();
  double b = std::exp(0.5 * T) * tr * std::pow(T, 0.5 * N) / factorial(N / 2);
  for (int i = 0; i < N; ++i) b *= nu.constant;
  return b;
}

cplx chern_via_alpha(ChernEngine& E, const Word& w) {
  Chain c(E.module().alg, ChainKind::cyclic);
  c.add(w, 1.0);
  const Chain a = alpha_map(c);
  cplx s = 0;
  for (const auto& t : a.terms()) s += t.coeff * cstr(E.module().cm, E.phi(t.word));
  return -s;
}

CoclosedResult coclosed_residual(ChernEngine& E, const Word& w) {
  Chain c(E.module().alg, ChainKind::cyclic);
  c.add(w, 1.0);
  Chain x = d_total(c);
  CoclosedResult r;
  r.value = sign_of(E.module().cm.q) * E.chern(x);
  r.scale = E.scale(x);
  return r;
}

Word random_cyclic_word(const DgAlgebra& A, Rng& rng, int N) {
  Word w;
  w.letters.push_back(static_cast<char>(rng.integer(0, A.dim() - 1)));
  for (int i = 0; i < N; ++i) {
    int x;
    do x = rng.integer(0, A.dim() - 1);
    while (x == A.unit());
    w.letters.push_back(static_cast<char>(x));
  }
  return w;
}

Word random_bar_word(const DgAlgebra& A, Rng& rng, int N) {
  Word w;
  for (int i = 0; i < N; ++i) {
    int x;
    do x = rng.integer(0, A.dim() - 1);
    while (x == A.unit());
    w.letters.push_back(static_cast<char>(x));
  }
  return w;
}

double ChenVanishReport::worst_relative() const {
  double r = 0;
  for (const auto& f : families) r = std::max(r, f.max_value / std::max(1.0, f.max_scale));
  return r;
}

ChenVanishReport chen_vanish(const CqModule& M, int words_per_family, int max_N, Rng& rng) {
  if (M.weak)
    throw Error("chen_vanish: module is weak; Chen vanishing needs the multiplicativity axioms");
  const CqModule MT = acyclic_extend_module(M);
  const DgAlgebra& AT = *MT.alg;
  ChernEngine E(MT);
  const int want = parity_of(M.cm.q);
  const std::vector<int> fns = M.alg->basis_of_degree(0);
  auto random_f = [&]() {
    Vec f = AT.zero();
    for (int i : fns) f(i) = rng.cnormal();
    return f;
  };
  const char* names[] = {"S+1", "R", "S_i", "T_i"};
  ChenVanishReport rep;
  for (int fam = 0; fam < 4; ++fam) {
    FamilyResult fr;
    fr.family = names[fam];
    int tries = 0;
    while (fr.words < words_per_family && tries < 200 * words_per_family) {
      ++tries;
      const int N = rng.integer(0, max_N);
      Chain c(MT.alg, ChainKind::cyclic);
      c.add(random_cyclic_word(AT, rng, N), 1.0);
      Chain img;
      switch (fam) {
        case 0: img = chen_S_plus_one(c); break;
        case 1: img = chen_R(c); break;
        case 2: img = chen_Si(random_f(), rng.integer(0, N), c); break;
        default: img = chen_Ti(random_f(), rng.integer(0, N), c); break;
      }
      auto par = img.parity();
      // Images of the wrong parity vanish for trivial reasons; skip them.
      if (img.empty() || !par || *par != want) continue;
      ++fr.words;
      fr.max_value = std::max(fr.max_value, std::abs(E.chern(img)));
      fr.max_scale = std::max(fr.max_scale, E.scale(img));
    }
    rep.families.push_back(fr);
  }
  return rep;
}

Homotopy linear_homotopy(const CqModule& M, const Mat& V) {
  Homotopy h;
  h.module = [M, V](double s) {
    CqModule r = M;
    r.Q = M.Q + s * V;
    return r;
  };
  h.dQ = [V](double) { return V; };
  h.dc = [](double) { return std::vector<Mat>{}; };
  return h;
}

Homotopy extend_homotopy(const Homotopy& h, AlgebraPtr ext) {
  Homotopy r;
  r.module = [h, ext](double s) { return acyclic_extend_module(h.module(s), ext); };
  r.dQ = h.dQ;
  r.dc = [h, ext](double s) {
    std::vector<Mat> dc = h.dc(s);
    if (dc.empty()) return dc;
    const int d = static_cast<int>(dc[0].rows());
    const size_t n = dc.size();
    for (size_t i = 0; i < n; ++i) dc.push_back(Mat::Zero(d, d));
    return dc;
  };
  return r;
}

Mat psi_cochain(const Homotopy& h, double s, double T, const Word& w) {
  if (!h.module || !h.dQ || !h.dc) throw Error("psi_cochain: homotopy lacks derivative data");
  const CqModule Ms = h.module(s);
  const DgAlgebra& A = *Ms.alg;
  Curvature F(Ms);
  const Mat dQ = h.dQ(s);
  const std::vector<Mat> dc = h.dc(s);
  const int N = w.size();
  if (2 * (N + 1) > 2 * (kBracketMax + 1)) throw Error("psi_cochain: word too long");
  const int d = Ms.dim();
  const std::vector<int> n = bar_signs(A, w);
  auto st = [N](int layer, int i) { return layer * (N + 1) + i; };
  std::vector<Transition> tr;
  for (int layer = 0; layer < 2; ++layer)
    for (int i = 0; i < N; ++i) {
      tr.push_back({st(layer, i), st(layer, i + 1), -T * F.F1(w[i])});
      if (i + 1 < N) tr.push_back({st(layer, i), st(layer, i + 2), -T * F.F2(w[i], w[i + 1])});
    }
  for (int i = 0; i <= N; ++i) {
    const double sg = sign_of(n[i]);
    tr.push_back({st(0, i), st(1, i), -T * sg * dQ});
    if (i < N && !dc.empty()) tr.push_back({st(0, i), st(1, i + 1), -T * sg * dc[w[i]]});
  }
  Mat H = T * F.F0();
  H = 0.5 * (H + H.adjoint());
  const Mat E = augmented_exp(H, 2 * (N + 1), tr);
  return E.block(0, st(1, N) * d, d, d);
}

BianchiResult bianchi_check(const Homotopy& h, double s, const Word& w, double step) {
  const CqModule M0 = h.module(s);
  const AlgebraPtr alg = M0.alg;
  const int d = M0.dim();
  ChernEngine Ep(h.module(s + step)), Em(h.module(s - step));
  const Mat lhs = (Ep.phi(w) - Em.phi(w)) / (2.0 * step);

  BarCochain psi(d, 1, [&h, s](const Word& x) { return psi_cochain(h, s, 1.0, x); });
  BarCochain omega(d, 1, [M0, d](const Word& x) {
    if (x.size() == 0) return M0.Q;
    if (x.size() == 1) return Mat(M0.c[x[0]]);
    return Mat(Mat::Zero(d, d));
  });
  const BarCochain dpsi = bar_delta(alg, psi, false);
  const Mat rhs = dpsi(w) + bar_cochain_product(alg, omega, psi)(w) +
                  bar_cochain_product(alg, psi, omega)(w);
  BianchiResult r;
  r.scale = std::max(1.0, std::max(lhs.norm(), rhs.norm()));
  r.residual = (lhs - rhs).norm() / r.scale;
  return r;
}

cplx chern_simons(const Homotopy& hT, const Word& w, int s_nodes) {
  const CqModule M0 = hT.module(0.0);
  Chain c(M0.alg, ChainKind::cyclic);
  c.add(w, 1.0);
  const Chain a = alpha_map(c);
  const Quadrature qd = gauss_legendre(s_nodes);
  cplx total = 0;
  for (int k = 0; k < s_nodes; ++k) {
    const CliffordModule& cm = M0.cm;
    cplx v = 0;
    for (const auto& t : a.terms()) v += t.coeff * cstr(cm, psi_cochain(hT, qd.nodes[k], 1.0, t.word));
    total += qd.weights[k] * v;
  }
  return sign_of(M0.cm.q) * total;
}

TransgressionResult transgression_check(const Homotopy& hT, const std::vector<Word>& words,
                                        int s_nodes) {
  const CqModule M0 = hT.module(0.0), M1 = hT.module(1.0);
  if (!M0.alg->is_extension()) throw Error("transgression_check: needs a homotopy over Omega_T");
  ChernEngine E0(M0), E1(M1);
  const int q = M0.cm.q;
  TransgressionResult r;
  r.cs_parity = parity_of(q + 1);
  const Quadrature qd = gauss_legendre(s_nodes);
  std::vector<std::unordered_map<Word, cplx, WordHash>> memo(s_nodes);
  for (const auto& w : words) {
    Chain c(M0.alg, ChainKind::cyclic);
    c.add(w, 1.0);
    const cplx lhs = E1.chern(c) - E0.chern(c);
    const Chain a = alpha_map(d_total(c));
    cplx cs = 0;
    for (int k = 0; k < s_nodes; ++k) {
      cplx v = 0;
      for (const auto& t : a.terms()) {
        auto it = memo[k].find(t.word);
        if (it == memo[k].end())
          it = memo[k].emplace(t.word, cstr(M0.cm, psi_cochain(hT, qd.nodes[k], 1.0, t.word))).first;
        v += t.coeff * it->second;
      }
      cs += qd.weights[k] * v;
    }
    // (D^dual CS)(w) = (-1)^{|CS|} CS(D w)
    const cplx rhs = sign_of(r.cs_parity) * sign_of(q) * cs;
    const double scale = std::max(1.0, std::max(E0.scale(c), E1.scale(c)));
    r.residuals.push_back(std::abs(lhs - rhs) / scale);
    r.max_residual = std::max(r.max_residual, r.residuals.back());
  }
  return r;
}

cplx getzler_closed_form(const OddModule& M, const Word& w) {
  const DgAlgebra& A = *M.alg;
  for (int i = 0; i < A.dim(); ++i) {
    if (A.degree(i) != 0) throw Error("getzler_closed_form: algebra must be trivially graded");
    if (!A.diff(i).empty()) throw Error("getzler_closed_form: differential must vanish");
  }
  if (multiplicativity_residual(M.alg, M.c, Mat::Zero(M.dim(), M.dim())) > 1e-10)
    throw Error("getzler_closed_form: c must be an algebra representation");
  const int N = w.size() - 1;
  if (N < 0) throw Error("getzler_closed_form: empty word");
  if (N % 2 == 0) return 0.0;
  std::vector<Mat> ins;
  for (int i = 1; i <= N; ++i) ins.push_back(M.Q * M.c[w[i]] - M.c[w[i]] * M.Q);
  Mat H = M.Q * M.Q;
  H = 0.5 * (H + H.adjoint());
  return sign_of(N) * (M.c[w[0]] * heat_bracket(H, ins)).trace();
}

}  // namespace chernlab
