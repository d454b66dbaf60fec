// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chernlab/algebra.hpp"
#include "chernlab/clifford.hpp"
#include "chernlab/complexes.hpp"

namespace chernlab {

// C_q-Fredholm module over a finite-dimensional dg algebra. c holds one
// operator per algebra basis element.
struct CqModule {
  AlgebraPtr alg;
  CliffordModule cm;
  std::vector<Mat> c;
  Mat Q;
  bool weak = true;
  std::string name;

  int dim() const { return cm.dim(); }
  Mat c_of(const Vec& theta) const;
};

// Odd module: ungraded Hilbert space.
struct OddModule {
  AlgebraPtr alg;
  std::vector<Mat> c;
  Mat Q;
  bool weak = true;
  std::string name;

  int dim() const { return static_cast<int>(Q.rows()); }
  Mat c_of(const Vec& theta) const;
};

ValidationReport module_validate(const CqModule& M, double tol = 1e-12);
ValidationReport odd_module_validate(const OddModule& M, double tol = 1e-12);
// Largest violation of [Q,c(f)] = c(df), c(f theta) = c(f)c(theta),
// c(theta f) = c(theta)c(f) over basis f of degree 0 and all basis theta.
double multiplicativity_residual(const AlgebraPtr& alg, const std::vector<Mat>& c, const Mat& Q);

// c_T(theta' + sigma theta'') = c(theta'); pass ext to reuse an existing
// extension object.
CqModule acyclic_extend_module(const CqModule& M, AlgebraPtr ext = nullptr);
OddModule acyclic_extend_odd(const OddModule& M, AlgebraPtr ext = nullptr);
CqModule double_odd(const OddModule& M);
// Modules over Mat_m(alg) (basis as in mat_lift).
OddModule odd_mat_lift(const OddModule& M, int m, AlgebraPtr lifted = nullptr);
CqModule cq_mat_lift(const CqModule& M, int m, AlgebraPtr lifted = nullptr);
// Permutation from the double of the lift to the lift of the double.
Mat reshuffle_unitary(int hdim, int m);
CqModule conjugate_module(const CqModule& M, const Mat& U);

class Curvature {
 public:
  explicit Curvature(const CqModule& M);
  const Mat& F0() const { return F0_; }
  const Mat& F1(int i) const { return F1_[i]; }
  const Mat& F2(int i, int j) const;
  Mat F1(const Vec& theta) const;
  Mat F2(const Vec& a, const Vec& b) const;

 private:
  const CqModule* M_;
  Mat F0_;
  std::vector<Mat> F1_;
  mutable std::unordered_map<long, Mat> F2_;
};

// Quantization map Phi_T with memoisation over basis bar words. One block
// exponential per word also fills the cache for all its contiguous subwords.
class ChernEngine {
 public:
  explicit ChernEngine(const CqModule& M, double T = 1.0);
  const CqModule& module() const { return M_; }
  const Curvature& curvature() const { return F_; }
  double T() const { return T_; }

  const Mat& phi(const Word& bar);
  Mat phi(const Chain& bar);
  // Ch(theta_0, ..., theta_N) = CStr(c(theta_0) Phi_1(theta_1..theta_N)).
  cplx chern(const Word& cyclic);
  cplx chern(const Chain& c);
  // Sum over terms of |coeff| 2^{-q} |c(theta_0)|_F |Phi|_F.
  double scale(const Chain& c);
  size_t cache_size() const { return cache_.size(); }

 private:
  CqModule M_;
  Curvature F_;
  double T_;
  Mat H_;
  std::unordered_map<Word, Mat, WordHash> cache_;
  std::vector<Mat> gc_;  // volume element times c(e_i), precomputed
};

// Phi_T by explicit enumeration of ordered partitions. With prune = false all
// block sizes are enumerated (larger blocks contribute zero brackets).
Mat quantize_enumerated(const CqModule& M, double T, const Word& bar, bool prune = true);

struct CalibratedSeminorm {
  double a = 0, b = 0, constant = 0;  // nu(theta) = constant * |theta|_l1
  double nu(const Vec& theta) const { return constant * theta.cwiseAbs().sum(); }
};
CalibratedSeminorm calibrate_seminorm(const CqModule& M);
double fundamental_bound(const CqModule& M, const CalibratedSeminorm& nu, double T,
                         const Word& bar);

// -CStr(Phi_1(alpha(w))) for a cyclic word over Omega_T; equals Ch(w).
cplx chern_via_alpha(ChernEngine& E, const Word& cyclic);

struct CoclosedResult {
  cplx value;
  double scale = 0;
};
CoclosedResult coclosed_residual(ChernEngine& E, const Word& cyclic);

struct FamilyResult {
  std::string family;
  long words = 0;
  double max_value = 0, max_scale = 0;
};
struct ChenVanishReport {
  std::vector<FamilyResult> families;
  double worst_relative() const;
};
// M must be strong; evaluation uses its acyclic extension.
ChenVanishReport chen_vanish(const CqModule& M, int words_per_family, int max_N, Rng& rng);

// Homotopy of modules with fixed Clifford action.
struct Homotopy {
  std::function<CqModule(double)> module;
  std::function<Mat(double)> dQ;
  std::function<std::vector<Mat>(double)> dc;  // empty result means zero
};
Homotopy linear_homotopy(const CqModule& M, const Mat& V);
Homotopy extend_homotopy(const Homotopy& h, AlgebraPtr ext);

// Psi_T^s on a basis bar word, exact in u.
Mat psi_cochain(const Homotopy& h, double s, double T, const Word& bar);

struct BianchiResult {
  double residual = 0;
  double scale = 0;
};
BianchiResult bianchi_check(const Homotopy& h, double s, const Word& bar, double step = 1e-4);

struct TransgressionResult {
  std::vector<double> residuals;
  double max_residual = 0;
  int cs_parity = 0;
};
// Words are cyclic words over the algebra of the extended homotopy.
TransgressionResult transgression_check(const Homotopy& hT, const std::vector<Word>& words,
                                        int s_nodes = 32);
// Chern-Simons value CS(w) = (-1)^q int_0^1 CStr(Psi_1^s(alpha(w))) ds.
cplx chern_simons(const Homotopy& hT, const Word& cyclic, int s_nodes = 32);

// Odd JLO integral for trivially graded algebras with d = 0.
cplx getzler_closed_form(const OddModule& M, const Word& cyclic);

// Random words with unit-free slots >= 1.
Word random_cyclic_word(const DgAlgebra& A, Rng& rng, int N);
Word random_bar_word(const DgAlgebra& A, Rng& rng, int N);

}  // namespace chernlab
