// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "chernlab/algebra.hpp"
#include "chernlab/linalg.hpp"

namespace chernlab {

// Z2-graded space C^{p|q}; parity[i] is +1 or -1.
struct GradedHilbert {
  std::vector<int> parity;

  int dim() const { return static_cast<int>(parity.size()); }
  Mat gamma() const;
  int even_dim() const;
  Mat even_part(const Mat& a) const;
  Mat odd_part(const Mat& a) const;
  // 0 or 1 for a homogeneous operator, throws otherwise.
  int operator_parity(const Mat& a, double tol = 1e-10) const;
  // [a,b] = ab - (-1)^{|a||b|} ba for homogeneous a, b.
  Mat supercommutator(const Mat& a, int pa, const Mat& b, int pb) const;
};

struct CliffordModule {
  GradedHilbert H;
  int q = 0;
  std::vector<Mat> e;

  int dim() const { return H.dim(); }
  Mat volume() const;  // e_1 ... e_q
};

// Spinor module of C_q (Jordan-Wigner) tensored with a graded multiplicity
// space. For q = 1 and trivial multiplicity e_1 = [[0,1],[-1,0]].
CliffordModule clifford_standard(int q, const std::vector<int>& multiplicity_parity = {1});
CliffordModule clifford_trivial(const std::vector<int>& parity);

ValidationReport clifford_validate(const CliffordModule& cm, double tol = 1e-12);

cplx supertrace(const GradedHilbert& h, const Mat& a);
cplx cstr(const CliffordModule& cm, const Mat& a);

// Projection onto operators supercommuting with the C_q action; even and
// odd parts are projected separately.
Mat equivariant_project(const CliffordModule& cm, const Mat& a);
double equivariance_residual(const CliffordModule& cm, const Mat& a);
// Random even (unitary) operator commuting with the Clifford generators.
Mat random_equivariant_unitary(const CliffordModule& cm, Rng& rng, double scale = 1.0);

constexpr int kBracketMax = 12;

// exp of the block matrix with -H on every diagonal block and the given
// transition blocks; returns the full (states*dim) square result.
struct Transition {
  int from, to;
  Mat block;
};
Mat augmented_exp(const Mat& H, int states, const std::vector<Transition>& trans);
// First block row E_0..E_K of exp(sum_j S^j (x) gen[j]) with S the shift on
// K+1 states (block upper triangular Toeplitz generator).
std::vector<Mat> toeplitz_exp(const std::vector<Mat>& gen, int K);

// {A_1,...,A_N}_H = int over the simplex of e^{-t0 H} A_1 e^{-t1 H} ... A_N e^{-tN H}.
Mat heat_bracket(const Mat& H, const std::vector<Mat>& a);
Mat bracket_oracle(const Mat& H, const std::vector<Mat>& a, int nodes = 64);

struct InsertUnitResult {
  Mat value;
  double weighted_residual = 0;  // against the gap-length weighted integral
  double sum_residual = 0;       // sum over all insertion slots vs plain bracket
};
InsertUnitResult bracket_insert_unit(const Mat& H, const std::vector<Mat>& a, int j);

struct SplitResult {
  Mat lhs, rhs;
  double residual = 0;  // relative Frobenius
};
// k is 1-based: B is inserted before A_k.
SplitResult bracket_split(const Mat& H, const std::vector<Mat>& a, const Mat& b, int k,
                          int nodes = 64);

struct CyclicSumResult {
  cplx lhs, rhs;
  double residual = 0;
  double scale = 0;
};
CyclicSumResult cstr_cyclic_sum(const CliffordModule& cm, const Mat& H, const std::vector<Mat>& a);

// Computable trace-norm bound (1/N!) prod ||A_i|| Tr(e^{-H/2}) e^{T/2}.
double bracket_trace_bound(const Mat& H, double T, const std::vector<Mat>& a);

bool is_hermitian(const Mat& a, double tol = 1e-10);

}  // namespace chernlab
