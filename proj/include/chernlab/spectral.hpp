// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "chernlab/fredholm.hpp"

namespace chernlab {

// Words of matrices over an algebra, traced into basis words:
// (x_0, ..., x_N) -> sum over i_0..i_N of ((x_0)_{i_0 i_1}, ..., (x_N)_{i_N i_0}).
Chain generalized_trace(const AlgebraPtr& alg, const std::vector<MatrixElement>& word,
                        cplx coeff = 1.0);

// Chen generator T_i^(f) evaluated on a word of matrices and traced.
Chain chen_T_matrix(const AlgebraPtr& alg, const MatrixElement& f, int i,
                    const std::vector<MatrixElement>& word);

// Odd Chern character of g in GL_m(Omega^0), over the acyclic extension.
struct OddChernChain {
  AlgebraPtr base, ext;
  MaurerCartan mc;
  int N_max = 0;
  int s_nodes = 0;
  std::vector<Chain> terms;  // terms[N], N = 0..N_max; terms[0] = 0
  Chain total() const;
};
OddChernChain ch_g(const AlgebraPtr& base, const MatrixElement& g, int N_max, int s_nodes = 0,
                   AlgebraPtr ext = nullptr);

struct ChGLevel {
  int N = 0;
  double db_identity = 0;     // |((d + b) Ch(g))_N - Tr(1 (x) omega^N)|
  double B_part = 0;          // |(B Ch(g))_N|
  double raw_residual = 0;    // distance of (D Ch(g))_N to the Chen generators
  double chen_residual = 0;   // same after adding the telescope lambda_N - lambda_{N+1}
  double lambda_bound = 0;    // entire bound of lambda_{N+1}
  double lambda_predicted = 0;
  std::vector<std::string> labels;
  std::vector<cplx> coefficients;  // fitted generator coefficients
};
struct ChGClosedReport {
  std::vector<ChGLevel> levels;  // N = 1 .. N_max - 1
  double max_chen_residual() const;
};
ChGClosedReport ch_g_closed(const OddChernChain& ch);

// Q_{g,s} = Q_m + s c(omega) on H^m, together with the doubled module over
// Mat_m(Omega_T) used by the pairing.
struct TwistedFamily {
  OddModule M;
  int m = 1;
  AlgebraPtr ext, lifted;
  MaurerCartan mc;
  Mat Qm, c_g, c_ginv, c_omega;
  double omega_identity = 0;   // |c(omega) - c(g^-1)[Q_m, c(g)]|
  double square_identity = 0;  // max_s |Q_s^2 - Q_m^2 - X_s|
  double similarity = 0;       // |Q_{g,1} - c(g^-1) Q_m c(g)|
  double x_skew = 0;           // |X_1 - X_1^*|, recorded only

  std::shared_ptr<const CqModule> doubled;  // double of the lift of the extension
  std::shared_ptr<const Curvature> F;
  Vec v_omega, v_sigma_omega, v_sigma_omega2;  // lifted coordinates

  Mat Q(double s) const { return Qm + s * c_omega; }
  Mat X(double s) const;
  Mat X_doubled(double s) const;
  Vec A_coords(double s) const { return s * v_omega + (s * s - s) * v_sigma_omega2; }
  const Vec& B_coords() const { return v_sigma_omega; }
};
TwistedFamily twisted_family(const OddModule& M, const MatrixElement& g);

// Trace-norm bound for the Dyson tail beyond order M_max:
// Tr(e^{-TQ^2}) x^{M+1}/(M+1)! e^x with x = T|X|.
double dyson_tail_bound(double heat_trace, double x, int M_max);

struct PerturbationResult {
  Mat value, direct;
  std::vector<double> error_by_order;  // trace-norm error of the partial sums
  double tail_bound = 0;
  double error = 0;
  int M_max = 0;
};
// tail_tol < 0 disables the tail check.
PerturbationResult perturbation_series(const TwistedFamily& tf, double s, double T, int M_max,
                                       double tail_tol = -1);

struct SfIntegral {
  cplx direct, series;
  double oracle = 0;  // Tr F(Q_1) - Tr F(Q_0), F' = exp(-x^2)
  double methods_residual = 0;
  double oracle_residual = 0;
  int s_nodes = 0;
  int series_order = 0;
  double series_tail = 0;
};
SfIntegral sf_integral(const TwistedFamily& tf, int s_nodes = 32);
// Diagnostic: affine path between unrelated Hermitian Q0 and Q1.
SfIntegral sf_integral_affine(const Mat& Q0, const Mat& Q1, int s_nodes = 32);

struct PartitionResumResult {
  Mat lhs, rhs, rhs_unfiltered;
  double residual = 0;             // block-filtered right side
  double unfiltered_residual = 0;  // all words with N <= 2 M_max
};
PartitionResumResult partition_resum_check(const TwistedFamily& tf, double s, double T, int M_max);

struct CrossingReport {
  int up = 0, down = 0, grid = 0;
  int spectral_flow() const { return up - down; }
};
// Signed zero crossings of the eigenvalues of (1-s)Q0 + sQ1 on a uniform grid.
CrossingReport eigenvalue_crossings(const Mat& Q0, const Mat& Q1, int grid = 2000);

// The pairing terms come out as pairing_N = -sf_N: the B letter enters Phi
// as one extra curvature block and carries one extra factor -1.
constexpr double kPairingSign = -1.0;

struct PairingTerm {
  int N = 0;
  cplx pairing_term, sf_term;
  double residual = 0;            // |pairing_N - kPairingSign * sf_N|
  double plus_sign_residual = 0;  // |pairing_N - sf_N|
};
struct PairingReport {
  std::string fixture;
  std::uint64_t seed = 0;
  int m = 1, N_used = 0, s_nodes = 0;
  std::vector<PairingTerm> terms;
  cplx pairing_total, sf_terms_total;
  SfIntegral sf;
  double sf_residual = 0;  // |pairing - kPairingSign * sf integral|
  double sf_plus_sign_residual = 0;
  double tail_bound = 0;
  // At a fixed s: sum over N of the integrands against Tr(c(omega) e^{-Q_s^2}).
  double pointwise_s = 0.5;
  cplx pointwise_direct, pointwise_sf_sum, pointwise_pairing_sum;
  double pointwise_residual = 0;
  double term_residual_max = 0;
  double curvature_AB = 0, curvature_BA = 0, curvature_B = 0, curvature_X = 0;
  double reshuffle_residual = 0;  // pairing through the reshuffled double
  double module_reshuffle_residual = 0;
  double getzler_normalized = 0;  // sf integral / sqrt(pi)
  int crossing_sf = 0;
  bool crossing_available = false;
  double seconds = 0;
};
// Throws if the certified tail exceeds tail_tol at N_max, naming the
// smallest N_max that would pass.
PairingReport pairing(const OddModule& M, const MatrixElement& g, int N_max, int s_nodes = 0,
                      double tail_tol = 1e-6, int threads = 1);
// Certified bound on sum_{N > N_max} |pairing term N|.
double pairing_tail_bound(const TwistedFamily& tf, int N_max);

}  // namespace chernlab
