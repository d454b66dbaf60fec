// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "chernlab/fredholm.hpp"

namespace chernlab {

// Odd module over the discrete circle: H = l2(Z_n) (x) C^2,
// c(f) = M_f (x) 1, c(delta_x e_+) = M_delta_x U (x) A, c(delta_x e_-) = M_delta_x U* (x) A*,
// Q = U (x) A + U* (x) A* + sum_x |x><x| (x) B_x. Strong; axioms are checked.
OddModule fixture_discrete_circle(int n, std::uint64_t seed, double hop = 0.8, double onsite = 0.5);
// Position-diagonal Hermitian perturbation of the discrete circle module;
// adding it keeps the module strong.
Mat circle_onsite_perturbation(int n, std::uint64_t seed, double scale = 0.5);

// Random grading-preserving equivariant c and random odd Q. The default
// algebra is the discrete circle with n = 2, where such c is genuinely weak.
CqModule fixture_random_weak_cq(int dim, int q, std::uint64_t seed, AlgebraPtr alg = nullptr);
// Exterior algebra (Omega^0 = C) with random c; strong automatically.
CqModule fixture_exterior_strong(int k, bool twisted, int q, int mult, std::uint64_t seed);
// Mat_2(C) represented on C^dim (dim even) by a conjugated block embedding,
// with a random Hermitian Q. Weak since [Q, c] != 0 = c(d .).
OddModule fixture_getzler_trivial(int dim, std::uint64_t seed);

// Random odd equivariant Hermitian operator.
Mat random_odd_equivariant_hermitian(const CliffordModule& cm, Rng& rng, double scale = 1.0);

// g = 1 + eps * (random function) on the discrete circle, m x m.
MatrixElement fixture_circle_g(const DgAlgebra& A, int n, int m, std::uint64_t seed, double eps);

}  // namespace chernlab
