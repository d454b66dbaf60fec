// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace chernlab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// All hard errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int parity_of(long x) { return static_cast<int>(((x % 2) + 2) % 2); }
inline double sign_of(long x) { return parity_of(x) ? -1.0 : 1.0; }

// Scaling and squaring with a degree-13 Pade approximant (lower degrees for
// small norms).
Mat expm(const Mat& a);

double trace_norm(const Mat& a);
double op_norm(const Mat& a);
double max_abs(const Mat& a);

// Gauss-Legendre rule mapped to [0,1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int n);

// Seeded 64-bit generator; the seed is kept so reports can echo it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}
  std::uint64_t seed() const { return seed_; }
  double uniform(double lo = 0.0, double hi = 1.0);
  int integer(int lo, int hi);  // inclusive
  double normal();
  cplx cnormal();
  Mat matrix(int rows, int cols);
  Mat hermitian(int n);
  std::mt19937_64& engine() { return eng_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

// FNV-1a digest of a matrix, for report input hashes.
std::string hash_matrix(const Mat& a);
std::string hash_bytes(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull);

}  // namespace chernlab
