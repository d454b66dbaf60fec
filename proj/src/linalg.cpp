// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#include "chernlab/linalg.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/SVD>

namespace chernlab {

namespace {

double one_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

// Pade numerator/denominator for degree m in {3,5,7,9}.
Mat pade_low(const Mat& a, int m) {
  static const double b3[] = {120, 60, 12, 1};
  static const double b5[] = {30240, 15120, 3360, 420, 30, 1};
  static const double b7[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
  static const double b9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                              2162160.0,     110880.0,     3960.0,       90.0,        1.0};
  const double* b = m == 3 ? b3 : m == 5 ? b5 : m == 7 ? b7 : b9;
  const Eigen::Index n = a.rows();
  Mat id = Mat::Identity(n, n);
  Mat a2 = a * a;
  Mat pw = id;
  Mat u = b[1] * id;
  Mat v = b[0] * id;
  for (int k = 2; k <= m; k += 2) {
    pw = pw * a2;
    u += b[k + 1] * pw;
    v += b[k] * pw;
  }
  u = a * u;
  return (v - u).partialPivLu().solve(v + u);
}

Mat pade13(const Mat& a) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const Eigen::Index n = a.rows();
  Mat id = Mat::Identity(n, n);
  Mat a2 = a * a;
  Mat a4 = a2 * a2;
  Mat a6 = a4 * a2;
  Mat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
               b[1] * id);
  Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
          b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Mat expm(const Mat& a) {
  if (a.rows() != a.cols()) throw Error("expm: matrix not square");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  const double nrm = one_norm(a);
  if (!std::isfinite(nrm)) throw Error("expm: non-finite input");
  static const double theta[] = {1.495585217958292e-2, 2.539398330063230e-1,
                                 9.504178996162932e-1, 2.097847961257068e0};
  static const int degs[] = {3, 5, 7, 9};
  for (int i = 0; i < 4; ++i)
    if (nrm <= theta[i]) return pade_low(a, degs[i]);
  const double theta13 = 5.371920351148152;
  int s = 0;
  if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
  Mat r = pade13(a / std::ldexp(1.0, s));
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

double trace_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().sum();
}

double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

Quadrature gauss_legendre(int n) {
  if (n < 1) throw Error("gauss_legendre: need at least one node");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = 0.5 * (1.0 - x);
    q.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    q.weights[i] = q.weights[n - 1 - i] = 0.5 * w;
  }
  return q;
}

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(eng_);
}

int Rng::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

cplx Rng::cnormal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

Mat Rng::matrix(int rows, int cols) {
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cnormal();
  return m;
}

Mat Rng::hermitian(int n) {
  Mat m = matrix(n, n);
  return 0.5 * (m + m.adjoint());
}

std::string hash_bytes(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string hash_matrix(const Mat& a) {
  std::vector<double> raw;
  raw.reserve(2 * a.size() + 2);
  raw.push_back(static_cast<double>(a.rows()));
  raw.push_back(static_cast<double>(a.cols()));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      raw.push_back(a(i, j).real());
      raw.push_back(a(i, j).imag());
    }
  return hash_bytes(raw.data(), raw.size() * sizeof(double));
}

}  // namespace chernlab
