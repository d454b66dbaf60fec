// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chernlab/linalg.hpp"

namespace chernlab {

struct SparseTerm {
  int index;
  cplx coeff;
};
using Sparse = std::vector<SparseTerm>;

struct ValidationItem {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = true;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  void add(std::string name, double residual, double tol);
  bool pass() const;
  double max_residual() const;
  std::string summary() const;
};

constexpr double kTolAlg = 1e-12;

// Finite-dimensional dg algebra given by structure constants in a fixed basis.
// Elements are plain coefficient vectors (Vec) of length dim().
class DgAlgebra {
 public:
  struct MulTriplet {
    int i, j, k;
    cplx c;
  };
  // d(e_j) has coefficient c on e_i.
  struct DiffEntry {
    int i, j;
    cplx c;
  };

  DgAlgebra(std::string name, std::vector<int> degrees, int unit_index,
            const std::vector<MulTriplet>& mul, const std::vector<DiffEntry>& diff);

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(degrees_.size()); }
  int degree(int i) const { return degrees_[i]; }
  const std::vector<int>& degrees() const { return degrees_; }
  int unit() const { return unit_; }
  const Sparse& product(int i, int j) const { return mul_[static_cast<size_t>(i) * dim() + j]; }
  const Sparse& diff(int j) const { return diff_[j]; }

  std::vector<MulTriplet> mul_triplets() const;
  std::vector<DiffEntry> diff_entries() const;

  // Acyclic-extension bookkeeping: basis is [Omega | sigma*Omega].
  bool is_extension() const { return base_dim_ > 0; }
  int base_dim() const { return base_dim_; }
  int sigma_index() const;
  void set_extension_base(int base_dim) { base_dim_ = base_dim; }

  Vec zero() const { return Vec::Zero(dim()); }
  Vec basis(int i) const;
  Vec one() const { return basis(unit_); }
  Vec multiply(const Vec& a, const Vec& b) const;
  Vec d(const Vec& a) const;

  // Degree of a homogeneous element; nullopt for inhomogeneous or zero.
  std::optional<int> homogeneous_degree(const Vec& a, double tol = 0.0) const;
  Vec degree_part(const Vec& a, int deg) const;
  std::vector<int> degrees_present(const Vec& a, double tol = 0.0) const;
  std::vector<int> basis_of_degree(int deg) const;

  // Designated coefficient norm: max |coefficient|.
  double nu(const Vec& a) const { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

 private:
  std::string name_;
  std::vector<int> degrees_;
  int unit_;
  std::vector<Sparse> mul_;
  std::vector<Sparse> diff_;
  int base_dim_ = 0;
};

using AlgebraPtr = std::shared_ptr<const DgAlgebra>;

ValidationReport dga_validate(const DgAlgebra& alg, double tol = kTolAlg);

AlgebraPtr acyclic_extension(const DgAlgebra& alg);

// Mat_m(alg); basis index (a*m+b)*dim+i is E_ab (x) e_i, except that the slot
// of E_00 (x) 1 holds the identity matrix so the unit stays a basis vector.
AlgebraPtr mat_lift(const DgAlgebra& alg, int m);

// Square matrix with entries in one algebra, row-major.
struct MatrixElement {
  int m = 0;
  std::vector<Vec> entries;
  Vec& at(int a, int b) { return entries[static_cast<size_t>(a) * m + b]; }
  const Vec& at(int a, int b) const { return entries[static_cast<size_t>(a) * m + b]; }
};

MatrixElement mat_zero(const DgAlgebra& alg, int m);
MatrixElement mat_identity(const DgAlgebra& alg, int m);
MatrixElement mat_mul(const DgAlgebra& alg, const MatrixElement& x, const MatrixElement& y);
MatrixElement mat_add(const MatrixElement& x, const MatrixElement& y, cplx b = 1.0);
MatrixElement mat_scale(const MatrixElement& x, cplx a);
MatrixElement mat_d(const DgAlgebra& alg, const MatrixElement& x);
double mat_max_abs(const MatrixElement& x);
// Embed a matrix element into the coordinates of mat_lift(alg, m).
Vec lift_coordinates(const DgAlgebra& alg, const MatrixElement& x);
MatrixElement unlift_coordinates(const DgAlgebra& alg, int m, const Vec& v);
// Push a matrix over Omega into Omega_T (sigma-free part).
MatrixElement mat_to_extension(const DgAlgebra& ext, const MatrixElement& x);
// Left multiplication by sigma, entrywise.
MatrixElement mat_sigma(const DgAlgebra& ext, const MatrixElement& x);

// Inverse in Mat_m of the degree-0 subalgebra, by solving g x = 1.
MatrixElement mat_inverse(const DgAlgebra& alg, const MatrixElement& g);

struct MaurerCartan {
  MatrixElement g, ginv, omega;
  double mc_residual = 0.0;       // |d omega + omega^2|
  double inverse_residual = 0.0;  // |d g^-1 + g^-1 dg g^-1|
};
MaurerCartan maurer_cartan(const DgAlgebra& alg, const MatrixElement& g,
                           const MatrixElement* ginv = nullptr);

// Fixture algebras.
AlgebraPtr algebra_complex();
// Exterior algebra on k degree-1 generators; basis indexed by subsets, d = 0
// unless twisted (then d e_1 = e_1 e_2, which needs k >= 2).
AlgebraPtr algebra_exterior(int k, bool twisted_d = false);
// Functions on Z_n with the two-sided difference calculus:
// basis 1, delta_1..delta_{n-1}, delta_x e_+ (x<n), delta_x e_- (x<n).
AlgebraPtr algebra_discrete_circle(int n);
// Helpers for the discrete circle basis.
Vec dc_function(const DgAlgebra& alg, int n, const std::vector<cplx>& values);
std::vector<cplx> dc_values(int n, const Vec& f);

}  // namespace chernlab
