// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chernlab/algebra.hpp"

namespace chernlab {

constexpr int kMaxLetters = 48;

// Tensor word of basis indices. For cyclic words letter 0 is theta_0; for bar
// words letter 0 is theta_1.
struct Word {
  std::string letters;

  Word() = default;
  explicit Word(std::string s) : letters(std::move(s)) {}
  Word(std::initializer_list<int> l);
  Word(const unsigned char* p, int n) : letters(reinterpret_cast<const char*>(p), n) {}

  int size() const { return static_cast<int>(letters.size()); }
  int operator[](int i) const { return static_cast<unsigned char>(letters[i]); }
  const unsigned char* data() const { return reinterpret_cast<const unsigned char*>(letters.data()); }
  bool operator==(const Word& o) const { return letters == o.letters; }
  bool operator<(const Word& o) const {
    return letters.size() != o.letters.size() ? letters.size() < o.letters.size()
                                              : letters < o.letters;
  }
  std::string str() const;
};

struct WordHash {
  size_t operator()(const Word& w) const { return std::hash<std::string>()(w.letters); }
};

enum class ChainKind { cyclic, bar };

struct Term {
  Word word;
  cplx coeff;
};

// Finite linear combination of basis words. Canonical form: sorted, merged,
// no zero coefficients.
class Chain {
 public:
  Chain() = default;
  Chain(AlgebraPtr alg, ChainKind kind) : alg_(std::move(alg)), kind_(kind) {}

  const AlgebraPtr& algebra() const { return alg_; }
  const DgAlgebra& alg() const { return *alg_; }
  ChainKind kind() const { return kind_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  void add(const Word& w, cplx c) { terms_.push_back({w, c}); }
  void add(const unsigned char* p, int n, cplx c) { terms_.push_back({Word(p, n), c}); }
  void add_chain(const Chain& o, cplx scale = 1.0);
  void canonicalize(double drop_tol = 0.0);
  void scale(cplx a);

  double max_abs() const;
  double norm() const;  // Euclidean norm in word coordinates
  cplx coefficient(const Word& w) const;
  // Parity of the homogeneous chain, nullopt if mixed or empty.
  std::optional<int> parity() const;
  // Restrict to words with the given number of slots after theta_0 (cyclic) or
  // the given length (bar).
  Chain component(int N) const;
  int max_N() const;

 private:
  AlgebraPtr alg_;
  ChainKind kind_ = ChainKind::cyclic;
  std::vector<Term> terms_;
};

Chain operator+(const Chain& a, const Chain& b);
Chain operator-(const Chain& a, const Chain& b);
Chain operator*(cplx a, const Chain& b);

// Degree: sum of letter degrees minus N (cyclic, N = size-1) or minus size (bar).
int word_degree(const DgAlgebra& alg, const Word& w, ChainKind kind);
int word_N(const Word& w, ChainKind kind);

// Expand a word of algebra elements into basis words.
using ElementWord = std::vector<Vec>;
Chain expand(const AlgebraPtr& alg, const ElementWord& w, ChainKind kind, cplx coeff = 1.0);
// Split every slot into homogeneous parts (no change as a chain; used by
// callers that need pure degrees per slot).
std::vector<ElementWord> homogeneous_split(const DgAlgebra& alg, const ElementWord& w);

// Drop words with the unit letter in a reduced slot (slots >= 1 for cyclic, all
// slots for bar words over the quotient).
Chain reduce(const Chain& c);

// Cyclic complex C(Omega); outputs are reduced.
Chain d_cyclic(const Chain& c);
Chain b_cyclic(const Chain& c);
Chain B_connes(const Chain& c);
Chain d_total(const Chain& c);  // d + b - B

// Bar complex; reduce = true works over the quotient by the unit.
Chain d_bar(const Chain& c, bool reduce_out = false);
Chain b_prime(const Chain& c, bool reduce_out = false);
Chain cyclicize_N(const Chain& c, bool reduce_out = true);

// Maps from C(Omega_T) to B(quotient of Omega_T).
Chain alpha_map(const Chain& c);
Chain h_map(const Chain& c);
Chain S_prime(const Chain& c);  // on reduced bar chains over Omega_T

// Chen normalization operators on C(Omega_T).
Chain chen_S(const Chain& c);
Chain chen_S_plus_one(const Chain& c);
Chain chen_R(const Chain& c);
Chain chen_Si(const Vec& f, int i, const Chain& c);
Chain chen_Ti(const Vec& f, int i, const Chain& c);

// Exhaustive check of the complex axioms on all basis words with at most
// max_letters letters. Residuals per identity.
struct ComplexAxiomReport {
  long words = 0;
  double d2 = 0, b2 = 0, B2 = 0, db = 0, dB = 0, bB = 0;
  double max() const;
};
ComplexAxiomReport complex_axiom_check(const DgAlgebra& alg, int max_letters);

// All basis words of a given kind with between min and max letters; cyclic
// words skip the unit letter in slots >= 1, bar words (quotient) everywhere.
std::vector<Word> basis_words(const DgAlgebra& alg, ChainKind kind, int min_letters,
                              int max_letters, bool reduced = true);

// Chen subcomplex truncation.
struct ChenOptions {
  int N_max = 2;            // generator source words (theta_0..theta_N) with N <= N_max
  int window_N = -1;        // window: words with N <= window_N (default N_max + 1)
  bool close_total = true;  // one closure pass under d + b - B
  bool close_each = false;  // also under each of d, b, B separately
  double rank_tol = 1e-10;
};

struct Subspace {
  AlgebraPtr alg;
  int window_N = 0;
  std::vector<Word> index;
  std::unordered_map<Word, int, WordHash> position;
  Mat basis;  // orthonormal columns
  long generators = 0;
  long leaked_terms = 0;
  double leaked_mass = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> labels;  // one label per generator column (before orthonormalisation)
};

Subspace chen_subspace(const AlgebraPtr& alg_T, const ChenOptions& opt);
// Span of explicitly supplied chains, restricted to a window.
Subspace span_subspace(const AlgebraPtr& alg, const std::vector<Chain>& gens,
                       const std::vector<std::string>& labels, int window_N, double rank_tol = 1e-10);
double chen_residual(const Chain& c, const Subspace& sub);

// Term-by-term upper bound for the entire seminorm, with nu = max|coeff| and
// per-basis weight w (default 1).
struct SeminormBound {
  double value = 0.0;
  std::string seminorm_id;
};
SeminormBound entire_bound(const Chain& c, const std::vector<double>& weights = {});
double entire_bound_word(const DgAlgebra& alg, const ElementWord& w);
double factorial(int n);

// Operator-valued cochains on bar words.
class BarCochain {
 public:
  using Fn = std::function<Mat(const Word&)>;
  BarCochain() = default;
  BarCochain(int hdim, int parity, Fn fn) : hdim_(hdim), parity_(parity), fn_(std::move(fn)) {}
  int hdim() const { return hdim_; }
  int parity() const { return parity_; }
  Mat operator()(const Word& w) const { return fn_(w); }
  Mat eval(const Chain& c) const;

 private:
  int hdim_ = 0;
  int parity_ = 0;
  Fn fn_;
};

BarCochain bar_cochain_product(const AlgebraPtr& alg, const BarCochain& l1, const BarCochain& l2);
// delta l = -(d + b')^dual l, over B(Omega) (reduce = false) or the quotient.
BarCochain bar_delta(const AlgebraPtr& alg, const BarCochain& l, bool reduce = false);
BarCochain bar_unit(int hdim);

// Graded dual: (X^dual l)(c) = (-1)^{|X||l|} l(X c).
using ChainOp = std::function<Chain(const Chain&)>;
cplx dual_eval(const std::function<cplx(const Chain&)>& l, int l_parity, const ChainOp& X,
               int X_parity, const Chain& c);
Mat dual_eval(const BarCochain& l, const ChainOp& X, int X_parity, const Chain& c);

}  // namespace chernlab
