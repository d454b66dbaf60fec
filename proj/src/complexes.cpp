// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#include "chernlab/complexes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/QR>

namespace chernlab {

Word::Word(std::initializer_list<int> l) {
  for (int x : l) letters.push_back(static_cast<char>(static_cast<unsigned char>(x)));
}

std::string Word::str() const {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < size(); ++i) os << (i ? "," : "") << (*this)[i];
  os << ")";
  return os.str();
}

void Chain::add_chain(const Chain& o, cplx scale) {
  for (const auto& t : o.terms_) terms_.push_back({t.word, scale * t.coeff});
}

void Chain::canonicalize(double drop_tol) {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.word < b.word; });
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && out.back().word == t.word)
      out.back().coeff += t.coeff;
    else
      out.push_back(std::move(t));
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [&](const Term& t) { return std::abs(t.coeff) <= drop_tol; }),
            out.end());
  terms_ = std::move(out);
}

void Chain::scale(cplx a) {
  for (auto& t : terms_) t.coeff *= a;
}

double Chain::max_abs() const {
  double r = 0.0;
  for (const auto& t : terms_) r = std::max(r, std::abs(t.coeff));
  return r;
}

double Chain::norm() const {
  double r = 0.0;
  for (const auto& t : terms_) r += std::norm(t.coeff);
  return std::sqrt(r);
}

cplx Chain::coefficient(const Word& w) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), w,
                             [](const Term& t, const Word& x) { return t.word < x; });
  if (it != terms_.end() && it->word == w) return it->coeff;
  return 0.0;
}

std::optional<int> Chain::parity() const {
  std::optional<int> p;
  for (const auto& t : terms_) {
    const int q = parity_of(word_degree(*alg_, t.word, kind_));
    if (p && *p != q) return std::nullopt;
    p = q;
  }
  return p;
}

Chain Chain::component(int N) const {
  Chain out(alg_, kind_);
  for (const auto& t : terms_)
    if (word_N(t.word, kind_) == N) out.terms_.push_back(t);
  return out;
}

int Chain::max_N() const {
  int r = -1;
  for (const auto& t : terms_) r = std::max(r, word_N(t.word, kind_));
  return r;
}

Chain operator+(const Chain& a, const Chain& b) {
  Chain out = a;
  out.add_chain(b);
  out.canonicalize();
  return out;
}

Chain operator-(const Chain& a, const Chain& b) {
  Chain out = a;
  out.add_chain(b, -1.0);
  out.canonicalize();
  return out;
}

Chain operator*(cplx a, const Chain& b) {
  Chain out = b;
  out.scale(a);
  out.canonicalize();
  return out;
}

int word_N(const Word& w, ChainKind kind) {
  return kind == ChainKind::cyclic ? w.size() - 1 : w.size();
}

int word_degree(const DgAlgebra& alg, const Word& w, ChainKind kind) {
  int d = 0;
  for (int i = 0; i < w.size(); ++i) d += alg.degree(w[i]);
  return d - word_N(w, kind);
}

Chain expand(const AlgebraPtr& alg, const ElementWord& w, ChainKind kind, cplx coeff) {
  Chain out(alg, kind);
  std::vector<Sparse> slots;
  for (const auto& e : w) {
    if (e.size() != alg->dim()) throw Error("expand: element dimension mismatch");
    Sparse s;
    for (int i = 0; i < alg->dim(); ++i)
      if (e(i) != cplx(0.0)) s.push_back({i, e(i)});
    if (s.empty()) return out;
    slots.push_back(std::move(s));
  }
  const int L = static_cast<int>(slots.size());
  if (L > kMaxLetters) throw Error("expand: word too long");
  std::vector<int> pos(L, 0);
  unsigned char buf[kMaxLetters];
  while (true) {
    cplx c = coeff;
    for (int k = 0; k < L; ++k) {
      buf[k] = static_cast<unsigned char>(slots[k][pos[k]].index);
      c *= slots[k][pos[k]].coeff;
    }
    out.add(buf, L, c);
    int k = L - 1;
    while (k >= 0 && ++pos[k] == static_cast<int>(slots[k].size())) pos[k--] = 0;
    if (k < 0) break;
  }
  out.canonicalize();
  return out;
}

std::vector<ElementWord> homogeneous_split(const DgAlgebra& alg, const ElementWord& w) {
  std::vector<ElementWord> out{ElementWord{}};
  for (const auto& e : w) {
    std::vector<ElementWord> next;
    for (int deg : alg.degrees_present(e))
      for (const auto& prefix : out) {
        ElementWord x = prefix;
        x.push_back(alg.degree_part(e, deg));
        next.push_back(std::move(x));
      }
    out = std::move(next);
    if (out.empty()) break;
  }
  return out;
}

namespace {

using Emit = std::function<void(const unsigned char*, int, cplx)>;

// m_k = |theta_0| + ... + |theta_k| - k
inline void cyclic_m(const DgAlgebra& A, const unsigned char* w, int L, int* m) {
  int acc = 0;
  for (int k = 0; k < L; ++k) {
    acc += A.degree(w[k]) - (k == 0 ? 0 : 1);
    m[k] = acc;
  }
}

// n[0] = 0, n[k] = |theta_1| + ... + |theta_k| - k
inline void bar_n(const DgAlgebra& A, const unsigned char* w, int L, int* n) {
  n[0] = 0;
  for (int k = 1; k <= L; ++k) n[k] = n[k - 1] + A.degree(w[k - 1]) - 1;
}

template <class E>
void k_d_cyclic(const DgAlgebra& A, const unsigned char* w, int L, cplx c, E& emit) {
  unsigned char buf[kMaxLetters];
  std::copy(w, w + L, buf);
  int m = 0;
  for (int k = 0; k < L; ++k) {
    const double s = k == 0 ? 1.0 : -sign_of(m);
    for (const auto& t : A.diff(w[k])) {
      buf[k] = static_cast<unsigned char>(t.index);
      emit(buf, L, c * (s * t.coeff));
    }
    buf[k] = w[k];
    m += A.degree(w[k]) - (k == 0 ? 0 : 1);
  }
}

template <class E>
void k_b_cyclic(const DgAlgebra& A, const unsigned char* w, int L, cplx c, E& emit) {
  if (L < 2) return;
  const int N = L - 1;
  int m[kMaxLetters];
  cyclic_m(A, w, L, m);
  unsigned char buf[kMaxLetters];
  for (int k = 0; k < N; ++k) {
    const Sparse& p = A.product(w[k], w[k + 1]);
    if (p.empty()) continue;
    std::copy(w, w + k, buf);
    std::copy(w + k + 2, w + L, buf + k + 1);
    const double s = -sign_of(m[k]);
    for (const auto& t : p) {
      buf[k] = static_cast<unsigned char>(t.index);
      emit(buf, L - 1, c * (s * t.coeff));
    }
  }
  const Sparse& p = A.product(w[N], w[0]);
  if (p.empty()) return;
  const double s = sign_of(static_cast<long>(A.degree(w[N]) - 1) * m[N - 1]);
  std::copy(w + 1, w + N, buf + 1);
  for (const auto& t : p) {
    buf[0] = static_cast<unsigned char>(t.index);
    emit(buf, L - 1, c * (s * t.coeff));
  }
}

template <class E>
void k_B_cyclic(const DgAlgebra& A, const unsigned char* w, int L, cplx c, E& emit) {
  const int N = L - 1;
  int m[kMaxLetters];
  cyclic_m(A, w, L, m);
  unsigned char buf[kMaxLetters];
  buf[0] = static_cast<unsigned char>(A.unit());
  for (int k = 0; k <= N; ++k) {
    const int mk1 = k == 0 ? 1 : m[k - 1];
    const double s = sign_of(static_cast<long>(mk1 + 1) * (m[N] - mk1));
    std::copy(w + k, w + L, buf + 1);
    std::copy(w, w + k, buf + 1 + (L - k));
    emit(buf, L + 1, c * s);
  }
}

template <class E>
void k_d_bar(const DgAlgebra& A, const unsigned char* w, int L, cplx c, E& emit) {
  int n[kMaxLetters + 1];
  bar_n(A, w, L, n);
  unsigned char buf[kMaxLetters];
  std::copy(w, w + L, buf);
  for (int k = 1; k <= L; ++k) {
    const double s = -sign_of(n[k - 1]);
    for (const auto& t : A.diff(w[k - 1])) {
      buf[k - 1] = static_cast<unsigned char>(t.index);
      emit(buf, L, c * (s * t.coeff));
    }
    buf[k - 1] = w[k - 1];
  }
}

template <class E>
void k_bprime(const DgAlgebra& A, const unsigned char* w, int L, cplx c, E& emit) {
  int n[kMaxLetters + 1];
  bar_n(A, w, L, n);
  unsigned char buf[kMaxLetters];
  for (int k = 1; k < L; ++k) {
    const Sparse& p = A.product(w[k - 1], w[k]);
    if (p.empty()) continue;
    std::copy(w, w + k - 1, buf);
    std::copy(w + k + 1, w + L, buf + k);
    const double s = -sign_of(n[k]);
    for (const auto& t : p) {
      buf[k - 1] = static_cast<unsigned char>(t.index);
      emit(buf, L - 1, c * (s * t.coeff));
    }
  }
}

template <class E>
void k_N(const DgAlgebra& A, const unsigned char* w, int L, cplx c, E& emit) {
  if (L == 0) {
    emit(w, 0, c);
    return;
  }
  int n[kMaxLetters + 1];
  bar_n(A, w, L, n);
  unsigned char buf[kMaxLetters];
  for (int k = 1; k <= L; ++k) {
    const double s = sign_of(static_cast<long>(n[k]) * (n[L] - n[k]));
    std::copy(w + k, w + L, buf);
    std::copy(w, w + k, buf + (L - k));
    emit(buf, L, c * s);
  }
}

template <class K>
Chain apply_op(const Chain& c, ChainKind out_kind, bool reduce_out, K&& kernel) {
  Chain out(c.algebra(), out_kind);
  const int u = c.alg().unit();
  const int from = out_kind == ChainKind::cyclic ? 1 : 0;
  auto emit = [&](const unsigned char* b, int n, cplx v) {
    if (reduce_out)
      for (int i = from; i < n; ++i)
        if (b[i] == u) return;
    if (v != cplx(0.0)) out.add(b, n, v);
  };
  for (const auto& t : c.terms()) kernel(c.alg(), t.word.data(), t.word.size(), t.coeff, emit);
  out.canonicalize();
  return out;
}

void require_kind(const Chain& c, ChainKind k, const char* op) {
  if (c.kind() != k)
    throw Error(std::string(op) + ": wrong chain kind (" +
                (k == ChainKind::cyclic ? "cyclic" : "bar") + " expected)");
}

void require_extension(const Chain& c, const char* op) {
  if (!c.alg().is_extension()) throw Error(std::string(op) + ": chain must live over Omega_T");
}

Sparse chen_function(const DgAlgebra& A, const Vec& f) {
  if (f.size() != A.dim()) throw Error("Chen operator: f has wrong dimension");
  Sparse s;
  for (int i = 0; i < A.dim(); ++i) {
    if (f(i) == cplx(0.0)) continue;
    if (A.degree(i) != 0) throw Error("Chen operator: f must have degree 0");
    if (A.is_extension() && i >= A.base_dim())
      throw Error("Chen operator: f must not have a sigma component");
    s.push_back({i, f(i)});
  }
  return s;
}

}  // namespace

Chain reduce(const Chain& c) {
  return apply_op(c, c.kind(), true,
                  [](const DgAlgebra&, const unsigned char* w, int L, cplx v, auto& emit) {
                    emit(w, L, v);
                  });
}

Chain d_cyclic(const Chain& c) {
  require_kind(c, ChainKind::cyclic, "d_cyclic");
  return apply_op(c, ChainKind::cyclic, true,
                  [](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    k_d_cyclic(A, w, L, v, e);
                  });
}

Chain b_cyclic(const Chain& c) {
  require_kind(c, ChainKind::cyclic, "b_cyclic");
  return apply_op(c, ChainKind::cyclic, true,
                  [](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    k_b_cyclic(A, w, L, v, e);
                  });
}

Chain B_connes(const Chain& c) {
  require_kind(c, ChainKind::cyclic, "B_connes");
  return apply_op(c, ChainKind::cyclic, true,
                  [](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    k_B_cyclic(A, w, L, v, e);
                  });
}

Chain d_total(const Chain& c) {
  require_kind(c, ChainKind::cyclic, "d_total");
  return apply_op(c, ChainKind::cyclic, true,
                  [](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    k_d_cyclic(A, w, L, v, e);
                    k_b_cyclic(A, w, L, v, e);
                    k_B_cyclic(A, w, L, -v, e);
                  });
}

Chain d_bar(const Chain& c, bool reduce_out) {
  require_kind(c, ChainKind::bar, "d_bar");
  return apply_op(c, ChainKind::bar, reduce_out,
                  [](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    k_d_bar(A, w, L, v, e);
                  });
}

Chain b_prime(const Chain& c, bool reduce_out) {
  require_kind(c, ChainKind::bar, "b_prime");
  return apply_op(c, ChainKind::bar, reduce_out,
                  [](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    k_bprime(A, w, L, v, e);
                  });
}

Chain cyclicize_N(const Chain& c, bool reduce_out) {
  require_kind(c, ChainKind::bar, "cyclicize_N");
  return apply_op(c, ChainKind::bar, reduce_out,
                  [](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    k_N(A, w, L, v, e);
                  });
}

Chain alpha_map(const Chain& c) {
  require_kind(c, ChainKind::cyclic, "alpha_map");
  require_extension(c, "alpha_map");
  const int sig = c.alg().sigma_index();
  return apply_op(c, ChainKind::bar, true,
                  [sig](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    unsigned char buf[kMaxLetters];
                    std::copy(w, w + L, buf);
                    for (const auto& t : A.product(sig, w[0])) {
                      buf[0] = static_cast<unsigned char>(t.index);
                      k_N(A, buf, L, v * t.coeff, e);
                    }
                  });
}

Chain h_map(const Chain& c) {
  require_kind(c, ChainKind::cyclic, "h_map");
  return apply_op(c, ChainKind::bar, true,
                  [](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    k_N(A, w, L, v, e);
                  });
}

Chain S_prime(const Chain& c) {
  require_kind(c, ChainKind::bar, "S_prime");
  require_extension(c, "S_prime");
  const int sig = c.alg().sigma_index();
  return apply_op(c, ChainKind::bar, true,
                  [sig](const DgAlgebra&, const unsigned char* w, int L, cplx v, auto& e) {
                    unsigned char buf[kMaxLetters];
                    for (int k = 0; k <= L; ++k) {
                      std::copy(w, w + k, buf);
                      buf[k] = static_cast<unsigned char>(sig);
                      std::copy(w + k, w + L, buf + k + 1);
                      e(buf, L + 1, v);
                    }
                  });
}

Chain chen_S(const Chain& c) {
  require_kind(c, ChainKind::cyclic, "chen_S");
  require_extension(c, "chen_S");
  const int sig = c.alg().sigma_index();
  return apply_op(c, ChainKind::cyclic, true,
                  [sig](const DgAlgebra&, const unsigned char* w, int L, cplx v, auto& e) {
                    unsigned char buf[kMaxLetters];
                    for (int k = 0; k < L; ++k) {
                      std::copy(w, w + k + 1, buf);
                      buf[k + 1] = static_cast<unsigned char>(sig);
                      std::copy(w + k + 1, w + L, buf + k + 2);
                      e(buf, L + 1, v);
                    }
                  });
}

Chain chen_S_plus_one(const Chain& c) { return chen_S(c) + reduce(c); }

Chain chen_R(const Chain& c) {
  require_kind(c, ChainKind::cyclic, "chen_R");
  require_extension(c, "chen_R");
  const int sig = c.alg().sigma_index();
  return apply_op(c, ChainKind::cyclic, true,
                  [sig](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    unsigned char buf[kMaxLetters];
                    std::copy(w, w + L, buf);
                    for (const auto& t : A.product(sig, w[0])) {
                      buf[0] = static_cast<unsigned char>(t.index);
                      e(buf, L, v * t.coeff);
                    }
                  });
}

Chain chen_Si(const Vec& f, int i, const Chain& c) {
  require_kind(c, ChainKind::cyclic, "chen_Si");
  require_extension(c, "chen_Si");
  const Sparse fs = chen_function(c.alg(), f);
  if (i < 0) throw Error("chen_Si: negative index");
  return apply_op(c, ChainKind::cyclic, true,
                  [&](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    const int N = L - 1;
                    if (i > N) return;
                    int m[kMaxLetters];
                    cyclic_m(A, w, L, m);
                    const double s = sign_of(m[i]);
                    unsigned char buf[kMaxLetters];
                    std::copy(w, w + i + 1, buf);
                    std::copy(w + i + 1, w + L, buf + i + 2);
                    for (const auto& t : fs) {
                      buf[i + 1] = static_cast<unsigned char>(t.index);
                      e(buf, L + 1, v * (s * t.coeff));
                    }
                  });
}

Chain chen_Ti(const Vec& f, int i, const Chain& c) {
  require_kind(c, ChainKind::cyclic, "chen_Ti");
  require_extension(c, "chen_Ti");
  const Sparse fs = chen_function(c.alg(), f);
  if (i < 0) throw Error("chen_Ti: negative index");
  return apply_op(c, ChainKind::cyclic, true,
                  [&](const DgAlgebra& A, const unsigned char* w, int L, cplx v, auto& e) {
                    const int N = L - 1;
                    if (i > N) return;
                    unsigned char buf[kMaxLetters];
                    for (const auto& ft : fs) {
                      const cplx a = v * ft.coeff;
                      const int fi = ft.index;
                      // (.., theta_i, f theta_{i+1}, ..) or (f theta_0, ..) for i = N
                      const int tgt = i < N ? i + 1 : 0;
                      std::copy(w, w + L, buf);
                      for (const auto& t : A.product(fi, w[tgt])) {
                        buf[tgt] = static_cast<unsigned char>(t.index);
                        e(buf, L, a * t.coeff);
                      }
                      std::copy(w, w + L, buf);
                      for (const auto& t : A.product(w[i], fi)) {
                        buf[i] = static_cast<unsigned char>(t.index);
                        e(buf, L, -a * t.coeff);
                      }
                      std::copy(w, w + i + 1, buf);
                      std::copy(w + i + 1, w + L, buf + i + 2);
                      for (const auto& t : A.diff(fi)) {
                        buf[i + 1] = static_cast<unsigned char>(t.index);
                        e(buf, L + 1, -a * t.coeff);
                      }
                    }
                  });
}

double ComplexAxiomReport::max() const { return std::max({d2, b2, B2, db, dB, bB}); }

std::vector<Word> basis_words(const DgAlgebra& alg, ChainKind kind, int min_letters,
                              int max_letters, bool reduced) {
  std::vector<Word> out;
  const int n = alg.dim(), u = alg.unit();
  for (int L = std::max(min_letters, 0); L <= max_letters; ++L) {
    if (L == 0) {
      out.emplace_back();
      continue;
    }
    std::vector<int> pos(L, 0);
    auto allowed = [&](int slot, int letter) {
      if (!reduced) return true;
      if (kind == ChainKind::cyclic && slot == 0) return true;
      return letter != u;
    };
    auto advance_to_allowed = [&](int slot) {
      while (pos[slot] < n && !allowed(slot, pos[slot])) ++pos[slot];
    };
    for (int k = 0; k < L; ++k) advance_to_allowed(k);
    if (std::any_of(pos.begin(), pos.end(), [&](int p) { return p >= n; })) continue;
    unsigned char buf[kMaxLetters];
    while (true) {
      for (int k = 0; k < L; ++k) buf[k] = static_cast<unsigned char>(pos[k]);
      out.emplace_back(buf, L);
      int k = L - 1;
      while (k >= 0) {
        ++pos[k];
        advance_to_allowed(k);
        if (pos[k] < n) break;
        pos[k] = 0;
        advance_to_allowed(k);
        --k;
      }
      if (k < 0) break;
    }
  }
  return out;
}

namespace {

// Open addressing accumulator keyed by packed words.
class PackedAccumulator {
 public:
  explicit PackedAccumulator(int log2cap) : mask_((1u << log2cap) - 1), keys_(mask_ + 1, kEmpty), vals_(mask_ + 1) {}
  void add(std::uint64_t key, cplx v) {
    std::uint64_t h = key * 0x9E3779B97F4A7C15ull;
    unsigned i = static_cast<unsigned>(h >> 40) & mask_;
    while (true) {
      if (keys_[i] == key) {
        vals_[i] += v;
        return;
      }
      if (keys_[i] == kEmpty) {
        keys_[i] = key;
        vals_[i] = v;
        used_.push_back(i);
        if (used_.size() * 2 > mask_) grow();
        return;
      }
      i = (i + 1) & mask_;
    }
  }
  template <class F>
  void drain(F&& f) {
    for (unsigned i : used_) {
      f(keys_[i], vals_[i]);
      keys_[i] = kEmpty;
    }
    used_.clear();
  }

 private:
  static constexpr std::uint64_t kEmpty = ~0ull;
  void grow() {
    std::vector<std::pair<std::uint64_t, cplx>> items;
    for (unsigned i : used_) items.push_back({keys_[i], vals_[i]});
    mask_ = mask_ * 2 + 1;
    keys_.assign(mask_ + 1, kEmpty);
    vals_.assign(mask_ + 1, cplx(0.0));
    used_.clear();
    for (auto& [k, v] : items) add(k, v);
  }
  unsigned mask_;
  std::vector<std::uint64_t> keys_;
  std::vector<cplx> vals_;
  std::vector<unsigned> used_;
};

}  // namespace

ComplexAxiomReport complex_axiom_check(const DgAlgebra& alg, int max_letters) {
  // plain product; the coefficients here are always finite
  const auto cmul = [](cplx a, cplx b) {
    return cplx(a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real());
  };
  ComplexAxiomReport rep;
  const int n = alg.dim();
  const int u = alg.unit();
  int bits = 1;
  while ((1 << bits) < n) ++bits;
  const int out_max = max_letters + 2;
  if (bits * out_max > 58) throw Error("complex_axiom_check: words too long for packed keys");

  struct Mid {
    unsigned char w[kMaxLetters];
    int L;
    cplx c;
  };
  std::vector<Mid> mid;
  auto first = [&](const unsigned char* b, int L, cplx v) {
    for (int i = 1; i < L; ++i)
      if (b[i] == u) return;
    Mid x;
    std::copy(b, b + L, x.w);
    x.L = L;
    x.c = v;
    mid.push_back(x);
  };
  PackedAccumulator acc(12);
  const std::uint64_t lmask = (1ull << bits) - 1;
  for (const Word& w : basis_words(alg, ChainKind::cyclic, 1, max_letters)) {
    const int L = w.size();
    int deg0 = 0;
    for (int i = 0; i < L; ++i) deg0 += alg.degree(w[i]);
    deg0 -= L - 1;
    mid.clear();
    k_d_cyclic(alg, w.data(), L, 1.0, first);
    k_b_cyclic(alg, w.data(), L, 1.0, first);
    k_B_cyclic(alg, w.data(), L, -1.0, first);
    // Second application on packed keys. x has no unit in slots >= 1, so only
    // newly written letters need the reduced-slot test.
    for (const Mid& x : mid) {
      const int Lx = x.L, N = Lx - 1;
      int m[kMaxLetters];
      cyclic_m(alg, x.w, Lx, m);
      std::uint64_t px = 0;
      for (int i = 0; i < Lx; ++i) px |= static_cast<std::uint64_t>(x.w[i]) << (bits * i);
      const auto head = [](int len) { return static_cast<std::uint64_t>(len) << 58; };
      // d
      for (int k = 0; k < Lx; ++k) {
        const double sg = k == 0 ? 1.0 : -sign_of(m[k - 1]);
        const std::uint64_t base = head(Lx) | (px & ~(lmask << (bits * k)));
        for (const auto& t : alg.diff(x.w[k])) {
          if (k > 0 && t.index == u) continue;
          acc.add(base | (static_cast<std::uint64_t>(t.index) << (bits * k)), cmul(x.c, sg * t.coeff));
        }
      }
      // b
      if (Lx >= 2) {
        for (int k = 0; k < N; ++k) {
          const Sparse& p = alg.product(x.w[k], x.w[k + 1]);
          if (p.empty()) continue;
          const std::uint64_t low = k == 0 ? 0 : px & ((1ull << (bits * k)) - 1);
          const std::uint64_t high = (px >> (bits * (k + 2))) << (bits * (k + 1));
          const double sg = -sign_of(m[k]);
          for (const auto& t : p) {
            if (k > 0 && t.index == u) continue;
            acc.add(head(Lx - 1) | low | high | (static_cast<std::uint64_t>(t.index) << (bits * k)),
                    cmul(x.c, sg * t.coeff));
          }
        }
        const Sparse& p = alg.product(x.w[N], x.w[0]);
        if (!p.empty()) {
          const double sg = sign_of(static_cast<long>(alg.degree(x.w[N]) - 1) * m[N - 1]);
          const std::uint64_t inner = (px >> bits) & ((1ull << (bits * (N - 1))) - 1);
          for (const auto& t : p)
            acc.add(head(Lx - 1) | static_cast<std::uint64_t>(t.index) | (inner << bits), cmul(x.c, sg * t.coeff));
        }
      }
      // B of a word starting with the unit puts the unit into a reduced slot;
      // otherwise the outputs are rotations of the key.
      if (x.w[0] == u) continue;
      const std::uint64_t wmask = (1ull << (bits * Lx)) - 1;
      const std::uint64_t Bhead = head(Lx + 1) | static_cast<std::uint64_t>(u);
      for (int k = 0; k <= N; ++k) {
        const int mk1 = k == 0 ? 1 : m[k - 1];
        const double sg = sign_of(static_cast<long>(mk1 + 1) * (m[N] - mk1));
        const std::uint64_t rot = k == 0 ? px : ((px >> (bits * k)) | (px << (bits * (Lx - k)))) & wmask;
        acc.add(Bhead | (rot << bits), -x.c * sg);
      }
    }
    acc.drain([&](std::uint64_t key, cplx v) {
      const double a = std::norm(v);
      if (a == 0.0) return;
      const int L2 = static_cast<int>(key >> 58);
      int deg = 0;
      for (int i = 0; i < L2; ++i) deg += alg.degree(static_cast<int>((key >> (bits * i)) & lmask));
      deg -= L2 - 1;
      const int dl = L2 - L, dd = deg - deg0;
      double* slot = nullptr;
      if (dl == 0 && dd == 2) slot = &rep.d2;
      else if (dl == -2 && dd == 2) slot = &rep.b2;
      else if (dl == 2 && dd == -2) slot = &rep.B2;
      else if (dl == -1 && dd == 2) slot = &rep.db;
      else if (dl == 1 && dd == 0) slot = &rep.dB;
      else if (dl == 0 && dd == 0) slot = &rep.bB;
      else slot = &rep.d2;  // cannot happen for a graded algebra; count it anyway
      *slot = std::max(*slot, a);
    });
    ++rep.words;
  }
  for (double* r : {&rep.d2, &rep.b2, &rep.B2, &rep.db, &rep.dB, &rep.bB}) *r = std::sqrt(*r);
  return rep;
}

namespace {

struct WindowBuilder {
  AlgebraPtr alg;
  int window_N;
  std::vector<Word> index;
  std::unordered_map<Word, int, WordHash> position;
  std::vector<std::vector<std::pair<int, cplx>>> columns;
  long leaked_terms = 0;
  double leaked_mass = 0.0;

  void add(const Chain& g) {
    std::vector<std::pair<int, cplx>> col;
    for (const auto& t : g.terms()) {
      if (word_N(t.word, ChainKind::cyclic) > window_N) {
        ++leaked_terms;
        leaked_mass += std::abs(t.coeff);
        continue;
      }
      auto it = position.find(t.word);
      int r;
      if (it == position.end()) {
        r = static_cast<int>(index.size());
        position.emplace(t.word, r);
        index.push_back(t.word);
      } else {
        r = it->second;
      }
      col.push_back({r, t.coeff});
    }
    if (!col.empty()) columns.push_back(std::move(col));
  }

  Subspace finish(double rank_tol) {
    Subspace sub;
    sub.alg = alg;
    sub.window_N = window_N;
    sub.index = index;
    sub.position = position;
    sub.generators = static_cast<long>(columns.size());
    sub.leaked_terms = leaked_terms;
    sub.leaked_mass = leaked_mass;
    const Eigen::Index rows = static_cast<Eigen::Index>(index.size());
    if (columns.empty() || rows == 0) {
      sub.basis = Mat::Zero(rows, 0);
      sub.warnings.push_back("truncation window contains no generator image");
      return sub;
    }
    Mat G = Mat::Zero(rows, static_cast<Eigen::Index>(columns.size()));
    for (size_t j = 0; j < columns.size(); ++j)
      for (auto& [r, v] : columns[j]) G(r, static_cast<Eigen::Index>(j)) += v;
    Eigen::ColPivHouseholderQR<Mat> qr(G);
    qr.setThreshold(rank_tol);
    const Eigen::Index rank = qr.rank();
    Mat Q = qr.householderQ() * Mat::Identity(rows, rank);
    sub.basis = Q;
    return sub;
  }
};

}  // namespace

Subspace chen_subspace(const AlgebraPtr& alg_T, const ChenOptions& opt) {
  if (!alg_T->is_extension()) throw Error("chen_subspace: algebra must be an acyclic extension");
  const DgAlgebra& A = *alg_T;
  WindowBuilder wb{alg_T, opt.window_N < 0 ? opt.N_max + 1 : opt.window_N, {}, {}, {}, 0, 0.0};
  std::vector<int> fbasis;
  for (int i = 0; i < A.base_dim(); ++i)
    if (A.degree(i) == 0) fbasis.push_back(i);
  std::vector<std::string> labels;
  auto push = [&](const Chain& g, const std::string& label) {
    wb.add(g);
    labels.push_back(label);
    if (opt.close_total) {
      wb.add(d_total(g));
      labels.push_back("Dtot " + label);
    }
    if (opt.close_each) {
      wb.add(d_cyclic(g));
      wb.add(b_cyclic(g));
      wb.add(B_connes(g));
      labels.push_back("d " + label);
      labels.push_back("b " + label);
      labels.push_back("B " + label);
    }
  };
  for (const Word& w : basis_words(A, ChainKind::cyclic, 1, opt.N_max + 1)) {
    Chain c(alg_T, ChainKind::cyclic);
    c.add(w, 1.0);
    const int N = w.size() - 1;
    push(chen_S_plus_one(c), "S+1 " + w.str());
    push(chen_R(c), "R " + w.str());
    for (int fi : fbasis)
      for (int i = 0; i <= N; ++i) {
        push(chen_Si(A.basis(fi), i, c), "S_" + std::to_string(i) + "^" + std::to_string(fi) + " " + w.str());
        push(chen_Ti(A.basis(fi), i, c), "T_" + std::to_string(i) + "^" + std::to_string(fi) + " " + w.str());
      }
  }
  Subspace sub = wb.finish(opt.rank_tol);
  sub.labels = std::move(labels);
  return sub;
}

Subspace span_subspace(const AlgebraPtr& alg, const std::vector<Chain>& gens,
                       const std::vector<std::string>& labels, int window_N, double rank_tol) {
  WindowBuilder wb{alg, window_N, {}, {}, {}, 0, 0.0};
  for (const auto& g : gens) wb.add(g);
  Subspace sub = wb.finish(rank_tol);
  sub.labels = labels;
  return sub;
}

double chen_residual(const Chain& c, const Subspace& sub) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(sub.index.size()));
  double outside = 0.0;
  std::vector<std::string> offending;
  for (const auto& t : c.terms()) {
    if (word_N(t.word, ChainKind::cyclic) > sub.window_N) {
      if (offending.size() < 8) offending.push_back(t.word.str());
      continue;
    }
    auto it = sub.position.find(t.word);
    if (it == sub.position.end())
      outside += std::norm(t.coeff);
    else
      v(it->second) += t.coeff;
  }
  if (!offending.empty()) {
    std::string msg = "chen_residual: chain leaves the truncation window:";
    for (const auto& s : offending) msg += " " + s;
    throw Error(msg);
  }
  double inside = 0.0;
  if (v.size()) {
    Vec r = v - sub.basis * (sub.basis.adjoint() * v);
    inside = r.squaredNorm();
  }
  return std::sqrt(inside + outside);
}

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

SeminormBound entire_bound(const Chain& c, const std::vector<double>& weights) {
  SeminormBound b;
  b.seminorm_id = weights.empty() ? "nu=max|coeff|" : "nu=weighted max|coeff|";
  for (const auto& t : c.terms()) {
    double p = std::abs(t.coeff);
    for (int i = 0; i < t.word.size(); ++i) p *= weights.empty() ? 1.0 : weights[t.word[i]];
    b.value += p / factorial(word_N(t.word, c.kind()) / 2);
  }
  return b;
}

double entire_bound_word(const DgAlgebra& alg, const ElementWord& w) {
  double p = 1.0;
  for (const auto& e : w) p *= alg.nu(e);
  const int N = static_cast<int>(w.size()) - 1;
  return p / factorial(std::max(N, 0) / 2);
}

Mat BarCochain::eval(const Chain& c) const {
  Mat out = Mat::Zero(hdim_, hdim_);
  for (const auto& t : c.terms()) out += t.coeff * fn_(t.word);
  return out;
}

BarCochain bar_cochain_product(const AlgebraPtr& alg, const BarCochain& l1, const BarCochain& l2) {
  if (l1.hdim() != l2.hdim()) throw Error("bar_cochain_product: Hilbert space mismatch");
  const int p2 = l2.parity();
  return BarCochain(l1.hdim(), (l1.parity() + l2.parity()) % 2,
                    [alg, l1, l2, p2](const Word& w) {
                      const int L = w.size();
                      int n[kMaxLetters + 1];
                      bar_n(*alg, w.data(), L, n);
                      Mat out = Mat::Zero(l1.hdim(), l1.hdim());
                      for (int k = 0; k <= L; ++k) {
                        Word a(w.data(), k), b(w.data() + k, L - k);
                        out += sign_of(static_cast<long>(p2) * n[k]) * (l1(a) * l2(b));
                      }
                      return out;
                    });
}

BarCochain bar_delta(const AlgebraPtr& alg, const BarCochain& l, bool reduce_in) {
  return BarCochain(l.hdim(), (l.parity() + 1) % 2, [alg, l, reduce_in](const Word& w) {
    Chain c(alg, ChainKind::bar);
    c.add(w, 1.0);
    Chain x = d_bar(c, reduce_in) + b_prime(c, reduce_in);
    return Mat(-sign_of(l.parity()) * l.eval(x));
  });
}

BarCochain bar_unit(int hdim) {
  return BarCochain(hdim, 0, [hdim](const Word& w) {
    return w.size() == 0 ? Mat(Mat::Identity(hdim, hdim)) : Mat(Mat::Zero(hdim, hdim));
  });
}

cplx dual_eval(const std::function<cplx(const Chain&)>& l, int l_parity, const ChainOp& X,
               int X_parity, const Chain& c) {
  if (l_parity < 0 || X_parity < 0) throw Error("dual_eval: undeclared parity");
  return sign_of(static_cast<long>(l_parity) * X_parity) * l(X(c));
}

Mat dual_eval(const BarCochain& l, const ChainOp& X, int X_parity, const Chain& c) {
  if (X_parity < 0) throw Error("dual_eval: undeclared parity");
  return sign_of(static_cast<long>(l.parity()) * X_parity) * l.eval(X(c));
}

}  // namespace chernlab
