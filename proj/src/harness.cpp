// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#include "chernlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "chernlab/fixtures.hpp"

namespace chernlab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class T>
T param(const Json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError(std::string("fixture parameter '") + key + "' has the wrong type");
  }
}

void require_params(const std::string& name, const Json& p, const std::set<std::string>& allowed) {
  if (!p.is_object()) throw ConfigError(name + ": params must be an object");
  for (auto it = p.begin(); it != p.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(name + ": unknown parameter '" + it.key() + "'");
}

// Live fixture; odd modules also carry their double.
struct Built {
  std::string name, label, hash;
  std::uint64_t seed = 0;
  Json params;
  std::optional<CqModule> cq;
  std::optional<OddModule> odd;
  std::optional<MatrixElement> g;  // discrete circle only

  const CqModule& module() const { return *cq; }
  bool strong() const { return !cq->weak; }
};

const std::set<std::string> kFixtureNames = {"random_weak_cq", "exterior_strong", "discrete_circle",
                                             "getzler_trivial"};

Json circle_g_params(const Json& p) { return p.contains("g") ? p.at("g") : Json::object(); }

MatrixElement make_circle_g(const DgAlgebra& A, int n, const Json& gp) {
  require_params("discrete_circle.g", gp, {"m", "seed", "eps"});
  const int m = param(gp, "m", 1);
  if (m < 1 || m > 4) throw ConfigError("discrete_circle.g: m must be in 1..4");
  return fixture_circle_g(A, n, m, param<std::uint64_t>(gp, "seed", 3), param(gp, "eps", 0.07));
}

Json instance_json(const std::string& name, const Json& params, std::uint64_t seed, const Built& b) {
  Json j = b.odd ? to_json(*b.odd) : to_json(*b.cq);
  j["generator"] = {{"name", name}, {"params", params}, {"seed", seed}};
  return j;
}

Built build_fixture(const std::string& name, const Json& params, std::uint64_t seed) {
  Built b;
  b.name = name;
  b.seed = seed;
  b.params = params;
  if (name == "random_weak_cq") {
    require_params(name, params, {"dim", "q", "algebra"});
    const std::string alg = param<std::string>(params, "algebra", "discrete_circle_2");
    AlgebraPtr A;
    if (alg == "discrete_circle_2")
      A = algebra_discrete_circle(2);
    else if (alg == "exterior_2_twisted")
      A = algebra_exterior(2, true);
    else
      throw ConfigError("random_weak_cq: algebra must be discrete_circle_2 or exterior_2_twisted");
    b.cq = fixture_random_weak_cq(param(params, "dim", 6), param(params, "q", 1), seed, A);
  } else if (name == "exterior_strong") {
    require_params(name, params, {"k", "twisted", "q", "mult"});
    b.cq = fixture_exterior_strong(param(params, "k", 2), param(params, "twisted", true),
                                   param(params, "q", 0), param(params, "mult", 2), seed);
  } else if (name == "discrete_circle") {
    require_params(name, params,
                   {"n", "hop", "onsite", "g", "N_max", "chg_N_max", "s_nodes", "tail_tol"});
    const int n = param(params, "n", 6);
    b.odd = fixture_discrete_circle(n, seed, param(params, "hop", 0.8), param(params, "onsite", 0.5));
    b.cq = double_odd(*b.odd);
    b.g = make_circle_g(*b.odd->alg, n, circle_g_params(params));
  } else if (name == "getzler_trivial") {
    require_params(name, params, {"dim", "alg"});
    if (param<std::string>(params, "alg", "Mat_2(C)") != "Mat_2(C)")
      throw ConfigError("getzler_trivial: only alg = Mat_2(C) is available");
    b.odd = fixture_getzler_trivial(param(params, "dim", 4), seed);
    b.cq = double_odd(*b.odd);
  } else {
    throw ConfigError("unknown fixture generator '" + name + "'");
  }
  const std::string dumped = dump_json(instance_json(name, params, seed, b), -1);
  b.hash = hash_bytes(dumped.data(), dumped.size());
  return b;
}

// ---------------------------------------------------------------------------
// Checks

struct Ctx {
  const SuiteConfig* cfg;
  const Built* fx;
  std::string group;
  std::vector<Json>* out;
  std::uint64_t seed;

  double tol(const std::string& k) const { return cfg->tol.at(k); }
  int budget(const std::string& k) const { return cfg->budget.at(k); }

  // residual <= tol, or residual >= tol for "ge" checks
  void add(const std::string& name, const std::string& anchor, const std::string& formula,
           double residual, const std::string& tol_key, bool ge = false) const {
    const double t = tol(tol_key);
    const bool pass = std::isfinite(residual) && (ge ? residual >= t : residual <= t);
    Json c = {{"id", group + "/" + fx->label + "/" + name},
              {"group", group},
              {"fixture", fx->label},
              {"anchor", anchor},
              {"formula", formula},
              {"inputs", {{"fixture_hash", fx->hash}, {"seed", seed}}},
              {"residual", std::isfinite(residual) ? Json(residual) : Json(nullptr)},
              {"tolerance", t},
              {"tolerance_key", tol_key},
              {"comparison", ge ? ">=" : "<="},
              {"verdict", pass ? "pass" : "fail"}};
    out->push_back(std::move(c));
  }
  void add_report(const std::string& prefix, const std::string& anchor, const ValidationReport& r,
                  const std::string& tol_key) const {
    for (const auto& it : r.items) {
      std::string key = it.name;
      std::replace(key.begin(), key.end(), ' ', '_');
      add(prefix + "." + key, anchor, it.name, it.residual, tol_key);
    }
  }
};

const char* kAnchorDga = "graded Leibniz rule";
const char* kAnchorExt = "adjoining the formal variable";
const char* kAnchorMat = "Maurer-Cartan form";
const char* kAnchorMC = "The Maurer-Cartan form satisfies";
const char* kAnchorModule = "$[Q, \\mathbf{c}(f)] = \\mathbf{c}(df)$";
const char* kAnchorClifford = "complex Clifford algebra";
const char* kAnchorDouble = "Let $\\mathcal{C}_1$ act on $\\tilde{\\HH}$";
const char* kAnchorAxioms = "pairwise anticommuting differentials";
const char* kAnchorLeibniz = "\\delta fulfills the graded Leibniz rule";
const char* kAnchorSimplex = "is the standard simplex";
const char* kAnchorUnit = "exploiting the semigroup property together with integration by parts";
const char* kAnchorSplit = "For suitable operators";
const char* kAnchorCyclic = "the following cyclic property";
const char* kAnchorCoclosed = "The Chern character is coclosed";
const char* kAnchorChen = "vanishes on the subcomplex";
const char* kAnchorGetzler = "essentially coincides with the odd Chern character";
const char* kAnchorEstimate = "well-defined and trace-class for all";
const char* kAnchorTransgression = "The following transgression formula holds";
const char* kAnchorBianchi = "Bianchi psi";
const char* kAnchorChG = "in the Chen normalized entire complex";
const char* kAnchorChGDef = "given by the infinite cyclic chain";
const char* kAnchorPerturbation = "given the perturbation series";
const char* kAnchorResum = "The following identity holds";
const char* kAnchorSf = "is precisely the spectral flow";
const char* kAnchorPairing = "Relating the spectral flow to the pairing";
const char* kAnchorSemigroup = "generates a strongly continuous semigroup";

void group_algebra(const Ctx& cx) {
  const CqModule& M = cx.fx->module();
  const AlgebraPtr& A = M.alg;
  cx.add_report("dga", kAnchorDga, dga_validate(*A, cx.tol("alg")), "alg");
  cx.add_report("extension", kAnchorExt, dga_validate(*acyclic_extension(*A), cx.tol("alg")), "alg");
  cx.add_report("mat_lift", kAnchorMat, dga_validate(*mat_lift(*A, 2), cx.tol("alg")), "alg");
  cx.add_report("clifford", kAnchorClifford, clifford_validate(M.cm, cx.tol("module")), "module");
  if (cx.fx->odd) {
    cx.add_report("odd_module", kAnchorModule, odd_module_validate(*cx.fx->odd, cx.tol("module")), "module");
    cx.add_report("double", kAnchorDouble, module_validate(M, cx.tol("module")), "module");
  } else {
    cx.add_report("module", kAnchorModule, module_validate(M, cx.tol("module")), "module");
  }
  cx.add_report("module_extension", kAnchorExt, module_validate(acyclic_extend_module(M), cx.tol("module")),
                "module");
  if (cx.fx->g) {
    const auto mc = maurer_cartan(*A, *cx.fx->g);
    cx.add("maurer_cartan.flat", kAnchorMC, "d omega + omega^2 = 0", mc.mc_residual, "alg");
    cx.add("maurer_cartan.inverse", kAnchorMC, "d g^-1 = -g^-1 dg g^-1", mc.inverse_residual, "alg");
  }
}

// Longest word length whose basis word count stays within the budget.
int letters_within(const DgAlgebra& A, int cap, long max_words) {
  int L = 1;
  double count = A.dim();
  while (L < cap) {
    count *= std::max(1, A.dim() - 1);
    if (count > static_cast<double>(max_words)) break;
    ++L;
  }
  return L;
}

BarCochain random_cochain(int hdim, int parity, int max_arity, std::uint64_t salt) {
  return BarCochain(hdim, parity, [=](const Word& w) {
    if (w.size() > max_arity) return Mat(Mat::Zero(hdim, hdim));
    Rng rng(std::hash<std::string>()(w.letters) ^ salt);
    return rng.matrix(hdim, hdim);
  });
}

Word random_any_word(const DgAlgebra& A, Rng& rng, int L) {
  Word w;
  for (int i = 0; i < L; ++i) w.letters.push_back(static_cast<char>(rng.integer(0, A.dim() - 1)));
  return w;
}

void group_complexes(const Ctx& cx) {
  const AlgebraPtr& A = cx.fx->module().alg;
  const int cap = cx.budget("complex_max_letters");
  const long max_words = cx.budget("complex_max_words");
  for (const auto& [tag, alg] : {std::pair<std::string, AlgebraPtr>{"base", A}, {"extension", acyclic_extension(*A)}}) {
    const int L = letters_within(*alg, cap, max_words);
    const auto r = complex_axiom_check(*alg, L);
    const std::string p = "axioms." + tag + ".L" + std::to_string(L);
    cx.add(p + ".d2", kAnchorAxioms, "d^2 = 0 on all basis words", r.d2, "complex");
    cx.add(p + ".b2", kAnchorAxioms, "b^2 = 0 on all basis words", r.b2, "complex");
    cx.add(p + ".B2", kAnchorAxioms, "B^2 = 0 on all basis words", r.B2, "complex");
    cx.add(p + ".db", kAnchorAxioms, "db + bd = 0 on all basis words", r.db, "complex");
    cx.add(p + ".dB", kAnchorAxioms, "dB + Bd = 0 on all basis words", r.dB, "complex");
    cx.add(p + ".bB", kAnchorAxioms, "bB + Bb = 0 on all basis words", r.bB, "complex");
  }
  Rng rng(cx.seed);
  const int pairs = cx.budget("leibniz_pairs");
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const int p1 = rng.integer(0, 1), p2 = rng.integer(0, 1);
    const std::uint64_t s1 = rng.engine()(), s2 = rng.engine()();
    BarCochain l1 = random_cochain(3, p1, 3, s1), l2 = random_cochain(3, p2, 3, s2);
    BarCochain lhs = bar_delta(A, bar_cochain_product(A, l1, l2));
    BarCochain r1 = bar_cochain_product(A, bar_delta(A, l1), l2);
    BarCochain r2 = bar_cochain_product(A, l1, bar_delta(A, l2));
    for (int k = 0; k < 3; ++k) {
      const Word w = random_any_word(*A, rng, rng.integer(0, 4));
      const Mat diff = lhs(w) - r1(w) - sign_of(p1) * r2(w);
      worst = std::max(worst, max_abs(diff));
    }
  }
  cx.add("delta_leibniz", kAnchorLeibniz, "delta(l1 l2) = (delta l1) l2 + (-1)^|l1| l1 delta l2", worst,
         "leibniz");
}

double rel(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

Mat random_equivariant(const CliffordModule& cm, Rng& rng, int p) {
  Mat x = equivariant_project(cm, rng.matrix(cm.dim(), cm.dim()));
  return p == 0 ? cm.H.even_part(x) : cm.H.odd_part(x);
}

void group_brackets(const Ctx& cx) {
  const CqModule& M = cx.fx->module();
  const int n = M.dim();
  const Mat H = M.Q * M.Q;
  Rng rng(cx.seed);
  const int count = cx.budget("bracket_instances");
  const int max_N = n <= 8 ? 4 : 3;
  double oracle = 0, unit_sum = 0, unit_weighted = 0, split = 0;
  for (int t = 0; t < count; ++t) {
    const int N = rng.integer(0, max_N);
    std::vector<Mat> a;
    for (int i = 0; i < N; ++i) a.push_back(rng.matrix(n, n));
    const int nodes = N <= 2 ? 64 : N == 3 ? 32 : 16;
    oracle = std::max(oracle, rel(heat_bracket(H, a), bracket_oracle(H, a, nodes)));
    if (N <= 3) {
      const auto u = bracket_insert_unit(H, a, rng.integer(0, N));
      unit_sum = std::max(unit_sum, u.sum_residual);
      unit_weighted = std::max(unit_weighted, u.weighted_residual);
    }
    if (N >= 1 && N <= 3) {
      const auto s = bracket_split(H, a, rng.matrix(n, n), rng.integer(1, N), N <= 2 ? 64 : 24);
      split = std::max(split, s.residual);
    }
  }
  cx.add("heat_vs_oracle", kAnchorSimplex, "heat_bracket = simplex quadrature oracle (relative)", oracle,
         "bracket");
  cx.add("insert_unit.sum", kAnchorUnit, "sum_j {..,1_j,..} = {..} (relative)", unit_sum, "bracket");
  cx.add("insert_unit.weighted", kAnchorUnit, "{..,1_j,..} = gap-weighted integral (relative)", unit_weighted,
         "bracket");
  cx.add("split", kAnchorSplit, "bracket with B inserted = split integral (relative)", split, "bracket");

  double comm = 0, cyclic = 0;
  for (int t = 0; t < count; ++t) {
    const int pa = rng.integer(0, 1), pb = rng.integer(0, 1);
    const Mat a = random_equivariant(M.cm, rng, pa), b = random_equivariant(M.cm, rng, pb);
    const Mat sc = M.cm.H.supercommutator(a, pa, b, pb);
    comm = std::max(comm, std::abs(cstr(M.cm, sc)) / std::max(1.0, a.norm() * b.norm()));
    std::vector<Mat> ops;
    const int N = rng.integer(1, 3);
    for (int i = 0; i < N; ++i) ops.push_back(random_equivariant(M.cm, rng, rng.integer(0, 1)));
    const auto r = cstr_cyclic_sum(M.cm, H, ops);
    cyclic = std::max(cyclic, r.residual / std::max(1.0, r.scale));
  }
  cx.add("cstr_supercommutator", kAnchorCyclic, "CStr([A, B]) = 0 for equivariant A, B", comm, "cstr");
  cx.add("cstr_cyclic_sum", kAnchorCyclic, "cyclic sum property of CStr over brackets", cyclic, "cstr");
}

void group_chern(const Ctx& cx) {
  const CqModule& M = cx.fx->module();
  Rng rng(cx.seed);
  const int words = cx.budget("words");
  const CqModule MT = acyclic_extend_module(M);
  for (const auto& [tag, mod] : {std::pair<std::string, const CqModule*>{"base", &M}, {"extension", &MT}}) {
    ChernEngine E(*mod);
    double worst = 0;
    for (int t = 0; t < words; ++t) {
      const Word w = random_cyclic_word(*mod->alg, rng, rng.integer(0, 3));
      const auto c = coclosed_residual(E, w);
      worst = std::max(worst, std::abs(c.value) / std::max(1.0, c.scale));
    }
    cx.add("coclosed." + tag, kAnchorCoclosed, "(d + b - B)^dual Ch_M = 0 (relative to scale)", worst,
           "coclosed");
  }
  if (cx.fx->strong()) {
    const auto rep = chen_vanish(M, cx.budget("chen_words"), 2, rng);
    for (const auto& f : rep.families)
      cx.add("chen_vanish." + f.family, kAnchorChen, "Ch_{M_T} vanishes on the image of " + f.family,
             f.max_value / std::max(1.0, f.max_scale), "chen");
  }
  if (cx.fx->name == "getzler_trivial") {
    ChernEngine E(M);
    double worst = 0, even = 0;
    for (int t = 0; t < words; ++t) {
      const Word w = random_cyclic_word(*M.alg, rng, rng.integer(0, 5));
      const cplx g = getzler_closed_form(*cx.fx->odd, w);
      worst = std::max(worst, std::abs(g - E.chern(w)));
      if ((w.size() - 1) % 2 == 0) even = std::max(even, std::abs(E.chern(w)));
    }
    cx.add("getzler.agreement", kAnchorGetzler, "Ch of the doubled module = odd JLO integral", worst, "getzler");
    cx.add("getzler.even_vanish", kAnchorGetzler, "Ch of the doubled module vanishes for even N", even,
           "getzler");
  }
  const auto nu = calibrate_seminorm(MT);
  double ratio = 0;
  for (double T : {0.25, 1.0, 4.0}) {
    ChernEngine E(MT, T);
    for (int t = 0; t < words; ++t) {
      const Word w = random_bar_word(*MT.alg, rng, rng.integer(0, 6));
      ratio = std::max(ratio, trace_norm(E.phi(w)) / fundamental_bound(MT, nu, T, w));
    }
  }
  cx.add("fundamental_estimate", kAnchorEstimate, "|Phi_T(w)|_1 / calibrated bound", ratio, "estimate_ratio");
}

Homotopy fixture_homotopy(const Built& fx, Rng& rng) {
  if (fx.odd) {
    const int n = param(fx.params, "n", 6);
    const Mat V = circle_onsite_perturbation(n, rng.engine()(), 0.5);
    const int d = fx.odd->dim();
    Mat Vt = Mat::Zero(2 * d, 2 * d);
    Vt.block(0, d, d, d) = V;
    Vt.block(d, 0, d, d) = V;
    return linear_homotopy(fx.module(), Vt);
  }
  return linear_homotopy(fx.module(), random_odd_equivariant_hermitian(fx.module().cm, rng, 0.5));
}

void group_transgression(const Ctx& cx) {
  // homotopies of strong modules: exterior fixtures and the discrete circle
  if (!cx.fx->strong()) return;
  Rng rng(cx.seed);
  const CqModule& M = cx.fx->module();
  const Homotopy h = fixture_homotopy(*cx.fx, rng);
  const AlgebraPtr T = acyclic_extension(*M.alg);
  const Homotopy hT = extend_homotopy(h, T);
  std::vector<Word> words;
  for (int t = 0; t < cx.budget("transgression_words"); ++t)
    words.push_back(random_cyclic_word(*T, rng, rng.integer(0, 2)));
  const auto r = transgression_check(hT, words, 16);
  cx.add("transgression", kAnchorTransgression, "Ch^1 - Ch^0 = D_tot^dual CS", r.max_residual, "transgression");
  double worst = 0;
  for (int t = 0; t < cx.budget("bianchi_words"); ++t) {
    const Word b = random_bar_word(*M.alg, rng, rng.integer(0, 3));
    worst = std::max(worst, bianchi_check(h, rng.uniform(0.1, 0.9), b).residual);
  }
  cx.add("bianchi", kAnchorBianchi, "d/ds Phi = delta Psi + [F, Psi] against finite differences", worst,
         "bianchi");
}

void group_pairing(const Ctx& cx) {
  if (cx.fx->name != "discrete_circle") return;
  const OddModule& M = *cx.fx->odd;
  const MatrixElement& g = *cx.fx->g;
  const Json& p = cx.fx->params;
  const int chg_N = param(p, "chg_N_max", 0);
  if (chg_N > 0) {
    const auto ch = ch_g(M.alg, g, chg_N);
    const auto rep = ch_g_closed(ch);
    for (const auto& l : rep.levels) {
      const std::string N = std::to_string(l.N);
      cx.add("chg.closed.N" + N, kAnchorChG, "Chen residual of (D_tot Ch(g))_N + lambda_N - lambda_{N+1}",
             l.chen_residual, "chg");
      cx.add("chg.db_identity.N" + N, kAnchorChGDef, "((d + b) Ch(g))_N = Tr(1, omega^N)", l.db_identity,
             "chg");
      cx.add("chg.B_part.N" + N, kAnchorChGDef, "(B Ch(g))_N = 0", l.B_part, "chg");
      cx.add("chg.lambda_rate.N" + N, kAnchorChG, "entire bound of lambda_{N+1} / floor-factorial prediction - 1",
             std::abs(l.lambda_bound - l.lambda_predicted) / std::max(1e-300, l.lambda_predicted), "chg_rate");
    }
  }
  const int N_max = param(p, "N_max", 10);
  if (N_max <= 0) return;
  const auto rep = pairing(M, g, N_max, param(p, "s_nodes", 0), param(p, "tail_tol", cx.tol("tail")));
  cx.add("pairing.sf_agreement", kAnchorSf, "|<Ch, Ch(g)> - kPairingSign * sf integral|", rep.sf_residual,
         "pairing");
  cx.add("pairing.tail", kAnchorPairing, "certified tail beyond N_max", rep.tail_bound, "tail");
  for (const auto& t : rep.terms) {
    const std::string N = std::to_string(t.N);
    cx.add("pairing.term.N" + N, kAnchorPairing, "|pairing_N - kPairingSign * sf_N|", t.residual, "term");
    cx.add("pairing.term_nonzero.N" + N, kAnchorPairing, "|pairing_N| is nonzero", std::abs(t.pairing_term),
           "nonzero", true);
  }
  cx.add("pairing.pointwise", kAnchorPairing, "sum_N sf_N(s) = Tr(c(omega) e^{-Q_s^2}) at s = 1/2",
         rep.pointwise_residual, "pairing");
  cx.add("pairing.curvature_B", kAnchorPairing, "curvature of the B letter vanishes", rep.curvature_B, "module");
  cx.add("pairing.curvature_X", kAnchorPairing, "F(A) = X_s", rep.curvature_X, "module");
  cx.add("pairing.reshuffle", kAnchorPairing, "pairing through the reshuffled double", rep.reshuffle_residual,
         "module");
  cx.add("sf.methods", kAnchorSf, "series and quadrature values of the sf integral agree",
         rep.sf.methods_residual, "pairing");
  cx.add("sf.oracle", kAnchorSf, "sf integral = eigenvalue (erf) oracle", rep.sf.oracle_residual, "pairing");

  const auto tf = twisted_family(M, g);
  cx.add("family.similarity", kAnchorSemigroup, "Q_{g,1} = c(g^-1) Q c(g)", tf.similarity, "module");
  cx.add("family.square", kAnchorSemigroup, "Q_s^2 = Q^2 + X_s", tf.square_identity, "module");
  int M_max = 4;
  const double heat = std::real(expm(-(tf.Qm * tf.Qm)).trace());
  const double x = op_norm(tf.X(0.5));
  while (M_max < 40 && dyson_tail_bound(heat, x, M_max) > 1e-3 * cx.tol("perturbation")) ++M_max;
  const auto ps = perturbation_series(tf, 0.5, 1.0, M_max);
  cx.add("perturbation", kAnchorPerturbation, "Dyson series = e^{-Q_s^2} (trace norm), M_max = " +
         std::to_string(M_max), ps.error, "perturbation");
  const auto pr = partition_resum_check(tf, 0.6, 1.0, 3);
  cx.add("partition_resum", kAnchorResum, "block-filtered partition resummation at M_max = 3", pr.residual,
         "resum");
}

using GroupFn = void (*)(const Ctx&);

const std::vector<std::pair<std::string, GroupFn>>& group_table() {
  static const std::vector<std::pair<std::string, GroupFn>> t = {
      {"algebra", group_algebra},   {"complexes", group_complexes},         {"brackets", group_brackets},
      {"chern", group_chern},       {"transgression", group_transgression}, {"pairing", group_pairing}};
  return t;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdull;
  x ^= x >> 33;
  return x;
}

Json environment() {
  std::ostringstream cc;
#if defined(__clang__)
  cc << "clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
  cc << "gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#else
  cc << "unknown";
#endif
  return {{"chernlab", kVersion},
          {"compiler", cc.str()},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"cplusplus", static_cast<long>(__cplusplus)},
          {"double_digits", 17}};
}

}  // namespace

// ---------------------------------------------------------------------------

Json gen_fixture(const std::string& name, const Json& params, std::uint64_t seed) {
  const Json p = params.is_null() ? Json::object() : params;
  if (name == "circle_g") {
    require_params(name, p, {"n", "m", "eps"});
    const int n = param(p, "n", 6);
    if (n < 2) throw ConfigError("circle_g: n must be at least 2");
    auto A = algebra_discrete_circle(n);
    Json gp = {{"m", param(p, "m", 1)}, {"seed", seed}, {"eps", param(p, "eps", 0.07)}};
    Json j = to_json(*A, make_circle_g(*A, n, gp));
    j["generator"] = {{"name", name}, {"params", p}, {"seed", seed}};
    return j;
  }
  Built b = build_fixture(name, p, seed);
  return instance_json(name, p, seed, b);
}

Json validate_instance(const Json& j) {
  if (!j.is_object()) throw ConfigError("instance must be a JSON object");
  const std::string kind = j.value("kind", std::string(j.contains("mul") ? "algebra" : ""));
  ValidationReport rep;
  auto merge = [&](const std::string& prefix, const ValidationReport& r) {
    for (const auto& it : r.items) rep.items.push_back({prefix + ": " + it.name, it.residual, it.tol, it.pass});
  };
  if (kind == "algebra") {
    merge("algebra", dga_validate(*algebra_from_json(j)));
  } else if (kind == "cq_module") {
    const CqModule M = cq_module_from_json(j);
    merge("algebra", dga_validate(*M.alg));
    merge("module", module_validate(M));
  } else if (kind == "odd_module") {
    const OddModule M = odd_module_from_json(j);
    merge("algebra", dga_validate(*M.alg));
    merge("module", odd_module_validate(M));
  } else if (kind == "matrix_element") {
    const AlgebraPtr A = algebra_from_json(j.at("algebra"));
    merge("algebra", dga_validate(*A));
    const MatrixElement x = matrix_element_from_json(*A, j);
    const auto mc = maurer_cartan(*A, x);
    rep.add("maurer_cartan: d omega + omega^2", mc.mc_residual, kTolAlg);
    rep.add("maurer_cartan: inverse", mc.inverse_residual, kTolAlg);
  } else {
    throw ConfigError("unknown instance kind '" + kind + "'");
  }
  Json items = Json::array();
  for (const auto& it : rep.items)
    items.push_back({{"name", it.name}, {"residual", it.residual}, {"tolerance", it.tol},
                     {"verdict", it.pass ? "pass" : "fail"}});
  return {{"kind", kind}, {"items", items}, {"pass", rep.pass()}};
}

const std::vector<std::string>& suite_groups() {
  static const std::vector<std::string> g = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : group_table()) v.push_back(name);
    return v;
  }();
  return g;
}

std::map<std::string, double> default_tolerances() {
  return {{"alg", 1e-12},          {"module", 1e-12},     {"complex", 1e-12},  {"leibniz", 1e-10},
          {"bracket", 1e-8},       {"cstr", 1e-9},        {"coclosed", 1e-9},  {"chen", 1e-9},
          {"getzler", 1e-9},       {"estimate_ratio", 1}, {"transgression", 1e-6}, {"bianchi", 1e-6},
          {"chg", 1e-8},           {"chg_rate", 1e-9},    {"pairing", 1e-6},   {"term", 1e-7},
          {"tail", 1e-6},          {"nonzero", 1e-14},    {"perturbation", 1e-8}, {"resum", 1e-8}};
}

std::map<std::string, int> default_budget() {
  return {{"words", 30},           {"chen_words", 25},         {"bracket_instances", 20},
          {"leibniz_pairs", 20},   {"complex_max_letters", 6}, {"complex_max_words", 300000},
          {"transgression_words", 10}, {"bianchi_words", 10}};
}

SuiteConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> keys = {"seed", "fixtures", "tolerances", "budget", "groups",
                                             "threads", "timing", "output", "N_max", "quadrature"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) throw ConfigError("config: unknown key '" + it.key() + "'");
  SuiteConfig c;
  c.echo = j;
  try {
    if (!j.contains("seed") || !j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0)
      throw ConfigError("config: a non-negative integer seed is mandatory");
    c.seed = j.at("seed").get<std::uint64_t>();
    c.tol = default_tolerances();
    if (j.contains("tolerances")) {
      for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it) {
        if (!c.tol.count(it.key())) throw ConfigError("config: unknown tolerance '" + it.key() + "'");
        const double v = it.value().get<double>();
        if (!(v >= 0.0)) throw ConfigError("config: tolerance '" + it.key() + "' must be non-negative");
        c.tol[it.key()] = v;
      }
    }
    c.budget = default_budget();
    if (j.contains("budget")) {
      for (auto it = j["budget"].begin(); it != j["budget"].end(); ++it) {
        if (!c.budget.count(it.key())) throw ConfigError("config: unknown budget '" + it.key() + "'");
        const int v = it.value().get<int>();
        if (v < 0) throw ConfigError("config: budget '" + it.key() + "' must be non-negative");
        c.budget[it.key()] = v;
      }
    }
    if (c.budget["complex_max_letters"] < 1) throw ConfigError("config: complex_max_letters must be >= 1");
    auto check_groups = [](const std::vector<std::string>& gs) {
      for (const auto& g : gs)
        if (std::find(suite_groups().begin(), suite_groups().end(), g) == suite_groups().end())
          throw ConfigError("config: unknown group '" + g + "'");
    };
    c.groups = j.value("groups", suite_groups());
    check_groups(c.groups);
    c.threads = j.value("threads", 1);
    if (c.threads < 1) throw ConfigError("config: threads must be >= 1");
    c.timing = j.value("timing", true);
    // N_max and quadrature act as defaults for discrete circle fixtures
    const int N_max = j.value("N_max", 10);
    const int s_nodes = j.contains("quadrature") ? j["quadrature"].value("s_nodes", 0) : 0;
    if (j.contains("output")) {
      c.json_out = j["output"].value("json", std::string());
      c.text_out = j["output"].value("text", std::string());
    }
    std::set<std::string> labels;
    for (const auto& f : j.value("fixtures", Json::array())) {
      FixtureSpec s;
      s.name = f.at("name").get<std::string>();
      if (!kFixtureNames.count(s.name)) throw ConfigError("config: unknown fixture generator '" + s.name + "'");
      if (!f.contains("seed")) throw ConfigError("config: fixture '" + s.name + "' needs a seed");
      s.seed = f.at("seed").get<std::uint64_t>();
      s.params = f.value("params", Json::object());
      if (s.name == "discrete_circle") {
        if (!s.params.contains("N_max")) s.params["N_max"] = N_max;
        if (!s.params.contains("s_nodes") && s_nodes > 0) s.params["s_nodes"] = s_nodes;
      }
      s.groups = f.value("groups", std::vector<std::string>{});
      check_groups(s.groups);
      s.label = f.value("label", s.name + "#" + std::to_string(c.fixtures.size()));
      if (!labels.insert(s.label).second) throw ConfigError("config: duplicate fixture label '" + s.label + "'");
      c.fixtures.push_back(std::move(s));
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

Json run_suite(const SuiteConfig& cfg) {
  const auto& table = group_table();
  std::vector<std::pair<std::string, GroupFn>> selected;
  for (const auto& entry : table)
    if (std::find(cfg.groups.begin(), cfg.groups.end(), entry.first) != cfg.groups.end()) selected.push_back(entry);

  std::vector<Json> results(selected.size());
  auto run_group = [&](size_t gi) {
    const auto t0 = Clock::now();
    const std::string& gname = selected[gi].first;
    std::vector<Json> checks;
    Json errors = Json::array();
    for (size_t fi = 0; fi < cfg.fixtures.size(); ++fi) {
      const FixtureSpec& fs = cfg.fixtures[fi];
      if (!fs.groups.empty() && std::find(fs.groups.begin(), fs.groups.end(), gname) == fs.groups.end()) continue;
      try {
        Built b = build_fixture(fs.name, fs.params, fs.seed);
        b.label = fs.label;
        Ctx cx{&cfg, &b, gname, &checks, mix(mix(cfg.seed, gi + 1), fi + 1)};
        selected[gi].second(cx);
      } catch (const std::exception& e) {
        errors.push_back({{"fixture", fs.label}, {"message", e.what()}});
      }
    }
    Json g = {{"name", gname}, {"status", errors.empty() ? "ok" : "error"}, {"errors", errors},
              {"checks", checks}};
    if (cfg.timing) g["seconds"] = seconds_since(t0);
    results[gi] = std::move(g);
  };
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(selected.size())));
  if (threads == 1) {
    for (size_t gi = 0; gi < selected.size(); ++gi) run_group(gi);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (size_t gi = next++; gi < selected.size(); gi = next++) run_group(gi);
      });
    for (auto& th : pool) th.join();
  }
  long total = 0, passed = 0, errors = 0;
  for (const auto& g : results) {
    errors += static_cast<long>(g["errors"].size());
    for (const auto& c : g["checks"]) {
      ++total;
      passed += c["verdict"] == "pass";
    }
  }
  Json report = {{"version", kVersion},
                 {"config", cfg.echo},
                 {"environment", environment()},
                 {"groups", results},
                 {"summary", {{"checks", total}, {"passed", passed}, {"failed", total - passed}, {"errors", errors}}},
                 {"pass", passed == total && errors == 0}};
  return report;
}

bool report_pass(const Json& report) { return report.value("pass", false); }

std::string report_text(const Json& r) {
  std::ostringstream os;
  os << "chernlab " << r.value("version", std::string("?")) << " suite report\n";
  for (const auto& g : r.at("groups")) {
    long pass = 0, n = 0;
    for (const auto& c : g["checks"]) {
      ++n;
      pass += c["verdict"] == "pass";
    }
    os << "\n[" << g["name"].get<std::string>() << "] " << pass << "/" << n << " pass";
    if (g.contains("seconds")) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " (%.2f s)", g["seconds"].get<double>());
      os << buf;
    }
    os << "\n";
    for (const auto& e : g["errors"])
      os << "  ERROR " << e["fixture"].get<std::string>() << ": " << e["message"].get<std::string>() << "\n";
    for (const auto& c : g["checks"]) {
      char buf[64];
      const double res = c["residual"].is_null() ? NAN : c["residual"].get<double>();
      std::snprintf(buf, sizeof buf, "%.3e %s %.1e", res, c["comparison"].get<std::string>().c_str(),
                    c["tolerance"].get<double>());
      os << "  " << (c["verdict"] == "pass" ? "PASS " : "FAIL ") << c["id"].get<std::string>() << "  " << buf
         << "\n";
    }
  }
  const auto& s = r.at("summary");
  os << "\n" << s["passed"] << "/" << s["checks"] << " checks pass, " << s["errors"] << " group errors: "
     << (report_pass(r) ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string explain(const Json& report, const std::string& id) {
  if (!report.contains("groups")) throw Error("not a suite report");
  for (const auto& g : report["groups"])
    for (const auto& c : g["checks"]) {
      if (c["id"] != id) continue;
      std::ostringstream os;
      os << "id:        " << id << "\n"
         << "anchor:    " << c["anchor"].get<std::string>() << "\n"
         << "formula:   " << c["formula"].get<std::string>() << "\n"
         << "inputs:    fixture " << c["inputs"]["fixture_hash"].get<std::string>() << ", seed "
         << c["inputs"]["seed"] << "\n"
         << "residual:  " << dump_json(c["residual"]) << " " << c["comparison"].get<std::string>() << " "
         << c["tolerance"].dump() << " (" << c["tolerance_key"].get<std::string>() << ")\n"
         << "verdict:   " << c["verdict"].get<std::string>() << "\n";
      return os.str();
    }
  throw Error("unknown check id '" + id + "'");
}

Json pair_report(const Json& module, const Json& gj, const PairOptions& opt) {
  if (module.value("kind", std::string()) != "odd_module") throw ConfigError("pair: module must be an odd_module");
  if (gj.value("kind", std::string()) != "matrix_element") throw ConfigError("pair: g must be a matrix_element");
  const OddModule M = odd_module_from_json(module);
  if (!same_algebra(*M.alg, *algebra_from_json(gj.at("algebra"))))
    throw ConfigError("pair: g is not over the module's algebra");
  const MatrixElement g = matrix_element_from_json(*M.alg, gj);
  PairingReport rep = pairing(M, g, opt.N_max, opt.s_nodes, opt.tail_tol, opt.threads);
  Json terms = Json::array();
  bool pass = rep.sf_residual <= opt.pairing_tol && rep.tail_bound <= opt.tail_tol;
  for (const auto& t : rep.terms) {
    terms.push_back({{"N", t.N}, {"pairing_term", to_json(t.pairing_term)}, {"sf_term", to_json(t.sf_term)},
                     {"residual", t.residual}, {"plus_sign_residual", t.plus_sign_residual}});
    pass = pass && t.residual <= opt.term_tol;
  }
  std::uint64_t seed = 0;
  if (module.contains("generator")) seed = module["generator"].value("seed", std::uint64_t{0});
  return {{"fixture", M.name},
          {"seed", seed},
          {"m", rep.m},
          {"N_used", rep.N_used},
          {"s_nodes", rep.s_nodes},
          {"pairing_sign", kPairingSign},
          {"terms", terms},
          {"totals",
           {{"pairing", to_json(rep.pairing_total)},
            {"sf_terms", to_json(rep.sf_terms_total)},
            {"sf_integral", to_json(rep.sf.direct)},
            {"sf_oracle", rep.sf.oracle}}},
          {"sf_residual", rep.sf_residual},
          {"sf_plus_sign_residual", rep.sf_plus_sign_residual},
          {"tail_bound", rep.tail_bound},
          {"pointwise_residual", rep.pointwise_residual},
          {"getzler_normalized", rep.getzler_normalized},
          {"crossing_sf", rep.crossing_available ? Json(rep.crossing_sf) : Json(nullptr)},
          {"tolerances", {{"pairing", opt.pairing_tol}, {"term", opt.term_tol}, {"tail", opt.tail_tol}}},
          {"verdict", pass ? "pass" : "fail"}};
}

}  // namespace chernlab
