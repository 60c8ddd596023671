#include "explab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "explab/cheeger.hpp"
#include "explab/expansion.hpp"
#include "explab/operators.hpp"
#include "explab/random_models.hpp"
#include "explab/simd.hpp"
#include "explab/warped.hpp"

namespace explab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string set_str(const AtomSet& a) {
  std::string out = "{";
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) out += ",";
    if (i == 8) {
      out += "...";
      break;
    }
    out += std::to_string(a[i]);
  }
  return out + "}";
}

// Worst case accumulator: a check passes when its largest observed violation
// stays at or below its tolerance.
struct Collector {
  std::string name;
  double tolerance = 0.0;
  double worst = -kInf;
  std::string witness = "vacuous";
  bool seen = false;

  Collector(std::string n, double tol) : name(std::move(n)), tolerance(tol) {}

  void offer(double violation, const std::string& w) {
    if (!seen || violation > worst) {
      worst = violation;
      witness = w;
    }
    seen = true;
  }

  CheckResult result() const {
    CheckResult r;
    r.name = name;
    r.pass = !seen || worst <= tolerance;
    r.worst_violation = seen ? std::max(worst, 0.0) : 0.0;
    r.witness = witness;
    return r;
  }
};

struct NamedKernel {
  std::string name;
  MarkovKernel kernel;
  Vec m;
};

struct NamedAction {
  std::string name;
  const FiniteAction* action;
  ActionKernel ak;  // whole space, every symbol
  const Mat* metric;
};

std::vector<int> all_symbols(const FiniteAction& a) {
  std::vector<int> s(a.gens().count());
  for (int i = 0; i < a.gens().count(); ++i) s[i] = i;
  return s;
}

AtomSet all_atoms(int n) {
  AtomSet a(n);
  for (int i = 0; i < n; ++i) a[i] = i;
  return a;
}

AtomSet random_small_support(const Vec& m, std::mt19937_64& rng) {
  double half = m.sum() / 2;
  for (int tries = 0; tries < 200; ++tries) {
    AtomSet a = random_nonempty_subset(static_cast<int>(m.size()), rng);
    double mass = 0;
    for (int i : a) mass += m(i);
    if (mass <= half) return a;
  }
  // Fall back to the lightest atom; its mass never exceeds half the total.
  int best = 0;
  for (int i = 1; i < m.size(); ++i)
    if (m(i) < m(best)) best = i;
  return {best};
}

bool subset_of(const AtomSet& a, const AtomSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool measure_preserving(const FiniteAction& a) {
  for (int s = 0; s < a.gens().count(); ++s)
    for (int x = 0; x < a.size(); ++x)
      if (a.space().weight(a.apply(s, x)) != a.space().weight(x)) return false;
  return true;
}

// All generator words of declared length <= 4: permutation plus total length.
struct Word {
  std::vector<int> perm;
  int length = 0;
  std::string text;
};

std::vector<Word> short_words(const FiniteAction& a, int max_len) {
  int n = a.size();
  Word id;
  id.perm.resize(n);
  for (int i = 0; i < n; ++i) id.perm[i] = i;
  id.text = "e";
  std::vector<Word> frontier{id}, out{id};
  for (int step = 0; step < max_len; ++step) {
    std::vector<Word> next;
    for (const Word& w : frontier) {
      for (int s = 0; s < a.gens().count(); ++s) {
        int l = w.length + a.gens().length(s);
        if (l > max_len || l == w.length) continue;  // skip identity symbols
        Word e;
        e.perm.resize(n);
        for (int x = 0; x < n; ++x) e.perm[x] = a.apply(s, w.perm[x]);
        e.length = l;
        e.text = (w.length ? w.text + "*" : std::string()) + a.gens().symbol(s);
        next.push_back(e);
        out.push_back(next.back());
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

std::optional<Mat> derived_word_metric(const FiniteAction& action) {
  int n = action.size();
  if (n < 2) return std::nullopt;
  auto table = orbit_distance_table(action);
  Mat d(n, n);
  bool positive = false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (table[i][j] < 0) return std::nullopt;
      d(i, j) = table[i][j];
      positive = positive || table[i][j] > 0;
    }
  if (!positive) return std::nullopt;
  return normalize_diameter(std::move(d));
}

VerifyScope builtin_scope(std::uint64_t seed) {
  VerifyScope scope;
  for (const std::string& name : builtin_roster()) {
    Builtin b = make_builtin(name);
    if (b.kernel) scope.kernels.emplace_back(name, *b.kernel);
    if (b.action) {
      scope.actions.emplace_back(name, *b.action);
      if (b.metric) scope.metrics[name] = *b.metric;
    }
    if (b.chain) {
      scope.chains.emplace_back(name, *b.chain);
      for (size_t i = 0; i < b.chain->levels.size(); ++i)
        scope.actions.emplace_back(name + ".level" + std::to_string(i), b.chain->levels[i]);
    }
  }
  std::mt19937_64 rng(seed);
  for (int n : {5, 7})
    scope.kernels.emplace_back("random-kernel:" + std::to_string(n), random_reversible_kernel(n, rng));
  scope.actions.emplace_back("random-action:6", random_weighted_action(6, 1, rng));
  scope.actions.emplace_back("random-action:5", random_weighted_action(5, 2, rng));
  scope.include_refining_family = true;
  return scope;
}

VerifyScope document_scope(const AnyDocument& doc, const std::string& name) {
  VerifyScope scope;
  if (doc.kernel) scope.kernels.emplace_back(name, *doc.kernel);
  if (doc.action) {
    scope.actions.emplace_back(name, doc.action->action);
    if (doc.action->metric)
      scope.metrics[name] = *doc.action->metric;
    else if (auto d = derived_word_metric(doc.action->action))
      scope.metrics[name] = *d;
  }
  if (doc.chain) {
    scope.chains.emplace_back(name, *doc.chain);
    for (size_t i = 0; i < doc.chain->levels.size(); ++i)
      scope.actions.emplace_back(name + ".level" + std::to_string(i), doc.chain->levels[i]);
  }
  return scope;
}

VerifyReport run_verify(const VerifyScope& scope, std::uint64_t seed, const Tolerances& tol) {
  std::mt19937_64 rng(seed);
  VerifyReport report;
  auto push = [&report](const Collector& c) { report.checks.push_back(c.result()); };

  // The kernel universe: declared kernels plus the normalized local kernel of
  // every action over its whole space.
  std::vector<NamedKernel> kernels;
  for (const auto& [name, k] : scope.kernels) kernels.push_back({name, k, k.reversing_or_fail(tol)});
  std::vector<NamedAction> actions;
  for (const auto& [name, a] : scope.actions) {
    NamedAction na{name, &a, build_action_kernel(a, tol), nullptr};
    if (auto it = scope.metrics.find(name); it != scope.metrics.end()) na.metric = &it->second;
    actions.push_back(std::move(na));
  }
  for (const auto& na : actions)
    kernels.push_back({na.name + ".local-kernel", na.ak.kernel, na.ak.tilde_nu});

  // --- kernel layer ---
  {
    Collector c("detailed_balance", tol.detailed_balance);
    for (const auto& nk : kernels) {
      BalanceResidual r = detailed_balance_residual(nk.kernel.transition(), nk.m);
      c.offer(r.value, nk.name + " at (" + std::to_string(r.x) + "," + std::to_string(r.y) + ")");
    }
    push(c);
  }
  {
    Collector c("boundary_complement_symmetry", 1e-10);
    for (const auto& nk : kernels) {
      int n = nk.kernel.size();
      if (n > 12 || n < 2) continue;
      for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        AtomSet a = mask_to_set(mask);
        AtomSet b = mask_to_set(~mask & ((1u << n) - 1));
        double va = boundary_size(nk.kernel, nk.m, a, tol);
        double vb = boundary_size(nk.kernel, nk.m, b, tol);
        c.offer(std::abs(va - vb), nk.name + " A=" + set_str(a));
      }
    }
    push(c);
  }
  {
    Collector c("dirichlet_indicator_equals_boundary", 1e-10);
    for (const auto& nk : kernels) {
      int n = nk.kernel.size();
      if (n > 10 || n < 2) continue;
      for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        AtomSet a = mask_to_set(mask);
        Vec f = Vec::Zero(n);
        for (int i : a) f(i) = 1.0;
        double bd = boundary_size(nk.kernel, nk.m, a, tol);
        for (double p : {1.0, 2.0, 3.0}) {
          double e = dirichlet_energy(nk.kernel, nk.m, f, p, tol);
          c.offer(std::abs(e - bd), nk.name + " A=" + set_str(a) + " p=" + std::to_string(static_cast<int>(p)));
        }
      }
    }
    push(c);
  }
  {
    Collector c("dirichlet_quadratic_identity", 1e-11);
    for (const auto& nk : kernels) {
      int n = nk.kernel.size();
      for (int trial = 0; trial < 100; ++trial) {
        Vec f = random_vector(n, rng);
        double e2 = dirichlet_energy(nk.kernel, nk.m, f, 2.0, tol);
        Vec pf = markov_apply(nk.kernel, f);
        double direct = f.cwiseProduct(nk.m).dot(f) - f.cwiseProduct(nk.m).dot(pf);
        c.offer(std::abs(e2 - direct), nk.name + " trial " + std::to_string(trial));
      }
    }
    push(c);
  }
  {
    Collector sob("sobolev_step", 1e-9);
    Collector dir("dirichlet_step", 1e-9);
    for (const auto& nk : kernels) {
      int n = nk.kernel.size();
      if (n > 12 || n < 2) continue;
      double kappa = cheeger_exact(nk.kernel, nk.m, kEnumerationCap, tol).kappa;
      for (int trial = 0; trial < 20; ++trial) {
        AtomSet a = random_small_support(nk.m, rng);
        Vec g = Vec::Zero(n);
        for (int i : a) g(i) = std::abs(standard_normal(rng));
        double e1 = dirichlet_energy(nk.kernel, nk.m, g, 1.0, tol);
        double e2 = dirichlet_energy(nk.kernel, nk.m, g, 2.0, tol);
        double n1 = nk.m.dot(g.cwiseAbs());
        double n2 = nk.m.dot(g.cwiseProduct(g));
        sob.offer(kappa * n1 - e1, nk.name + " support " + set_str(a));
        dir.offer(kappa * kappa / 2 * n2 - e2, nk.name + " support " + set_str(a));
      }
    }
    push(sob);
    push(dir);
  }
  {
    Collector c("spectral_inclusion", tol.eigen);
    for (const auto& nk : kernels) {
      SpectralReport rep = spectrum(nk.kernel, nk.m, tol);
      double worst = 0;
      for (int i = 0; i < rep.eigenvalues.size(); ++i) worst = std::max(worst, std::abs(rep.eigenvalues(i)) - 1.0);
      c.offer(worst, nk.name);
    }
    push(c);
  }
  {
    Collector c("stationary_eigenvector", tol.eigen);
    for (const auto& nk : kernels) {
      Mat sym = symmetrized(nk.kernel, nk.m, tol);
      Vec u = nk.m.cwiseSqrt();
      u /= u.norm();
      c.offer((sym * u - u).cwiseAbs().maxCoeff(), nk.name);
    }
    push(c);
  }
  {
    Collector c("cheeger_sandwich", tol.eigen);
    for (const auto& nk : kernels) {
      if (nk.kernel.size() > 12) continue;
      SandwichReport rep = cheeger_sandwich(nk.kernel, nk.m, kEnumerationCap, tol);
      double v = std::max(rep.lower - rep.spectral_gap, rep.spectral_gap - rep.upper);
      c.offer(v, nk.name + " kappa=" + format_real(rep.kappa));
    }
    push(c);
  }
  {
    Collector c("sweep_dominates_exact", 1e-12);
    for (const auto& nk : kernels) {
      if (nk.kernel.size() > 12) continue;
      double exact = cheeger_exact(nk.kernel, nk.m, kEnumerationCap, tol).kappa;
      double sweep = cheeger_sweep(nk.kernel, nk.m, tol).kappa;
      c.offer(exact - sweep, nk.name);
    }
    push(c);
  }

  // --- action layer ---
  {
    Collector c("ball_composition", 0.0);
    for (const auto& na : actions) {
      for (int trial = 0; trial < 10; ++trial) {
        AtomSet a = random_nonempty_subset(na.action->size(), rng);
        for (auto [k, l] : {std::pair{1, 1}, {2, 1}, {1, 3}, {2, 2}}) {
          AtomSet two = ball_image(*na.action, ball_image(*na.action, a, k), l);
          AtomSet one = ball_image(*na.action, a, k + l);
          double missing = 0;
          for (int x : two)
            if (!std::binary_search(one.begin(), one.end(), x)) missing += 1;
          c.offer(missing, na.name + " A=" + set_str(a) + " k=" + std::to_string(k) + " l=" + std::to_string(l));
        }
      }
    }
    push(c);
  }
  {
    Collector c("ball_monotone", 0.0);
    for (const auto& na : actions) {
      for (int trial = 0; trial < 10; ++trial) {
        AtomSet a = random_nonempty_subset(na.action->size(), rng);
        AtomSet bigger = a;
        AtomSet extra = random_nonempty_subset(na.action->size(), rng);
        for (int x : extra)
          if (!std::binary_search(a.begin(), a.end(), x)) bigger.push_back(x);
        std::sort(bigger.begin(), bigger.end());
        for (int k : {0, 1, 2, 3}) {
          double bad = 0;
          if (!subset_of(ball_image(*na.action, a, k), ball_image(*na.action, bigger, k))) bad = 1;
          if (!subset_of(ball_image(*na.action, a, k), ball_image(*na.action, a, k + 1))) bad = 1;
          c.offer(bad, na.name + " A=" + set_str(a) + " k=" + std::to_string(k));
        }
      }
    }
    push(c);
  }
  {
    Collector c("orbit_triangle", 0.0);
    for (const auto& na : actions) {
      int n = na.action->size();
      if (n > 16) continue;
      auto d = orbit_distance_table(*na.action);
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          for (int z = 0; z < n; ++z) {
            if (d[x][y] < 0 || d[y][z] < 0) continue;
            double excess = static_cast<double>(d[x][z] < 0 ? 1 : d[x][z]) - d[x][y] - d[y][z];
            if (d[x][z] < 0) excess = 1;  // finite legs force a finite span
            c.offer(excess, na.name + " (" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(z) + ")");
          }
    }
    push(c);
  }
  {
    Collector c("rn_inversion", 1e-12);
    for (const auto& na : actions) {
      RadonNikodymTable rn(*na.action);
      c.offer(rn.inversion_residual(*na.action), na.name);
    }
    push(c);
  }
  {
    Collector c("change_of_variable", 1e-11);
    for (const auto& na : actions) {
      RadonNikodymTable rn(*na.action);
      int n = na.action->size();
      for (int s = 0; s < na.action->gens().count(); ++s) {
        int si = na.action->gens().inverse(s);
        for (int trial = 0; trial < 5; ++trial) {
          AtomSet dom = random_nonempty_subset(n, rng);
          Vec f = random_vector(n, rng);
          double lhs = half_density_pairing(*na.action, rn, s, dom, f);
          double rhs = 0;
          for (int x : dom) {
            int y = na.action->apply(s, x);
            rhs += f(y) * std::sqrt(rn.r(si, y)) * na.action->space().weight(y);
          }
          c.offer(std::abs(lhs - rhs), na.name + " s=" + na.action->gens().symbol(s) + " Y=" + set_str(dom));
        }
      }
    }
    push(c);
  }
  {
    Collector c("schreier_equivariance", 0.0);
    for (const auto& [name, chain] : scope.chains) {
      for (size_t i = 1; i < chain.levels.size(); ++i) {
        const FiniteAction& hi = chain.levels[i];
        const FiniteAction& lo = chain.levels[i - 1];
        const std::vector<int>& proj = chain.projections[i];
        double bad = 0;
        for (int s = 0; s < hi.gens().count(); ++s)
          for (int x = 0; x < hi.size(); ++x)
            if (proj[static_cast<size_t>(hi.apply(s, x))] != lo.apply(s, proj[static_cast<size_t>(x)])) bad += 1;
        c.offer(bad, name + " level " + std::to_string(i));
      }
    }
    push(c);
  }

  // --- expansion layer ---
  {
    Collector c("measure_preserving_tilde", 0.0);
    for (const auto& na : actions) {
      if (!measure_preserving(*na.action)) continue;
      double s_count = static_cast<double>(na.ak.S.size());
      double worst = 0;
      for (int i = 0; i < na.ak.y_size(); ++i)
        worst = std::max(worst, std::abs(na.ak.tilde_nu(i) - s_count * na.ak.nu_local()(i)));
      c.offer(worst, na.name);
    }
    push(c);
  }
  {
    Collector c("action_kernel_balance", tol.detailed_balance);
    for (const auto& na : actions) {
      double v = detailed_balance_residual(na.ak.kernel.transition(), na.ak.tilde_nu).value;
      for (int i = 0; i < na.ak.sigma.size(); ++i) v = std::max(v, 1.0 - na.ak.sigma(i));
      c.offer(v, na.name);
    }
    push(c);
  }
  {
    Collector bounds("edge_vertex_bounds", 1e-10);
    Collector meas("measure_comparison", 1e-10);
    for (const auto& na : actions) {
      if (na.action->size() > 12) continue;
      auto offer_both = [&](const ActionKernel& ak, const std::string& label) {
        EdgeVertexComparison rep = edge_vertex_comparison(ak, kEnumerationCap, tol);
        bounds.offer(std::max(rep.worst_lower, rep.worst_upper), label + " theta=" + format_real(rep.theta));
        meas.offer(rep.worst_measure, label);
      };
      offer_both(na.ak, na.name + " Y=X");
      AtomSet y = random_nonempty_subset(na.action->size(), rng);
      offer_both(build_action_kernel(*na.action, y, all_symbols(*na.action), tol), na.name + " Y=" + set_str(y));
    }
    push(bounds);
    push(meas);
  }
  {
    Collector equiv("vertex_markov_equivalence", 0.0);
    Collector quant("vertex_markov_quantitative", 1e-9);
    for (const auto& na : actions) {
      if (na.action->size() > 12) continue;
      double cvx = vertex_expansion_constant(*na.action, na.ak.Y, na.ak.S, kEnumerationCap).c;
      double kap = markov_expansion_constant(na.ak, kEnumerationCap, tol).kappa;
      double theta = theta_bound(*na.action, na.ak.Y, na.ak.S);
      double s_count = static_cast<double>(na.ak.S.size());
      bool cv = cvx > 1e-12, kv = kap > 1e-12;
      equiv.offer(cv == kv ? 0.0 : 1.0,
                  na.name + " c=" + format_real(cvx) + " kappa=" + format_real(kap));
      if (cv) quant.offer(cvx / (s_count * theta) - kap, na.name + " vertex->markov");
      if (kv) quant.offer(kap / (s_count * std::sqrt(theta) + kap) - cvx, na.name + " markov->vertex");
    }
    push(equiv);
    push(quant);
  }
  {
    Collector c("profile_witness_consistency", 0.0);
    for (const auto& na : actions) {
      int n = na.action->size();
      if (n > 12) continue;
      ExpansionProfile prof = asymptotic_profile(*na.action, all_atoms(n));
      const double* w = na.action->space().weights().data();
      auto recheck = [&](const ProfileEntry& e, const char* side) {
        if (e.vacuous || !e.expanding || e.witness.empty()) return;
        std::uint32_t amask = set_to_mask(e.witness, n);
        std::uint32_t imask = set_to_mask(ball_image(*na.action, e.witness, e.k), n);
        double ratio = simd::ops().masked_dot(w, imask, n) / simd::ops().masked_dot(w, amask, n);
        c.offer(std::abs(ratio - 1.0 - e.c),
                na.name + " " + side + " alpha=" + format_real(e.alpha) + " A=" + set_str(e.witness));
      };
      for (const auto& e : prof.lower) recheck(e, "lower");
      for (const auto& e : prof.upper) recheck(e, "upper");
    }
    push(c);
  }
  {
    Collector c("local_gap_invariant_split", 0.0);
    for (const auto& na : actions) {
      LocalGapReport rep = local_spectral_gap(*na.action, na.ak.Y, na.ak.S, tol);
      bool split = rep.coupling_components > 1;
      c.offer(rep.has_gap == !split ? 0.0 : 1.0,
              na.name + " lambda_q=" + format_real(rep.lambda_q) + " components=" +
                  std::to_string(rep.coupling_components));
    }
    push(c);
  }

  // --- warped layer ---
  {
    Collector mono("warped_monotone_in_t", 1e-12);
    Collector word("warped_word_bound", 1e-12);
    Collector cone_tri("cone_triangle", 1e-12);
    for (const auto& na : actions) {
      if (!na.metric) continue;
      FiniteMetric base(*na.metric, tol);
      std::vector<double> ts{1, 2, 4, 8};
      std::vector<FiniteMetric> slices;
      for (double t : ts) slices.push_back(warp(base, *na.action, t));
      int n = base.size();
      for (size_t i = 0; i < ts.size(); ++i) {
        if (i + 1 < ts.size()) {
          double v = (slices[i].matrix() - slices[i + 1].matrix()).maxCoeff();
          mono.offer(v, na.name + " t=" + format_real(ts[i]) + "->" + format_real(ts[i + 1]));
        }
        double over = (slices[i].matrix() - ts[i] * base.matrix()).maxCoeff();
        mono.offer(over, na.name + " vs trivial group at t=" + format_real(ts[i]));
        for (const Word& wd : short_words(*na.action, 4)) {
          double worst = 0;
          for (int x = 0; x < n; ++x) worst = std::max(worst, slices[i](x, wd.perm[static_cast<size_t>(x)]) - wd.length);
          word.offer(worst, na.name + " t=" + format_real(ts[i]) + " word " + wd.text);
        }
      }
      WarpedCone cone(base, *na.action, tol);
      for (int trial = 0; trial < 50; ++trial) {
        auto pick = [&] {
          return ConePoint{static_cast<int>(rng() % static_cast<unsigned>(n)), ts[rng() % ts.size()]};
        };
        ConePoint p = pick(), q = pick(), r = pick();
        double v = cone.distance(p, r) - cone.distance(p, q) - cone.distance(q, r);
        cone_tri.offer(v, na.name + " trial " + std::to_string(trial));
      }
    }
    push(mono);
    push(word);
    push(cone_tri);
  }
  {
    Collector c("trivial_group_scaling", 1e-9);
    for (const auto& na : actions) {
      if (!na.metric) continue;
      FiniteMetric base(*na.metric, tol);
      int n = base.size();
      std::vector<int> idperm(n);
      for (int i = 0; i < n; ++i) idperm[i] = i;
      FiniteAction trivial(na.action->space(), GeneratorSet({"e"}, {0}, {0}), {idperm});
      FiniteMetric w = warp(base, trivial, 3.0);
      c.offer((w.matrix() - 3.0 * base.matrix()).cwiseAbs().maxCoeff(), na.name);
    }
    push(c);
  }
  {
    Collector c("neighborhood_stabilization", 0.0);
    for (const auto& na : actions) {
      if (!na.metric || na.action->size() > 16) continue;
      FiniteMetric base(*na.metric, tol);
      for (int radius : {1, 2, 3}) {
        for (int trial = 0; trial < 5; ++trial) {
          AtomSet a = random_nonempty_subset(na.action->size(), rng);
          StabilizationReport rep =
              neighborhood_stabilization(base, *na.action, a, radius, {1, 2, 4, 8, 16, 32, 64});
          double bad = 0;
          bool any_past = false;
          for (size_t i = 0; i < rep.ts.size(); ++i) {
            if (rep.ts[i] <= rep.predicted_threshold) continue;
            any_past = true;
            if (rep.neighborhoods[i] != rep.target) bad += 1;
          }
          if (any_past && !rep.stabilizes) bad += 1;
          c.offer(bad, na.name + " R=" + std::to_string(radius) + " A=" + set_str(a));
        }
      }
    }
    push(c);
  }

  // --- operator layer ---
  {
    Collector c("cut_norm_rank_one", 1e-10);
    for (const auto& na : actions) {
      const FiniteMeasureSpace& sp = na.action->space();
      int n = sp.size();
      RankOneProjection p = averaging_projection(sp, all_atoms(n));
      Mat full = p.matrix();
      for (int trial = 0; trial < 200; ++trial) {
        AtomSet a = random_nonempty_subset(n, rng);
        AtomSet cc = random_nonempty_subset(n, rng);
        double expect = std::sqrt(sp.mass(a) * sp.mass(cc)) / sp.total();
        double svd = cut_norm(full, a, cc);
        double closed = cut_norm(p, a, cc);
        double v = std::max(std::abs(svd - expect), std::abs(closed - expect));
        c.offer(v, na.name + " A=" + set_str(a) + " C=" + set_str(cc));
      }
    }
    push(c);
  }
  {
    Collector c("qlocal_decay_iff_expansion", 0.0);
    for (const auto& na : actions) {
      int n = na.action->size();
      if (n > 12) continue;
      auto table = orbit_distance_table(*na.action);
      int diam = 0;
      for (const auto& row : table)
        for (int d : row) diam = std::max(diam, d);
      std::vector<int> ks(static_cast<size_t>(diam) + 1);
      for (int k = 0; k <= diam; ++k) ks[static_cast<size_t>(k)] = k;
      RankOneProjection p = averaging_projection(na.action->space(), all_atoms(n));
      QuasiLocalityProfile prof =
          rho_quasi_locality_profile(WeightedOperator{na.action->space(), p.matrix()}, *na.action, ks);
      bool decays = prof.eps.back() <= 1e-10;
      ExpansionProfile ep = asymptotic_profile(*na.action, all_atoms(n));
      bool expanding = true;
      for (const auto& e : ep.lower) expanding = expanding && (e.vacuous || e.expanding);
      c.offer(decays == expanding ? 0.0 : 1.0,
              na.name + " eps(" + std::to_string(diam) + ")=" + format_real(prof.eps.back()));
    }
    push(c);
  }
  {
    Collector c("generator_propagation_additive", 0.0);
    for (const auto& na : actions) {
      for (int trial = 0; trial < 10; ++trial) {
        int len = 1 + static_cast<int>(rng() % 4);
        WeightedOperator t = identity_operator(na.action->space());
        int total = 0;
        std::string text;
        for (int i = 0; i < len; ++i) {
          int s = static_cast<int>(rng() % static_cast<unsigned>(na.action->gens().count()));
          t = compose(generator_operator(*na.action, s), t);
          total += na.action->gens().length(s);
          text += (i ? "*" : "") + na.action->gens().symbol(s);
        }
        auto prop = rho_propagation(t, *na.action);
        double v = prop ? static_cast<double>(*prop - total) : 1e9;
        c.offer(v, na.name + " word " + text);
      }
    }
    push(c);
  }
  {
    Collector prop("markov_power_propagation", 0.0);
    Collector rate("markov_power_rate", tol.identity);
    for (const auto& na : actions) {
      if (na.action->size() > 16) continue;
      PowerReport rep = markov_power_report(na.ak, 12, tol);
      double worst_prop = 0, worst_rate = 0;
      for (size_t i = 0; i < rep.norms.size(); ++i) {
        int nstep = static_cast<int>(i) + 1;
        if (rep.propagation[i] >= 0)
          worst_prop = std::max(worst_prop, static_cast<double>(rep.propagation[i] - nstep * rep.max_length));
        worst_rate = std::max(worst_rate, rep.norms[i] - rep.bounds[i]);
      }
      prop.offer(worst_prop, na.name);
      rate.offer(worst_rate, na.name + " lambda_hat=" + format_real(rep.lambda_hat));
    }
    push(prop);
    push(rate);
  }
  {
    Collector c("truncation_warped_locality", 1e-12);
    for (const auto& na : actions) {
      if (!na.metric || na.action->size() > 12) continue;
      FiniteMetric base(*na.metric, tol);
      WarpedCone cone(base, *na.action, tol);
      int s1 = static_cast<int>(rng() % static_cast<unsigned>(na.action->gens().count()));
      int s2 = static_cast<int>(rng() % static_cast<unsigned>(na.action->gens().count()));
      WeightedOperator t = compose(generator_operator(*na.action, s1), generator_operator(*na.action, s2));
      int k = na.action->gens().length(s1) + na.action->gens().length(s2);
      WeightedOperator tk = truncate_to_propagation(t, *na.action, k);
      for (double level : {2.0, 8.0}) {
        QuasiLocalityProfile prof =
            warped_quasi_locality_profile(tk, cone.slice(level), {static_cast<double>(k)});
        c.offer(prof.eps[0], na.name + " t=" + format_real(level) + " k=" + std::to_string(k));
      }
    }
    push(c);
  }
  {
    Collector c("ghost_refining_trend", 1e-12);
    if (scope.include_refining_family) {
      std::vector<RefiningLevel> levels;
      for (int n : {2, 4, 8, 16})
        levels.push_back({gen_margulis_torus(n), FiniteMetric(torus_chord_metric(n), tol), 8.0 * n});
      std::vector<GhostLevel> gs = ghost_profile_refining(levels, 2.0);
      double worst = -kInf;
      std::string vals;
      for (size_t i = 0; i < gs.size(); ++i) {
        vals += (i ? "," : "") + format_real(gs[i].g);
        if (i + 1 < gs.size()) worst = std::max(worst, gs[i + 1].g - gs[i].g);
      }
      c.offer(worst, "margulis tower g=[" + vals + "]");
    }
    push(c);
  }
  {
    Collector c("poincare_inequality", tol.eigen);
    for (const auto& na : actions) {
      if (!na.metric) continue;
      FiniteMetric base(*na.metric, tol);
      std::vector<double> ts{1, 2, 4};
      std::vector<Mat> embeddings;
      for (size_t i = 0; i < ts.size(); ++i) {
        Mat f(na.action->size(), 3);
        for (int col = 0; col < 3; ++col) f.col(col) = random_vector(na.action->size(), rng);
        embeddings.push_back(std::move(f));
      }
      PoincareReport rep = poincare_obstruction_witness(na.ak, base, ts, embeddings, tol);
      for (const auto& lvl : rep.levels) {
        double v = std::isfinite(lvl.rhs) ? lvl.lhs - lvl.rhs : (lvl.holds ? 0.0 : 1.0);
        c.offer(v, na.name + " t=" + format_real(lvl.t));
      }
    }
    push(c);
  }

  return report;
}

Json verify_report_json(const VerifyReport& report) {
  Json doc = Json::object();
  doc["schema_version"] = 1;
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json row = Json::object();
    row["check_name"] = c.name;
    row["status"] = c.pass ? "pass" : "fail";
    row["worst_violation"] = json_real(c.worst_violation);
    row["witness"] = c.witness;
    checks.push_back(std::move(row));
  }
  doc["checks"] = std::move(checks);
  doc["all_pass"] = report.all_pass();
  return doc;
}

}  // namespace explab
