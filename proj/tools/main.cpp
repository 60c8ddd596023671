#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "explab/cheeger.hpp"
#include "explab/expansion.hpp"
#include "explab/io.hpp"
#include "explab/operators.hpp"
#include "explab/random_models.hpp"
#include "explab/verify.hpp"
#include "explab/warped.hpp"

namespace {

using namespace explab;

struct Options {
  std::string input;
  std::string output;
  std::string builtin;
  std::uint64_t seed = 1;
  int cap = kEnumerationCap;
  int k_max = -1;  // -1: per-command default
  std::string t_list;
  std::string levels;  // "2^a..2^b"
  std::vector<std::string> tolerance_kv;
  std::string oplab_mode;
  Tolerances tol;
};

void apply_tolerances(Options& o) {
  for (const std::string& kv : o.tolerance_kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) fail(ErrorCode::parse, "--tolerance expects key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq);
    double value = 0;
    try {
      size_t used = 0;
      value = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
    } catch (const std::exception&) {
      fail(ErrorCode::parse, "--tolerance " + key + ": bad number '" + kv.substr(eq + 1) + "'");
    }
    if (key == "row_sum")
      o.tol.row_sum = value;
    else if (key == "detailed_balance")
      o.tol.detailed_balance = value;
    else if (key == "eigen")
      o.tol.eigen = value;
    else if (key == "metric")
      o.tol.metric = value;
    else if (key == "identity")
      o.tol.identity = value;
    else
      fail(ErrorCode::parse, "--tolerance: unknown key '" + key + "'");
  }
}

std::vector<double> parse_t_list(const Options& o) {
  if (!o.levels.empty()) {
    int a = 0, b = 0;
    if (std::sscanf(o.levels.c_str(), "2^%d..2^%d", &a, &b) != 2 || a < 0 || b < a)
      fail(ErrorCode::parse, "--levels expects 2^a..2^b with a <= b, got '" + o.levels + "'");
    std::vector<double> ts;
    for (int e = a; e <= b; ++e) ts.push_back(std::ldexp(1.0, e));
    return ts;
  }
  if (o.t_list.empty()) return {1, 2, 4, 8, 16, 32, 64};
  std::vector<double> ts;
  std::string item;
  std::istringstream in(o.t_list);
  while (std::getline(in, item, ',')) {
    try {
      size_t used = 0;
      ts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorCode::parse, "--t-list: bad number '" + item + "'");
    }
  }
  if (ts.empty()) fail(ErrorCode::parse, "--t-list: empty list");
  return ts;
}

AnyDocument load_model(const Options& o) {
  if (!o.input.empty() && !o.builtin.empty())
    fail(ErrorCode::parse, "pass either --input or --builtin, not both");
  if (!o.input.empty()) return load_document(o.input, o.tol);
  if (o.builtin.empty()) fail(ErrorCode::parse, "an --input file or --builtin name is required");
  Builtin b = make_builtin(o.builtin);
  AnyDocument doc;
  if (b.kernel) {
    doc.kind = "kernel";
    doc.kernel = *b.kernel;
  } else if (b.action) {
    doc.kind = "action";
    doc.action = ActionDocument{*b.action, b.metric};
  } else {
    doc.kind = "chain";
    doc.chain = *b.chain;
  }
  return doc;
}

void emit(const Options& o, const std::string& text) {
  if (o.output.empty())
    std::fputs(text.c_str(), stdout);
  else
    write_text_file(o.output, text);
}

// Kernel-like view of any input: kernels as themselves, actions through
// their normalized local kernel over the whole space.
MarkovKernel kernel_view(const AnyDocument& doc, const Tolerances& tol) {
  if (doc.kernel) return *doc.kernel;
  if (doc.action) return build_action_kernel(doc.action->action, tol).kernel;
  fail(ErrorCode::invalid_argument, "this command needs a kernel or action input, not a chain");
}

struct ActionModel {
  FiniteAction action;
  std::optional<Mat> metric;
};

ActionModel action_view(const AnyDocument& doc) {
  if (!doc.action) fail(ErrorCode::invalid_argument, "this command needs an action input");
  return {doc.action->action, doc.action->metric};
}

FiniteMetric base_metric(const ActionModel& m, const Tolerances& tol) {
  if (m.metric) return FiniteMetric(*m.metric, tol);
  if (auto d = derived_word_metric(m.action)) return FiniteMetric(*d, tol);
  fail(ErrorCode::invalid_argument,
       "no base metric: the input carries none and its orbits do not connect the space");
}

Json atom_set(const AtomSet& a) {
  Json out = Json::array();
  for (int i : a) out.push_back(i);
  return out;
}

Json real_list(const Vec& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(json_real(v(i)));
  return out;
}

void run_gen(const Options& o) {
  if (o.builtin.empty()) fail(ErrorCode::parse, "gen needs --builtin <name>");
  Builtin b = make_builtin(o.builtin);
  Json doc;
  if (b.kernel)
    doc = kernel_to_json(*b.kernel);
  else if (b.action)
    doc = action_to_json(*b.action, b.metric);
  else
    doc = chain_to_json(*b.chain);
  emit(o, dump_json(doc));
}

void run_kernel(const Options& o) {
  AnyDocument doc = load_model(o);
  if (doc.kernel) {
    emit(o, dump_json(kernel_to_json(*doc.kernel)));
    return;
  }
  if (!doc.action) fail(ErrorCode::invalid_argument, "kernel command needs a kernel or action input");
  ActionKernel ak = build_action_kernel(doc.action->action, o.tol);
  Json out = Json::object();
  out["schema_version"] = 1;
  out["sigma"] = real_list(ak.sigma);
  out["tilde_nu"] = real_list(ak.tilde_nu);
  out["kernel"] = kernel_to_json(ak.kernel);
  emit(o, dump_json(out));
}

void run_cheeger(const Options& o) {
  MarkovKernel k = kernel_view(load_model(o), o.tol);
  const Vec& m = k.reversing_or_fail(o.tol);
  SandwichReport rep = cheeger_sandwich(k, m, o.cap, o.tol);
  Json out = Json::object();
  out["schema_version"] = 1;
  out["kappa"] = json_real(rep.kappa);
  out["argmin"] = atom_set(rep.argmin);
  out["kappa_sweep"] = json_real(rep.kappa_upper);
  out["lambda2"] = json_real(rep.lambda2);
  out["spectral_gap"] = json_real(rep.spectral_gap);
  Json sandwich = Json::object();
  sandwich["lower"] = json_real(rep.lower);
  sandwich["upper"] = json_real(rep.upper);
  sandwich["holds"] = rep.holds;
  out["sandwich"] = std::move(sandwich);
  emit(o, dump_json(out));
}

void run_spectrum(const Options& o) {
  MarkovKernel k = kernel_view(load_model(o), o.tol);
  const Vec& m = k.reversing_or_fail(o.tol);
  SpectralReport rep = spectrum(k, m, o.tol);
  Json out = Json::object();
  out["schema_version"] = 1;
  out["eigenvalues"] = real_list(rep.eigenvalues);
  out["lambda2"] = json_real(rep.lambda2);
  out["spectral_gap"] = json_real(rep.spectral_gap);
  out["one_eigenspace_dim"] = rep.one_eigenspace_dim;
  out["has_gap"] = rep.has_gap;
  emit(o, dump_json(out));
}

Json profile_entry(const ProfileEntry& e) {
  Json out = Json::object();
  out["alpha"] = json_real(e.alpha);
  out["vacuous"] = e.vacuous;
  out["expanding"] = e.expanding;
  out["k"] = e.k;
  out["c"] = json_real(e.c);
  out["witness_subset"] = atom_set(e.witness);
  return out;
}

void run_expansion(const Options& o) {
  ActionModel model = action_view(load_model(o));
  const FiniteAction& a = model.action;
  ActionKernel ak = build_action_kernel(a, o.tol);
  int k_max = o.k_max < 0 ? 6 : o.k_max;
  VertexExpansion vx = vertex_expansion_constant(a, ak.Y, ak.S, o.cap);
  CheegerResult mk = markov_expansion_constant(ak, o.cap, o.tol);
  EdgeVertexComparison ev = edge_vertex_comparison(ak, o.cap, o.tol);
  ExpansionProfile prof = asymptotic_profile(a, ak.Y, {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}, k_max,
                                             {0.5, 0.6, 0.7, 0.8, 0.9}, o.cap);
  LocalGapReport gap = local_spectral_gap(a, ak.Y, ak.S, o.tol);

  Json out = Json::object();
  out["schema_version"] = 1;
  Json vertex = Json::object();
  vertex["c"] = json_real(vx.c);
  vertex["argmin"] = atom_set(vx.argmin);
  out["vertex"] = std::move(vertex);
  Json markov = Json::object();
  markov["kappa"] = json_real(mk.kappa);
  markov["argmin"] = atom_set(mk.argmin);
  out["markov"] = std::move(markov);
  Json edge = Json::object();
  edge["theta"] = json_real(ev.theta);
  edge["bounds_hold"] = ev.bounds_hold;
  edge["worst_lower"] = json_real(ev.worst_lower);
  edge["worst_upper"] = json_real(ev.worst_upper);
  edge["worst_measure"] = json_real(ev.worst_measure);
  out["edge_vertex"] = std::move(edge);
  Json profile = Json::object();
  profile["k_max"] = prof.k_max;
  Json lower = Json::array();
  for (const auto& e : prof.lower) lower.push_back(profile_entry(e));
  profile["lower"] = std::move(lower);
  Json upper = Json::array();
  for (const auto& e : prof.upper) upper.push_back(profile_entry(e));
  profile["upper"] = std::move(upper);
  out["profile"] = std::move(profile);
  Json local = Json::object();
  local["lambda_q"] = json_real(gap.lambda_q);
  local["has_gap"] = gap.has_gap;
  local["kappa_lo"] = json_real(gap.kappa_lo);
  local["kappa_hi"] = json_real(gap.kappa_hi);
  local["lambda2"] = json_real(gap.lambda2);
  local["kappa_from_markov"] = json_real(gap.kappa_from_markov);
  local["coupling_components"] = gap.coupling_components;
  out["local_gap"] = std::move(local);
  emit(o, dump_json(out));
}

bool wants_json(const Options& o) {
  return o.output.size() >= 5 && o.output.substr(o.output.size() - 5) == ".json";
}

void run_warp(const Options& o) {
  ActionModel model = action_view(load_model(o));
  FiniteMetric base = base_metric(model, o.tol);
  std::vector<double> ts = parse_t_list(o);
  std::vector<FiniteMetric> slices;
  for (double t : ts) slices.push_back(warp(base, model.action, t));
  if (wants_json(o)) {
    Json out = Json::object();
    out["schema_version"] = 1;
    Json levels = Json::array();
    for (size_t i = 0; i < ts.size(); ++i) {
      Json level = Json::object();
      level["t"] = json_real(ts[i]);
      Json rows = Json::array();
      for (int r = 0; r < slices[i].size(); ++r) {
        Json row = Json::array();
        for (int cc = 0; cc < slices[i].size(); ++cc) row.push_back(slices[i](r, cc));
        rows.push_back(std::move(row));
      }
      level["distances"] = std::move(rows);
      levels.push_back(std::move(level));
    }
    out["levels"] = std::move(levels);
    emit(o, dump_json(out));
    return;
  }
  std::string csv;
  for (size_t i = 0; i < ts.size(); ++i) {
    csv += "t," + format_real(ts[i]) + "\n";
    csv += matrix_to_csv(slices[i].matrix(), model.action.space().ids());
  }
  emit(o, csv);
}

Json witness_pairs(const QuasiLocalityProfile& prof) {
  Json out = Json::array();
  for (const auto& [a, c] : prof.witnesses) {
    Json pair = Json::object();
    pair["A"] = atom_set(a);
    pair["C"] = atom_set(c);
    out.push_back(std::move(pair));
  }
  return out;
}

void run_oplab(const Options& o) {
  AnyDocument doc = load_model(o);
  Json out = Json::object();
  out["schema_version"] = 1;
  out["mode"] = o.oplab_mode;

  if (o.oplab_mode == "ghost" && doc.chain) {
    // A chain is a refining family: one action per level, scales from the
    // t-list by level index.
    std::vector<double> ts = parse_t_list(o);
    if (ts.size() < doc.chain->levels.size())
      fail(ErrorCode::invalid_argument, "ghost on a chain needs one t per level");
    std::vector<RefiningLevel> levels;
    for (size_t i = 0; i < doc.chain->levels.size(); ++i) {
      const FiniteAction& a = doc.chain->levels[i];
      auto d = derived_word_metric(a);
      if (!d) fail(ErrorCode::invalid_argument, "ghost on a chain: level " + std::to_string(i) + " has no metric");
      levels.push_back({a, FiniteMetric(*d, o.tol), ts[i]});
    }
    std::vector<GhostLevel> gs = ghost_profile_refining(levels, 2.0);
    out["radius"] = 2.0;
    Json rows = Json::array();
    for (const auto& g : gs) {
      Json row = Json::object();
      row["t"] = json_real(g.t);
      row["g"] = json_real(g.g);
      row["argmax"] = g.argmax;
      rows.push_back(std::move(row));
    }
    out["levels"] = std::move(rows);
    emit(o, dump_json(out));
    return;
  }

  ActionModel model = action_view(doc);
  ActionKernel ak = build_action_kernel(model.action, o.tol);

  if (o.oplab_mode == "propagation") {
    int k_max = o.k_max < 0 ? 6 : o.k_max;
    Json rows = Json::array();
    for (int k = 0; k <= k_max; ++k) {
      PropagationWitness w = finite_propagation_witness(ak, k, o.tol);
      Json row = Json::object();
      row["k"] = w.k;
      row["power_n"] = w.power_n;
      row["power_bound"] = json_real(w.power_bound);
      row["truncation_bound"] = json_real(w.truncation_bound);
      rows.push_back(std::move(row));
    }
    out["witnesses"] = std::move(rows);
  } else if (o.oplab_mode == "qlocal") {
    int k_max = o.k_max < 0 ? 6 : o.k_max;
    std::vector<int> ks;
    for (int k = 0; k <= k_max; ++k) ks.push_back(k);
    RankOneProjection p = averaging_projection(model.action.space(), ak.Y);
    QuasiLocalityProfile prof = rho_quasi_locality_profile(
        WeightedOperator{model.action.space(), p.matrix()}, model.action, ks, 20, o.seed);
    out["exact"] = prof.exact;
    Json radii = Json::array();
    for (double r : prof.radii) radii.push_back(json_real(r));
    out["radii"] = std::move(radii);
    Json eps = Json::array();
    for (double e : prof.eps) eps.push_back(json_real(e));
    out["eps"] = std::move(eps);
    out["witnesses"] = witness_pairs(prof);
  } else if (o.oplab_mode == "power") {
    int n_max = o.k_max < 0 ? 50 : o.k_max;
    PowerReport rep = markov_power_report(ak, n_max, o.tol);
    out["has_gap"] = rep.has_gap;
    out["lambda_hat"] = json_real(rep.lambda_hat);
    out["max_length"] = rep.max_length;
    Json norms = Json::array(), bounds = Json::array(), propagation = Json::array();
    for (double v : rep.norms) norms.push_back(json_real(v));
    for (double v : rep.bounds) bounds.push_back(json_real(v));
    for (int v : rep.propagation) propagation.push_back(v);
    out["norms"] = std::move(norms);
    out["bounds"] = std::move(bounds);
    out["propagation"] = std::move(propagation);
    out["norms_bounded"] = rep.norms_bounded;
    out["propagation_bounded"] = rep.propagation_bounded;
  } else if (o.oplab_mode == "ghost") {
    FiniteMetric base = base_metric(model, o.tol);
    WarpedCone cone(base, model.action, o.tol);
    RankOneProjection p = averaging_projection(model.action.space(), ak.Y);
    std::vector<GhostLevel> gs = ghost_profile(p, cone, parse_t_list(o), 2.0);
    out["radius"] = 2.0;
    Json rows = Json::array();
    for (const auto& g : gs) {
      Json row = Json::object();
      row["t"] = json_real(g.t);
      row["g"] = json_real(g.g);
      row["argmax"] = g.argmax;
      rows.push_back(std::move(row));
    }
    out["levels"] = std::move(rows);
  } else if (o.oplab_mode == "poincare") {
    FiniteMetric base = base_metric(model, o.tol);
    std::vector<double> ts = o.t_list.empty() && o.levels.empty() ? std::vector<double>{1, 2, 4, 8} : parse_t_list(o);
    std::mt19937_64 rng(o.seed);
    std::vector<Mat> embeddings;
    for (size_t i = 0; i < ts.size(); ++i) {
      Mat f(model.action.size(), 3);
      for (int col = 0; col < 3; ++col) f.col(col) = random_vector(model.action.size(), rng);
      embeddings.push_back(std::move(f));
    }
    PoincareReport rep = poincare_obstruction_witness(ak, base, ts, embeddings, o.tol);
    out["all_hold"] = rep.all_hold;
    Json rows = Json::array();
    for (const auto& lvl : rep.levels) {
      Json row = Json::object();
      row["t"] = json_real(lvl.t);
      row["lambda2"] = json_real(lvl.lambda2);
      row["kappa"] = json_real(lvl.kappa);
      row["theta"] = json_real(lvl.theta);
      row["lhs"] = json_real(lvl.lhs);
      row["rhs"] = json_real(lvl.rhs);
      row["holds"] = lvl.holds;
      row["max_warped_distance"] = json_real(lvl.max_warped_distance);
      row["image_spread"] = json_real(lvl.image_spread);
      row["spread_bound"] = json_real(lvl.spread_bound);
      rows.push_back(std::move(row));
    }
    out["levels"] = std::move(rows);
  } else {
    fail(ErrorCode::parse, "oplab mode must be one of propagation, qlocal, power, ghost, poincare");
  }
  emit(o, dump_json(out));
}

int run_verify_cmd(const Options& o) {
  VerifyScope scope;
  if (!o.input.empty()) {
    scope = document_scope(load_document(o.input, o.tol), o.input);
  } else if (o.builtin.empty() || o.builtin == "all") {
    scope = builtin_scope(o.seed);
  } else {
    Builtin b = make_builtin(o.builtin);
    AnyDocument doc;
    if (b.kernel) {
      doc.kind = "kernel";
      doc.kernel = *b.kernel;
    } else if (b.action) {
      doc.kind = "action";
      doc.action = ActionDocument{*b.action, b.metric};
    } else {
      doc.kind = "chain";
      doc.chain = *b.chain;
    }
    scope = document_scope(doc, o.builtin);
  }
  VerifyReport rep = run_verify(scope, o.seed, o.tol);
  Json out = verify_report_json(rep);
  out["seed"] = o.seed;
  emit(o, dump_json(out));
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for group actions, reversible kernels and warped geometry"};
  app.require_subcommand(1);
  Options o;
  int exit_code = 0;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--input", o.input, "input JSON document");
    sub->add_option("--output", o.output, "output file (default: stdout)");
    sub->add_option("--seed", o.seed, "seed for randomized pieces");
    sub->add_option("--cap", o.cap, "subset enumeration cap (atoms)");
    sub->add_option("--k-max", o.k_max, "radius / exponent cap");
    sub->add_option("--t-list", o.t_list, "comma-separated warp scales");
    sub->add_option("--levels", o.levels, "warp scale range 2^a..2^b");
    sub->add_option("--builtin", o.builtin, "built-in model name, e.g. cycle:8");
    sub->add_option("--tolerance", o.tolerance_kv, "override, key=value")->take_all();
  };

  add_common(app.add_subcommand("gen", "write a built-in model as a JSON document"));
  add_common(app.add_subcommand("kernel", "normalized local kernel of an action"));
  add_common(app.add_subcommand("cheeger", "exact Cheeger constant and spectral sandwich"));
  add_common(app.add_subcommand("spectrum", "symmetrized spectrum and gap"));
  add_common(app.add_subcommand("expansion", "vertex/Markov expansion, profile, local gap"));
  add_common(app.add_subcommand("warp", "warped metrics over a scale list"));
  CLI::App* oplab = app.add_subcommand("oplab", "operator laboratory");
  oplab->add_option("mode", o.oplab_mode, "propagation | qlocal | power | ghost | poincare")->required();
  add_common(oplab);
  add_common(app.add_subcommand("verify", "run the invariant suite"));

  try {
    app.parse(argc, argv);
    apply_tolerances(o);
    if (app.got_subcommand("gen"))
      run_gen(o);
    else if (app.got_subcommand("kernel"))
      run_kernel(o);
    else if (app.got_subcommand("cheeger"))
      run_cheeger(o);
    else if (app.got_subcommand("spectrum"))
      run_spectrum(o);
    else if (app.got_subcommand("expansion"))
      run_expansion(o);
    else if (app.got_subcommand("warp"))
      run_warp(o);
    else if (app.got_subcommand("oplab"))
      run_oplab(o);
    else if (app.got_subcommand("verify"))
      exit_code = run_verify_cmd(o);
    return exit_code;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // flag misuse is a parse failure
  } catch (const explab::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.code()) {
      case ErrorCode::parse:
        return 2;
      case ErrorCode::cap_exceeded:
        return 3;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
