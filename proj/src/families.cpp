#include "explab/families.hpp"

#include <cmath>
#include <numbers>

namespace explab {

namespace {

std::vector<std::string> numbered_ids(int n) {
  std::vector<std::string> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return ids;
}

Mat normalize_to_diameter_two(Mat d) {
  double diam = d.maxCoeff();
  if (diam <= 0.0) fail(ErrorCode::invalid_argument, "metric normalization: zero diameter");
  return d * (2.0 / diam);
}

}  // namespace

FiniteAction gen_cycle(int n, std::optional<Vec> weights) {
  if (n < 2) fail(ErrorCode::invalid_argument, "gen_cycle: need n >= 2");
  Vec w = weights ? *weights : Vec::Constant(n, 1.0 / n);
  FiniteMeasureSpace space(numbered_ids(n), w);
  if (space.size() != n) fail(ErrorCode::invalid_argument, "gen_cycle: weights must be strictly positive");

  std::vector<int> plus(n), minus(n), id(n);
  for (int x = 0; x < n; ++x) {
    id[x] = x;
    plus[x] = (x + 1) % n;
    minus[x] = (x + n - 1) % n;
  }
  if (n == 2) {
    GeneratorSet gens({"e", "s"}, {0, 1}, {0, 1});
    return FiniteAction(std::move(space), std::move(gens), {id, plus});
  }
  GeneratorSet gens({"e", "+1", "-1"}, {0, 2, 1}, {0, 1, 1});
  return FiniteAction(std::move(space), std::move(gens), {id, plus, minus});
}

FiniteAction gen_margulis_torus(int n) {
  if (n < 2) fail(ErrorCode::invalid_argument, "gen_margulis_torus: need n >= 2");
  const int m = n * n;
  std::vector<std::string> ids(m);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) ids[x * n + y] = std::to_string(x) + "," + std::to_string(y);
  FiniteMeasureSpace space(std::move(ids), Vec::Constant(m, 1.0 / m));

  auto idx = [n](int x, int y) { return ((x % n + n) % n) * n + ((y % n + n) % n); };
  std::vector<int> id(m), a(m), ai(m), b(m), bi(m);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      int i = idx(x, y);
      id[i] = i;
      a[i] = idx(x + y, y);
      ai[i] = idx(x - y, y);
      b[i] = idx(x, x + y);
      bi[i] = idx(x, y - x);
    }
  GeneratorSet gens({"e", "a", "a-", "b", "b-"}, {0, 2, 1, 4, 3}, {0, 1, 1, 1, 1});
  return FiniteAction(std::move(space), std::move(gens), {id, a, ai, b, bi});
}

MarkovKernel two_point_kernel(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0) || p > 1.0 || q > 1.0)
    fail(ErrorCode::invalid_argument, "two_point_kernel: need p, q in (0, 1]");
  Mat P(2, 2);
  P << 1.0 - p, p, q, 1.0 - q;
  Vec m(2);
  m << q / (p + q), p / (p + q);
  return MarkovKernel(FiniteMeasureSpace({"a", "b"}, m), P, m);
}

MarkovKernel uniform_kernel(int n) {
  if (n < 1) fail(ErrorCode::invalid_argument, "uniform_kernel: need n >= 1");
  Mat P = Mat::Constant(n, n, 1.0 / n);
  Vec m = Vec::Constant(n, 1.0 / n);
  return MarkovKernel(FiniteMeasureSpace::uniform(n), P, m);
}

MarkovKernel lazy_cycle_kernel(int n) {
  if (n < 3) fail(ErrorCode::invalid_argument, "lazy_cycle_kernel: need n >= 3");
  Mat P = Mat::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    P(x, x) += 1.0 / 3.0;
    P(x, (x + 1) % n) += 1.0 / 3.0;
    P(x, (x + n - 1) % n) += 1.0 / 3.0;
  }
  Vec m = Vec::Constant(n, 1.0 / n);
  return MarkovKernel(FiniteMeasureSpace::uniform(n), P, m);
}

ActionChain gen_schreier_chain(std::vector<FiniteAction> levels, std::vector<std::vector<int>> projections) {
  if (levels.empty()) fail(ErrorCode::invalid_argument, "chain: no levels");
  if (projections.size() != levels.size())
    fail(ErrorCode::invalid_argument, "chain: one projection entry per level (first empty)");
  if (!projections[0].empty()) fail(ErrorCode::invalid_argument, "chain: level 0 must not project");
  const GeneratorSet& g0 = levels[0].gens();
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const GeneratorSet& gi = levels[i].gens();
    if (gi.count() != g0.count())
      fail(ErrorCode::invalid_argument, "chain: level " + std::to_string(i) + " has a different symbol count");
    for (int s = 0; s < g0.count(); ++s)
      if (gi.symbol(s) != g0.symbol(s) || gi.inverse(s) != g0.inverse(s) || gi.length(s) != g0.length(s))
        fail(ErrorCode::invalid_argument,
             "chain: level " + std::to_string(i) + " symbol table mismatch at '" + g0.symbol(s) + "'");
    const auto& proj = projections[i];
    if (static_cast<int>(proj.size()) != levels[i].size())
      fail(ErrorCode::invalid_argument, "chain: projection at level " + std::to_string(i) + " has wrong length");
    for (int c : proj)
      if (c < 0 || c >= levels[i - 1].size())
        fail(ErrorCode::invalid_argument, "chain: projection at level " + std::to_string(i) + " is out of range");
    for (int s = 0; s < g0.count(); ++s)
      for (int x = 0; x < levels[i].size(); ++x)
        if (proj[levels[i].apply(s, x)] != levels[i - 1].apply(s, proj[x]))
          fail(ErrorCode::invalid_argument, "chain: equivariance fails at level " + std::to_string(i) +
                                                ", symbol '" + g0.symbol(s) + "', coset " + std::to_string(x));
  }
  return ActionChain{std::move(levels), std::move(projections)};
}

ActionChain gen_schreier_dyadic(int depth) {
  if (depth < 1) fail(ErrorCode::invalid_argument, "gen_schreier_dyadic: need depth >= 1");
  if (depth > 12) fail(ErrorCode::cap_exceeded, "gen_schreier_dyadic: depth capped at 12");
  std::vector<FiniteAction> levels;
  std::vector<std::vector<int>> projections;
  for (int i = 1; i <= depth; ++i) {
    const int n = 1 << i;
    std::vector<int> plus(n), minus(n), id(n);
    for (int x = 0; x < n; ++x) {
      id[x] = x;
      plus[x] = (x + 1) % n;
      minus[x] = (x + n - 1) % n;
    }
    // Three symbols at every level so the tower shares one table; the level-1
    // action is non-faithful (+1 and -1 coincide there).
    GeneratorSet gens({"e", "+1", "-1"}, {0, 2, 1}, {0, 1, 1});
    levels.emplace_back(FiniteMeasureSpace::uniform(n), std::move(gens),
                        std::vector<std::vector<int>>{id, plus, minus});
    if (i == 1) {
      projections.emplace_back();
    } else {
      std::vector<int> proj(n);
      for (int x = 0; x < n; ++x) proj[x] = x % (n / 2);
      projections.push_back(std::move(proj));
    }
  }
  return gen_schreier_chain(std::move(levels), std::move(projections));
}

Mat cycle_chord_metric(int n) {
  if (n < 2) fail(ErrorCode::invalid_argument, "cycle_chord_metric: need n >= 2");
  Mat d(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) d(x, y) = 2.0 * std::abs(std::sin(std::numbers::pi * (x - y) / n));
  return normalize_to_diameter_two(d);
}

Mat torus_chord_metric(int n) {
  if (n < 2) fail(ErrorCode::invalid_argument, "torus_chord_metric: need n >= 2");
  const int m = n * n;
  auto chord = [n](int a, int b) { return 2.0 * std::sin(std::numbers::pi * std::abs(a - b) / n); };
  Mat d(m, m);
  for (int x1 = 0; x1 < n; ++x1)
    for (int y1 = 0; y1 < n; ++y1)
      for (int x2 = 0; x2 < n; ++x2)
        for (int y2 = 0; y2 < n; ++y2)
          d(x1 * n + y1, x2 * n + y2) = std::hypot(chord(x1, x2), chord(y1, y2));
  return normalize_to_diameter_two(d);
}

namespace {

std::vector<double> parse_params(const std::string& spec, std::string* name) {
  auto colon = spec.find(':');
  *name = spec.substr(0, colon);
  std::vector<double> params;
  if (colon == std::string::npos) return params;
  std::string rest = spec.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    auto comma = rest.find(',', pos);
    std::string tok = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      params.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(ErrorCode::parse, "builtin '" + spec + "': bad parameter '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return params;
}

int int_param(const std::vector<double>& p, std::size_t i, const std::string& spec) {
  if (i >= p.size()) fail(ErrorCode::parse, "builtin '" + spec + "': missing parameter");
  double v = p[i];
  if (v != std::floor(v) || v < -1e9 || v > 1e9)
    fail(ErrorCode::parse, "builtin '" + spec + "': parameter must be an integer");
  return static_cast<int>(v);
}

}  // namespace

Builtin make_builtin(const std::string& spec) {
  std::string name;
  std::vector<double> params = parse_params(spec, &name);
  Builtin b;
  b.name = spec;
  if (name == "cycle") {
    int n = int_param(params, 0, spec);
    if (n < 2) fail(ErrorCode::parse, "builtin '" + spec + "': need n >= 2");
    b.action = gen_cycle(n);
    b.metric = cycle_chord_metric(n);
  } else if (name == "weighted-cycle") {
    int n = int_param(params, 0, spec);
    if (n < 2) fail(ErrorCode::parse, "builtin '" + spec + "': need n >= 2");
    Vec w(n);
    for (int i = 0; i < n; ++i) w(i) = 1.0 + i % 2;
    w /= w.sum();
    b.action = gen_cycle(n, w);
    b.metric = cycle_chord_metric(n);
  } else if (name == "margulis") {
    int n = int_param(params, 0, spec);
    if (n < 2) fail(ErrorCode::parse, "builtin '" + spec + "': need n >= 2");
    b.action = gen_margulis_torus(n);
    b.metric = torus_chord_metric(n);
  } else if (name == "schreier-dyadic") {
    int d = int_param(params, 0, spec);
    if (d < 1) fail(ErrorCode::parse, "builtin '" + spec + "': need depth >= 1");
    b.chain = gen_schreier_dyadic(d);
  } else if (name == "two-point") {
    if (params.size() != 2) fail(ErrorCode::parse, "builtin '" + spec + "': expected two-point:p,q");
    if (!(params[0] > 0.0) || !(params[1] > 0.0) || params[0] > 1.0 || params[1] > 1.0)
      fail(ErrorCode::parse, "builtin '" + spec + "': need p, q in (0, 1]");
    b.kernel = two_point_kernel(params[0], params[1]);
  } else {
    fail(ErrorCode::parse, "unknown builtin '" + spec + "'");
  }
  return b;
}

std::vector<std::string> builtin_roster() {
  return {"cycle:3",           "cycle:8",    "cycle:12",          "weighted-cycle:2",
          "weighted-cycle:5",  "weighted-cycle:8", "margulis:2",  "margulis:3",
          "schreier-dyadic:3", "two-point:0.3,0.3", "two-point:0.2,0.5"};
}

}  // namespace explab
