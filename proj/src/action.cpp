#include "explab/action.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

namespace explab {

GeneratorSet::GeneratorSet(std::vector<std::string> symbols, std::vector<int> inverse, std::vector<int> lengths)
    : symbols_(std::move(symbols)), inverse_(std::move(inverse)), lengths_(std::move(lengths)) {
  const int k = count();
  if (k == 0) fail(ErrorCode::invalid_argument, "generator set: empty");
  if (static_cast<int>(inverse_.size()) != k || static_cast<int>(lengths_.size()) != k)
    fail(ErrorCode::invalid_argument, "generator set: inverse and length tables must match symbol count");
  std::set<std::string> seen(symbols_.begin(), symbols_.end());
  if (static_cast<int>(seen.size()) != k) fail(ErrorCode::invalid_argument, "generator set: duplicate symbols");
  for (int s = 0; s < k; ++s) {
    int t = inverse_[s];
    if (t < 0 || t >= k || inverse_[t] != s)
      fail(ErrorCode::invalid_argument, "generator set: inverse pairing is not an involution at '" + symbols_[s] + "'");
    if (lengths_[s] != lengths_[t])
      fail(ErrorCode::invalid_argument, "generator set: length mismatch between '" + symbols_[s] + "' and its inverse");
    if (lengths_[s] == 0) {
      if (t != s)
        fail(ErrorCode::invalid_argument, "generator set: length-0 symbol '" + symbols_[s] + "' must be self-inverse");
      if (identity_) fail(ErrorCode::invalid_argument, "generator set: more than one length-0 symbol");
      identity_ = s;
    } else if (lengths_[s] < 0) {
      fail(ErrorCode::invalid_argument, "generator set: negative length at '" + symbols_[s] + "'");
    }
    max_length_ = std::max(max_length_, lengths_[s]);
  }
}

FiniteAction::FiniteAction(FiniteMeasureSpace space, GeneratorSet gens, std::vector<std::vector<int>> perms)
    : space_(std::move(space)), gens_(std::move(gens)), perms_(std::move(perms)) {
  const int n = space_.size();
  if (static_cast<int>(perms_.size()) != gens_.count())
    fail(ErrorCode::invalid_argument, "action: one permutation per symbol required");
  for (int s = 0; s < gens_.count(); ++s) {
    const auto& p = perms_[s];
    if (static_cast<int>(p.size()) != n)
      fail(ErrorCode::invalid_argument, "action: permutation for '" + gens_.symbol(s) + "' has wrong length");
    std::vector<char> hit(n, 0);
    for (int x = 0; x < n; ++x) {
      if (p[x] < 0 || p[x] >= n || hit[p[x]])
        fail(ErrorCode::invalid_argument, "action: '" + gens_.symbol(s) + "' is not a permutation");
      hit[p[x]] = 1;
    }
  }
  for (int s = 0; s < gens_.count(); ++s) {
    int t = gens_.inverse(s);
    for (int x = 0; x < n; ++x)
      if (perms_[t][perms_[s][x]] != x)
        fail(ErrorCode::invalid_argument,
             "action: '" + gens_.symbol(t) + "' does not invert '" + gens_.symbol(s) + "' at atom " + space_.id(x));
  }
  if (auto e = gens_.identity()) {
    for (int x = 0; x < n; ++x)
      if (perms_[*e][x] != x)
        fail(ErrorCode::invalid_argument, "action: identity symbol moves atom " + space_.id(x));
  }
}

RadonNikodymTable::RadonNikodymTable(const FiniteAction& action) {
  const int n = action.size();
  const Vec& nu = action.space().weights();
  table_.resize(action.gens().count(), n);
  for (int s = 0; s < action.gens().count(); ++s)
    for (int x = 0; x < n; ++x) table_(s, x) = nu(action.apply(s, x)) / nu(x);
}

double RadonNikodymTable::inversion_residual(const FiniteAction& action) const {
  double worst = 0.0;
  for (int s = 0; s < action.gens().count(); ++s) {
    int t = action.gens().inverse(s);
    for (int x = 0; x < action.size(); ++x)
      worst = std::max(worst, std::abs(r(s, x) * r(t, action.apply(s, x)) - 1.0));
  }
  return worst;
}

double half_density_pairing(const FiniteAction& action, const RadonNikodymTable& rn, int s, const AtomSet& domain,
                            const Vec& f) {
  if (f.size() != action.size()) fail(ErrorCode::invalid_argument, "half_density_pairing: wrong length");
  const Vec& nu = action.space().weights();
  double acc = 0.0;
  for (int x : domain) acc += f(action.apply(s, x)) * std::sqrt(rn.r(s, x)) * nu(x);
  return acc;
}

namespace {

std::vector<int> word_distances(const FiniteAction& action, const AtomSet& sources) {
  const int n = action.size();
  std::vector<int> dist(n, -1);
  using Item = std::pair<int, int>;  // (distance, atom)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int x : sources) {
    if (x < 0 || x >= n) fail(ErrorCode::invalid_argument, "ball: atom index out of range");
    dist[x] = 0;
    heap.push({0, x});
  }
  while (!heap.empty()) {
    auto [d, x] = heap.top();
    heap.pop();
    if (d != dist[x]) continue;
    for (int s = 0; s < action.gens().count(); ++s) {
      int len = action.gens().length(s);
      if (len == 0) continue;
      int y = action.apply(s, x);
      if (dist[y] == -1 || d + len < dist[y]) {
        dist[y] = d + len;
        heap.push({dist[y], y});
      }
    }
  }
  return dist;
}

}  // namespace

AtomSet ball_image(const FiniteAction& action, const AtomSet& a, int k) {
  if (k < 0) fail(ErrorCode::invalid_argument, "ball_image: negative radius");
  std::vector<int> dist = word_distances(action, a);
  AtomSet out;
  for (int x = 0; x < action.size(); ++x)
    if (dist[x] >= 0 && dist[x] <= k) out.push_back(x);
  return out;
}

std::optional<int> orbit_distance(const FiniteAction& action, int x, int y) {
  if (x < 0 || x >= action.size() || y < 0 || y >= action.size())
    fail(ErrorCode::invalid_argument, "orbit_distance: atom index out of range");
  std::vector<int> dist = word_distances(action, {x});
  if (dist[y] < 0) return std::nullopt;
  return dist[y];
}

std::vector<std::vector<int>> orbit_distance_table(const FiniteAction& action) {
  std::vector<std::vector<int>> out;
  out.reserve(action.size());
  for (int x = 0; x < action.size(); ++x) out.push_back(word_distances(action, {x}));
  return out;
}

double theta_bound(const FiniteAction& action, const AtomSet& Y, const std::vector<int>& S) {
  if (Y.empty()) fail(ErrorCode::invalid_argument, "theta_bound: empty Y");
  std::vector<char> in_y(action.size(), 0);
  for (int x : Y) {
    if (x < 0 || x >= action.size()) fail(ErrorCode::invalid_argument, "theta_bound: atom index out of range");
    in_y[x] = 1;
  }
  RadonNikodymTable rn(action);
  double theta = 1.0;
  for (int s : S) {
    if (s < 0 || s >= action.gens().count()) fail(ErrorCode::invalid_argument, "theta_bound: bad generator index");
    for (int x : Y) {
      if (!in_y[action.apply(s, x)]) continue;
      double r = rn.r(s, x);
      theta = std::max({theta, r, 1.0 / r});
    }
  }
  return theta;
}

bool is_free_up_to(const FiniteAction& action, int cap) {
  const int n = action.size();
  std::vector<int> id(n);
  for (int x = 0; x < n; ++x) id[x] = x;
  std::map<std::vector<int>, int> depth;  // permutation -> least word length seen
  depth[id] = 0;
  std::queue<std::vector<int>> frontier;
  frontier.push(id);
  while (!frontier.empty()) {
    std::vector<int> cur = frontier.front();
    frontier.pop();
    int d = depth[cur];
    for (int s = 0; s < action.gens().count(); ++s) {
      int len = action.gens().length(s);
      if (len == 0 || d + len > cap) continue;
      std::vector<int> next(n);
      for (int x = 0; x < n; ++x) next[x] = action.apply(s, cur[x]);
      if (depth.emplace(next, d + len).second) frontier.push(next);
    }
  }
  for (const auto& [perm, d] : depth) {
    if (perm == id) continue;
    for (int x = 0; x < n; ++x)
      if (perm[x] == x) return false;
  }
  return true;
}

}  // namespace explab
