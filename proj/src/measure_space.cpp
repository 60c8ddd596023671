#include "explab/measure_space.hpp"

#include <set>

namespace explab {

FiniteMeasureSpace::FiniteMeasureSpace(std::vector<std::string> ids, Vec weights) {
  if (static_cast<int>(ids.size()) != weights.size())
    fail(ErrorCode::invalid_argument, "measure space: ids and weights differ in length");
  if (ids.empty()) fail(ErrorCode::invalid_argument, "measure space: no atoms");
  for (int i = 0; i < weights.size(); ++i) {
    if (weights(i) < 0.0)
      fail(ErrorCode::invalid_argument, "measure space: negative weight at atom '" + ids[i] + "'");
  }
  for (int i = 0; i < weights.size(); ++i) {
    if (weights(i) > 0.0) {
      ids_.push_back(std::move(ids[i]));
      total_ += weights(i);
    }
  }
  if (ids_.empty()) fail(ErrorCode::invalid_argument, "measure space: all atoms have weight zero");
  weights_.resize(static_cast<int>(ids_.size()));
  for (int i = 0, j = 0; i < weights.size(); ++i)
    if (weights(i) > 0.0) weights_(j++) = weights(i);

  std::set<std::string> seen(ids_.begin(), ids_.end());
  if (static_cast<int>(seen.size()) != size())
    fail(ErrorCode::invalid_argument, "measure space: duplicate atom ids");
}

FiniteMeasureSpace FiniteMeasureSpace::uniform(int n) {
  if (n <= 0) fail(ErrorCode::invalid_argument, "uniform space needs n >= 1");
  std::vector<std::string> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return FiniteMeasureSpace(std::move(ids), Vec::Constant(n, 1.0 / n));
}

int FiniteMeasureSpace::index_of(const std::string& id) const {
  for (int i = 0; i < size(); ++i)
    if (ids_[i] == id) return i;
  fail(ErrorCode::invalid_argument, "unknown atom id '" + id + "'");
}

double FiniteMeasureSpace::mass(const AtomSet& a) const {
  double out = 0.0;
  int prev = -1;
  for (int i : a) {
    if (i <= prev || i >= size())
      fail(ErrorCode::invalid_argument, "atom set must be strictly increasing and in range");
    out += weights_(i);
    prev = i;
  }
  return out;
}

bool FiniteMeasureSpace::same_atoms(const FiniteMeasureSpace& other) const {
  return ids_ == other.ids_ && weights_ == other.weights_;
}

}  // namespace explab
