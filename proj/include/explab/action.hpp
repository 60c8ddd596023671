#pragma once

#include <optional>
#include <string>
#include <vector>

#include "explab/measure_space.hpp"

namespace explab {

// Declared generating set: symbols with an involutive inverse pairing and a
// proper length. The identity, when present, is the unique length-0 symbol
// and is its own inverse; every other symbol has length >= 1.
class GeneratorSet {
 public:
  GeneratorSet(std::vector<std::string> symbols, std::vector<int> inverse, std::vector<int> lengths);

  int count() const { return static_cast<int>(symbols_.size()); }
  const std::string& symbol(int s) const { return symbols_.at(s); }
  int inverse(int s) const { return inverse_.at(s); }
  int length(int s) const { return lengths_.at(s); }
  std::optional<int> identity() const { return identity_; }
  int max_length() const { return max_length_; }

 private:
  std::vector<std::string> symbols_;
  std::vector<int> inverse_;
  std::vector<int> lengths_;
  std::optional<int> identity_;
  int max_length_ = 0;
};

// Finite model of a group action: one permutation of the atoms per symbol.
// perm(inverse(s)) must invert perm(s); the identity symbol must act as the
// identity permutation.
class FiniteAction {
 public:
  FiniteAction(FiniteMeasureSpace space, GeneratorSet gens, std::vector<std::vector<int>> perms);

  const FiniteMeasureSpace& space() const { return space_; }
  const GeneratorSet& gens() const { return gens_; }
  int size() const { return space_.size(); }
  int apply(int s, int x) const { return perms_.at(s)[x]; }
  const std::vector<int>& perm(int s) const { return perms_.at(s); }

 private:
  FiniteMeasureSpace space_;
  GeneratorSet gens_;
  std::vector<std::vector<int>> perms_;
};

// r(s, x) = nu(s.x) / nu(x) on atoms.
class RadonNikodymTable {
 public:
  explicit RadonNikodymTable(const FiniteAction& action);
  double r(int s, int x) const { return table_(s, x); }
  // max relative error in r(s,x) * r(s^{-1}, s.x) = 1.
  double inversion_residual(const FiniteAction& action) const;

 private:
  Mat table_;  // gens x atoms
};

// Pushforward sum: integral over Y of f(g.x) r(g,x)^(1/2) dnu. With the
// matching integral over g.Y and r(g^{-1},.) it forms the change-of-variable
// identity checked by the verify suite.
double half_density_pairing(const FiniteAction& action, const RadonNikodymTable& rn, int s, const AtomSet& domain,
                            const Vec& f);

// B_k . A where B_k = words of declared length <= k. A is included (k >= 0).
AtomSet ball_image(const FiniteAction& action, const AtomSet& a, int k);

// Word-length distance between atoms; nullopt when y is not in the orbit.
std::optional<int> orbit_distance(const FiniteAction& action, int x, int y);

// All pairwise orbit distances; -1 encodes infinity.
std::vector<std::vector<int>> orbit_distance_table(const FiniteAction& action);

// Theta = max over x in Y, s in S with s.x in Y of max(r, 1/r). Empty move
// sets give 1. Errors: empty Y, bad indices.
double theta_bound(const FiniteAction& action, const AtomSet& Y, const std::vector<int>& S);

// True when every word of declared length <= cap that fixes some atom acts as
// the identity permutation. Recorded, not consumed.
bool is_free_up_to(const FiniteAction& action, int cap);

}  // namespace explab
