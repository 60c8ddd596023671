#pragma once

#include <string>
#include <vector>

#include "explab/common.hpp"

namespace explab {

// Finite measure space: distinct atom ids with strictly positive weights.
// Zero-weight atoms are dropped at construction; negative weights are errors.
class FiniteMeasureSpace {
 public:
  FiniteMeasureSpace(std::vector<std::string> ids, Vec weights);

  // Uniform space with total mass 1 and ids "0".."n-1".
  static FiniteMeasureSpace uniform(int n);

  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(int i) const { return ids_.at(i); }
  const Vec& weights() const { return weights_; }
  double weight(int i) const { return weights_(i); }
  double total() const { return total_; }

  int index_of(const std::string& id) const;  // error if unknown

  // nu(A) for a strictly increasing index list; errors on bad indices.
  double mass(const AtomSet& a) const;

  bool same_atoms(const FiniteMeasureSpace& other) const;

 private:
  std::vector<std::string> ids_;
  Vec weights_;
  double total_ = 0.0;
};

}  // namespace explab
