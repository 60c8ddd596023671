#pragma once

#include <optional>
#include <string>
#include <vector>

#include "explab/action.hpp"
#include "explab/markov.hpp"

namespace explab {

// Cycle Z/n with generators {e, +1, -1} (n = 2 declares {e, s} with s its own
// inverse: rotation by 1 is an involution there, and declaring it twice would
// double-count the same group element in local kernel weights). Weights
// default to uniform.
FiniteAction gen_cycle(int n, std::optional<Vec> weights = std::nullopt);

// (Z/n)^2 with the shear maps a(x,y) = (x+y,y), b(x,y) = (x,x+y), their
// inverses and the identity, all of length 1. Linear maps fix the origin, so
// the full-space action splits into the orbit {0} and the rest.
FiniteAction gen_margulis_torus(int n);

// Two-state kernel [[1-p, p], [q, 1-q]] with reversing measure (q,p)/(p+q).
MarkovKernel two_point_kernel(double p, double q);

// Uniform rank-one kernel P(x,y) = 1/n on the uniform n-point space.
MarkovKernel uniform_kernel(int n);

// Lazy cycle walk (I + shift + shift^{-1}) / 3 on the uniform n-point space,
// eigenvalues (1 + 2cos(2 pi k / n)) / 3.
MarkovKernel lazy_cycle_kernel(int n);

// Compatible tower of actions: shared symbols, level i+1 projecting onto
// level i equivariantly. projections[0] is empty; projections[i] maps level i
// atoms to level i-1 atoms.
struct ActionChain {
  std::vector<FiniteAction> levels;
  std::vector<std::vector<int>> projections;
};

// Validates sizes, symbol compatibility and exact equivariance
// proj(s.x) = s.proj(x); errors name the level, symbol and atom.
ActionChain gen_schreier_chain(std::vector<FiniteAction> levels, std::vector<std::vector<int>> projections);

// Z -> Z/2^i tower, levels i = 1..depth, generators {e, +1, -1} at every
// level, projections reduce mod 2^{i-1}.
ActionChain gen_schreier_dyadic(int depth);

// Chord metric on the cycle ids 0..n-1, scaled to diameter exactly 2.
Mat cycle_chord_metric(int n);

// Product chord metric on the n x n torus, scaled to diameter exactly 2.
Mat torus_chord_metric(int n);

// One named built-in model: an action (with its natural metric), a kernel, or
// a chain. Exactly one of action/kernel/chain is set.
struct Builtin {
  std::string name;
  std::optional<FiniteAction> action;
  std::optional<Mat> metric;  // for actions: base metric, diameter 2
  std::optional<MarkovKernel> kernel;
  std::optional<ActionChain> chain;
};

// Parses "cycle:8", "weighted-cycle:5", "margulis:3", "schreier-dyadic:4",
// "two-point:0.3,0.3". Unknown names or bad parameters raise parse errors.
Builtin make_builtin(const std::string& spec);

// Deterministic roster behind "--builtin all".
std::vector<std::string> builtin_roster();

}  // namespace explab
