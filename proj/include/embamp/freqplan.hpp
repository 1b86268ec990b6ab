#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "embamp/errors.hpp"

namespace embamp {

struct FrequencyPlan {
  std::vector<double> freqs;  // GHz, strictly increasing
  double guard_mhz = 50.0;
  double band_lo = 4.0;  // GHz
  double band_hi = 8.0;

  void validate() const;
};

struct MixProduct {
  double ghz = 0.0;
  int i = 0;
  int j = 0;
  bool sum = true;

  std::string label() const;
};

enum class CollisionKind { ModeHit, DegenerateMix };

const char* collision_kind_name(CollisionKind k);

struct Collision {
  CollisionKind kind = CollisionKind::ModeHit;
  std::string tones;
  std::vector<double> freqs;  // GHz
  double gap_mhz = 0.0;
};

struct CollisionReport {
  std::vector<Collision> collisions;

  bool empty() const { return collisions.empty(); }
};

class PlanInfeasible : public InfeasibleError {
public:
  PlanInfeasible(const std::string& what, FrequencyPlan partial) : InfeasibleError(what), partial_(std::move(partial)) {}
  const FrequencyPlan& partial() const { return partial_; }

private:
  FrequencyPlan partial_;
};

// every sum and absolute difference over unordered pairs (sums first)
std::vector<MixProduct> mixing_products(const std::vector<double>& freqs);

// distinct values of mixing_products
std::vector<double> mixing_set(const std::vector<double>& freqs);

// ModeHit: a product within guard of a mode; DegenerateMix: two products within guard
CollisionReport validate_plan(const FrequencyPlan& plan);

// n^2 guard, returned in GHz
double bandwidth_bound(int n, double guard_mhz);

// depth-first search over a guard-spaced lattice in the band with a seeded
// candidate order; throws PlanInfeasible once the lattice is exhausted
FrequencyPlan search_plan(int n, double band_lo, double band_hi, double guard_mhz, std::uint64_t seed,
                          long node_limit = 5000000);

}  // namespace embamp
