#include "embamp/freqplan.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

namespace embamp {

namespace {

constexpr double kRel = 1e-9;

// strictly inside the guard window
bool within(double x, double y, double guard_ghz) { return std::abs(x - y) < guard_ghz * (1.0 - kRel); }

std::string tone(int i) { return "w" + std::to_string(i + 1); }

void check_distinct(const std::vector<double>& freqs) {
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (!std::isfinite(freqs[i]) || !(freqs[i] > 0.0)) throw ValidationError("freqs", "must be finite and > 0");
    for (std::size_t j = 0; j < i; ++j)
      if (freqs[i] == freqs[j]) throw ValidationError("freqs", "duplicate frequency");
  }
}

}  // namespace

void FrequencyPlan::validate() const {
  if (!(guard_mhz > 0.0)) throw ValidationError("guard", "must be > 0");
  if (!(band_lo > 0.0 && band_hi > band_lo)) throw ValidationError("band", "must satisfy 0 < low < high");
  const double g = guard_mhz * 1e-3;
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    if (!std::isfinite(freqs[k])) throw ValidationError("freqs", "must be finite");
    if (freqs[k] < band_lo * (1 - kRel) || freqs[k] > band_hi * (1 + kRel))
      throw ValidationError("freqs", "frequency outside the band");
    if (k > 0 && !(freqs[k] > freqs[k - 1])) throw ValidationError("freqs", "must be strictly increasing");
    if (k > 0 && within(freqs[k], freqs[k - 1], g)) throw ValidationError("freqs", "tones closer than the guard");
  }
}

std::string MixProduct::label() const { return tone(i) + (sum ? "+" : "-") + tone(j); }

const char* collision_kind_name(CollisionKind k) { return k == CollisionKind::ModeHit ? "ModeHit" : "DegenerateMix"; }

std::vector<MixProduct> mixing_products(const std::vector<double>& freqs) {
  if (freqs.size() < 2) throw ValidationError("freqs", "need at least two tones");
  check_distinct(freqs);
  std::vector<MixProduct> out;
  const int n = static_cast<int>(freqs.size());
  for (int pass = 0; pass < 2; ++pass)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (pass == 0) {
          out.push_back({freqs[i] + freqs[j], i, j, true});
        } else {
          // larger tone first so the difference is positive
          const bool swap = freqs[i] < freqs[j];
          out.push_back({std::abs(freqs[i] - freqs[j]), swap ? j : i, swap ? i : j, false});
        }
      }
  return out;
}

std::vector<double> mixing_set(const std::vector<double>& freqs) {
  std::vector<double> out;
  for (const auto& p : mixing_products(freqs)) {
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](double v) { return std::abs(v - p.ghz) <= kRel * std::max(1.0, v); });
    if (!seen) out.push_back(p.ghz);
  }
  return out;
}

CollisionReport validate_plan(const FrequencyPlan& plan) {
  plan.validate();
  CollisionReport rep;
  if (plan.freqs.size() < 2) return rep;
  const double g = plan.guard_mhz * 1e-3;
  const auto prods = mixing_products(plan.freqs);
  for (const auto& p : prods)
    for (std::size_t k = 0; k < plan.freqs.size(); ++k)
      if (within(p.ghz, plan.freqs[k], g))
        rep.collisions.push_back({CollisionKind::ModeHit, p.label() + " ~ " + tone(static_cast<int>(k)),
                                  {p.ghz, plan.freqs[k]}, 1e3 * std::abs(p.ghz - plan.freqs[k])});
  for (std::size_t a = 0; a < prods.size(); ++a)
    for (std::size_t b = a + 1; b < prods.size(); ++b)
      if (within(prods[a].ghz, prods[b].ghz, g))
        rep.collisions.push_back({CollisionKind::DegenerateMix, prods[a].label() + " ~ " + prods[b].label(),
                                  {prods[a].ghz, prods[b].ghz}, 1e3 * std::abs(prods[a].ghz - prods[b].ghz)});
  return rep;
}

double bandwidth_bound(int n, double guard_mhz) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  if (!(guard_mhz > 0.0)) throw ValidationError("guard", "must be > 0");
  return static_cast<double>(n) * n * guard_mhz * 1e-3;
}

FrequencyPlan search_plan(int n, double band_lo, double band_hi, double guard_mhz, std::uint64_t seed,
                          long node_limit) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  FrequencyPlan plan;
  plan.guard_mhz = guard_mhz;
  plan.band_lo = band_lo;
  plan.band_hi = band_hi;
  plan.validate();
  const double g = guard_mhz * 1e-3;
  const int steps = static_cast<int>(std::floor((band_hi - band_lo) / g * (1 + kRel)));
  std::vector<double> lattice(steps + 1);
  for (int k = 0; k <= steps; ++k) lattice[k] = band_lo + k * g;

  std::mt19937_64 rng(seed);
  std::vector<int> order(lattice.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> chosen, best;
  std::vector<double> prods;
  long nodes = 0;

  // true if tone c keeps the set collision-free; appends its products
  auto try_add = [&](double c) {
    for (double m : chosen)
      if (within(m, c, g)) return false;
    for (double p : prods)
      if (within(p, c, g)) return false;
    std::vector<double> fresh;
    for (double m : chosen) {
      fresh.push_back(m + c);
      fresh.push_back(std::abs(m - c));
    }
    for (std::size_t a = 0; a < fresh.size(); ++a) {
      for (double m : chosen)
        if (within(fresh[a], m, g)) return false;
      if (within(fresh[a], c, g)) return false;
      for (double p : prods)
        if (within(fresh[a], p, g)) return false;
      for (std::size_t b = 0; b < a; ++b)
        if (within(fresh[a], fresh[b], g)) return false;
    }
    prods.insert(prods.end(), fresh.begin(), fresh.end());
    chosen.push_back(c);
    return true;
  };
  auto pop = [&] {
    prods.resize(prods.size() - 2 * (chosen.size() - 1));
    chosen.pop_back();
  };

  // subsets are enumerated as increasing positions in the shuffled order
  bool found = false;
  std::function<void(std::size_t)> dfs = [&](std::size_t start) {
    if (found) return;
    if (chosen.size() > best.size()) best = chosen;
    if (static_cast<int>(chosen.size()) == n) {
      found = true;
      return;
    }
    for (std::size_t pos = start; pos < order.size() && !found; ++pos) {
      if (++nodes > node_limit) return;
      const int k = order[pos];
      if (!try_add(lattice[k])) continue;
      dfs(pos + 1);
      if (found) return;
      pop();
    }
  };
  dfs(0);

  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (!found) {
    FrequencyPlan partial = plan;
    partial.freqs = sorted(best);
    std::ostringstream os;
    os << "search_plan: no collision-free set of " << n << " tones in [" << band_lo << ", " << band_hi
       << "] GHz at guard " << guard_mhz << " MHz (best partial has " << best.size() << " tones"
       << (nodes > node_limit ? ", node limit reached" : "") << ")";
    throw PlanInfeasible(os.str(), partial);
  }
  plan.freqs = sorted(chosen);
  return plan;
}

}  // namespace embamp
