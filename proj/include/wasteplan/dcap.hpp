#pragma once

// Hydrant-sited dumpster program model: district throughput estimates,
// fleet sizing against a collection-frequency target, max-min dispersion
// placement over hydrant sites, service metrics, and the borough-level
// cost/diversion projection.
//
// Reproducibility contract. Placement depends on the RNG only for the
// first pick. The generator is std::mt19937_64 seeded with `seed`; the
// first site is the hydrant at index `next_u64() mod n` into the id-sorted
// hydrant list. random_place draws a partial Fisher-Yates shuffle of the
// id-sorted list with j = i + next_u64() mod (n - i). Per-district seeds
// are derived as splitmix64(global_seed XOR fnv1a64(district_id)). All of
// this is part of the external contract so plans can be replayed by other
// implementations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wasteplan/errors.hpp"
#include "wasteplan/geo.hpp"
#include "wasteplan/ingest.hpp"
#include "wasteplan/mode.hpp"

namespace wasteplan::dcap {

struct CapacityParams {
  double tons_per_site = 1.5;          // one 12 yd^3 dumpster block holds 1.5 t
  double dumpster_unit_cost = 8310.0;  // $ per 12 yd^3 block, installed
  double bin_unit_cost = 24.0;         // $ per household compost bin, installed
  double target_collections_per_month = 10.0;
};

inline void validate(const CapacityParams& cap) {
  if (!(cap.tons_per_site > 0) || !(cap.dumpster_unit_cost > 0) ||
      !(cap.bin_unit_cost > 0) || !(cap.target_collections_per_month > 0)) {
    throw std::invalid_argument("capacity parameters must be strictly positive");
  }
}

/// Monthly tonnage the district's dumpsters must absorb: the share of peak
/// monthly refuse attributable to lots with three or more units. The
/// consistent mode weighs by residential units; paper_literal divides a lot
/// count by a unit count, exactly as printed in the source model.
inline double estimate_throughput(const ingest::DistrictProfile& d,
                                  formula_mode mode = formula_mode::consistent) {
  if (d.total_units <= 0) {
    throw std::invalid_argument("degenerate district " + d.district_id +
                                ": no residential units");
  }
  const double numerator = mode == formula_mode::paper_literal
                               ? static_cast<double>(d.lots_3plus_count)
                               : static_cast<double>(d.units_on_3plus_lots);
  return numerator / static_cast<double>(d.total_units) * d.peak_monthly_refuse_tons;
}

/// Tons per month that each hydrant would receive if every hydrant held a site.
inline double hydrant_load_ratio(double throughput_tons, long n_hydrants) {
  if (n_hydrants < 1) {
    throw std::invalid_argument("hydrant_load_ratio: district has no hydrants");
  }
  return throughput_tons / static_cast<double>(n_hydrants);
}

/// How many times per month a site fills up under the given per-site load.
inline double fill_rate(double load_ratio_tons, const CapacityParams& cap) {
  return load_ratio_tons / cap.tons_per_site;
}

struct FleetChoice {
  long count = 1;
  double collection_frequency = 0;  // per month at the chosen count
  bool target_met = true;
};

/// Smallest site count whose collection frequency stays within the target,
/// clamped to [1, n_hydrants]. When even n_hydrants sites cannot meet the
/// target the clamp wins and the achieved frequency is reported.
inline FleetChoice choose_dumpster_count(double throughput_tons, long n_hydrants,
                                         const CapacityParams& cap) {
  if (n_hydrants < 1) {
    throw std::invalid_argument("choose_dumpster_count: no hydrants available");
  }
  validate(cap);
  const double per_site_target = cap.tons_per_site * cap.target_collections_per_month;
  long n = throughput_tons <= 0
               ? 1
               : static_cast<long>(std::ceil(throughput_tons / per_site_target));
  // Guard the ceil against rounding on exact multiples.
  while (n > 1 && throughput_tons <= static_cast<double>(n - 1) * per_site_target) --n;
  if (n < 1) n = 1;
  while (throughput_tons > static_cast<double>(n) * per_site_target && n < n_hydrants) ++n;

  FleetChoice choice;
  choice.count = std::min(n, n_hydrants);
  choice.collection_frequency =
      fill_rate(hydrant_load_ratio(throughput_tons, choice.count), cap);
  choice.target_met =
      choice.collection_frequency <= cap.target_collections_per_month;
  return choice;
}

struct PlacementPlan {
  std::string district_id;
  std::vector<std::string> selected_hydrant_ids;  // in selection order
  double mean_min_distance = 0;             // meters; filled by the caller
  double required_collection_frequency = 0; // per month; filled by the caller
  std::uint64_t seed = 0;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seed for one district's placement, independent of processing order.
inline std::uint64_t district_seed(std::uint64_t global_seed,
                                   std::string_view district_id) {
  return splitmix64(global_seed ^ fnv1a64(district_id));
}

namespace detail {

inline std::vector<ingest::Hydrant> sorted_unique_by_id(
    std::vector<ingest::Hydrant> hydrants) {
  std::sort(hydrants.begin(), hydrants.end(),
            [](const ingest::Hydrant& a, const ingest::Hydrant& b) {
              return a.id < b.id;
            });
  for (std::size_t i = 1; i < hydrants.size(); ++i) {
    if (hydrants[i].id == hydrants[i - 1].id) {
      throw std::invalid_argument("duplicate hydrant id `" + hydrants[i].id + "`");
    }
  }
  return hydrants;
}

inline void check_selection_size(std::size_t n_hydrants, long n_select) {
  if (n_select < 1 || static_cast<std::size_t>(n_select) > n_hydrants) {
    throw std::invalid_argument(
        "selection size " + std::to_string(n_select) + " out of range [1, " +
        std::to_string(n_hydrants) + "]");
  }
}

}  // namespace detail

/// Max-min dispersion placement: after a seeded uniform first pick, each
/// round selects the hydrant whose minimum great-circle distance to the
/// already-selected set is largest. Ties go to the smallest hydrant id.
inline PlacementPlan greedy_place(const std::vector<ingest::Hydrant>& hydrants,
                                  long n_select, std::uint64_t seed) {
  detail::check_selection_size(hydrants.size(), n_select);
  const std::vector<ingest::Hydrant> pool = detail::sorted_unique_by_id(hydrants);
  const std::size_t n = pool.size();

  std::mt19937_64 rng(seed);
  const std::size_t first = static_cast<std::size_t>(rng() % n);

  std::vector<bool> selected(n, false);
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());

  PlacementPlan plan;
  plan.seed = seed;
  plan.district_id = pool[first].district_id;
  plan.selected_hydrant_ids.reserve(static_cast<std::size_t>(n_select));

  std::size_t current = first;
  selected[current] = true;
  plan.selected_hydrant_ids.push_back(pool[current].id);

  while (plan.selected_hydrant_ids.size() < static_cast<std::size_t>(n_select)) {
    // Fold the newest site into the running minimum distances, then take
    // the argmax; scanning in id order makes strict > the tie rule.
    std::size_t best = n;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (selected[i]) continue;
      const double d =
          geo::haversine_distance(pool[i].location, pool[current].location);
      if (d < min_dist[i]) min_dist[i] = d;
      if (min_dist[i] > best_dist) {
        best_dist = min_dist[i];
        best = i;
      }
    }
    current = best;
    selected[current] = true;
    plan.selected_hydrant_ids.push_back(pool[current].id);
  }
  return plan;
}

/// Uniform sample of n_select hydrants without replacement; the benchmark
/// baseline for greedy_place. Same seed, same plan.
inline PlacementPlan random_place(const std::vector<ingest::Hydrant>& hydrants,
                                  long n_select, std::uint64_t seed) {
  detail::check_selection_size(hydrants.size(), n_select);
  std::vector<ingest::Hydrant> pool = detail::sorted_unique_by_id(hydrants);
  const std::size_t n = pool.size();

  std::mt19937_64 rng(seed);
  PlacementPlan plan;
  plan.seed = seed;
  plan.district_id = pool.front().district_id;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n_select); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(pool[i], pool[j]);
    plan.selected_hydrant_ids.push_back(pool[i].id);
  }
  return plan;
}

/// Mean over lots of the distance to their closest selected hydrant, in
/// meters. An empty lot list yields 0 (callers should warn).
inline double mean_min_distance(const std::vector<ingest::Lot>& lots,
                                const std::vector<ingest::Hydrant>& selected) {
  if (selected.empty()) {
    throw std::invalid_argument("mean_min_distance: empty selection");
  }
  if (lots.empty()) return 0.0;
  double total = 0.0;
  for (const ingest::Lot& lot : lots) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const ingest::Hydrant& h : selected) {
      nearest = std::min(nearest,
                         geo::haversine_distance(lot.location, h.location));
    }
    total += nearest;
  }
  return total / static_cast<double>(lots.size());
}

/// Resolves a plan's hydrant ids back to hydrant records, in plan order.
inline std::vector<ingest::Hydrant> select_by_ids(
    const std::vector<ingest::Hydrant>& hydrants,
    const std::vector<std::string>& ids) {
  std::vector<ingest::Hydrant> out;
  out.reserve(ids.size());
  for (const std::string& id : ids) {
    const auto it = std::find_if(
        hydrants.begin(), hydrants.end(),
        [&](const ingest::Hydrant& h) { return h.id == id; });
    if (it == hydrants.end()) {
      throw std::invalid_argument("unknown hydrant id `" + id + "` in plan");
    }
    out.push_back(*it);
  }
  return out;
}

struct BoroughStats {
  ingest::Borough borough = ingest::Borough::manhattan;
  long dumpsters_placed = 0;      // 12 yd^3 blocks across the borough
  long bin_units = 0;             // residential units on single/two-family lots
  double annual_compost_tons = 0; // compostable tonnage produced per year
};

struct BoroughOutcome {
  ingest::Borough borough = ingest::Borough::manhattan;
  double current_efficiency = 0;
  double projected_efficiency = 0;
  double delta_tons_diverted = 0;  // additional compost captured per year
  double cost_dumpsters = 0;       // $
  double cost_bins = 0;            // $
  double cost_total = 0;           // $
  std::optional<double> cost_per_ton;  // $ per yearly ton diverted
  bool zero_benefit = false;
};

/// One-time program cost and the diversion gain under the assumption that
/// compost sorting rises to the borough's current recycling efficiency.
inline BoroughOutcome project_dcap_outcome(const BoroughStats& stats,
                                           const ingest::CompositionProfile& comp,
                                           const CapacityParams& cap) {
  validate(cap);
  if (stats.borough != comp.borough) {
    throw std::invalid_argument("borough mismatch between stats and composition");
  }
  BoroughOutcome out;
  out.borough = stats.borough;
  out.current_efficiency = comp.cur_compost_eff;
  out.projected_efficiency = comp.cur_recycling_eff;
  out.delta_tons_diverted =
      (out.projected_efficiency - out.current_efficiency) * stats.annual_compost_tons;
  out.cost_dumpsters = static_cast<double>(stats.dumpsters_placed) * cap.dumpster_unit_cost;
  out.cost_bins = static_cast<double>(stats.bin_units) * cap.bin_unit_cost;
  out.cost_total = out.cost_dumpsters + out.cost_bins;
  if (out.delta_tons_diverted > 0) {
    out.cost_per_ton = out.cost_total / out.delta_tons_diverted;
  } else {
    out.zero_benefit = true;
  }
  return out;
}

}  // namespace wasteplan::dcap
