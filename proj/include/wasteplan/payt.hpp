#pragma once

// Pay-As-You-Throw sticker-pricing model for single/two-family curbside
// collection. Residents buy a sticker for every 16-gallon refuse bag; the
// sticker price p drives sorting efficiency, disposal costs, enforcement
// costs, sticker revenue, and two savings measures, which combine into a
// weighted utility maximized over p.
//
// Model sketch (annual, dollars and tons):
//   e(p)   sorting efficiency, linear from base_efficiency at p = 0 through
//          reference_efficiency at reference_price, clamped at 1
//   d_c = e(p) * t_c,  d_r = e(p) * t_r,  d_g = t_a - d_c - d_r
//   C = (collect_compost + process_compost) * d_c
//   R = (collect_recycling + process_recycling) * d_r
//   G = in-capacity unit cost on tons up to the landfill capacity, plus the
//       export surcharge on the excess
//   E = enforcement_base * elasticity * p / bag_base_cost
//   T = C + R + G + E
//   r = p * d_g / tons_per_bag         (stickers actually bought)
//   S_S = T0 - T(p)                    (societal savings)
//   S_G = T0 - T(p) + r(p)             (government savings)
//   U = gov_weight * S_G + societal_weight * S_S + diversion_weight * (d_c + d_r)
//
// Two printed forms of the source model are internally inconsistent and are
// kept behind formula_mode::paper_literal for auditability:
//   - the in-capacity refuse unit cost (printed: process_recycling +
//     process_refuse; consistent: collect_refuse + process_refuse, matching
//     how C and R sum collection and processing),
//   - government savings (printed: T0 - (r - T), which grows with expense;
//     consistent: T0 - T + r),
//   - the utility diversion term (printed: constant t_c + t_r; consistent:
//     the price-dependent d_c(p) + d_r(p)).
//
// All functions are pure; money is double-precision dollars, tonnage
// double-precision tons.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wasteplan/errors.hpp"
#include "wasteplan/mode.hpp"

namespace wasteplan::payt {

struct PaytConstants {
  // Collection and processing costs, $/ton.
  double collect_compost = 123.0;
  double collect_recycling = 167.0;
  double collect_refuse = 86.0;
  double process_compost = 80.0;
  double process_recycling = 39.0;
  double process_refuse = 30.0;
  double export_refuse = 164.0;  // surcharge on refuse beyond local capacity

  double landfill_capacity_tons = 98'940.0;  // refuse storable locally per year

  double enforcement_base = 16'179'000.0;  // $/year at today's bag price
  double enforcement_elasticity = 3.05;    // % enforcement growth per % price growth
  double bag_base_cost = 12.35;            // $ effectively paid per bag today

  // Pre-program composting: tiny share sorted, at premium unit costs.
  double current_compost_efficiency = 0.025;
  double current_compost_collect = 602.0;  // $/ton
  double current_compost_process = 132.0;  // $/ton

  double tons_per_bag = 0.01;  // weight of one 16-gallon refuse bag

  // Efficiency response: base at zero price increase, reference point from
  // an observed unit-pricing program.
  double base_efficiency = 0.54;
  double reference_efficiency = 0.89;
  double reference_price = 2.75;  // $ per bag at the reference efficiency
};

inline void validate(const PaytConstants& k) {
  const double costs[] = {k.collect_compost,  k.collect_recycling,
                          k.collect_refuse,   k.process_compost,
                          k.process_recycling, k.process_refuse,
                          k.export_refuse,    k.landfill_capacity_tons,
                          k.enforcement_base, k.enforcement_elasticity,
                          k.current_compost_collect, k.current_compost_process};
  for (double c : costs) {
    if (!(c >= 0) || !std::isfinite(c)) {
      throw std::invalid_argument("cost constants must be finite and >= 0");
    }
  }
  if (!(k.tons_per_bag > 0) || !(k.bag_base_cost > 0)) {
    throw std::invalid_argument("tons_per_bag and bag_base_cost must be positive");
  }
  if (!(0 <= k.current_compost_efficiency &&
        k.current_compost_efficiency <= k.base_efficiency &&
        k.base_efficiency < k.reference_efficiency &&
        k.reference_efficiency <= 1.0)) {
    throw std::invalid_argument(
        "efficiencies must satisfy 0 <= current <= base < reference <= 1");
  }
  if (!(k.reference_price > 0)) {
    throw std::invalid_argument("reference_price must be positive");
  }
}

struct WasteTotals {
  double compost_tons = 0;    // produced per year
  double recycling_tons = 0;
  double refuse_tons = 0;

  double total() const { return compost_tons + recycling_tons + refuse_tons; }
};

inline void validate(const WasteTotals& t) {
  if (!(t.compost_tons >= 0) || !(t.recycling_tons >= 0) || !(t.refuse_tons >= 0) ||
      !std::isfinite(t.total())) {
    throw std::invalid_argument("waste totals must be finite and >= 0");
  }
}

struct PolicyWeights {
  double gov_weight = 1.0;        // utility per $ of government savings
  double societal_weight = 0.0;   // utility per $ of societal savings
  double diversion_weight = 0.0;  // utility per ton diverted from refuse
  double price_min = 0.0;
  double price_max = 5.0;
};

inline void validate(const PolicyWeights& w) {
  if (!(w.gov_weight >= 0) || !(w.societal_weight >= 0) || !(w.diversion_weight >= 0)) {
    throw std::invalid_argument("weights must be >= 0");
  }
  if (!(w.price_min >= 0) || !(w.price_min < w.price_max)) {
    throw std::invalid_argument("price bounds must satisfy 0 <= min < max");
  }
}

/// Sorting efficiency at sticker price p: linear through the base and
/// reference anchors, clamped at full efficiency. Written so that the two
/// anchor prices reproduce their efficiencies exactly.
inline double efficiency(double p, const PaytConstants& k) {
  if (!(p >= 0)) {
    throw std::invalid_argument("efficiency: price must be >= 0");
  }
  const double rise = k.reference_efficiency - k.base_efficiency;
  return std::min(1.0, k.base_efficiency + rise * (p / k.reference_price));
}

/// Price at which e(p) reaches 1 and diversion saturates.
inline double efficiency_saturation_price(const PaytConstants& k) {
  return (1.0 - k.base_efficiency) * k.reference_price /
         (k.reference_efficiency - k.base_efficiency);
}

struct SortedTonnage {
  double compost = 0;    // d_c, tons correctly sorted as compost
  double recycling = 0;  // d_r
  double refuse = 0;     // d_g, everything else
};

/// Splits the yearly waste totals by where they end up at price p.
/// Conservation holds by construction: the three parts sum to the total.
inline SortedTonnage sorted_tonnages(double p, const WasteTotals& t,
                                     const PaytConstants& k) {
  const double e = efficiency(p, k);
  SortedTonnage s;
  s.compost = e * t.compost_tons;
  s.recycling = e * t.recycling_tons;
  s.refuse = t.total() - (s.compost + s.recycling);
  return s;
}

inline double compost_cost(double compost_tons, const PaytConstants& k) {
  return (k.collect_compost + k.process_compost) * compost_tons;
}

inline double recycle_cost(double recycling_tons, const PaytConstants& k) {
  return (k.collect_recycling + k.process_recycling) * recycling_tons;
}

/// Refuse disposal: a flat unit cost while the tonnage fits in the local
/// landfill capacity, plus the export surcharge on every ton beyond it.
/// Continuous at the capacity kink.
inline double refuse_cost(double refuse_tons, const PaytConstants& k,
                          formula_mode mode = formula_mode::consistent) {
  const double unit = mode == formula_mode::paper_literal
                          ? k.process_recycling + k.process_refuse
                          : k.collect_refuse + k.process_refuse;
  const double cap = k.landfill_capacity_tons;
  if (refuse_tons <= cap) {
    return unit * refuse_tons;
  }
  return unit * cap + (unit + k.export_refuse) * (refuse_tons - cap);
}

/// Enforcement spending scales with the relative price of legal disposal.
inline double enforcement_cost(double p, const PaytConstants& k) {
  if (!(p >= 0)) {
    throw std::invalid_argument("enforcement_cost: price must be >= 0");
  }
  return k.enforcement_base * k.enforcement_elasticity * p / k.bag_base_cost;
}

/// Total yearly disposal expense under the program at price p.
inline double total_expense(double p, const WasteTotals& t, const PaytConstants& k,
                            formula_mode mode = formula_mode::consistent) {
  const SortedTonnage s = sorted_tonnages(p, t, k);
  return compost_cost(s.compost, k) + recycle_cost(s.recycling, k) +
         refuse_cost(s.refuse, k, mode) + enforcement_cost(p, k);
}

/// Pre-program yearly expense. Composting runs at its current (low)
/// efficiency and premium unit costs; recycling already sorts at the base
/// efficiency; the refuse stream carries everything unsorted, including the
/// compost share the program would capture. No enforcement component.
inline double baseline_expense(const WasteTotals& t, const PaytConstants& k,
                               formula_mode mode = formula_mode::consistent) {
  const double current_compost = k.current_compost_efficiency * t.compost_tons;
  const double current_recycling = k.base_efficiency * t.recycling_tons;
  const double current_refuse = t.total() - current_compost - current_recycling;
  const double compost_expense =
      current_compost * (k.current_compost_collect + k.current_compost_process);
  return compost_expense + recycle_cost(current_recycling, k) +
         refuse_cost(current_refuse, k, mode);
}

/// Price at which the refuse stream shrinks to exactly the landfill
/// capacity, when that happens before diversion saturates.
inline std::optional<double> landfill_crossing_price(const WasteTotals& t,
                                                     const PaytConstants& k) {
  const double divertible = t.compost_tons + t.recycling_tons;
  if (divertible <= 0) return std::nullopt;
  // d_g(p) = total - e(p) * divertible = capacity
  const double e_at_cap = (t.total() - k.landfill_capacity_tons) / divertible;
  if (e_at_cap <= k.base_efficiency || e_at_cap > 1.0) return std::nullopt;
  const double slope = (k.reference_efficiency - k.base_efficiency) / k.reference_price;
  return (e_at_cap - k.base_efficiency) / slope;
}

/// Sticker revenue: one sticker per bag of refuse actually set out at p.
inline double revenue(double p, const WasteTotals& t, const PaytConstants& k) {
  return p * sorted_tonnages(p, t, k).refuse / k.tons_per_bag;
}

/// Societal savings: expense avoided relative to the pre-program baseline.
/// Sticker revenue is excluded as a transfer within the city.
inline double societal_savings(double p, const WasteTotals& t, const PaytConstants& k,
                               formula_mode mode = formula_mode::consistent) {
  return baseline_expense(t, k, mode) - total_expense(p, t, k, mode);
}

/// Government savings: avoided expense plus sticker revenue. The literal
/// form subtracts net revenue from the baseline as printed, T0 - (r - T).
inline double gov_savings(double p, const WasteTotals& t, const PaytConstants& k,
                          formula_mode mode = formula_mode::consistent) {
  const double t0 = baseline_expense(t, k, mode);
  const double expense = total_expense(p, t, k, mode);
  const double r = revenue(p, t, k);
  if (mode == formula_mode::paper_literal) {
    return t0 - (r - expense);
  }
  return t0 - expense + r;
}

/// Tons kept out of the refuse stream at price p.
inline double diverted_tons(double p, const WasteTotals& t, const PaytConstants& k) {
  const SortedTonnage s = sorted_tonnages(p, t, k);
  return s.compost + s.recycling;
}

/// Weighted objective over the policy goals. The literal form scores
/// diversion with the constant t_c + t_r, which makes the diversion weight
/// irrelevant to the optimum; the consistent form uses d_c(p) + d_r(p).
inline double utility(double p, const PolicyWeights& w, const WasteTotals& t,
                      const PaytConstants& k,
                      formula_mode mode = formula_mode::consistent) {
  const double diversion = mode == formula_mode::paper_literal
                               ? t.compost_tons + t.recycling_tons
                               : diverted_tons(p, t, k);
  return w.gov_weight * gov_savings(p, t, k, mode) +
         w.societal_weight * societal_savings(p, t, k, mode) +
         w.diversion_weight * diversion;
}

/// Maps decision-maker answers to weights:
///   A: most the government would pay to divert one ton from landfills;
///   B: most it would pay to make single/two-family residents $1 wealthier.
/// gov_weight is normalized to 1, diversion_weight = A, and societal_weight
/// = B / (1 - B), since spending B buys a net societal gain of 1 - B.
inline PolicyWeights elicit_weights(double a_dollars_per_ton, double b_dollars,
                                    double price_min = 0.0, double price_max = 5.0) {
  if (!(a_dollars_per_ton >= 0)) {
    throw std::invalid_argument("elicit_weights: A must be >= 0");
  }
  if (!(b_dollars >= 0) || b_dollars >= 1.0) {
    throw std::invalid_argument("elicit_weights: B must be in [0, 1)");
  }
  PolicyWeights w;
  w.gov_weight = 1.0;
  w.diversion_weight = a_dollars_per_ton;
  w.societal_weight = b_dollars / (1.0 - b_dollars);
  w.price_min = price_min;
  w.price_max = price_max;
  return w;
}

struct OptimizeResult {
  double price = 0;          // p*, the maximizer
  double utility_value = 0;  // U(p*)
  double efficiency = 0;
  double diverted = 0;       // tons at p*
  double gov_savings = 0;
  double societal_savings = 0;
  double revenue = 0;
  long evaluations = 0;      // objective evaluations spent
};

/// Global maximizer of the utility over [price_min, price_max], within
/// $0.005 of the true argmax. The objective is piecewise quadratic in p
/// with at most two interior kinks (efficiency saturation and the landfill
/// capacity crossing), so a dense grid scan plus local refinement is exact
/// enough; kink and boundary points are evaluated exactly and returned
/// verbatim when they tie the optimum. Deterministic.
inline OptimizeResult optimize_price(const PolicyWeights& w, const WasteTotals& t,
                                     const PaytConstants& k,
                                     formula_mode mode = formula_mode::consistent) {
  validate(w);
  validate(k);
  validate(t);

  long evaluations = 0;
  const auto eval = [&](double p) {
    const double u = utility(p, w, t, k, mode);
    ++evaluations;
    if (!std::isfinite(u)) {
      throw numeric_error("non-finite objective at p = " + std::to_string(p));
    }
    return u;
  };

  const double lo = w.price_min;
  const double hi = w.price_max;
  const double step = 0.005;

  // Dense scan; strict improvement keeps the leftmost of tied maxima.
  double best_p = lo;
  double best_u = eval(lo);
  const long cells = static_cast<long>(std::ceil((hi - lo) / step));
  for (long i = 1; i <= cells; ++i) {
    const double p = std::min(lo + static_cast<double>(i) * step, hi);
    const double u = eval(p);
    if (u > best_u) {
      best_u = u;
      best_p = p;
    }
  }

  // Ternary refinement around the best cell.
  double a = std::max(lo, best_p - step);
  double b = std::min(hi, best_p + step);
  for (int iter = 0; iter < 200 && (b - a) > 1e-12; ++iter) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (eval(m1) < eval(m2)) {
      a = m1;
    } else {
      b = m2;
    }
  }
  const double refined = 0.5 * (a + b);
  const double refined_u = eval(refined);
  if (refined_u > best_u) {
    best_u = refined_u;
    best_p = refined;
  }

  // Exact candidates: bounds and interior kinks, in increasing order.
  std::vector<double> exact{lo, hi};
  const double saturation = efficiency_saturation_price(k);
  if (saturation > lo && saturation < hi) exact.push_back(saturation);
  if (const auto crossing = landfill_crossing_price(t, k)) {
    if (*crossing > lo && *crossing < hi) exact.push_back(*crossing);
  }
  std::sort(exact.begin(), exact.end());

  double final_p = best_p;
  double final_u = best_u;
  for (double p : exact) {
    const double u = eval(p);
    if (u > final_u) {
      final_u = u;
      final_p = p;
    }
  }
  // Snap to the leftmost exact point that ties the maximum, so kinks and
  // bounds are reported verbatim when they are optimal.
  const double tie_tol = 1e-9 * std::max(1.0, std::fabs(final_u));
  for (double p : exact) {
    const double u = eval(p);
    if (u >= final_u - tie_tol) {
      final_p = p;
      final_u = u;
      break;
    }
  }

  OptimizeResult res;
  res.price = final_p;
  res.utility_value = final_u;
  res.efficiency = efficiency(final_p, k);
  res.diverted = diverted_tons(final_p, t, k);
  res.gov_savings = gov_savings(final_p, t, k, mode);
  res.societal_savings = societal_savings(final_p, t, k, mode);
  res.revenue = revenue(final_p, t, k);
  res.evaluations = evaluations;
  return res;
}

struct SweepCell {
  double a = 0;  // $/ton answer
  double b = 0;  // $ answer
  double price = 0;
  double utility_value = 0;
};

/// Optimal price for every (A, B) elicitation pair, row-major over A then B.
inline std::vector<SweepCell> sweep_ab(const std::vector<double>& a_values,
                                       const std::vector<double>& b_values,
                                       const WasteTotals& t, const PaytConstants& k,
                                       formula_mode mode = formula_mode::consistent,
                                       double price_min = 0.0, double price_max = 5.0) {
  if (a_values.empty() || b_values.empty()) {
    throw std::invalid_argument("sweep_ab: empty grid");
  }
  std::vector<SweepCell> out;
  out.reserve(a_values.size() * b_values.size());
  for (double a : a_values) {
    for (double b : b_values) {
      const PolicyWeights w = elicit_weights(a, b, price_min, price_max);
      const OptimizeResult r = optimize_price(w, t, k, mode);
      out.push_back({a, b, r.price, r.utility_value});
    }
  }
  return out;
}

struct CurvePoint {
  double price = 0;
  double efficiency = 0;
  double compost_tons = 0;
  double recycling_tons = 0;
  double refuse_tons = 0;
  double compost_cost = 0;
  double recycling_cost = 0;
  double refuse_cost = 0;
  double enforcement_cost = 0;
  double total_expense = 0;
  double revenue = 0;
  double gov_savings = 0;
  double societal_savings = 0;
};

/// Tabulates every model quantity on a price grid, for plotting.
inline std::vector<CurvePoint> curve(const std::vector<double>& prices,
                                     const WasteTotals& t, const PaytConstants& k,
                                     formula_mode mode = formula_mode::consistent) {
  std::vector<CurvePoint> out;
  out.reserve(prices.size());
  const double t0 = baseline_expense(t, k, mode);
  for (double p : prices) {
    const SortedTonnage s = sorted_tonnages(p, t, k);
    CurvePoint c;
    c.price = p;
    c.efficiency = efficiency(p, k);
    c.compost_tons = s.compost;
    c.recycling_tons = s.recycling;
    c.refuse_tons = s.refuse;
    c.compost_cost = compost_cost(s.compost, k);
    c.recycling_cost = recycle_cost(s.recycling, k);
    c.refuse_cost = refuse_cost(s.refuse, k, mode);
    c.enforcement_cost = enforcement_cost(p, k);
    c.total_expense = c.compost_cost + c.recycling_cost + c.refuse_cost +
                      c.enforcement_cost;
    c.revenue = revenue(p, t, k);
    c.societal_savings = t0 - c.total_expense;
    c.gov_savings = mode == formula_mode::paper_literal
                        ? t0 - (c.revenue - c.total_expense)
                        : t0 - c.total_expense + c.revenue;
    out.push_back(c);
  }
  return out;
}

/// Evenly spaced price grid [lo, hi] with the given step; the last point is
/// clamped to hi.
inline std::vector<double> price_grid(double lo, double hi, double step) {
  if (!(step > 0) || !(lo >= 0) || !(lo <= hi)) {
    throw std::invalid_argument("price_grid: need 0 <= lo <= hi and step > 0");
  }
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  for (long i = 0; i <= n; ++i) {
    out.push_back(std::min(lo + static_cast<double>(i) * step, hi));
  }
  if (out.back() < hi) out.push_back(hi);
  return out;
}

struct Scenario {
  PaytConstants constants;
  WasteTotals totals;
};

/// Scenario file: JSON with a required `waste_totals` object and an
/// optional `constants` object overriding any PaytConstants field by name.
inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("cannot open file: " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(path + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("waste_totals")) {
    throw data_error(path + ": missing `waste_totals`");
  }

  Scenario sc;
  const auto& wt = doc["waste_totals"];
  for (const char* key : {"compost_tons", "recycling_tons", "refuse_tons"}) {
    if (!wt.contains(key) || !wt[key].is_number()) {
      throw data_error(path + ": waste_totals." + key + " must be a number");
    }
  }
  sc.totals.compost_tons = wt["compost_tons"].get<double>();
  sc.totals.recycling_tons = wt["recycling_tons"].get<double>();
  sc.totals.refuse_tons = wt["refuse_tons"].get<double>();

  if (doc.contains("constants")) {
    const auto& c = doc["constants"];
    if (!c.is_object()) {
      throw data_error(path + ": `constants` must be an object");
    }
    const std::pair<const char*, double PaytConstants::*> fields[] = {
        {"collect_compost", &PaytConstants::collect_compost},
        {"collect_recycling", &PaytConstants::collect_recycling},
        {"collect_refuse", &PaytConstants::collect_refuse},
        {"process_compost", &PaytConstants::process_compost},
        {"process_recycling", &PaytConstants::process_recycling},
        {"process_refuse", &PaytConstants::process_refuse},
        {"export_refuse", &PaytConstants::export_refuse},
        {"landfill_capacity_tons", &PaytConstants::landfill_capacity_tons},
        {"enforcement_base", &PaytConstants::enforcement_base},
        {"enforcement_elasticity", &PaytConstants::enforcement_elasticity},
        {"bag_base_cost", &PaytConstants::bag_base_cost},
        {"current_compost_efficiency", &PaytConstants::current_compost_efficiency},
        {"current_compost_collect", &PaytConstants::current_compost_collect},
        {"current_compost_process", &PaytConstants::current_compost_process},
        {"tons_per_bag", &PaytConstants::tons_per_bag},
        {"base_efficiency", &PaytConstants::base_efficiency},
        {"reference_efficiency", &PaytConstants::reference_efficiency},
        {"reference_price", &PaytConstants::reference_price},
    };
    for (const auto& [key, value] : c.items()) {
      bool known = false;
      for (const auto& [name, member] : fields) {
        if (key == name) {
          if (!value.is_number()) {
            throw data_error(path + ": constants." + key + " must be a number");
          }
          sc.constants.*member = value.get<double>();
          known = true;
          break;
        }
      }
      if (!known) {
        throw data_error(path + ": unknown constant `" + key + "`");
      }
    }
  }

  try {
    validate(sc.constants);
    validate(sc.totals);
  } catch (const std::invalid_argument& e) {
    throw data_error(path + ": " + e.what());
  }
  return sc;
}

}  // namespace wasteplan::payt
