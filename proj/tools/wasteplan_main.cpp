// wasteplan: command-line front end for the dumpster-placement and
// sticker-price models. Emits plain CSV/JSON for external plotting; every
// command is a pure function of its input files, flags, and seed, so
// repeated runs produce byte-identical output trees.
//
// Exit codes: 0 success, 1 usage error, 2 data validation error,
// 3 numerical error.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wasteplan/dcap.hpp"
#include "wasteplan/errors.hpp"
#include "wasteplan/ingest.hpp"
#include "wasteplan/payt.hpp"

namespace fs = std::filesystem;
using namespace wasteplan;
using ordered_json = nlohmann::ordered_json;

namespace {

struct DataPaths {
  std::string hydrants;
  std::string districts;
  std::string zones;
  std::string lots;
  std::string tonnage;
  std::string composition;
  std::string scenario;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// Presentation rounding: money is reported in whole cents.
double cents(double dollars) { return std::round(dollars * 100.0) / 100.0; }

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw data_error("cannot write file: " + path.string());
  }
  out << content;
}

const char* mode_name(formula_mode mode) {
  return mode == formula_mode::paper_literal ? "paper_literal" : "consistent";
}

struct City {
  std::vector<ingest::Hydrant> hydrants;
  std::vector<ingest::Lot> lots;
  std::vector<ingest::DistrictShape> districts;
  std::vector<ingest::ZoneShape> zones;
  std::vector<ingest::TonnageRecord> tonnage;
  std::vector<ingest::CompositionProfile> composition;
  ingest::AssemblyResult assembly;
};

City load_city(const DataPaths& paths) {
  const std::pair<const char*, const std::string*> required[] = {
      {"--hydrants", &paths.hydrants},
      {"--districts", &paths.districts},
      {"--lots", &paths.lots},
      {"--tonnage", &paths.tonnage}};
  for (const auto& [label, path] : required) {
    if (path->empty()) {
      throw std::invalid_argument(std::string(label) + " is required for this command");
    }
  }
  City city;
  city.hydrants = ingest::load_hydrants(paths.hydrants);
  city.districts = ingest::load_districts(paths.districts);
  city.lots = ingest::load_lots(paths.lots);
  city.tonnage = ingest::load_tonnage(paths.tonnage);
  if (!paths.zones.empty()) {
    city.zones = ingest::load_zones(paths.zones);
  } else {
    std::cerr << "warning: no --zones file; every hydrant is treated as "
                 "dumpster-serviced\n";
  }
  if (!paths.composition.empty()) {
    city.composition = ingest::load_composition(paths.composition);
  }
  city.assembly = ingest::build_district_profiles(city.hydrants, city.lots,
                                                  city.districts, city.tonnage,
                                                  city.zones);
  return city;
}

int cmd_validate(const DataPaths& paths) {
  const City city = load_city(paths);
  std::printf("hydrants: %zu records (%s)\n", city.hydrants.size(),
              paths.hydrants.c_str());
  std::printf("districts: %zu shapes (%s)\n", city.districts.size(),
              paths.districts.c_str());
  if (!paths.zones.empty()) {
    std::printf("zones: %zu shapes (%s)\n", city.zones.size(), paths.zones.c_str());
  }
  std::printf("lots: %zu records (%s)\n", city.lots.size(), paths.lots.c_str());
  std::printf("tonnage: %zu records (%s)\n", city.tonnage.size(),
              paths.tonnage.c_str());
  if (!paths.composition.empty()) {
    std::printf("composition: %zu records (%s)\n", city.composition.size(),
                paths.composition.c_str());
  }
  if (!paths.scenario.empty()) {
    const auto sc = payt::load_scenario(paths.scenario);
    std::printf("scenario: totals %.1f / %.1f / %.1f tons per year (%s)\n",
                sc.totals.compost_tons, sc.totals.recycling_tons,
                sc.totals.refuse_tons, paths.scenario.c_str());
  }
  std::printf("assembly: %ld hydrants assigned, %ld excluded; "
              "%ld lots assigned, %ld excluded\n",
              city.assembly.hydrants_assigned, city.assembly.hydrants_excluded,
              city.assembly.lots_assigned, city.assembly.lots_excluded);
  for (const auto& w : city.assembly.warnings) {
    std::printf("warning: %s\n", w.c_str());
  }
  std::printf("ok\n");
  return 0;
}

std::vector<ingest::Hydrant> service_area_hydrants(
    const ingest::DistrictProfile& profile) {
  std::vector<ingest::Hydrant> out;
  for (const auto& h : profile.hydrants) {
    if (h.in_dumpster_area) out.push_back(h);
  }
  return out;
}

std::string plan_csv(const dcap::PlacementPlan& plan,
                     const std::vector<ingest::Hydrant>& pool) {
  std::string csv = "district_id,rank,hydrant_id,lat,lon\n";
  const auto selected = dcap::select_by_ids(pool, plan.selected_hydrant_ids);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    csv += plan.district_id + "," + std::to_string(i + 1) + "," + selected[i].id +
           "," + fmt("%.7f", selected[i].location.lat) + "," +
           fmt("%.7f", selected[i].location.lon) + "\n";
  }
  return csv;
}

struct DcapOptions {
  std::string district;       // empty means --all
  double target_frequency = 10.0;
  long explicit_count = 0;    // 0 means size the fleet from the target
  std::string sampler = "greedy";
  bool emit_curve = false;
  long curve_min = 1;
  long curve_max = 0;         // 0 means all service-area hydrants
  long curve_step = 0;        // 0 means auto
};

int cmd_dcap(const DataPaths& paths, const DcapOptions& opt, const fs::path& out_dir,
             std::uint64_t global_seed, formula_mode mode) {
  const City city = load_city(paths);
  const auto& profiles = city.assembly.profiles;

  std::vector<const ingest::DistrictProfile*> targets;
  if (!opt.district.empty()) {
    const auto it =
        std::find_if(profiles.begin(), profiles.end(),
                     [&](const auto& p) { return p.district_id == opt.district; });
    if (it == profiles.end()) {
      std::string known;
      for (const auto& p : profiles) {
        if (!known.empty()) known += ", ";
        known += p.district_id;
      }
      throw std::invalid_argument("unknown district id `" + opt.district +
                                  "`; known districts: " + known);
    }
    targets.push_back(&*it);
  } else {
    for (const auto& p : profiles) targets.push_back(&p);
  }

  const dcap::CapacityParams cap{1.5, 8310.0, 24.0, opt.target_frequency};
  std::map<ingest::Borough, long> dumpsters_by_borough;

  for (const ingest::DistrictProfile* profile : targets) {
    const auto area = service_area_hydrants(*profile);
    if (area.empty()) {
      std::cerr << "warning: district " << profile->district_id
                << " has no hydrants in the dumpster service area; skipped\n";
      continue;
    }
    const double throughput = dcap::estimate_throughput(*profile, mode);

    long count = opt.explicit_count;
    dcap::FleetChoice fleet;
    if (count > 0) {
      if (count > static_cast<long>(area.size())) {
        throw std::invalid_argument(
            "--count " + std::to_string(count) + " exceeds the " +
            std::to_string(area.size()) + " service-area hydrants of district " +
            profile->district_id);
      }
      fleet.count = count;
      fleet.collection_frequency =
          dcap::fill_rate(dcap::hydrant_load_ratio(throughput, count), cap);
      fleet.target_met =
          fleet.collection_frequency <= cap.target_collections_per_month;
    } else {
      fleet = dcap::choose_dumpster_count(throughput, static_cast<long>(area.size()),
                                          cap);
    }

    const std::uint64_t seed = dcap::district_seed(global_seed, profile->district_id);
    auto plan = opt.sampler == "random"
                    ? dcap::random_place(area, fleet.count, seed)
                    : dcap::greedy_place(area, fleet.count, seed);
    plan.district_id = profile->district_id;
    plan.required_collection_frequency = fleet.collection_frequency;
    if (profile->lots_3plus.empty()) {
      std::cerr << "warning: district " << profile->district_id
                << " has no 3+ unit lots; mean distance reported as 0\n";
    }
    plan.mean_min_distance = dcap::mean_min_distance(
        profile->lots_3plus, dcap::select_by_ids(area, plan.selected_hydrant_ids));

    write_file(out_dir / ("plan_" + profile->district_id + ".csv"),
               plan_csv(plan, area));

    ordered_json metrics;
    metrics["district_id"] = profile->district_id;
    metrics["borough"] = ingest::borough_name(profile->borough);
    metrics["mode"] = mode_name(mode);
    metrics["sampler"] = opt.sampler;
    metrics["seed"] = seed;
    metrics["throughput_tons_per_month"] = cents(throughput);
    metrics["hydrants_total"] = profile->hydrants.size();
    metrics["hydrants_in_service_area"] = area.size();
    metrics["lots_3plus"] = profile->lots_3plus_count;
    metrics["dumpster_count"] = fleet.count;
    metrics["required_collection_frequency"] = cents(fleet.collection_frequency);
    metrics["target_frequency"] = cents(cap.target_collections_per_month);
    metrics["target_met"] = fleet.target_met;
    metrics["mean_min_distance_m"] = cents(plan.mean_min_distance);
    write_file(out_dir / ("metrics_" + profile->district_id + ".json"),
               metrics.dump(2) + "\n");

    if (opt.emit_curve) {
      const long n_max = opt.curve_max > 0
                             ? std::min<long>(opt.curve_max, area.size())
                             : static_cast<long>(area.size());
      const long n_min = std::max<long>(1, opt.curve_min);
      const long step = opt.curve_step > 0
                            ? opt.curve_step
                            : std::max<long>(1, (n_max - n_min + 1) / 50);
      std::string csv = "n,mean_min_distance_m,required_frequency_per_month\n";
      for (long n = n_min; n <= n_max; n += step) {
        const auto p = dcap::greedy_place(area, n, seed);
        const double mmd = dcap::mean_min_distance(
            profile->lots_3plus, dcap::select_by_ids(area, p.selected_hydrant_ids));
        const double freq =
            dcap::fill_rate(dcap::hydrant_load_ratio(throughput, n), cap);
        csv += std::to_string(n) + "," + fmt("%.3f", mmd) + "," +
               fmt("%.4f", freq) + "\n";
      }
      write_file(out_dir / ("curve_" + profile->district_id + ".csv"), csv);
    }

    dumpsters_by_borough[profile->borough] += fleet.count;
  }

  // Borough-level projection when composition data is supplied with --all.
  if (opt.district.empty() && !city.composition.empty()) {
    const auto annual = ingest::annualized_waste_tons(city.tonnage);
    std::map<ingest::Borough, dcap::BoroughStats> stats;
    for (const auto& profile : profiles) {
      auto& s = stats[profile.borough];
      s.borough = profile.borough;
      s.bin_units += profile.units_on_payt_lots;
      const auto it = annual.find(profile.district_id);
      if (it != annual.end()) s.annual_compost_tons += it->second;
    }
    ordered_json boroughs = ordered_json::array();
    double total_cost = 0.0;
    double total_delta = 0.0;
    for (const auto& comp : city.composition) {
      const auto it = stats.find(comp.borough);
      if (it == stats.end()) continue;
      dcap::BoroughStats s = it->second;
      s.annual_compost_tons *= comp.compost_fraction;
      s.dumpsters_placed = dumpsters_by_borough[comp.borough];
      const auto outcome = dcap::project_dcap_outcome(s, comp, cap);
      ordered_json row;
      row["borough"] = ingest::borough_name(outcome.borough);
      row["dumpsters_placed"] = s.dumpsters_placed;
      row["bin_units"] = s.bin_units;
      row["current_efficiency"] = outcome.current_efficiency;
      row["projected_efficiency"] = outcome.projected_efficiency;
      row["delta_tons_diverted"] = cents(outcome.delta_tons_diverted);
      row["cost_dumpsters"] = cents(outcome.cost_dumpsters);
      row["cost_bins"] = cents(outcome.cost_bins);
      row["cost_total"] = cents(outcome.cost_total);
      if (outcome.cost_per_ton) {
        row["cost_per_ton"] = cents(*outcome.cost_per_ton);
      } else {
        row["cost_per_ton"] = nullptr;
      }
      row["zero_benefit"] = outcome.zero_benefit;
      boroughs.push_back(row);
      total_cost += outcome.cost_total;
      total_delta += outcome.delta_tons_diverted;
    }
    ordered_json doc;
    doc["boroughs"] = boroughs;
    doc["total_cost"] = cents(total_cost);
    doc["total_delta_tons_diverted"] = cents(total_delta);
    write_file(out_dir / "boroughs.json", doc.dump(2) + "\n");
  }
  return 0;
}

std::string curve_csv(const std::vector<payt::CurvePoint>& rows) {
  std::string csv =
      "price,efficiency,compost_tons,recycling_tons,refuse_tons,"
      "compost_cost,recycling_cost,refuse_cost,enforcement_cost,"
      "total_expense,revenue,gov_savings,societal_savings\n";
  for (const auto& r : rows) {
    csv += fmt("%.4f", r.price) + "," + fmt("%.6f", r.efficiency) + "," +
           fmt("%.6f", r.compost_tons) + "," + fmt("%.6f", r.recycling_tons) + "," +
           fmt("%.6f", r.refuse_tons) + "," + fmt("%.2f", r.compost_cost) + "," +
           fmt("%.2f", r.recycling_cost) + "," + fmt("%.2f", r.refuse_cost) + "," +
           fmt("%.2f", r.enforcement_cost) + "," + fmt("%.2f", r.total_expense) +
           "," + fmt("%.2f", r.revenue) + "," + fmt("%.2f", r.gov_savings) + "," +
           fmt("%.2f", r.societal_savings) + "\n";
  }
  return csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Street-dumpster placement and bag-sticker pricing toolkit"};
  app.set_config("--config", "", "Read options from an INI config file");
  app.require_subcommand(1);

  std::string out_dir = "out";
  app.add_option("--out", out_dir, "Output directory")
      ->envname("WASTEPLAN_OUTPUT_DIR");
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Global seed for reproducible placement");
  bool paper_literal = false;
  app.add_flag("--paper-literal", paper_literal,
               "Apply the published formulas verbatim instead of the corrected forms");

  DataPaths paths;
  app.add_option("--hydrants", paths.hydrants, "Hydrant CSV (id,latitude,longitude)");
  app.add_option("--districts", paths.districts, "District GeoJSON FeatureCollection");
  app.add_option("--zones", paths.zones, "Zoning GeoJSON FeatureCollection");
  app.add_option("--lots", paths.lots, "Lot CSV");
  app.add_option("--tonnage", paths.tonnage, "Monthly tonnage CSV");
  app.add_option("--composition", paths.composition, "Waste composition CSV");
  app.add_option("--scenario", paths.scenario, "Pricing scenario JSON");

  CLI::App* validate = app.add_subcommand(
      "validate", "Load and validate every supplied input file");
  validate->fallthrough();

  DcapOptions dopt;
  bool dcap_all = false;
  CLI::App* dcap_cmd = app.add_subcommand(
      "dcap", "Size and place dumpsters at hydrant sites");
  dcap_cmd->fallthrough();
  dcap_cmd->add_option("--district", dopt.district, "Plan a single district");
  dcap_cmd->add_flag("--all", dcap_all, "Plan every district");
  dcap_cmd->add_option("--target-frequency", dopt.target_frequency,
                       "Collections per month the fleet must stay under");
  dcap_cmd->add_option("--count", dopt.explicit_count,
                       "Place exactly this many dumpsters instead of sizing");
  dcap_cmd->add_option("--sampler", dopt.sampler, "greedy (default) or random")
      ->check(CLI::IsMember({"greedy", "random"}));
  dcap_cmd->add_flag("--curve", dopt.emit_curve,
                     "Also sweep the dumpster count and emit a distance/frequency table");
  dcap_cmd->add_option("--curve-min", dopt.curve_min, "Sweep lower bound");
  dcap_cmd->add_option("--curve-max", dopt.curve_max, "Sweep upper bound");
  dcap_cmd->add_option("--curve-step", dopt.curve_step, "Sweep step");

  CLI::App* payt_cmd = app.add_subcommand(
      "payt", "Sticker-price model: curves, optimization, elicitation sweep");
  payt_cmd->fallthrough();
  payt_cmd->require_subcommand(1);
  double p_min = 0.0, p_max = 5.0, step = 0.01;
  CLI::App* payt_curve = payt_cmd->add_subcommand(
      "curve", "Tabulate every model quantity over a price grid");
  payt_curve->fallthrough();
  payt_curve->add_option("--p-min", p_min, "Lowest price");
  payt_curve->add_option("--p-max", p_max, "Highest price");
  payt_curve->add_option("--step", step, "Grid step");

  double a_answer = 0.0, b_answer = 0.0;
  CLI::App* payt_opt = payt_cmd->add_subcommand(
      "optimize", "Optimal sticker price for an (A, B) elicitation");
  payt_opt->fallthrough();
  payt_opt->add_option("--A", a_answer, "$ per ton the government would pay to divert")
      ->required();
  payt_opt->add_option("--B", b_answer,
                       "$ the government would pay to raise residents' wealth by $1")
      ->required();
  payt_opt->add_option("--p-min", p_min, "Search lower bound");
  payt_opt->add_option("--p-max", p_max, "Search upper bound");

  double a_min = 0.0, a_max = 95.0, b_min = 0.0, b_max = 0.95;
  long a_count = 20, b_count = 20;
  CLI::App* payt_sweep = payt_cmd->add_subcommand(
      "sweep", "Optimal price over a grid of elicitation answers");
  payt_sweep->fallthrough();
  payt_sweep->add_option("--a-min", a_min, "Smallest A");
  payt_sweep->add_option("--a-max", a_max, "Largest A");
  payt_sweep->add_option("--a-count", a_count, "Number of A values");
  payt_sweep->add_option("--b-min", b_min, "Smallest B");
  payt_sweep->add_option("--b-max", b_max, "Largest B (must stay below 1)");
  payt_sweep->add_option("--b-count", b_count, "Number of B values");
  payt_sweep->add_option("--p-min", p_min, "Search lower bound");
  payt_sweep->add_option("--p-max", p_max, "Search upper bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const formula_mode mode =
      paper_literal ? formula_mode::paper_literal : formula_mode::consistent;
  const fs::path out{out_dir};

  try {
    if (validate->parsed()) {
      return cmd_validate(paths);
    }

    if (dcap_cmd->parsed()) {
      if (dopt.district.empty() && !dcap_all) {
        throw std::invalid_argument("dcap needs --district <id> or --all");
      }
      if (!dopt.district.empty() && dcap_all) {
        throw std::invalid_argument("--district and --all are mutually exclusive");
      }
      return cmd_dcap(paths, dopt, out, seed, mode);
    }

    // payt subcommands share the scenario file.
    if (paths.scenario.empty()) {
      throw std::invalid_argument("--scenario is required for payt commands");
    }
    const payt::Scenario sc = payt::load_scenario(paths.scenario);

    if (payt_curve->parsed()) {
      const auto rows = payt::curve(payt::price_grid(p_min, p_max, step),
                                    sc.totals, sc.constants, mode);
      write_file(out / "payt_curve.csv", curve_csv(rows));
      return 0;
    }

    if (payt_opt->parsed()) {
      const auto weights = payt::elicit_weights(a_answer, b_answer, p_min, p_max);
      const auto r = payt::optimize_price(weights, sc.totals, sc.constants, mode);
      ordered_json doc;
      doc["mode"] = mode_name(mode);
      doc["a_dollars_per_ton"] = a_answer;
      doc["b_dollars"] = b_answer;
      doc["gov_weight"] = weights.gov_weight;
      doc["societal_weight"] = weights.societal_weight;
      doc["diversion_weight"] = weights.diversion_weight;
      doc["price"] = r.price;
      doc["efficiency"] = r.efficiency;
      doc["diverted_tons"] = cents(r.diverted);
      doc["gov_savings"] = cents(r.gov_savings);
      doc["societal_savings"] = cents(r.societal_savings);
      doc["revenue"] = cents(r.revenue);
      doc["utility"] = cents(r.utility_value);
      doc["baseline_expense"] = cents(payt::baseline_expense(sc.totals, sc.constants, mode));
      doc["evaluations"] = r.evaluations;
      write_file(out / "payt_optimize.json", doc.dump(2) + "\n");
      std::printf("%s\n", doc.dump(2).c_str());
      return 0;
    }

    if (payt_sweep->parsed()) {
      if (a_count < 1 || b_count < 1) {
        throw std::invalid_argument("sweep counts must be >= 1");
      }
      std::vector<double> a_values, b_values;
      for (long i = 0; i < a_count; ++i) {
        a_values.push_back(a_count == 1 ? a_min
                                        : a_min + (a_max - a_min) *
                                                      static_cast<double>(i) /
                                                      static_cast<double>(a_count - 1));
      }
      for (long i = 0; i < b_count; ++i) {
        b_values.push_back(b_count == 1 ? b_min
                                        : b_min + (b_max - b_min) *
                                                      static_cast<double>(i) /
                                                      static_cast<double>(b_count - 1));
      }
      const auto cells =
          payt::sweep_ab(a_values, b_values, sc.totals, sc.constants, mode, p_min, p_max);
      std::string csv = "a,b,price,utility\n";
      for (const auto& c : cells) {
        csv += fmt("%.4f", c.a) + "," + fmt("%.4f", c.b) + "," +
               fmt("%.4f", c.price) + "," + fmt("%.2f", c.utility_value) + "\n";
      }
      write_file(out / "payt_sweep.csv", csv);
      return 0;
    }
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
