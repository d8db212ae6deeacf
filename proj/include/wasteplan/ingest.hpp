#pragma once

// Loaders for the planning datasets (hydrants, lots, district and zoning
// shapes, tonnage history, waste composition) and the assembly step that
// assigns records to districts and service areas.
//
// File formats:
//   hydrants.csv     id,latitude,longitude
//   lots.csv         lot_id,latitude,longitude,residential_units,zone_code
//   tonnage.csv      district_id,month,refuse_tons,recycling_tons,organics_tons
//   composition.csv  borough,compost_fraction,recycling_fraction,cur_compost_eff,cur_recycling_eff
//   districts        GeoJSON FeatureCollection; properties district_id, borough
//   zones            GeoJSON FeatureCollection; properties zone_code
//
// All CSV files are UTF-8 with a header row; months are YYYY-MM. GeoJSON
// follows RFC 7946 (coordinates are [lon, lat]; rings closed).

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wasteplan/csv.hpp"
#include "wasteplan/errors.hpp"
#include "wasteplan/geo.hpp"

namespace wasteplan::ingest {

enum class Borough { bronx, brooklyn, manhattan, queens, staten_island };

inline const char* borough_name(Borough b) {
  switch (b) {
    case Borough::bronx: return "Bronx";
    case Borough::brooklyn: return "Brooklyn";
    case Borough::manhattan: return "Manhattan";
    case Borough::queens: return "Queens";
    case Borough::staten_island: return "Staten Island";
  }
  return "?";
}

inline Borough parse_borough(std::string_view s) {
  if (s == "Bronx") return Borough::bronx;
  if (s == "Brooklyn") return Borough::brooklyn;
  if (s == "Manhattan") return Borough::manhattan;
  if (s == "Queens") return Borough::queens;
  if (s == "Staten Island") return Borough::staten_island;
  throw data_error("unknown borough: `" + std::string(s) + "`");
}

// Zoning districts that contain exclusively single/two-family housing; lots
// in these zones get curbside sticker (PAYT) service, everything else is in
// the dumpster service area.
inline constexpr std::array<std::string_view, 7> kPaytZoneCodes{
    "R1", "R2", "R3-1", "R3A", "R3X", "R4A", "R5A"};

inline bool is_payt_zone(std::string_view zone_code) {
  return std::find(kPaytZoneCodes.begin(), kPaytZoneCodes.end(), zone_code) !=
         kPaytZoneCodes.end();
}

struct Hydrant {
  std::string id;
  geo::GeoPoint location;
  std::string district_id;        // assigned during profile assembly
  bool in_dumpster_area = true;   // assigned during profile assembly

  bool operator==(const Hydrant&) const = default;
};

struct Lot {
  std::string id;
  geo::GeoPoint location;
  long residential_units = 0;
  std::string zone_code;
  std::string district_id;  // assigned during profile assembly

  bool operator==(const Lot&) const = default;
};

struct DistrictShape {
  std::string district_id;
  Borough borough = Borough::manhattan;
  std::vector<geo::Polygon> parts;  // MultiPolygon support: any part contains
};

struct ZoneShape {
  std::string zone_code;
  std::vector<geo::Polygon> parts;
};

struct TonnageRecord {
  std::string district_id;
  std::string month;  // YYYY-MM
  double refuse_tons = 0;
  double recycling_tons = 0;
  double organics_tons = 0;
};

struct CompositionProfile {
  Borough borough = Borough::manhattan;
  double compost_fraction = 0;    // share of total waste that is compostable
  double recycling_fraction = 0;  // share of total waste that is recyclable
  double cur_compost_eff = 0;     // share of compostables currently sorted
  double cur_recycling_eff = 0;   // share of recyclables currently sorted
};

struct DistrictProfile {
  std::string district_id;
  Borough borough = Borough::manhattan;
  long total_units = 0;           // residential units on all assigned lots
  long units_on_3plus_lots = 0;   // residential units on lots with >= 3 units
  long lots_3plus_count = 0;      // number of such lots
  long units_on_payt_lots = 0;    // residential units in single/two-family zones
  double peak_monthly_refuse_tons = 0;  // max over the supplied months
  std::vector<Hydrant> hydrants;  // sorted by id
  std::vector<Lot> lots_3plus;    // sorted by id

  bool operator==(const DistrictProfile&) const = default;
};

inline void check_coordinate(const csv::Reader& reader, const csv::Row& row,
                             std::size_t lat_col, std::size_t lon_col,
                             geo::GeoPoint& out) {
  out.lat = reader.parse_double(row, lat_col);
  out.lon = reader.parse_double(row, lon_col);
  if (!std::isfinite(out.lat) || out.lat < -90.0 || out.lat > 90.0) {
    throw data_error(reader.field_error(row, lat_col,
                                        "latitude out of range [-90, 90]: " +
                                            row.fields[lat_col]));
  }
  if (!std::isfinite(out.lon) || out.lon < -180.0 || out.lon > 180.0) {
    throw data_error(reader.field_error(row, lon_col,
                                        "longitude out of range [-180, 180]: " +
                                            row.fields[lon_col]));
  }
}

inline std::vector<Hydrant> load_hydrants(const std::string& path) {
  csv::Reader reader(path, {"id", "latitude", "longitude"});
  std::vector<Hydrant> out;
  std::set<std::string> seen;
  while (auto row = reader.next()) {
    Hydrant h;
    h.id = row->fields[0];
    if (h.id.empty()) {
      throw data_error(reader.field_error(*row, 0, "empty id"));
    }
    if (!seen.insert(h.id).second) {
      throw data_error(reader.field_error(*row, 0, "duplicate id `" + h.id + "`"));
    }
    check_coordinate(reader, *row, 1, 2, h.location);
    out.push_back(std::move(h));
  }
  return out;
}

inline std::vector<Lot> load_lots(const std::string& path) {
  csv::Reader reader(path, {"lot_id", "latitude", "longitude",
                            "residential_units", "zone_code"});
  std::vector<Lot> out;
  std::set<std::string> seen;
  while (auto row = reader.next()) {
    Lot lot;
    lot.id = row->fields[0];
    if (lot.id.empty()) {
      throw data_error(reader.field_error(*row, 0, "empty lot_id"));
    }
    if (!seen.insert(lot.id).second) {
      throw data_error(
          reader.field_error(*row, 0, "duplicate lot_id `" + lot.id + "`"));
    }
    check_coordinate(reader, *row, 1, 2, lot.location);
    lot.residential_units = reader.parse_long(*row, 3);
    if (lot.residential_units < 0) {
      throw data_error(
          reader.field_error(*row, 3, "residential_units must be >= 0"));
    }
    lot.zone_code = row->fields[4];
    if (lot.zone_code.empty()) {
      throw data_error(reader.field_error(*row, 4, "empty zone_code"));
    }
    out.push_back(std::move(lot));
  }
  return out;
}

inline std::vector<TonnageRecord> load_tonnage(const std::string& path) {
  csv::Reader reader(path, {"district_id", "month", "refuse_tons",
                            "recycling_tons", "organics_tons"});
  std::vector<TonnageRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  while (auto row = reader.next()) {
    TonnageRecord rec;
    rec.district_id = row->fields[0];
    rec.month = row->fields[1];
    const std::string& m = rec.month;
    const auto digit = [](char c) { return c >= '0' && c <= '9'; };
    const bool shape_ok = m.size() == 7 && m[4] == '-' && digit(m[0]) &&
                          digit(m[1]) && digit(m[2]) && digit(m[3]) &&
                          digit(m[5]) && digit(m[6]);
    const int month_num = shape_ok ? (m[5] - '0') * 10 + (m[6] - '0') : 0;
    if (!shape_ok || month_num < 1 || month_num > 12) {
      throw data_error(
          reader.field_error(*row, 1, "month must be YYYY-MM: `" + m + "`"));
    }
    if (!seen.insert({rec.district_id, rec.month}).second) {
      throw data_error(reader.field_error(
          *row, 1, "duplicate month `" + m + "` for district " + rec.district_id));
    }
    double* const tons[3] = {&rec.refuse_tons, &rec.recycling_tons, &rec.organics_tons};
    for (std::size_t col = 2; col <= 4; ++col) {
      double& v = *tons[col - 2];
      v = reader.parse_double(*row, col);
      if (!std::isfinite(v) || v < 0) {
        throw data_error(reader.field_error(*row, col, "tons must be >= 0"));
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<CompositionProfile> load_composition(const std::string& path) {
  csv::Reader reader(path, {"borough", "compost_fraction", "recycling_fraction",
                            "cur_compost_eff", "cur_recycling_eff"});
  std::vector<CompositionProfile> out;
  std::set<std::string> seen;
  while (auto row = reader.next()) {
    CompositionProfile c;
    try {
      c.borough = parse_borough(row->fields[0]);
    } catch (const data_error& e) {
      throw data_error(reader.field_error(*row, 0, e.what()));
    }
    if (!seen.insert(row->fields[0]).second) {
      throw data_error(
          reader.field_error(*row, 0, "duplicate borough `" + row->fields[0] + "`"));
    }
    double* const fields[4] = {&c.compost_fraction, &c.recycling_fraction,
                               &c.cur_compost_eff, &c.cur_recycling_eff};
    for (std::size_t col = 1; col <= 4; ++col) {
      double& v = *fields[col - 1];
      v = reader.parse_double(*row, col);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw data_error(reader.field_error(*row, col, "must be in [0, 1]"));
      }
    }
    if (c.compost_fraction + c.recycling_fraction > 1.0) {
      throw data_error(reader.field_error(
          *row, 1, "compost_fraction + recycling_fraction exceeds 1"));
    }
    out.push_back(c);
  }
  return out;
}

namespace detail {

inline nlohmann::json load_json_file(const std::string& path) {
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
  return doc;
}

inline geo::Ring parse_ring(const nlohmann::json& coords, const std::string& ctx) {
  if (!coords.is_array() || coords.size() < 3) {
    throw data_error(ctx + ": ring must be an array of at least 3 positions");
  }
  geo::Ring ring;
  for (const auto& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() ||
        !pos[1].is_number()) {
      throw data_error(ctx + ": position must be a [lon, lat] array");
    }
    geo::GeoPoint p{pos[1].get<double>(), pos[0].get<double>()};
    if (!geo::is_valid(p)) {
      throw data_error(ctx + ": coordinate out of range");
    }
    ring.push_back(p);
  }
  // RFC rings repeat the first vertex at the end; store closure implicitly.
  if (ring.size() >= 2 && ring.front() == ring.back()) {
    ring.pop_back();
  }
  return ring;
}

inline geo::Polygon parse_polygon(const nlohmann::json& rings, const std::string& ctx) {
  if (!rings.is_array() || rings.empty()) {
    throw data_error(ctx + ": polygon must contain at least one ring");
  }
  geo::Polygon poly;
  for (const auto& ring : rings) {
    poly.rings.push_back(parse_ring(ring, ctx));
  }
  try {
    geo::validate_polygon(poly);
  } catch (const data_error& e) {
    throw data_error(ctx + ": " + e.what());
  }
  return poly;
}

inline std::vector<geo::Polygon> parse_geometry(const nlohmann::json& geom,
                                                const std::string& ctx) {
  if (!geom.is_object() || !geom.contains("type") || !geom.contains("coordinates")) {
    throw data_error(ctx + ": feature geometry must have type and coordinates");
  }
  const std::string type = geom["type"].get<std::string>();
  std::vector<geo::Polygon> parts;
  if (type == "Polygon") {
    parts.push_back(parse_polygon(geom["coordinates"], ctx));
  } else if (type == "MultiPolygon") {
    for (const auto& poly : geom["coordinates"]) {
      parts.push_back(parse_polygon(poly, ctx));
    }
    if (parts.empty()) {
      throw data_error(ctx + ": empty MultiPolygon");
    }
  } else {
    throw data_error(ctx + ": unsupported geometry type `" + type + "`");
  }
  return parts;
}

inline std::string property_as_string(const nlohmann::json& props,
                                      const std::string& key, const std::string& ctx) {
  if (!props.contains(key)) {
    throw data_error(ctx + ": missing property `" + key + "`");
  }
  const auto& v = props[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw data_error(ctx + ": property `" + key + "` must be a string");
}

inline const nlohmann::json& feature_collection(const nlohmann::json& doc,
                                                const std::string& path) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw data_error(path + ": expected a GeoJSON FeatureCollection");
  }
  return doc["features"];
}

inline bool any_part_contains(const std::vector<geo::Polygon>& parts,
                              const geo::GeoPoint& p) {
  for (const geo::Polygon& part : parts) {
    if (geo::point_in_polygon(p, part)) return true;
  }
  return false;
}

}  // namespace detail

inline std::vector<DistrictShape> load_districts(const std::string& path) {
  const nlohmann::json doc = detail::load_json_file(path);
  std::vector<DistrictShape> out;
  std::set<std::string> seen;
  std::size_t index = 0;
  for (const auto& feature : detail::feature_collection(doc, path)) {
    const std::string ctx = path + ": feature " + std::to_string(index++);
    if (!feature.contains("properties") || !feature["properties"].is_object()) {
      throw data_error(ctx + ": missing properties");
    }
    DistrictShape d;
    d.district_id = detail::property_as_string(feature["properties"], "district_id", ctx);
    try {
      d.borough = parse_borough(
          detail::property_as_string(feature["properties"], "borough", ctx));
    } catch (const data_error& e) {
      throw data_error(ctx + ": " + e.what());
    }
    if (!seen.insert(d.district_id).second) {
      throw data_error(ctx + ": duplicate district_id `" + d.district_id + "`");
    }
    if (!feature.contains("geometry")) {
      throw data_error(ctx + ": missing geometry");
    }
    d.parts = detail::parse_geometry(feature["geometry"], ctx);
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const DistrictShape& a, const DistrictShape& b) {
    return a.district_id < b.district_id;
  });
  return out;
}

inline std::vector<ZoneShape> load_zones(const std::string& path) {
  const nlohmann::json doc = detail::load_json_file(path);
  std::vector<ZoneShape> out;
  std::size_t index = 0;
  for (const auto& feature : detail::feature_collection(doc, path)) {
    const std::string ctx = path + ": feature " + std::to_string(index++);
    if (!feature.contains("properties") || !feature["properties"].is_object()) {
      throw data_error(ctx + ": missing properties");
    }
    ZoneShape z;
    z.zone_code = detail::property_as_string(feature["properties"], "zone_code", ctx);
    if (!feature.contains("geometry")) {
      throw data_error(ctx + ": missing geometry");
    }
    z.parts = detail::parse_geometry(feature["geometry"], ctx);
    out.push_back(std::move(z));
  }
  return out;
}

/// Mean monthly total (refuse + recycling + organics) scaled to a year,
/// keyed by district. Missing months are skipped, not interpolated.
inline std::map<std::string, double> annualized_waste_tons(
    const std::vector<TonnageRecord>& tonnage) {
  std::map<std::string, std::pair<double, long>> acc;  // sum, months
  for (const TonnageRecord& rec : tonnage) {
    auto& [sum, months] = acc[rec.district_id];
    sum += rec.refuse_tons + rec.recycling_tons + rec.organics_tons;
    months += 1;
  }
  std::map<std::string, double> out;
  for (const auto& [district, sm] : acc) {
    out[district] = sm.second ? sm.first / static_cast<double>(sm.second) * 12.0 : 0.0;
  }
  return out;
}

struct AssemblyResult {
  std::vector<DistrictProfile> profiles;  // sorted by district_id
  std::vector<std::string> warnings;
  long hydrants_assigned = 0;
  long hydrants_excluded = 0;
  long lots_assigned = 0;
  long lots_excluded = 0;
};

/// Assigns hydrants and lots to the unique containing district, flags
/// hydrants as dumpster-serviced unless they fall inside a single/two-family
/// zoning polygon, and tallies per-district unit counts and peak refuse.
///
/// Records outside every district are excluded with a warning. A record
/// contained in more than one district is an error (overlapping shapes).
inline AssemblyResult build_district_profiles(
    const std::vector<Hydrant>& hydrants, const std::vector<Lot>& lots,
    const std::vector<DistrictShape>& districts,
    const std::vector<TonnageRecord>& tonnage,
    const std::vector<ZoneShape>& zones = {}) {
  AssemblyResult result;

  std::map<std::string, DistrictProfile> by_id;
  for (const DistrictShape& d : districts) {
    DistrictProfile p;
    p.district_id = d.district_id;
    p.borough = d.borough;
    by_id.emplace(d.district_id, std::move(p));
  }

  const auto find_district = [&](const geo::GeoPoint& p, const std::string& what,
                                 const std::string& id) -> const DistrictShape* {
    const DistrictShape* found = nullptr;
    std::vector<std::string> matches;
    for (const DistrictShape& d : districts) {
      if (detail::any_part_contains(d.parts, p)) {
        matches.push_back(d.district_id);
        found = &d;
      }
    }
    if (matches.size() > 1) {
      std::string list;
      for (std::size_t i = 0; i < matches.size(); ++i) {
        if (i) list += ", ";
        list += matches[i];
      }
      throw data_error(what + " " + id + " is contained in overlapping districts: " + list);
    }
    return matches.empty() ? nullptr : found;
  };

  const auto in_payt_zone = [&](const geo::GeoPoint& p) {
    for (const ZoneShape& z : zones) {
      if (is_payt_zone(z.zone_code) && detail::any_part_contains(z.parts, p)) {
        return true;
      }
    }
    return false;
  };

  for (const Hydrant& h : hydrants) {
    const DistrictShape* d = find_district(h.location, "hydrant", h.id);
    if (!d) {
      result.warnings.push_back("hydrant " + h.id +
                                " is outside all districts; excluded");
      ++result.hydrants_excluded;
      continue;
    }
    Hydrant assigned = h;
    assigned.district_id = d->district_id;
    assigned.in_dumpster_area = !in_payt_zone(h.location);
    by_id[d->district_id].hydrants.push_back(std::move(assigned));
    ++result.hydrants_assigned;
  }

  for (const Lot& lot : lots) {
    const DistrictShape* d = find_district(lot.location, "lot", lot.id);
    if (!d) {
      result.warnings.push_back("lot " + lot.id +
                                " is outside all districts; excluded");
      ++result.lots_excluded;
      continue;
    }
    DistrictProfile& profile = by_id[d->district_id];
    profile.total_units += lot.residential_units;
    if (is_payt_zone(lot.zone_code)) {
      profile.units_on_payt_lots += lot.residential_units;
    }
    if (lot.residential_units >= 3) {
      profile.units_on_3plus_lots += lot.residential_units;
      profile.lots_3plus_count += 1;
      Lot assigned = lot;
      assigned.district_id = d->district_id;
      profile.lots_3plus.push_back(std::move(assigned));
    }
    ++result.lots_assigned;
  }

  for (const TonnageRecord& rec : tonnage) {
    auto it = by_id.find(rec.district_id);
    if (it == by_id.end()) {
      result.warnings.push_back("tonnage for unknown district " + rec.district_id +
                                " (" + rec.month + "); ignored");
      continue;
    }
    it->second.peak_monthly_refuse_tons =
        std::max(it->second.peak_monthly_refuse_tons, rec.refuse_tons);
  }

  for (auto& [id, profile] : by_id) {
    std::sort(profile.hydrants.begin(), profile.hydrants.end(),
              [](const Hydrant& a, const Hydrant& b) { return a.id < b.id; });
    std::sort(profile.lots_3plus.begin(), profile.lots_3plus.end(),
              [](const Lot& a, const Lot& b) { return a.id < b.id; });
    result.profiles.push_back(std::move(profile));
  }
  return result;
}

}  // namespace wasteplan::ingest
