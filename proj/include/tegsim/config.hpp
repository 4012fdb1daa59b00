#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tegsim/error.hpp"
#include "tegsim/generator.hpp"
#include "tegsim/leg_thermal.hpp"
#include "tegsim/units.hpp"

namespace tegsim {

using Json = nlohmann::ordered_json;

// Configuration documents are JSON (comments allowed). Lengths are in
// micrometers, temperatures in degrees Celsius and material constants in the
// laboratory units named by each key suffix; everything is converted to SI on
// resolution.
inline constexpr const char* kConfigEnvVar = "TEGSIM_CONFIG";

struct SweepSpec {
  std::vector<double> b_values;  // m
  std::vector<double> h_values;  // m
  std::vector<MaskType> mask_catalog;
  double mask_step_height = kMaskStepHeight;
};

struct SolverSpec {
  Backend backend = Backend::Analytic;
  NumericOptions numeric;
  int parallelism = 0;  // 0: hardware concurrency
};

struct GeneratorSpec {
  int n_couples_type_b = 4700;
  FlowMode mode = FlowMode::Network;
  double heat_flow = 0.0;  // W; 0 takes the network flow at the reference couple count
  int optimize_n_min = 100;
  int optimize_n_max = 20000;
  int optimize_n_step = 1;
};

struct OutputSpec {
  std::string directory = "out";
  std::string format = "csv";  // csv | plot
  bool timestamp = true;
};

struct ResolvedConfig {
  Json document;  // canonical form, laboratory units
  double room_temperature = kRoomTemperature;
  GeneratorDesign design;
  Environment environment;
  ChuckScenario scenario;
  SweepSpec sweep;
  SolverSpec solver;
  GeneratorSpec generator;
  OutputSpec output;

  SimulationOptions simulation() const {
    SimulationOptions o;
    o.model = {solver.backend, solver.numeric};
    o.mode = generator.mode;
    o.heat_flow = generator.heat_flow;
    return o;
  }
};

namespace detail {

inline constexpr const char* kIntegerKeys[] = {
    "layout.n_couples",       "layout.rows",           "generator.n_couples_type_b", "generator.optimize_n_min",
    "generator.optimize_n_max", "generator.optimize_n_step", "solver.max_iterations",   "solver.max_voxels",
    "solver.parallelism"};

inline bool is_integer_key(const std::string& path) {
  for (const char* k : kIntegerKeys)
    if (path == k) return true;
  return false;
}

// Every number outside the integer keys is stored as a double, so the
// canonical echo does not depend on how a value was typed.
inline void normalize_numbers(Json& j, const std::string& prefix = {}) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    auto& v = it.value();
    if (v.is_object()) {
      normalize_numbers(v, path);
    } else if (v.is_array()) {
      for (auto& e : v)
        if (e.is_number()) e = e.get<double>();
    } else if (v.is_number() && !is_integer_key(path)) {
      v = v.get<double>();
    }
  }
}

}  // namespace detail

inline Json default_document() {
  Json doc = Json::parse(R"({
  "materials": {
    "room_temperature_K": 300,
    "p": {"seebeck_uV_per_K": 69, "resistivity_mOhm_cm": 1.05, "thermal_conductivity_W_per_mK": 3,
          "contact_resistance_Ohm_um2": 86},
    "n": {"seebeck_uV_per_K": -248, "resistivity_mOhm_cm": 5.87, "thermal_conductivity_W_per_mK": 3,
          "contact_resistance_Ohm_um2": 40}
  },
  "geometry": {
    "end_width_a_um": 10, "middle_width_b_um": 3, "step_height_h_um": 0.5, "film_thickness_t_um": 1.5,
    "end_segment_length_um": 0.5, "middle_segment_length_um": 6, "step_path_factor_gamma": 2
  },
  "cell": {
    "pitch_x_um": 15.5, "pitch_y_um": 22, "gap_height_um": 2.5, "fill_conductivity_W_per_mK": 0.026,
    "junction_pad_length_um": 2, "trench_margin_um": 2
  },
  "layout": {
    "n_couples": 2350, "couple_pitch_um": 22, "rim_band_width_um": 100, "die_side_um": 17500,
    "etch_depth_um": 250, "rows": 2, "gap_conductivity_W_per_mK": 0.026
  },
  "electrical": {"contact_area_um2": 0, "interconnect_resistance_Ohm": 0},
  "environment": {
    "T_source_C": 37, "T_ambient_C": 22, "body_specific_resistance_K_cm2_per_W": 300, "body_contact_area_cm2": 3,
    "R_hot_plate_K_per_W": 0, "R_cold_plate_K_per_W": 0, "radiator_area_cm2": 10, "h_natural_W_per_m2K": 10,
    "h_forced_W_per_m2K": 50, "forced_convection": false, "radiation": false, "emissivity": 0.9
  },
  "scenario": {
    "test_die_side_um": 7500, "T_chuck_C": 40, "T_ambient_C": 22, "k_unreleased_W_per_mK": 1.4,
    "k_released_W_per_mK": 0.026, "k_gap_W_per_mK": 0.026
  },
  "sweep": {
    "b_values_um": [0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4], "h_values_um": [0.5, 1, 1.5, 2, 2.5, 3],
    "mask_a_um": [3, 5, 10], "mask_b_um": [1, 2, 3], "mask_step_height_um": 0.5
  },
  "generator": {
    "n_couples_type_b": 4700, "mode": "network", "heat_flow_W": 0, "optimize_n_min": 100,
    "optimize_n_max": 20000, "optimize_n_step": 1
  },
  "solver": {
    "backend": "analytic", "resolution_per_um": 2, "relative_tolerance": 1e-8, "max_iterations": 0,
    "max_voxels": 20000000, "parallelism": 0
  },
  "output": {"directory": "out", "format": "csv", "timestamp": true}
})");
  detail::normalize_numbers(doc);
  return doc;
}

namespace detail {

// Where each key got its value, for error messages.
struct Provenance {
  std::vector<std::pair<std::string, std::string>> entries;

  void set(const std::string& key, const std::string& where) {
    for (auto& e : entries)
      if (e.first == key) {
        e.second = where;
        return;
      }
    entries.emplace_back(key, where);
  }
  std::string at(const std::string& key) const {
    for (const auto& e : entries)
      if (e.first == key) return e.second;
    return "defaults";
  }
};

inline std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  return parts;
}

inline int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

// Line of a dotted key in the source text: each component is searched after
// the previous one.
inline int line_of_key(const std::string& text, const std::string& path) {
  std::size_t pos = 0;
  for (const auto& part : split_path(path)) {
    const std::size_t at = text.find('"' + part + '"', pos);
    if (at == std::string::npos) return 0;
    pos = at + part.size() + 2;
  }
  return line_of_offset(text, pos);
}

inline const char* type_name(const Json& j) {
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  if (j.is_object()) return "object";
  return "null";
}

inline bool same_kind(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number()) return a.is_number_integer() ? b.is_number_integer() : true;
  if (a.is_number() || b.is_number()) return false;
  if (a.is_array() && b.is_array()) {
    for (const auto& v : b)
      if (!v.is_number()) return false;
    return true;
  }
  return a.type() == b.type();
}

// Writes `value` over base[path], which must already exist with a compatible type.
inline void assign(Json& base, const std::string& path, const Json& value, const std::string& where,
                   Provenance& prov) {
  Json* node = &base;
  for (const auto& part : split_path(path)) {
    if (!node->is_object() || !node->contains(part)) throw ConfigError(where + ": unknown key '" + path + "'");
    node = &(*node)[part];
  }
  if (node->is_object()) throw ConfigError(where + ": '" + path + "' is a section, not a value");
  if (!same_kind(*node, value))
    throw ConfigError(where + ": '" + path + "' expects a " + (node->is_number_integer() ? "integer" : type_name(*node)) +
                      ", got " + type_name(value));
  if (node->is_number_float()) {
    *node = value.get<double>();
  } else if (node->is_array()) {
    *node = Json::array();
    for (const auto& e : value) node->push_back(e.get<double>());
  } else {
    *node = value;
  }
  prov.set(path, where);
}

inline void merge(Json& base, const Json& overlay, const std::string& prefix, const std::string& file,
                  const std::string& text, Provenance& prov) {
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it.value().is_object()) {
      Json* node = &base;
      for (const auto& part : split_path(path)) {
        if (!node->contains(part)) {
          const int line = line_of_key(text, path);
          throw ConfigError(file + ":" + std::to_string(line) + ": unknown key '" + path + "'");
        }
        node = &(*node)[part];
      }
      if (!node->is_object())
        throw ConfigError(file + ":" + std::to_string(line_of_key(text, path)) + ": '" + path +
                          "' expects a value, got an object");
      merge(base, it.value(), path, file, text, prov);
    } else {
      assign(base, path, it.value(), file + ":" + std::to_string(line_of_key(text, path)), prov);
    }
  }
}

inline Json parse_document(const std::string& text, const std::string& file) {
  try {
    Json j = Json::parse(text, nullptr, true, true);
    if (!j.is_object()) throw ConfigError(file + ": top level must be an object");
    return j;
  } catch (const Json::parse_error& e) {
    throw ConfigError(file + ":" + std::to_string(line_of_offset(text, e.byte)) + ": parse error: " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double num(const Json& doc, const char* section, const char* key) { return doc.at(section).at(key).get<double>(); }

inline std::vector<double> scaled(const Json& arr, double scale) {
  std::vector<double> out;
  for (const auto& v : arr) out.push_back(v.get<double>() * scale);
  return out;
}

inline MaterialProps material_from(const Json& m) {
  using namespace units;
  return {m.at("seebeck_uV_per_K").get<double>() * uV_per_K, m.at("resistivity_mOhm_cm").get<double>() * mOhm_cm,
          m.at("thermal_conductivity_W_per_mK").get<double>(),
          m.at("contact_resistance_Ohm_um2").get<double>() * Ohm_um2};
}

class Checker {
 public:
  explicit Checker(const Provenance& prov) : prov_(prov) {}

  void operator()(bool ok, const std::string& key, const std::string& invariant) const {
    if (!ok) throw ValidationError(prov_.at(key) + ": " + key + ": " + invariant + " violated");
  }

 private:
  const Provenance& prov_;
};

inline ResolvedConfig resolve(const Json& doc, const Provenance& prov) {
  using namespace units;
  const Checker check(prov);
  ResolvedConfig c;
  c.document = doc;

  const auto& mat = doc.at("materials");
  c.room_temperature = mat.at("room_temperature_K").get<double>();
  check(c.room_temperature > 0.0, "materials.room_temperature_K", "room_temperature_K > 0");
  for (const char* side : {"p", "n"}) {
    const std::string k = std::string("materials.") + side + ".";
    const auto& m = mat.at(side);
    check(m.at("resistivity_mOhm_cm").get<double>() > 0.0, k + "resistivity_mOhm_cm", "resistivity > 0");
    check(m.at("thermal_conductivity_W_per_mK").get<double>() > 0.0, k + "thermal_conductivity_W_per_mK",
          "thermal_conductivity > 0");
    check(m.at("contact_resistance_Ohm_um2").get<double>() >= 0.0, k + "contact_resistance_Ohm_um2",
          "contact_resistance >= 0");
  }
  c.design.materials = {material_from(mat.at("p")), material_from(mat.at("n"))};
  check(c.design.materials.p.seebeck_coefficient != c.design.materials.n.seebeck_coefficient,
        "materials.n.seebeck_uV_per_K", "p.seebeck != n.seebeck");

  auto& g = c.design.cell.geometry;
  g.end_width_a = num(doc, "geometry", "end_width_a_um") * um;
  g.middle_width_b = num(doc, "geometry", "middle_width_b_um") * um;
  g.step_height_h = num(doc, "geometry", "step_height_h_um") * um;
  g.film_thickness_t = num(doc, "geometry", "film_thickness_t_um") * um;
  g.end_segment_length = num(doc, "geometry", "end_segment_length_um") * um;
  g.middle_segment_length = num(doc, "geometry", "middle_segment_length_um") * um;
  g.step_path_factor_gamma = num(doc, "geometry", "step_path_factor_gamma");
  check(g.middle_width_b > 0.0, "geometry.middle_width_b_um", "middle_width_b > 0");
  check(g.end_width_a >= g.middle_width_b, "geometry.middle_width_b_um", "end_width_a >= middle_width_b");
  check(g.film_thickness_t > 0.0, "geometry.film_thickness_t_um", "film_thickness_t > 0");
  check(g.step_height_h >= 0.0, "geometry.step_height_h_um", "step_height_h >= 0");
  check(g.end_segment_length > 0.0, "geometry.end_segment_length_um", "end_segment_length > 0");
  check(g.middle_segment_length > 0.0, "geometry.middle_segment_length_um", "middle_segment_length > 0");
  check(g.step_path_factor_gamma >= 0.0, "geometry.step_path_factor_gamma", "step_path_factor_gamma >= 0");

  auto& cell = c.design.cell;
  cell.cell_pitch_x = num(doc, "cell", "pitch_x_um") * um;
  cell.cell_pitch_y = num(doc, "cell", "pitch_y_um") * um;
  cell.gap_height = num(doc, "cell", "gap_height_um") * um;
  cell.fill_conductivity = num(doc, "cell", "fill_conductivity_W_per_mK");
  cell.junction_pad_length = num(doc, "cell", "junction_pad_length_um") * um;
  cell.trench_margin = num(doc, "cell", "trench_margin_um") * um;
  check(cell.fill_conductivity > 0.0, "cell.fill_conductivity_W_per_mK", "fill_conductivity > 0");
  check(cell.junction_pad_length >= 0.0, "cell.junction_pad_length_um", "junction_pad_length >= 0");
  check(cell.trench_margin >= 0.0, "cell.trench_margin_um", "trench_margin >= 0");
  check(cell.cell_pitch_y >= 2.0 * g.end_width_a, "cell.pitch_y_um", "pitch_y >= 2 * end_width_a");
  check(cell.cell_pitch_x >= 2.0 * g.end_segment_length + g.middle_segment_length + 2.0 * cell.junction_pad_length,
        "cell.pitch_x_um", "pitch_x >= 2*end_segment_length + middle_segment_length + 2*junction_pad_length");
  check(cell.gap_height >= g.step_height_h + g.film_thickness_t, "cell.gap_height_um",
        "gap_height >= step_height_h + film_thickness_t");

  auto& l = c.design.layout;
  const auto& lay = doc.at("layout");
  c.design.n_couples = lay.at("n_couples").get<int>();
  l.n_couples = c.design.n_couples;
  l.couple_pitch = lay.at("couple_pitch_um").get<double>() * um;
  l.rim_band_width = lay.at("rim_band_width_um").get<double>() * um;
  l.die_side = lay.at("die_side_um").get<double>() * um;
  l.etch_depth = lay.at("etch_depth_um").get<double>() * um;
  l.rows = lay.at("rows").get<int>();
  c.design.gap_conductivity = lay.at("gap_conductivity_W_per_mK").get<double>();
  check(c.design.n_couples >= 1, "layout.n_couples", "n_couples >= 1");
  check(l.couple_pitch > 0.0, "layout.couple_pitch_um", "couple_pitch > 0");
  check(l.rim_band_width > 0.0, "layout.rim_band_width_um", "rim_band_width > 0");
  check(l.die_side > 2.0 * l.rim_band_width, "layout.die_side_um", "die_side > 2 * rim_band_width");
  check(l.etch_depth > 0.0, "layout.etch_depth_um", "etch_depth > 0");
  check(l.rows >= 1, "layout.rows", "rows >= 1");
  check(c.design.gap_conductivity > 0.0, "layout.gap_conductivity_W_per_mK", "gap_conductivity > 0");
  check(validate_rim(l).ok, "layout.n_couples", "rim capacity 4 * (die_side - rim_band_width) * rows >= n_couples * couple_pitch");

  c.design.contact_area = num(doc, "electrical", "contact_area_um2") * um2;
  c.design.interconnect_resistance = num(doc, "electrical", "interconnect_resistance_Ohm");
  check(c.design.contact_area >= 0.0, "electrical.contact_area_um2", "contact_area >= 0");
  check(c.design.interconnect_resistance >= 0.0, "electrical.interconnect_resistance_Ohm",
        "interconnect_resistance >= 0");

  auto& e = c.environment;
  const auto& env = doc.at("environment");
  e.T_source = celsius_to_kelvin(env.at("T_source_C").get<double>());
  e.T_ambient = celsius_to_kelvin(env.at("T_ambient_C").get<double>());
  e.body_specific_resistance = env.at("body_specific_resistance_K_cm2_per_W").get<double>() * K_cm2_per_W;
  e.body_contact_area = env.at("body_contact_area_cm2").get<double>() * cm2;
  e.R_hot_plate = env.at("R_hot_plate_K_per_W").get<double>();
  e.R_cold_plate = env.at("R_cold_plate_K_per_W").get<double>();
  e.radiator_area = env.at("radiator_area_cm2").get<double>() * cm2;
  e.h_natural = env.at("h_natural_W_per_m2K").get<double>();
  e.h_forced = env.at("h_forced_W_per_m2K").get<double>();
  e.forced_convection = env.at("forced_convection").get<bool>();
  e.radiation = env.at("radiation").get<bool>();
  e.emissivity = env.at("emissivity").get<double>();
  check(e.T_ambient > 0.0, "environment.T_ambient_C", "T_ambient > -273.15 C");
  check(e.body_specific_resistance >= 0.0, "environment.body_specific_resistance_K_cm2_per_W",
        "body_specific_resistance >= 0");
  check(e.body_contact_area > 0.0, "environment.body_contact_area_cm2", "body_contact_area > 0");
  check(e.R_hot_plate >= 0.0, "environment.R_hot_plate_K_per_W", "R_hot_plate >= 0");
  check(e.R_cold_plate >= 0.0, "environment.R_cold_plate_K_per_W", "R_cold_plate >= 0");
  check(e.radiator_area > 0.0, "environment.radiator_area_cm2", "radiator_area > 0");
  check(e.h_natural > 0.0, "environment.h_natural_W_per_m2K", "h_natural > 0");
  check(e.h_forced > 0.0, "environment.h_forced_W_per_m2K", "h_forced > 0");
  check(e.emissivity >= 0.0 && e.emissivity <= 1.0, "environment.emissivity", "0 <= emissivity <= 1");

  auto& s = c.scenario;
  const auto& sc = doc.at("scenario");
  s.test_die_side = sc.at("test_die_side_um").get<double>() * um;
  s.T_chuck = celsius_to_kelvin(sc.at("T_chuck_C").get<double>());
  s.T_ambient = celsius_to_kelvin(sc.at("T_ambient_C").get<double>());
  s.h_natural = e.h_natural;
  s.h_forced = e.h_forced;
  s.k_unreleased = sc.at("k_unreleased_W_per_mK").get<double>();
  s.k_released = sc.at("k_released_W_per_mK").get<double>();
  s.k_gap = sc.at("k_gap_W_per_mK").get<double>();
  check(s.test_die_side > 0.0, "scenario.test_die_side_um", "test_die_side > 0");
  check(s.T_ambient > 0.0, "scenario.T_ambient_C", "T_ambient > -273.15 C");
  check(s.T_chuck != s.T_ambient, "scenario.T_chuck_C", "T_chuck != T_ambient");
  check(s.k_unreleased > 0.0, "scenario.k_unreleased_W_per_mK", "k_unreleased > 0");
  check(s.k_released > 0.0, "scenario.k_released_W_per_mK", "k_released > 0");
  check(s.k_gap > 0.0, "scenario.k_gap_W_per_mK", "k_gap > 0");

  const auto& sw = doc.at("sweep");
  c.sweep.b_values = scaled(sw.at("b_values_um"), um);
  c.sweep.h_values = scaled(sw.at("h_values_um"), um);
  check(!c.sweep.b_values.empty(), "sweep.b_values_um", "non-empty list");
  check(!c.sweep.h_values.empty(), "sweep.h_values_um", "non-empty list");
  const auto mask_a = scaled(sw.at("mask_a_um"), um);
  const auto mask_b = scaled(sw.at("mask_b_um"), um);
  check(!mask_a.empty(), "sweep.mask_a_um", "non-empty list");
  check(!mask_b.empty(), "sweep.mask_b_um", "non-empty list");
  for (double a : mask_a)
    for (double b : mask_b) c.sweep.mask_catalog.push_back({a, b});
  c.sweep.mask_step_height = sw.at("mask_step_height_um").get<double>() * um;
  check(c.sweep.mask_step_height >= 0.0, "sweep.mask_step_height_um", "mask_step_height >= 0");

  auto& gs = c.generator;
  const auto& gen = doc.at("generator");
  gs.n_couples_type_b = gen.at("n_couples_type_b").get<int>();
  const std::string mode = gen.at("mode").get<std::string>();
  check(mode == "network" || mode == "constant_flow", "generator.mode", "mode in {network, constant_flow}");
  gs.mode = mode == "network" ? FlowMode::Network : FlowMode::ConstantFlow;
  gs.heat_flow = gen.at("heat_flow_W").get<double>();
  gs.optimize_n_min = gen.at("optimize_n_min").get<int>();
  gs.optimize_n_max = gen.at("optimize_n_max").get<int>();
  gs.optimize_n_step = gen.at("optimize_n_step").get<int>();
  check(gs.n_couples_type_b >= 1, "generator.n_couples_type_b", "n_couples_type_b >= 1");
  check(gs.heat_flow >= 0.0, "generator.heat_flow_W", "heat_flow >= 0");
  check(gs.optimize_n_min >= 1, "generator.optimize_n_min", "optimize_n_min >= 1");
  check(gs.optimize_n_max >= gs.optimize_n_min, "generator.optimize_n_max", "optimize_n_max >= optimize_n_min");
  check(gs.optimize_n_step >= 1, "generator.optimize_n_step", "optimize_n_step >= 1");

  auto& so = c.solver;
  const auto& sol = doc.at("solver");
  const std::string backend = sol.at("backend").get<std::string>();
  check(backend == "analytic" || backend == "numeric", "solver.backend", "backend in {analytic, numeric}");
  so.backend = backend == "analytic" ? Backend::Analytic : Backend::Numeric;
  so.numeric.resolution = sol.at("resolution_per_um").get<double>();
  so.numeric.solver.relative_tolerance = sol.at("relative_tolerance").get<double>();
  so.numeric.solver.max_iterations = sol.at("max_iterations").get<int>();
  const auto max_voxels = sol.at("max_voxels").get<std::int64_t>();
  so.parallelism = sol.at("parallelism").get<int>();
  check(so.numeric.resolution > 0.0, "solver.resolution_per_um", "resolution_per_um > 0");
  check(so.numeric.solver.relative_tolerance > 0.0, "solver.relative_tolerance", "relative_tolerance > 0");
  check(so.numeric.solver.max_iterations >= 0, "solver.max_iterations", "max_iterations >= 0");
  check(max_voxels >= 1, "solver.max_voxels", "max_voxels >= 1");
  check(so.parallelism >= 0, "solver.parallelism", "parallelism >= 0");
  so.numeric.max_voxels = static_cast<std::size_t>(max_voxels);

  const auto& out = doc.at("output");
  c.output.directory = out.at("directory").get<std::string>();
  c.output.format = out.at("format").get<std::string>();
  c.output.timestamp = out.at("timestamp").get<bool>();
  check(!c.output.directory.empty(), "output.directory", "non-empty directory");
  check(c.output.format == "csv" || c.output.format == "plot", "output.format", "format in {csv, plot}");

  // Backstop: the module-level invariants.
  validate(c.design);
  validate(c.environment);
  validate(c.scenario);
  return c;
}

// "key=value"; the value is read as JSON when it parses, else as a string.
inline std::pair<std::string, Json> parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set " + text + ": expected key=value");
  const std::string key = text.substr(0, eq);
  const std::string raw = text.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::parse_error&) {
    value = raw;
  }
  return {key, value};
}

}  // namespace detail

struct ConfigSources {
  std::string reference_path;  // shipped reference config; skipped when empty
  std::string user_path;       // --config or the environment variable; skipped when empty
  std::vector<std::string> overrides;  // key=value, applied last
  std::vector<std::pair<std::string, Json>> typed_overrides;  // from dedicated flags, after `overrides`
};

inline std::string default_reference_path() {
#ifdef TEGSIM_REFERENCE_CONFIG
  return TEGSIM_REFERENCE_CONFIG;
#else
  return {};
#endif
}

/// defaults <- reference config <- user file <- overrides, last wins.
inline ResolvedConfig load_config(const ConfigSources& src) {
  Json doc = default_document();
  detail::Provenance prov;
  for (const auto* path : {&src.reference_path, &src.user_path}) {
    if (path->empty()) continue;
    const std::string text = detail::read_file(*path);
    detail::merge(doc, detail::parse_document(text, *path), "", *path, text, prov);
  }
  for (const auto& o : src.overrides) {
    auto [key, value] = detail::parse_override(o);
    detail::assign(doc, key, value, "--set", prov);
  }
  for (const auto& [key, value] : src.typed_overrides) detail::assign(doc, key, value, "flag for " + key, prov);
  return detail::resolve(doc, prov);
}

inline ResolvedConfig load_config(const std::string& user_path = {}, const std::vector<std::string>& overrides = {}) {
  ConfigSources src;
  src.user_path = user_path;
  src.overrides = overrides;
  return load_config(src);
}

inline ResolvedConfig load_config_text(const std::string& text, const std::vector<std::string>& overrides = {}) {
  Json doc = default_document();
  detail::Provenance prov;
  detail::merge(doc, detail::parse_document(text, "<text>"), "", "<text>", text, prov);
  for (const auto& o : overrides) {
    auto [key, value] = detail::parse_override(o);
    detail::assign(doc, key, value, "--set", prov);
  }
  return detail::resolve(doc, prov);
}

/// Canonical echo of the resolved document; parses back to the same config.
inline std::string dump_config(const ResolvedConfig& c) { return c.document.dump(2) + "\n"; }

// The part of the document that determines results (output settings excluded).
inline Json physics_document(const ResolvedConfig& c) {
  Json j = c.document;
  j.erase("output");
  return j;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string config_hash(const ResolvedConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(physics_document(c).dump())));
  return buf;
}

}  // namespace tegsim
