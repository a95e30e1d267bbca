#include "wander/experiment.hpp"

#include <fmt/core.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "wander/discrete.hpp"
#include "wander/flowbox.hpp"
#include "wander/kaehler.hpp"
#include "wander/measures.hpp"
#include "wander/sections.hpp"

namespace wander::cli {

using nlohmann::json;

namespace {

constexpr std::string_view kNames[] = {"area", "scaling", "flowbox", "poincare", "collision", "discrete", "identities"};

std::string num(double x) { return fmt::format("{:.17g}", x); }

// Missing keys and wrong JSON types are parse errors; out-of-range values are precondition errors.
template <class T>
T get(const json& obj, const char* key) {
  if (!obj.contains(key)) fail(ErrorKind::parse, fmt::format("missing key '{}'", key));
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, fmt::format("key '{}': {}", key, e.what()));
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  return obj.contains(key) ? get<T>(obj, key) : fallback;
}

const json& block(const json& root, const char* key) {
  static const json empty = json::object();
  if (!root.contains(key)) return empty;
  if (!root.at(key).is_object()) fail(ErrorKind::parse, fmt::format("'{}' must be an object", key));
  return root.at(key);
}

Vector get_vector(const json& obj, const char* key) {
  const auto v = get<std::vector<double>>(obj, key);
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

HamiltonianSystem make_system(const json& root) {
  const json& sys = block(root, "system");
  const int n = get_or<int>(sys, "n", 2);
  require(n >= 1, ErrorKind::precondition, "system.n must be >= 1");
  PotentialSpec spec{get_or<double>(sys, "alpha", 1.0), get_or<double>(sys, "c", 1.0), std::nullopt};
  require(spec.alpha > 0.0 && spec.c >= 0.0, ErrorKind::precondition, "need alpha > 0 and c >= 0");
  if (sys.contains("perturbation")) {
    const json& pert = block(sys, "perturbation");
    spec.perturbation = make_perturbation(get<std::string>(pert, "id"), get<double>(pert, "strength"), n);
  }
  return HamiltonianSystem(n, spec);
}

FlowOptions make_flow_options(const json& root) {
  const json& tol = block(root, "tolerances");
  FlowOptions opts;
  opts.tol_rel = get_or<double>(tol, "rel", opts.tol_rel);
  opts.tol_abs = get_or<double>(tol, "abs", opts.tol_abs);
  opts.r_min = get_or<double>(tol, "r_min", opts.r_min);
  opts.r_max = get_or<double>(tol, "r_max", opts.r_max);
  opts.max_steps = get_or<long>(tol, "max_steps", opts.max_steps);
  opts.validate();
  return opts;
}

// "m": [4, 8, 16] or {"from": 4, "to": 64, "factor": 2} or {"from": 4, "to": 8, "step": 1}
std::vector<int> m_values(const json& root) {
  if (!root.contains("m")) fail(ErrorKind::parse, "missing key 'm'");
  const json& m = root.at("m");
  std::vector<int> out;
  if (m.is_array()) {
    out = get<std::vector<int>>(root, "m");
  } else if (m.is_object()) {
    const int from = get<int>(m, "from"), to = get<int>(m, "to");
    require(from >= 1 && to >= from, ErrorKind::precondition, "m range needs 1 <= from <= to");
    if (m.contains("step")) {
      const int step = get<int>(m, "step");
      require(step >= 1, ErrorKind::precondition, "m step must be >= 1");
      for (int v = from; v <= to; v += step) out.push_back(v);
    } else {
      const int factor = get_or<int>(m, "factor", 2);
      require(factor >= 2, ErrorKind::precondition, "m factor must be >= 2");
      for (long v = from; v <= to; v *= factor) out.push_back(static_cast<int>(v));
    }
  } else {
    fail(ErrorKind::parse, "'m' must be a list or a range object");
  }
  require(!out.empty(), ErrorKind::precondition, "empty m list");
  for (int v : out) require(v >= 1, ErrorKind::precondition, "surface indices must be >= 1");
  return out;
}

json estimate_json(const MeasureEstimate& e) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"count", e.count}, {"method", to_string(e.method)},
          {"degenerate", e.degenerate}};
}

struct Output {
  std::string csv;
  json summary = json::object();
};

Output run_area(const json& root, bool fit) {
  const auto sys = make_system(root);
  const double E = get<double>(root, "E");
  const auto ms = m_values(root);
  if (fit) require(ms.size() >= 2, ErrorKind::precondition, "scaling needs at least two surfaces");
  Output out;
  out.csv = "m,area_riem,area_symp\n";
  std::vector<std::pair<int, double>> symp;
  json rows = json::array();
  for (int m : ms) {
    const auto r = riemannian_area(sys, E, m);
    const auto s = symplectic_area(sys, E, m);
    out.csv += fmt::format("{},{},{}\n", m, num(r.value), num(s.value));
    symp.emplace_back(m, s.value);
    rows.push_back({{"m", m}, {"riemannian", estimate_json(r)}, {"symplectic", estimate_json(s)}});
  }
  out.summary["estimates"] = rows;
  if (fit) {
    const auto f = fit_scaling_exponent(symp);
    const double alpha = get_or<double>(block(root, "system"), "alpha", 1.0);
    out.summary["fit"] = {{"slope", f.slope},
                          {"intercept", f.intercept},
                          {"residual", f.residual},
                          {"c3", f.c3()},
                          {"expected_slope", (alpha - 2.0) * (sys.n() - 1) / 2.0}};
  }
  return out;
}

Output run_flowbox(const json& root, std::uint64_t seed) {
  const auto sys = make_system(root);
  const json& fb = block(root, "flowbox");
  const double t = get<double>(fb, "t");
  require(t > 0.0, ErrorKind::precondition, "flowbox.t must be positive");
  FlowboxOptions opts;
  opts.flow = make_flow_options(root);
  opts.seed = seed;
  opts.samples = get_or<long>(root, "samples", opts.samples);
  opts.quad_points = get_or<int>(fb, "quad_points", opts.quad_points);
  require(opts.samples > 0 && opts.quad_points >= 1, ErrorKind::precondition, "need samples > 0 and quad_points >= 1");
  const auto lhs = get_or<std::string>(fb, "lhs", "monte_carlo");
  if (lhs == "monte_carlo") {
    opts.lhs_method = FlowboxLhs::monte_carlo;
  } else if (lhs == "tube_quadrature") {
    opts.lhs_method = FlowboxLhs::tube_quadrature;
  } else {
    fail(ErrorKind::parse, "flowbox.lhs must be monte_carlo or tube_quadrature");
  }
  const Vector lo = get_vector(fb, "lo"), hi = get_vector(fb, "hi");
  std::unique_ptr<TransversalPatch> patch;
  const auto kind = get_or<std::string>(fb, "patch", "plane");
  if (kind == "plane") {
    patch = std::make_unique<CoordinatePlanePatch>(sys, get<int>(fb, "axis"), get<double>(fb, "value"), lo, hi);
  } else if (kind == "sphere") {
    patch = std::make_unique<SpherePatch>(sys, get<double>(root, "E"), get<int>(fb, "m"), lo, hi);
  } else {
    fail(ErrorKind::parse, "flowbox.patch must be plane or sphere");
  }
  std::function<double(const Vector&)> f;
  const auto weight = get_or<std::string>(fb, "weight", "one");
  if (weight == "one") {
    f = [](const Vector&) { return 1.0; };
  } else if (weight == "linear") {
    f = [](const Vector& u) { return 1.0 + u.sum(); };
  } else {
    fail(ErrorKind::parse, "flowbox.weight must be one or linear");
  }
  const auto r = flowbox_volume_check(*patch, f, t, opts);
  Output out;
  out.csv = "lhs,lhs_err,rhs,rhs_err,hit_fraction\n";
  out.csv += fmt::format("{},{},{},{},{}\n", num(r.lhs.value), num(r.lhs.std_error), num(r.rhs.value),
                         num(r.rhs.std_error), num(r.hit_fraction));
  out.summary["estimates"] = {{"lhs", estimate_json(r.lhs)},
                              {"rhs", estimate_json(r.rhs)},
                              {"box_volume", r.box_volume},
                              {"hit_fraction", r.hit_fraction}};
  return out;
}

Output run_poincare(const json& root, std::uint64_t seed) {
  const auto sys = make_system(root);
  const double E = get<double>(root, "E");
  const json& pc = block(root, "poincare");
  const int source = get_or<int>(pc, "source", 4), target = get_or<int>(pc, "target", 8);
  const double t_max = get_or<double>(pc, "t_max", 10.0);
  const double w_fraction = get_or<double>(pc, "w_fraction", 0.9);
  const long starts = get_or<long>(root, "samples", 100);
  require(source >= 1 && target >= 1 && source != target, ErrorKind::precondition, "need distinct surfaces >= 1");
  require(t_max > 0.0 && starts > 0 && w_fraction > 0.0 && w_fraction <= 1.0, ErrorKind::precondition,
          "need t_max > 0, samples > 0 and 0 < w_fraction <= 1");
  const auto opts = make_flow_options(root);
  const SurfaceChart chart(sys, E, source);
  const int dim = 2 * sys.n() - 2;

  Output out;
  out.csv = "index";
  for (int i = 0; i < dim; ++i) out.csv += fmt::format(",u{}", i);
  for (int i = 0; i < dim; ++i) out.csv += fmt::format(",v{}", i);
  out.csv += ",time,det,density_ratio,residual\n";
  long used = 0, skipped = 0;
  double worst = 0.0;
  json skip_kinds = json::object();
  for (long attempt = 0; used < starts; ++attempt) {
    require(attempt < 20 * starts, ErrorKind::budget_exhausted, "too many starts without a transversal hit");
    CounterRng rng(seed, static_cast<std::uint64_t>(attempt));
    const Vector u = chart.sample(rng, w_fraction);
    try {
      const HitEvent start{source, 0.0, chart.embed_checked(u), 0.0};
      const auto r = poincare_map(sys, E, start, target, t_max, opts);
      out.csv += fmt::format("{}", attempt);
      for (int i = 0; i < dim; ++i) out.csv += "," + num(r.start_coords(i));
      for (int i = 0; i < dim; ++i) out.csv += "," + num(r.hit_coords(i));
      out.csv += fmt::format(",{},{},{},{}\n", num(r.hit.time), num(r.det), num(r.density_target / r.density_start),
                             num(r.residual));
      worst = std::max(worst, std::abs(r.residual));
      ++used;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::no_hit && e.kind() != ErrorKind::tangential_hit &&
          e.kind() != ErrorKind::collision_before_hit && e.kind() != ErrorKind::precondition)
        throw;
      ++skipped;
      skip_kinds[std::string(to_string(e.kind()))] = get_or<long>(skip_kinds, std::string(to_string(e.kind())).c_str(), 0) + 1;
    }
  }
  out.summary["estimates"] = {{"starts", used}, {"skipped", skipped}, {"skipped_by_kind", skip_kinds},
                              {"max_abs_residual", worst}};
  return out;
}

Output run_collision(const json& root, std::uint64_t seed) {
  const auto sys = make_system(root);
  const double E = get<double>(root, "E");
  const json& col = block(root, "collision");
  const auto region_v = get_or<std::vector<double>>(col, "region", {0.5, 1.0});
  require(region_v.size() == 2 && region_v[0] > 0.0 && region_v[1] > region_v[0], ErrorKind::precondition,
          "collision.region must be [r_lo, r_hi] with 0 < r_lo < r_hi");
  const Region region{region_v[0], region_v[1]};
  TransitionOptions opts;
  opts.flow = make_flow_options(root);
  opts.M = get<int>(root, "depth");
  opts.m0 = get_or<int>(col, "m0", 0);
  opts.t_max = get_or<double>(col, "t_max", opts.t_max);
  const long samples = get_or<long>(root, "samples", 10000);
  require(samples > 0 && opts.t_max > 0.0 && opts.m0 >= 0, ErrorKind::precondition,
          "need samples > 0, t_max > 0 and m0 >= 0");
  if (opts.m0 == 0) opts.m0 = default_first_surface(sys, E, region);
  require(opts.M >= opts.m0, ErrorKind::precondition, fmt::format("depth {} is below m0 = {}", opts.M, opts.m0));
  const auto method_name = get_or<std::string>(col, "sampling", "automatic");
  SamplingMethod method = SamplingMethod::automatic;
  if (method_name == "direct") {
    method = SamplingMethod::direct;
  } else if (method_name == "shell") {
    method = SamplingMethod::shell;
  } else if (method_name != "automatic") {
    fail(ErrorKind::parse, "collision.sampling must be automatic, direct or shell");
  }

  const auto points = sample_energy_surface(sys, E, region, samples, seed, method);
  const auto profile = estimate_transition_measure(sys, E, points, opts, seed);
  Output out;
  out.csv = "M,fraction,ci_lo,ci_hi,censored\n";
  json rows = json::array();
  for (const auto& d : profile.depths) {
    out.csv += fmt::format("{},{},{},{},{}\n", d.M, num(d.fraction.value), num(d.ci_lo), num(d.ci_hi), num(d.censored));
    rows.push_back({{"M", d.M}, {"fraction", estimate_json(d.fraction)}, {"ci", {d.ci_lo, d.ci_hi}}, {"censored", d.censored}});
  }
  out.summary["m0"] = profile.m0;
  out.summary["estimates"] = rows;
  out.summary["max_deep_hit_time"] = profile.max_deep_hit_time;
  if (E > 0.0) {
    const auto mass = sigma_mass(sys, E, region, seed);
    const auto area = symplectic_area(sys, E, opts.M);
    const auto check = check_upper_bound(profile, mass.value, area.value);
    out.summary["upper_bound"] = {{"mass", estimate_json(mass)}, {"area_M", area.value}, {"lhs", check.lhs},
                                  {"bound", check.bound}, {"holds", check.holds}};
  }
  return out;
}

template <class S>
S scalar_from(const json& v);

template <>
Rational scalar_from<Rational>(const json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number()) return Rational::parse(v.dump());
  fail(ErrorKind::parse, "expected a number or a rational string");
}

template <>
double scalar_from<double>(const json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>()).to_double();
  if (v.is_number()) return v.get<double>();
  fail(ErrorKind::parse, "expected a number or a rational string");
}

template <class S>
S scalar_at(const json& obj, const char* key) {
  if (!obj.contains(key)) fail(ErrorKind::parse, fmt::format("missing key '{}'", key));
  return scalar_from<S>(obj.at(key));
}

template <class S>
discrete::DiscreteSystem<S> make_discrete(const json& d, std::uint64_t seed) {
  using namespace discrete;
  if (d.contains("random")) {
    if constexpr (std::is_same_v<S, Rational>) {
      const json& r = block(d, "random");
      return random_wandering_system(get_or<std::uint64_t>(r, "seed", seed), get_or<int>(r, "cells", 12),
                                     get_or<std::int64_t>(r, "lattice", 1000));
    } else {
      fail(ErrorKind::precondition, "random systems use rational arithmetic");
    }
  }
  const auto domain_name = get_or<std::string>(d, "domain", "half_line");
  Domain domain = Domain::half_line;
  if (domain_name == "circle") {
    domain = Domain::circle;
  } else if (domain_name != "half_line") {
    fail(ErrorKind::parse, "discrete.domain must be half_line or circle");
  }
  if (!d.contains("pieces") || !d.at("pieces").is_array()) fail(ErrorKind::parse, "discrete.pieces must be a list");
  std::vector<Piece<S>> pieces;
  for (const auto& p : d.at("pieces")) {
    std::optional<S> hi;
    if (p.contains("hi") && !p.at("hi").is_null()) hi = scalar_at<S>(p, "hi");
    pieces.push_back(Piece<S>{scalar_at<S>(p, "lo"), hi, scalar_at<S>(p, "slope"), scalar_at<S>(p, "offset")});
  }
  SurfaceMap<S> surfaces;
  const json& sf = block(d, "surfaces");
  if (sf.contains("family")) {
    const json& fam = block(sf, "family");
    surfaces = geometric_family<S>(get<int>(fam, "count"), scalar_at<S>(fam, "width"),
                                   fam.contains("decay") ? scalar_at<S>(fam, "decay") : S(1));
  }
  if (sf.contains("list")) {
    const json& list = block(sf, "list");
    for (const auto& [key, ivs] : list.items()) {
      int m = 0;
      try {
        m = std::stoi(key);
      } catch (const std::exception&) {
        fail(ErrorKind::parse, "surface keys must be integers");
      }
      if (!ivs.is_array()) fail(ErrorKind::parse, "surface entries must be lists of [lo, hi] pairs");
      for (const auto& iv : ivs) {
        if (!iv.is_array() || iv.size() != 2) fail(ErrorKind::parse, "surface intervals are [lo, hi] pairs");
        surfaces[m].push_back(Interval<S>{scalar_from<S>(iv[0]), scalar_from<S>(iv[1])});
      }
    }
  }
  return DiscreteSystem<S>(domain, std::move(pieces), std::move(surfaces));
}

template <class S>
Output run_discrete_with(const json& d, std::uint64_t seed) {
  using namespace discrete;
  const int m0 = get_or<int>(d, "m0", 1);
  const int M = get<int>(d, "depth");
  const long max_steps = get_or<long>(d, "max_steps", 100'000);
  const json& g = block(d, "grid");
  Grid<S> grid{g.contains("lo") ? scalar_at<S>(g, "lo") : S(0), g.contains("hi") ? scalar_at<S>(g, "hi") : S(1),
               get_or<long>(g, "points", 1'000'000)};
  require(m0 >= 1 && M >= m0 && max_steps > 0 && grid.points > 0, ErrorKind::precondition,
          "need 1 <= m0 <= depth, max_steps > 0 and grid.points > 0");
  const auto sys = make_discrete<S>(d, seed);
  const auto profile = estimate_transition_measure_discrete(sys, m0, M, grid, max_steps);
  Output out;
  out.csv = "M,estimate,censored,bound\n";
  json rows = json::array();
  for (const auto& dep : profile.depths) {
    const double bound = dep.min_surface + profile.resolution;
    out.csv += fmt::format("{},{},{},{}\n", dep.M, num(dep.estimate.value), dep.censored, num(bound));
    rows.push_back({{"M", dep.M}, {"estimate", estimate_json(dep.estimate)}, {"transition_points", dep.transition},
                    {"censored", dep.censored}, {"bound", bound}});
  }
  out.summary["estimates"] = rows;
  out.summary["resolution"] = profile.resolution;
  out.summary["measure_preserving"] = sys.measure_preserving();
  return out;
}

Output run_discrete(const json& root, std::uint64_t seed) {
  const json& d = block(root, "discrete");
  const auto arithmetic = get_or<std::string>(d, "arithmetic", "rational");
  if (arithmetic == "rational") return run_discrete_with<Rational>(d, seed);
  if (arithmetic == "double") return run_discrete_with<double>(d, seed);
  fail(ErrorKind::parse, "discrete.arithmetic must be rational or double");
}

Output run_identities(const json& root, std::uint64_t seed) {
  const json& id = block(root, "identities");
  const auto dims = get_or<std::vector<int>>(id, "dims", {4, 6});
  const long samples = get_or<long>(root, "samples", 100'000);
  const json& sys = block(root, "system");
  const auto potential = PotentialSpec::radial(get_or<double>(sys, "alpha", 1.0), get_or<double>(sys, "c", 1.0));
  const auto checks = kaehler_identity_suite(dims, samples, seed, potential);
  Output out;
  out.csv = "identity,samples,max_violation,bound,ok\n";
  json rows = json::array();
  for (const auto& c : checks) {
    out.csv += fmt::format("{},{},{},{},{}\n", c.name, c.samples, num(c.max_violation), num(c.bound), c.ok ? 1 : 0);
    rows.push_back({{"identity", c.name}, {"samples", c.samples}, {"skipped", c.skipped},
                    {"max_violation", c.max_violation}, {"bound", c.bound}, {"ok", c.ok}});
  }
  out.summary["estimates"] = rows;
  return out;
}

}  // namespace

std::optional<Subcommand> parse_subcommand(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kNames); ++i) {
    if (kNames[i] == name) return static_cast<Subcommand>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Subcommand sub) { return kNames[static_cast<std::size_t>(sub)]; }

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return 2;
    case ErrorKind::precondition:
    case ErrorKind::dimension_mismatch:
    case ErrorKind::incompatible_structure:
    case ErrorKind::off_surface:
    case ErrorKind::empty_surface:
    case ErrorKind::degenerate: return 3;
    case ErrorKind::budget_exhausted: return 4;
    default: return 1;
  }
}

RunOutput run_experiment(Subcommand sub, const std::string& config_text, std::optional<std::uint64_t> seed_override) {
  json root;
  try {
    root = json::parse(config_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse, fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!root.is_object()) fail(ErrorKind::parse, "config must be a JSON object");
  if (root.contains("subcommand") && get<std::string>(root, "subcommand") != to_string(sub)) {
    fail(ErrorKind::parse, "config subcommand does not match the command line");
  }
  const auto seed = seed_override.value_or(get_or<std::uint64_t>(root, "seed", 1));

  Output out;
  switch (sub) {
    case Subcommand::area: out = run_area(root, false); break;
    case Subcommand::scaling: out = run_area(root, true); break;
    case Subcommand::flowbox: out = run_flowbox(root, seed); break;
    case Subcommand::poincare: out = run_poincare(root, seed); break;
    case Subcommand::collision: out = run_collision(root, seed); break;
    case Subcommand::discrete: out = run_discrete(root, seed); break;
    case Subcommand::identities: out = run_identities(root, seed); break;
  }
  json echo = root;
  echo["subcommand"] = std::string(to_string(sub));
  echo["seed"] = seed;
  out.summary["config"] = echo;
  out.summary["seed"] = seed;
  out.summary["subcommand"] = std::string(to_string(sub));
  return RunOutput{out.csv, out.summary.dump(2)};
}

int main(int argc, char** argv) {
  CLI::App app{"wander: transition-measure experiments for central-force Hamiltonians"};
  std::string sub_name, config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("subcommand", sub_name, "area | scaling | flowbox | poincare | collision | discrete | identities")
      ->required();
  app.add_option("--config", config_path, "JSON experiment configuration")->required();
  app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--quiet", quiet, "suppress the summary line");

  auto report = [&](std::string_view category, const std::string& what, int code) {
    std::cerr << fmt::format("{{\"error\": \"{}\", \"message\": {}}}\n", category, json(what).dump());
    return code;
  };
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("parse", e.what(), 2);
  }
  const auto sub = parse_subcommand(sub_name);
  if (!sub) return report("parse", fmt::format("unknown subcommand '{}'", sub_name), 2);

  std::ifstream in(config_path);
  if (!in) return report("parse", fmt::format("cannot read config '{}'", config_path), 2);
  std::stringstream text;
  text << in.rdbuf();

  try {
    const auto start = std::chrono::steady_clock::now();
    auto result = run_experiment(*sub, text.str(), seed);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json summary = json::parse(result.json);
    summary["wall_time_s"] = wall;

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const auto stem = std::string(to_string(*sub));
    std::ofstream(dir / (stem + ".csv"), std::ios::binary) << result.csv;
    std::ofstream(dir / (stem + ".json"), std::ios::binary) << summary.dump(2) << "\n";
    if (!quiet) std::cout << fmt::format("{}: wrote {} ({:.3f} s)\n", stem, (dir / (stem + ".csv")).string(), wall);
    return 0;
  } catch (const Error& e) {
    return report(to_string(e.kind()), e.what(), exit_code_for(e.kind()));
  } catch (const std::filesystem::filesystem_error& e) {
    return report("io", e.what(), 1);
  }
}

}  // namespace wander::cli
