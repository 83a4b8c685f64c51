#include "potlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "potlab/errors.hpp"
#include "potlab/quad.hpp"

namespace potlab {

std::vector<long> MGrid::values() const {
  std::vector<long> out;
  for (long m = from; m <= to; m = kind == Kind::geometric ? 2 * m : m + 1) out.push_back(m);
  return out;
}

MGrid parse_m_grid(const std::string& text, const std::string& where) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 3) throw ConfigError(where, "expected A:B[:geometric|linear], got '" + text + "'");
  MGrid g;
  try {
    std::size_t used = 0;
    g.from = std::stol(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("trailing");
    g.to = std::stol(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("trailing");
  } catch (const std::logic_error&) {
    throw ConfigError(where, "bounds must be integers, got '" + text + "'");
  }
  if (parts.size() == 3) {
    if (parts[2] == "geometric") g.kind = MGrid::Kind::geometric;
    else if (parts[2] == "linear") g.kind = MGrid::Kind::linear;
    else throw ConfigError(where, "unknown spacing '" + parts[2] + "'");
  }
  if (g.from < 1 || g.to < g.from) throw ConfigError(where, "need 1 ≤ A ≤ B");
  return g;
}

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  std::set<std::string> k(known.begin(), known.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!k.count(it.key())) throw ConfigError(where + "." + it.key(), "unknown field");
}

Point2 point_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(where, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Disc disc_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, {"centre", "radius"}, where);
  Disc d{point_from_json(json_child(j, "centre", where), where + ".centre"), json_number(j, "radius", where)};
  if (!(d.radius > 0.0)) throw ConfigError(where + ".radius", "must be positive");
  return d;
}

std::vector<std::complex<double>> g0_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where, "expected [[re, im], ...]");
  std::vector<std::complex<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& c = j[i];
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
      throw ConfigError(where + "[" + std::to_string(i) + "]", "expected [re, im]");
    out.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  return out;
}

RadialProfile profile_from_json(const Json& j, Point2 centre, const std::string& where) {
  reject_unknown(j, {"nu", "shift", "a", "b", "cutoff"}, where);
  RadialProfile p;
  p.centre = centre;
  p.nu = json_number_or(j, "nu", 0.0, where);
  p.shift = json_number_or(j, "shift", 0.0, where);
  p.a = json_number_or(j, "a", 0.0, where);
  p.b = json_number_or(j, "b", 0.0, where);
  p.cutoff = json_number_or(j, "cutoff", 0.0, where);
  if (p.nu < 0.0 || p.a < 0.0 || p.b < 0.0) throw ConfigError(where, "nu, a and b must be nonnegative");
  if (p.b > 0.0 && !(p.cutoff > 0.0 && p.cutoff < 1.0)) throw ConfigError(where + ".cutoff", "must lie in (0, 1) when b > 0");
  return p;
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

}  // namespace

DensityGrid sqrt_log_density(const Disc& d, int n) {
  if (n < 2 || n % 2 != 0) throw DomainError("sqrt_log_density needs an even n ≥ 2");
  if (!(d.radius < 1.0)) throw DomainError("sqrt_log_density needs radius < 1");
  const double half = d.radius / std::sqrt(2.0) * 0.99;
  DensityGrid g{{d.centre.x - half, d.centre.x + half, d.centre.y - half, d.centre.y + half}, n, n, {}};
  g.cells.resize(static_cast<std::size_t>(n) * n);
  const double h = 2.0 * half / n;
  QuadOptions o;
  o.tol = 1e-10;
  o.exec = Exec::serial;
  // (1/2π)Δφ = (−log ρ)^{−3/2} / (8πρ²)
  auto density = [&](Point2 z) {
    const double rho = distance(z, d.centre);
    return std::pow(-std::log(rho), -1.5) / (8.0 * M_PI * rho * rho);
  };
  // a cell with a corner at the centre: (1/4π) ∫₀^{π/2} (−log ρ_out(θ))^{−1/2} dθ
  const double corner =
      integrate_1d([&](double th) { return std::pow(-std::log(h / std::max(std::cos(th), std::sin(th))), -0.5); }, 0.0,
                   M_PI / 2, o)
          .value /
      (4.0 * M_PI);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const bool touches = (ix == n / 2 - 1 || ix == n / 2) && (iy == n / 2 - 1 || iy == n / 2);
      g.cells[static_cast<std::size_t>(iy) * n + ix] = touches ? corner : integrate_rect(density, g.cell_rect(ix, iy), o).value;
    }
  return g;
}

Scenario scenario_from_json(const Json& j) {
  const std::string root = "scenario";
  reject_unknown(j, {"name", "weight", "disc", "delta", "m_grid", "jet", "grids", "seed"}, root);
  Scenario s;
  const Json& name = json_child(j, "name", root);
  if (!name.is_string()) throw ConfigError(root + ".name", "expected a string");
  s.name = name.get<std::string>();

  const Disc disc = disc_from_json(json_child(j, "disc", root), root + ".disc");
  if (!(disc.radius < 0.5)) throw ConfigError(root + ".disc.radius", "must lie in (0, 1/2)");

  const std::string ww = root + ".weight";
  const Json& w = json_child(j, "weight", root);
  reject_unknown(w, {"measure", "generator", "g0", "bergman"}, ww);
  const bool has_measure = w.contains("measure"), has_gen = w.contains("generator");
  if (has_measure == has_gen) throw ConfigError(ww, "give exactly one of 'measure' and 'generator'");
  std::optional<PlanarMeasure> mu;
  if (has_measure) {
    mu = measure_from_json(w["measure"], ww + ".measure");
  } else {
    const std::string gw = ww + ".generator";
    const Json& gen = w["generator"];
    reject_unknown(gen, {"kind", "n"}, gw);
    const Json& kind = json_child(gen, "kind", gw);
    if (!kind.is_string() || kind.get<std::string>() != "sqrt_log") throw ConfigError(gw + ".kind", "expected \"sqrt_log\"");
    const long n = gen.contains("n") ? json_integer(gen, "n", gw) : 16;
    if (n < 2 || n > 256 || n % 2 != 0) throw ConfigError(gw + ".n", "must be even and in [2, 256]");
    mu = PlanarMeasure({}, sqrt_log_density(disc, static_cast<int>(n)), disc.bounding_square());
    s.zero_lelong = true;
  }
  for (const auto& a : mu->atoms())
    if (!disc.contains(a.at)) throw ConfigError(ww, "atoms must lie in the disc");
  s.weight = {*mu, w.contains("g0") ? g0_from_json(w["g0"], ww + ".g0") : std::vector<std::complex<double>>{}, disc};
  if (w.contains("bergman")) s.bergman_profile = profile_from_json(w["bergman"], disc.centre, ww + ".bergman");

  s.closed_form = !mu->has_density();
  for (const auto& a : mu->atoms()) s.closed_form = s.closed_form && std::abs(a.mass - std::round(a.mass)) <= 1e-12;

  if (j.contains("delta")) {
    s.delta = json_number(j, "delta", root);
    if (!(s.delta > 0.0 && s.delta < 1.0)) throw ConfigError(root + ".delta", "must lie in (0, 1)");
  }
  if (j.contains("m_grid")) {
    const Json& g = j["m_grid"];
    if (!g.is_string()) throw ConfigError(root + ".m_grid", "expected \"A:B[:geometric|linear]\"");
    s.m_grid = parse_m_grid(g.get<std::string>(), root + ".m_grid");
  }
  if (j.contains("jet")) {
    const std::string jw = root + ".jet";
    const Json& jet = j["jet"];
    reject_unknown(jet, {"order", "subdisc"}, jw);
    if (jet.contains("order")) {
      s.jet.order = static_cast<int>(json_integer(jet, "order", jw));
      if (s.jet.order < 0) throw ConfigError(jw + ".order", "must be nonnegative");
    }
    s.jet.subdisc = jet.contains("subdisc") ? disc_from_json(jet["subdisc"], jw + ".subdisc") : Disc{disc.centre, 0.375 * disc.radius};
  } else {
    s.jet.subdisc = {disc.centre, 0.375 * disc.radius};
  }
  if (!(distance(s.jet.subdisc.centre, disc.centre) + s.jet.subdisc.radius < disc.radius))
    throw ConfigError(root + ".jet.subdisc", "must be relatively compact in the disc");
  if (j.contains("grids")) {
    const std::string gw = root + ".grids";
    const Json& g = j["grids"];
    reject_unknown(g, {"bergman_m", "sandwich_points", "sandwich_r", "kernel_grid"}, gw);
    if (g.contains("bergman_m")) {
      const Json& b = g["bergman_m"];
      if (!b.is_array() || b.empty()) throw ConfigError(gw + ".bergman_m", "expected a nonempty array of integers");
      s.grids.bergman_m.clear();
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (!b[i].is_number_integer() || b[i].get<long>() < 1)
          throw ConfigError(gw + ".bergman_m[" + std::to_string(i) + "]", "expected a positive integer");
        s.grids.bergman_m.push_back(b[i].get<long>());
      }
    }
    if (g.contains("sandwich_points")) s.grids.sandwich_points = static_cast<int>(json_integer(g, "sandwich_points", gw));
    if (g.contains("sandwich_r")) s.grids.sandwich_r = json_number(g, "sandwich_r", gw);
    if (g.contains("kernel_grid")) s.grids.kernel_grid = static_cast<int>(json_integer(g, "kernel_grid", gw));
    if (s.grids.sandwich_points < 1 || s.grids.kernel_grid < 1) throw ConfigError(gw, "grid sizes must be positive");
    if (!(s.grids.sandwich_r > 0.0 && s.grids.sandwich_r < 0.5 * disc.radius))
      throw ConfigError(gw + ".sandwich_r", "must lie in (0, r/2)");
  }
  if (j.contains("seed")) {
    const Json& seed = j["seed"];
    if (!seed.is_number_unsigned()) throw ConfigError(root + ".seed", "expected a nonnegative integer");
    s.seed = seed.get<std::uint64_t>();
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ":" + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)), e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

std::vector<std::string> list_scenarios(const std::string& dir) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path().string());
  if (ec) throw ConfigError(dir, "cannot list scenario directory");
  std::sort(out.begin(), out.end());
  return out;
}

BergmanWeight bergman_weight(const Scenario& s) {
  if (s.bergman_profile) return BergmanWeight::from_profile(*s.bergman_profile);
  return BergmanWeight::from_subharmonic(s.weight);
}

std::vector<Point2> sandwich_points(const Scenario& s, const BergmanWeight& w) {
  const Disc& D = s.weight.domain;
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<Point2> pts;
  const double reach = 0.6 * D.radius;
  while (static_cast<int>(pts.size()) < s.grids.sandwich_points) {
    const double rho = reach * std::sqrt(U(rng)), th = 2 * M_PI * U(rng);
    const Point2 z{D.centre.x + rho * std::cos(th), D.centre.y + rho * std::sin(th)};
    bool near_pole = false;
    for (const auto& p : w.poles) near_pole = near_pole || distance(p.at, z) < 1e-3;
    if (!near_pole) pts.push_back(z);
  }
  return pts;
}

}  // namespace potlab
