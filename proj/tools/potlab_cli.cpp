#include <omp.h>
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "potlab/acceptance.hpp"
#include "potlab/atomizer.hpp"
#include "potlab/bergman.hpp"
#include "potlab/errors.hpp"
#include "potlab/ideals1d.hpp"
#include "potlab/measure_io.hpp"
#include "potlab/neutralizer.hpp"
#include "potlab/scenario.hpp"

#ifndef POTLAB_SCENARIO_DIR
#define POTLAB_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;
using namespace potlab;

namespace {

constexpr int kSchema = 1;

// Files are written to a sibling staging directory and renamed into place on
// commit, so a failed run leaves nothing behind.
class OutputDir {
 public:
  explicit OutputDir(const std::string& path) : final_(fs::absolute(path)) {
    staging_ = final_;
    staging_ += ".partial-" + std::to_string(::getpid());
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  ~OutputDir() {
    std::error_code ec;
    if (!committed_) fs::remove_all(staging_, ec);
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  fs::path file(const std::string& name) const { return staging_ / name; }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream f(file(name), std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + file(name).string());
  }

  void commit() {
    fs::path old = final_;
    old += ".old-" + std::to_string(::getpid());
    const bool replace = fs::exists(final_);
    if (replace) fs::rename(final_, old);
    fs::rename(staging_, final_);
    if (replace) fs::remove_all(old);
    committed_ = true;
  }

 private:
  fs::path final_;
  fs::path staging_;
  bool committed_ = false;
};

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      o_ << (first ? "" : ",") << h;
      first = false;
    }
    o_ << '\n';
  }
  template <typename... T>
  void row(const T&... cells) {
    bool first = true;
    ((o_ << (first ? "" : ",") << cell(cells), first = false), ...);
    o_ << '\n';
  }
  std::string str() const { return o_.str(); }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(const std::string& v) { return v; }
  std::ostringstream o_;
};

Json rect_json(const Rect& r) { return rect_to_json(r); }

struct Common {
  std::string out = "potlab_out";
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  double tol = 0.0;
};

Json summary_header(const std::string& command, std::uint64_t seed) {
  Json j;
  j["schema"] = kSchema;
  j["command"] = command;
  j["seed"] = seed;
  return j;
}

Scenario scenario_with_overrides(const std::string& path, const Common& c) {
  Scenario s = load_scenario(path);
  if (c.seed) s.seed = *c.seed;
  return s;
}

Disc parse_disc(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(p, &used));
      if (used != p.size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw ConfigError("--subdisc", "expected x,y,r, got '" + text + "'");
    }
  }
  if (v.size() != 3 || !(v[2] > 0)) throw ConfigError("--subdisc", "expected x,y,r with r > 0, got '" + text + "'");
  return {{v[0], v[1]}, v[2]};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');)
    if (!p.empty()) out.push_back(p);
  return out;
}

// ------------------------------------------------------------------ atomize

struct AtomizeArgs {
  std::string measure;
  std::string scenario;
  long m = 16;
  std::optional<double> delta;
};

int run_atomize(const AtomizeArgs& a, const Common& c) {
  if (a.measure.empty() == a.scenario.empty()) throw ConfigError("atomize", "give exactly one of --measure, --scenario");
  PlanarMeasure mu;
  Rect square;
  Json source;
  std::uint64_t seed = c.seed.value_or(0);
  if (!a.measure.empty()) {
    std::ifstream f(a.measure);
    if (!f) throw ConfigError(a.measure, "cannot open");
    Json j;
    try {
      j = Json::parse(f);
    } catch (const Json::parse_error& e) {
      throw ConfigError(a.measure, e.what());
    }
    const bool wrapped = j.is_object() && j.contains("measure");
    mu = measure_from_json(wrapped ? j["measure"] : j, "measure");
    if (wrapped && j.contains("square")) {
      square = rect_from_json(j["square"], "square");
    } else {
      const Rect& b = mu.bounding();
      square = Rect::square(b.centre(), b.longer_side());
    }
    source = {{"measure", a.measure}};
  } else {
    const Scenario s = scenario_with_overrides(a.scenario, c);
    seed = s.seed;
    const double delta = a.delta.value_or(s.delta);
    const auto sw = strip(s.weight, a.m, delta);
    const double g = sw.residual.total_mass();
    if (!(g > 0)) throw ZeroMass("no residual mass on the square at m = " + std::to_string(a.m));
    const long N = choose_Nm(static_cast<double>(a.m), g, delta);
    mu = scale(sw.residual, static_cast<double>(N) / g);
    square = Rect::square(s.weight.domain.centre, 2.0 * s.weight.domain.radius);
    source = {{"scenario", s.name}, {"m", a.m}, {"delta", delta}, {"N_m", N}};
  }

  OutputDir out(c.out);
  const auto r = atomise(mu, square);
  Csv pieces({"index", "centre_x", "centre_y", "mass", "atoms", "container_x_min", "container_x_max",
              "container_y_min", "container_y_max", "support_x_min", "support_x_max", "support_y_min",
              "support_y_max"});
  for (const auto& p : r.pieces) {
    const Rect& k = p.container;
    const Rect& s = p.support;
    pieces.row(p.index, p.centre.x, p.centre.y, p.piece.total_mass(), static_cast<long>(p.piece.atoms().size()),
               k.x_min, k.x_max, k.y_min, k.y_max, s.x_min, s.x_max, s.y_min, s.y_max);
  }
  out.write("pieces.csv", pieces.str());

  const auto& cr = r.certificates;
  Csv cert({"certificate", "pass", "value"});
  cert.row(std::string("a_unit_mass"), cr.a_pass, cr.a_max_mass_deviation);
  cert.row(std::string("b_containment"), cr.b_pass, cr.b_cover_fraction);
  cert.row(std::string("c_disjoint_interiors"), cr.c_pass, cr.c_overlapping_pairs);
  cert.row(std::string("d_aspect"), cr.d_pass, cr.d_max_aspect);
  cert.row(std::string("e_overlap"), cr.e_pass, cr.e_max_multiplicity);
  cert.row(std::string("f_separation"), cr.f_pass, cr.f_ratio);
  out.write("certificates.csv", cert.str());

  Json j = summary_header("atomize", seed);
  j["source"] = source;
  j["square"] = rect_json(square);
  j["N"] = r.N;
  j["cuts"] = r.cuts;
  j["peeled"] = r.peeled;
  j["certified"] = cr.certified();
  j["certificates"] = {{"a", cr.a_pass},
                       {"b", cr.b_pass},
                       {"c", cr.c_pass},
                       {"d", cr.d_pass},
                       {"e", cr.e_pass},
                       {"f", cr.f_pass},
                       {"max_mass_deviation", cr.a_max_mass_deviation},
                       {"max_aspect", cr.d_max_aspect},
                       {"max_multiplicity", cr.e_max_multiplicity},
                       {"f_ratio", cr.f_ratio}};
  out.write("summary.json", j.dump(2) + "\n");
  out.commit();
  return 0;
}

// ------------------------------------------------------------------ neutralize

struct SweepArgs {
  std::string scenario;
  std::string m_grid;
  std::optional<double> delta;
};

int run_neutralize(const SweepArgs& a, const Common& c) {
  Scenario s = scenario_with_overrides(a.scenario, c);
  if (a.delta) s.delta = *a.delta;
  if (!(s.delta > 0 && s.delta < 1)) throw ConfigError("--delta", "need 0 < δ < 1");
  const MGrid grid = a.m_grid.empty() ? s.m_grid : parse_m_grid(a.m_grid, "--m-grid");
  NeutraliseOptions no;
  if (c.tol > 0) no.tol = c.tol;
  no.hard_tol = std::max(no.hard_tol, 10 * no.tol);

  OutputDir out(c.out);
  const auto sweep = neutralise_sweep(s, grid.values(), no);
  Csv csv({"m", "N_m", "sum_mj", "bound_i_ok", "min_sep", "sep_bound_ok", "I_m", "I_m_over_m"});
  bool ok = true;
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    const auto& r = sweep.rows[i];
    csv.row(r.m, r.N_m, r.sum_mj, r.bound_i_ok, r.min_separation_small_nu, static_cast<bool>(sweep.sep_ok[i]), r.I_m,
            r.log_I_m / static_cast<double>(r.m));
    ok = ok && r.bound_i_ok && sweep.sep_ok[i];
  }
  out.write("neutralize.csv", csv.str());

  Json j = summary_header("neutralize", s.seed);
  j["scenario"] = s.name;
  j["delta"] = s.delta;
  j["tol"] = no.tol;
  j["m"] = grid.values();
  j["gamma"] = sweep.rows.empty() ? 0.0 : sweep.rows.front().gamma;
  j["fitted"] = {{"sep_constant", sweep.sep_constant}, {"C_r", sweep.fitted_C_r}};
  j["decay_applies"] = sweep.decay_applies;
  j["bounds_hold"] = ok;
  out.write("summary.json", j.dump(2) + "\n");
  out.commit();
  return 0;
}

// ------------------------------------------------------------------ bergman

struct BergmanArgs {
  std::string scenario;
  std::string m_grid;
  std::optional<int> jet;
  std::string subdisc;
  std::string probes;
};

int run_bergman(const BergmanArgs& a, const Common& c) {
  Scenario s = scenario_with_overrides(a.scenario, c);
  if (!a.m_grid.empty()) s.grids.bergman_m = parse_m_grid(a.m_grid, "--m-grid").values();
  if (a.jet) {
    if (*a.jet < 0) throw ConfigError("--jet", "need a nonnegative order");
    s.jet.order = *a.jet;
  }
  if (!a.subdisc.empty()) s.jet.subdisc = parse_disc(a.subdisc);
  std::vector<std::string> probes = a.probes.empty() ? std::vector<std::string>{"sandwich", "kernel"} : split_list(a.probes);
  if (a.probes.empty() && s.zero_lelong) probes.push_back("mass");
  for (const auto& p : probes)
    if (p != "sandwich" && p != "kernel" && p != "mass") throw ConfigError("--probes", "unknown probe '" + p + "'");

  BasisOptions bo;
  if (c.tol > 0) bo.tol = c.tol;
  const auto w = bergman_weight(s);
  const Disc& D = s.weight.domain;

  OutputDir out(c.out);
  Json j = summary_header("bergman", s.seed);
  j["scenario"] = s.name;
  j["m"] = s.grids.bergman_m;
  j["jet_order"] = s.jet.order;
  j["subdisc"] = {s.jet.subdisc.centre.x, s.jet.subdisc.centre.y, s.jet.subdisc.radius};
  bool ok = true;
  for (const auto& p : probes) {
    if (p == "sandwich") {
      const auto rep = sandwich_probe(w, D, s.grids.bergman_m, sandwich_points(s, w), s.grids.sandwich_r, bo);
      Csv csv({"m", "lelong", "lelong_ok", "worst_lower", "worst_upper", "degree_cap", "pass"});
      for (const auto& r : rep.rows) csv.row(r.m, r.lelong, r.lelong_ok, r.worst_lower, r.worst_upper, r.degree_cap, r.pass);
      out.write("sandwich.csv", csv.str());
      j["sandwich"] = {{"C1", rep.C1}, {"log_C2", rep.log_C2}, {"r", rep.r}, {"pass", rep.pass}};
      ok = ok && rep.pass;
    } else if (p == "mass") {
      const auto rows = mass_growth_probe(w, D, s.grids.bergman_m, s.jet.subdisc, bo);
      Csv csv({"m", "sup_abs_psi", "mass", "degree_cap"});
      for (const auto& r : rows) csv.row(r.m, r.sup_abs_psi, r.mass, r.degree_cap);
      out.write("mass_growth.csv", csv.str());
    } else {
      const Disc& B = s.jet.subdisc;
      const Disc B0{B.centre, 0.5 * B.radius};
      const long m = s.grids.bergman_m.front();
      const auto k = kernel_comparison(w, D, B, B0, m, s.jet.order, s.grids.kernel_grid, bo);
      Csv csv({"m", "p", "points", "violations", "max_log_excess", "max_log_ratio", "pass"});
      csv.row(m, s.jet.order, k.points, k.violations, k.max_log_excess, k.max_log_ratio, k.pass);
      out.write("kernel.csv", csv.str());
      j["kernel"] = {{"pass", k.pass}, {"max_log_ratio", k.max_log_ratio}};
      ok = ok && k.pass;
    }
  }
  j["pass"] = ok;
  out.write("summary.json", j.dump(2) + "\n");
  out.commit();
  return 0;
}

// ------------------------------------------------------------------ ideals

int run_ideals(const std::string& grid, const Common& c) {
  std::vector<std::string> parts;
  std::stringstream ss(grid);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  double nu_max = 0;
  long m0_max = 0, q_max = 0;
  try {
    if (parts.size() != 3) throw std::invalid_argument("shape");
    nu_max = std::stod(parts[0]);
    m0_max = std::stol(parts[1]);
    q_max = std::stol(parts[2]);
  } catch (const std::logic_error&) {
    throw ConfigError("--grid", "expected NU_MAX:M0_MAX:Q_MAX, got '" + grid + "'");
  }
  const long steps = std::lround(100.0 * nu_max);
  if (steps < 1 || m0_max < 1 || q_max < 1) throw ConfigError("--grid", "bounds must be positive");

  OutputDir out(c.out);
  Csv csv({"nu", "m0", "q", "eps", "order_m0", "order_m0q", "left_ok", "right_ok"});
  long cases = 0, left_fail = 0, right_fail = 0;
  for (long i = 1; i <= steps; ++i) {
    const double nu = static_cast<double>(i) / 100.0;
    for (long m0 = 1; m0 <= m0_max; ++m0)
      for (long q = 1; q <= q_max; ++q)
        for (double f : {1.0, 2.0, 5.0}) {
          const double eps = 3.0 / static_cast<double>(m0) * f;
          const auto k = check_inclusions(nu, m0, q, eps);
          csv.row(nu, m0, q, eps, k.order_m0, k.order_m0q, k.left_ok, k.right_ok);
          ++cases;
          left_fail += k.left_contractual && !k.left_ok;
          right_fail += !k.right_ok;
        }
  }
  out.write("ideals.csv", csv.str());
  Json j = summary_header("ideals", c.seed.value_or(0));
  j["grid"] = {{"nu_max", nu_max}, {"m0_max", m0_max}, {"q_max", q_max}, {"eps_factors", {1, 2, 5}}};
  j["cases"] = cases;
  j["left_failures"] = left_fail;
  j["right_failures"] = right_fail;
  out.write("summary.json", j.dump(2) + "\n");
  out.commit();
  return 0;
}

// ------------------------------------------------------------------ verify-all

struct VerifyArgs {
  std::string scenarios = POTLAB_SCENARIO_DIR;
  std::string criteria;
  std::string m_grid;
};

int run_verify_all(const VerifyArgs& a, const Common& c) {
  AcceptanceOptions opts;
  opts.scenario_dir = a.scenarios;
  if (c.seed) opts.seed = *c.seed;
  if (!a.m_grid.empty()) opts.m_grid = parse_m_grid(a.m_grid, "--m-grid");
  for (const auto& t : split_list(a.criteria)) {
    int id = 0;
    try {
      id = std::stoi(t);
    } catch (const std::logic_error&) {
      throw ConfigError("--criteria", "not an integer: '" + t + "'");
    }
    if (id < 1 || id > 10) throw ConfigError("--criteria", "criteria are numbered 1 to 10");
    opts.only.insert(id);
  }
  for (const auto& path : list_scenarios(opts.scenario_dir)) load_scenario(path);

  OutputDir out(c.out);
  const auto results = run_acceptance(opts);
  Csv csv({"id", "title", "pass", "detail"});
  Json list = Json::array();
  int passed = 0;
  for (const auto& r : results) {
    std::printf("%s\n", format_result(r).c_str());
    csv.row(r.id, quoted(r.title), r.pass, quoted(r.detail));
    list.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"seconds", r.seconds}, {"detail", r.detail}});
    passed += r.pass;
  }
  std::printf("%d/%zu criteria pass\n", passed, results.size());
  out.write("acceptance.csv", csv.str());
  Json j = summary_header("verify-all", opts.seed);
  j["scenario_dir"] = opts.scenario_dir;
  j["criteria"] = list;
  j["passed"] = passed;
  j["total"] = results.size();
  out.write("summary.json", j.dump(2) + "\n");
  out.commit();
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neutralisation of subharmonic weights and Bergman-kernel probes"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--out", common.out, "output directory (replaced atomically)");
  app.add_option("--seed", common.seed, "64-bit seed; overrides the scenario seed");
  app.add_option("--jobs", common.jobs, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--tol", common.tol, "relative tolerance of the quadratures (0: default)")->check(CLI::NonNegativeNumber);

  AtomizeArgs at;
  auto* atomize = app.add_subcommand("atomize", "split a measure of integer mass into unit pieces");
  atomize->add_option("--measure", at.measure, "measure document, bare or {measure, square}");
  atomize->add_option("--scenario", at.scenario, "atomise the stripped residual of a scenario instead");
  atomize->add_option("--m", at.m, "multiplier m with --scenario")->check(CLI::PositiveNumber);
  atomize->add_option("--delta", at.delta, "δ with --scenario");

  SweepArgs ne;
  auto* neutralize = app.add_subcommand("neutralize", "neutralising functions f_m over an m-grid");
  neutralize->add_option("--scenario", ne.scenario, "scenario file")->required();
  neutralize->add_option("--m-grid", ne.m_grid, "A:B[:geometric|linear]");
  neutralize->add_option("--delta", ne.delta, "δ in (0, 1)");

  BergmanArgs be;
  auto* bergman = app.add_subcommand("bergman", "sandwich, mass-growth and kernel-comparison probes");
  bergman->add_option("--scenario", be.scenario, "scenario file")->required();
  bergman->add_option("--m-grid", be.m_grid, "A:B[:geometric|linear]");
  bergman->add_option("--jet", be.jet, "jet order p");
  bergman->add_option("--subdisc", be.subdisc, "x,y,r of the subdisc B");
  bergman->add_option("--probes", be.probes, "comma list of sandwich, kernel, mass");

  std::string grid = "3:50:20";
  auto* ideals = app.add_subcommand("ideals", "multiplier-ideal inclusion chain over a grid");
  ideals->add_option("--grid", grid, "NU_MAX:M0_MAX:Q_MAX, ν in steps of 0.01")->capture_default_str();

  VerifyArgs ve;
  auto* verify = app.add_subcommand("verify-all", "run the acceptance suite");
  verify->add_option("--scenarios", ve.scenarios, "scenario directory")->capture_default_str();
  verify->add_option("--criteria", ve.criteria, "comma list of criterion numbers (default: all)");
  verify->add_option("--m-grid", ve.m_grid, "override the neutralise m-grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (common.jobs > 0) omp_set_num_threads(common.jobs);

  try {
    if (*atomize) return run_atomize(at, common);
    if (*neutralize) return run_neutralize(ne, common);
    if (*bergman) return run_bergman(be, common);
    if (*ideals) return run_ideals(grid, common);
    return run_verify_all(ve, common);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
