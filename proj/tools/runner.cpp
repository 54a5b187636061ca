#include "runner.hpp"

#include <boost/version.hpp>
#include <fftw3.h>
#include <omp.h>
#include <openssl/crypto.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "config.hpp"
#include "specdecay/decay_fit.hpp"
#include "specdecay/errors.hpp"
#include "specdecay/heat_flow.hpp"
#include "specdecay/kernels.hpp"
#include "specdecay/littlewood_paley.hpp"
#include "specdecay/nse_sim.hpp"
#include "specdecay/synthesis.hpp"

#ifndef SPECDECAY_VERSION
#define SPECDECAY_VERSION "unknown"
#endif
#ifndef SPECDECAY_YAMLCPP_VERSION
#define SPECDECAY_YAMLCPP_VERSION "unknown"
#endif

namespace specdecay::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  ExperimentConfig cfg;
  fs::path config_dir;
  fs::path out;
  std::optional<Field> field;
};

const RadialProfile& radial(const Context& c, const char* what) {
  if (!std::holds_alternative<RadialProfile>(*c.field))
    throw ExecutionError(std::string(what) + " needs the radial backend");
  return std::get<RadialProfile>(*c.field);
}

const GridField& gridded(const Context& c, const char* what) {
  if (!std::holds_alternative<GridField>(*c.field)) throw ExecutionError(std::string(what) + " needs the grid backend");
  return std::get<GridField>(*c.field);
}

BlockMode block_mode(const json& a) {
  const std::string m = a.value("mode", "sharp");
  if (m == "sharp") return BlockMode::sharp;
  if (m == "smooth") return BlockMode::smooth;
  throw ConfigInvalid("mode must be \"sharp\" or \"smooth\", got \"" + m + "\"");
}

std::vector<double> times_of(const json& t) {
  const double from = t["from"], to = t["to"];
  if (!(from > 0.0) || !(to > from)) throw ConfigInvalid("times need 0 < from < to");
  return log_time_grid(from, to, t.value("per_decade", 10));
}

std::pair<double, double> pair_of(const json& v, const char* what) {
  if (v.size() != 2) throw ConfigInvalid(std::string(what) + " needs exactly two numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> ladder_of(const json& a) {
  const json r = a.value("rho", json::object());
  return rho_ladder(r.value("lo", 1e-8), r.value("hi", 1e-1), r.value("per_decade", 4));
}

Field build_field(const Context& c) {
  const json& r = c.cfg.recipe;
  if (r["backend"] == "radial") return profile_from_json(r["profile"]);

  const json& g = r["grid"];
  const int dim = g["dim"], n = g["resolution"];
  const double length = g.contains("length") ? g["length"].get<double>() : 2.0 * std::numbers::pi / g["k0"].get<double>();
  const Grid grid(dim, length, n);
  const json& s = r["source"];
  const std::string kind = s["kind"];
  if (kind == "zero") return GridField(grid);
  if (kind == "taylor_green") return make_taylor_green(grid, s.value("m", 1), s.value("amplitude", 1.0));
  if (kind == "file") return load_grid_field((c.config_dir / s["path"].get<std::string>()).string());
  const RadialProfile p = profile_from_json(r["profile"]);
  if (p.dim() != dim) throw ConfigInvalid("profile dim does not match grid dim");
  if (kind == "sample") {
    std::vector<std::array<double, 3>> centers;
    for (const auto& pt : s.value("centers", json::array({json::array({0.0})}))) {
      std::array<double, 3> x{0.0, 0.0, 0.0};
      for (std::size_t d = 0; d < pt.size(); ++d) x[d] = pt[d];
      centers.push_back(x);
    }
    return sample_on_grid(p, grid, centers);
  }
  const std::string mode = s.value("mode", "random_phase");
  if (mode != "random_phase" && mode != "gaussian") throw ConfigInvalid("source.mode must be random_phase or gaussian");
  const std::uint64_t seed = s.contains("seed") ? s["seed"].get<std::uint64_t>() : c.cfg.seed;
  return make_random_div_free(grid, seed, [p](double k) { return p.amplitude(k); },
                              mode == "gaussian" ? RandomMode::gaussian : RandomMode::random_phase);
}

class Artifacts {
 public:
  Artifacts(const fs::path& dir, std::string stem, AnalysisOutcome& o) : dir_(dir), stem_(std::move(stem)), o_(o) {}

  std::ofstream open(const std::string& suffix) {
    const std::string name = stem_ + suffix;
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw ExecutionError("cannot write " + (dir_ / name).string());
    f << std::setprecision(17);
    o_.artifacts.push_back(name);
    return f;
  }

  /// Registers an artifact written by someone else and returns its path.
  std::string path(const std::string& suffix) {
    o_.artifacts.push_back(stem_ + suffix);
    return (dir_ / (stem_ + suffix)).string();
  }

 private:
  fs::path dir_;
  std::string stem_;
  AnalysisOutcome& o_;
};

bool run_analysis(const Context& c, const json& a, Artifacts& art, json& summary) {
  const std::string type = a["type"];

  if (type == "blocks") {
    const DyadicSpectrum s = dyadic_blocks(*c.field, a["j_min"], a["j_max"], block_mode(a));
    auto f = art.open(".csv");
    write_csv(f, s);
    summary = {{"window_mass", s.window_mass()}, {"mass_below", s.mass_below}, {"mass_above", s.mass_above}};
    return true;
  }

  if (type == "besov") {
    const double sigma = a["sigma"];
    const DyadicSpectrum s = dyadic_blocks(*c.field, a["j_min"], a["j_max"], block_mode(a));
    const BesovReport b = besov_seminorm(s, sigma);
    auto f = art.open(".csv");
    write_csv(f, s, sigma);
    summary = {{"sigma", sigma}, {"seminorm", b.seminorm}, {"arg_sup", b.arg_sup}, {"diverges", b.diverges}};
    return !a.contains("expect") || a["expect"].get<bool>() == !b.diverges;
  }

  if (type == "membership") {
    const DyadicSpectrum s = dyadic_blocks(*c.field, a["j_min"], a["j_max"], block_mode(a));
    const std::string kind = a["kind"];
    MembershipVerdict v;
    bool in = false;
    double index = 0.0;
    if (kind == "script_A") {
      if (!a.contains("sigma")) throw ConfigInvalid("script_A membership needs sigma");
      index = a["sigma"];
      v = script_A_membership(s, index, a.value("M", 1));
      in = v.in_besov && v.in_script_A;
    } else if (kind == "V_alpha") {
      if (!a.contains("alpha")) throw ConfigInvalid("V_alpha membership needs alpha");
      v = V_alpha_membership(s, a["alpha"].get<double>());
      index = 2.0 * a["alpha"].get<double>();
      in = v.in_V_alpha;
    } else {
      throw ConfigInvalid("membership kind must be script_A or V_alpha");
    }
    auto f = art.open(".csv");
    write_csv(f, s, index);
    summary = {{"kind", kind},   {"member", in},       {"in_besov", v.in_besov}, {"C", v.C},
               {"c", v.c},       {"delta", v.delta},   {"j0", v.j0},             {"vanishing", v.vanishing},
               {"norm", v.norm}};
    return !a.contains("expect") || a["expect"].get<bool>() == in;
  }

  if (type == "heat") {
    const DecayProfile p = decay_profile(*c.field, times_of(a["times"]));
    auto f = art.open(".csv");
    write_csv(f, p);
    summary = {{"samples", p.size()}, {"backend", p.backend}};
    return true;
  }

  if (type == "certify") {
    const json& t = a["times"];
    const DecayProfile p = decay_profile(*c.field, times_of(t));
    FitOptions opt;
    if (a.contains("claimed_sigma")) opt.claimed_sigma = a["claimed_sigma"].get<double>();
    const auto window = a.contains("window") ? pair_of(a["window"], "window")
                                              : std::pair<double, double>{t["from"], t["to"]};
    const DecayCertificate cert = fit_rate(p, window, opt);
    auto f = art.open(".csv");
    write_csv(f, p);
    auto txt = art.open(".txt");
    write_text(txt, cert);
    summary = to_json(cert);
    return std::string(to_string(cert.verdict)) == a.value("expect", "two_sided");
  }

  if (type == "splitting") {
    std::optional<double> sigma;
    if (a.contains("sigma")) sigma = a["sigma"].get<double>();
    const SplittingReport r = fourier_splitting_check(radial(c, "splitting"), sigma, times_of(a["times"]));
    auto f = art.open(".csv");
    f << "t,energy,derivative,lhs,rhs,margin,compensated\n";
    for (const auto& s : r.samples)
      f << s.t << ',' << s.energy << ',' << s.derivative << ',' << s.lhs << ',' << s.rhs << ',' << s.margin << ','
        << s.compensated << '\n';
    summary = {{"worst_margin", r.worst_margin},
               {"inequality_holds", r.inequality_holds},
               {"fd_check", r.fd_check},
               {"comp_ratio", r.comp_ratio},
               {"rhs_bounded", r.rhs_bounded}};
    return r.inequality_holds && (!sigma || r.rhs_bounded);
  }

  if (type == "equivalence") {
    EquivalenceOptions opt;
    opt.mode = block_mode(a);
    opt.stride = a.value("stride", 1);
    if (a.contains("time_window")) opt.time_window = pair_of(a["time_window"], "time_window");
    const EquivalenceReport r =
        equivalence_report(radial(c, "equivalence"), a["sigma_grid"].get<std::vector<double>>(), ladder_of(a), opt);
    auto f = art.open(".csv");
    f << "sigma,heat_decay,low_freq_mass,membership,agree\n";
    for (const auto& row : r.rows)
      f << row.sigma << ',' << row.heat.holds << ',' << row.mass.holds << ',' << row.membership.holds << ','
        << row.agree << '\n';
    auto txt = art.open(".txt");
    write_text(txt, r);
    summary = to_json(r);
    const auto& top = r.rows.front();
    const bool positive = top.heat.holds && top.mass.holds && top.membership.holds;
    return r.agree && (!a.contains("expect_positive") || a["expect_positive"].get<bool>() == positive);
  }

  if (type == "mass") {
    const double alpha = a["alpha"];
    std::vector<double> rho = ladder_of(a);
    auto f = art.open(".csv");
    f << "rho,mass,compensated\n";
    std::vector<double> comp;
    for (double r : rho) {
      const double m = std::visit([&](const auto& u) { return low_freq_mass(u, r); }, *c.field);
      comp.push_back(std::pow(r, -2.0 * alpha) * m);
      f << r << ',' << m << ',' << comp.back() << '\n';
    }
    bool monotone = true;
    for (std::size_t i = 1; i < comp.size(); ++i) monotone = monotone && comp[i] < comp[i - 1];
    const double growth = comp.back() > 0.0 ? comp.front() / comp.back() : 0.0;
    summary = {{"alpha", alpha}, {"growth_toward_zero", growth}, {"monotone", monotone}};
    return !a.contains("min_growth") || (monotone && growth >= a["min_growth"].get<double>());
  }

  if (type == "perturbation") {
    const double alpha = a["alpha"], eps = a["epsilon"];
    const int j0 = a["j0"];
    const std::string norm = a.value("normalization", "unit");
    if (norm != "unit" && norm != "literal") throw ConfigInvalid("normalization must be unit or literal");
    const auto mode = norm == "literal" ? ShellNormalization::literal : ShellNormalization::unit;
    PerturbationReport rep;
    MembershipVerdict v;
    if (std::holds_alternative<RadialProfile>(*c.field)) {
      const int jlo = a.value("report_j_min", -40);
      auto r = make_v_alpha_perturbation(std::get<RadialProfile>(*c.field), alpha, eps, j0, jlo, mode);
      rep = r.report;
      v = V_alpha_membership(dyadic_blocks(r.w, jlo, j0), alpha);
    } else {
      const GridField& u = std::get<GridField>(*c.field);
      auto r = make_v_alpha_perturbation(u, alpha, eps, j0, mode);
      rep = r.report;
      const int jlo = static_cast<int>(std::ceil(std::log2(2.0 * u.grid().k0())));
      v = V_alpha_membership(dyadic_blocks(r.w, jlo, j0), alpha);
    }
    auto f = art.open(".csv");
    f << "j,kept,source_ratio,w_ratio,distance_ratio\n";
    for (const auto& row : rep.rows)
      f << row.j << ',' << row.kept << ',' << row.source_ratio << ',' << row.w_ratio << ',' << row.distance_ratio
        << '\n';
    summary = {{"c_n", rep.c_n},
               {"c_lower", rep.c_lower},
               {"lower_bound_holds", rep.lower_bound_holds},
               {"distance_holds", rep.distance_holds},
               {"min_w_ratio", rep.min_w_ratio},
               {"max_distance_ratio", rep.max_distance_ratio},
               {"in_V_alpha", v.in_V_alpha},
               {"delta", v.delta}};
    return rep.lower_bound_holds && rep.distance_holds && v.in_V_alpha;
  }

  if (type == "liminf") {
    const DecayProfile p = decay_profile(*c.field, times_of(a["times"]));
    const double alpha = a["alpha"];
    const auto window = pair_of(a["window"], "window");
    const auto levels = a.value("levels", std::vector<int>{0, 1, 2});
    bool ok = true;
    summary = json::array();
    auto f = art.open(".csv");
    f << "t";
    for (int l : levels) f << ",comp_l" << l;
    f << '\n';
    for (std::size_t i = 0; i < p.size(); ++i) {
      f << p.times[i];
      for (int l : levels) f << ',' << std::pow(p.times[i], alpha + 0.5 * l) * p.series(l)[i];
      f << '\n';
    }
    for (int l : levels) {
      const LiminfReport r = liminf_check(p, alpha, l, window, a.value("flat_tol", 0.1));
      ok = ok && r.certified;
      summary.push_back({{"l", l}, {"inf", r.inf}, {"sup", r.sup}, {"flatness", r.flatness}, {"trend", r.trend},
                         {"certified", r.certified}});
    }
    return ok;
  }

  if (type == "nse") {
    const GridField& u0 = gridded(c, "nse");
    SimConfig sc;
    sc.grid = u0.grid();
    sc.t_end = a["t_end"];
    sc.dt = a.value("dt", sc.dt);
    sc.dt_growth = a.value("dt_growth", sc.dt_growth);
    sc.dt_max = a.value("dt_max", sc.dt_max);
    sc.cfl = a.value("cfl", sc.cfl);
    sc.dealias = a.value("dealias", sc.dealias);
    const std::string integ = a.value("integrator", "if_rk4");
    if (integ != "if_rk4" && integ != "imex_euler") throw ConfigInvalid("integrator must be if_rk4 or imex_euler");
    sc.integrator = integ == "if_rk4" ? Integrator::if_rk4 : Integrator::imex_euler;
    sc.record_times = log_time_grid(1.0, sc.t_end, a.value("per_decade", 10));
    const SimTrace tr = evolve_nse(dealias_truncate(u0, sc.dealias), sc);
    {
      auto f = art.open(".csv");
      write_csv(f, tr);
    }
    if (a.value("checkpoint", false) && tr.final_state) {
      save_checkpoint(art.path(".sdgf"), *tr.final_state);
    }
    std::optional<std::pair<double, double>> window;
    if (a.contains("window")) window = pair_of(a["window"], "window");
    const double alpha = a.value("alpha", 0.0);
    bool ok = true;
    summary = {{"steps", tr.steps}, {"horizon", tr.horizon}};
    for (const auto& check : a.value("checks", std::vector<std::string>{"energy"})) {
      if (check == "energy") {
        const EnergyAudit e = energy_audit(tr);
        summary["energy"] = {{"worst_margin", e.worst_margin},
                             {"equality_residual", e.equality_residual},
                             {"inequality_holds", e.inequality_holds},
                             {"equality_holds", e.equality_holds}};
        ok = ok && e.inequality_holds && e.equality_holds;
      } else if (check == "exact") {
        double worst = 0.0;
        for (std::size_t i = 0; i < tr.size(); ++i)
          if (tr.v.l2[i] > 0.0) worst = std::max(worst, tr.theta_l2[i] / tr.v.l2[i]);
        summary["exact"] = {{"max_relative_gap", worst}, {"holds", worst <= 1e-8}};
        ok = ok && worst <= 1e-8;
      } else if (check == "skew") {
        double worst = 0.0;
        for (double s : tr.skew) worst = std::max(worst, s);
        summary["skew"] = {{"max", worst}, {"holds", worst <= 1e-10}};
        ok = ok && worst <= 1e-10;
      } else if (check == "wiegner") {
        const WiegnerReport w = wiegner_difference_check(tr, alpha, window);
        summary["wiegner"] = {{"theta_slope", w.theta.slope}, {"target", w.target},     {"tolerance", w.tolerance},
                              {"u_slope", w.u.slope},         {"v_slope", w.v.slope},   {"exact_zero", w.exact_zero},
                              {"table_row", w.table_row},     {"passes", w.passes}};
        ok = ok && w.passes;
      } else if (check == "inverse_wiegner") {
        const InverseWiegnerReport r = inverse_wiegner_check(tr, window);
        summary["inverse_wiegner"] = to_json(r);
        ok = ok && r.passes;
      } else if (check == "gradient") {
        const GradientReport g = gradient_decay_check(tr, alpha, window);
        summary["gradient"] = {{"slope", g.fit.slope},
                               {"target", g.target},
                               {"sup_constant", g.sup_constant},
                               {"passes", g.passes}};
        ok = ok && g.passes;
      } else {
        throw ConfigInvalid("unknown nse check \"" + check + "\"");
      }
    }
    return ok;
  }

  throw ConfigInvalid("unknown analysis \"" + type + "\"");
}

json versions() {
  return {{"specdecay", SPECDECAY_VERSION},
          {"fftw", std::string(fftw_version)},
          {"boost", BOOST_LIB_VERSION},
          {"yaml_cpp", SPECDECAY_YAMLCPP_VERSION},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"openssl", OpenSSL_version(OPENSSL_VERSION)},
          {"openmp", _OPENMP},
          {"compiler", __VERSION__}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_manifest(const fs::path& dir, const json& m) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  if (f) f << m.dump(2) << '\n';
}

}  // namespace

RunResult run_experiment(const std::string& config_path, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  json m = {{"config_path", config_path}, {"threads", opt.threads}, {"versions", versions()}};
  auto log = [&](const std::string& s) {
    if (opt.log) *opt.log << s << '\n';
  };

  Context c;
  c.config_dir = fs::path(config_path).parent_path();
  try {
    c.cfg = load_config(config_path);
  } catch (const Error& e) {
    res.output_dir = opt.output_dir.empty() ? "specdecay_out/" + fs::path(config_path).stem().string() : opt.output_dir;
    m["status"] = "error";
    m["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    m["exit_code"] = kExecutionError;
    m["runtime_s"] = seconds_since(t0);
    write_manifest(res.output_dir, m);
    res.manifest = m;
    res.exit_code = kExecutionError;
    log(std::string(e.kind()) + ": " + e.what());
    return res;
  }

  res.output_dir = !opt.output_dir.empty() ? opt.output_dir
                   : !c.cfg.output_dir.empty() ? c.cfg.output_dir
                                               : "specdecay_out/" + c.cfg.name;
  c.out = res.output_dir;
  m["name"] = c.cfg.name;
  m["claim"] = c.cfg.claim;
  m["seed"] = c.cfg.seed;
  m["config_sha256"] = sha256_hex(c.cfg.source_text);
  m["output_dir"] = res.output_dir;

  bool any_error = false, any_fail = false;
  try {
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec) throw ExecutionError("cannot create output directory " + c.out.string() + ": " + ec.message());
    c.field = build_field(c);
  } catch (const Error& e) {
    m["status"] = "error";
    m["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    any_error = true;
    log(std::string(e.kind()) + ": " + e.what());
  } catch (const std::exception& e) {
    m["status"] = "error";
    m["error"] = {{"kind", "ExecutionError"}, {"message", e.what()}};
    any_error = true;
    log(std::string("ExecutionError: ") + e.what());
  }

  json analyses = json::array();
  if (c.field) {
    for (std::size_t i = 0; i < c.cfg.analyses.size(); ++i) {
      const json& a = c.cfg.analyses[i];
      AnalysisOutcome o;
      o.type = a["type"];
      o.label = a.value("label", o.type);
      std::ostringstream stem;
      stem << std::setw(2) << std::setfill('0') << i << '_' << o.label;
      Artifacts art(c.out, stem.str(), o);
      const auto ta = std::chrono::steady_clock::now();
      const std::string expect_error = a.value("expect_error", "");
      try {
        const bool ok = run_analysis(c, a, art, o.summary);
        art.open(".json") << o.summary.dump(2) << '\n';
        o.status = expect_error.empty() ? (ok ? "pass" : "fail") : "fail";
        if (!expect_error.empty()) o.error = "expected " + expect_error + " but the analysis completed";
      } catch (const Error& e) {
        o.error_kind = e.kind();
        o.error = e.what();
        o.status = expect_error == e.kind() ? "pass" : "error";
      } catch (const std::exception& e) {
        o.error_kind = "ExecutionError";
        o.error = e.what();
        o.status = "error";
      }
      o.runtime_s = seconds_since(ta);
      if (o.status == "error") any_error = true;
      if (o.status == "fail") any_fail = true;
      log(stem.str() + ": " + o.status + (o.error.empty() ? "" : " (" + o.error_kind + " " + o.error + ")"));
      json entry = {{"index", i},          {"type", o.type},           {"label", o.label},
                    {"status", o.status},  {"runtime_s", o.runtime_s}, {"artifacts", o.artifacts},
                    {"summary", o.summary}};
      if (!o.error.empty()) entry["error"] = {{"kind", o.error_kind}, {"message", o.error}};
      analyses.push_back(entry);
      res.outcomes.push_back(std::move(o));
    }
  }
  res.exit_code = any_error ? kExecutionError : any_fail ? kCertificationFailed : kAllPass;
  m["analyses"] = analyses;
  if (!m.contains("status")) m["status"] = res.exit_code == kAllPass ? "pass" : res.exit_code == 1 ? "fail" : "error";
  m["exit_code"] = res.exit_code;
  m["runtime_s"] = seconds_since(t0);
  write_manifest(c.out, m);
  res.manifest = m;
  return res;
}

std::vector<RecipeInfo> list_recipes(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ExecutionError("recipe directory not found: " + dir);
  std::vector<RecipeInfo> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".cfg") continue;
    RecipeInfo r;
    r.file = e.path().filename().string();
    try {
      const ExperimentConfig c = load_config(e.path().string());
      r.name = c.name;
      r.claim = c.claim;
    } catch (const Error& err) {
      r.name = e.path().stem().string();
      r.claim = std::string("invalid: ") + err.what();
    }
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const RecipeInfo& a, const RecipeInfo& b) { return a.file < b.file; });
  return out;
}

}  // namespace specdecay::app
