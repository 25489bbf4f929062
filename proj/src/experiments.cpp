#include "mfdmg/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mfdmg/lfa.hpp"
#include "mfdmg/manufactured.hpp"
#include "mfdmg/mfd_system.hpp"
#include "mfdmg/multigrid.hpp"

namespace mfdmg
{

namespace
{

using nlohmann::ordered_json;

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
  {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_double(const std::string &key, const std::string &value)
{
  try
  {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size())
    {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  }
  catch (const std::exception &)
  {
    throw std::invalid_argument(key + ": not a number: '" + value + "'");
  }
}

long long parse_int(const std::string &key, const std::string &value)
{
  try
  {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size())
    {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  }
  catch (const std::exception &)
  {
    throw std::invalid_argument(key + ": not an integer: '" + value + "'");
  }
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string &key, const std::string &value, Parse parse)
{
  std::vector<T> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    item = trim(item);
    if (!item.empty())
    {
      out.push_back(static_cast<T>(parse(key, item)));
    }
  }
  return out;
}

bool is_power_of_two(int n)
{
  return n > 0 && (n & (n - 1)) == 0;
}

bool uses_multigrid(const std::string &name)
{
  return name == "table1" || name == "hconv";
}

ordered_json config_json(const ExperimentConfig &c)
{
  ordered_json j;
  j["experiment"] = c.name;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["kappa"] = c.kappa;
  j["levels"] = c.levels;
  j["min_level"] = c.min_level;
  j["nu1"] = c.nu1;
  j["nu2"] = c.nu2;
  j["gamma"] = c.gamma;
  j["omega"] = c.omega;
  j["tol"] = c.tol;
  j["max_iters"] = c.max_iters;
  j["ordering"] = c.ordering;
  j["power_iterations"] = c.power_iterations;
  j["lfa_n"] = c.lfa_n;
  j["nu"] = c.nu;
  j["seed"] = c.seed;
  return j;
}

class Output
{
public:
  Output(const ExperimentConfig &config, RunResult &result) : config_(config), result_(result)
  {
    std::filesystem::create_directories(config.output_dir);
    csv_path_ = std::filesystem::path(config.output_dir) / (config.name + ".csv");
    summary_path_ = std::filesystem::path(config.output_dir) / (config.name + "_summary.jsonl");
    csv_.open(csv_path_);
    summary_.open(summary_path_);
    if (!csv_ || !summary_)
    {
      throw std::runtime_error("cannot write to " + config.output_dir);
    }
    csv_ << std::setprecision(10);
    result_.files = {csv_path_, summary_path_};
  }

  std::ostream &csv() { return csv_; }

  void record(const ordered_json &values)
  {
    ordered_json j = config_json(config_);
    for (const auto &[k, v] : values.items())
    {
      j[k] = v;
    }
    summary_ << j.dump() << '\n';
  }

private:
  const ExperimentConfig &config_;
  RunResult &result_;
  std::filesystem::path csv_path_, summary_path_;
  std::ofstream csv_, summary_;
};

PatchOrdering ordering_of(const ExperimentConfig &c)
{
  return parse_ordering(c.ordering);
}

HierarchyOptions hierarchy_options(const ExperimentConfig &c, int fine_level)
{
  HierarchyOptions h;
  h.alpha = c.alpha;
  h.beta = c.beta;
  h.kappa = c.kappa;
  h.fine_level = fine_level;
  h.patches.ordering = ordering_of(c);
  return h;
}

PowerOptions power_options(const ExperimentConfig &c)
{
  PowerOptions p;
  p.iterations = c.power_iterations;
  p.seed = c.seed;
  return p;
}

void run_table1(const ExperimentConfig &c, Output &out, std::ostream &log)
{
  const PeriodicProblem prob = build_periodic(c.alpha, c.beta, c.kappa, c.lfa_n, 3, ordering_of(c));
  log << "building hierarchy, " << c.levels << " levels\n";
  const MGHierarchy hier(hierarchy_options(c, c.levels));
  out.csv() << "nu,mu_pow_nu,rho2g,rhoW_measured,rho3g,rhoV_measured\n";
  for (int nu : c.nus)
  {
    const int nu1 = nu - nu / 2, nu2 = nu / 2;
    const double mu = smoothing_factor(prob, nu, c.omega).factor;
    const double r2 = two_grid_factor(prob, nu1, nu2, c.omega).factor;
    const double r3 = three_grid_factor(prob, nu1, nu2, 1, c.omega).factor;
    const double w = asymptotic_factor(hier, {nu1, nu2, 2, c.omega}, power_options(c));
    const double v = asymptotic_factor(hier, {nu1, nu2, 1, c.omega}, power_options(c));
    out.csv() << nu << ',' << mu << ',' << r2 << ',' << w << ',' << r3 << ',' << v << '\n';
    out.record({{"nu", nu}, {"nu1", nu1}, {"nu2", nu2}, {"mu_pow_nu", mu}, {"rho2g", r2},
                {"rhoW_measured", w}, {"rho3g", r3}, {"rhoV_measured", v}});
    log << "nu=" << nu << " mu^nu=" << mu << " rho2g=" << r2 << " rhoW=" << w << " rho3g=" << r3
        << " rhoV=" << v << '\n';
  }
}

void run_table2(const ExperimentConfig &c, Output &out, std::ostream &log)
{
  const int nu1 = c.nu - c.nu / 2, nu2 = c.nu / 2;
  out.csv() << "kappa,mu,rho3gW,rho3gV\n";
  for (double kappa : c.kappas)
  {
    const PeriodicProblem prob = build_periodic(c.alpha, c.beta, kappa, c.lfa_n, 3, ordering_of(c));
    const double mu = smoothing_factor(prob, c.nu, c.omega).factor;
    const double w = three_grid_factor(prob, nu1, nu2, 2, c.omega).factor;
    const double v = three_grid_factor(prob, nu1, nu2, 1, c.omega).factor;
    out.csv() << kappa << ',' << mu << ',' << w << ',' << v << '\n';
    out.record({{"kappa", kappa}, {"nu1", nu1}, {"nu2", nu2}, {"mu", mu}, {"rho3gW", w},
                {"rho3gV", v}});
    log << "kappa=" << kappa << " mu=" << mu << " rho3gW=" << w << " rho3gV=" << v << '\n';
  }
}

void run_hconv(const ExperimentConfig &c, Output &out, std::ostream &log)
{
  out.csv() << "level,iteration,residual\n";
  SolveOptions so;
  so.cycle = {c.nu1, c.nu2, c.gamma, c.omega};
  so.tol = c.tol;
  so.max_iters = c.max_iters;
  for (int level = c.min_level; level <= c.levels; ++level)
  {
    const MGHierarchy hier(hierarchy_options(c, level));
    std::mt19937_64 rng(c.seed + static_cast<std::uint64_t>(level));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd b(hier.finest().size());
    for (auto &v : b)
    {
      v = dist(rng);
    }
    Eigen::VectorXd x;
    ConvergenceReport report;
    try
    {
      report = solve(hier, b, x, so);
    }
    catch (const DivergenceError &e)
    {
      report = e.report();
    }
    for (std::size_t i = 0; i < report.residuals.size(); ++i)
    {
      out.csv() << level << ',' << i << ',' << report.residuals[i] << '\n';
    }
    out.record({{"level", level}, {"dofs", hier.finest().size()},
                {"iterations", report.iterations}, {"converged", report.converged},
                {"factor", report.factor}});
    log << "level " << level << ": " << report.iterations << " iterations, factor "
        << report.factor << (report.converged ? "" : " (not converged)") << '\n';
    if (!report.converged)
    {
      throw std::runtime_error("level " + std::to_string(level) + " did not converge");
    }
  }
}

void run_anglesweep(const ExperimentConfig &c, Output &out, std::ostream &log)
{
  std::vector<double> angles;
  for (double a = c.angle_min; a <= c.angle_max + 1e-9; a += c.angle_step)
  {
    angles.push_back(a);
  }
  const auto points = angle_sweep(angles, angles, c.kappa, c.nu, c.gamma, c.omega, c.lfa_n);
  write_sweep_csv(out.csv(), points);
  int computed = 0;
  for (const auto &p : points)
  {
    out.record({{"alpha", p.alpha}, {"beta", p.beta}, {"factor", p.factor}, {"n", p.n},
                {"converged_flag", p.converged}});
    computed += p.converged ? 1 : 0;
  }
  log << computed << " of " << points.size() << " angle pairs acute and analysed\n";
}

void run_equivalence(const ExperimentConfig &c, Output &out, std::ostream &log)
{
  struct Case
  {
    double alpha, beta;
    int level;
  };
  std::vector<Case> cases;
  for (int l = 2; l <= 5; ++l)
  {
    cases.push_back({60.0, 60.0, l});
  }
  cases.push_back({80.0, 80.0, 4});
  cases.push_back({70.0, 60.0, 4});

  out.csv() << "alpha,beta,level,dofs,curlrot_deviation,symmetry_deviation,rot_grad_max,"
               "div_curl_max\n";
  for (const auto &k : cases)
  {
    const DualMesh dual = compute_dual(build_structured_mesh(k.alpha, k.beta, k.level));
    const EdgeDofMap dofs = EdgeDofMap::interior(dual.mesh);

    const MfdSystem zero = assemble_curlrot_mfd(dual, 0.0, dofs);
    const double curlrot = max_relative_deviation(zero.system.matrix,
                                                  curlrot_composition(dual, dofs));

    const MfdSystem sys = assemble_curlrot_mfd(dual, c.kappa, dofs);
    const SparseOperator W = weighted_operator(sys);
    const SparseOperator Wt = W.transpose();
    const double symmetry = max_relative_deviation(W, Wt);

    const SparseOperator rot = rot_h(dual), grad = grad_h(dual);
    const SparseOperator rg = rot * grad;
    const double rot_grad = max_abs(rg) / (max_abs(rot) * max_abs(grad));

    const SparseOperator div =
        select(div_h(dual), interior_vertices(dual.mesh), dofs.edge_of_dof);
    const SparseOperator curl = curl_h(dual, dofs);
    const SparseOperator dc = div * curl;
    const double div_curl = max_abs(dc) / (max_abs(div) * max_abs(curl));

    out.csv() << k.alpha << ',' << k.beta << ',' << k.level << ',' << dofs.size() << ','
              << curlrot << ',' << symmetry << ',' << rot_grad << ',' << div_curl << '\n';
    out.record({{"alpha", k.alpha}, {"beta", k.beta}, {"level", k.level},
                {"dofs", dofs.size()}, {"curlrot_deviation", curlrot},
                {"symmetry_deviation", symmetry}, {"rot_grad_max", rot_grad},
                {"div_curl_max", div_curl}});
    log << "(" << k.alpha << "," << k.beta << ") level " << k.level << ": curl-rot "
        << curlrot << ", symmetry " << symmetry << '\n';
  }
}

void run_manufactured(const ExperimentConfig &c, Output &out, std::ostream &log)
{
  const auto rows = manufactured_convergence(c.alpha, c.beta, c.kappa, c.min_level, c.levels,
                                             bubble_problem(c.alpha, c.beta, c.kappa));
  write_convergence_csv(out.csv(), rows);
  for (const auto &r : rows)
  {
    out.record({{"level", r.level}, {"h", r.h}, {"dofs", r.dofs}, {"error_rot", r.error_rot},
                {"observed_order", r.observed_order}});
    log << "level " << r.level << ": error " << r.error_rot << ", order " << r.observed_order
        << '\n';
  }
}

}  // namespace

const std::vector<std::string> &experiment_names()
{
  static const std::vector<std::string> names{"table1",     "table2",      "hconv",
                                              "anglesweep", "equivalence", "manufactured"};
  return names;
}

Validation validate(ExperimentConfig &c)
{
  Validation v;
  auto error = [&](const std::string &field, const std::string &msg) {
    v.errors.push_back(field + ": " + msg);
  };

  c.name = lower(trim(c.name));
  c.ordering = lower(trim(c.ordering));
  const auto &names = experiment_names();
  if (std::find(names.begin(), names.end(), c.name) == names.end())
  {
    error("name", "unknown experiment '" + c.name + "'");
  }

  if (!(c.alpha > 0.0 && c.beta > 0.0 && c.alpha + c.beta < 180.0))
  {
    error("alpha", "angles must be positive with alpha + beta < 180");
  }
  else if (c.name != "anglesweep" && c.name != "equivalence")
  {
    const double largest = std::max({c.alpha, c.beta, 180.0 - c.alpha - c.beta});
    if (largest >= 90.0)
    {
      std::ostringstream msg;
      msg << "alpha: generating triangle is not acute (largest angle " << largest
          << " deg); mesh construction will refuse it";
      v.warnings.push_back(msg.str());
    }
  }
  if (!(c.kappa > 0.0) || !std::isfinite(c.kappa))
  {
    error("kappa", "must be positive and finite");
  }

  if (uses_multigrid(c.name) && c.levels < 2)
  {
    error("levels", "need ≥ 2 levels");
  }
  else if (c.levels < 1)
  {
    error("levels", "must be at least 1");
  }
  if (c.levels > 11)
  {
    error("levels", "at most 11 refinement levels are supported");
  }
  if (c.min_level < 0)
  {
    if (c.name == "hconv")
    {
      c.min_level = std::max(2, c.levels - 3);
    }
    else if (c.name == "manufactured")
    {
      c.min_level = std::min(2, std::max(1, c.levels - 1));
    }
    else
    {
      c.min_level = c.levels;
    }
  }
  if (c.name == "hconv" && (c.min_level < 2 || c.min_level > c.levels))
  {
    error("min_level", "must lie in [2, levels]");
  }
  if (c.name == "manufactured" && (c.min_level < 1 || c.min_level >= c.levels))
  {
    error("min_level", "must lie in [1, levels - 1]");
  }

  if (c.nu1 < 0 || c.nu2 < 0 || c.nu1 + c.nu2 < 1)
  {
    error("nu1", "need nu1, nu2 >= 0 and nu1 + nu2 >= 1");
  }
  if (c.gamma != 1 && c.gamma != 2)
  {
    error("gamma", "must be 1 (V-cycle) or 2 (W-cycle)");
  }
  if (!(c.omega > 0.0 && c.omega < 2.0))
  {
    error("omega", "must lie in (0, 2)");
  }
  if (!(c.tol > 0.0 && c.tol < 1.0))
  {
    error("tol", "must lie in (0, 1)");
  }
  if (c.max_iters < 1)
  {
    error("max_iters", "must be at least 1");
  }
  if (c.power_iterations < 10)
  {
    error("power_iterations", "must be at least 10");
  }
  try
  {
    parse_ordering(c.ordering);
  }
  catch (const std::exception &)
  {
    error("ordering", "unknown ordering '" + c.ordering + "'");
  }
  if (c.ordering == "natural" &&
      (c.name == "table1" || c.name == "table2" || c.name == "anglesweep"))
  {
    error("ordering", "Fourier analysis needs a lexicographic ordering");
  }

  if (!is_power_of_two(c.lfa_n) || c.lfa_n < 16 || c.lfa_n > 256)
  {
    error("lfa_n", "must be a power of two in [16, 256]");
  }
  if (c.nu < 1)
  {
    error("nu", "must be at least 1");
  }
  if (c.nus.empty())
  {
    error("nus", "must not be empty");
  }
  for (std::size_t i = 0; i < c.nus.size(); ++i)
  {
    if (c.nus[i] < 1)
    {
      error("nus[" + std::to_string(i) + "]", "must be at least 1");
    }
  }
  if (c.kappas.empty())
  {
    error("kappas", "must not be empty");
  }
  for (std::size_t i = 0; i < c.kappas.size(); ++i)
  {
    if (!(c.kappas[i] > 0.0))
    {
      error("kappas[" + std::to_string(i) + "]", "must be positive");
    }
  }
  if (!(c.angle_min > 0.0 && c.angle_min <= c.angle_max && c.angle_max < 90.0))
  {
    error("angle_min", "need 0 < angle_min <= angle_max < 90");
  }
  if (!(c.angle_step > 0.0))
  {
    error("angle_step", "must be positive");
  }
  if (trim(c.output_dir).empty())
  {
    error("output_dir", "must not be empty");
  }
  return v;
}

void apply_setting(ExperimentConfig &c, const std::string &raw_key, const std::string &raw_value)
{
  const std::string key = lower(trim(raw_key));
  const std::string value = trim(raw_value);
  auto as_int = [&] { return static_cast<int>(parse_int(key, value)); };
  auto as_double = [&] { return parse_double(key, value); };

  if (key == "name" || key == "experiment")
    c.name = value;
  else if (key == "alpha")
    c.alpha = as_double();
  else if (key == "beta")
    c.beta = as_double();
  else if (key == "kappa")
    c.kappa = as_double();
  else if (key == "levels")
    c.levels = as_int();
  else if (key == "min_level")
    c.min_level = as_int();
  else if (key == "nu1")
    c.nu1 = as_int();
  else if (key == "nu2")
    c.nu2 = as_int();
  else if (key == "gamma")
    c.gamma = as_int();
  else if (key == "omega")
    c.omega = as_double();
  else if (key == "tol")
    c.tol = as_double();
  else if (key == "max_iters")
    c.max_iters = as_int();
  else if (key == "ordering")
    c.ordering = value;
  else if (key == "power_iterations")
    c.power_iterations = as_int();
  else if (key == "lfa_n")
    c.lfa_n = as_int();
  else if (key == "nu")
    c.nu = as_int();
  else if (key == "nus")
    c.nus = parse_list<int>(key, value, parse_int);
  else if (key == "kappas")
    c.kappas = parse_list<double>(key, value, parse_double);
  else if (key == "angle_min")
    c.angle_min = as_double();
  else if (key == "angle_max")
    c.angle_max = as_double();
  else if (key == "angle_step")
    c.angle_step = as_double();
  else if (key == "output_dir")
    c.output_dir = value;
  else if (key == "seed")
    c.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else
    throw std::invalid_argument("unknown setting '" + key + "'");
}

void load_config_file(ExperimentConfig &c, const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw std::invalid_argument("cannot open config file " + path.string());
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
    {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    }
    apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_environment(ExperimentConfig &c)
{
  if (const char *dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0')
  {
    c.output_dir = dir;
  }
}

RunResult run(const ExperimentConfig &input, std::ostream &log)
{
  RunResult result;
  ExperimentConfig c = input;
  const Validation v = validate(c);
  for (const auto &w : v.warnings)
  {
    log << "warning: " << w << '\n';
  }
  if (!v.ok())
  {
    result.status = 2;
    for (const auto &e : v.errors)
    {
      result.diagnostic += e + "\n";
    }
    return result;
  }

  try
  {
    Output out(c, result);
    if (c.name == "table1")
      run_table1(c, out, log);
    else if (c.name == "table2")
      run_table2(c, out, log);
    else if (c.name == "hconv")
      run_hconv(c, out, log);
    else if (c.name == "anglesweep")
      run_anglesweep(c, out, log);
    else if (c.name == "equivalence")
      run_equivalence(c, out, log);
    else
      run_manufactured(c, out, log);
  }
  catch (const std::exception &e)
  {
    result.status = 1;
    result.diagnostic = c.name + ": " + e.what();
    ordered_json j = config_json(c);
    j["error"] = e.what();
    std::filesystem::create_directories(c.output_dir);
    const auto path = std::filesystem::path(c.output_dir) / (c.name + "_error.json");
    std::ofstream(path) << j.dump() << '\n';
    result.files.push_back(path);
  }
  return result;
}

}  // namespace mfdmg
