// amvp: command-line front end for constants, medians, oracles, sweeps and
// the mean-value solver.
//
// Exit codes: 0 ok, 2 usage, 3 domain, 4 non-convergence / infeasible sampling.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "amvp/asymptotics.hpp"
#include "amvp/ballquad.hpp"
#include "amvp/error.hpp"
#include "amvp/group.hpp"
#include "amvp/median.hpp"
#include "amvp/solver.hpp"
#include "amvp/special.hpp"
#include "run_manifest.hpp"

namespace {

using nlohmann::json;
using namespace amvp;

enum Exit { kOk = 0, kUsage = 2, kDomain = 3, kNonConvergence = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool env_flag(const char* name) {
  const char* v = std::getenv(name);
  return v && *v && std::string(v) != "0";
}

void report_error(const std::string& kind, const std::string& msg) {
  const bool color = !std::getenv("NO_COLOR") && isatty(STDERR_FILENO);
  if (color)
    std::cerr << "\033[31m" << kind << ":\033[0m " << msg << "\n";
  else
    std::cerr << kind << ": " << msg << "\n";
}

double parse_p(const std::string& text, bool allow_one) {
  if (text == "inf") return kInfinity;
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || std::isnan(p) || std::isinf(p))
    throw UsageError("--p expects a real number or 'inf', got '" + text + "'");
  if (allow_one ? p < 1.0 : p <= 1.0)
    throw DomainError(std::string("p must be ") + (allow_one ? ">= 1" : "> 1") + ", got " + text);
  return p;
}

json p_json(double p) { return std::isinf(p) ? json("inf") : json(p); }

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Group selection shared by subcommands.
struct GroupFlags {
  std::string group = "heisenberg";
  int n = 1;
  int k = 1;
  std::string layers;

  void attach(CLI::App* sub) {
    sub->add_option("--group", group,
                    "euclidean | heisenberg | step2 | stratified, or a full spec such as "
                    "\"group=step2 n=2 k=1 B1=0,1;-1,0\"")
        ->capture_default_str();
    sub->add_option("--n", n, "first-layer size parameter")->capture_default_str();
    sub->add_option("--k", k, "vertical dimension for --group step2")->capture_default_str();
    sub->add_option("--layers", layers, "layer dimensions for --group stratified, e.g. 2,1,1");
  }

  // step2 given by (n, k) alone has no tensors, so it is stratification-only.
  GroupModel build() const {
    if (group.find('=') != std::string::npos) return parse_group_spec(group);
    if (n < 1) throw DomainError("--n must be positive");
    if (group == "euclidean") return GroupModel::euclidean(n);
    if (group == "heisenberg") return GroupModel::heisenberg(n);
    if (group == "step2") {
      if (k < 1) throw DomainError("--k must be positive");
      return GroupModel::stratified(Stratification({n, k}));
    }
    if (group == "stratified") {
      if (layers.empty()) throw UsageError("--group stratified needs --layers");
      std::vector<int> dims;
      for (double d : parse_real_list(layers)) {
        if (d != std::floor(d) || d < 1) throw DomainError("layer dimensions must be positive integers");
        dims.push_back(static_cast<int>(d));
      }
      return GroupModel::stratified(Stratification(dims));
    }
    throw UsageError("unknown --group '" + group + "'");
  }
};

struct SamplingFlags {
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  std::string method = "pseudorandom";

  void attach(CLI::App* sub, std::uint64_t default_samples) {
    samples = default_samples;
    sub->add_option("--samples", samples, "box proposals")->capture_default_str();
    sub->add_option("--seed", seed, "RNG seed")->capture_default_str();
    sub->add_option("--method", method, "pseudorandom | lowdisc")
        ->check(CLI::IsMember({"pseudorandom", "lowdisc"}))
        ->capture_default_str();
  }

  QuadratureSpec spec() const {
    QuadratureSpec s;
    s.n_samples = samples;
    s.seed = seed;
    s.method = method == "lowdisc" ? SamplingMethod::low_discrepancy_rejection
                                   : SamplingMethod::pseudorandom_rejection;
    return s;
  }
};

void require_seed_in_ci(CLI::App* sub) {
  if (env_flag("CI_STRICT") && sub->count("--seed") == 0)
    throw UsageError("CI_STRICT is set: '" + sub->get_name() + "' needs an explicit --seed");
}

cli::RunManifest make_manifest(CLI::App* sub, int threads) {
  cli::RunManifest m(sub->get_name());
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    std::string value;
    if (!opt->results().empty()) {
      for (std::size_t i = 0; i < opt->results().size(); ++i) value += (i ? "," : "") + opt->results()[i];
    } else {
      value = opt->get_default_str();
    }
    std::string name = opt->get_name();
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    m.add_flag(name, value);
  }
  m.set_threads(threads);
  return m;
}

// Emits a JSON result with its manifest; the digest covers the result alone.
void emit_json(json result, cli::RunManifest& manifest) {
  manifest.set_output(result.dump());
  result["manifest"] = manifest.to_json();
  std::cout << result.dump(2) << "\n";
}

std::string fmt15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- subcommands -----------------------------------------------------------

json run_info() {
  json groups = json::array({"euclidean", "heisenberg", "step2", "stratified"});
  return {{"name", "amvp"},
          {"version", AMVP_VERSION},
          {"max_threads", max_threads()},
          {"backends", json::array({"serial", "openmp"})},
          {"groups", groups},
          {"subcommands", json::array({"info", "constants", "median", "oracle", "sweep", "solve"})},
          {"exit_codes", {{"ok", 0}, {"usage", 2}, {"domain", 3}, {"nonconvergence_or_feasibility", 4}}}};
}

json run_constants(const GroupModel& g, double p) {
  const ConstantReport r = c_constant(p, g.strat());
  json out = {{"p", p_json(p)},
              {"group", g.name()},
              {"layers", g.strat().layer_dims()},
              {"Q", g.strat().hom_dim()},
              {"c", r.c_value},
              {"theta", r.theta},
              {"theta_prime", r.theta_prime},
              {"branch", to_string(r.branch)}};
  if (!std::isinf(p)) out["moment_I"] = moment_I_closed(p, g.strat());
  return out;
}

std::pair<std::vector<double>, std::vector<double>> read_values(std::istream& in) {
  std::vector<double> values, weights;
  std::string line;
  std::size_t lineno = 0;
  bool any_weight = false, any_plain = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> fields;
    try {
      fields = parse_real_list(line);
    } catch (const ContractError& e) {
      throw UsageError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (fields.size() == 1) {
      any_plain = true;
      values.push_back(fields[0]);
      weights.push_back(1.0);
    } else if (fields.size() == 2) {
      any_weight = true;
      values.push_back(fields[0]);
      weights.push_back(fields[1]);
    } else {
      throw UsageError("line " + std::to_string(lineno) + ": expected 'value' or 'value,weight'");
    }
  }
  if (any_plain && any_weight) throw UsageError("mix of weighted and unweighted lines");
  return {values, weights};
}

json run_oracle(const std::string& target, const GroupModel& g, double p, const std::vector<double>& alphas,
                const std::string& C_text, const std::string& eta_text, double radius, const QuadratureSpec& spec) {
  Estimate est;
  double closed = 0.0;
  if (target == "dirichlet") {
    if (alphas.empty()) throw UsageError("--target dirichlet needs --alphas");
    est = dirichlet_oracle(alphas, spec);
    closed = dirichlet_integral(alphas);
  } else if (target == "momentI") {
    if (std::isinf(p)) throw DomainError("momentI needs finite p");
    est = moment_I_numeric(g.strat(), p, spec);
    closed = moment_I_closed(p, g.strat());
  } else if (target == "volume") {
    est = ball_volume_numeric(g.strat(), radius, spec);
    closed = std::pow(radius, g.strat().hom_dim()) * moment_I_closed(2.0, g.strat());
  } else if (target == "gamma0") {
    if (std::isinf(p)) throw DomainError("gamma0 needs finite p");
    const int v1 = g.strat().layer_dim(0);
    const int v2 = g.strat().step() >= 2 ? g.strat().layer_dim(1) : 0;
    Eigen::MatrixXd C = C_text.empty() ? Eigen::MatrixXd::Identity(v1, v1) : parse_matrix(C_text);
    Eigen::VectorXd eta = eta_text.empty() ? Eigen::VectorXd::Zero(v2) : to_vector(parse_real_list(eta_text));
    est = gamma0_numeric(g.strat(), p, C, eta, spec);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(v1);
    e1(0) = 1.0;
    closed = expansion_coefficient(p, C, e1, g.strat());
  } else {
    throw UsageError("unknown --target '" + target + "'");
  }
  return {{"target", target}, {"value", est.value},     {"std_error", est.std_error},
          {"n", est.n},       {"closed_form", closed}, {"z_score", est.z_score(closed)}};
}

QuadraticModel model_from_flags(const GroupModel& g, const std::string& xi, const std::string& eta,
                                const std::string& A, const std::string& x, double q0) {
  QuadraticModel m = QuadraticModel::zero(g);
  m.q0 = q0;
  m.xi(0) = 1.0;
  m.A.setIdentity();
  if (!xi.empty()) m.xi = to_vector(parse_real_list(xi));
  if (!eta.empty()) m.eta = to_vector(parse_real_list(eta));
  if (!A.empty()) m.A = parse_matrix(A);
  if (!x.empty()) m.x = to_vector(parse_real_list(x));
  m.validate(g);
  return m;
}

json sweep_json(const SweepReport& r) {
  return {{"p", p_json(r.p)},
          {"q0", r.q0},
          {"eps_list", r.eps_list},
          {"mu_values", r.mu_values},
          {"fitted_coeff", r.fitted_coeff},
          {"fitted_cubic", r.fitted_cubic},
          {"fitted_std_error", r.fitted_std_error},
          {"predicted_coeff", r.predicted_coeff},
          {"rel_error", r.rel_error},
          {"fit_residual", r.fit_residual},
          {"n_proposals", r.n_proposals}};
}

std::string sweep_csv(const SweepReport& r) {
  std::ostringstream os;
  os << "eps,mu,mu_minus_q0,predicted,fitted,rel_error\n";
  for (std::size_t i = 0; i < r.eps_list.size(); ++i) {
    const double e = r.eps_list[i];
    os << fmt17(e) << ',' << fmt17(r.mu_values[i]) << ',' << fmt17(r.mu_values[i] - r.q0) << ','
       << fmt17(r.predicted_coeff * e * e) << ',' << fmt17(r.fitted_coeff * e * e + r.fitted_cubic * e * e * e)
       << ',' << fmt17(r.rel_error) << '\n';
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized L^p-medians on Carnot groups: constants, oracles, expansion sweeps, solver", "amvp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(AMVP_VERSION));
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware count)")->check(CLI::NonNegativeNumber);

  auto* info = app.add_subcommand("info", "build and runtime information");

  auto* constants = app.add_subcommand("constants", "closed-form constant c and theta sequences");
  GroupFlags c_group;
  c_group.attach(constants);
  std::string c_p = "2";
  constants->add_option("--p", c_p, "exponent in (1, inf] or 'inf'")->capture_default_str();

  auto* median = app.add_subcommand("median", "generalized median of values read from stdin or --input");
  std::string m_p = "2", m_input;
  double m_tol = 1e-12;
  median->add_option("--p", m_p, "exponent in [1, inf] or 'inf'")->capture_default_str();
  median->add_option("--tol", m_tol, "relative bisection tolerance")->capture_default_str();
  median->add_option("--input", m_input, "CSV file (default stdin)");

  auto* oracle = app.add_subcommand("oracle", "Monte-Carlo oracle against a closed form");
  GroupFlags o_group;
  o_group.attach(oracle);
  SamplingFlags o_sampling;
  o_sampling.attach(oracle, 1000000);
  std::string o_target, o_p = "2", o_alphas, o_C, o_eta;
  double o_radius = 1.0;
  oracle->add_option("--target", o_target, "dirichlet | momentI | gamma0 | volume")
      ->required()
      ->check(CLI::IsMember({"dirichlet", "momentI", "gamma0", "volume"}));
  oracle->add_option("--p", o_p, "exponent for momentI / gamma0")->capture_default_str();
  oracle->add_option("--alphas", o_alphas, "exponents for dirichlet, e.g. 0,0");
  oracle->add_option("--C", o_C, "symmetric matrix for gamma0, e.g. 1,0;0,1");
  oracle->add_option("--eta", o_eta, "second-layer vector for gamma0");
  oracle->add_option("--radius", o_radius, "ball radius for volume")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "eps^2 expansion sweep for a quadratic model");
  GroupFlags s_group;
  s_group.attach(sweep);
  SamplingFlags s_sampling;
  s_sampling.attach(sweep, 1000000);
  std::string s_p = "3", s_xi, s_eta, s_A, s_x, s_out = "json";
  double s_eps0 = 0.4, s_q0 = 0.0;
  int s_levels = 6;
  sweep->add_option("--p", s_p, "exponent in (1, inf] or 'inf'")->capture_default_str();
  sweep->add_option("--xi", s_xi, "horizontal gradient (default e1)");
  sweep->add_option("--eta", s_eta, "second-layer coefficient (default 0)");
  sweep->add_option("--A", s_A, "symmetric horizontal Hessian (default identity)");
  sweep->add_option("--x", s_x, "base point (default identity element)");
  sweep->add_option("--q0", s_q0, "value at the base point")->capture_default_str();
  sweep->add_option("--eps0", s_eps0, "largest radius")->capture_default_str();
  sweep->add_option("--levels", s_levels, "number of radii eps0/2^i")->capture_default_str();
  sweep->add_option("--out", s_out, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* solve_cmd = app.add_subcommand("solve", "Dirichlet problem by mean-value iteration");
  solve_cmd->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  GroupFlags v_group;
  v_group.group = "euclidean";
  v_group.n = 2;
  v_group.attach(solve_cmd);
  std::string v_p = "2", v_bc = "saddle", v_lower, v_upper;
  double v_h = 1.0 / 64, v_eps = 0.0, v_tol = 1e-8, v_damping = 1.0, v_initial = 0.0;
  std::uint64_t v_max_iters = 100000;
  solve_cmd->add_option("--p", v_p, "exponent in [1, inf] or 'inf'")->capture_default_str();
  solve_cmd->add_option("--h", v_h, "grid spacing")->capture_default_str();
  solve_cmd->add_option("--eps", v_eps, "ball radius (default 4h)");
  solve_cmd->add_option("--bc", v_bc, "saddle | linear | constant:<c>")->capture_default_str();
  solve_cmd->add_option("--lower", v_lower, "box lower corner (default 0)");
  solve_cmd->add_option("--upper", v_upper, "box upper corner (default 1)");
  solve_cmd->add_option("--max-iters", v_max_iters, "iteration cap")->capture_default_str();
  solve_cmd->add_option("--tol", v_tol, "sup-change tolerance")->capture_default_str();
  solve_cmd->add_option("--damping", v_damping, "Jacobi damping in (0, 1]")->capture_default_str();
  solve_cmd->add_option("--initial", v_initial, "initial interior value")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("usage", e.what());
    std::cerr << "run '" << app.get_name() << " --help' for usage\n";
    return kUsage;
  }

  try {
    set_threads(threads);
    const int used_threads = max_threads();

    if (info->parsed()) {
      auto manifest = make_manifest(info, used_threads);
      emit_json(run_info(), manifest);
    } else if (constants->parsed()) {
      auto manifest = make_manifest(constants, used_threads);
      emit_json(run_constants(c_group.build(), parse_p(c_p, false)), manifest);
    } else if (median->parsed()) {
      MedianConfig cfg;
      cfg.p = parse_p(m_p, true);
      cfg.tol_lambda = m_tol;
      std::pair<std::vector<double>, std::vector<double>> data;
      if (m_input.empty()) {
        data = read_values(std::cin);
      } else {
        std::ifstream in(m_input);
        if (!in) throw UsageError("cannot open '" + m_input + "'");
        data = read_values(in);
      }
      const std::string out = fmt15(mu_p_samples(data.first, data.second, cfg)) + "\n";
      auto manifest = make_manifest(median, used_threads);
      manifest.set_output(out);
      std::cout << out;
      std::cerr << manifest.to_json().dump() << "\n";
    } else if (oracle->parsed()) {
      require_seed_in_ci(oracle);
      auto manifest = make_manifest(oracle, used_threads);
      manifest.set_seed(o_sampling.seed);
      const double p = parse_p(o_p, false);
      const std::vector<double> alphas = o_alphas.empty() ? std::vector<double>{} : parse_real_list(o_alphas);
      const GroupModel g = o_group.build();
      emit_json(run_oracle(o_target, g, p, alphas, o_C, o_eta, o_radius, o_sampling.spec()), manifest);
    } else if (sweep->parsed()) {
      require_seed_in_ci(sweep);
      auto manifest = make_manifest(sweep, used_threads);
      manifest.set_seed(s_sampling.seed);
      const double p = parse_p(s_p, false);
      const GroupModel g = s_group.build();
      const QuadraticModel m = model_from_flags(g, s_xi, s_eta, s_A, s_x, s_q0);
      const SweepReport r = expansion_sweep(g, m, p, s_eps0, s_levels, s_sampling.spec(), MedianConfig{});
      if (s_out == "csv") {
        const std::string body = sweep_csv(r);
        manifest.set_output(body);
        json header = sweep_json(r);
        header["manifest"] = manifest.to_json();
        std::cout << "# " << header.dump() << "\n" << body;
      } else {
        emit_json(sweep_json(r), manifest);
      }
    } else if (solve_cmd->parsed()) {
      auto manifest = make_manifest(solve_cmd, used_threads);
      const GroupModel g = v_group.build();
      const int m = g.dim();
      Eigen::VectorXd lower = v_lower.empty() ? Eigen::VectorXd::Zero(m) : to_vector(parse_real_list(v_lower));
      Eigen::VectorXd upper = v_upper.empty() ? Eigen::VectorXd::Ones(m) : to_vector(parse_real_list(v_upper));
      const GridDomain dom(g, lower, upper, v_h);
      SolverConfig cfg;
      cfg.p = parse_p(v_p, true);
      cfg.eps = solve_cmd->count("--eps") ? v_eps : 4.0 * v_h;
      cfg.tol_sup = v_tol;
      cfg.max_iters = v_max_iters;
      cfg.damping = v_damping;
      const SolveReport r = solve(dom, named_boundary(v_bc), v_initial, cfg);

      std::ostringstream body;
      for (int i = 0; i < m; ++i) body << 'y' << (i + 1) << ',';
      body << "value\n";
      for (std::size_t node = 0; node < dom.size(); ++node) {
        const Point x = dom.node(node);
        for (int i = 0; i < m; ++i) body << fmt17(x(i)) << ',';
        body << fmt17(r.field[node]) << '\n';
      }
      manifest.set_output(body.str());
      json header = {{"p", p_json(cfg.p)},          {"eps", cfg.eps},
                     {"h", v_h},                    {"iterations", r.iterations},
                     {"final_sup_change", r.final_sup_change},
                     {"threshold", r.threshold},    {"residual_max", r.residual_max},
                     {"converged", r.converged},    {"data_min", r.data_min},
                     {"data_max", r.data_max},      {"n_interior", r.n_interior},
                     {"n_collar", r.n_collar},      {"manifest", manifest.to_json()}};
      std::cout << "# " << header.dump() << "\n" << body.str();
      if (!r.converged)
        throw NotConverged("no convergence after " + std::to_string(r.iterations) + " iterations (sup-change " +
                           fmt15(r.final_sup_change) + ")");
    }
  } catch (const UsageError& e) {
    report_error("usage", e.what());
    return kUsage;
  } catch (const ContractError& e) {
    report_error("usage", e.what());
    return kUsage;
  } catch (const UnsupportedModelError& e) {
    report_error("usage", e.what());
    return kUsage;
  } catch (const DomainError& e) {
    report_error("domain error", e.what());
    return kDomain;
  } catch (const FeasibilityError& e) {
    report_error("infeasible", e.what());
    return kNonConvergence;
  } catch (const NotConverged& e) {
    report_error("not converged", e.what());
    return kNonConvergence;
  } catch (const std::exception& e) {
    report_error("error", e.what());
    return 1;
  }
  return kOk;
}
