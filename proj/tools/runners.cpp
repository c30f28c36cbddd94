#include "runners.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "siggame/cheap_talk.hpp"
#include "siggame/cheap_talk_multi.hpp"
#include "siggame/montecarlo.hpp"
#include "siggame/reference_case.hpp"
#include "siggame/signaling_multi.hpp"
#include "siggame/signaling_scalar.hpp"

namespace siggame::cli {
namespace {

const std::vector<std::string> kGames = {
    "cheap-talk", "cheap-talk-multi", "signaling", "signaling-multi",
    "stackelberg", "team", "poa", "simulate", "reference-4d"};

// ---------------------------------------------------------------------------
// Parameter parsing
// ---------------------------------------------------------------------------

SourceModel parse_source(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform")
    return SourceModel::uniform(j.at("lo").get<double>(),
                                j.at("hi").get<double>());
  if (kind == "gaussian")
    return SourceModel::gaussian(j.at("mean").get<double>(),
                                 j.at("variance").get<double>());
  if (kind == "exponential")
    return SourceModel::exponential(j.at("rate").get<double>());
  throw std::invalid_argument("unknown source kind: " + kind);
}

ScalarGameSpec parse_scalar_spec(const json& params) {
  ScalarGameSpec spec;
  spec.source_power = params.at("source_power").get<double>();
  spec.noise_power = params.at("noise_power").get<double>();
  spec.lambda = params.at("lambda").get<double>();
  spec.bias = params.value("bias", 0.0);
  spec.validate();
  return spec;
}

Eigen::MatrixXd parse_matrix(const json& j) {
  auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::invalid_argument("ragged matrix");
    for (size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

Eigen::VectorXd parse_vector(const json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

MatrixGameSpec parse_matrix_spec(const json& params) {
  MatrixGameSpec spec;
  spec.source_cov = parse_matrix(params.at("source_cov"));
  spec.noise_cov = parse_matrix(params.at("noise_cov"));
  spec.lambda = params.at("lambda").get<double>();
  if (params.contains("bias"))
    spec.bias = parse_vector(params.at("bias"));
  else
    spec.bias = Eigen::VectorXd::Zero(spec.dimension());
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

json to_json(const AffinePairScalar& p) {
  return json{{"A", p.A}, {"C", p.C}, {"K", p.K}, {"L", p.L}};
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json costs_json(double je, double jd) {
  return json{{"J_e", je}, {"J_d", jd}, {"J_total", je + jd}};
}

json report_json(const EquilibriumReport& report) {
  json out{{"class", to_string(report.cls)},
           {"costs", costs_json(report.encoder_cost, report.decoder_cost)},
           {"diagnostics", json::object()}};
  if (report.policy) out["policy"] = to_json(*report.policy);
  if (std::isfinite(report.diagnostics.fixed_point_residual))
    out["diagnostics"]["fixed_point_residual"] =
        report.diagnostics.fixed_point_residual;
  if (!report.flags.empty()) out["flags"] = report.flags;
  return out;
}

json to_json(const CostEstimate& est) {
  return json{{"mean", est.mean}, {"std_error", est.std_error}, {"n", est.n}};
}

json to_json(const DeviationCertificate& cert) {
  json entries = json::array();
  for (const auto& e : cert.entries) {
    entries.push_back(json{{"coefficient", e.coefficient},
                           {"step", e.step},
                           {"mean_delta", e.mean_delta},
                           {"std_error", e.std_error},
                           {"margin", e.margin}});
  }
  return json{{"pass", cert.pass},
              {"worst_margin", cert.worst_margin},
              {"entries", std::move(entries)}};
}

json quantizer_json(const QuantizerPolicy& q) {
  return json{{"boundaries", q.boundaries}, {"actions", q.actions}};
}

// ---------------------------------------------------------------------------
// Per-game runners
// ---------------------------------------------------------------------------

RunOutcome run_signaling(const json& params) {
  ScalarGameSpec spec = parse_scalar_spec(params);
  auto report = solve_affine_nash(spec);
  auto gc = game_costs(spec);
  auto bound = it_bound_optimal(spec);

  RunOutcome out;
  out.result = report_json(report);
  json costs{{"g_u", gc.uninformative},
             {"J_star", gc.equilibrium_total},
             {"babbling_preferred", gc.babbling_preferred}};
  if (gc.informative) costs["g_i"] = *gc.informative;
  out.result["game_costs"] = std::move(costs);
  out.result["it_bound"] = json{{"P_star", bound.power},
                                {"bound", bound.bound}};
  return out;
}

RunOutcome run_stackelberg(const json& params) {
  RunOutcome out;
  if (params.contains("source")) {
    CheapTalkSpec spec{parse_source(params.at("source")),
                       params.value("bias", 0.0)};
    out.result = report_json(stackelberg_cheap_talk(spec));
  } else {
    out.result = report_json(solve_stackelberg(parse_scalar_spec(params)));
  }
  return out;
}

RunOutcome run_team(const json& params) {
  ScalarGameSpec spec = parse_scalar_spec(params);
  auto tc = team_costs(spec);
  auto bound = it_bound_team_optimal(spec);

  RunOutcome out;
  const AffinePairScalar& policy =
      (tc.informative_policy && !tc.babbling_preferred)
          ? *tc.informative_policy
          : tc.uninformative_policy;
  auto split = affine_pair_costs(policy, spec);
  out.result = json{{"class", "team"},
                    {"policy", to_json(policy)},
                    {"team_costs",
                     json{{"t_u", tc.uninformative},
                          {"J_star_t", tc.optimal_total},
                          {"babbling_preferred", tc.babbling_preferred}}},
                    {"costs", costs_json(split.encoder, split.decoder)},
                    {"it_bound", json{{"P_star", bound.power},
                                      {"bound", bound.bound}}},
                    {"diagnostics", json::object()}};
  if (tc.informative) out.result["team_costs"]["t_i"] = *tc.informative;
  if (tc.informative_policy)
    out.result["informative_policy"] = to_json(*tc.informative_policy);
  return out;
}

RunOutcome run_poa(const json& params) {
  ScalarGameSpec spec = parse_scalar_spec(params);
  auto gc = game_costs(spec);
  auto tc = team_costs(spec);
  auto poa = price_of_anarchy(spec);

  RunOutcome out;
  out.result = json{{"class", gc.informative && !gc.babbling_preferred
                                  ? "informative-affine"
                                  : "non-informative"},
                    {"costs", json{{"J_total", gc.equilibrium_total}}},
                    {"game_costs", json{{"g_u", gc.uninformative}}},
                    {"team_costs", json{{"t_u", tc.uninformative}}},
                    {"poa", poa.value},
                    {"babbling_corner", poa.babbling_corner},
                    {"diagnostics", json::object()}};
  if (gc.informative) out.result["game_costs"]["g_i"] = *gc.informative;
  if (tc.informative) out.result["team_costs"]["t_i"] = *tc.informative;
  return out;
}

RunOutcome run_cheap_talk(const json& params) {
  CheapTalkSpec spec{parse_source(params.at("source")),
                     params.value("bias", 0.0)};
  int bins = params.at("bins").get<int>();

  RunOutcome out;
  auto policy = solve_quantizer_equilibrium(spec, bins);
  if (!policy) {
    out.exit_code = kExitInfeasible;
    out.result = json{{"status", "infeasible"}, {"bins", bins}};
    return out;
  }
  auto c = costs(spec, *policy);
  auto check = verify_equilibrium(spec, *policy, 2000);
  double min_gap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < policy->actions.size(); ++i)
    min_gap = std::min(min_gap, policy->actions[i + 1] - policy->actions[i]);

  out.result = json{
      {"status", "solved"},
      {"class", bins == 1 ? "non-informative" : "quantized"},
      {"bins", bins},
      {"policy", quantizer_json(*policy)},
      {"costs", costs_json(c.encoder, c.decoder)},
      {"diagnostics",
       json{{"verified", check.pass},
            {"decoder_deviation", check.decoder_deviation},
            {"encoder_slack", check.encoder_slack},
            {"min_action_gap",
             std::isfinite(min_gap) ? json(min_gap) : json()}}}};
  if (params.value("enumerate", false)) {
    json all = json::array();
    for (const auto& q : enumerate_quantizer_equilibria(spec, bins))
      all.push_back(quantizer_json(q));
    out.result["equilibria"] = std::move(all);
  }
  return out;
}

RunOutcome run_cheap_talk_multi(const json& params) {
  MultiCheapTalkSpec spec;
  for (const auto& src : params.at("sources"))
    spec.sources.push_back(parse_source(src));
  spec.bias = params.at("bias").get<std::vector<double>>();
  spec.validate();

  std::vector<BinRequest> bins;
  for (const auto& b : params.at("bins")) {
    if (b.is_string() && b.get<std::string>() == "full")
      bins.push_back(std::nullopt);
    else
      bins.push_back(b.get<int>());
  }

  RunOutcome out;
  auto policy = build_product_equilibrium(spec, bins);
  if (!policy) {
    out.exit_code = kExitInfeasible;
    out.result = json{{"status", "infeasible"}};
    return out;
  }
  auto c = costs(spec, *policy);
  auto check = verify_multi(spec, *policy, 200);

  json dims = json::array();
  for (const auto& coord : policy->coordinates) {
    if (coord.fully_informative)
      dims.push_back(json{{"fully_informative", true}});
    else
      dims.push_back(json{{"fully_informative", false},
                          {"quantizer", quantizer_json(coord.quantizer)}});
  }
  out.result = json{{"status", "solved"},
                    {"class", "quantized"},
                    {"policy", json{{"per_dimension", std::move(dims)}}},
                    {"costs", costs_json(c.encoder, c.decoder)},
                    {"diagnostics",
                     json{{"verified", check.pass},
                          {"decoder_deviation", check.decoder_deviation},
                          {"encoder_slack", check.encoder_slack}}}};
  return out;
}

RunOutcome run_signaling_multi(const json& params,
                               std::optional<std::uint64_t> seed_override) {
  MatrixGameSpec spec = parse_matrix_spec(params);
  int n_starts = params.value("n_starts", 200);
  double tol = params.value("tol", 1e-12);
  std::uint64_t seed = seed_override.value_or(params.value("seed", 0ULL));

  auto classes = multi_start_fixed_points(spec, n_starts, seed, tol);
  json class_list = json::array();
  int nonzero = 0;
  double best_total = std::numeric_limits<double>::infinity();
  for (const auto& fp : classes) {
    bool zero = fp.a.norm() < 1e-6;
    if (!zero) ++nonzero;
    auto pair = assemble_affine_pair(fp.a, spec);
    auto c = affine_pair_costs(pair, spec);
    best_total = std::min(best_total, c.total);
    auto diag = existence_diagnostics(spec, fp.a);
    class_list.push_back(
        json{{"A", to_json(fp.a)},
             {"K", to_json(pair.K)},
             {"C", to_json(pair.C)},
             {"L", to_json(pair.L)},
             {"residual", fp.residual},
             {"iterations", fp.iterations},
             {"zero", zero},
             {"singular", diag.supplied_singular},
             {"costs", costs_json(c.encoder, c.decoder)}});
  }

  auto diag = existence_diagnostics(spec, Eigen::MatrixXd::Zero(
                                              spec.dimension(),
                                              spec.dimension()));
  RunOutcome out;
  out.result = json{
      {"class", nonzero > 0 ? "informative-affine" : "non-informative"},
      {"fixed_point_classes", std::move(class_list)},
      {"nonzero_classes", nonzero},
      {"costs", json{{"J_total", best_total}}},
      {"diagnostics",
       json{{"determinant_condition", diag.determinant_condition},
            {"lambda_pow_n", diag.lambda_pow_n},
            {"cov_det_ratio", diag.cov_det_ratio}}}};
  if (nonzero == 0) out.exit_code = kExitInfeasible;
  return out;
}

AffinePairScalar resolve_scalar_policy(const json& policy,
                                       const ScalarGameSpec& spec) {
  if (policy.is_string()) {
    std::string name = policy.get<std::string>();
    if (name == "nash") return *solve_affine_nash(spec).policy;
    if (name == "stackelberg") return *solve_stackelberg(spec).policy;
    if (name == "babbling") return babbling_pair();
    if (name == "team") {
      auto tc = team_costs(spec);
      return tc.informative_policy ? *tc.informative_policy
                                   : tc.uninformative_policy;
    }
    throw std::invalid_argument("unknown policy name: " + name);
  }
  return AffinePairScalar{policy.at("A").get<double>(),
                          policy.at("C").get<double>(),
                          policy.at("K").get<double>(),
                          policy.at("L").get<double>()};
}

RunOutcome run_simulate(const json& params,
                        std::optional<std::uint64_t> seed_override) {
  SimConfig cfg;
  cfg.n_samples = params.value("n_samples", static_cast<std::int64_t>(100000));
  cfg.seed = seed_override.value_or(params.value("seed", 0ULL));
  cfg.antithetic = params.value("antithetic", false);

  RunOutcome out;
  const json& spec_json = params.at("spec");
  if (spec_json.contains("source_cov")) {
    MatrixGameSpec spec = parse_matrix_spec(spec_json);
    AffinePairMatrix pair;
    const json& policy = params.at("policy");
    if (policy.is_string() && policy.get<std::string>() == "babbling") {
      int n = spec.dimension();
      pair.A = Eigen::MatrixXd::Zero(n, n);
      pair.K = Eigen::MatrixXd::Zero(n, n);
      pair.C = Eigen::VectorXd::Zero(n);
      pair.L = Eigen::VectorXd::Zero(n);
    } else {
      pair.A = parse_matrix(policy.at("A"));
      pair.K = parse_matrix(policy.at("K"));
      pair.C = parse_vector(policy.at("C"));
      pair.L = parse_vector(policy.at("L"));
    }
    auto result = estimate_costs(pair, spec, cfg);
    out.result = json{{"class", "simulate"},
                      {"estimates", json{{"J_e", to_json(result.encoder)},
                                         {"J_d", to_json(result.decoder)},
                                         {"J_total", to_json(result.total)}}},
                      {"costs", costs_json(result.encoder.mean,
                                           result.decoder.mean)},
                      {"diagnostics", json::object()}};
    if (params.contains("deviation")) {
      auto steps =
          params.at("deviation").at("steps").get<std::vector<double>>();
      auto cert = deviation_certify(pair, spec, cfg, steps);
      out.result["deviation"] = to_json(cert);
      out.result["diagnostics"]["deviation_margin"] = cert.worst_margin;
    }
    return out;
  }

  ScalarGameSpec spec = parse_scalar_spec(spec_json);
  AffinePairScalar pair = resolve_scalar_policy(params.at("policy"), spec);
  auto result = estimate_costs(pair, spec, cfg);
  out.result = json{{"class", "simulate"},
                    {"policy", to_json(pair)},
                    {"estimates", json{{"J_e", to_json(result.encoder)},
                                       {"J_d", to_json(result.decoder)},
                                       {"J_total", to_json(result.total)}}},
                    {"costs", costs_json(result.encoder.mean,
                                         result.decoder.mean)},
                    {"diagnostics", json::object()}};
  if (params.contains("deviation")) {
    auto steps = params.at("deviation").at("steps").get<std::vector<double>>();
    auto cert = deviation_certify(pair, spec, cfg, steps);
    out.result["deviation"] = to_json(cert);
    out.result["diagnostics"]["deviation_margin"] = cert.worst_margin;
  }
  return out;
}

RunOutcome run_reference_4d(const json& params,
                            std::optional<std::uint64_t> seed_override) {
  MatrixGameSpec spec = reference_case_4d();
  int n_starts = params.value("n_starts", 200);
  double tol = params.value("tol", 1e-12);
  std::uint64_t seed = seed_override.value_or(params.value("seed", 0ULL));

  auto printed = reference_fixed_points_4d();
  json printed_list = json::array();
  std::vector<Eigen::MatrixXd> refined;
  for (const auto& a : printed) {
    double residual = (t_map_matrix(a, spec) - a).norm();
    auto fp = solve_fixed_point(spec, a, 0.5, 1e-10, 100000);
    refined.push_back(fp.a);
    printed_list.push_back(json{{"A", to_json(a)},
                                {"residual_printed", residual},
                                {"residual_refined", fp.residual},
                                {"refined_converged", fp.converged}});
  }

  auto classes = multi_start_fixed_points(spec, n_starts, seed, tol);
  int matched = 0;
  int nonzero = 0;
  json class_list = json::array();
  for (const auto& fp : classes) {
    bool zero = fp.a.norm() < 1e-6;
    if (!zero) ++nonzero;
    bool matches_printed = false;
    for (const auto& target : refined) {
      double d = std::min((fp.a - target).cwiseAbs().maxCoeff(),
                          (fp.a + target).cwiseAbs().maxCoeff());
      if (d < 2e-3) {
        matches_printed = true;
        ++matched;
        break;
      }
    }
    class_list.push_back(json{{"A", to_json(fp.a)},
                              {"residual", fp.residual},
                              {"zero", zero},
                              {"matches_reference", matches_printed}});
  }

  RunOutcome out;
  out.result = json{{"class", "reference-4d"},
                    {"reference_points", std::move(printed_list)},
                    {"fixed_point_classes", std::move(class_list)},
                    {"nonzero_classes", nonzero},
                    {"reference_recovered", matched},
                    {"diagnostics", json::object()}};
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string cell(const json& result, const json::json_pointer& path) {
  if (!result.contains(path)) return "";
  const json& v = result.at(path);
  if (v.is_number()) return fmt_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_string()) return v.get<std::string>();
  return "";
}

}  // namespace

bool known_game(const std::string& game) {
  for (const auto& g : kGames)
    if (g == game) return true;
  return false;
}

const std::vector<std::string>& game_names() { return kGames; }

RunOutcome run_game(const std::string& game, const json& params,
                    std::optional<std::uint64_t> seed_override) {
  if (game == "signaling") return run_signaling(params);
  if (game == "stackelberg") return run_stackelberg(params);
  if (game == "team") return run_team(params);
  if (game == "poa") return run_poa(params);
  if (game == "cheap-talk") return run_cheap_talk(params);
  if (game == "cheap-talk-multi") return run_cheap_talk_multi(params);
  if (game == "signaling-multi")
    return run_signaling_multi(params, seed_override);
  if (game == "simulate") return run_simulate(params, seed_override);
  if (game == "reference-4d") return run_reference_4d(params, seed_override);
  throw std::invalid_argument("unknown game: " + game);
}

std::vector<std::pair<std::string, std::string>> csv_columns(
    const std::string& game, const json& result) {
  using ptr = json::json_pointer;
  std::vector<std::pair<std::string, std::string>> cols;
  auto add = [&](const std::string& name, const char* path) {
    cols.emplace_back(name, cell(result, ptr(path)));
  };

  if (game == "signaling") {
    add("class", "/class");
    add("A", "/policy/A");
    add("C", "/policy/C");
    add("K", "/policy/K");
    add("L", "/policy/L");
    add("J_e", "/costs/J_e");
    add("J_d", "/costs/J_d");
    add("J_total", "/costs/J_total");
    add("g_i", "/game_costs/g_i");
    add("g_u", "/game_costs/g_u");
  } else if (game == "stackelberg") {
    add("class", "/class");
    add("A", "/policy/A");
    add("C", "/policy/C");
    add("J_e", "/costs/J_e");
    add("J_d", "/costs/J_d");
    add("J_total", "/costs/J_total");
  } else if (game == "team") {
    add("t_i", "/team_costs/t_i");
    add("t_u", "/team_costs/t_u");
    add("J_star_t", "/team_costs/J_star_t");
    add("A", "/policy/A");
    add("C", "/policy/C");
    add("K", "/policy/K");
    add("L", "/policy/L");
  } else if (game == "poa") {
    add("g_i", "/game_costs/g_i");
    add("g_u", "/game_costs/g_u");
    add("t_i", "/team_costs/t_i");
    add("t_u", "/team_costs/t_u");
    add("poa", "/poa");
    add("babbling_corner", "/babbling_corner");
  } else if (game == "cheap-talk") {
    add("status", "/status");
    add("bins", "/bins");
    add("J_e", "/costs/J_e");
    add("J_d", "/costs/J_d");
    add("min_action_gap", "/diagnostics/min_action_gap");
  } else if (game == "cheap-talk-multi") {
    add("status", "/status");
    add("J_e", "/costs/J_e");
    add("J_d", "/costs/J_d");
  } else if (game == "signaling-multi") {
    add("class", "/class");
    add("nonzero_classes", "/nonzero_classes");
    add("J_total", "/costs/J_total");
  } else if (game == "simulate") {
    add("J_e_mean", "/estimates/J_e/mean");
    add("J_e_stderr", "/estimates/J_e/std_error");
    add("J_d_mean", "/estimates/J_d/mean");
    add("J_d_stderr", "/estimates/J_d/std_error");
    add("J_total_mean", "/estimates/J_total/mean");
    add("J_total_stderr", "/estimates/J_total/std_error");
    add("deviation_pass", "/deviation/pass");
  } else if (game == "reference-4d") {
    add("nonzero_classes", "/nonzero_classes");
    add("reference_recovered", "/reference_recovered");
  }
  return cols;
}

}  // namespace siggame::cli
