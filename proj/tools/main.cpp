// Command-line front end: scenario files in, equilibrium reports out.
//
//   siggame <game> --config FILE [--set key=value]... [--out FILE]
//           [--format json|csv] [--jobs N] [--seed S]
//
// A scenario file is a single JSON document:
//
//   {
//     "game": "signaling",                      // optional, checked
//     "parameters": { ... },                    // per-game spec values
//     "sweep": { "key": "lambda",               // optional
//                "values": [...] }              //   or "from"/"to"/"step"
//     "output": { "path": "-", "format": "json" }
//   }
//
// Exit codes: 0 solved, 2 no equilibrium of the requested class, 1 error.

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "runners.hpp"
#include "siggame/version.hpp"

namespace {

using nlohmann::json;
using namespace siggame::cli;

json::json_pointer dotted_pointer(const std::string& dotted) {
  std::string path = "/" + dotted;
  for (auto& c : path) {
    if (c == '.') c = '/';
  }
  return json::json_pointer(path);
}

json parse_override_value(const std::string& text) {
  json parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) return json(text);
  return parsed;
}

void apply_overrides(json& scenario, const std::vector<std::string>& sets) {
  for (const auto& entry : sets) {
    auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got: " + entry);
    std::string key = entry.substr(0, eq);
    json::json_pointer ptr = dotted_pointer(key);
    if (!scenario.contains(ptr))
      throw std::invalid_argument("--set references unknown key: " + key);
    scenario[ptr] = parse_override_value(entry.substr(eq + 1));
  }
}

std::vector<json> sweep_values(const json& sweep) {
  if (sweep.contains("values"))
    return sweep.at("values").get<std::vector<json>>();
  double from = sweep.at("from").get<double>();
  double to = sweep.at("to").get<double>();
  double step = sweep.at("step").get<double>();
  if (!(step > 0)) throw std::invalid_argument("sweep: step must be > 0");
  std::vector<json> out;
  for (double v = from; v <= to + step * 0.5; v += step) out.push_back(v);
  return out;
}

struct SweepPoint {
  json value;
  RunOutcome outcome;
  std::string error;
};

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string value_to_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
    return buf;
  }
  return v.dump();
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-" || path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

int run_command(const std::string& game, const std::string& config_path,
                const std::vector<std::string>& sets, std::string out_path,
                std::string format, int jobs,
                std::optional<std::uint64_t> seed) {
  json scenario;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config file: " << config_path << "\n";
      return kExitError;
    }
    try {
      in >> scenario;
    } catch (const json::parse_error& e) {
      std::cerr << "error: config parse failure: " << e.what() << "\n";
      return kExitError;
    }
  } else if (game != "reference-4d") {
    std::cerr << "error: --config is required for game '" << game << "'\n";
    return kExitError;
  } else {
    scenario = json::object();
  }

  try {
    apply_overrides(scenario, sets);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }

  if (scenario.contains("game") &&
      scenario.at("game").get<std::string>() != game) {
    std::cerr << "error: scenario file is for game '"
              << scenario.at("game").get<std::string>()
              << "', invoked as '" << game << "'\n";
    return kExitError;
  }
  scenario["game"] = game;
  if (!scenario.contains("parameters")) scenario["parameters"] = json::object();

  // Output location: CLI flags beat the scenario's output block.
  if (scenario.contains("output")) {
    if (out_path.empty())
      out_path = scenario["output"].value("path", std::string("-"));
    if (format.empty())
      format = scenario["output"].value("format", std::string("json"));
  }
  if (out_path.empty()) out_path = "-";
  if (format.empty()) format = "json";
  if (format != "json" && format != "csv") {
    std::cerr << "error: unknown format '" << format << "'\n";
    return kExitError;
  }
  scenario["output"] = json{{"path", out_path}, {"format", format}};

  // ------------------------------------------------------------------
  // Single run
  // ------------------------------------------------------------------
  if (!scenario.contains("sweep")) {
    RunOutcome outcome;
    try {
      outcome = run_game(game, scenario.at("parameters"), seed);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitError;
    }
    if (format == "json") {
      json report{{"scenario", scenario},
                  {"result", outcome.result},
                  {"tool_version", siggame::kVersion}};
      write_text(out_path, report.dump(2) + "\n");
    } else {
      auto cols = csv_columns(game, outcome.result);
      std::string header, row;
      for (size_t i = 0; i < cols.size(); ++i) {
        if (i) {
          header += ",";
          row += ",";
        }
        header += csv_escape(cols[i].first);
        row += csv_escape(cols[i].second);
      }
      write_text(out_path, header + "\n" + row + "\n");
    }
    return outcome.exit_code;
  }

  // ------------------------------------------------------------------
  // Sweep: patch the swept key per point, dispatch to a worker pool,
  // emit rows ordered by the sweep variable.
  // ------------------------------------------------------------------
  const json& sweep = scenario.at("sweep");
  std::string key = sweep.at("key").get<std::string>();
  std::string dotted = key.rfind("parameters.", 0) == 0
                           ? key
                           : "parameters." + key;
  json::json_pointer key_ptr = dotted_pointer(dotted);
  if (!scenario.contains(key_ptr)) {
    std::cerr << "error: sweep key not present in scenario: " << key << "\n";
    return kExitError;
  }

  std::vector<json> values;
  try {
    values = sweep_values(sweep);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }

  // Total order with no duplicate rows.
  std::stable_sort(values.begin(), values.end(), [](const json& a,
                                                    const json& b) {
    if (a.is_number() && b.is_number())
      return a.get<double>() < b.get<double>();
    return a.dump() < b.dump();
  });
  values.erase(std::unique(values.begin(), values.end()), values.end());

  std::vector<SweepPoint> points(values.size());
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (size_t i; (i = cursor.fetch_add(1)) < values.size();) {
      points[i].value = values[i];
      json params = scenario.at("parameters");
      params[json::json_pointer(key_ptr.to_string().substr(
          std::string("/parameters").size()))] = values[i];
      try {
        points[i].outcome = run_game(game, params, seed);
      } catch (const std::exception& e) {
        points[i].error = e.what();
      }
    }
  };
  int pool = std::max(1, jobs);
  std::vector<std::thread> threads;
  for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  for (const auto& p : points) {
    if (!p.error.empty()) {
      std::cerr << "error: sweep point " << p.value.dump() << ": " << p.error
                << "\n";
      return kExitError;
    }
  }

  if (format == "json") {
    json rows = json::array();
    for (const auto& p : points)
      rows.push_back(json{{key, p.value}, {"result", p.outcome.result}});
    json report{{"scenario", scenario},
                {"results", std::move(rows)},
                {"tool_version", siggame::kVersion}};
    write_text(out_path, report.dump(2) + "\n");
  } else {
    std::string text = csv_escape(key);
    auto first_cols = csv_columns(game, points.front().outcome.result);
    for (const auto& col : first_cols) text += "," + csv_escape(col.first);
    text += "\n";
    for (const auto& p : points) {
      text += csv_escape(value_to_cell(p.value));
      for (const auto& col : csv_columns(game, p.outcome.result))
        text += "," + csv_escape(col.second);
      text += "\n";
    }
    write_text(out_path, text);
  }

  bool all_infeasible = !points.empty();
  for (const auto& p : points)
    all_infeasible &= p.outcome.exit_code == kExitInfeasible;
  return all_infeasible ? kExitInfeasible : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium solvers for quadratic cheap-talk and Gaussian "
               "signaling games"};
  app.require_subcommand(1);
  app.set_version_flag("--version", siggame::kVersion);

  struct Options {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::string format;
    int jobs = 1;
    std::uint64_t seed_value = 0;
  };
  std::vector<std::pair<CLI::App*, std::shared_ptr<Options>>> commands;

  for (const auto& game : game_names()) {
    auto opts = std::make_shared<Options>();
    CLI::App* sub = app.add_subcommand(game, "Run the " + game + " scenario");
    sub->add_option("--config", opts->config, "Scenario JSON file");
    sub->add_option("--set", opts->sets,
                    "Override a scenario key (dotted.path=value)");
    sub->add_option("--out", opts->out, "Report path ('-' for stdout)");
    sub->add_option("--format", opts->format, "json or csv");
    sub->add_option("--jobs", opts->jobs, "Sweep worker threads");
    sub->add_option("--seed", opts->seed_value,
                    "Seed override for randomized runs");
    commands.emplace_back(sub, opts);
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [sub, opts] : commands) {
    if (sub->parsed()) {
      std::optional<std::uint64_t> seed;
      if (sub->count("--seed") > 0) seed = opts->seed_value;
      try {
        return run_command(sub->get_name(), opts->config, opts->sets,
                           opts->out, opts->format, opts->jobs, seed);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
      }
    }
  }
  return kExitError;
}
