// Command-line entry point: scenario generation, study server, simulation
// and analysis.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fairceptron/analysis.h"
#include "fairceptron/errors.h"
#include "fairceptron/event_log.h"
#include "fairceptron/generator.h"
#include "fairceptron/http_server.h"
#include "fairceptron/pool_io.h"
#include "fairceptron/render.h"
#include "fairceptron/simulate.h"
#include "fairceptron/study.h"
#include "fairceptron/util.h"

namespace fc = fairceptron;

namespace {

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw fc::LoadError("cannot write " + path.string());
  out << content;
}

int Generate(const std::string& config_path, const std::string& out_path) {
  const auto config = fc::ReadGenerationConfig(config_path);
  const auto pool = fc::generator::Generate(config);
  fc::WritePool(pool, out_path);
  std::cout << "wrote " << pool.scenarios.size() << " scenarios to "
            << out_path << "\n";
  return 0;
}

int PoolInfo(const std::string& pool_path) {
  const auto pool = fc::ReadPool(pool_path);
  std::cout << "pool " << pool_path << " (version " << pool.version << ")\n"
            << "roster: " << pool.config.roster.size() << " personas, "
            << "protected group " << pool.config.roster.protected_group
            << "\n";
  for (const auto type : pool.config.EnabledTypes()) {
    std::cout << fc::ScenarioTypeName(type) << ": " << pool.CountOf(type)
              << " scenarios, " << pool.clusters.at(type).size()
              << " clusters\n  cluster sizes:";
    for (const auto& members : pool.clusters.at(type)) {
      std::cout << " " << members.size();
    }
    std::cout << "\n";
    const fc::Measure pair[2] = {
        type == fc::ScenarioType::kRanking ? fc::Measure::kOrderingUtility
                                           : fc::Measure::kSelectionUtility,
        type == fc::ScenarioType::kRanking ? fc::Measure::kSignedRepresentation
                                           : fc::Measure::kParityDifference};
    for (const auto m : pair) {
      double lo = 1e300, hi = -1e300;
      for (const auto& s : pool.scenarios) {
        if (s.type != type) continue;
        const double v = *fc::MeasureValue(s.measures, m);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      std::cout << "  " << fc::MeasureName(m) << ": [" << fc::FormatDouble(lo)
                << ", " << fc::FormatDouble(hi) << "]\n";
    }
  }
  return 0;
}

int Serve(const std::string& config_path, const std::string& data_dir,
          const std::string& listen, const std::string& static_dir) {
  auto config = fc::ReadStudyConfig(config_path);
  if (const char* token = std::getenv("FAIRCEPTRON_EXPORT_TOKEN")) {
    config.export_token = token;
  }
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    throw fc::ValidationError("--listen expects host:port");
  }
  const std::string host = listen.substr(0, colon);
  const auto port = fc::ParseInt(listen.substr(colon + 1));
  if (!port || *port <= 0 || *port > 65535) {
    throw fc::ValidationError("invalid port in --listen");
  }

  auto log = fc::FileEventLog::Open(data_dir);
  for (const auto& warning : log->load_warnings()) {
    std::cerr << "warning: " << warning << "\n";
  }
  auto study = fc::Study::Open(std::move(config), std::move(log));
  std::optional<std::filesystem::path> assets;
  if (!static_dir.empty()) assets = static_dir;
  fc::HttpServer server(*study, assets);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int received = 0;
    sigwait(&signals, &received);
    server.Stop();
  });

  std::cerr << "study " << study->config().study_id << ": "
            << study->SessionCount() << " sessions replayed, listening on "
            << listen << "\n";
  const bool ok = server.Listen(host, static_cast<int>(*port));
  if (!ok) {
    std::cerr << "error: cannot listen on " << listen << "\n";
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
  waiter.join();
  return ok ? 0 : 1;
}

std::pair<int, int> ParseBins(const std::string& bins) {
  const auto x = bins.find('x');
  if (x == std::string::npos) throw fc::ValidationError("--bins expects NxM");
  const auto nx = fc::ParseInt(bins.substr(0, x));
  const auto ny = fc::ParseInt(bins.substr(x + 1));
  if (!nx || !ny || *nx < 1 || *ny < 1) {
    throw fc::ValidationError("--bins expects positive NxM");
  }
  return {static_cast<int>(*nx), static_cast<int>(*ny)};
}

std::string SafeStem(const std::string& value) {
  std::string stem;
  for (const char c : value) {
    stem += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  }
  return stem;
}

int Analyze(const std::string& export_path, std::string questionnaire_path,
            const std::string& x_name, const std::string& y_name,
            const std::string& bins, const std::string& out_dir,
            const std::string& subgroup) {
  const bool json = std::filesystem::path(export_path).extension() == ".json";
  if (!json && questionnaire_path.empty()) {
    // simulate/export convention: <stem>.questionnaire.csv next to the file
    auto sibling = std::filesystem::path(export_path);
    sibling.replace_extension(".questionnaire.csv");
    if (std::filesystem::exists(sibling)) questionnaire_path = sibling;
  }
  std::optional<std::filesystem::path> questionnaire;
  if (!questionnaire_path.empty()) questionnaire = questionnaire_path;
  const auto table = fc::LoadExport(
      export_path, json ? fc::ExportFormat::kJson : fc::ExportFormat::kCsv,
      questionnaire);

  const auto [nx, ny] = ParseBins(bins);
  const auto x = fc::BinSpec::Uniform(fc::ParseMeasure(x_name), nx);
  const auto y = fc::BinSpec::Uniform(fc::ParseMeasure(y_name), ny);
  const auto grid = fc::BinByMeasures(table, x, y);
  fc::WriteHeatmap(grid, out_dir, "heatmap", "mean fairness rating");
  std::cout << grid.rows_considered << " rows binned, " << grid.out_of_range
            << " outside the bin range\n";

  if (!subgroup.empty()) {
    const auto report = fc::SubgroupCompare(table, subgroup, x, y);
    for (const auto& [value, g] : report.grids) {
      fc::WriteHeatmap(g, out_dir, "heatmap_" + SafeStem(value),
                       subgroup + " = " + value);
    }
    std::string tests =
        "attribute,group_a,group_b,n_a,n_b,mean_a,mean_b,u,p,exact\n";
    for (const auto& t : report.tests) {
      tests += subgroup + "," + t.group_a + "," + t.group_b + "," +
               std::to_string(t.n_a) + "," + std::to_string(t.n_b) + "," +
               fc::FormatDouble(report.overall.at(t.group_a).mean) + "," +
               fc::FormatDouble(report.overall.at(t.group_b).mean) + "," +
               fc::FormatDouble(t.result.u) + "," +
               fc::FormatDouble(t.result.p) + "," +
               (t.result.exact ? "true" : "false") + "\n";
    }
    WriteFile(std::filesystem::path(out_dir) / "tests.csv", tests);
    std::cout << report.grids.size() << " subgroups, "
              << report.excluded_sessions << " sessions excluded\n";
  }
  return 0;
}

int Simulate(const std::string& pool_path, const std::string& model_path,
             int sessions, std::uint64_t seed, const std::string& out,
             const std::string& questionnaire_path) {
  const auto pool = fc::ReadPool(pool_path);
  const auto model = fc::ReadSimulationModel(model_path);
  fc::QuestionnaireSchema schema;
  if (!questionnaire_path.empty()) {
    schema = fc::ReadQuestionnaire(questionnaire_path);
  }
  const auto result = fc::SimulateRaters(pool, model, sessions, seed, schema);
  std::filesystem::path out_path(out);
  if (out_path.extension() == ".json") {
    WriteFile(out_path, result.export_json);
  } else {
    WriteFile(out_path, result.responses_csv);
    out_path.replace_extension(".questionnaire.csv");
    WriteFile(out_path, result.questionnaire_csv);
  }
  std::cout << "simulated " << sessions << " sessions into " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness perception study tooling"};
  app.require_subcommand(1);

  std::string config, out, pool_file, data_dir, listen = "127.0.0.1:8080",
                                                static_dir;
  auto* generate = app.add_subcommand("generate", "enumerate and cluster scenarios");
  generate->add_option("--config", config, "generation config (JSON)")->required();
  generate->add_option("--out", out, "pool file to write")->required();

  auto* info = app.add_subcommand("pool-info", "summarize a pool file");
  info->add_option("pool", pool_file, "pool file")->required();

  auto* serve = app.add_subcommand("serve", "run the study server");
  serve->add_option("--config", config, "study config (JSON)")->required();
  serve->add_option("--data-dir", data_dir, "event log directory")->required();
  serve->add_option("--listen", listen, "host:port");
  serve->add_option("--static-dir", static_dir, "participant UI assets");

  std::string export_path, questionnaire, x = "ordering_utility",
                                          y = "signed_representation",
                                          bins = "10x4", out_dir, subgroup;
  auto* analyze = app.add_subcommand("analyze", "binned heatmaps of an export");
  analyze->add_option("--export", export_path, "export file (.csv or .json)")
      ->required();
  analyze->add_option("--questionnaire", questionnaire,
                      "questionnaire CSV (for CSV exports)");
  analyze->add_option("--x", x, "measure on the x axis");
  analyze->add_option("--y", y, "measure on the y axis");
  analyze->add_option("--bins", bins, "bins as XxY");
  analyze->add_option("--out-dir", out_dir, "output directory")->required();
  analyze->add_option("--subgroup", subgroup, "questionnaire attribute");

  std::string model, schema;
  int sessions = 136;
  std::uint64_t seed = 7;
  auto* simulate = app.add_subcommand("simulate", "synthetic raters");
  simulate->add_option("--pool", pool_file, "pool file")->required();
  simulate->add_option("--model", model, "rater model (JSON)")->required();
  simulate->add_option("--sessions", sessions, "number of sessions");
  simulate->add_option("--seed", seed, "random seed");
  simulate->add_option("--out", out, "export file (.csv or .json)")->required();
  simulate->add_option("--questionnaire", schema, "questionnaire schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return Generate(config, out);
    if (*info) return PoolInfo(pool_file);
    if (*serve) return Serve(config, data_dir, listen, static_dir);
    if (*analyze) {
      return Analyze(export_path, questionnaire, x, y, bins, out_dir, subgroup);
    }
    if (*simulate) {
      return Simulate(pool_file, model, sessions, seed, out, schema);
    }
  } catch (const fc::Error& e) {
    std::cerr << "error (" << fc::ErrorKindName(e.kind()) << "): " << e.what()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
