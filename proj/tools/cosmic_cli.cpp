// Copyright 2026 The COSMIC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// cosmic: command-line front end for the streaming adaptation engine.
//
// Every failure prints {"error": <code>, "message": <text>} on stderr. Engine
// and I/O errors exit 1; usage errors exit 2.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cosmic/datagen.hpp"
#include "cosmic/error.hpp"
#include "cosmic/feature_file.hpp"
#include "cosmic/logging.hpp"
#include "cosmic/pipeline.hpp"
#include "cosmic/serialization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void print_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
}

json read_json(const fs::path& path) {
  const std::string text = cosmic::read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw cosmic::Error(cosmic::ErrorCode::kSchemaMismatch,
                        path.string() + ": invalid JSON: " + e.what());
  }
}

void emit(const json& doc, const std::string& path) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    cosmic::write_text_file(path, text);
  }
}

cosmic::EngineConfig load_config(const std::string& path, const cosmic::Dataset& dataset) {
  auto config = cosmic::config_from_json(read_json(path));
  return cosmic::bind_config(config, dataset);
}

struct RunArgs {
  std::string manifest;
  std::string config;
  std::string dump_state;
  std::string report;
  bool verbose = false;
};

int cmd_run(const RunArgs& a) {
  const cosmic::Dataset dataset = cosmic::load_dataset(a.manifest);
  const cosmic::EngineConfig config = load_config(a.config, dataset);
  std::optional<cosmic::EngineState> state;
  const auto result = cosmic::run_stream(config, dataset, {}, a.dump_state.empty() ? nullptr : &state);
  cosmic::log_info("processed " + std::to_string(result.records.size()) + " samples");
  if (!a.dump_state.empty()) {
    cosmic::write_text_file(a.dump_state, cosmic::state_to_json(*state).dump() + "\n");
  }
  emit(cosmic::report_to_json(result, config, a.verbose), a.report);
  return 0;
}

struct GenArgs {
  std::string spec;
  std::string out;
};

int cmd_gen_synth(const GenArgs& a) {
  const auto spec = cosmic::synth_spec_from_json(read_json(a.spec));
  const auto dataset = cosmic::generate(spec);
  const fs::path manifest = cosmic::write_dataset(a.out, dataset);
  std::cout << manifest.string() << '\n';
  return 0;
}

struct SweepArgs {
  std::string manifest;
  std::string config;
  double step = 0.05;
  double max = 10.0;
};

std::string fmt_number(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

int cmd_sweep(const SweepArgs& a) {
  if (!(a.step > 0.0) || !(a.max >= 0.0)) {
    throw cosmic::Error(cosmic::ErrorCode::kInvalidArgument, "--step must be > 0 and --max >= 0");
  }
  const cosmic::Dataset dataset = cosmic::load_dataset(a.manifest);
  const cosmic::EngineConfig config = load_config(a.config, dataset);
  const auto result = cosmic::run_stream(config, dataset, cosmic::RunOptions{.keep_scores = true});
  const auto samples = cosmic::to_sweep_samples(result);
  const auto sweep = cosmic::sweep_betas(samples, a.step, a.max);
  std::cout << "beta1,beta2,beta3,accuracy,best\n";
  for (const auto& p : sweep.grid) {
    const bool best = p.beta2 == sweep.best.beta2 && p.beta3 == sweep.best.beta3;
    std::cout << "1," << fmt_number(p.beta2) << ',' << fmt_number(p.beta3) << ','
              << fmt_number(p.accuracy) << ',' << (best ? 1 : 0) << '\n';
  }
  return 0;
}

struct DumpArgs {
  std::string state;
  std::string space = "css";
  std::string out;
};

int cmd_dump_graph(const DumpArgs& a) {
  cosmic::EngineState state = cosmic::state_from_json(read_json(a.state));
  const double threshold = state.sample_count > 0 ? state.last_threshold : state.schedule.current();
  const std::optional<cosmic::View> query = state.last_query;
  const cosmic::GraphOrder order = state.config.clique_graph;
  const cosmic::Engine engine(std::move(state));
  const cosmic::Space space = a.space == "afv" ? cosmic::Space::kAfv : cosmic::Space::kCss;
  const auto graphs = engine.build_graphs(space, query ? &*query : nullptr, threshold);
  emit(cosmic::space_graphs_to_json(graphs, space, order), a.out);
  return 0;
}

int cmd_eval(const std::vector<std::string>& reports) {
  static constexpr const char* kPaths[] = {"zero_shot", "tda", "css", "afv", "fused"};
  std::vector<json> docs;
  for (const auto& r : reports) {
    json doc = read_json(r);
    if (doc.value("format", std::string{}) != "cosmic-report") {
      throw cosmic::Error(cosmic::ErrorCode::kSchemaMismatch, r + ": not a cosmic report");
    }
    docs.push_back(std::move(doc));
  }
  std::size_t width = 10;
  for (const auto& r : reports) width = std::max(width, r.size() + 2);
  std::cout << std::left << std::setw(12) << "path";
  for (const auto& r : reports) std::cout << std::setw(static_cast<int>(width)) << r;
  std::cout << '\n';
  for (const char* path : kPaths) {
    std::cout << std::setw(12) << path;
    for (const auto& doc : docs) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(2) << 100.0 * doc.at("accuracy").at(path).get<double>();
      std::cout << std::setw(static_cast<int>(width)) << cell.str();
    }
    std::cout << '\n';
  }
  std::cout << std::setw(12) << "samples";
  for (const auto& doc : docs) {
    std::cout << std::setw(static_cast<int>(width)) << doc.at("samples").get<std::size_t>();
  }
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"COSMIC streaming test-time adaptation engine", "cosmic"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the engine over a dataset manifest");
  run_cmd->add_option("--manifest", run.manifest, "Dataset manifest")->required();
  run_cmd->add_option("--config", run.config, "Engine config JSON")->required();
  run_cmd->add_option("--dump-state", run.dump_state, "Write the final engine state here");
  run_cmd->add_option("--report", run.report, "Report path (default: stdout)");
  run_cmd->add_flag("--verbose", run.verbose, "Include per-sample records");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synth", "Generate a synthetic dataset");
  gen_cmd->add_option("--spec", gen.spec, "Synthetic spec JSON")->required();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep-betas", "Grid-search the fusion weights");
  sweep_cmd->add_option("--manifest", sweep.manifest, "Dataset manifest")->required();
  sweep_cmd->add_option("--config", sweep.config, "Engine config JSON")->required();
  sweep_cmd->add_option("--step", sweep.step, "Grid step")->capture_default_str();
  sweep_cmd->add_option("--max", sweep.max, "Grid maximum")->capture_default_str();

  DumpArgs dump;
  auto* dump_cmd = app.add_subcommand("dump-graph", "Dump graphs and cliques from a state dump");
  dump_cmd->add_option("--state", dump.state, "State dump JSON")->required();
  dump_cmd->add_option("--space", dump.space, "css or afv")
      ->check(CLI::IsMember({"css", "afv"}))
      ->capture_default_str();
  dump_cmd->add_option("--out", dump.out, "Output path (default: stdout)");

  std::vector<std::string> reports;
  auto* eval_cmd = app.add_subcommand("eval", "Compare accuracies across reports");
  eval_cmd->add_option("--report", reports, "Report JSON (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("Usage", e.what());
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*gen_cmd) return cmd_gen_synth(gen);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*dump_cmd) return cmd_dump_graph(dump);
    if (*eval_cmd) return cmd_eval(reports);
  } catch (const cosmic::Error& e) {
    print_error(std::string(cosmic::to_string(e.code())), e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    print_error("Internal", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
