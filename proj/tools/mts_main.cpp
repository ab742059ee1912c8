#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mts/errors.hpp"
#include "mts/harness/config.hpp"
#include "mts/harness/csv.hpp"
#include "mts/harness/experiment.hpp"
#include "mts/harness/report.hpp"
#include "mts/rng.hpp"
#include "mts/theory.hpp"

namespace {

namespace fs = std::filesystem;
namespace harness = mts::harness;
using nlohmann::json;

std::string default_output_dir() {
  const char* env = std::getenv("MTS_OUTPUT_DIR");
  return env && *env ? env : "reports";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mts::IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw mts::IngestionError(path + ": " + e.what());
  }
  return j;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunFlags {
  std::string config_path;
  std::string dataset_path;
  std::string dataset_name;
  int label_column = -1;
  bool has_header = false;
  bool header_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double test_fraction = 0.0;
  std::string output_dir;
  std::vector<std::string> formats;
  std::vector<std::string> methods;
  int max_count = 0;
  bool max_count_set = false;
  bool no_normalize = false;
  bool print_config = false;
};

harness::ExperimentConfig assemble_config(const RunFlags& flags) {
  harness::ExperimentConfig config;
  if (!flags.config_path.empty())
    config = harness::ExperimentConfig::from_json(
        read_json_file(flags.config_path));
  if (!flags.dataset_path.empty()) config.dataset.path = flags.dataset_path;
  if (!flags.dataset_name.empty()) config.dataset.name = flags.dataset_name;
  if (flags.label_column != -1)
    config.dataset.schema.label_column = flags.label_column;
  if (flags.header_set) config.dataset.schema.has_header = flags.has_header;
  if (flags.seed_set) config.seed = flags.seed;
  if (flags.test_fraction > 0.0) config.test_fraction = flags.test_fraction;
  if (!flags.output_dir.empty()) config.output_dir = flags.output_dir;
  if (!flags.formats.empty()) config.formats = flags.formats;
  if (!flags.methods.empty()) {
    config.methods.clear();
    for (const auto& name : flags.methods)
      config.methods.push_back(harness::method_from_name(name));
  }
  if (flags.max_count_set) config.disagreement_max_count = flags.max_count;
  if (flags.no_normalize) config.normalize = false;
  if (config.output_dir.empty()) config.output_dir = default_output_dir();
  config.validate();
  return config;
}

int cmd_run(const RunFlags& flags) {
  const auto config = assemble_config(flags);
  if (flags.print_config) {
    std::printf("%s\n", config.to_json().dump(2).c_str());
    return 0;
  }
  const auto report = harness::run_experiment(config);
  std::fputs(harness::format_plain(report).c_str(), stdout);
  const auto written =
      harness::write_report_files(report, config.output_dir, config.formats);
  for (const auto& path : written) std::printf("wrote %s\n", path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct ManifestEntry {
  std::string name;
  std::string file;
  int classes = 2;
  harness::CsvSchema schema;
  std::string prepare;
  long instances = 0;
};

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  const json j = read_json_file(path);
  if (!j.contains("datasets") || !j.at("datasets").is_array())
    throw mts::IngestionError(path + ": expected a top-level 'datasets' array");
  std::vector<ManifestEntry> entries;
  for (const auto& d : j.at("datasets")) {
    ManifestEntry e;
    e.name = d.at("name").get<std::string>();
    e.file = d.at("file").get<std::string>();
    e.classes = d.value("classes", 2);
    e.schema.label_column = d.value("label_column", -1);
    e.schema.has_header = d.value("has_header", false);
    if (d.contains("class_names"))
      for (const auto& [key, val] : d.at("class_names").items())
        e.schema.class_names[key] = val.get<int>();
    e.prepare = d.value("prepare", std::string());
    e.instances = d.value("instances", 0L);
    entries.push_back(std::move(e));
  }
  return entries;
}

// Checksums are pinned on first ingestion and verified afterwards, so a
// silently modified dataset file cannot masquerade as the benchmarked one.
void check_or_record_checksum(const std::string& checksum_path,
                              const std::string& file_key,
                              const std::string& data_path) {
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(
                    harness::file_checksum(data_path)));
  json sums = json::object();
  if (fs::exists(checksum_path)) sums = read_json_file(checksum_path);
  if (sums.contains(file_key)) {
    const std::string want = sums.at(file_key).get<std::string>();
    if (want != hex)
      throw mts::IngestionError(data_path + ": checksum " + hex +
                                " does not match recorded " + want +
                                " (delete the entry in " + checksum_path +
                                " to re-pin)");
    return;
  }
  sums[file_key] = hex;
  std::ofstream out(checksum_path, std::ios::trunc);
  if (!out) throw mts::IoError("cannot write " + checksum_path);
  out << sums.dump(2) << "\n";
  std::printf("pinned checksum %s for %s\n", hex, file_key.c_str());
}

struct BenchFlags {
  std::string manifest = "data/manifest.json";
  std::string data_dir = "data";
  int seeds = 5;
  std::uint64_t seed_base = 1;
  std::string output_dir;
  std::vector<std::string> only;
  bool write_runs = false;
};

int cmd_bench(const BenchFlags& flags) {
  const auto entries = read_manifest(flags.manifest);
  const std::string out_dir =
      flags.output_dir.empty() ? default_output_dir() : flags.output_dir;

  struct MethodAgg {
    double accuracy = 0.0;
    double corrected = 0.0;
    double broken = 0.0;
    double net = 0.0;
  };
  struct DatasetAgg {
    std::string name;
    std::vector<harness::Method> methods;
    std::vector<MethodAgg> per_method;
    double y = 0.0;
    int runs = 0;
  };
  std::vector<DatasetAgg> aggregates;
  std::string csv =
      "dataset,seed,method,overall_accuracy,corrected,broken,net,subset\n";

  for (const auto& entry : entries) {
    if (!flags.only.empty() &&
        std::find(flags.only.begin(), flags.only.end(), entry.name) ==
            flags.only.end())
      continue;
    const fs::path path = fs::path(flags.data_dir) / entry.file;
    if (!fs::exists(path)) {
      std::printf("SKIP %s: missing %s%s%s\n", entry.name.c_str(),
                  path.string().c_str(),
                  entry.prepare.empty() ? "" : "; prepare with: ",
                  entry.prepare.c_str());
      continue;
    }
    check_or_record_checksum(
        (fs::path(flags.data_dir) / "checksums.json").string(), entry.file,
        path.string());

    DatasetAgg agg;
    agg.name = entry.name;
    for (int s = 0; s < flags.seeds; ++s) {
      harness::ExperimentConfig config;
      config.dataset.path = path.string();
      config.dataset.name = entry.name;
      config.dataset.schema = entry.schema;
      config.seed = flags.seed_base + static_cast<std::uint64_t>(s);
      config.output_dir = out_dir;
      const auto report = harness::run_experiment(config);
      if (flags.write_runs)
        harness::write_report_files(
            report, (fs::path(out_dir) / harness::detail::slug(entry.name))
                        .string(),
            config.formats);
      if (agg.methods.empty()) {
        for (const auto& m : report.methods) agg.methods.push_back(m.method);
        agg.per_method.resize(report.methods.size());
      }
      for (std::size_t mi = 0; mi < report.methods.size(); ++mi) {
        const auto& m = report.methods[mi];
        agg.per_method[mi].accuracy += m.overall_accuracy;
        agg.per_method[mi].corrected += static_cast<double>(m.corrected);
        agg.per_method[mi].broken += static_cast<double>(m.broken);
        agg.per_method[mi].net += static_cast<double>(m.net);
        csv += entry.name + "," + std::to_string(report.seed) + "," +
               harness::method_name(m.method) + "," +
               harness::detail::fmt("%.6f", m.overall_accuracy) + "," +
               std::to_string(m.corrected) + "," + std::to_string(m.broken) +
               "," + std::to_string(m.net) + "," +
               std::to_string(report.high_disagreement_count) + "\n";
      }
      agg.y += static_cast<double>(report.high_disagreement_count);
      ++agg.runs;
      std::printf("%s seed=%llu done (y=%zu)\n", entry.name.c_str(),
                  static_cast<unsigned long long>(report.seed),
                  report.high_disagreement_count);
    }
    if (agg.runs > 0) aggregates.push_back(std::move(agg));
  }

  if (aggregates.empty()) {
    std::printf("no datasets were run\n");
    return 0;
  }

  std::string md = "# Benchmark summary (" + std::to_string(flags.seeds) +
                   " seeds from " + std::to_string(flags.seed_base) +
                   ", mean values)\n\n";
  md += "## Overall accuracy (%)\n\n| dataset |";
  for (auto m : aggregates.front().methods)
    md += std::string(" ") + harness::method_name(m) + " |";
  md += "\n|---|";
  for (std::size_t i = 0; i < aggregates.front().methods.size(); ++i)
    md += "---|";
  md += "\n";
  for (const auto& agg : aggregates) {
    md += "| " + agg.name + " |";
    for (const auto& pm : agg.per_method)
      md += " " + harness::detail::pct(pm.accuracy / agg.runs) + " |";
    md += "\n";
  }
  md += "\n## High-disagreement recovery (mean counts per run)\n\n";
  md += "| dataset | subset y |";
  for (auto m : aggregates.front().methods)
    md += std::string(" ") + harness::method_name(m) + " net |";
  md += "\n|---|---|";
  for (std::size_t i = 0; i < aggregates.front().methods.size(); ++i)
    md += "---|";
  md += "\n";
  for (const auto& agg : aggregates) {
    md += "| " + agg.name + " | " +
          harness::detail::fmt("%.1f", agg.y / agg.runs) + " |";
    for (const auto& pm : agg.per_method)
      md += " " + harness::detail::fmt("%+.1f", pm.net / agg.runs) + " |";
    md += "\n";
  }

  std::fputs(md.c_str(), stdout);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw mts::IoError("cannot create " + out_dir + ": " + ec.message());
  {
    std::ofstream out(fs::path(out_dir) / "bench-summary.md",
                      std::ios::binary | std::ios::trunc);
    if (!out) throw mts::IoError("cannot write bench-summary.md");
    out << md;
  }
  {
    std::ofstream out(fs::path(out_dir) / "bench-summary.csv",
                      std::ios::binary | std::ios::trunc);
    if (!out) throw mts::IoError("cannot write bench-summary.csv");
    out << csv;
  }
  std::printf("wrote %s/bench-summary.md and bench-summary.csv\n",
              out_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// theory-check
// ---------------------------------------------------------------------------

struct TheoryFlags {
  int trials = 1000;
  std::uint64_t seed = 1;
  int min_signals = 2;
  int max_signals = 6;
};

json theorem2_model_json(const mts::theory::DiscreteWorldModel& model) {
  json j;
  j["signal_given_truth"] = model.signal_given_truth;
  j["true_label"] = model.true_label;
  j["c0"] = model.c0;
  auto dump_matrix = [](const mts::Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  j["posterior_given_signal"] = dump_matrix(model.posterior_given_signal);
  j["world_given_signal"] = dump_matrix(model.world_given_signal);
  j["vote_given_world"] = dump_matrix(model.vote_given_world);
  return j;
}

int cmd_theory(const TheoryFlags& flags) {
  if (flags.trials < 1 || flags.min_signals < 1 ||
      flags.max_signals < flags.min_signals)
    throw mts::ConfigurationError("theory-check: bad trial/signal bounds");
  const mts::SeededRng rng(flags.seed);
  const int span = flags.max_signals - flags.min_signals + 1;
  bool ok = true;

  {
    auto stream = rng.child("theorem1").stream();
    int passed = 0;
    double max_dev = 0.0;
    for (int t = 0; t < flags.trials; ++t) {
      const auto m =
          static_cast<std::size_t>(flags.min_signals + t % span);
      const auto inputs = mts::theory::random_theorem1_inputs(stream, m);
      bool trial_ok = true;
      for (int chosen = 0; chosen < 2; ++chosen) {
        const auto world = mts::theory::construct_counterfactual(
            inputs.signal_given_truth, inputs.posterior_given_signal, chosen);
        const auto report = mts::theory::verify_theorem1(
            world, inputs.signal_given_truth, inputs.posterior_given_signal,
            chosen);
        max_dev = std::max(max_dev, report.max_deviation);
        if (!report.passed) {
          trial_ok = false;
          std::printf("theorem-1 counterexample (trial %d, label %d):\n%s\n",
                      t, chosen,
                      json({{"signal_given_truth", inputs.signal_given_truth}})
                          .dump(2)
                          .c_str());
        }
      }
      passed += trial_ok;
    }
    std::printf("theorem-1: trials=%d passed=%d max_deviation=%.3e\n",
                flags.trials, passed, max_dev);
    ok = ok && passed == flags.trials;
  }

  {
    auto stream = rng.child("theorem2").stream();
    int passed = 0;
    long proposals = 0;
    double max_dev = 0.0;
    for (int t = 0; t < flags.trials; ++t) {
      const auto m =
          static_cast<std::size_t>(flags.min_signals + t % span);
      const auto sample = mts::theory::random_theorem2_model(stream, m);
      proposals += sample.attempts;
      const auto report = mts::theory::verify_theorem2(sample.model);
      max_dev = std::max(max_dev, report.max_identity_deviation);
      const bool trial_ok = report.vote_inequality_holds &&
                            report.underestimation_holds && report.strictness;
      if (!trial_ok)
        std::printf("theorem-2 counterexample (trial %d):\n%s\n", t,
                    theorem2_model_json(sample.model).dump(2).c_str());
      passed += trial_ok;
    }
    std::printf("theorem-2: trials=%d passed=%d max_identity_deviation=%.3e "
                "acceptance_rate=%.1f%% (%ld proposals)\n",
                flags.trials, passed, max_dev,
                100.0 * static_cast<double>(flags.trials) /
                    static_cast<double>(proposals),
                proposals);
    ok = ok && passed == flags.trials;
  }

  {
    auto stream = rng.child("equality").stream();
    bool eq_ok = true;
    for (int m = flags.min_signals; m <= flags.max_signals; ++m) {
      const auto model = mts::theory::all_correct_model(
          stream, static_cast<std::size_t>(m));
      const auto report = mts::theory::verify_theorem2(model);
      eq_ok = eq_ok && report.underestimation_holds && !report.strictness;
    }
    std::printf("all-correct equality case: %s\n", eq_ok ? "PASS" : "FAIL");
    ok = ok && eq_ok;
  }

  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

struct InspectFlags {
  std::string log_path;
  bool only_overrides = false;
  long instance = -1;
};

int cmd_inspect(const InspectFlags& flags) {
  std::ifstream in(flags.log_path);
  if (!in) throw mts::IoError("cannot open " + flags.log_path);
  std::string line;
  if (!std::getline(in, line))
    throw mts::IngestionError(flags.log_path + ": empty decision log");
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  const auto header = split(line);
  if (header.size() < 5 || header[0] != "instance")
    throw mts::IngestionError(flags.log_path +
                              ": not a decision log (bad header)");

  long shown = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw mts::IngestionError(flags.log_path + ": ragged row '" + line + "'");
    if (flags.instance >= 0 && std::stol(cells[0]) != flags.instance) continue;
    bool any_override = false;
    for (std::size_t c = 5; c < cells.size(); ++c)
      if (header[c].ends_with("_minority"))
        any_override = any_override || cells[c] == "1";
    if (flags.only_overrides && !any_override) continue;
    std::printf("instance %s: truth=%s majority=%s votes=%s%s\n",
                cells[0].c_str(), cells[1].c_str(), cells[2].c_str(),
                cells[4].c_str(),
                cells[3] == "1" ? " [high disagreement]" : "");
    for (std::size_t c = 5; c < cells.size(); ++c) {
      if (!header[c].ends_with("_answer")) continue;
      const std::string method =
          header[c].substr(0, header[c].rfind("_answer"));
      const bool minority = c + 1 < cells.size() &&
                            header[c + 1] == method + "_minority" &&
                            cells[c + 1] == "1";
      std::string evidence;
      if (c + 3 < cells.size() && header[c + 2] == method + "_prior")
        evidence =
            "  prior=" + cells[c + 2] + " posterior=" + cells[c + 3];
      std::printf("  %-10s -> %s%s%s%s\n", method.c_str(), cells[c].c_str(),
                  minority ? "  (minority override)" : "",
                  cells[c] == cells[1] ? "  correct" : "", evidence.c_str());
    }
    ++shown;
  }
  std::printf("%ld instance(s) shown\n", shown);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble aggregation benchmark: majority voting, BTS-style "
               "surprisal rules (HMTS/DMTS), and standard comparators."};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", run_flags.config_path, "JSON config file");
  run->add_option("--dataset", run_flags.dataset_path, "dataset CSV path");
  run->add_option("--name", run_flags.dataset_name, "dataset display name");
  run->add_option("--label-column", run_flags.label_column,
                  "label column (negative counts from the end)");
  run->add_flag_callback(
      "--header",
      [&run_flags]() {
        run_flags.has_header = true;
        run_flags.header_set = true;
      },
      "first row is a header");
  run->add_option("--seed", run_flags.seed, "master seed")
      ->each([&run_flags](const std::string&) { run_flags.seed_set = true; });
  run->add_option("--test-fraction", run_flags.test_fraction,
                  "test split fraction in (0, 1)");
  run->add_option("--output-dir", run_flags.output_dir,
                  "report directory (default $MTS_OUTPUT_DIR or ./reports)");
  run->add_option("--format", run_flags.formats,
                  "report formats: markdown, csv, plain");
  run->add_option("--method", run_flags.methods,
                  "methods to score (default: all)");
  run->add_option("--max-count", run_flags.max_count,
                  "high-disagreement threshold override")
      ->each([&run_flags](const std::string&) {
        run_flags.max_count_set = true;
      });
  run->add_flag("--no-normalize", run_flags.no_normalize,
                "skip z-normalization");
  run->add_flag("--print-config", run_flags.print_config,
                "print the resolved config as JSON and exit");

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Run the dataset sweep");
  bench->add_option("--manifest", bench_flags.manifest, "dataset manifest");
  bench->add_option("--data-dir", bench_flags.data_dir, "dataset directory");
  bench->add_option("--seeds", bench_flags.seeds, "number of seeds to average");
  bench->add_option("--seed-base", bench_flags.seed_base, "first master seed");
  bench->add_option("--output-dir", bench_flags.output_dir,
                    "report directory");
  bench->add_option("--only", bench_flags.only,
                    "restrict to these dataset names");
  bench->add_flag("--write-runs", bench_flags.write_runs,
                  "also write per-seed report files");

  TheoryFlags theory_flags;
  auto* theory =
      app.add_subcommand("theory-check", "Verify the aggregation theorems "
                                         "on random discrete models");
  theory->add_option("--trials", theory_flags.trials, "models per theorem");
  theory->add_option("--seed", theory_flags.seed, "master seed");
  theory->add_option("--min-signals", theory_flags.min_signals,
                     "smallest signal count");
  theory->add_option("--max-signals", theory_flags.max_signals,
                     "largest signal count");

  InspectFlags inspect_flags;
  auto* inspect = app.add_subcommand("inspect", "Pretty-print a decision log");
  inspect->add_option("--log", inspect_flags.log_path, "decision log CSV")
      ->required();
  inspect->add_flag("--only-overrides", inspect_flags.only_overrides,
                    "show only instances where some method overrode the "
                    "majority");
  inspect->add_option("--instance", inspect_flags.instance,
                      "show a single instance");

  int code = 0;
  try {
    app.parse(argc, argv);
    if (run->parsed()) code = cmd_run(run_flags);
    if (bench->parsed()) code = cmd_bench(bench_flags);
    if (theory->parsed()) code = cmd_theory(theory_flags);
    if (inspect->parsed()) code = cmd_inspect(inspect_flags);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const mts::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", e.kind(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 3;
  }
  return code;
}
