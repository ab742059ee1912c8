#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "mts/errors.hpp"
#include "mts/harness/config.hpp"
#include "mts/harness/experiment.hpp"

namespace mts::harness {

namespace detail {

inline std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

inline std::string pct(double fraction) { return fmt("%.2f", 100.0 * fraction); }

// File-system-safe variant of the dataset name.
inline std::string slug(const std::string& name) {
  std::string out;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    else if (!out.empty() && out.back() != '-')
      out.push_back('-');
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "dataset" : out;
}

inline std::string join_votes(std::span<const int> row) {
  std::string out;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j) out.push_back('|');
    out += std::to_string(row[j]);
  }
  return out;
}

inline std::string join_reals(std::span<const double> values) {
  std::string out;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (j) out.push_back('|');
    out += fmt("%.6f", values[j]);
  }
  return out;
}

}  // namespace detail

// Method-level results as a markdown table plus a summary header.
inline std::string format_markdown(const ExperimentReport& report) {
  std::string out;
  out += "# " + report.dataset_name + " (seed " + std::to_string(report.seed) +
         ")\n\n";
  out += "- train/test: " + std::to_string(report.train_size) + "/" +
         std::to_string(report.test_size) + ", classes: " +
         std::to_string(report.num_classes) + ", ensemble: " +
         std::to_string(report.ensemble_size) + "\n";
  out += "- high-disagreement instances (top vote count <= " +
         std::to_string(report.disagreement_threshold) + "): " +
         std::to_string(report.high_disagreement_count) + " of " +
         std::to_string(report.test_size) + "\n\n";
  out += "| method | accuracy (%) | corrected | broken | net (x) | subset (y) "
         "| improvement (%) |\n";
  out += "|---|---|---|---|---|---|---|\n";
  for (const auto& m : report.methods) {
    out += "| " + std::string(method_name(m.method)) + " | " +
           detail::pct(m.overall_accuracy) + " | " +
           std::to_string(m.corrected) + " | " + std::to_string(m.broken) +
           " | " + std::to_string(m.net) + " | " +
           std::to_string(report.high_disagreement_count) + " | " +
           detail::fmt("%+.2f", m.improvement_pct) + " |\n";
  }
  return out;
}

// Same facts as a fixed-width console table.
inline std::string format_plain(const ExperimentReport& report) {
  std::string out;
  out += report.dataset_name + " seed=" + std::to_string(report.seed) +
         " train=" + std::to_string(report.train_size) +
         " test=" + std::to_string(report.test_size) +
         " classes=" + std::to_string(report.num_classes) +
         " ensemble=" + std::to_string(report.ensemble_size) +
         " y=" + std::to_string(report.high_disagreement_count) + "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %12s %10s %8s %8s %14s\n", "method",
                "accuracy(%)", "corrected", "broken", "net", "improvement(%)");
  out += line;
  for (const auto& m : report.methods) {
    std::snprintf(line, sizeof(line), "%-10s %12s %10ld %8ld %8ld %14s\n",
                  method_name(m.method), detail::pct(m.overall_accuracy).c_str(),
                  m.corrected, m.broken, m.net,
                  detail::fmt("%+.2f", m.improvement_pct).c_str());
    out += line;
  }
  return out;
}

// Method-level results as CSV (one row per method).
inline std::string format_csv(const ExperimentReport& report) {
  std::string out =
      "dataset,seed,method,overall_accuracy,corrected,broken,net,subset,"
      "improvement_pct\n";
  for (const auto& m : report.methods) {
    out += report.dataset_name + "," + std::to_string(report.seed) + "," +
           method_name(m.method) + "," + detail::fmt("%.6f", m.overall_accuracy) +
           "," + std::to_string(m.corrected) + "," + std::to_string(m.broken) +
           "," + std::to_string(m.net) + "," +
           std::to_string(report.high_disagreement_count) + "," +
           detail::fmt("%.6f", m.improvement_pct) + "\n";
  }
  return out;
}

// Per-instance decision log: votes are '|'-joined so they stay one CSV cell.
// Column order is fixed: instance, truth, majority, high_disagreement, votes,
// then per method its answer and a 0/1 minority-override flag; methods that
// compute per-class evidence ship two further '|'-joined columns, prior and
// posterior.
inline std::string format_decision_log(const ExperimentReport& report) {
  std::string out = "instance,truth,majority,high_disagreement,votes";
  for (const auto& m : report.methods) {
    const std::string name = method_name(m.method);
    out += "," + name + "_answer," + name + "_minority";
    if (!m.priors.empty()) out += "," + name + "_prior," + name + "_posterior";
  }
  out += "\n";
  for (std::size_t i = 0; i < report.test_size; ++i) {
    out += std::to_string(i) + "," + std::to_string(report.truth[i]) + "," +
           std::to_string(report.majority[i]) + "," +
           std::to_string(static_cast<int>(report.high_disagreement[i])) + "," +
           detail::join_votes(report.votes.row(i));
    for (const auto& m : report.methods) {
      out += "," + std::to_string(m.answers[i]) + "," +
             std::to_string(static_cast<int>(m.followed_minority[i]));
      if (!m.priors.empty())
        out += "," + detail::join_reals(m.priors[i]) + "," +
               detail::join_reals(m.posteriors[i]);
    }
    out += "\n";
  }
  return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path,
                       const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("report: cannot open " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("report: write failed for " + path.string());
}

}  // namespace detail

// Writes the selected report formats plus the decision log under `dir`,
// returning the paths written.  Output is deterministic byte-for-byte for a
// fixed report.
inline std::vector<std::string> write_report_files(
    const ExperimentReport& report, const std::string& dir,
    std::span<const std::string> formats) {
  namespace fs = std::filesystem;
  const fs::path base(dir.empty() ? "." : dir);
  std::error_code ec;
  fs::create_directories(base, ec);
  if (ec) throw IoError("report: cannot create directory " + base.string() +
                        ": " + ec.message());
  const std::string stem =
      detail::slug(report.dataset_name) + "-seed" + std::to_string(report.seed);

  std::vector<std::string> written;
  for (const auto& format : formats) {
    fs::path path;
    std::string bytes;
    if (format == "markdown") {
      path = base / (stem + ".md");
      bytes = format_markdown(report);
    } else if (format == "csv") {
      path = base / (stem + ".csv");
      bytes = format_csv(report);
    } else if (format == "plain") {
      path = base / (stem + ".txt");
      bytes = format_plain(report);
    } else {
      throw ConfigurationError("report: unknown format '" + format + "'");
    }
    detail::write_file(path, bytes);
    written.push_back(path.string());
  }
  const fs::path log = base / (stem + ".decisions.csv");
  detail::write_file(log, format_decision_log(report));
  written.push_back(log.string());
  return written;
}

}  // namespace mts::harness
