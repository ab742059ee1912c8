#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mts/errors.hpp"
#include "mts/harness/csv.hpp"
#include "mts/learners/model.hpp"

namespace mts::harness {

// Aggregation methods the experiment runner knows how to score.
enum class Method {
  Majority,
  Weighted,
  AdaBoost,
  RandomForest,
  Hmts,
  Dmts,
  Bts,
};

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Majority: return "majority";
    case Method::Weighted: return "weighted";
    case Method::AdaBoost: return "adaboost";
    case Method::RandomForest: return "rf";
    case Method::Hmts: return "hmts";
    case Method::Dmts: return "dmts";
    case Method::Bts: return "bts";
  }
  return "unknown";
}

inline Method method_from_name(std::string_view s) {
  if (s == "majority") return Method::Majority;
  if (s == "weighted") return Method::Weighted;
  if (s == "adaboost") return Method::AdaBoost;
  if (s == "rf" || s == "random_forest") return Method::RandomForest;
  if (s == "hmts") return Method::Hmts;
  if (s == "dmts") return Method::Dmts;
  if (s == "bts") return Method::Bts;
  throw ConfigurationError("unknown method '" + std::string(s) + "'");
}

struct DatasetConfig {
  std::string path;
  std::string name;  // defaults to the file stem when empty
  CsvSchema schema;
};

// Settings for the standalone comparison ensembles.
struct ComparisonConfig {
  int adaboost_rounds = 15;
  int adaboost_depth = 8;
  int rf_trees = 15;
  int rf_depth = 8;
};

// One experiment: dataset, split, the noisy ensemble recipe, which
// aggregators to score, and where reports go.
struct ExperimentConfig {
  DatasetConfig dataset;
  double test_fraction = 0.5;
  std::uint64_t seed = 1;
  std::vector<learners::ClassifierSpec> families;
  std::vector<double> noise_rates = {0.06, 0.08, 0.10};
  std::vector<Method> methods;
  learners::RegressorSpec hmts_regressor = learners::RegressorSpec::ridge();
  learners::ClassifierSpec dmts_discriminator;
  double dmts_threshold = 0.5;
  std::optional<int> disagreement_max_count;
  ComparisonConfig comparison;
  bool normalize = true;
  std::string output_dir;
  std::vector<std::string> formats = {"markdown", "csv"};

  ExperimentConfig() {
    families = {learners::ClassifierSpec::perceptron(),
                learners::ClassifierSpec::logistic(),
                learners::ClassifierSpec::random_forest(),
                learners::ClassifierSpec::linear_svm(),
                learners::ClassifierSpec::mlp()};
    methods = {Method::Majority, Method::Weighted, Method::AdaBoost,
               Method::RandomForest, Method::Hmts, Method::Dmts, Method::Bts};
    // Agreement regressors fit single-member vote partitions, which are small
    // and dominated by near-unanimous instances; heavy shrinkage keeps their
    // predictions near the partition means so that spurious minority flips on
    // lopsided votes are rare, while contested instances retain signal.
    hmts_regressor.alpha = 1e4;
    dmts_discriminator = learners::ClassifierSpec::mlp();
    dmts_discriminator.balanced_class_weights = true;
    // Predicting committee error is a harder, imbalance-reweighted target
    // than the members' class prediction; the discriminator gets a wider
    // hidden layer so confident "majority is fine" regions stay quiet.
    dmts_discriminator.hidden_units = 128;
  }

  void validate() const {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
      throw ConfigurationError("config: test_fraction must lie in (0, 1)");
    if (families.empty())
      throw ConfigurationError("config: at least one classifier family");
    if (noise_rates.empty())
      throw ConfigurationError("config: at least one noise rate");
    for (double r : noise_rates)
      if (!(r >= 0.0 && r <= 1.0))
        throw ConfigurationError("config: noise rate " + std::to_string(r) +
                                 " outside [0, 1]");
    if (methods.empty())
      throw ConfigurationError("config: at least one method");
    if (families.size() * noise_rates.size() < 2)
      throw ConfigurationError(
          "config: ensemble needs at least two members "
          "(families x noise rates)");
    for (const auto& f : families) f.validate();
    hmts_regressor.validate();
    dmts_discriminator.validate();
    if (!(dmts_threshold > 0.0 && dmts_threshold < 1.0))
      throw ConfigurationError("config: dmts_threshold must lie in (0, 1)");
    if (comparison.adaboost_rounds < 1 || comparison.rf_trees < 1 ||
        comparison.adaboost_depth < 1 || comparison.rf_depth < 1)
      throw ConfigurationError("config: comparison sizes must be >= 1");
    for (const auto& f : formats)
      if (f != "markdown" && f != "csv" && f != "plain")
        throw ConfigurationError("config: unknown report format '" + f + "'");
  }

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

namespace detail {

inline learners::ClassifierSpec family_spec_from_name(std::string_view name) {
  auto fam = learners::family_from_name(name);
  if (!fam)
    throw ConfigurationError("config: unknown classifier family '" +
                             std::string(name) + "'");
  switch (*fam) {
    case learners::ClassifierFamily::Perceptron:
      return learners::ClassifierSpec::perceptron();
    case learners::ClassifierFamily::Logistic:
      return learners::ClassifierSpec::logistic();
    case learners::ClassifierFamily::LinearSvm:
      return learners::ClassifierSpec::linear_svm();
    case learners::ClassifierFamily::DecisionTree:
      return learners::ClassifierSpec::decision_tree();
    case learners::ClassifierFamily::RandomForest:
      return learners::ClassifierSpec::random_forest();
    case learners::ClassifierFamily::Mlp:
      return learners::ClassifierSpec::mlp();
  }
  throw ConfigurationError("config: unhandled family");
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    c.dataset.path = d.value("path", std::string());
    c.dataset.name = d.value("name", std::string());
    c.dataset.schema.label_column = d.value("label_column", -1);
    c.dataset.schema.has_header = d.value("has_header", false);
    if (d.contains("class_names"))
      for (const auto& [key, val] : d.at("class_names").items())
        c.dataset.schema.class_names[key] = val.get<int>();
  }
  c.test_fraction = j.value("test_fraction", c.test_fraction);
  c.seed = j.value("seed", c.seed);
  if (j.contains("families")) {
    c.families.clear();
    for (const auto& name : j.at("families"))
      c.families.push_back(
          detail::family_spec_from_name(name.get<std::string>()));
  }
  if (j.contains("noise_rates"))
    c.noise_rates = j.at("noise_rates").get<std::vector<double>>();
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& name : j.at("methods"))
      c.methods.push_back(method_from_name(name.get<std::string>()));
  }
  if (j.contains("hmts")) {
    const auto& h = j.at("hmts");
    const std::string fam = h.value("regressor", std::string("ridge"));
    auto rf = learners::regressor_family_from_name(fam);
    if (!rf)
      throw ConfigurationError("config: unknown regressor '" + fam + "'");
    c.hmts_regressor.family = *rf;
    c.hmts_regressor.alpha = h.value("alpha", c.hmts_regressor.alpha);
    c.hmts_regressor.hidden_units =
        h.value("hidden_units", c.hmts_regressor.hidden_units);
    c.hmts_regressor.epochs = h.value("epochs", c.hmts_regressor.epochs);
    c.hmts_regressor.learning_rate =
        h.value("learning_rate", c.hmts_regressor.learning_rate);
    c.hmts_regressor.batch_size =
        h.value("batch_size", c.hmts_regressor.batch_size);
  }
  if (j.contains("dmts")) {
    const auto& d = j.at("dmts");
    c.dmts_threshold = d.value("threshold", c.dmts_threshold);
    auto& disc = c.dmts_discriminator;
    disc.hidden_units = d.value("hidden_units", disc.hidden_units);
    disc.epochs = d.value("epochs", disc.epochs);
    disc.learning_rate = d.value("learning_rate", disc.learning_rate);
    disc.batch_size = d.value("batch_size", disc.batch_size);
    disc.balanced_class_weights =
        d.value("balanced_class_weights", disc.balanced_class_weights);
  }
  if (j.contains("comparison")) {
    const auto& cmp = j.at("comparison");
    c.comparison.adaboost_rounds =
        cmp.value("adaboost_rounds", c.comparison.adaboost_rounds);
    c.comparison.adaboost_depth =
        cmp.value("adaboost_depth", c.comparison.adaboost_depth);
    c.comparison.rf_trees = cmp.value("rf_trees", c.comparison.rf_trees);
    c.comparison.rf_depth = cmp.value("rf_depth", c.comparison.rf_depth);
  }
  if (j.contains("disagreement_max_count") &&
      !j.at("disagreement_max_count").is_null())
    c.disagreement_max_count = j.at("disagreement_max_count").get<int>();
  c.normalize = j.value("normalize", c.normalize);
  c.output_dir = j.value("output_dir", c.output_dir);
  if (j.contains("formats"))
    c.formats = j.at("formats").get<std::vector<std::string>>();
  c.validate();
  return c;
}

inline nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["dataset"]["path"] = dataset.path;
  j["dataset"]["name"] = dataset.name;
  j["dataset"]["label_column"] = dataset.schema.label_column;
  j["dataset"]["has_header"] = dataset.schema.has_header;
  if (!dataset.schema.class_names.empty()) {
    nlohmann::json names;
    for (const auto& [key, val] : dataset.schema.class_names) names[key] = val;
    j["dataset"]["class_names"] = names;
  }
  j["test_fraction"] = test_fraction;
  j["seed"] = seed;
  nlohmann::json fams = nlohmann::json::array();
  for (const auto& f : families) fams.push_back(learners::family_name(f.family));
  j["families"] = fams;
  j["noise_rates"] = noise_rates;
  nlohmann::json ms = nlohmann::json::array();
  for (Method m : methods) ms.push_back(method_name(m));
  j["methods"] = ms;
  j["hmts"]["regressor"] =
      learners::regressor_family_name(hmts_regressor.family);
  j["hmts"]["alpha"] = hmts_regressor.alpha;
  j["hmts"]["hidden_units"] = hmts_regressor.hidden_units;
  j["hmts"]["epochs"] = hmts_regressor.epochs;
  j["hmts"]["learning_rate"] = hmts_regressor.learning_rate;
  j["hmts"]["batch_size"] = hmts_regressor.batch_size;
  j["dmts"]["threshold"] = dmts_threshold;
  j["dmts"]["hidden_units"] = dmts_discriminator.hidden_units;
  j["dmts"]["epochs"] = dmts_discriminator.epochs;
  j["dmts"]["learning_rate"] = dmts_discriminator.learning_rate;
  j["dmts"]["batch_size"] = dmts_discriminator.batch_size;
  j["dmts"]["balanced_class_weights"] =
      dmts_discriminator.balanced_class_weights;
  j["comparison"]["adaboost_rounds"] = comparison.adaboost_rounds;
  j["comparison"]["adaboost_depth"] = comparison.adaboost_depth;
  j["comparison"]["rf_trees"] = comparison.rf_trees;
  j["comparison"]["rf_depth"] = comparison.rf_depth;
  if (disagreement_max_count)
    j["disagreement_max_count"] = *disagreement_max_count;
  else
    j["disagreement_max_count"] = nullptr;
  j["normalize"] = normalize;
  j["output_dir"] = output_dir;
  j["formats"] = formats;
  return j;
}

}  // namespace mts::harness
