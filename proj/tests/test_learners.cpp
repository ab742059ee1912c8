#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mts/dataset.hpp"
#include "mts/learners/adaboost.hpp"
#include "mts/learners/train.hpp"
#include "mts/rng.hpp"

namespace {

using namespace mts::learners;
using mts::Dataset;
using mts::Matrix;
using mts::SeededRng;

// Two (or more) well-separated Gaussian blobs, one per class.
Dataset make_blobs(int per_class, int num_classes, double spread,
                   std::uint64_t seed) {
  Dataset d;
  d.num_classes = num_classes;
  d.features = Matrix(static_cast<std::size_t>(per_class * num_classes), 2);
  auto s = SeededRng(seed).stream();
  std::size_t row = 0;
  for (int c = 0; c < num_classes; ++c) {
    double angle = 6.2831853 * c / num_classes;
    double cx = 4.0 * std::cos(angle), cy = 4.0 * std::sin(angle);
    for (int i = 0; i < per_class; ++i, ++row) {
      d.features.at(row, 0) = cx + spread * s.normal();
      d.features.at(row, 1) = cy + spread * s.normal();
      d.labels.push_back(c);
    }
  }
  return d;
}

double train_accuracy(const Classifier& c, const Dataset& d) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    hits += c.predict(d.features.row(i)) == d.labels[i];
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

TEST(Ridge, MatchesHandComputedClosedForm) {
  // X = (0,1,2), y = (1,3,5).  The penalty applies in standardized feature
  // units (population std sigma = sqrt(2/3)), so the closed form is
  // w = sum(x_s y~) / (sum(x_s^2) + alpha) folded back by 1/sigma:
  // w = 4 / (sigma^2 (3 + alpha)).
  Matrix X = Matrix::from_rows({{0.0}, {1.0}, {2.0}});
  std::vector<double> y = {1.0, 3.0, 5.0};
  RidgeModel exact = fit_ridge(X, y, 0.0);
  EXPECT_NEAR(exact.weights()[0], 2.0, 1e-12);
  EXPECT_NEAR(exact.bias(), 1.0, 1e-12);
  // alpha = 1: w = 4 / ((2/3)(3 + 1)) = 3/2, b = 3 - (3/2)(1) = 3/2.
  RidgeModel shrunk = fit_ridge(X, y, 1.0);
  EXPECT_NEAR(shrunk.weights()[0], 1.5, 1e-12);
  EXPECT_NEAR(shrunk.bias(), 1.5, 1e-12);
  // Huge alpha: w -> 0, prediction -> mean of y.
  RidgeModel flat = fit_ridge(X, y, 1e12);
  EXPECT_NEAR(flat.weights()[0], 0.0, 1e-9);
  EXPECT_NEAR(flat.bias(), 3.0, 1e-6);
}

TEST(Ridge, RejectsBadInput) {
  Matrix X = Matrix::from_rows({{0.0}, {1.0}});
  EXPECT_THROW(fit_ridge(X, {1.0}, 1.0), mts::ShapeError);
  EXPECT_THROW(fit_ridge(X, {1.0, 2.0}, -1.0), mts::ConfigurationError);
  EXPECT_THROW(fit_ridge(Matrix(), {}, 1.0), mts::DegenerateInputError);
}

TEST(Linear, PerceptronSeparatesBlobs) {
  Dataset d = make_blobs(40, 2, 0.5, 101);
  auto c = train_classifier(ClassifierSpec::perceptron(), d, SeededRng(7));
  EXPECT_EQ(train_accuracy(*c, d), 1.0);
  EXPECT_FALSE(c->constant());
}

TEST(Linear, LogisticAndSvmSeparateBlobs) {
  Dataset d = make_blobs(40, 2, 0.5, 102);
  auto lr = train_classifier(ClassifierSpec::logistic(), d, SeededRng(7));
  auto svm = train_classifier(ClassifierSpec::linear_svm(), d, SeededRng(7));
  EXPECT_EQ(train_accuracy(*lr, d), 1.0);
  EXPECT_EQ(train_accuracy(*svm, d), 1.0);
}

TEST(Linear, MulticlassBlobsViaOneVsRest) {
  Dataset d = make_blobs(30, 3, 0.4, 103);
  auto lr = train_classifier(ClassifierSpec::logistic(), d, SeededRng(5));
  EXPECT_GE(train_accuracy(*lr, d), 0.95);
}

TEST(Linear, TwoHeadOneVsRestEqualsBinaryExactly) {
  Dataset d = make_blobs(30, 2, 1.5, 104);  // some overlap
  auto weights = std::vector<double>(d.size(), 1.0);
  for (LinearKind kind :
       {LinearKind::Perceptron, LinearKind::Logistic, LinearKind::Svm}) {
    ClassifierSpec spec = kind == LinearKind::Perceptron
                              ? ClassifierSpec::perceptron()
                              : kind == LinearKind::Logistic
                                    ? ClassifierSpec::logistic()
                                    : ClassifierSpec::linear_svm();
    auto binary =
        LinearClassifier::fit(kind, d, weights, spec, SeededRng(9), false);
    auto ovr =
        LinearClassifier::fit(kind, d, weights, spec, SeededRng(9), true);
    ASSERT_EQ(binary.head_count(), 1u);
    ASSERT_EQ(ovr.head_count(), 2u);
    // The negative head must mirror the positive one exactly.
    for (std::size_t j = 0; j < d.dim(); ++j)
      ASSERT_DOUBLE_EQ(ovr.head(0).w[j], -ovr.head(1).w[j]);
    auto probe = SeededRng(77).stream();
    for (int i = 0; i < 500; ++i) {
      std::vector<double> x = {probe.uniform(-8, 8), probe.uniform(-8, 8)};
      ASSERT_EQ(binary.predict(x), ovr.predict(x));
    }
  }
}

TEST(Linear, BalancedWeightsRescueTheMinorityClass) {
  // x = 0: 55 negatives.  x = 1: 40 negatives, 5 positives.  Unweighted, the
  // positives never win anywhere; inverse-frequency weights flip x = 1.
  Dataset d;
  d.num_classes = 2;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 55; ++i) rows.push_back({0.0}), d.labels.push_back(0);
  for (int i = 0; i < 40; ++i) rows.push_back({1.0}), d.labels.push_back(0);
  for (int i = 0; i < 5; ++i) rows.push_back({1.0}), d.labels.push_back(1);
  d.features = Matrix::from_rows(rows);

  ClassifierSpec plain = ClassifierSpec::logistic();
  auto unweighted = train_classifier(plain, d, SeededRng(3));
  plain.balanced_class_weights = true;
  auto balanced = train_classifier(plain, d, SeededRng(3));
  std::vector<double> at_one = {1.0}, at_zero = {0.0};
  EXPECT_EQ(unweighted->predict(at_one), 0);
  EXPECT_EQ(balanced->predict(at_one), 1);
  EXPECT_EQ(balanced->predict(at_zero), 0);
}

TEST(Tree, LearnsXorAtDepthTwo) {
  Matrix X = Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  std::vector<int> y = {0, 1, 1, 0};
  std::vector<double> w(4, 1.0);
  TreeOptions opt;
  opt.max_depth = 2;
  DecisionTree t = DecisionTree::fit(X, y, w, 2, opt, nullptr);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_EQ(t.predict(X.row(i)), y[i]);
}

TEST(Tree, RespectsMaxDepth) {
  Matrix X = Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  std::vector<int> y = {0, 1, 1, 0};
  std::vector<double> w(4, 1.0);
  TreeOptions opt;
  opt.max_depth = 1;
  DecisionTree t = DecisionTree::fit(X, y, w, 2, opt, nullptr);
  EXPECT_LE(t.node_count(), 3u);  // a depth-1 tree is at most one split
}

TEST(Tree, LeafUsesWeightedMajority) {
  // Identical feature rows cannot be split; the heavier label must win.
  Matrix X = Matrix::from_rows({{1.0}, {1.0}});
  std::vector<int> y = {0, 1};
  DecisionTree heavy1 =
      DecisionTree::fit(X, y, {1.0, 3.0}, 2, TreeOptions{}, nullptr);
  DecisionTree heavy0 =
      DecisionTree::fit(X, y, {3.0, 1.0}, 2, TreeOptions{}, nullptr);
  std::vector<double> x = {1.0};
  EXPECT_EQ(heavy1.predict(x), 1);
  EXPECT_EQ(heavy0.predict(x), 0);
}

TEST(Forest, SeparatesBlobsAndIsDeterministic) {
  Dataset d = make_blobs(40, 3, 0.8, 105);
  auto a = train_classifier(ClassifierSpec::random_forest(), d, SeededRng(21));
  auto b = train_classifier(ClassifierSpec::random_forest(), d, SeededRng(21));
  EXPECT_GE(train_accuracy(*a, d), 0.95);
  auto probe = SeededRng(55).stream();
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x = {probe.uniform(-8, 8), probe.uniform(-8, 8)};
    EXPECT_EQ(a->predict(x), b->predict(x));
  }
}

TEST(Forest, ProbaIsTreeVoteFraction) {
  Dataset d = make_blobs(30, 2, 0.5, 106);
  auto f = train_classifier(ClassifierSpec::random_forest(), d, SeededRng(2));
  auto p = f->predict_proba(d.features.row(0));
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
  // 15 trees: every fraction is a multiple of 1/15.
  EXPECT_NEAR(std::remainder(p[1] * 15.0, 1.0), 0.0, 1e-9);
}

double max_grad_mismatch(MlpNet& net, const std::function<double()>& loss,
                         const std::vector<double>& grad) {
  double worst = 0.0;
  const double eps = 1e-6;
  for (std::size_t i = 0; i < net.param_count(); ++i) {
    double saved = net.params()[i];
    net.params()[i] = saved + eps;
    double up = loss();
    net.params()[i] = saved - eps;
    double down = loss();
    net.params()[i] = saved;
    double fd = (up - down) / (2.0 * eps);
    double rel = std::abs(grad[i] - fd) /
                 std::max(1e-8, std::abs(grad[i]) + std::abs(fd));
    worst = std::max(worst, rel);
  }
  return worst;
}

TEST(Mlp, CrossEntropyGradientMatchesFiniteDifferences) {
  MlpNet net(3, 4, 3);
  auto init = SeededRng(13).stream();
  net.init_glorot(init);
  Matrix X(5, 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) X.at(i, j) = init.normal();
  std::vector<int> y = {0, 2, 1, 1, 0};
  std::vector<double> w = {1.0, 0.5, 2.0, 1.0, 1.5};
  std::vector<std::size_t> rows = {0, 1, 2, 3, 4};
  std::vector<double> grad;
  net.ce_grad(X, y, w, rows, grad);
  double worst = max_grad_mismatch(
      net, [&] { return net.ce_loss(X, y, w, rows); }, grad);
  EXPECT_LT(worst, 1e-5);
}

TEST(Mlp, MseGradientMatchesFiniteDifferences) {
  MlpNet net(2, 5, 1);
  auto init = SeededRng(14).stream();
  net.init_glorot(init);
  Matrix X(6, 2);
  std::vector<double> y(6);
  for (std::size_t i = 0; i < 6; ++i) {
    X.at(i, 0) = init.normal();
    X.at(i, 1) = init.normal();
    y[i] = init.normal();
  }
  std::vector<std::size_t> rows = {0, 1, 2, 3, 4, 5};
  std::vector<double> grad;
  net.mse_grad(X, y, rows, grad);
  double worst = max_grad_mismatch(
      net, [&] { return net.mse_loss(X, y, rows); }, grad);
  EXPECT_LT(worst, 1e-5);
}

TEST(Mlp, LearnsXor) {
  Dataset d;
  d.features = Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  d.labels = {0, 1, 1, 0};
  d.num_classes = 2;
  ClassifierSpec spec = ClassifierSpec::mlp();
  spec.hidden_units = 8;
  spec.epochs = 500;
  spec.batch_size = 4;
  auto c = train_classifier(spec, d, SeededRng(31));
  EXPECT_EQ(train_accuracy(*c, d), 1.0);
}

TEST(Mlp, DeterministicForFixedSeed) {
  Dataset d = make_blobs(20, 2, 1.0, 107);
  ClassifierSpec spec = ClassifierSpec::mlp();
  spec.epochs = 20;
  auto a = train_classifier(spec, d, SeededRng(8));
  auto b = train_classifier(spec, d, SeededRng(8));
  auto probe = SeededRng(66).stream();
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x = {probe.uniform(-8, 8), probe.uniform(-8, 8)};
    auto pa = a->predict_proba(x), pb = b->predict_proba(x);
    ASSERT_EQ(pa, pb);
  }
}

TEST(Mlp, RegressorFitsALine) {
  Matrix X(40, 1);
  std::vector<double> y(40);
  for (int i = 0; i < 40; ++i) {
    X.at(i, 0) = -1.0 + 2.0 * i / 39.0;
    y[i] = 2.0 * X.at(i, 0) + 1.0;
  }
  RegressorSpec spec = RegressorSpec::mlp();
  spec.epochs = 400;
  auto r = train_regressor(spec, X, y, SeededRng(19));
  double mse = 0.0;
  for (int i = 0; i < 40; ++i) {
    double d = r->predict_value(X.row(i)) - y[i];
    mse += d * d;
  }
  EXPECT_LT(mse / 40.0, 0.01);
}

TEST(AdaBoost, PerfectFirstLearnerStopsWithDominantAlpha) {
  Dataset d = make_blobs(20, 2, 0.3, 108);
  AdaBoostModel m = train_adaboost(d, 15, 8, SeededRng(1));
  EXPECT_EQ(m.round_count(), 1u);
  EXPECT_NEAR(m.alpha(0), std::log(1e6), 1e-12);
  EXPECT_EQ(train_accuracy(m, d), 1.0);
}

TEST(AdaBoost, StumpsBoostToAnIntervalConcept) {
  // Class 1 on |x| <= 1; a single stump cannot express two boundaries.
  Dataset d;
  d.features =
      Matrix::from_rows({{-3}, {-2}, {-1}, {0}, {1}, {2}, {3}});
  d.labels = {0, 0, 1, 1, 1, 0, 0};
  d.num_classes = 2;
  std::vector<double> w(d.size(), 1.0);
  TreeOptions stump;
  stump.max_depth = 1;
  DecisionTree single =
      DecisionTree::fit(d.features, d.labels, w, 2, stump, nullptr);
  AdaBoostModel boosted = train_adaboost(d, 25, 1, SeededRng(1));
  EXPECT_GT(boosted.round_count(), 1u);
  EXPECT_LT(train_accuracy(single, d), 1.0);
  EXPECT_EQ(train_accuracy(boosted, d), 1.0);
}

TEST(AdaBoost, MulticlassBlobs) {
  Dataset d = make_blobs(25, 3, 1.2, 109);
  AdaBoostModel m = train_adaboost(d, 15, 8, SeededRng(1));
  EXPECT_GE(train_accuracy(m, d), 0.95);
}

TEST(TrainDispatch, DegenerateDataYieldsFlaggedConstants) {
  Dataset single_label;
  single_label.features = Matrix::from_rows({{0.0}, {1.0}, {2.0}});
  single_label.labels = {1, 1, 1};
  single_label.num_classes = 2;
  auto c = train_classifier(ClassifierSpec::logistic(), single_label,
                            SeededRng(1));
  EXPECT_TRUE(c->constant());
  std::vector<double> x = {5.0};
  EXPECT_EQ(c->predict(x), 1);

  Dataset flat;
  flat.features = Matrix::from_rows({{2.0}, {2.0}, {2.0}});
  flat.labels = {0, 1, 1};
  flat.num_classes = 2;
  auto c2 = train_classifier(ClassifierSpec::mlp(), flat, SeededRng(1));
  EXPECT_TRUE(c2->constant());
  EXPECT_EQ(c2->predict(x), 1);  // majority label

  Matrix one_row = Matrix::from_rows({{1.0, 2.0}});
  auto r = train_regressor(RegressorSpec::ridge(), one_row, {0.7}, SeededRng(1));
  EXPECT_TRUE(r->constant());
  std::vector<double> x2 = {9.0, 9.0};
  EXPECT_DOUBLE_EQ(r->predict_value(x2), 0.7);
}

TEST(TrainDispatch, ValidatesSpecAndShapes) {
  Dataset d = make_blobs(10, 2, 0.5, 110);
  ClassifierSpec bad = ClassifierSpec::logistic();
  bad.learning_rate = 0.0;
  EXPECT_THROW(train_classifier(bad, d, SeededRng(1)),
               mts::ConfigurationError);
  auto c = train_classifier(ClassifierSpec::logistic(), d, SeededRng(1));
  std::vector<double> wrong_dim = {1.0, 2.0, 3.0};
  EXPECT_THROW(c->predict(wrong_dim), mts::ShapeError);
}

TEST(TrainDispatch, ProbaSumsToOneAcrossFamilies) {
  Dataset d = make_blobs(20, 3, 1.0, 111);
  for (auto spec :
       {ClassifierSpec::logistic(), ClassifierSpec::decision_tree(),
        ClassifierSpec::random_forest(), ClassifierSpec::mlp()}) {
    if (spec.family == ClassifierFamily::Mlp) spec.epochs = 20;
    auto c = train_classifier(spec, d, SeededRng(12));
    auto p = c->predict_proba(d.features.row(3));
    ASSERT_EQ(p.size(), 3u);
    double sum = p[0] + p[1] + p[2];
    EXPECT_NEAR(sum, 1.0, 1e-9);
    for (double v : p) EXPECT_GE(v, 0.0);
  }
}

TEST(TrainDispatch, PredictMatrixShapeAndContent) {
  Dataset d = make_blobs(15, 2, 0.5, 112);
  std::vector<ClassifierPtr> ensemble = {
      train_classifier(ClassifierSpec::logistic(), d, SeededRng(1)),
      train_classifier(ClassifierSpec::decision_tree(), d, SeededRng(2)),
  };
  auto pm = predict_matrix(ensemble, d.features);
  EXPECT_EQ(pm.instances(), d.size());
  EXPECT_EQ(pm.classifiers(), 2u);
  EXPECT_EQ(pm.num_classes(), 2);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(pm.at(i, 0), ensemble[0]->predict(d.features.row(i)));
    EXPECT_EQ(pm.at(i, 1), ensemble[1]->predict(d.features.row(i)));
  }
  std::vector<ClassifierPtr> with_null = {ensemble[0], nullptr};
  EXPECT_THROW(predict_matrix(with_null, d.features), mts::InputError);
}

TEST(Families, NamesRoundTrip) {
  for (auto f : {ClassifierFamily::Perceptron, ClassifierFamily::Logistic,
                 ClassifierFamily::LinearSvm, ClassifierFamily::DecisionTree,
                 ClassifierFamily::RandomForest, ClassifierFamily::Mlp}) {
    auto back = family_from_name(family_name(f));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, f);
  }
  EXPECT_FALSE(family_from_name("nonsense").has_value());
}

}  // namespace
