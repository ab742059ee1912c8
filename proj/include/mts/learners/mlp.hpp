#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "mts/dataset.hpp"
#include "mts/errors.hpp"
#include "mts/learners/model.hpp"
#include "mts/matrix.hpp"
#include "mts/rng.hpp"

namespace mts::learners {

// One-hidden-layer tanh network over a flat parameter vector.  Exposing the
// parameters and the batch objectives directly makes the analytic gradients
// checkable against finite differences.
class MlpNet {
 public:
  MlpNet(std::size_t in, std::size_t hidden, std::size_t out)
      : in_(in), hidden_(hidden), out_(out),
        params_(hidden * in + hidden + out * hidden + out, 0.0) {
    if (in < 1 || hidden < 1 || out < 1)
      throw ConfigurationError("MlpNet: all layer sizes must be >= 1");
  }

  std::size_t param_count() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t input_dim() const { return in_; }
  std::size_t output_dim() const { return out_; }

  void init_glorot(RandomStream& stream) {
    double l1 = std::sqrt(6.0 / static_cast<double>(in_ + hidden_));
    double l2 = std::sqrt(6.0 / static_cast<double>(hidden_ + out_));
    for (std::size_t i = 0; i < hidden_ * in_; ++i)
      params_[w1_at() + i] = stream.uniform(-l1, l1);
    for (std::size_t i = 0; i < out_ * hidden_; ++i)
      params_[w2_at() + i] = stream.uniform(-l2, l2);
    // Biases stay zero.
  }

  // Fills `act` (hidden activations) and `out` (raw output units).
  void forward(std::span<const double> x, std::vector<double>& act,
               std::vector<double>& out) const {
    act.resize(hidden_);
    out.resize(out_);
    const double* w1 = params_.data() + w1_at();
    const double* b1 = params_.data() + b1_at();
    const double* w2 = params_.data() + w2_at();
    const double* b2 = params_.data() + b2_at();
    for (std::size_t j = 0; j < hidden_; ++j) {
      double z = b1[j];
      const double* row = w1 + j * in_;
      for (std::size_t k = 0; k < in_; ++k) z += row[k] * x[k];
      act[j] = std::tanh(z);
    }
    for (std::size_t o = 0; o < out_; ++o) {
      double z = b2[o];
      const double* row = w2 + o * hidden_;
      for (std::size_t j = 0; j < hidden_; ++j) z += row[j] * act[j];
      out[o] = z;
    }
  }

  std::vector<double> output(std::span<const double> x) const {
    std::vector<double> act, out;
    forward(x, act, out);
    return out;
  }

  // Weighted mean softmax cross-entropy over the given rows.
  double ce_loss(const Matrix& X, const std::vector<int>& y,
                 const std::vector<double>& sample_w,
                 std::span<const std::size_t> rows) const {
    std::vector<double> act, out, p;
    double loss = 0.0, total_w = 0.0;
    for (std::size_t r : rows) {
      forward(X.row(r), act, out);
      softmax(out, p);
      double py = std::max(p[static_cast<std::size_t>(y[r])], 1e-300);
      loss -= sample_w[r] * std::log(py);
      total_w += sample_w[r];
    }
    return loss / total_w;
  }

  void ce_grad(const Matrix& X, const std::vector<int>& y,
               const std::vector<double>& sample_w,
               std::span<const std::size_t> rows,
               std::vector<double>& grad) const {
    grad.assign(params_.size(), 0.0);
    std::vector<double> act, out, p, dz2(out_), dz1(hidden_);
    double total_w = 0.0;
    for (std::size_t r : rows) {
      forward(X.row(r), act, out);
      softmax(out, p);
      for (std::size_t o = 0; o < out_; ++o) {
        dz2[o] = sample_w[r] * (p[o] - (static_cast<std::size_t>(y[r]) == o));
      }
      accumulate(X.row(r), act, dz2, dz1, grad);
      total_w += sample_w[r];
    }
    for (double& g : grad) g /= total_w;
  }

  // Mean squared error of the first output unit over the given rows.
  double mse_loss(const Matrix& X, const std::vector<double>& y,
                  std::span<const std::size_t> rows) const {
    std::vector<double> act, out;
    double loss = 0.0;
    for (std::size_t r : rows) {
      forward(X.row(r), act, out);
      double d = out[0] - y[r];
      loss += d * d;
    }
    return loss / static_cast<double>(rows.size());
  }

  void mse_grad(const Matrix& X, const std::vector<double>& y,
                std::span<const std::size_t> rows,
                std::vector<double>& grad) const {
    grad.assign(params_.size(), 0.0);
    std::vector<double> act, out, dz2(out_), dz1(hidden_);
    for (std::size_t r : rows) {
      forward(X.row(r), act, out);
      dz2[0] = 2.0 * (out[0] - y[r]);
      accumulate(X.row(r), act, dz2, dz1, grad);
    }
    for (double& g : grad) g /= static_cast<double>(rows.size());
  }

  static void softmax(const std::vector<double>& z, std::vector<double>& p) {
    p.resize(z.size());
    double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) sum += (p[i] = std::exp(z[i] - top));
    for (double& v : p) v /= sum;
  }

 private:
  std::size_t w1_at() const { return 0; }
  std::size_t b1_at() const { return hidden_ * in_; }
  std::size_t w2_at() const { return hidden_ * in_ + hidden_; }
  std::size_t b2_at() const { return hidden_ * in_ + hidden_ + out_ * hidden_; }

  // Backprop for one sample; dz2 already carries the sample weight.
  void accumulate(std::span<const double> x, const std::vector<double>& act,
                  const std::vector<double>& dz2, std::vector<double>& dz1,
                  std::vector<double>& grad) const {
    const double* w2 = params_.data() + w2_at();
    double* gw1 = grad.data() + w1_at();
    double* gb1 = grad.data() + b1_at();
    double* gw2 = grad.data() + w2_at();
    double* gb2 = grad.data() + b2_at();
    for (std::size_t o = 0; o < out_; ++o) {
      double* row = gw2 + o * hidden_;
      for (std::size_t j = 0; j < hidden_; ++j) row[j] += dz2[o] * act[j];
      gb2[o] += dz2[o];
    }
    for (std::size_t j = 0; j < hidden_; ++j) {
      double da = 0.0;
      for (std::size_t o = 0; o < out_; ++o) da += w2[o * hidden_ + j] * dz2[o];
      dz1[j] = da * (1.0 - act[j] * act[j]);
    }
    for (std::size_t j = 0; j < hidden_; ++j) {
      double* row = gw1 + j * in_;
      for (std::size_t k = 0; k < in_; ++k) row[k] += dz1[j] * x[k];
      gb1[j] += dz1[j];
    }
  }

  std::size_t in_, hidden_, out_;
  std::vector<double> params_;
};

// Plain Adam with bias correction.
struct Adam {
  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad,
            double lr) {
    ++t;
    double c1 = 1.0 - std::pow(0.9, t);
    double c2 = 1.0 - std::pow(0.999, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = 0.9 * m[i] + 0.1 * grad[i];
      v[i] = 0.999 * v[i] + 0.001 * grad[i] * grad[i];
      params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + 1e-8);
    }
  }

  std::vector<double> m, v;
  int t = 0;
};

namespace detail {

// Shared minibatch loop: shuffled epochs, Adam steps, trailing partial batch
// included.
template <typename GradFn>
void adam_epochs(MlpNet& net, std::size_t n, int epochs, int batch_size,
                 double lr, const SeededRng& rng, GradFn&& batch_grad) {
  RandomStream order = rng.child("order").stream();
  Adam adam(net.param_count());
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> grad;
  auto bs = static_cast<std::size_t>(batch_size);
  for (int e = 0; e < epochs; ++e) {
    order.shuffle(perm);
    for (std::size_t at = 0; at < n; at += bs) {
      std::span<const std::size_t> rows(perm.data() + at,
                                        std::min(bs, n - at));
      batch_grad(rows, grad);
      adam.step(net.params(), grad, lr);
    }
  }
}

}  // namespace detail

class MlpClassifier final : public Classifier {
 public:
  static MlpClassifier fit(const Dataset& train,
                           const std::vector<double>& sample_w,
                           const ClassifierSpec& spec, const SeededRng& rng) {
    train.validate();
    if (sample_w.size() != train.size())
      throw ShapeError("MlpClassifier::fit: weight count mismatch");
    MlpClassifier c(MlpNet(train.dim(),
                           static_cast<std::size_t>(spec.hidden_units),
                           static_cast<std::size_t>(train.num_classes)),
                    FeatureScaler::fit(train.features));
    const Matrix scaled = c.scaler_.transform(train.features);
    RandomStream init = rng.child("init").stream();
    c.net_.init_glorot(init);
    detail::adam_epochs(
        c.net_, train.size(), spec.epochs, spec.batch_size, spec.learning_rate,
        rng, [&](std::span<const std::size_t> rows, std::vector<double>& g) {
          c.net_.ce_grad(scaled, train.labels, sample_w, rows, g);
        });
    return c;
  }

  int num_classes() const override {
    return static_cast<int>(net_.output_dim());
  }
  std::size_t feature_dim() const override { return net_.input_dim(); }
  const MlpNet& net() const { return net_; }

 protected:
  int predict_impl(std::span<const double> x) const override {
    std::vector<double> scaled;
    scaler_.transform_row(x, scaled);
    auto out = net_.output(scaled);
    return static_cast<int>(std::max_element(out.begin(), out.end()) -
                            out.begin());
  }

  std::vector<double> proba_impl(std::span<const double> x) const override {
    std::vector<double> scaled;
    scaler_.transform_row(x, scaled);
    auto out = net_.output(scaled);
    std::vector<double> p;
    MlpNet::softmax(out, p);
    return p;
  }

 private:
  MlpClassifier(MlpNet net, FeatureScaler scaler)
      : net_(std::move(net)), scaler_(std::move(scaler)) {}
  MlpNet net_;
  FeatureScaler scaler_;
};

class MlpRegressorModel final : public Regressor {
 public:
  static MlpRegressorModel fit(const Matrix& X, const std::vector<double>& y,
                               const RegressorSpec& spec,
                               const SeededRng& rng) {
    if (X.rows() == 0)
      throw DegenerateInputError("MlpRegressorModel: empty input");
    if (y.size() != X.rows())
      throw ShapeError("MlpRegressorModel: rows and targets must align");
    MlpRegressorModel r(
        MlpNet(X.cols(), static_cast<std::size_t>(spec.hidden_units), 1),
        FeatureScaler::fit(X));
    const Matrix scaled = r.scaler_.transform(X);
    RandomStream init = rng.child("init").stream();
    r.net_.init_glorot(init);
    detail::adam_epochs(
        r.net_, X.rows(), spec.epochs, spec.batch_size, spec.learning_rate,
        rng, [&](std::span<const std::size_t> rows, std::vector<double>& g) {
          r.net_.mse_grad(scaled, y, rows, g);
        });
    return r;
  }

  std::size_t feature_dim() const override { return net_.input_dim(); }
  const MlpNet& net() const { return net_; }

 protected:
  double predict_impl(std::span<const double> x) const override {
    std::vector<double> scaled;
    scaler_.transform_row(x, scaled);
    return net_.output(scaled)[0];
  }

 private:
  MlpRegressorModel(MlpNet net, FeatureScaler scaler)
      : net_(std::move(net)), scaler_(std::move(scaler)) {}
  MlpNet net_;
  FeatureScaler scaler_;
};

}  // namespace mts::learners
