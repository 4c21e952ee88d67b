#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slateq/corpus.h"
#include "slateq/rng.h"
#include "slateq/user_model.h"

namespace slateq {

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

// Fully connected regressor with rectifier hidden layers and a single linear
// output. Batched calls take one sample per column.
class QNetwork {
 public:
  QNetwork() = default;
  // All weights and biases zero. layer_dims = {input, hidden..., 1}.
  explicit QNetwork(std::vector<int> layer_dims);
  // Uniform in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static QNetwork glorot_uniform(std::vector<int> layer_dims, Rng& rng);

  int input_dim() const { return dims_.empty() ? 0 : dims_.front(); }
  const std::vector<int>& layer_dims() const { return dims_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  double predict(const Eigen::VectorXd& x) const;
  Eigen::VectorXd predict_batch(const Eigen::MatrixXd& xs) const;

  // Mean of 0.5 * (prediction - target)^2 over the columns of `xs`; when
  // `grad` is non-null it receives the gradient w.r.t. flat_parameters().
  double loss_and_gradient(const Eigen::MatrixXd& xs,
                           const Eigen::VectorXd& targets,
                           Eigen::VectorXd* grad) const;

  // One plain gradient step; returns the loss before the step.
  double sgd_step(const Eigen::VectorXd& x, double target, double lr);
  double sgd_batch(const Eigen::MatrixXd& xs, const Eigen::VectorXd& targets,
                   double lr);

  // Layer by layer: weights (column-major), then bias.
  std::size_t num_parameters() const;
  Eigen::VectorXd flat_parameters() const;
  void set_flat_parameters(const Eigen::VectorXd& params);

  bool operator==(const QNetwork& other) const;

 private:
  void check_input(Eigen::Index rows) const;

  std::vector<int> dims_;
  std::vector<DenseLayer> layers_;
};

// Frozen copy of a QNetwork used for bootstrapped targets. Immutable after
// construction; replace it wholesale to resync.
class LabelNetwork {
 public:
  LabelNetwork() = default;
  explicit LabelNetwork(QNetwork snapshot) : net_(std::move(snapshot)) {}

  double predict(const Eigen::VectorXd& x) const { return net_.predict(x); }
  Eigen::VectorXd predict_batch(const Eigen::MatrixXd& xs) const {
    return net_.predict_batch(xs);
  }
  const QNetwork& network() const { return net_; }

 private:
  QNetwork net_;
};

LabelNetwork sync_label_network(const QNetwork& net);

// [interests (T)] ++ [topic one-hot (T)] ++ [quality]. The budget is never
// part of the features.
int item_feature_dim(int num_topics);
void featurize_into(std::span<const double> interests, const Document& doc,
                    Eigen::Ref<Eigen::VectorXd> out);
Eigen::VectorXd featurize(const UserState& user, const Document& doc);
Eigen::VectorXd featurize(std::span<const double> interests,
                          const Document& doc);

// Whole-slate input for full-slate Q-learning:
// [interests (T)] ++ k x ([topic one-hot (T)] ++ [quality]).
int slate_feature_dim(int num_topics, int slate_size);
void featurize_slate_into(std::span<const double> interests,
                          std::span<const Document* const> slate,
                          Eigen::Ref<Eigen::VectorXd> out);

// Structured-text (JSON) checkpoint:
//   {"format": "slateq-qnetwork", "version": 1,
//    "layer_dims": [41, 64, 32, 1],
//    "layers": [{"weights": [[row 0], [row 1], ...], "bias": [...]}, ...]}
std::string network_to_json(const QNetwork& net);
QNetwork network_from_json(const std::string& text);

}  // namespace slateq
