#include "slateq/qmodel.h"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace slateq {
namespace {

void check_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) {
    throw std::invalid_argument("network needs at least input and output dims");
  }
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("layer dims must be >= 1");
  }
  if (dims.back() != 1) {
    throw std::invalid_argument("network output must be a single scalar");
  }
}

}  // namespace

QNetwork::QNetwork(std::vector<int> layer_dims) : dims_(std::move(layer_dims)) {
  check_dims(dims_);
  for (std::size_t l = 1; l < dims_.size(); ++l) {
    layers_.push_back({Eigen::MatrixXd::Zero(dims_[l], dims_[l - 1]),
                       Eigen::VectorXd::Zero(dims_[l])});
  }
}

QNetwork QNetwork::glorot_uniform(std::vector<int> layer_dims, Rng& rng) {
  QNetwork net(std::move(layer_dims));
  for (DenseLayer& layer : net.layers_) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.weights.rows() +
                                            layer.weights.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    // Column-major fill order keeps initialization independent of Eigen's
    // expression evaluation order.
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        layer.weights(r, c) = dist(rng);
      }
    }
  }
  return net;
}

void QNetwork::check_input(Eigen::Index rows) const {
  if (layers_.empty()) throw std::logic_error("network has no layers");
  if (rows != dims_.front()) {
    throw std::invalid_argument("input has " + std::to_string(rows) +
                                " features, network expects " +
                                std::to_string(dims_.front()));
  }
}

double QNetwork::predict(const Eigen::VectorXd& x) const {
  check_input(x.size());
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weights * a + layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a(0);
}

Eigen::VectorXd QNetwork::predict_batch(const Eigen::MatrixXd& xs) const {
  check_input(xs.rows());
  Eigen::MatrixXd a = xs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weights * a;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a.row(0).transpose();
}

double QNetwork::loss_and_gradient(const Eigen::MatrixXd& xs,
                                   const Eigen::VectorXd& targets,
                                   Eigen::VectorXd* grad) const {
  check_input(xs.rows());
  if (targets.size() != xs.cols() || xs.cols() == 0) {
    throw std::invalid_argument("need one target per input column");
  }
  if (!targets.allFinite()) {
    throw std::invalid_argument("non-finite regression target");
  }
  const std::size_t n_layers = layers_.size();
  const double n = static_cast<double>(xs.cols());

  // activations[l] is the input to layer l; pre[l] its pre-activation.
  std::vector<Eigen::MatrixXd> activations(n_layers + 1);
  std::vector<Eigen::MatrixXd> pre(n_layers);
  activations[0] = xs;
  for (std::size_t l = 0; l < n_layers; ++l) {
    pre[l] = layers_[l].weights * activations[l];
    pre[l].colwise() += layers_[l].bias;
    activations[l + 1] = l + 1 < n_layers ? pre[l].cwiseMax(0.0) : pre[l];
  }
  const Eigen::RowVectorXd residual =
      activations[n_layers].row(0) - targets.transpose();
  const double loss = 0.5 * residual.squaredNorm() / n;
  if (grad == nullptr) return loss;

  grad->resize(static_cast<Eigen::Index>(num_parameters()));
  std::vector<Eigen::Index> offsets(n_layers);
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    offsets[l] = off;
    off += layers_[l].weights.size() + layers_[l].bias.size();
  }

  Eigen::MatrixXd delta = residual / n;  // d loss / d pre[last]
  for (std::size_t l = n_layers; l-- > 0;) {
    const DenseLayer& layer = layers_[l];
    const Eigen::Index wsize = layer.weights.size();
    Eigen::Map<Eigen::MatrixXd> gw(grad->data() + offsets[l],
                                   layer.weights.rows(), layer.weights.cols());
    gw.noalias() = delta * activations[l].transpose();
    grad->segment(offsets[l] + wsize, layer.bias.size()) = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = layer.weights.transpose() * delta;
      delta = (pre[l - 1].array() > 0.0).select(back.array(), 0.0).matrix();
    }
  }
  return loss;
}

double QNetwork::sgd_step(const Eigen::VectorXd& x, double target, double lr) {
  Eigen::VectorXd t(1);
  t(0) = target;
  return sgd_batch(x, t, lr);
}

double QNetwork::sgd_batch(const Eigen::MatrixXd& xs,
                           const Eigen::VectorXd& targets, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  Eigen::VectorXd grad;
  const double loss = loss_and_gradient(xs, targets, &grad);
  Eigen::Index off = 0;
  for (DenseLayer& layer : layers_) {
    Eigen::Map<const Eigen::MatrixXd> gw(grad.data() + off,
                                         layer.weights.rows(),
                                         layer.weights.cols());
    layer.weights -= lr * gw;
    off += layer.weights.size();
    layer.bias -= lr * grad.segment(off, layer.bias.size());
    off += layer.bias.size();
  }
  return loss;
}

std::size_t QNetwork::num_parameters() const {
  std::size_t n = 0;
  for (const DenseLayer& layer : layers_) {
    n += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
  }
  return n;
}

Eigen::VectorXd QNetwork::flat_parameters() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(num_parameters()));
  Eigen::Index off = 0;
  for (const DenseLayer& layer : layers_) {
    out.segment(off, layer.weights.size()) =
        Eigen::Map<const Eigen::VectorXd>(layer.weights.data(),
                                          layer.weights.size());
    off += layer.weights.size();
    out.segment(off, layer.bias.size()) = layer.bias;
    off += layer.bias.size();
  }
  return out;
}

void QNetwork::set_flat_parameters(const Eigen::VectorXd& params) {
  if (params.size() != static_cast<Eigen::Index>(num_parameters())) {
    throw std::invalid_argument("parameter vector has the wrong length");
  }
  Eigen::Index off = 0;
  for (DenseLayer& layer : layers_) {
    Eigen::Map<Eigen::VectorXd>(layer.weights.data(), layer.weights.size()) =
        params.segment(off, layer.weights.size());
    off += layer.weights.size();
    layer.bias = params.segment(off, layer.bias.size());
    off += layer.bias.size();
  }
}

bool QNetwork::operator==(const QNetwork& other) const {
  if (dims_ != other.dims_) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].weights != other.layers_[l].weights ||
        layers_[l].bias != other.layers_[l].bias) {
      return false;
    }
  }
  return true;
}

LabelNetwork sync_label_network(const QNetwork& net) { return LabelNetwork(net); }

int item_feature_dim(int num_topics) { return 2 * num_topics + 1; }

void featurize_into(std::span<const double> interests, const Document& doc,
                    Eigen::Ref<Eigen::VectorXd> out) {
  const int t = static_cast<int>(interests.size());
  if (out.size() != item_feature_dim(t)) {
    throw std::invalid_argument("feature buffer has the wrong length");
  }
  if (doc.topic < 0 || doc.topic >= t) {
    throw std::out_of_range("document topic outside the interest vector");
  }
  for (int i = 0; i < t; ++i) out(i) = interests[i];
  out.segment(t, t).setZero();
  out(t + doc.topic) = 1.0;
  out(2 * t) = doc.quality;
}

Eigen::VectorXd featurize(std::span<const double> interests,
                          const Document& doc) {
  Eigen::VectorXd x(item_feature_dim(static_cast<int>(interests.size())));
  featurize_into(interests, doc, x);
  return x;
}

Eigen::VectorXd featurize(const UserState& user, const Document& doc) {
  return featurize(std::span<const double>(user.interests), doc);
}

int slate_feature_dim(int num_topics, int slate_size) {
  return num_topics + slate_size * (num_topics + 1);
}

void featurize_slate_into(std::span<const double> interests,
                          std::span<const Document* const> slate,
                          Eigen::Ref<Eigen::VectorXd> out) {
  const int t = static_cast<int>(interests.size());
  const int k = static_cast<int>(slate.size());
  if (out.size() != slate_feature_dim(t, k)) {
    throw std::invalid_argument("slate feature buffer has the wrong length");
  }
  out.setZero();
  for (int i = 0; i < t; ++i) out(i) = interests[i];
  for (int j = 0; j < k; ++j) {
    const Document& doc = *slate[j];
    if (doc.topic < 0 || doc.topic >= t) {
      throw std::out_of_range("document topic outside the interest vector");
    }
    const int base = t + j * (t + 1);
    out(base + doc.topic) = 1.0;
    out(base + t) = doc.quality;
  }
}

std::string network_to_json(const QNetwork& net) {
  nlohmann::json j;
  j["format"] = "slateq-qnetwork";
  j["version"] = 1;
  j["layer_dims"] = net.layer_dims();
  nlohmann::json layers = nlohmann::json::array();
  for (const DenseLayer& layer : net.layers()) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      std::vector<double> row(layer.weights.cols());
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        row[c] = layer.weights(r, c);
      }
      rows.push_back(row);
    }
    std::vector<double> bias(layer.bias.data(),
                             layer.bias.data() + layer.bias.size());
    layers.push_back({{"weights", rows}, {"bias", bias}});
  }
  j["layers"] = layers;
  return j.dump();
}

QNetwork network_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed network checkpoint: ") +
                             e.what());
  }
  if (j.value("format", "") != "slateq-qnetwork" || j.value("version", 0) != 1) {
    throw std::runtime_error("not a slateq-qnetwork v1 checkpoint");
  }
  QNetwork net(j.at("layer_dims").get<std::vector<int>>());
  const auto& layers = j.at("layers");
  if (layers.size() != net.layers().size()) {
    throw std::runtime_error("checkpoint layer count does not match layer_dims");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    DenseLayer& layer = net.layers()[l];
    const auto rows = layers[l].at("weights").get<std::vector<std::vector<double>>>();
    const auto bias = layers[l].at("bias").get<std::vector<double>>();
    if (rows.size() != static_cast<std::size_t>(layer.weights.rows()) ||
        bias.size() != static_cast<std::size_t>(layer.bias.size())) {
      throw std::runtime_error("checkpoint tensor shape mismatch");
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != static_cast<std::size_t>(layer.weights.cols())) {
        throw std::runtime_error("checkpoint tensor shape mismatch");
      }
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        layer.weights(r, c) = rows[r][c];
      }
    }
    for (std::size_t i = 0; i < bias.size(); ++i) layer.bias(i) = bias[i];
  }
  return net;
}

}  // namespace slateq
