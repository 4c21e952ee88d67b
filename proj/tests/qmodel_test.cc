#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "slateq/qmodel.h"

namespace slateq {
namespace {

Eigen::VectorXd random_vector(int n, Rng& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> d(lo, hi);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = d(rng);
  return x;
}

TEST(Featurize, LayoutAndLength) {
  EXPECT_EQ(item_feature_dim(20), 41);
  UserState u{std::vector<double>(20, 0.0), 200, true};
  const Eigen::VectorXd x = featurize(u, Document{0, 3, 0.0, 4});
  ASSERT_EQ(x.size(), 41);
  for (int i = 0; i < 41; ++i) EXPECT_EQ(x(i), i == 23 ? 1.0 : 0.0) << i;

  u.interests[5] = 0.25;
  const Eigen::VectorXd a = featurize(u, Document{0, 7, 1.5, 4});
  const Eigen::VectorXd b = featurize(u, Document{1, 7, -2.0, 4});
  EXPECT_EQ(a(5), 0.25);
  EXPECT_EQ(a.head(40), b.head(40));
  EXPECT_EQ(a(40), 1.5);
  EXPECT_EQ(b(40), -2.0);
}

TEST(Featurize, SlateLayout) {
  EXPECT_EQ(slate_feature_dim(20, 3), 83);
  const std::vector<double> interests = {0.5, -0.5};
  const Document d0{0, 1, 2.0, 4}, d1{1, 0, -1.0, 4};
  const std::vector<const Document*> slate = {&d0, &d1};
  Eigen::VectorXd x(slate_feature_dim(2, 2));
  featurize_slate_into(interests, slate, x);
  Eigen::VectorXd expected(8);
  expected << 0.5, -0.5, 0, 1, 2.0, 1, 0, -1.0;
  EXPECT_EQ(x, expected);
}

TEST(QNetwork, ZeroNetworkPredictsZero) {
  const QNetwork net({41, 64, 32, 1});
  Rng rng = make_rng(1);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(net.predict(random_vector(41, rng)), 0.0);
}

TEST(QNetwork, LinearLayerIsDotProduct) {
  QNetwork net({3, 1});
  net.layers()[0].weights << 0.5, -1.0, 2.0;
  net.layers()[0].bias << 0.25;
  Eigen::VectorXd x(3);
  x << 1.0, 2.0, 3.0;
  EXPECT_DOUBLE_EQ(net.predict(x), 0.5 - 2.0 + 6.0 + 0.25);
}

TEST(QNetwork, DimensionMismatchThrows) {
  const QNetwork net({4, 8, 1});
  EXPECT_THROW(net.predict(Eigen::VectorXd::Zero(5)), std::invalid_argument);
  EXPECT_THROW(QNetwork({4, 8, 2}), std::invalid_argument);
}

TEST(QNetwork, SeededInitIsReproducible) {
  Rng r1 = make_rng(7), r2 = make_rng(7);
  const QNetwork a = QNetwork::glorot_uniform({41, 64, 32, 1}, r1);
  const QNetwork b = QNetwork::glorot_uniform({41, 64, 32, 1}, r2);
  EXPECT_TRUE(a == b);
  Rng rx = make_rng(8);
  const Eigen::VectorXd x = random_vector(41, rx);
  EXPECT_EQ(a.predict(x), b.predict(x));
  const double limit = std::sqrt(6.0 / (41 + 64));
  EXPECT_LE(a.layers()[0].weights.cwiseAbs().maxCoeff(), limit);
}

TEST(SgdStep, ZeroResidualLeavesNetUnchanged) {
  Rng rng = make_rng(9);
  QNetwork net = QNetwork::glorot_uniform({5, 4, 1}, rng);
  const Eigen::VectorXd x = random_vector(5, rng);
  const QNetwork before = net;
  EXPECT_EQ(net.sgd_step(x, net.predict(x), 0.1), 0.0);
  EXPECT_TRUE(net == before);
}

TEST(SgdStep, LinearClosedForm) {
  QNetwork net({3, 1});
  net.layers()[0].weights << 0.1, 0.2, 0.3;
  Eigen::VectorXd x(3);
  x << 1.0, -2.0, 0.5;
  const double pred = net.predict(x);
  const double target = 2.0, lr = 0.05;
  const double loss = net.sgd_step(x, target, lr);
  EXPECT_DOUBLE_EQ(loss, 0.5 * (pred - target) * (pred - target));
  Eigen::RowVector3d expected(0.1, 0.2, 0.3);
  expected -= lr * (pred - target) * x.transpose();
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(net.layers()[0].weights(0, i), expected(i), 1e-15);
  }
  EXPECT_NEAR(net.layers()[0].bias(0), -lr * (pred - target), 1e-15);
}

TEST(SgdStep, ConvergesOnASingleSample) {
  Rng rng = make_rng(10);
  QNetwork net = QNetwork::glorot_uniform({41, 64, 32, 1}, rng);
  const Eigen::VectorXd x = random_vector(41, rng);
  for (int i = 0; i < 1000; ++i) net.sgd_step(x, 3.0, 1e-3);
  EXPECT_NEAR(net.predict(x), 3.0, 1e-3);
}

TEST(SgdStep, RejectsNonFiniteTarget) {
  QNetwork net({2, 1});
  EXPECT_THROW(net.sgd_step(Eigen::VectorXd::Zero(2), NAN, 0.1), std::invalid_argument);
  EXPECT_THROW(net.sgd_step(Eigen::VectorXd::Zero(2), 1.0, 0.0), std::invalid_argument);
}

TEST(LabelNetwork, IsADeepCopy) {
  Rng rng = make_rng(11);
  QNetwork net = QNetwork::glorot_uniform({6, 8, 1}, rng);
  const LabelNetwork label = sync_label_network(net);
  const Eigen::VectorXd x = random_vector(6, rng);
  EXPECT_EQ(label.predict(x), net.predict(x));
  const double frozen = label.predict(x);
  net.sgd_step(x, 10.0, 0.1);
  EXPECT_NE(net.predict(x), frozen);
  EXPECT_EQ(label.predict(x), frozen);
}

TEST(Checkpoint, JsonRoundTrip) {
  Rng rng = make_rng(12);
  const QNetwork net = QNetwork::glorot_uniform({41, 16, 8, 1}, rng);
  const QNetwork back = network_from_json(network_to_json(net));
  EXPECT_TRUE(back == net);
  EXPECT_THROW(network_from_json("{\"format\":\"other\"}"), std::runtime_error);
  EXPECT_THROW(network_from_json("not json"), std::runtime_error);
}

TEST(QModelProperty, GradientMatchesFiniteDifferences) {
  Rng rng = make_rng(13);
  for (int n = 0; n < 100; ++n) {
    QNetwork net = QNetwork::glorot_uniform({41, 64, 32, 1}, rng);
    Eigen::VectorXd params = net.flat_parameters();
    // Non-zero biases so every layer's bias gradient is exercised.
    params += 0.05 * random_vector(static_cast<int>(params.size()), rng);
    net.set_flat_parameters(params);
    Eigen::MatrixXd x = random_vector(41, rng);
    Eigen::VectorXd t(1);
    t << 3.0 * uniform01(rng);

    Eigen::VectorXd analytic;
    net.loss_and_gradient(x, t, &analytic);
    Eigen::VectorXd numeric(params.size());
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      Eigen::VectorXd p = params;
      p(i) += h;
      net.set_flat_parameters(p);
      const double up = net.loss_and_gradient(x, t, nullptr);
      p(i) -= 2 * h;
      net.set_flat_parameters(p);
      const double down = net.loss_and_gradient(x, t, nullptr);
      numeric(i) = (up - down) / (2 * h);
    }
    const double rel = (analytic - numeric).norm() /
                       std::max(analytic.norm() + numeric.norm(), 1e-12);
    EXPECT_LT(rel, 1e-4) << "net " << n;
  }
}

TEST(QModelProperty, PiecewiseLinearAlongSegments) {
  Rng rng = make_rng(14);
  int checked = 0;
  for (int n = 0; n < 50; ++n) {
    const QNetwork net = QNetwork::glorot_uniform({5, 8, 4, 1}, rng);
    const Eigen::VectorXd a = random_vector(5, rng);
    const Eigen::VectorXd b = a + 1e-3 * random_vector(5, rng);
    // Activation pattern at both ends and the midpoint.
    auto pattern = [&](const Eigen::VectorXd& x) {
      std::vector<bool> out;
      Eigen::VectorXd h = x;
      for (std::size_t l = 0; l + 1 < net.layers().size(); ++l) {
        h = net.layers()[l].weights * h + net.layers()[l].bias;
        for (Eigen::Index i = 0; i < h.size(); ++i) out.push_back(h(i) > 0);
        h = h.cwiseMax(0.0);
      }
      return out;
    };
    const Eigen::VectorXd mid = 0.5 * (a + b);
    if (pattern(a) != pattern(b) || pattern(a) != pattern(mid)) continue;
    ++checked;
    EXPECT_NEAR(net.predict(mid), 0.5 * (net.predict(a) + net.predict(b)), 1e-12);
  }
  EXPECT_GT(checked, 25);
}

TEST(QModelProperty, BatchLossDecreases) {
  Rng rng = make_rng(15);
  QNetwork net = QNetwork::glorot_uniform({41, 64, 32, 1}, rng);
  Eigen::MatrixXd xs(41, 32);
  Eigen::VectorXd ts(32);
  for (int i = 0; i < 32; ++i) {
    xs.col(i) = random_vector(41, rng);
    ts(i) = 4.0 * uniform01(rng);
  }
  std::vector<double> first, last;
  for (int step = 0; step < 200; ++step) {
    const double loss = net.sgd_batch(xs, ts, 1e-3);
    (step < 100 ? first : last).push_back(loss);
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  EXPECT_LT(median(last), median(first));
}

}  // namespace
}  // namespace slateq
