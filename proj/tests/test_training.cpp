#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "uninet/dataset.hpp"
#include "uninet/errors.hpp"
#include "uninet/training.hpp"

using namespace uninet;

namespace {

LogicExpr conj() { return LogicExpr::binary(1.0, LogicExpr::input(0), LogicExpr::input(1)); }

double mse(const LogicNetwork& net, const Dataset& d) {
  double loss = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double s = (network_outputs(net, d.features.row(i))[0] + 1) / 2;
    const double t = d.labels[i] == 1 ? 1.0 : 0.0;
    loss += (s - t) * (s - t);
  }
  return loss / static_cast<double>(d.size());
}

double median_abs_selector(const LogicNetwork& net) {
  std::vector<double> w;
  for (const auto& p : net.parts()) {
    for (double v : p.selector.data()) w.push_back(std::abs(v));
  }
  std::nth_element(w.begin(), w.begin() + w.size() / 2, w.end());
  return w[w.size() / 2];
}

}  // namespace

TEST(Config, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.l1_regularization = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.validation_fraction = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Metrics, Counting) {
  const std::vector<std::size_t> truth{0, 1, 0, 1, 0, 1};
  const auto perfect = metrics_from_predictions(truth, truth, 2);
  EXPECT_EQ(perfect.misclassification_rate, 0.0);
  const std::vector<std::size_t> constant(6, 1);
  const auto m = metrics_from_predictions(truth, constant, 2);
  EXPECT_NEAR(m.misclassification_rate, 0.5, 1e-15);
  EXPECT_EQ(m.confusion[0][1], 3u);
  EXPECT_EQ(m.confusion[1][1], 3u);
  std::size_t trace = m.confusion[0][0] + m.confusion[1][1];
  EXPECT_NEAR(m.misclassification_rate, 1.0 - trace / 6.0, 1e-15);
  const auto j = m.to_json();
  EXPECT_EQ(j.at("total"), 6);
  EXPECT_EQ(j.at("confusion").size(), 2u);
}

TEST(Log, CsvHeader) {
  std::vector<EpochLog> log{{1, 0.25, 0.1, 0.2}, {2, 0.125, 0.05, 0.1}};
  std::ostringstream out;
  write_training_log(log, out);
  EXPECT_EQ(out.str(), "epoch,train_loss,val_misclassification\n1,0.25,0.1\n2,0.125,0.05\n");
}

TEST(Train, LearnsConjunction) {
  const auto train_data = generate_synthetic(conj(), 2, 500, 0.0, 1);
  const auto test_data = generate_synthetic(conj(), 2, 500, 0.0, 2);
  TrainConfig cfg;
  cfg.seed = 1;
  const auto r = train(build_network(2, 2, {}), train_data, cfg);
  EXPECT_LE(evaluate(r.model, test_data).misclassification_rate, 0.05);
  for (const auto& p : r.model.parts()) {
    for (double a : p.alphas) EXPECT_TRUE(a >= 0 && a <= 1);
  }
}

TEST(Train, LossDropsBelowInitial) {
  const auto data = generate_synthetic(conj(), 3, 500, 0.0, 3);
  TrainConfig cfg;
  cfg.max_epochs = 50;
  cfg.patience = 1000;
  auto net = build_network(3, 2, {});
  net.set_bounds(NormalizationBounds::fit(data.features));
  const double initial = mse(net, data);
  const auto r = train(net, data, cfg);
  ASSERT_EQ(r.log.size(), 50u);
  for (const auto& e : r.log) EXPECT_TRUE(std::isfinite(e.train_loss));
  EXPECT_LT(r.log[49].train_loss, initial);
}

TEST(Train, EarlyStoppingReturnsBestSnapshot) {
  const auto data = generate_synthetic(LogicExpr::binary(0.5, LogicExpr::input(0),
                                                         LogicExpr::input(2)),
                                       4, 400, 0.15, 4);
  TrainConfig cfg;
  cfg.patience = 5;
  const auto r = train(build_network(4, 2, {}), data, cfg);
  ASSERT_FALSE(r.log.empty());
  EXPECT_LE(r.best_val_misclassification, r.log.back().val_misclassification);
  if (r.best_epoch > 0) {
    EXPECT_EQ(r.best_val_misclassification, r.log[r.best_epoch - 1].val_misclassification);
  }
  EXPECT_LE(r.log.size(), r.best_epoch + cfg.patience);
  const auto val = validation_split(data, cfg).validation;
  EXPECT_NEAR(evaluate(r.model, val).misclassification_rate, r.best_val_misclassification, 1e-12);
}

TEST(Train, Deterministic) {
  const auto data = generate_synthetic(conj(), 3, 300, 0.05, 5);
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.seed = 9;
  NetworkConfig nc;
  nc.seed = 9;
  const auto a = train(build_network(3, 2, nc), data, cfg);
  const auto b = train(build_network(3, 2, nc), data, cfg);
  EXPECT_TRUE(a.model == b.model);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].train_loss, b.log[i].train_loss);
  }
}

TEST(Train, RegularizationPullsWeightsDown) {
  const auto data = generate_synthetic(conj(), 3, 500, 0.0, 6);
  TrainConfig cfg;
  cfg.max_epochs = 200;
  cfg.patience = 1000;
  cfg.l1_regularization = 0;
  const auto free = train(build_network(3, 2, {}), data, cfg);
  cfg.l1_regularization = 0.1;
  const auto pulled = train(build_network(3, 2, {}), data, cfg);
  EXPECT_LT(median_abs_selector(pulled.model), median_abs_selector(free.model));
}

TEST(Train, Errors) {
  const auto data = generate_synthetic(conj(), 3, 100, 0.0, 7);
  EXPECT_THROW(train(build_network(4, 2, {}), data, {}), ContractError);
  auto bad = data;
  bad.features(5, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    train(build_network(3, 2, {}), bad, {});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("row"), std::string::npos);
  }
}

TEST(Train, PairedValidationSplit) {
  const auto data = generate_synthetic(conj(), 3, 200, 0.0, 8);
  TrainConfig cfg;
  cfg.seed = 4;
  const auto a = validation_split(data, cfg);
  const auto b = validation_split(data, cfg);
  EXPECT_EQ(a.validation.features, b.validation.features);
  EXPECT_EQ(a.fit.size() + a.validation.size(), data.size());
}

TEST(Baseline, MirroredWidths) {
  NetworkConfig nc;
  nc.hidden_width = 8;
  EXPECT_EQ(mirrored_widths(build_network(4, 2, nc)),
            (std::vector<std::size_t>{4, 14, 8, 44, 1}));
  EXPECT_EQ(mirrored_widths(build_network(4, 3, nc)),
            (std::vector<std::size_t>{4, 14, 8, 44, 3}));
}

TEST(Baseline, LearnsAndIsDeterministic) {
  const auto train_data = generate_synthetic(conj(), 2, 500, 0.0, 1);
  const auto test_data = generate_synthetic(conj(), 2, 500, 0.0, 2);
  TrainConfig cfg;
  const auto widths = mirrored_widths(build_network(2, 2, {}));
  const auto a = train_baseline(DenseNetwork(widths, 3), train_data, cfg);
  const auto b = train_baseline(DenseNetwork(widths, 3), train_data, cfg);
  EXPECT_EQ(a.model.weights(), b.model.weights());
  EXPECT_LE(evaluate(a.model, test_data).misclassification_rate, 0.1);
  for (const auto& layer : a.model.activations(test_data.features.row(0))) {
    for (double v : layer) EXPECT_LE(std::abs(v), 1.0);
  }
}

TEST(CrossValidation, Aggregates) {
  const auto data = generate_synthetic(conj(), 2, 100, 0.0, 10);
  TrainConfig cfg;
  cfg.max_epochs = 10;
  const auto cv = cross_validate(data, 5, cfg);
  ASSERT_EQ(cv.fold_rates.size(), 5u);
  const double mean = std::accumulate(cv.fold_rates.begin(), cv.fold_rates.end(), 0.0) / 5;
  EXPECT_NEAR(cv.mean, mean, 1e-12);
  EXPECT_GE(cv.stddev, 0.0);
  EXPECT_THROW(cross_validate(data, 1, cfg), ConfigError);
}
