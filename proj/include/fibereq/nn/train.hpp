#pragma once

#include <functional>
#include <vector>

#include "fibereq/nn/adam.hpp"
#include "fibereq/nn/dataset.hpp"
#include "fibereq/nn/model.hpp"
#include "fibereq/rng.hpp"
#include "fibereq/txrx.hpp"

namespace fibereq::nn {

struct TrainConfig {
  int batch_size = 512;
  int max_epochs = 400;
  int patience = 20;  // epochs without a validation-accuracy improvement
  AdamHyper adam;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;  // central-symbol accuracy over both heads
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // first epoch reaching the best validation accuracy
  int restored_epoch = 0;  // lowest validation loss among epochs at that accuracy
  double best_val_accuracy = 0.0;
  bool early_stopped = false;
};

struct TrainResult {
  BiLstmModel model;  // parameters of history.restored_epoch
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch Adam over windows reshuffled every epoch by `shuffle_rng`.
// Stops `patience` epochs after the last strict validation-accuracy gain.
TrainResult train(const WindowDataset& train_set, const WindowDataset& val_set, BiLstmModel init,
                  const TrainConfig& cfg, Rng& shuffle_rng, const EpochCallback& on_epoch = {});

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  DecisionCount count;  // central symbols only, Gray-coded bit errors
};

// Central-symbol decisions for every window of the dataset.
Evaluation evaluate(const BiLstmModel& model, const WindowDataset& data, int batch_size = 1024);

// BER and symbol error rate of the central symbols.
DecisionCount evaluate_ber(const BiLstmModel& model, const WindowDataset& test_set);

}  // namespace fibereq::nn
