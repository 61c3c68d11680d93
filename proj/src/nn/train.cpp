#include "fibereq/nn/train.hpp"

#include <bit>
#include <numeric>
#include <string>

#include "fibereq/errors.hpp"
#include "fibereq/nn/backprop.hpp"

namespace fibereq::nn {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("train: patience must be >= 1");
}

Evaluation evaluate(const BiLstmModel& model, const WindowDataset& data, int batch_size) {
  if (data.word_length != model.word_length)
    throw ShapeError("evaluate: dataset word length " + std::to_string(data.word_length) +
                     " differs from model word length " + std::to_string(model.word_length));
  Evaluation ev;
  const std::size_t n = data.n_windows();
  if (n == 0) return ev;
  BiLstmEngine engine;
  std::vector<std::size_t> idx;
  double loss_sum = 0.0;
  std::uint64_t correct = 0;
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
    const std::size_t stop = std::min(n, start + static_cast<std::size_t>(batch_size));
    idx.resize(stop - start);
    std::iota(idx.begin(), idx.end(), start);
    const auto batch = make_batch(data, idx);
    const auto out = engine.evaluate(model.params, batch);
    loss_sum += out.loss * static_cast<double>(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const std::size_t c = data.central_index(idx[j]);
      const unsigned ex = out.central_x[j] ^ data.labels_x[c];
      const unsigned ey = out.central_y[j] ^ data.labels_y[c];
      ev.count.bit_errors += static_cast<std::uint64_t>(std::popcount(ex) + std::popcount(ey));
      ev.count.symbol_errors += (ex != 0) + (ey != 0);
      correct += (ex == 0) + (ey == 0);
    }
  }
  ev.count.symbols = 2 * n;
  ev.count.bits = 4 * ev.count.symbols;
  ev.loss = loss_sum / static_cast<double>(n);
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(ev.count.symbols);
  return ev;
}

DecisionCount evaluate_ber(const BiLstmModel& model, const WindowDataset& test_set) {
  return evaluate(model, test_set).count;
}

TrainResult train(const WindowDataset& train_set, const WindowDataset& val_set, BiLstmModel init,
                  const TrainConfig& cfg, Rng& shuffle_rng, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.n_windows() == 0) throw ConfigError("train: empty training split");
  if (val_set.n_windows() == 0) throw ConfigError("train: empty validation split");
  if (train_set.word_length != init.word_length || val_set.word_length != init.word_length)
    throw ConfigError("train: word length of data and model differ");

  TrainResult result{init, {}};
  BiLstmModel current = std::move(init);
  AdamState adam(current.hidden_size, cfg.adam);
  BiLstmEngine engine;
  BiLstmParams grad(current.hidden_size);

  std::vector<std::size_t> order(train_set.n_windows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  bool have_best = false;
  double restored_loss = 0.0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t stop = std::min(order.size(), start + bs);
      const auto batch = make_batch(train_set, std::span(order).subspan(start, stop - start));
      loss_sum += engine.loss_and_gradients(current.params, batch, grad) * static_cast<double>(stop - start);
      adam_step(current.params, grad, adam);
    }
    const auto val = evaluate(current, val_set);
    EpochRecord rec{epoch, loss_sum / static_cast<double>(order.size()), val.loss, val.accuracy};
    result.history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);

    auto& h = result.history;
    const bool better = !have_best || val.accuracy > h.best_val_accuracy;
    // Among epochs tied at the best accuracy, keep the lowest validation loss.
    if (better || (val.accuracy == h.best_val_accuracy && val.loss < restored_loss)) {
      if (better) {
        h.best_val_accuracy = val.accuracy;
        h.best_epoch = epoch;
      }
      have_best = true;
      restored_loss = val.loss;
      h.restored_epoch = epoch;
      result.model = current;
    }
    if (epoch - h.best_epoch >= cfg.patience) {
      h.early_stopped = true;
      break;
    }
  }
  return result;
}

}  // namespace fibereq::nn
