#include "thermovis/training/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "thermovis/core/error.hpp"
#include "thermovis/core/random.hpp"
#include "thermovis/model/image_tensor.hpp"
#include "thermovis/training/adam.hpp"
#include "thermovis/training/checkpoint.hpp"
#include "thermovis/training/loss.hpp"
#include "thermovis/training/schedule.hpp"

namespace thermovis {
namespace {

void check_set(const PairedData& data, const char* what) {
    if (data.size() == 0) throw Error(ErrorCode::invalid_argument, std::string("empty ") + what + " set");
    if (data.visible.size() != data.thermal.size()) {
        throw Error(ErrorCode::invalid_argument, std::string(what) + " set: visible/thermal counts differ");
    }
}

Tensor<float> gather(const std::vector<Image>& images, const std::vector<std::size_t>& idx) {
    std::vector<const Image*> ptrs;
    ptrs.reserve(idx.size());
    for (std::size_t i : idx) ptrs.push_back(&images[i]);
    return to_tensor(ptrs);
}

}  // namespace

double evaluate_loss(const Model& model, const PairedData& data, int chunk) {
    check_set(data, "evaluation");
    double sum = 0.0;
    std::size_t elements = 0;
    for (std::size_t start = 0; start < data.size(); start += static_cast<std::size_t>(chunk)) {
        std::vector<std::size_t> idx(std::min<std::size_t>(static_cast<std::size_t>(chunk), data.size() - start));
        std::iota(idx.begin(), idx.end(), start);
        const Tensor<float> pred = model.forward(gather(data.visible, idx));
        const Tensor<float> target = gather(data.thermal, idx);
        sum += mse_loss(pred, target) * static_cast<double>(pred.data.size());
        elements += pred.data.size();
    }
    return sum / static_cast<double>(elements);
}

TrainResult train(Model& model, const PairedData& train_set, const PairedData& validation_set,
                  const TrainConfig& cfg, const TrainOptions& options) {
    cfg.validate();
    check_set(train_set, "training");
    check_set(validation_set, "validation");

    Adam adam(model.parameters(), cfg.beta1, cfg.beta2, cfg.epsilon);
    PlateauScheduler scheduler(cfg.learning_rate, cfg.plateau_patience, cfg.min_improvement);
    TrainResult result;
    result.best_validation_loss = std::numeric_limits<double>::infinity();

    const bool persist = !options.checkpoint_dir.empty();
    const auto last_path = options.checkpoint_dir / "last.tvck";
    const auto best_path = options.checkpoint_dir / "best.tvws";
    if (persist) std::filesystem::create_directories(options.checkpoint_dir);

    if (persist && options.resume && std::filesystem::exists(last_path)) {
        Checkpoint ck = Checkpoint::read(last_path);
        load_weights(model, ck.weights);
        adam.set_state(std::move(ck.optimizer));
        scheduler.set_state(ck.scheduler);
        result.history = std::move(ck.history);
        result.best_validation_loss = ck.best_validation_loss;
        result.best_weights = WeightStore::read(best_path);
    }

    auto done = [&] {
        const int epoch = static_cast<int>(result.history.epochs.size());
        return epoch >= cfg.max_epochs || scheduler.learning_rate() < cfg.early_stop_lr;
    };

    const std::size_t n = train_set.size();
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    const auto micro = static_cast<std::size_t>(cfg.effective_micro_batch());
    const double per_sample = static_cast<double>(train_set.thermal.front().size());

    while (!done()) {
        const int epoch = static_cast<int>(result.history.epochs.size()) + 1;
        if (options.stop_after_epoch > 0 && epoch > options.stop_after_epoch) return result;
        const auto t0 = std::chrono::steady_clock::now();
        const double lr = scheduler.learning_rate();

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);

        double loss_sum = 0.0;
        for (std::size_t b = 0; b < n; b += batch) {
            const std::size_t b_end = std::min(n, b + batch);
            const double scale = 1.0 / (static_cast<double>(b_end - b) * per_sample);
            double batch_loss = 0.0;
            model.zero_grad();
            for (std::size_t m = b; m < b_end; m += micro) {
                const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(m),
                                                   order.begin() + static_cast<std::ptrdiff_t>(std::min(b_end, m + micro)));
                const Tensor<float> x = gather(train_set.visible, idx);
                const Tensor<float> y = gather(train_set.thermal, idx);
                const Tensor<float> pred = model.forward_train(x);
                batch_loss += mse_loss(pred, y) * static_cast<double>(idx.size());
                model.backward(mse_gradient(pred, y, scale));
            }
            if (!std::isfinite(batch_loss)) {
                throw Error(ErrorCode::non_finite,
                            "non-finite training loss in epoch " + std::to_string(epoch) + ", batch " +
                                std::to_string(b / batch + 1) + "; last good checkpoint: " +
                                (persist && std::filesystem::exists(last_path) ? last_path.string()
                                                                               : std::string("none")));
            }
            loss_sum += batch_loss;
            adam.step(lr);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(n);
        rec.validation_loss = evaluate_loss(model, validation_set, cfg.effective_micro_batch());
        rec.learning_rate = lr;
        if (!std::isfinite(rec.validation_loss)) {
            throw Error(ErrorCode::non_finite, "non-finite validation loss in epoch " + std::to_string(epoch));
        }
        scheduler.observe(rec.validation_loss);
        if (rec.validation_loss < result.best_validation_loss) {
            result.best_validation_loss = rec.validation_loss;
            result.best_weights = save_weights(model);
            if (persist) result.best_weights.write(best_path);
        }
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.history.epochs.push_back(rec);

        if (persist) {
            Checkpoint ck;
            ck.weights = save_weights(model);
            ck.optimizer = adam.state();
            ck.scheduler = scheduler.state();
            ck.best_validation_loss = result.best_validation_loss;
            ck.history = result.history;
            ck.write(last_path);
        }
        if (options.on_epoch) options.on_epoch(rec);
    }
    result.finished = true;
    return result;
}

}  // namespace thermovis
