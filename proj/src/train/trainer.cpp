#include "pragmarank/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>

#include "pragmarank/model/checkpoint.hpp"
#include "pragmarank/util/hash.hpp"

namespace prk {

using nlohmann::json;

void TrainConfig::validate() const {
    if (epochs == 0 || batch_size == 0 || pairs_per_kernel_per_epoch == 0)
        throw ConfigError("train config: counts must be positive");
    if (lr <= 0.0) throw ConfigError("train config: lr must be positive");
    if (alpha < 0.0) throw ConfigError("train config: alpha must be nonnegative");
    if (weight_decay < 0.0) throw ConfigError("train config: weight_decay must be nonnegative");
}

json TrainConfig::to_json() const {
    return {{"epochs", epochs},
            {"batch_size", batch_size},
            {"lr", lr},
            {"alpha", alpha},
            {"seed", seed},
            {"pairs_per_kernel_per_epoch", pairs_per_kernel_per_epoch},
            {"weight_decay", weight_decay}};
}

TrainConfig TrainConfig::from_json(const json& j) {
    TrainConfig c;
    c.epochs = j.at("epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.lr = j.at("lr").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.pairs_per_kernel_per_epoch = j.at("pairs_per_kernel_per_epoch").get<std::size_t>();
    c.weight_decay = j.at("weight_decay").get<double>();
    return c;
}

std::vector<PairSample> sample_pairs(const Dataset& ds, Split split,
                                     std::size_t budget_per_kernel, std::uint64_t seed) {
    if (budget_per_kernel == 0) throw ContractError("sample_pairs: budget must be positive");
    std::vector<PairSample> out;
    for (const auto& kid : ds.kernel_ids()) {
        auto records = ds.of(kid, split);
        if (records.size() < 2) {
            std::cerr << "warning: kernel " << kid << " has fewer than 2 records in split "
                      << split_name(split) << ", skipped\n";
            continue;
        }
        std::vector<std::pair<std::size_t, std::size_t>> all_pairs;
        for (std::size_t i = 0; i < records.size(); ++i)
            for (std::size_t j = i + 1; j < records.size(); ++j) all_pairs.emplace_back(i, j);
        std::mt19937_64 rng(fnv1a(kid, seed));
        std::shuffle(all_pairs.begin(), all_pairs.end(), rng);
        if (all_pairs.size() > budget_per_kernel) all_pairs.resize(budget_per_kernel);
        for (const auto& [i, j] : all_pairs) out.push_back({records[i], records[j]});
    }
    return out;
}

double cosine_lr(std::size_t step, std::size_t total_steps, double lr0) {
    if (step > total_steps) throw ContractError("cosine_lr: step beyond total_steps");
    if (total_steps == 0) return lr0;
    const double x = static_cast<double>(step) / static_cast<double>(total_steps);
    return lr0 * (1.0 + std::cos(std::numbers::pi * x)) / 2.0;
}

AdamW::AdamW(std::vector<Parameter*> params, double weight_decay)
    : params_(std::move(params)), weight_decay_(weight_decay) {
    for (Parameter* p : params_) {
        m_.emplace_back(p->value.rows(), p->value.cols());
        v_.emplace_back(p->value.rows(), p->value.cols());
    }
}

void AdamW::step(double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Parameter& p = *params_[i];
        if (!p.trainable) {
            p.zero_grad();
            continue;
        }
        for (std::size_t k = 0; k < p.value.size(); ++k) {
            const double g = p.grad[k];
            m_[i][k] = kBeta1 * m_[i][k] + (1.0 - kBeta1) * g;
            v_[i][k] = kBeta2 * v_[i][k] + (1.0 - kBeta2) * g * g;
            const double mhat = m_[i][k] / bc1;
            const double vhat = v_[i][k] / bc2;
            p.value[k] -= lr * (mhat / (std::sqrt(vhat) + kEps) + weight_decay_ * p.value[k]);
        }
        p.zero_grad();
    }
}

namespace {

struct BatchLoss {
    NodeId total, point, pair;
};

BatchLoss batch_forward(RankModel& model, Tape& tape, std::span<const PairSample> batch,
                        double alpha) {
    NodeId point_sum = -1, pair_sum = -1;
    for (const auto& ps : batch) {
        EncoderOutput enc_i = model.encode(tape, ps.first->graph);
        EncoderOutput enc_j = model.encode(tape, ps.second->graph);
        NdaOutput nda = model.nda_forward(tape, enc_i.H, enc_j.H);
        PairLogits logits = model.pair_head(tape, enc_i.h_G, enc_j.h_G, nda.h_diff);
        NodeId z_i = model.point_head(tape, enc_i.h_G);
        NodeId z_j = model.point_head(tape, enc_j.h_G);
        NodeId lpt = model.point_loss(tape, z_i, z_j, ps.first->y, ps.second->y);
        NodeId lpr = model.pair_loss(tape, logits, ps.first->y, ps.second->y);
        point_sum = point_sum < 0 ? lpt : tape.add(point_sum, lpt);
        pair_sum = pair_sum < 0 ? lpr : tape.add(pair_sum, lpr);
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    NodeId point_mean = tape.scale(point_sum, inv);
    NodeId pair_mean = tape.scale(pair_sum, inv);
    return {model.hybrid_loss(tape, point_mean, pair_mean, alpha), point_mean, pair_mean};
}

}  // namespace

EpochLoss train_epoch(RankModel& model, std::span<const PairSample> pairs, const TrainConfig& cfg,
                      AdamW& optimizer, std::size_t& global_step, std::size_t total_steps) {
    EpochLoss epoch;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < pairs.size(); start += cfg.batch_size) {
        const std::size_t count = std::min(cfg.batch_size, pairs.size() - start);
        Tape tape;
        BatchLoss loss = batch_forward(model, tape, pairs.subspan(start, count), cfg.alpha);
        const double total = tape.value(loss.total).item();
        const double point = tape.value(loss.point).item();
        const double pair = tape.value(loss.pair).item();
        if (!std::isfinite(total))
            throw ContractError("train_epoch: non-finite loss in batch " +
                                std::to_string(n_batches) + " (point=" + std::to_string(point) +
                                ", pair=" + std::to_string(pair) + ")");
        tape.backward(loss.total);
        optimizer.step(cosine_lr(global_step, total_steps, cfg.lr));
        ++global_step;
        epoch.total += total;
        epoch.point += point;
        epoch.pair += pair;
        ++n_batches;
    }
    if (n_batches == 0) throw ContractError("train_epoch: no pairs to train on");
    epoch.total /= static_cast<double>(n_batches);
    epoch.point /= static_cast<double>(n_batches);
    epoch.pair /= static_cast<double>(n_batches);
    return epoch;
}

EpochLoss eval_pairs(RankModel& model, std::span<const PairSample> pairs, double alpha) {
    if (pairs.empty()) throw ContractError("eval_pairs: empty pair set");
    Tape tape;
    BatchLoss loss = batch_forward(model, tape, pairs, alpha);
    return {tape.value(loss.total).item(), tape.value(loss.point).item(),
            tape.value(loss.pair).item()};
}

FitResult fit(RankModel& model, const Dataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    if (ds.of_split(Split::Train).size() < 2 || ds.of_split(Split::Val).empty())
        throw ContractError("fit: train and val splits must be non-empty");

    // validation pairs are fixed once per run
    auto val_pairs = sample_pairs(ds, Split::Val, cfg.pairs_per_kernel_per_epoch, cfg.seed ^ 0x5641ull);
    if (val_pairs.empty()) throw ContractError("fit: no validation pairs available");

    const auto probe = sample_pairs(ds, Split::Train, cfg.pairs_per_kernel_per_epoch, cfg.seed);
    const std::size_t steps_per_epoch = (probe.size() + cfg.batch_size - 1) / cfg.batch_size;
    const std::size_t total_steps = steps_per_epoch * cfg.epochs;

    AdamW optimizer(model.params().all(), cfg.weight_decay);
    std::size_t global_step = 0;

    FitResult result;
    result.best_val_loss = std::numeric_limits<double>::infinity();
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto pairs = sample_pairs(ds, Split::Train, cfg.pairs_per_kernel_per_epoch,
                                  fnv1a("epoch", cfg.seed + epoch));
        result.curve.push_back(train_epoch(model, pairs, cfg, optimizer, global_step, total_steps));

        const EpochLoss val = eval_pairs(model, val_pairs, cfg.alpha);
        if (val.total < result.best_val_loss) {
            result.best_val_loss = val.total;
            result.best_epoch = epoch;
            json meta = {{"train_config", cfg.to_json()},
                         {"best_val_loss", val.total},
                         {"epoch", epoch}};
            result.checkpoint = checkpoint_to_json(model, meta);
        }
    }
    return result;
}

void write_loss_curve(const std::filesystem::path& path, const std::vector<EpochLoss>& curve) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "epoch,total,point,pair\n";
    char buf[128];
    for (std::size_t i = 0; i < curve.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i + 1, curve[i].total,
                      curve[i].point, curve[i].pair);
        out << buf;
    }
}

std::vector<EpochLoss> read_loss_curve(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<EpochLoss> curve;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        EpochLoss e;
        std::size_t epoch;
        if (std::sscanf(line.c_str(), "%zu,%lg,%lg,%lg", &epoch, &e.total, &e.point, &e.pair) != 4)
            throw IoError("malformed loss curve row: " + line);
        curve.push_back(e);
    }
    return curve;
}

}  // namespace prk
