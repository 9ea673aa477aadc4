#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "pragmarank/model/checkpoint.hpp"
#include "pragmarank/train/trainer.hpp"

using namespace prk;

namespace {

ModelConfig tiny_model() {
    ModelConfig cfg;
    cfg.encoder.layers = 1;
    cfg.encoder.hidden_dim = 6;
    cfg.encoder.pragma_mlp_dims = {6};
    return cfg;
}

Dataset tiny_dataset(std::size_t per_kernel = 20) {
    std::vector<GeneratedKernel> kernels = {gen_kernel(1, SizeProfile::Small),
                                            gen_kernel(2, SizeProfile::Small)};
    return build_dataset(kernels, per_kernel, {0.6, 0.2, 0.2}, 77);
}

}  // namespace

TEST_CASE("cosine schedule boundary values") {
    CHECK(cosine_lr(0, 100, 0.4) == 0.4);
    CHECK(cosine_lr(100, 100, 0.4) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cosine_lr(50, 100, 0.4) == doctest::Approx(0.2).epsilon(1e-12));
    // monotone decreasing
    double prev = cosine_lr(0, 10, 1.0);
    for (std::size_t s = 1; s <= 10; ++s) {
        const double cur = cosine_lr(s, 10, 1.0);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK_THROWS_AS(cosine_lr(11, 10, 1.0), ContractError);
}

TEST_CASE("pair sampling is deterministic, same-kernel, and budget-bounded") {
    Dataset ds = tiny_dataset();
    auto a = sample_pairs(ds, Split::Train, 5, 3);
    auto b = sample_pairs(ds, Split::Train, 5, 3);
    REQUIRE(a.size() == b.size());
    CHECK(a.size() <= 2 * 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first == b[i].first);
        CHECK(a[i].second == b[i].second);
    }
    for (const auto& p : a) {
        CHECK(p.first->graph.kernel_id() == p.second->graph.kernel_id());
        CHECK(p.first != p.second);
        CHECK(p.first->split == Split::Train);
    }

    auto c = sample_pairs(ds, Split::Train, 5, 4);
    bool differs = false;
    for (std::size_t i = 0; i < std::min(a.size(), c.size()); ++i)
        if (a[i].first != c[i].first || a[i].second != c[i].second) differs = true;
    CHECK(differs);

    // without replacement within one draw
    auto big = sample_pairs(ds, Split::Train, 10000, 3);
    std::set<std::pair<const DatasetRecord*, const DatasetRecord*>> seen;
    for (const auto& p : big) CHECK(seen.insert({p.first, p.second}).second);

    CHECK_THROWS_AS(sample_pairs(ds, Split::Train, 0, 3), ContractError);
}

TEST_CASE("adamw drives a quadratic to its minimum and zeroes grads") {
    ParamStore store;
    Parameter& p = store.create("p", 1, 1);
    p.value[0] = -4.0;
    AdamW opt({&p}, 0.0);

    for (int i = 0; i < 400; ++i) {
        Tape tape;
        NodeId x = tape.param(p);
        NodeId err = tape.sub(x, tape.input(Tensor::scalar(3.0)));
        tape.backward(tape.hadamard(err, err));
        opt.step(0.05);
        CHECK(p.grad[0] == 0.0);
    }
    CHECK(p.value[0] == doctest::Approx(3.0).epsilon(1e-2));
}

TEST_CASE("zero learning rate with zero weight decay is a no-op") {
    RankModel model(tiny_model(), 4);
    std::vector<Tensor> before;
    for (Parameter* p : model.params().all()) before.push_back(p->value);

    AdamW opt(model.params().all(), 0.0);
    for (Parameter* p : model.params().all()) p->grad.fill(1.0);
    opt.step(0.0);

    auto params = model.params().all();
    for (std::size_t i = 0; i < params.size(); ++i) CHECK((params[i]->value == before[i]));
}

TEST_CASE("checkpoint round trip restores parameters bit-exactly") {
    RankModel model(tiny_model(), 123);
    nlohmann::json meta = {{"note", "unit"}};
    nlohmann::json j = checkpoint_to_json(model, meta);

    nlohmann::json meta_out;
    RankModel back = checkpoint_from_json(j, &meta_out);
    CHECK(meta_out.at("note") == "unit");

    auto pa = model.params().all();
    auto pb = back.params().all();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i]->name == pb[i]->name);
        CHECK((pa[i]->value == pb[i]->value));
    }

    // corrupt a name: the loader must notice
    nlohmann::json bad = j;
    bad["params"][0]["name"] = "no/such/param";
    CHECK_THROWS_AS(checkpoint_from_json(bad), SchemaError);
}

TEST_CASE("fit learns on a small dataset and records the best epoch") {
    Dataset ds = tiny_dataset(40);
    RankModel model(tiny_model(), 5);
    TrainConfig cfg;
    cfg.epochs = 12;
    cfg.batch_size = 8;
    cfg.pairs_per_kernel_per_epoch = 16;
    cfg.seed = 11;

    FitResult r = fit(model, ds, cfg);
    REQUIRE(r.curve.size() == cfg.epochs);
    CHECK(r.best_epoch >= 1);
    CHECK(r.best_epoch <= cfg.epochs);
    CHECK(std::isfinite(r.best_val_loss));
    CHECK(!r.checkpoint.empty());
    // optimization moves the loss
    CHECK(r.curve.back().total < r.curve.front().total);
}

TEST_CASE("fit is deterministic in its seeds") {
    Dataset ds = tiny_dataset(30);
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.batch_size = 8;
    cfg.pairs_per_kernel_per_epoch = 8;
    cfg.seed = 21;

    RankModel m1(tiny_model(), 9);
    RankModel m2(tiny_model(), 9);
    FitResult r1 = fit(m1, ds, cfg);
    FitResult r2 = fit(m2, ds, cfg);
    REQUIRE(r1.curve.size() == r2.curve.size());
    for (std::size_t i = 0; i < r1.curve.size(); ++i) {
        CHECK(r1.curve[i].total == r2.curve[i].total);
        CHECK(r1.curve[i].point == r2.curve[i].point);
        CHECK(r1.curve[i].pair == r2.curve[i].pair);
    }
    CHECK(r1.checkpoint == r2.checkpoint);
}

TEST_CASE("loss curve csv round trip") {
    std::vector<EpochLoss> curve = {{1.5, 1.0, 0.5}, {0.75, 0.5, 0.25}};
    const auto path = std::filesystem::temp_directory_path() / "prk_test_curve.csv";
    write_loss_curve(path, curve);
    auto back = read_loss_curve(path);
    std::filesystem::remove(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].total == 1.5);
    CHECK(back[1].pair == 0.25);
}

TEST_CASE("train config validation and json round trip") {
    TrainConfig cfg;
    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.lr = 0.01;
    cfg.alpha = 2.5;
    TrainConfig back = TrainConfig::from_json(cfg.to_json());
    CHECK(back.alpha == 2.5);
    CHECK(back.lr == 0.01);
    CHECK(back.epochs == cfg.epochs);
}
