#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pragmarank/numerics/gradcheck.hpp"
#include "pragmarank/numerics/tape.hpp"

using namespace prk;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    Tensor t(r, c);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = d(rng);
    return t;
}

}  // namespace

TEST_CASE("matmul forward values") {
    Tape tape;
    NodeId a = tape.input(Tensor{{1, 2}});
    NodeId b = tape.input(Tensor{{3}, {4}});
    CHECK(tape.value(tape.matmul(a, b)).item() == 11.0);

    NodeId x = tape.input(Tensor{{1, 2}, {3, 4}});
    NodeId id = tape.input(Tensor::identity(2));
    CHECK(tape.value(tape.matmul(x, id)) == tape.value(x));  // exact

    CHECK_THROWS_AS(tape.matmul(a, a), DimensionError);
}

TEST_CASE("row softmax values and shift invariance") {
    Tape tape;
    NodeId a = tape.input(Tensor{{std::log(2.0), 0.0}});
    const Tensor& y = tape.value(tape.row_softmax(a));
    CHECK(y.at(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(y.at(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    std::mt19937_64 rng(5);
    Tensor x = random_tensor(4, 6, rng);
    Tensor shifted = x;
    for (std::size_t r = 0; r < shifted.rows(); ++r)
        for (std::size_t c = 0; c < shifted.cols(); ++c) shifted.at(r, c) += 100.0;

    Tape t2;
    const Tensor y1 = t2.value(t2.row_softmax(t2.input(x)));
    const Tensor y2 = t2.value(t2.row_softmax(t2.input(shifted)));
    for (std::size_t i = 0; i < y1.size(); ++i)
        CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));
    for (std::size_t r = 0; r < y1.rows(); ++r) {
        double s = 0;
        for (std::size_t c = 0; c < y1.cols(); ++c) s += y1.at(r, c);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("elementwise and reduction forward values") {
    Tape tape;
    NodeId a = tape.input(Tensor{{-1, 0, 2}});
    CHECK((tape.value(tape.relu(a)) == Tensor{{0, 0, 2}}));

    NodeId m = tape.input(Tensor{{1, 2}, {3, 4}});
    CHECK((tape.value(tape.sum_rows(m)) == Tensor{{4, 6}}));  // column sums
    CHECK(tape.value(tape.sum_all(m)).item() == 10.0);
    CHECK(tape.value(tape.mean_all(m)).item() == 2.5);
    CHECK((tape.value(tape.transpose(m)) == Tensor{{1, 3}, {2, 4}}));
    CHECK((tape.value(tape.concat_cols(a, a)) == Tensor{{-1, 0, 2, -1, 0, 2}}));

    NodeId b = tape.input(Tensor{{10, 20}});
    CHECK((tape.value(tape.add_rowvec(m, b)) == Tensor{{11, 22}, {13, 24}}));
    CHECK((tape.value(tape.scale(m, 2.0)) == Tensor{{2, 4}, {6, 8}}));
}

TEST_CASE("softmax cross-entropy forward matches the closed form") {
    Tape tape;
    NodeId z = tape.input(Tensor{{0.0, 0.0}});
    // uniform softmax: loss is ln 2 for either class
    CHECK(tape.value(tape.softmax_xent(z, 0)).item() == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(tape.softmax_xent(z, 2), ContractError);
}

TEST_CASE("backward on a hand-worked composite") {
    // f = sum(relu(x) ⊙ x): df/dx = 2x where x > 0, 0 elsewhere
    Tape tape;
    NodeId x = tape.input(Tensor{{-1.0, 2.0, 3.0}});
    NodeId f = tape.sum_all(tape.hadamard(tape.relu(x), x));
    tape.backward(f);
    CHECK((tape.grad(x) == Tensor{{0.0, 4.0, 6.0}}));
}

TEST_CASE("backward accumulates into parameter grads") {
    ParamStore store;
    Parameter& w = store.create("w", 2, 2);
    w.value = Tensor{{1, 2}, {3, 4}};

    Tape tape;
    NodeId loss = tape.sum_all(tape.matmul(tape.input(Tensor{{1, 1}}), tape.param(w)));
    tape.backward(loss);
    CHECK((w.grad == Tensor{{1, 1}, {1, 1}}));

    CHECK_THROWS_AS(tape.backward(loss), ContractError);  // one backward per tape
}

TEST_CASE("backward requires a scalar loss") {
    Tape tape;
    NodeId x = tape.input(Tensor{{1, 2}});
    CHECK_THROWS_AS(tape.backward(x), ContractError);
}

TEST_CASE("finite differences confirm every primitive's gradient") {
    std::mt19937_64 rng(21);
    Tensor x = random_tensor(3, 4, rng);
    Tensor w = random_tensor(4, 2, rng);
    Tensor rowv = random_tensor(1, 4, rng);

    auto check = [&](const ScalarTapeFn& f, const Tensor& at) {
        CHECK(finite_diff_check(f, at, 1e-6) <= 1e-7);
    };

    check([&](Tape& t, NodeId in) { return t.sum_all(t.matmul(in, t.input(w))); }, x);
    check([&](Tape& t, NodeId in) { return t.sum_all(t.relu(in)); },
          random_tensor(3, 4, rng));
    check([&](Tape& t, NodeId in) { return t.sum_all(t.row_softmax(in)); }, x);
    const Tensor offset = random_tensor(3, 4, rng);
    check([&](Tape& t, NodeId in) {
        return t.sum_all(t.hadamard(in, t.add(in, t.input(offset))));
    }, x);
    check([&](Tape& t, NodeId in) { return t.mean_all(t.transpose(in)); }, x);
    check([&](Tape& t, NodeId in) { return t.sum_all(t.sum_rows(in)); }, x);
    check([&](Tape& t, NodeId in) { return t.sum_all(t.concat_cols(in, t.scale(in, 3.0))); }, x);
    check([&](Tape& t, NodeId in) { return t.sum_all(t.add_rowvec(in, t.input(rowv))); }, x);
    check([&](Tape& t, NodeId in) { return t.softmax_xent(in, 1); }, random_tensor(1, 3, rng));
    check([&](Tape& t, NodeId in) {
        // two consumers of the same node: gradient must sum over both paths
        NodeId h = t.relu(in);
        return t.add(t.sum_all(t.hadamard(h, h)), t.mean_all(h));
    }, x);
}

TEST_CASE("finite_diff_check rejects a non-positive step") {
    CHECK_THROWS_AS(
        finite_diff_check([](Tape& t, NodeId in) { return t.sum_all(in); }, Tensor(2, 2, 1.0), 0.0),
        ContractError);
}

TEST_CASE("backward is bit-deterministic") {
    std::mt19937_64 rng(31);
    Tensor x = random_tensor(5, 5, rng);
    Tensor w = random_tensor(5, 5, rng);

    auto run = [&]() {
        Tape t;
        NodeId in = t.input(x);
        NodeId h = t.relu(t.matmul(in, t.input(w)));
        t.backward(t.sum_all(t.hadamard(h, in)));
        return t.grad(in);
    };
    CHECK(run() == run());
}
