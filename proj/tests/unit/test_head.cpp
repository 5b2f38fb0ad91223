#include "doctest.h"

#include "fixtures.hpp"
#include "pyratext/errors.hpp"
#include "pyratext/gradcheck.hpp"
#include "pyratext/head.hpp"
#include "pyratext/ops.hpp"

#include <cmath>

using namespace pyratext;

TEST_CASE("readout is the node mean") {
    Tape tape(false);
    Tensor one = Tensor::matrix({{3, -1, 2}});
    CHECK(max_abs_diff(readout(tape, one), one) == 0.0);
    Tensor z = readout(tape, Tensor::matrix({{1, 0}, {0, 1}}));
    CHECK(z.shape() == Shape{1, 2});
    CHECK(z[0] == 0.5);
    CHECK(z[1] == 0.5);
}

TEST_CASE("readout is permutation invariant") {
    Rng rng(1);
    Tape tape(false);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(10);
        Tensor h = fixtures::random_matrix(rng, n, 4);
        const auto perm = fixtures::random_permutation(rng, n);
        CHECK(max_abs_diff(readout(tape, h), readout(tape, fixtures::permute_rows(h, perm))) < 1e-12);
    }
}

TEST_CASE("classify") {
    ClassifierParams p = ClassifierParams::shaped(3, 4);
    Prediction pr = classify(Tensor::matrix({{1, 2, 3}}), p);
    for (double q : pr.probs) CHECK(q == 0.25);
    CHECK(pr.predicted_class == 0);

    Prediction two = predict_from_logits(Tensor::matrix({{1, 2}}));
    CHECK(std::abs(two.probs[0] - 0.26894142) < 1e-8);
    CHECK(std::abs(two.probs[1] - 0.73105858) < 1e-8);
    CHECK(two.predicted_class == 1);
}

TEST_CASE("softmax shift invariance and distribution laws") {
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        Tensor logits = fixtures::random_matrix(rng, 1, 5, -10, 10);
        Tensor shifted = logits.clone();
        const double k = rng.uniform(-50, 50);
        for (auto& v : shifted.data()) v += k;
        Prediction a = predict_from_logits(logits), b = predict_from_logits(shifted);
        double sum = 0;
        for (std::size_t c = 0; c < 5; ++c) {
            CHECK(std::abs(a.probs[c] - b.probs[c]) < 1e-12);
            CHECK(a.probs[c] >= 0.0);
            sum += a.probs[c];
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
        CHECK(a.predicted_class == b.predicted_class);
    }
}

TEST_CASE("argmax ties go to the lowest index") {
    const std::vector<double> v{0.1, 0.4, 0.4, 0.1};
    CHECK(argmax(v) == 1);
}

TEST_CASE("cross entropy values") {
    Tape tape(false);
    CHECK(std::abs(cross_entropy(tape, Tensor::zeros({1, 4}), 2).item() - 1.38629436) < 1e-8);
    CHECK(cross_entropy(tape, Tensor::matrix({{0, 60}}), 1).item() < 1e-25);
    CHECK(cross_entropy(tape, Tensor::matrix({{1000, 0}}), 1).item() == doctest::Approx(1000.0));
    CHECK_THROWS_AS(cross_entropy(tape, Tensor::zeros({1, 4}), 4), ContractError);
}

TEST_CASE("cross entropy gradient is probs minus one-hot") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        Tensor z = fixtures::random_matrix(rng, 1, 4, -3, 3);
        z.set_requires_grad(true);
        const std::size_t label = rng.below(4);
        Tape tape;
        tape.backward(cross_entropy(tape, z, label));
        const Prediction p = predict_from_logits(z);
        for (std::size_t c = 0; c < 4; ++c)
            CHECK(std::abs(z.grad()[c] - (p.probs[c] - (c == label ? 1.0 : 0.0))) < 1e-12);
        z.clear_grad();
        auto r = check_gradients("ce", {z}, [&](Tape& t) { return cross_entropy(t, z, label); }, 1e-6);
        CHECK(r.passed());
    }
}

TEST_CASE("readout of nothing is a contract error") {
    Tape tape(false);
    // A rank-1 tensor is not a node-state matrix.
    CHECK_THROWS(readout(tape, Tensor::zeros({3})));
}

TEST_CASE("class logits dimension check") {
    Tape tape(false);
    ClassifierParams p = ClassifierParams::shaped(3, 2);
    CHECK_THROWS_AS(class_logits(tape, Tensor::zeros({1, 4}), p), DimensionError);
}

TEST_CASE("head gradients match finite differences") {
    for (const auto& r : run_gradchecks(GradScope::module))
        if (r.name == "head") CHECK(r.passed());
}
