#include "doctest.h"
#include "helpers.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/gradcheck.hpp"
#include "pyratext/ops.hpp"
#include "pyratext/rng.hpp"

#include <cmath>

using namespace pyratext;

TEST_CASE("matmul identity and annihilation") {
    Tape tape(false);
    Tensor eye = Tensor::matrix({{1, 0}, {0, 1}});
    Tensor b = Tensor::matrix({{3, -1}, {2.5, 7}});
    CHECK(max_abs_diff(ops::matmul(tape, eye, b), b) == 0.0);
    Tensor z = ops::matmul(tape, Tensor::zeros({1, 3}), Tensor::filled({3, 1}, 1.0));
    CHECK(z.shape() == Shape{1, 1});
    CHECK(z[0] == 0.0);
}

TEST_CASE("matmul shape mismatch names both shapes") {
    Tape tape(false);
    try {
        ops::matmul(tape, Tensor::zeros({2, 3}), Tensor::zeros({2, 3}));
        FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("2x3") != std::string::npos);
    }
}

TEST_CASE("elementwise basics") {
    Tape tape(false);
    Tensor x({3}, {-1.0, 0.0, 2.0});
    Tensor r = ops::relu(tape, x);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);
    CHECK(r[2] == 2.0);
    CHECK(max_abs_diff(ops::add(tape, x, Tensor::zeros({3})), x) == 0.0);
    CHECK_THROWS_AS(ops::add(tape, x, Tensor::zeros({2})), DimensionError);
    CHECK_THROWS_AS(ops::mul(tape, x, Tensor::zeros({3, 1})), DimensionError);
}

TEST_CASE("relu gradient is zero at exactly zero") {
    Tape tape;
    Tensor x({3}, {-1.0, 0.0, 2.0}, true);
    tape.backward(ops::sum(tape, ops::relu(tape, x)));
    CHECK(x.grad()[0] == 0.0);
    CHECK(x.grad()[1] == 0.0);
    CHECK(x.grad()[2] == 1.0);
}

TEST_CASE("softmax rows") {
    Tape tape(false);
    Tensor u = ops::softmax_rows(tape, Tensor::zeros({1, 4}));
    for (double p : u.data()) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
    Tensor s = ops::softmax_rows(tape, Tensor::matrix({{1000.0, 0.0}}));
    CHECK(std::abs(s[0] - 1.0) < 1e-12);
    CHECK(std::abs(s[1]) < 1e-12);
    CHECK(all_finite(s));
}

TEST_CASE("softmax rows sum to one on random finite input") {
    Rng rng(8);
    Tape tape(false);
    for (int trial = 0; trial < 200; ++trial) {
        Tensor x = test::random_tensor(rng, {3, 1 + rng.below(6)}, -300, 300);
        Tensor p = ops::softmax_rows(tape, x);
        for (std::size_t r = 0; r < 3; ++r) {
            double sum = 0;
            for (std::size_t c = 0; c < p.cols(); ++c) {
                CHECK(p.at(r, c) >= 0.0);
                sum += p.at(r, c);
            }
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("reductions") {
    Tape tape(false);
    Tensor c = Tensor::filled({4, 3}, 2.5);
    Tensor m = ops::mean_axis(tape, c, 0);
    for (double v : m.data()) CHECK(v == 2.5);
    const Tensor parts[] = {Tensor::zeros({2, 3}), Tensor::zeros({2, 5})};
    CHECK(ops::concat_last(tape, parts).shape() == Shape{2, 8});
    CHECK_THROWS_AS(ops::sum_axis(tape, c, 2), DimensionError);
    const Tensor bad[] = {Tensor::zeros({2, 3}), Tensor::zeros({3, 5})};
    CHECK_THROWS_AS(ops::concat_last(tape, bad), DimensionError);
}

TEST_CASE("sum_axis backward broadcasts the upstream gradient") {
    Tape tape;
    Tensor x = Tensor::filled({2, 3}, 1.0, true);
    Tensor s = ops::sum_axis(tape, x, 1); // shape (2)
    Tensor l = ops::sum(tape, ops::mul(tape, s, Tensor({2}, {1.0, -2.0})));
    tape.backward(l);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(x.grad()[c] == 1.0);
        CHECK(x.grad()[3 + c] == -2.0);
    }
}

TEST_CASE("backward semantics") {
    SUBCASE("loss = sum(x) gives ones") {
        Tape tape;
        Tensor x = Tensor::filled({2, 2}, 3.0, true);
        tape.backward(ops::sum(tape, x));
        for (double g : x.grad()) CHECK(g == 1.0);
    }
    SUBCASE("unused input gets zeros; untaped leaf stays absent") {
        Tape tape;
        Tensor x = Tensor::filled({2}, 1.0, true);
        Tensor y = Tensor::filled({2}, 1.0, true);
        Tensor z = Tensor::filled({2}, 1.0, true);
        Tensor l = ops::sum(tape, ops::add(tape, x, ops::scale(tape, y, 0.0)));
        tape.backward(l);
        for (double g : y.grad()) CHECK(g == 0.0);
        CHECK_FALSE(z.has_grad());
    }
    SUBCASE("non-scalar loss is a contract error") {
        Tape tape;
        Tensor x = Tensor::filled({2}, 1.0, true);
        Tensor y = ops::scale(tape, x, 2.0);
        CHECK_THROWS_AS(tape.backward(y), ContractError);
    }
    SUBCASE("unreachable loss is a contract error") {
        Tape tape;
        CHECK_THROWS_AS(tape.backward(Tensor::scalar(1.0)), ContractError);
    }
    SUBCASE("leaf gradients accumulate across calls") {
        Tensor x = Tensor::filled({2}, 1.0, true);
        for (int i = 0; i < 2; ++i) {
            Tape tape;
            tape.backward(ops::sum(tape, ops::scale(tape, x, 3.0)));
        }
        CHECK(x.grad()[0] == 6.0);
    }
}

TEST_CASE("tape records only when needed") {
    Tensor a = Tensor::filled({2}, 1.0);
    Tensor b = Tensor::filled({2}, 1.0, true);
    Tape tape;
    ops::add(tape, a, a);
    CHECK(tape.size() == 0);
    ops::add(tape, a, b);
    CHECK(tape.size() == 1);
    Tape off(false);
    ops::add(off, b, b);
    CHECK(off.size() == 0);
}

TEST_CASE("pool and repeat") {
    Tape tape(false);
    Tensor x = Tensor::matrix({{1}, {3}, {5}, {7}, {9}});
    Tensor p = ops::pool_rows(tape, x, 2);
    REQUIRE(p.rows() == 3);
    CHECK(p[0] == 2.0);
    CHECK(p[1] == 6.0);
    CHECK(p[2] == 9.0);
    Tensor r = ops::repeat_rows(tape, p, 2, 5);
    CHECK(r.rows() == 5);
    CHECK(r[1] == 2.0);
    CHECK(r[4] == 9.0);
    CHECK_THROWS_AS(ops::repeat_rows(tape, p, 2, 7), DimensionError);
}

TEST_CASE("gather rejects out-of-range ids") {
    Tape tape(false);
    const std::vector<std::int64_t> ids{0, 3};
    CHECK_THROWS(ops::gather_rows(tape, Tensor::zeros({3, 2}), ids));
}

TEST_CASE("determinism: identical inputs, identical bits") {
    Rng r1(4), r2(4);
    Tensor a = test::random_tensor(r1, {5, 7}), b = test::random_tensor(r2, {5, 7});
    Tape t(false);
    Tensor x = ops::softmax_rows(t, ops::matmul(t, a, ops::transpose(t, a)));
    Tensor y = ops::softmax_rows(t, ops::matmul(t, b, ops::transpose(t, b)));
    CHECK(max_abs_diff(x, y) == 0.0);
}

TEST_CASE("every op passes its finite-difference check") {
    for (const auto& r : run_gradchecks(GradScope::op)) {
        INFO(r.name << " max rel err " << r.max_rel_error);
        CHECK(r.passed());
        CHECK(r.checked > 0);
    }
}

TEST_CASE("a broken backward rule is caught and named") {
    const GradCheckCase faulty = faulty_relu_case();
    const auto results = run_gradchecks(GradScope::op, std::span<const GradCheckCase>(&faulty, 1));
    const auto it = std::find_if(results.begin(), results.end(), [](const auto& r) { return !r.passed(); });
    REQUIRE(it != results.end());
    CHECK(it->name == "faulty_relu");
    CHECK(format_gradcheck_table(results).find("faulty_relu") != std::string::npos);
}

TEST_CASE("random-input gradient property over [-2, 2]") {
    // Repeat the smooth nonlinear checks across many random draws.
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor x = test::random_tensor(rng, {2, 4}, -2, 2, true);
        Tensor w = test::random_tensor(rng, {2, 4});
        auto r1 = check_gradients("softmax", {x}, [&](Tape& t) {
            return ops::sum(t, ops::mul(t, ops::softmax_rows(t, x), w));
        }, 1e-4);
        CHECK(r1.passed());
        auto r2 = check_gradients("normalize", {x}, [&](Tape& t) {
            return ops::sum(t, ops::mul(t, ops::normalize_rows(t, x, 1e-10), w));
        }, 1e-4);
        CHECK(r2.passed());
    }
}
