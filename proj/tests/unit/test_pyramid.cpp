#include "doctest.h"
#include "helpers.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/gradcheck.hpp"
#include "pyratext/model.hpp"
#include "pyratext/ops.hpp"
#include "pyratext/pyramid.hpp"

#include <cmath>

using namespace pyratext;

namespace {

LayerStates random_states(Rng& rng, std::size_t levels, std::size_t n, std::size_t d) {
    LayerStates s;
    for (std::size_t l = 0; l < levels; ++l) s.layers.push_back(test::random_tensor(rng, {n, d}));
    return s;
}

PyramidParams random_pyramid(std::size_t levels, std::size_t d_h, std::size_t d_p, std::uint64_t seed) {
    PyramidParams p = PyramidParams::shaped(levels, d_h, d_p);
    ParamSet set;
    p.register_into(set, "");
    init_params(set, seed);
    return p;
}

} // namespace

TEST_CASE("downscale") {
    Tape tape(false);
    Tensor h = Tensor::matrix({{1, 10}, {3, 20}, {5, 30}, {7, 40}});
    CHECK(max_abs_diff(downscale(tape, h, 1), h) == 0.0);
    Tensor d = downscale(tape, h, 2);
    CHECK(max_abs_diff(d, Tensor::matrix({{2, 15}, {6, 35}})) == 0.0);
    Tensor h5 = Tensor::matrix({{1}, {2}, {3}, {4}, {9}});
    Tensor d5 = downscale(tape, h5, 2);
    REQUIRE(d5.rows() == 3);
    CHECK(d5[2] == 9.0);
}

TEST_CASE("up") {
    Tape tape(false);
    Tensor f = Tensor::matrix({{1, 2}, {3, 4}});
    CHECK(max_abs_diff(up(tape, f, 1, 2), f) == 0.0);
    Tensor u = up(tape, f, 2, 4);
    CHECK(max_abs_diff(u, Tensor::matrix({{1, 2}, {1, 2}, {3, 4}, {3, 4}})) == 0.0);
    CHECK_THROWS_AS(up(tape, f, 2, 6), DimensionError);
}

TEST_CASE("down of up is the identity on exact multiples") {
    Rng rng(12);
    Tape tape(false);
    for (std::size_t s : {1u, 2u, 4u, 8u}) {
        Tensor f = test::random_tensor(rng, {5, 3});
        CHECK(max_abs_diff(downscale(tape, up(tape, f, s, 5 * s), s), f) < 1e-12);
    }
}

TEST_CASE("level sizes follow ceil(n / 2^(l-1))") {
    Rng rng(1);
    Tape tape(false);
    for (std::size_t levels = 1; levels <= 4; ++levels) {
        PyramidParams p = random_pyramid(levels, 3, 2, levels);
        for (std::size_t n = 1; n <= 64; ++n) {
            const auto out = top_down_fuse(tape, random_states(rng, levels, n, 3), p);
            REQUIRE(out.size() == levels);
            for (std::size_t l = 1; l <= levels; ++l) {
                const std::size_t expect = (n + (std::size_t{1} << (l - 1)) - 1) >> (l - 1);
                CHECK(out[l - 1].level == l);
                CHECK(out[l - 1].features.rows() == expect);
                CHECK(out[l - 1].features.rows() == level_rows(n, l));
            }
            CHECK(fuse_all(tape, out, p.fuse).shape() == Shape{n, 2});
        }
    }
}

TEST_CASE("single level") {
    Rng rng(2);
    Tape tape(false);
    PyramidParams p = random_pyramid(1, 4, 3, 9);
    LayerStates s = random_states(rng, 1, 5, 4);
    const auto levels = top_down_fuse(tape, s, p);
    Tensor expect = ops::relu(tape, ops::matmul(tape, s.layers[0], p.lateral[0]));
    CHECK(max_abs_diff(levels[0].features, expect) == 0.0);
    Tensor fused = fuse_all(tape, levels, p.fuse);
    CHECK(fused.shape() == Shape{5, 3});
    CHECK(max_abs_diff(fused, ops::relu(tape, ops::matmul(tape, expect, p.fuse))) == 0.0);
}

TEST_CASE("zero upper path identity") {
    Tape tape(false);
    Rng rng(3);
    PyramidParams p = PyramidParams::shaped(2, 3, 4);
    // identity-padded 3x4 lateral weights
    for (auto& w : p.lateral)
        for (std::size_t i = 0; i < 3; ++i) w.at(i, i) = 1.0;
    LayerStates s;
    s.layers = {test::random_tensor(rng, {5, 3}), Tensor::zeros({5, 3})};
    const auto levels = top_down_fuse(tape, s, p, Activation::identity);
    for (double v : levels[1].features.data()) CHECK(v == 0.0);
    for (std::size_t r = 0; r < 5; ++r) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(levels[0].features.at(r, c) == s.layers[0].at(r, c));
        CHECK(levels[0].features.at(r, 3) == 0.0);
    }
}

TEST_CASE("hand-evaluated two-level case") {
    // n=2, d_h=d_p=2. Level 2 pools both rows: [1.25, 0]; times W^2 gives
    // [2.5, 1.25]. Level 1: H^1 W^1 = [[1,-2],[3,-4]] plus the repeated upper
    // row gives [[3.5,-0.75],[5.5,-2.75]], relu -> [[3.5,0],[5.5,0]].
    Tape tape(false);
    PyramidParams p = PyramidParams::shaped(2, 2, 2);
    p.lateral[0] = Tensor::matrix({{1, 0}, {0, -1}});
    p.lateral[1] = Tensor::matrix({{2, 1}, {0, 1}});
    LayerStates s;
    s.layers = {Tensor::matrix({{1, 2}, {3, 4}}), Tensor::matrix({{0.5, -1}, {2, 1}})};
    const auto levels = top_down_fuse(tape, s, p);
    CHECK(max_abs_diff(levels[1].features, Tensor::matrix({{2.5, 1.25}})) == 0.0);
    CHECK(max_abs_diff(levels[0].features, Tensor::matrix({{3.5, 0}, {5.5, 0}})) == 0.0);
}

TEST_CASE("concat width is L * d_p") {
    Rng rng(4);
    Tape tape(false);
    PyramidParams p = random_pyramid(3, 4, 5, 2);
    CHECK(p.fuse.shape() == Shape{15, 5});
    const auto levels = top_down_fuse(tape, random_states(rng, 3, 6, 4), p);
    CHECK_THROWS_AS(fuse_all(tape, levels, Tensor::zeros({10, 5})), DimensionError);
}

TEST_CASE("dimension mismatch") {
    Rng rng(5);
    Tape tape(false);
    PyramidParams p = random_pyramid(2, 4, 5, 2);
    CHECK_THROWS_AS(top_down_fuse(tape, random_states(rng, 2, 6, 3), p), DimensionError);
    CHECK_THROWS_AS(top_down_fuse(tape, random_states(rng, 3, 6, 4), p), DimensionError);
}

TEST_CASE("every pyramid weight receives a gradient") {
    Rng rng(6);
    PyramidParams p = random_pyramid(3, 16, 16, 7);
    LayerStates s = random_states(rng, 3, 9, 16);
    Tensor w = test::random_tensor(rng, {9, 16});
    Tape tape;
    Tensor f = fuse_all(tape, top_down_fuse(tape, s, p), p.fuse);
    tape.backward(ops::sum(tape, ops::mul(tape, f, w)));
    auto nonzero = [](const Tensor& t) {
        double m = 0;
        for (double g : t.grad()) m += std::abs(g);
        return t.has_grad() && m > 0;
    };
    for (const auto& lw : p.lateral) CHECK(nonzero(lw));
    CHECK(nonzero(p.fuse));
}

TEST_CASE("pyramid gradients match finite differences") {
    for (const auto& r : run_gradchecks(GradScope::module))
        if (r.name == "pyramid") CHECK(r.passed());
}
