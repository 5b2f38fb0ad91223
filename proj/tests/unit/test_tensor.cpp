#include "doctest.h"
#include "helpers.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/rng.hpp"
#include "pyratext/tensor.hpp"
#include "pyratext/tensor_io.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

using namespace pyratext;

TEST_CASE("tensor shape rules") {
    Tensor t = Tensor::zeros({2, 3, 4});
    CHECK(t.numel() == 24);
    CHECK(t.rank() == 3);
    CHECK(shape_numel(t.shape()) == t.data().size());
    CHECK_THROWS_AS(Tensor({2, 0}, {}), DimensionError);
    CHECK_THROWS_AS(Tensor({1, 1, 1, 1}, {1.0}), DimensionError);
    CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("copies alias, clone does not") {
    Tensor a = Tensor::filled({2}, 1.0);
    Tensor b = a;
    b[0] = 5.0;
    CHECK(a[0] == 5.0);
    Tensor c = a.clone();
    c[1] = 9.0;
    CHECK(a[1] == 1.0);
    CHECK(a.same(b));
    CHECK_FALSE(a.same(c));
}

TEST_CASE("gradient buffer matches data length") {
    Tensor a = Tensor::zeros({3, 2}, true);
    CHECK_FALSE(a.has_grad());
    CHECK(a.grad_mut().size() == a.numel());
    a.clear_grad();
    CHECK_FALSE(a.has_grad());
}

TEST_CASE("tensor binary layout") {
    Tensor t = Tensor::matrix({{1.5, -2.0}, {0.25, 8.0}});
    const auto bytes = encode_tensor(t);
    REQUIRE(bytes.size() == 4 + 4 + 2 * 8 + 4 * 8);
    CHECK(std::memcmp(bytes.data(), "PTX1", 4) == 0);
    std::uint32_t rank = 0;
    std::memcpy(&rank, bytes.data() + 4, 4);
    CHECK(rank == 2);
    std::uint64_t e0 = 0, e1 = 0;
    std::memcpy(&e0, bytes.data() + 8, 8);
    std::memcpy(&e1, bytes.data() + 16, 8);
    CHECK(e0 == 2);
    CHECK(e1 == 2);
    double first = 0;
    std::memcpy(&first, bytes.data() + 24, 8);
    CHECK(first == 1.5);
}

TEST_CASE("tensor round trip is bit-exact") {
    Rng rng(3);
    for (Shape s : {Shape{5}, Shape{3, 4}, Shape{2, 3, 2}}) {
        Tensor t = test::random_tensor(rng, s, -1e6, 1e6);
        t[0] = std::nextafter(0.0, 1.0);
        std::size_t off = 0;
        const auto bytes = encode_tensor(t);
        Tensor back = decode_tensor(bytes, off);
        CHECK(off == bytes.size());
        CHECK(back.shape() == t.shape());
        CHECK(std::memcmp(back.data().data(), t.data().data(), t.numel() * 8) == 0);
    }
}

TEST_CASE("corrupt tensor blocks report an offset") {
    Tensor t = Tensor::filled({2, 2}, 1.0);
    auto bytes = encode_tensor(t);

    SUBCASE("bad magic") {
        bytes[0] = 'X';
        std::size_t off = 0;
        CHECK_THROWS_AS(decode_tensor(bytes, off), FormatError);
    }
    SUBCASE("truncated data") {
        bytes.resize(bytes.size() - 3);
        std::size_t off = 0;
        try {
            decode_tensor(bytes, off);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find("offset") != std::string::npos);
        }
    }
    SUBCASE("bad rank") {
        bytes[4] = 7;
        std::size_t off = 0;
        CHECK_THROWS_AS(decode_tensor(bytes, off), FormatError);
    }
}

TEST_CASE("rng determinism and ranges") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(1);
    double lo = 1, hi = 0;
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        CHECK(r.below(7) < 7);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
}

TEST_CASE("rng normal moments") {
    Rng r(5);
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal(0.0, 0.02);
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 5e-4);
    CHECK(std::sqrt(sq / n) == doctest::Approx(0.02).epsilon(0.01));
}

TEST_CASE("shuffle is a seeded permutation") {
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[i] = i;
    auto w = v;
    Rng a(9), b(9);
    a.shuffle(v);
    b.shuffle(w);
    CHECK(v == w);
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("fnv1a64 known vectors") {
    CHECK(fnv1a64({}) == 0xcbf29ce484222325ULL);
    const std::uint8_t a[] = {'a'};
    CHECK(fnv1a64(a) == 0xaf63dc4c8601ec8cULL);
}
