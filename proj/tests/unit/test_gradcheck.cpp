#include "doctest.h"

#include "pyratext/gradcheck.hpp"
#include "pyratext/ops.hpp"

#include <chrono>

using namespace pyratext;

TEST_CASE("relative error definition") {
    CHECK(grad_relative_error(1.0, 1.0) == 0.0);
    CHECK(grad_relative_error(0.0, 0.5) == 0.5);
    CHECK(grad_relative_error(10.0, 12.0) == doctest::Approx(2.0 / 22.0));
}

TEST_CASE("scope parsing") {
    CHECK(parse_grad_scope("op") == GradScope::op);
    CHECK(parse_grad_scope("endtoend") == GradScope::endtoend);
    CHECK_FALSE(parse_grad_scope("ops").has_value());
}

TEST_CASE("scopes select their cases") {
    for (auto scope : {GradScope::op, GradScope::module, GradScope::endtoend}) {
        const auto results = run_gradchecks(scope);
        CHECK_FALSE(results.empty());
        for (const auto& r : results) CHECK(r.scope == scope);
    }
}

TEST_CASE("end-to-end check uses the reduced config and finishes quickly") {
    const ModelConfig c = reduced_model_config();
    CHECK(c.encoder.layers == 2);
    CHECK(c.encoder.dim == 8);
    CHECK(c.encoder.max_len == 3);
    CHECK(c.gnn_layers == 2);
    CHECK(c.num_classes == 3);
    const auto start = std::chrono::steady_clock::now();
    const auto results = run_gradchecks(GradScope::endtoend);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    REQUIRE(results.size() == 1);
    CHECK(results[0].passed());
    CHECK(results[0].checked > 1000);
    CHECK(seconds < 60.0);
}

TEST_CASE("inputs must require gradients") {
    Tensor x = Tensor::filled({2}, 1.0);
    CHECK_THROWS(check_gradients("x", {x}, [&](Tape& t) { return ops::sum(t, x); }, 1e-6));
}
