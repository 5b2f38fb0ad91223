#include "pyratext/gradcheck.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/gnn.hpp"
#include "pyratext/graph.hpp"
#include "pyratext/head.hpp"
#include "pyratext/model.hpp"
#include "pyratext/ops.hpp"
#include "pyratext/pyramid.hpp"
#include "pyratext/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace pyratext {

std::optional<GradScope> parse_grad_scope(const std::string& s) {
    if (s == "op") return GradScope::op;
    if (s == "module") return GradScope::module;
    if (s == "endtoend") return GradScope::endtoend;
    if (s == "all") return GradScope::all;
    return std::nullopt;
}

const char* scope_name(GradScope s) {
    switch (s) {
    case GradScope::op: return "op";
    case GradScope::module: return "module";
    case GradScope::endtoend: return "endtoend";
    case GradScope::all: return "all";
    }
    return "?";
}

double grad_relative_error(double a, double f) {
    return std::abs(a - f) / std::max(1.0, std::abs(a) + std::abs(f));
}

GradCheckResult check_gradients(std::string name, std::vector<Tensor> inputs, const LossFn& loss, double tolerance,
                                double h) {
    const auto started = std::chrono::steady_clock::now();
    for (auto& t : inputs) {
        if (!t.requires_grad()) throw ContractError("check_gradients: input without requires_grad in " + name);
        t.clear_grad();
    }
    {
        Tape tape;
        Tensor l = loss(tape);
        tape.backward(l);
    }
    GradCheckResult res;
    res.name = std::move(name);
    res.tolerance = tolerance;
    Tape off(false);
    for (auto& t : inputs) {
        const std::vector<double> analytic = t.has_grad() ? std::vector<double>(t.grad().begin(), t.grad().end())
                                                          : std::vector<double>(t.numel(), 0.0);
        auto data = t.data();
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double saved = data[i];
            data[i] = saved + h;
            const double up = loss(off).item();
            data[i] = saved - h;
            const double down = loss(off).item();
            data[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            res.max_rel_error = std::max(res.max_rel_error, grad_relative_error(analytic[i], numeric));
            ++res.checked;
        }
        t.clear_grad();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return res;
}

ModelConfig reduced_model_config() {
    ModelConfig c;
    c.encoder.vocab_size = 10;
    c.encoder.layers = 2;
    c.encoder.dim = 8;
    c.encoder.heads = 2;
    c.encoder.ffn_dim = 16;
    c.encoder.max_len = 3;
    c.pyramid_dim = 8;
    c.gnn_layers = 2;
    c.gnn_dim = 8;
    c.window = 3;
    c.num_classes = 3;
    return c;
}

namespace {

constexpr double kLinearTol = 1e-6;
constexpr double kNonlinearTol = 1e-4;

Tensor random_tensor(Rng& rng, Shape shape, double lo = -2.0, double hi = 2.0, bool grad = true) {
    Tensor t = Tensor::zeros(std::move(shape), grad);
    for (auto& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

// Values in [-2, -0.05] U [0.05, 2] so that no coordinate sits on a kink.
Tensor away_from_zero(Rng& rng, Shape shape) {
    Tensor t = Tensor::zeros(std::move(shape), true);
    for (auto& v : t.data()) {
        const double mag = rng.uniform(0.05, 2.0);
        v = rng.uniform() < 0.5 ? -mag : mag;
    }
    return t;
}

// Projects an output onto fixed random weights so every coordinate matters.
Tensor project(Tape& tape, const Tensor& y, const Tensor& weights) {
    return ops::sum(tape, ops::mul(tape, y, weights));
}

GradCheckCase op_case(std::string name, double tol, std::function<GradCheckResult(std::string, double)> body) {
    return GradCheckCase{name, GradScope::op, [name, tol, body] { return body(name, tol); }};
}

std::vector<GradCheckCase> op_cases() {
    std::vector<GradCheckCase> cases;
    cases.push_back(op_case("matmul", kLinearTol, [](std::string n, double tol) {
        Rng rng(11);
        Tensor a = random_tensor(rng, {3, 4}), b = random_tensor(rng, {4, 2});
        Tensor w = random_tensor(rng, {3, 2}, -2, 2, false);
        return check_gradients(n, {a, b}, [=](Tape& t) { return project(t, ops::matmul(t, a, b), w); }, tol);
    }));
    cases.push_back(op_case("transpose", kLinearTol, [](std::string n, double tol) {
        Rng rng(12);
        Tensor a = random_tensor(rng, {2, 3});
        Tensor w = random_tensor(rng, {3, 2}, -2, 2, false);
        return check_gradients(n, {a}, [=](Tape& t) { return project(t, ops::transpose(t, a), w); }, tol);
    }));
    cases.push_back(op_case("add", kLinearTol, [](std::string n, double tol) {
        Rng rng(13);
        Tensor a = random_tensor(rng, {2, 3}), b = random_tensor(rng, {2, 3});
        Tensor w = random_tensor(rng, {2, 3}, -2, 2, false);
        return check_gradients(n, {a, b}, [=](Tape& t) { return project(t, ops::add(t, a, b), w); }, tol);
    }));
    cases.push_back(op_case("mul", kLinearTol, [](std::string n, double tol) {
        Rng rng(14);
        Tensor a = random_tensor(rng, {2, 3}), b = random_tensor(rng, {2, 3});
        Tensor w = random_tensor(rng, {2, 3}, -2, 2, false);
        return check_gradients(n, {a, b}, [=](Tape& t) { return project(t, ops::mul(t, a, b), w); }, tol);
    }));
    cases.push_back(op_case("scale", kLinearTol, [](std::string n, double tol) {
        Rng rng(15);
        Tensor a = random_tensor(rng, {2, 3});
        Tensor w = random_tensor(rng, {2, 3}, -2, 2, false);
        return check_gradients(n, {a}, [=](Tape& t) { return project(t, ops::scale(t, a, -1.7), w); }, tol);
    }));
    cases.push_back(op_case("relu", kLinearTol, [](std::string n, double tol) {
        Rng rng(16);
        Tensor a = away_from_zero(rng, {3, 4});
        Tensor w = random_tensor(rng, {3, 4}, -2, 2, false);
        return check_gradients(n, {a}, [=](Tape& t) { return project(t, ops::relu(t, a), w); }, tol);
    }));
    cases.push_back(op_case("add_row", kLinearTol, [](std::string n, double tol) {
        Rng rng(17);
        Tensor a = random_tensor(rng, {3, 4}), r = random_tensor(rng, {1, 4});
        Tensor w = random_tensor(rng, {3, 4}, -2, 2, false);
        return check_gradients(n, {a, r}, [=](Tape& t) { return project(t, ops::add_row(t, a, r), w); }, tol);
    }));
    cases.push_back(op_case("mul_row", kLinearTol, [](std::string n, double tol) {
        Rng rng(18);
        Tensor a = random_tensor(rng, {3, 4}), r = random_tensor(rng, {1, 4});
        Tensor w = random_tensor(rng, {3, 4}, -2, 2, false);
        return check_gradients(n, {a, r}, [=](Tape& t) { return project(t, ops::mul_row(t, a, r), w); }, tol);
    }));
    cases.push_back(op_case("softmax_rows", 1e-5, [](std::string n, double tol) {
        Rng rng(19);
        Tensor a = random_tensor(rng, {2, 3});
        Tensor w = random_tensor(rng, {2, 3}, -2, 2, false);
        return check_gradients(n, {a}, [=](Tape& t) { return project(t, ops::softmax_rows(t, a), w); }, tol);
    }));
    cases.push_back(op_case("normalize_rows", kNonlinearTol, [](std::string n, double tol) {
        Rng rng(20);
        Tensor a = random_tensor(rng, {3, 5});
        Tensor w = random_tensor(rng, {3, 5}, -2, 2, false);
        return check_gradients(n, {a}, [=](Tape& t) { return project(t, ops::normalize_rows(t, a, 1e-10), w); }, tol);
    }));
    cases.push_back(op_case("sum_axis", kLinearTol, [](std::string n, double tol) {
        Rng rng(21);
        Tensor a = random_tensor(rng, {2, 3, 4});
        Tensor w = random_tensor(rng, {2, 4}, -2, 2, false);
        return check_gradients(n, {a}, [=](Tape& t) { return project(t, ops::sum_axis(t, a, 1), w); }, tol);
    }));
    cases.push_back(op_case("mean_axis", kLinearTol, [](std::string n, double tol) {
        Rng rng(22);
        Tensor a = random_tensor(rng, {4, 3});
        Tensor w = random_tensor(rng, {3}, -2, 2, false);
        return check_gradients(n, {a}, [=](Tape& t) { return project(t, ops::mean_axis(t, a, 0), w); }, tol);
    }));
    cases.push_back(op_case("concat_last", kLinearTol, [](std::string n, double tol) {
        Rng rng(23);
        Tensor a = random_tensor(rng, {2, 3}), b = random_tensor(rng, {2, 5});
        Tensor w = random_tensor(rng, {2, 8}, -2, 2, false);
        return check_gradients(n, {a, b}, [=](Tape& t) {
            const Tensor parts[] = {a, b};
            return project(t, ops::concat_last(t, parts), w);
        }, tol);
    }));
    cases.push_back(op_case("slice_last", kLinearTol, [](std::string n, double tol) {
        Rng rng(24);
        Tensor a = random_tensor(rng, {3, 6});
        Tensor w = random_tensor(rng, {3, 2}, -2, 2, false);
        return check_gradients(n, {a}, [=](Tape& t) { return project(t, ops::slice_last(t, a, 2, 2), w); }, tol);
    }));
    cases.push_back(op_case("gather_rows", kLinearTol, [](std::string n, double tol) {
        Rng rng(25);
        Tensor table = random_tensor(rng, {5, 3});
        Tensor w = random_tensor(rng, {4, 3}, -2, 2, false);
        const std::vector<std::int64_t> ids{4, 0, 4, 2};
        return check_gradients(n, {table}, [=](Tape& t) { return project(t, ops::gather_rows(t, table, ids), w); }, tol);
    }));
    cases.push_back(op_case("pool_rows", kLinearTol, [](std::string n, double tol) {
        Rng rng(26);
        Tensor a = random_tensor(rng, {5, 3});
        Tensor w = random_tensor(rng, {3, 3}, -2, 2, false);
        return check_gradients(n, {a}, [=](Tape& t) { return project(t, ops::pool_rows(t, a, 2), w); }, tol);
    }));
    cases.push_back(op_case("repeat_rows", kLinearTol, [](std::string n, double tol) {
        Rng rng(27);
        Tensor a = random_tensor(rng, {3, 2});
        Tensor w = random_tensor(rng, {5, 2}, -2, 2, false);
        return check_gradients(n, {a}, [=](Tape& t) { return project(t, ops::repeat_rows(t, a, 2, 5), w); }, tol);
    }));
    cases.push_back(op_case("graph_aggregate", kLinearTol, [](std::string n, double tol) {
        Rng rng(28);
        Tensor a = random_tensor(rng, {5, 3});
        Tensor w = random_tensor(rng, {5, 3}, -2, 2, false);
        const TextGraph g = window_topology(5, 3);
        return check_gradients(n, {a}, [=](Tape& t) { return project(t, graph_aggregate(t, a, g), w); }, tol);
    }));
    cases.push_back(op_case("cross_entropy_logits", kLinearTol, [](std::string n, double tol) {
        Rng rng(29);
        Tensor z = random_tensor(rng, {1, 4});
        return check_gradients(n, {z}, [=](Tape& t) { return ops::cross_entropy_logits(t, z, 2); }, tol);
    }));
    return cases;
}

std::vector<Tensor> all_values(const ParamSet& set) {
    std::vector<Tensor> out;
    for (const auto& p : set.items()) out.push_back(p.value);
    return out;
}

std::vector<GradCheckCase> module_cases() {
    std::vector<GradCheckCase> cases;
    cases.push_back({"encoder", GradScope::module, [] {
        EncoderConfig c;
        c.vocab_size = 6;
        c.layers = 2;
        c.dim = 8;
        c.heads = 2;
        c.ffn_dim = 16;
        c.max_len = 3;
        EncoderParams p = EncoderParams::shaped(c);
        ParamSet set;
        p.register_into(set, "");
        init_params(set, 101);
        Rng rng(102);
        Tensor w1 = random_tensor(rng, {3, 8}, -2, 2, false), w2 = random_tensor(rng, {3, 8}, -2, 2, false);
        const std::vector<std::int64_t> ids{3, 1, 5};
        return check_gradients("encoder", all_values(set), [=](Tape& t) {
            auto states = encode(t, p, c, embed(t, p, ids));
            return ops::add(t, project(t, states.layers[0], w1), project(t, states.layers[1], w2));
        }, kNonlinearTol);
    }});
    cases.push_back({"pyramid", GradScope::module, [] {
        Rng rng(103);
        PyramidParams p = PyramidParams::shaped(2, 4, 4);
        ParamSet set;
        p.register_into(set, "");
        init_params(set, 104);
        Tensor h1 = random_tensor(rng, {3, 4}), h2 = random_tensor(rng, {3, 4});
        Tensor w = random_tensor(rng, {3, 4}, -2, 2, false);
        auto inputs = all_values(set);
        inputs.push_back(h1);
        inputs.push_back(h2);
        return check_gradients("pyramid", inputs, [=](Tape& t) {
            LayerStates s{{h1, h2}};
            return project(t, fuse_all(t, top_down_fuse(t, s, p), p.fuse), w);
        }, kNonlinearTol);
    }});
    cases.push_back({"gnn", GradScope::module, [] {
        Rng rng(105);
        GnnParams p = GnnParams::shaped(3, 3, 2);
        ParamSet set;
        p.register_into(set, "");
        init_params(set, 106);
        Tensor h0 = random_tensor(rng, {4, 3});
        Tensor w = random_tensor(rng, {4, 3}, -2, 2, false);
        const TextGraph g = window_topology(4, 3);
        auto inputs = all_values(set);
        inputs.push_back(h0);
        return check_gradients("gnn", inputs, [=](Tape& t) { return project(t, propagate_stack(t, g, h0, p), w); },
                               kNonlinearTol);
    }});
    cases.push_back({"head", GradScope::module, [] {
        Rng rng(107);
        ClassifierParams p = ClassifierParams::shaped(3, 4);
        ParamSet set;
        p.register_into(set, "");
        init_params(set, 108);
        for (auto& v : p.bias.data()) v = rng.uniform(-1, 1);
        Tensor h = random_tensor(rng, {5, 3});
        auto inputs = all_values(set);
        inputs.push_back(h);
        return check_gradients("head", inputs, [=](Tape& t) {
            return cross_entropy(t, class_logits(t, readout(t, h), p), 1);
        }, kNonlinearTol);
    }});
    return cases;
}

GradCheckCase endtoend_case() {
    return {"endtoend", GradScope::endtoend, [] {
        Model model = make_model(reduced_model_config(), 2024);
        const std::vector<std::int64_t> ids{2, 7, 4};
        const Model* m = &model;
        return check_gradients("endtoend", all_values(model.params()), [=](Tape& t) {
            return cross_entropy(t, m->logits(t, ids), 1);
        }, kNonlinearTol);
    }};
}

} // namespace

std::vector<GradCheckCase> builtin_gradchecks() {
    auto cases = op_cases();
    for (auto& c : module_cases()) cases.push_back(std::move(c));
    cases.push_back(endtoend_case());
    return cases;
}

GradCheckCase faulty_relu_case() {
    return {"faulty_relu", GradScope::op, [] {
        Rng rng(30);
        Tensor a = away_from_zero(rng, {3, 4});
        Tensor w = random_tensor(rng, {3, 4}, -2, 2, false);
        auto broken_relu = [](Tape& tape, const Tensor& x) {
            Tensor y = Tensor::zeros(x.shape());
            for (std::size_t i = 0; i < y.numel(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
            if (tape.wants({&x}))
                tape.record({x}, y, [x = Tensor(x)](std::span<const double> dy) mutable {
                    auto g = x.grad_mut();
                    for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i]; // ignores the mask
                });
            return y;
        };
        return check_gradients("faulty_relu", {a}, [=](Tape& t) { return project(t, broken_relu(t, a), w); },
                               kLinearTol);
    }};
}

std::vector<GradCheckResult> run_gradchecks(GradScope scope, std::span<const GradCheckCase> extra) {
    std::vector<GradCheckResult> out;
    auto run = [&](const GradCheckCase& c) {
        if (scope != GradScope::all && c.scope != scope) return;
        GradCheckResult r = c.run();
        r.scope = c.scope;
        out.push_back(std::move(r));
    };
    for (const auto& c : builtin_gradchecks()) run(c);
    for (const auto& c : extra) run(c);
    return out;
}

std::string format_gradcheck_table(std::span<const GradCheckResult> results) {
    std::string out;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-22s %-9s %8s %12s %10s %8s  %s\n", "check", "scope", "coords", "max_rel_err",
                  "tolerance", "seconds", "result");
    out += buf;
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%-22s %-9s %8zu %12.3e %10.1e %8.3f  %s\n", r.name.c_str(), scope_name(r.scope),
                      r.checked, r.max_rel_error, r.tolerance, r.seconds, r.passed() ? "PASS" : "FAIL");
        out += buf;
    }
    return out;
}

} // namespace pyratext
