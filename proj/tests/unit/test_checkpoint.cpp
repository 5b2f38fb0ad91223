#include "doctest.h"
#include "helpers.hpp"
#include "small_config.hpp"

#include "pyratext/checkpoint.hpp"
#include "pyratext/errors.hpp"
#include "pyratext/tensor_io.hpp"
#include "pyratext/train.hpp"

#include <cstring>
#include <fstream>

using namespace pyratext;

namespace {

struct Trained {
    SplitPair data = test::small_data();
    TrainConfig config;
    TrainResult result;
    Trained() : config(bind_to_data(test::small_config(), data.train)), result(train(config, data.train, data.eval)) {}
};

} // namespace

TEST_CASE("round trip reproduces parameters, forward outputs and metrics") {
    Trained t;
    const auto bytes = encode_checkpoint(t.result.model, t.config, *t.data.train.vocab);
    const Checkpoint back = decode_checkpoint(bytes);
    CHECK(to_json(back.config) == to_json(t.config));
    CHECK(back.vocab->hash() == t.data.train.vocab->hash());
    REQUIRE(back.model.params().size() == t.result.model.params().size());
    for (std::size_t i = 0; i < back.model.params().size(); ++i) {
        const auto& a = back.model.params().items()[i];
        const auto& b = t.result.model.params().items()[i];
        CHECK(a.name == b.name);
        CHECK(a.value.shape() == b.value.shape());
        CHECK(std::memcmp(a.value.data().data(), b.value.data().data(), a.value.numel() * 8) == 0);
    }
    CHECK(report_csv(evaluate(back.model, t.data.eval)) == report_csv(evaluate(t.result.model, t.data.eval)));
    Tape tape(false);
    for (const auto& ex : t.data.train.examples)
        CHECK(max_abs_diff(back.model.logits(tape, ex.tokens), t.result.model.logits(tape, ex.tokens)) == 0.0);
    CHECK(encode_checkpoint(back.model, back.config, *back.vocab) == bytes);
}

TEST_CASE("file round trip") {
    Trained t;
    const auto dir = test::scratch_dir("ckpt");
    const std::string path = (dir / "m.ckpt").string();
    save_checkpoint(path, t.result.model, t.config, *t.data.train.vocab);
    const Checkpoint back = load_checkpoint(path);
    CHECK(report_csv(evaluate(back.model, t.data.eval)) == report_csv(evaluate(t.result.model, t.data.eval)));
    CHECK_THROWS_AS(load_checkpoint((dir / "missing.ckpt").string()), DataError);
}

TEST_CASE("truncated or corrupted checkpoints are refused with an offset") {
    Trained t;
    const auto bytes = encode_checkpoint(t.result.model, t.config, *t.data.train.vocab);
    for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{12}, bytes.size() / 2, bytes.size() - 1}) {
        std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut));
        CHECK_THROWS_AS(decode_checkpoint(part), FormatError);
    }
    Rng rng(1);
    for (int trial = 0; trial < 40; ++trial) {
        auto bad = bytes;
        bad[rng.below(bad.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
        try {
            decode_checkpoint(bad);
            FAIL("corruption accepted");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find("offset") != std::string::npos);
        }
    }
    auto extra = bytes;
    extra.push_back(0);
    CHECK_THROWS_AS(decode_checkpoint(extra), FormatError);
}

TEST_CASE("vocabulary mismatch is refused with both hashes") {
    Trained t;
    const Checkpoint ck = decode_checkpoint(encode_checkpoint(t.result.model, t.config, *t.data.train.vocab));
    CHECK_NOTHROW(require_vocab_hash(ck, t.data.train.vocab->hash_hex()));
    SyntheticSpec other;
    other.vocab_size = 70;
    const std::string foreign = make_synthetic(other).vocab->hash_hex();
    try {
        require_vocab_hash(ck, foreign);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(foreign) != std::string::npos);
        CHECK(msg.find(t.data.train.vocab->hash_hex()) != std::string::npos);
    }
}
