#pragma once

#include "pyratext/text.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace pyratext {

struct Example {
    std::size_t label = 0;
    std::vector<std::int64_t> tokens;
};

struct DatasetSplit {
    std::vector<Example> examples;
    std::size_t num_classes = 0;
    std::shared_ptr<const Vocab> vocab;

    std::size_t size() const { return examples.size(); }
    /// Throws ContractError if a label or token id is out of range.
    void validate() const;
};

// ---------------------------------------------------------------------------
// AG News CSV

inline constexpr std::size_t kAgNewsClasses = 4;
inline constexpr const char* kAgNewsClassNames[kAgNewsClasses] = {"World", "Sports", "Business", "Sci/Tech"};

struct RawExample {
    std::size_t label = 0; // zero-based
    std::string text;      // title + " " + description
    std::size_t line = 0;  // 1-based line where the record starts
};

struct RowRejection {
    std::size_t line = 0;
    std::string reason;
};

struct RawCorpus {
    std::vector<RawExample> rows;
    std::vector<RowRejection> rejected;
    std::size_t record_count = 0; // non-header, non-blank records seen
    bool had_header = false;
};

struct CsvOptions {
    /// Throw DataError on the first bad row instead of collecting it.
    bool strict = true;
};

/// Parses the public release layout: quoted `class,title,description` with
/// class in 1..4. A leading header row (non-numeric class field) is skipped.
RawCorpus read_agnews_csv(const std::string& path, CsvOptions options = {});
RawCorpus parse_agnews_csv(const std::string& content, CsvOptions options = {});

/// First `per_class` rows of every class, in file order.
RawCorpus balanced_subset(const RawCorpus& corpus, std::size_t per_class, std::size_t num_classes);

DatasetSplit encode_corpus(const RawCorpus& corpus, std::shared_ptr<const Vocab> vocab, std::size_t num_classes,
                           std::size_t max_len);

/// read_agnews_csv + encode_corpus.
DatasetSplit load_agnews_csv(const std::string& path, std::shared_ptr<const Vocab> vocab, std::size_t max_len,
                             CsvOptions options = {});

struct SplitPair {
    DatasetSplit train;
    DatasetSplit eval;
};

struct AgNewsSpec {
    std::string train_path;
    std::string test_path;
    std::size_t per_class = 2500;     // 10,000 training rows
    std::size_t eval_per_class = 500; // 2,000 held-out rows from the test file
    std::size_t vocab_size = 20000;
    std::size_t min_freq = 2;
};

/// Balanced subsets of both files; the vocabulary is built from the training
/// subset only and shared by both splits.
SplitPair load_agnews_splits(const AgNewsSpec& spec, std::size_t max_len);

// ---------------------------------------------------------------------------
// Synthetic separable data

struct SyntheticSpec {
    std::uint64_t seed = 7;
    std::size_t n_per_class = 200;
    std::size_t num_classes = 4;
    std::size_t vocab_size = 200;
    std::size_t signal_tokens_per_class = 8;
    /// Fraction of each sequence drawn from the whole vocabulary; at most 0.4
    /// so that own-class signal tokens make up at least 60%.
    double noise = 0.2;
    std::size_t min_len = 8;
    std::size_t max_len = 24;
};

/// Token-id vocabulary for a synthetic spec: <pad>, <unk>, then c<k>_s<j>
/// for signal ids and w<id> for the rest.
Vocab synthetic_vocab(const SyntheticSpec& spec);

/// Signal ids owned by `cls`: [2 + cls*s, 2 + (cls+1)*s).
std::vector<std::int64_t> signal_tokens(const SyntheticSpec& spec, std::size_t cls);

DatasetSplit make_synthetic(const SyntheticSpec& spec);

/// Train split from spec.seed, eval split of `eval_per_class` from a derived
/// seed; both share one vocabulary instance.
SplitPair make_synthetic_splits(const SyntheticSpec& spec, std::size_t eval_per_class);

// ---------------------------------------------------------------------------
// JSON-lines token dump
//
// Line 1: {"format":"pyratext-tokens","num_classes":C,"vocab_hash":"..","vocab_size":V}
// Then one {"label":L,"token_ids":[...]} object per example.

struct TokenDump {
    std::vector<Example> examples;
    std::size_t num_classes = 0;
    std::size_t vocab_size = 0;
    std::string vocab_hash;
};

void write_jsonl(const std::string& path, const DatasetSplit& split);
std::string to_jsonl(const DatasetSplit& split);
TokenDump read_jsonl(const std::string& path);

} // namespace pyratext
