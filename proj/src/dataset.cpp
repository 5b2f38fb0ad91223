#include "pyratext/dataset.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pyratext {

using nlohmann::json;

void DatasetSplit::validate() const {
    if (num_classes < 2) throw ContractError("dataset needs at least 2 classes");
    const std::size_t v = vocab ? vocab->size() : 0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& ex = examples[i];
        if (ex.label >= num_classes)
            throw ContractError("example " + std::to_string(i) + ": label " + std::to_string(ex.label) +
                                " outside " + std::to_string(num_classes) + " classes");
        if (ex.tokens.empty()) throw ContractError("example " + std::to_string(i) + ": empty token sequence");
        if (vocab)
            for (auto id : ex.tokens)
                if (id < 0 || static_cast<std::size_t>(id) >= v)
                    throw ContractError("example " + std::to_string(i) + ": token id " + std::to_string(id) +
                                        " outside vocabulary of " + std::to_string(v));
    }
}

// ---------------------------------------------------------------------------
// CSV

namespace {

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;
    std::string error; // non-empty when the record is malformed
};

// RFC 4180-style reader: quoted fields may contain commas, doubled quotes and
// newlines. Blank lines are skipped.
std::vector<CsvRecord> split_records(const std::string& s) {
    std::vector<CsvRecord> out;
    std::size_t i = 0, line = 1;
    const std::size_t n = s.size();
    while (i < n) {
        if (s[i] == '\n' || s[i] == '\r') {
            if (s[i] == '\n') ++line;
            ++i;
            continue;
        }
        CsvRecord rec;
        rec.line = line;
        std::string field;
        bool done = false;
        while (!done) {
            field.clear();
            if (i < n && s[i] == '"') {
                ++i;
                bool closed = false;
                while (i < n) {
                    if (s[i] == '"') {
                        if (i + 1 < n && s[i + 1] == '"') {
                            field.push_back('"');
                            i += 2;
                        } else {
                            ++i;
                            closed = true;
                            break;
                        }
                    } else {
                        if (s[i] == '\n') ++line;
                        field.push_back(s[i++]);
                    }
                }
                if (!closed && rec.error.empty()) rec.error = "unterminated quoted field";
                if (closed && i < n && s[i] != ',' && s[i] != '\n' && s[i] != '\r' && rec.error.empty())
                    rec.error = "unexpected character after closing quote";
            }
            while (i < n && s[i] != ',' && s[i] != '\n' && s[i] != '\r') {
                if (s[i] == '"' && rec.error.empty()) rec.error = "stray quote in unquoted field";
                field.push_back(s[i++]);
            }
            rec.fields.push_back(field);
            if (i < n && s[i] == ',') {
                ++i;
            } else {
                if (i < n && s[i] == '\r') ++i;
                if (i < n && s[i] == '\n') {
                    ++i;
                    ++line;
                }
                done = true;
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

} // namespace

RawCorpus parse_agnews_csv(const std::string& content, CsvOptions options) {
    RawCorpus corpus;
    auto records = split_records(content);
    std::size_t start = 0;
    if (!records.empty() && records.front().error.empty() && !records.front().fields.empty() &&
        !all_digits(records.front().fields.front())) {
        corpus.had_header = true;
        start = 1;
    }
    for (std::size_t r = start; r < records.size(); ++r) {
        auto& rec = records[r];
        ++corpus.record_count;
        std::string reason = rec.error;
        if (reason.empty() && rec.fields.size() != 3)
            reason = "expected 3 fields, found " + std::to_string(rec.fields.size());
        if (reason.empty() && !all_digits(rec.fields[0])) reason = "non-numeric class '" + rec.fields[0] + "'";
        if (reason.empty()) {
            const auto& cls = rec.fields[0];
            const long v = cls.size() > 6 ? -1 : std::stol(cls);
            if (v < 1 || v > static_cast<long>(kAgNewsClasses))
                reason = "class " + cls + " outside 1.." + std::to_string(kAgNewsClasses);
            else
                corpus.rows.push_back(
                    RawExample{static_cast<std::size_t>(v - 1), rec.fields[1] + " " + rec.fields[2], rec.line});
        }
        if (!reason.empty()) {
            if (options.strict) throw DataError("line " + std::to_string(rec.line) + ": " + reason);
            corpus.rejected.push_back(RowRejection{rec.line, reason});
        }
    }
    return corpus;
}

RawCorpus read_agnews_csv(const std::string& path, CsvOptions options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_agnews_csv(ss.str(), options);
}

RawCorpus balanced_subset(const RawCorpus& corpus, std::size_t per_class, std::size_t num_classes) {
    RawCorpus out;
    out.had_header = corpus.had_header;
    std::vector<std::size_t> taken(num_classes, 0);
    for (const auto& row : corpus.rows) {
        if (row.label >= num_classes || taken[row.label] >= per_class) continue;
        ++taken[row.label];
        out.rows.push_back(row);
    }
    out.record_count = out.rows.size();
    return out;
}

DatasetSplit encode_corpus(const RawCorpus& corpus, std::shared_ptr<const Vocab> vocab, std::size_t num_classes,
                           std::size_t max_len) {
    if (!vocab) throw ContractError("encode_corpus needs a vocabulary");
    DatasetSplit split;
    split.num_classes = num_classes;
    split.vocab = vocab;
    split.examples.reserve(corpus.rows.size());
    for (const auto& row : corpus.rows) {
        const auto toks = tokenize(row.text);
        split.examples.push_back(Example{row.label, vocab->encode(toks, max_len)});
    }
    split.validate();
    return split;
}

DatasetSplit load_agnews_csv(const std::string& path, std::shared_ptr<const Vocab> vocab, std::size_t max_len,
                             CsvOptions options) {
    return encode_corpus(read_agnews_csv(path, options), std::move(vocab), kAgNewsClasses, max_len);
}

SplitPair load_agnews_splits(const AgNewsSpec& spec, std::size_t max_len) {
    if (spec.per_class < 1 || spec.eval_per_class < 1) throw ConfigError("agnews: per-class counts must be >= 1");
    const RawCorpus train = balanced_subset(read_agnews_csv(spec.train_path), spec.per_class, kAgNewsClasses);
    const RawCorpus test = balanced_subset(read_agnews_csv(spec.test_path), spec.eval_per_class, kAgNewsClasses);
    if (train.rows.empty()) throw DataError("agnews: no training rows in " + spec.train_path);
    if (test.rows.empty()) throw DataError("agnews: no evaluation rows in " + spec.test_path);

    std::vector<std::string> texts;
    texts.reserve(train.rows.size());
    for (const auto& r : train.rows) texts.push_back(r.text);
    auto vocab = std::make_shared<const Vocab>(build_vocab(texts, spec.vocab_size, spec.min_freq));
    return SplitPair{encode_corpus(train, vocab, kAgNewsClasses, max_len),
                     encode_corpus(test, vocab, kAgNewsClasses, max_len)};
}

// ---------------------------------------------------------------------------
// Synthetic

namespace {

void check_spec(const SyntheticSpec& spec) {
    if (spec.num_classes < 2) throw ConfigError("synthetic: num_classes must be >= 2");
    if (spec.n_per_class < 1) throw ConfigError("synthetic: n_per_class must be >= 1");
    if (spec.signal_tokens_per_class < 1) throw ConfigError("synthetic: signal_tokens_per_class must be >= 1");
    if (spec.vocab_size < spec.num_classes * spec.signal_tokens_per_class + 2)
        throw ConfigError("synthetic: vocab_size " + std::to_string(spec.vocab_size) + " < C*signal+2 = " +
                          std::to_string(spec.num_classes * spec.signal_tokens_per_class + 2));
    if (!(spec.noise >= 0.0 && spec.noise <= 0.4)) throw ConfigError("synthetic: noise must be in [0, 0.4]");
    if (spec.min_len < 1 || spec.max_len < spec.min_len)
        throw ConfigError("synthetic: need 1 <= min_len <= max_len");
}

} // namespace

Vocab synthetic_vocab(const SyntheticSpec& spec) {
    check_spec(spec);
    std::vector<std::string> tokens{std::string(Vocab::kPadToken), std::string(Vocab::kUnkToken)};
    const std::size_t signal_end = 2 + spec.num_classes * spec.signal_tokens_per_class;
    for (std::size_t id = 2; id < spec.vocab_size; ++id) {
        if (id < signal_end) {
            const std::size_t k = (id - 2) / spec.signal_tokens_per_class;
            const std::size_t j = (id - 2) % spec.signal_tokens_per_class;
            tokens.push_back("c" + std::to_string(k) + "_s" + std::to_string(j));
        } else {
            tokens.push_back("w" + std::to_string(id));
        }
    }
    return Vocab(std::move(tokens));
}

std::vector<std::int64_t> signal_tokens(const SyntheticSpec& spec, std::size_t cls) {
    check_spec(spec);
    if (cls >= spec.num_classes) throw ContractError("signal_tokens: class out of range");
    std::vector<std::int64_t> ids;
    const std::size_t s = spec.signal_tokens_per_class;
    for (std::size_t j = 0; j < s; ++j) ids.push_back(static_cast<std::int64_t>(2 + cls * s + j));
    return ids;
}

namespace {

DatasetSplit generate(const SyntheticSpec& spec, std::uint64_t seed, std::size_t n_per_class,
                      std::shared_ptr<const Vocab> vocab) {
    Rng rng(seed);
    DatasetSplit split;
    split.num_classes = spec.num_classes;
    split.vocab = vocab;
    const std::size_t s = spec.signal_tokens_per_class;
    const std::size_t span_len = spec.max_len - spec.min_len + 1;
    for (std::size_t i = 0; i < n_per_class; ++i) {
        for (std::size_t c = 0; c < spec.num_classes; ++c) {
            const std::size_t len = spec.min_len + static_cast<std::size_t>(rng.below(span_len));
            // Rounded down so own-class signal never drops below 1 - noise.
            const auto n_noise = static_cast<std::size_t>(std::floor(spec.noise * static_cast<double>(len) + 1e-9));
            std::vector<std::int64_t> toks;
            toks.reserve(len);
            for (std::size_t t = 0; t < len - n_noise; ++t)
                toks.push_back(static_cast<std::int64_t>(2 + c * s + rng.below(s)));
            for (std::size_t t = 0; t < n_noise; ++t)
                toks.push_back(static_cast<std::int64_t>(2 + rng.below(spec.vocab_size - 2)));
            rng.shuffle(toks);
            split.examples.push_back(Example{c, std::move(toks)});
        }
    }
    split.validate();
    return split;
}

} // namespace

DatasetSplit make_synthetic(const SyntheticSpec& spec) {
    auto vocab = std::make_shared<const Vocab>(synthetic_vocab(spec));
    return generate(spec, spec.seed, spec.n_per_class, vocab);
}

SplitPair make_synthetic_splits(const SyntheticSpec& spec, std::size_t eval_per_class) {
    auto vocab = std::make_shared<const Vocab>(synthetic_vocab(spec));
    SplitPair out{generate(spec, spec.seed, spec.n_per_class, vocab), {}};
    if (eval_per_class > 0)
        out.eval = generate(spec, spec.seed ^ 0x9e3779b97f4a7c15ULL, eval_per_class, vocab);
    else
        out.eval = DatasetSplit{{}, spec.num_classes, vocab};
    return out;
}

// ---------------------------------------------------------------------------
// JSON lines

std::string to_jsonl(const DatasetSplit& split) {
    std::string out;
    json header = {{"format", "pyratext-tokens"},
                   {"num_classes", split.num_classes},
                   {"vocab_hash", split.vocab ? split.vocab->hash_hex() : std::string()},
                   {"vocab_size", split.vocab ? split.vocab->size() : 0}};
    out += header.dump() + "\n";
    for (const auto& ex : split.examples) {
        json row = {{"label", ex.label}, {"token_ids", ex.tokens}};
        out += row.dump() + "\n";
    }
    return out;
}

void write_jsonl(const std::string& path, const DatasetSplit& split) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out << to_jsonl(split);
}

TokenDump read_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset " + path);
    TokenDump dump;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
        }
        try {
            if (!have_header) {
                if (j.value("format", std::string()) != "pyratext-tokens")
                    throw DataError("line " + std::to_string(lineno) + ": missing pyratext-tokens header");
                dump.num_classes = j.at("num_classes").get<std::size_t>();
                dump.vocab_size = j.at("vocab_size").get<std::size_t>();
                dump.vocab_hash = j.at("vocab_hash").get<std::string>();
                have_header = true;
                continue;
            }
            Example ex{j.at("label").get<std::size_t>(), j.at("token_ids").get<std::vector<std::int64_t>>()};
            if (ex.label >= dump.num_classes)
                throw DataError("line " + std::to_string(lineno) + ": label out of range");
            if (ex.tokens.empty()) throw DataError("line " + std::to_string(lineno) + ": empty token_ids");
            for (auto id : ex.tokens)
                if (id < 0 || static_cast<std::size_t>(id) >= dump.vocab_size)
                    throw DataError("line " + std::to_string(lineno) + ": token id out of range");
            dump.examples.push_back(std::move(ex));
        } catch (const json::exception& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_header) throw DataError(path + ": empty dataset file");
    return dump;
}

} // namespace pyratext
