#include "pyratext/text.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/tensor_io.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace pyratext {

namespace {

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Byte length of a non-ASCII Unicode whitespace sequence at text[i], or 0.
std::size_t unicode_space_len(std::string_view text, std::size_t i) {
    const auto b = [&](std::size_t k) -> unsigned char {
        return i + k < text.size() ? static_cast<unsigned char>(text[i + k]) : 0;
    };
    // U+0085, U+00A0
    if (b(0) == 0xC2 && (b(1) == 0x85 || b(1) == 0xA0)) return 2;
    // U+1680
    if (b(0) == 0xE1 && b(1) == 0x9A && b(2) == 0x80) return 3;
    if (b(0) == 0xE2) {
        // U+2000..U+200A, U+2028, U+2029, U+202F
        if (b(1) == 0x80 && ((b(2) >= 0x80 && b(2) <= 0x8A) || b(2) == 0xA8 || b(2) == 0xA9 || b(2) == 0xAF))
            return 3;
        // U+205F
        if (b(1) == 0x81 && b(2) == 0x9F) return 3;
    }
    // U+3000
    if (b(0) == 0xE3 && b(1) == 0x80 && b(2) == 0x80) return 3;
    return 0;
}

bool is_trimmed_punct(char c) {
    static constexpr std::string_view kSet = ".,;:!?\"'`()[]{}<>-";
    return kSet.find(c) != std::string_view::npos;
}

void flush(std::string& cur, std::vector<std::string>& out) {
    std::size_t lo = 0, hi = cur.size();
    while (lo < hi && is_trimmed_punct(cur[lo])) ++lo;
    while (hi > lo && is_trimmed_punct(cur[hi - 1])) --hi;
    if (hi > lo) out.emplace_back(cur.substr(lo, hi - lo));
    cur.clear();
}

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < text.size();) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (is_ascii_space(c)) {
            flush(cur, out);
            ++i;
            continue;
        }
        if (const auto len = unicode_space_len(text, i)) {
            flush(cur, out);
            i += len;
            continue;
        }
        cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
        ++i;
    }
    flush(cur, out);
    return out;
}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    if (tokens_.size() < 2 || tokens_[0] != kPadToken || tokens_[1] != kUnkToken)
        throw ContractError("vocabulary must start with <pad>, <unk>");
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i)
        if (!index_.emplace(tokens_[i], static_cast<std::int64_t>(i)).second)
            throw ContractError("duplicate vocabulary token '" + tokens_[i] + "'");
}

Vocab Vocab::build(std::span<const std::vector<std::string>> corpus, std::size_t max_size, std::size_t min_freq) {
    if (max_size < 2) throw ConfigError("vocabulary max_size must be >= 2");
    std::map<std::string, std::size_t> counts;
    for (const auto& doc : corpus)
        for (const auto& tok : doc)
            if (tok != kPadToken && tok != kUnkToken) ++counts[tok];

    std::vector<std::pair<std::string, std::size_t>> ranked;
    for (auto& [tok, n] : counts)
        if (n >= min_freq) ranked.emplace_back(tok, n);
    // std::map iteration is already lexicographic; stable sort keeps that for ties.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    std::vector<std::string> tokens{std::string(kPadToken), std::string(kUnkToken)};
    for (auto& [tok, n] : ranked) {
        if (tokens.size() >= max_size) break;
        tokens.push_back(tok);
    }
    return Vocab(std::move(tokens));
}

std::int64_t Vocab::id(std::string_view token) const {
    const auto it = index_.find(std::string(token));
    return it == index_.end() ? kUnk : it->second;
}

bool Vocab::contains(std::string_view token) const { return index_.count(std::string(token)) > 0; }

const std::string& Vocab::token(std::int64_t id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
        throw ContractError("token id " + std::to_string(id) + " outside vocabulary of " +
                            std::to_string(tokens_.size()));
    return tokens_[static_cast<std::size_t>(id)];
}

std::vector<std::int64_t> Vocab::encode(std::span<const std::string> tokens, std::size_t max_len) const {
    if (max_len == 0) throw ContractError("max_len must be >= 1");
    std::vector<std::int64_t> ids;
    const std::size_t n = std::min(tokens.size(), max_len);
    ids.reserve(std::max<std::size_t>(n, 1));
    for (std::size_t i = 0; i < n; ++i) ids.push_back(id(tokens[i]));
    if (ids.empty()) ids.push_back(kUnk);
    return ids;
}

std::uint64_t Vocab::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& t : tokens_) {
        h = fnv1a64({reinterpret_cast<const std::uint8_t*>(t.data()), t.size()}, h);
        const std::uint8_t sep = 0;
        h = fnv1a64({&sep, 1}, h);
    }
    return h;
}

std::string Vocab::hash_hex() const { return hex64(hash()); }

Vocab build_vocab(std::span<const std::string> texts, std::size_t max_size, std::size_t min_freq) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(texts.size());
    for (const auto& t : texts) docs.push_back(tokenize(t));
    return Vocab::build(docs, max_size, min_freq);
}

} // namespace pyratext
