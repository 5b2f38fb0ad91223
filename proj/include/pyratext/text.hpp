#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pyratext {

/// Lowercases ASCII letters, splits on Unicode whitespace, trims sentence
/// punctuation from both ends of every token and drops empty tokens.
/// Symbols that bind to numbers or words ('%', '$', '#', '&', '@', ...) are
/// kept, so "2%" stays "2%" while "U.S." becomes "u.s".
std::vector<std::string> tokenize(std::string_view text);

class Vocab {
public:
    static constexpr std::int64_t kPad = 0;
    static constexpr std::int64_t kUnk = 1;
    static constexpr std::string_view kPadToken = "<pad>";
    static constexpr std::string_view kUnkToken = "<unk>";

    /// Tokens by id; [0] and [1] must be the PAD and UNK tokens.
    explicit Vocab(std::vector<std::string> tokens);

    /// Frequency-ranked vocabulary over tokenized texts. Keeps at most
    /// `max_size` entries including PAD/UNK, drops tokens seen fewer than
    /// `min_freq` times; ties go to the lexicographically smaller token.
    static Vocab build(std::span<const std::vector<std::string>> corpus, std::size_t max_size,
                       std::size_t min_freq = 1);

    std::size_t size() const { return tokens_.size(); }
    /// UNK for out-of-vocabulary tokens.
    std::int64_t id(std::string_view token) const;
    bool contains(std::string_view token) const;
    const std::string& token(std::int64_t id) const;
    const std::vector<std::string>& tokens() const { return tokens_; }

    /// Ids for the first `max_len` tokens; an empty input encodes as [UNK].
    std::vector<std::int64_t> encode(std::span<const std::string> tokens, std::size_t max_len) const;

    /// FNV-1a over the NUL-separated token list in id order.
    std::uint64_t hash() const;
    std::string hash_hex() const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::int64_t> index_;
};

/// Convenience: tokenize every text, then Vocab::build.
Vocab build_vocab(std::span<const std::string> texts, std::size_t max_size, std::size_t min_freq = 1);

} // namespace pyratext
