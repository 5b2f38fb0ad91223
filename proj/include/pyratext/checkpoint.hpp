#pragma once

#include "pyratext/config.hpp"
#include "pyratext/model.hpp"
#include "pyratext/text.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace pyratext {

// Checkpoint layout:
//   "PYRACKPT"            8 bytes
//   manifest length       u64
//   manifest              JSON: format, config, vocab_hash, vocab, params[{name, shape}]
//   tensor blocks         one PTX1 block per manifest entry, same order
//   checksum              u64 FNV-1a of every preceding byte

struct Checkpoint {
    TrainConfig config;
    std::shared_ptr<const Vocab> vocab;
    Model model;
};

std::vector<std::uint8_t> encode_checkpoint(const Model& model, const TrainConfig& config, const Vocab& vocab);
void save_checkpoint(const std::string& path, const Model& model, const TrainConfig& config, const Vocab& vocab);

/// Decodes fully before constructing anything; throws FormatError (with byte
/// offset) on corrupt or truncated input.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
Checkpoint load_checkpoint(const std::string& path);

/// Throws DataError naming both hashes when the vocabularies differ.
void require_vocab_hash(const Checkpoint& ckpt, const std::string& data_hash);

} // namespace pyratext
