#include "pyratext/checkpoint.hpp"

#include "pyratext/errors.hpp"
#include "pyratext/tensor_io.hpp"

#include <cstring>
#include <fstream>

namespace pyratext {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'P', 'Y', 'R', 'A', 'C', 'K', 'P', 'T'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    std::uint8_t buf[8];
    std::memcpy(buf, &v, 8);
    out.insert(out.end(), buf, buf + 8);
}

std::uint64_t get_u64(std::span<const std::uint8_t> bytes, std::size_t offset) {
    std::uint64_t v;
    std::memcpy(&v, bytes.data() + offset, 8);
    return v;
}

} // namespace

std::vector<std::uint8_t> encode_checkpoint(const Model& model, const TrainConfig& config, const Vocab& vocab) {
    json params = json::array();
    for (const auto& p : model.params().items()) params.push_back({{"name", p.name}, {"shape", p.value.shape()}});
    TrainConfig cfg = config;
    cfg.model = model.config();
    json manifest = {{"format", "pyratext-checkpoint"},
                     {"version", 1},
                     {"config", to_json(cfg)},
                     {"vocab_hash", vocab.hash_hex()},
                     {"vocab", vocab.tokens()},
                     {"params", params}};
    const std::string text = manifest.dump();

    std::vector<std::uint8_t> out(kMagic, kMagic + 8);
    put_u64(out, text.size());
    out.insert(out.end(), text.begin(), text.end());
    for (const auto& p : model.params().items()) {
        const auto block = encode_tensor(p.value);
        out.insert(out.end(), block.begin(), block.end());
    }
    put_u64(out, fnv1a64(out));
    return out;
}

void save_checkpoint(const std::string& path, const Model& model, const TrainConfig& config, const Vocab& vocab) {
    const auto bytes = encode_checkpoint(model, config, vocab);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write checkpoint " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("failed writing checkpoint " + path);
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 8) != 0)
        throw FormatError("not a checkpoint (bad magic)", 0);
    if (bytes.size() < 16) throw FormatError("truncated checkpoint header", bytes.size());
    const std::uint64_t manifest_len = get_u64(bytes, 8);
    if (manifest_len > bytes.size() - 16) throw FormatError("manifest length exceeds file size", 8);

    json manifest;
    try {
        manifest = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(manifest_len));
    } catch (const json::exception& e) {
        throw FormatError(std::string("manifest is not valid JSON: ") + e.what(), 16);
    }

    TrainConfig config;
    std::vector<std::string> tokens;
    std::string vocab_hash;
    std::vector<std::pair<std::string, Shape>> entries;
    try {
        if (manifest.at("format").get<std::string>() != "pyratext-checkpoint")
            throw FormatError("unexpected manifest format", 16);
        config = train_config_from_json(manifest.at("config"));
        tokens = manifest.at("vocab").get<std::vector<std::string>>();
        vocab_hash = manifest.at("vocab_hash").get<std::string>();
        for (const auto& p : manifest.at("params"))
            entries.emplace_back(p.at("name").get<std::string>(), p.at("shape").get<Shape>());
    } catch (const json::exception& e) {
        throw FormatError(std::string("incomplete manifest: ") + e.what(), 16);
    } catch (const ConfigError& e) {
        throw FormatError(std::string("manifest config: ") + e.what(), 16);
    }

    std::size_t offset = 16 + static_cast<std::size_t>(manifest_len);
    std::vector<Tensor> blocks;
    blocks.reserve(entries.size());
    for (const auto& [name, shape] : entries) {
        const std::size_t at = offset;
        Tensor t = decode_tensor(bytes, offset);
        if (t.shape() != shape)
            throw FormatError("tensor " + name + " has shape " + shape_str(t.shape()) + ", manifest says " +
                                  shape_str(shape),
                              at);
        blocks.push_back(std::move(t));
    }
    if (bytes.size() - offset != 8) throw FormatError("missing or misplaced checksum trailer", offset);
    const std::uint64_t stored = get_u64(bytes, offset);
    if (stored != fnv1a64(bytes.first(offset))) throw FormatError("checksum mismatch", offset);

    std::shared_ptr<const Vocab> vocab;
    try {
        vocab = std::make_shared<const Vocab>(std::move(tokens));
    } catch (const ContractError& e) {
        throw FormatError(std::string("bad vocabulary: ") + e.what(), 16);
    }
    if (vocab->hash_hex() != vocab_hash) throw FormatError("vocabulary does not match its recorded hash", 16);

    Model model(config.model);
    auto& items = model.params().items();
    if (items.size() != entries.size()) throw FormatError("parameter count differs from the model layout", 16);
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].name != entries[i].first || items[i].value.shape() != entries[i].second)
            throw FormatError("parameter " + entries[i].first + " does not fit the model layout", 16);
        std::copy(blocks[i].data().begin(), blocks[i].data().end(), items[i].value.data().begin());
    }
    return Checkpoint{config, std::move(vocab), std::move(model)};
}

Checkpoint load_checkpoint(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    return decode_checkpoint(bytes);
}

void require_vocab_hash(const Checkpoint& ckpt, const std::string& data_hash) {
    const std::string mine = ckpt.vocab->hash_hex();
    if (mine != data_hash)
        throw DataError("vocabulary hash mismatch: checkpoint=" + mine + " dataset=" + data_hash);
}

} // namespace pyratext
