#include "pyratext/tensor_io.hpp"

#include "pyratext/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace pyratext {

static_assert(std::endian::native == std::endian::little, "tensor I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'P', 'T', 'X', '1'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

template <typename T>
T take(std::span<const std::uint8_t> bytes, std::size_t& offset, const char* what) {
    if (bytes.size() < offset + sizeof(T))
        throw FormatError(std::string("truncated tensor block: missing ") + what, offset);
    T v;
    std::memcpy(&v, bytes.data() + offset, sizeof(T));
    offset += sizeof(T);
    return v;
}

} // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
    std::vector<std::uint8_t> out;
    out.reserve(4 + 4 + 8 * t.rank() + 8 * t.numel());
    out.insert(out.end(), kMagic, kMagic + 4);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (auto e : t.shape()) put<std::uint64_t>(out, e);
    for (double v : t.data()) put<double>(out, v);
    return out;
}

void write_tensor(std::ostream& os, const Tensor& t) {
    const auto bytes = encode_tensor(t);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes, std::size_t& offset) {
    const std::size_t start = offset;
    if (bytes.size() < offset + 4 || std::memcmp(bytes.data() + offset, kMagic, 4) != 0)
        throw FormatError("bad tensor magic", start);
    offset += 4;
    const auto rank = take<std::uint32_t>(bytes, offset, "rank");
    if (rank < 1 || rank > 3) throw FormatError("tensor rank " + std::to_string(rank) + " unsupported", offset - 4);
    Shape shape;
    std::size_t numel = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        const auto e = take<std::uint64_t>(bytes, offset, "extent");
        if (e == 0 || e > (std::uint64_t{1} << 40)) throw FormatError("implausible tensor extent", offset - 8);
        shape.push_back(static_cast<std::size_t>(e));
        numel *= static_cast<std::size_t>(e);
    }
    if ((bytes.size() - offset) / 8 < numel)
        throw FormatError("truncated tensor data: need " + std::to_string(numel) + " values", offset);
    std::vector<double> data(numel);
    std::memcpy(data.data(), bytes.data() + offset, numel * 8);
    offset += numel * 8;
    return Tensor(std::move(shape), std::move(data));
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void save_tensor(const std::string& path, const Tensor& t) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    write_tensor(out, t);
}

Tensor load_tensor(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    std::size_t offset = 0;
    Tensor t = decode_tensor(bytes, offset);
    if (offset != bytes.size()) throw FormatError("trailing bytes after tensor block", offset);
    return t;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

} // namespace pyratext
