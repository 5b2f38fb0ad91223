#pragma once

#include "pyratext/tensor.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pyratext {

// Binary tensor block, little-endian:
//   "PTX1" | rank (u32) | extents (u64 each) | raw f64 data
void write_tensor(std::ostream& os, const Tensor& t);
std::vector<std::uint8_t> encode_tensor(const Tensor& t);

/// Decodes one block from `bytes` starting at `offset`, advancing it.
/// Throws FormatError carrying the absolute offset of the failure.
Tensor decode_tensor(std::span<const std::uint8_t> bytes, std::size_t& offset);

void save_tensor(const std::string& path, const Tensor& t);
Tensor load_tensor(const std::string& path);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

} // namespace pyratext
