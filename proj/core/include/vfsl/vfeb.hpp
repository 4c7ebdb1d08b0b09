#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "vfsl/matrix.hpp"

namespace vfsl {

// VFEB embedding container. All integers little-endian:
//
//   0..3    "VFEB"
//   4..5    u16 version (= 1)
//   6..7    u16 flags (bit 0: rows are L2-normalized)
//   8..15   u64 rows
//   16..23  u64 cols
//   ...     rows * cols float32, row-major
//   ...     u32 names-block length (0 = no names)
//   ...     UTF-8 row names, one per line, each terminated by '\n'
inline constexpr std::uint16_t kVfebVersion = 1;
inline constexpr std::uint16_t kVfebFlagNormalized = 0x1;
inline constexpr std::size_t kVfebHeaderSize = 24;

std::string encode_vfeb(const EmbeddingMatrix& matrix);
EmbeddingMatrix decode_vfeb(std::span<const char> bytes);

EmbeddingMatrix read_vfeb(const std::filesystem::path& path);
void write_vfeb(const EmbeddingMatrix& matrix, const std::filesystem::path& path);

/// Whole-file helpers shared by the text and binary readers.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace vfsl
