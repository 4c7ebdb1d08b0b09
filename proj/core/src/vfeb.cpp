#include "vfsl/vfeb.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace vfsl {
namespace {

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFFu));
  }
}

template <typename U>
U get_le(std::span<const char> bytes, std::size_t offset) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return value;
}

}  // namespace

std::string encode_vfeb(const EmbeddingMatrix& matrix) {
  matrix.validate();
  std::string names_block;
  if (matrix.names) {
    for (const auto& name : *matrix.names) {
      if (name.find('\n') != std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, "row name contains a newline: " + name);
      }
      names_block += name;
      names_block += '\n';
    }
    if (names_block.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::InvalidArgument, "names block exceeds 4 GiB");
    }
  }

  const auto& m = matrix.matrix;
  std::string out;
  out.reserve(kVfebHeaderSize + 4 * m.size() + 4 + names_block.size());
  out += "VFEB";
  put_le<std::uint16_t>(out, kVfebVersion);
  put_le<std::uint16_t>(out, matrix.normalized ? kVfebFlagNormalized : 0);
  put_le<std::uint64_t>(out, m.rows());
  put_le<std::uint64_t>(out, m.cols());
  for (float v : m.values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(names_block.size()));
  out += names_block;
  return out;
}

EmbeddingMatrix decode_vfeb(std::span<const char> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "VFEB", 4) != 0) {
    throw Error(ErrorCode::BadMagic, "missing VFEB magic bytes");
  }
  if (bytes.size() < kVfebHeaderSize) {
    throw Error(ErrorCode::TruncatedPayload, "file shorter than the VFEB header");
  }
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kVfebVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "VFEB version " + std::to_string(version));
  }
  const auto flags = get_le<std::uint16_t>(bytes, 6);
  const auto rows = get_le<std::uint64_t>(bytes, 8);
  const auto cols = get_le<std::uint64_t>(bytes, 16);
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::EmptyMatrix, "VFEB header declares an empty matrix");
  }

  const std::size_t available = (bytes.size() - kVfebHeaderSize) / 4;
  if (rows > available || cols > available / rows) {
    throw Error(ErrorCode::TruncatedPayload,
                "header declares " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " entries but the payload is shorter");
  }
  const std::size_t count = rows * cols;
  std::size_t offset = kVfebHeaderSize;

  EmbeddingMatrix out;
  out.normalized = (flags & kVfebFlagNormalized) != 0;
  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i, offset += 4) {
    data[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
  }
  out.matrix = DenseMatrix(rows, cols, std::move(data));

  if (bytes.size() - offset < 4) {
    throw Error(ErrorCode::TruncatedPayload, "missing names-block length");
  }
  const auto names_len = get_le<std::uint32_t>(bytes, offset);
  offset += 4;
  if (bytes.size() - offset < names_len) {
    throw Error(ErrorCode::TruncatedPayload, "names block shorter than declared");
  }
  if (bytes.size() - offset > names_len) {
    throw Error(ErrorCode::TrailingData, "unexpected bytes after the names block");
  }
  if (names_len > 0) {
    std::string_view block(bytes.data() + offset, names_len);
    std::vector<std::string> names;
    std::size_t start = 0;
    while (start < block.size()) {
      auto end = block.find('\n', start);
      if (end == std::string_view::npos) end = block.size();
      names.emplace_back(block.substr(start, end - start));
      start = end + 1;
    }
    if (names.size() != rows) {
      throw Error(ErrorCode::NameCountMismatch,
                  std::to_string(names.size()) + " names for " + std::to_string(rows) + " rows");
    }
    out.names = std::move(names);
  }

  out.validate();
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  return contents;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

EmbeddingMatrix read_vfeb(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_vfeb(bytes);
}

void write_vfeb(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
  write_file(path, encode_vfeb(matrix));
}

}  // namespace vfsl
