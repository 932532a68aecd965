#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcert {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex); // throws MalformedEncoding

/// True if needle occurs contiguously anywhere in haystack. An empty needle
/// never matches.
bool contains(ByteView haystack, ByteView needle);

/// Big-endian append-only writer for the canonical binary layouts.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v);
    ByteWriter& u16(std::uint16_t v);
    ByteWriter& u32(std::uint32_t v);
    ByteWriter& u64(std::uint64_t v);
    ByteWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
    ByteWriter& raw(ByteView data);
    /// u16 length prefix, then the bytes.
    ByteWriter& lp16(ByteView data);
    /// u32 length prefix, then the bytes.
    ByteWriter& lp32(ByteView data);

    const Bytes& bytes() const& noexcept { return buf_; }
    Bytes bytes() && noexcept { return std::move(buf_); }

private:
    Bytes buf_;
};

/// Bounds-checked reader; every underflow throws MalformedEncoding.
class ByteReader {
public:
    explicit ByteReader(ByteView data) noexcept : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    Bytes raw(std::size_t n);
    Bytes lp16();
    Bytes lp32();

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    bool empty() const noexcept { return remaining() == 0; }
    /// Throws MalformedEncoding if unread bytes remain.
    void expect_end() const;

private:
    ByteView take(std::size_t n);

    ByteView data_;
    std::size_t pos_ = 0;
};

} // namespace pcert
