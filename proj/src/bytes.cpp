#include <pcert/bytes.hpp>
#include <pcert/error.hpp>

#include <algorithm>

namespace pcert {

std::string to_hex(ByteView data)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

namespace {

int nibble(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

} // namespace

Bytes from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0)
        fail(ErrorCode::MalformedEncoding, "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            fail(ErrorCode::MalformedEncoding, "invalid hex digit");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

bool contains(ByteView haystack, ByteView needle)
{
    if (needle.empty() || needle.size() > haystack.size())
        return false;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

ByteWriter& ByteWriter::u8(std::uint8_t v)
{
    buf_.push_back(v);
    return *this;
}

ByteWriter& ByteWriter::u16(std::uint16_t v)
{
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    buf_.push_back(static_cast<std::uint8_t>(v));
    return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v)
{
    for (int shift = 24; shift >= 0; shift -= 8)
        buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v)
{
    for (int shift = 56; shift >= 0; shift -= 8)
        buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::raw(ByteView data)
{
    buf_.insert(buf_.end(), data.begin(), data.end());
    return *this;
}

ByteWriter& ByteWriter::lp16(ByteView data)
{
    if (data.size() > 0xffff)
        fail(ErrorCode::InvalidArgument, "field too long for u16 length prefix");
    u16(static_cast<std::uint16_t>(data.size()));
    return raw(data);
}

ByteWriter& ByteWriter::lp32(ByteView data)
{
    if (data.size() > 0xffffffffu)
        fail(ErrorCode::InvalidArgument, "field too long for u32 length prefix");
    u32(static_cast<std::uint32_t>(data.size()));
    return raw(data);
}

ByteView ByteReader::take(std::size_t n)
{
    if (n > remaining())
        fail(ErrorCode::MalformedEncoding, "truncated input");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t ByteReader::u8()
{
    return take(1)[0];
}

std::uint16_t ByteReader::u16()
{
    auto b = take(2);
    return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t ByteReader::u32()
{
    auto b = take(4);
    std::uint32_t v = 0;
    for (auto x : b)
        v = (v << 8) | x;
    return v;
}

std::uint64_t ByteReader::u64()
{
    auto b = take(8);
    std::uint64_t v = 0;
    for (auto x : b)
        v = (v << 8) | x;
    return v;
}

Bytes ByteReader::raw(std::size_t n)
{
    auto b = take(n);
    return Bytes(b.begin(), b.end());
}

Bytes ByteReader::lp16()
{
    return raw(u16());
}

Bytes ByteReader::lp32()
{
    return raw(u32());
}

void ByteReader::expect_end() const
{
    if (!empty())
        fail(ErrorCode::MalformedEncoding, "trailing bytes after structure");
}

} // namespace pcert
