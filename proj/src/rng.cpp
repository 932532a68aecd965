#include <pcert/error.hpp>
#include <pcert/rng.hpp>

#include <openssl/rand.h>

#include <algorithm>
#include <climits>

namespace pcert {

void SystemRng::fill(std::span<std::uint8_t> out)
{
    while (!out.empty()) {
        auto chunk = std::min<std::size_t>(out.size(), INT_MAX);
        if (RAND_bytes(out.data(), static_cast<int>(chunk)) != 1)
            fail(ErrorCode::RngFailure, "RAND_bytes failed");
        out = out.subspan(chunk);
    }
}

SeededRng::SeededRng(std::uint64_t seed, std::string_view label)
{
    ByteWriter w;
    w.u64(seed);
    w.raw(ByteView(reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
    auto h = sym::digest(sym::DigestAlg::Sha256, w.bytes());
    std::copy_n(h.begin(), key_.size(), key_.begin());
}

void SeededRng::fill(std::span<std::uint8_t> out)
{
    for (auto& b : out) {
        if (pos_ == buffer_.size()) {
            constexpr std::size_t blocks = 16;
            sym::AesBlock iv{};
            for (int i = 0; i < 8; ++i)
                iv[8 + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
            counter_ += blocks;
            buffer_ = sym::aes128_ctr(key_, iv, Bytes(blocks * sym::aes_block_size, 0));
            pos_ = 0;
        }
        b = buffer_[pos_++];
    }
}

void ScriptedRng::fill(std::span<std::uint8_t> out)
{
    if (out.size() > remaining())
        fail(ErrorCode::RngFailure, "scripted rng exhausted");
    std::copy_n(script_.begin() + static_cast<std::ptrdiff_t>(pos_), out.size(), out.begin());
    pos_ += out.size();
}

} // namespace pcert
