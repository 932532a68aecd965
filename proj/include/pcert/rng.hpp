#pragma once

#include <pcert/bytes.hpp>
#include <pcert/symmetric.hpp>

#include <cstdint>
#include <string_view>

namespace pcert {

/// Source of uniform bytes. Implementations throw Error(RngFailure) when they
/// cannot deliver.
class Rng {
public:
    virtual ~Rng() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;

    Bytes bytes(std::size_t n)
    {
        Bytes out(n);
        fill(out);
        return out;
    }
};

/// Operating-system entropy via libcrypto's RAND_bytes.
class SystemRng final : public Rng {
public:
    void fill(std::span<std::uint8_t> out) override;
};

/// Deterministic AES-128-CTR keystream; the key is SHA-256(seed || label).
/// Distinct labels give independent streams from one seed.
class SeededRng final : public Rng {
public:
    explicit SeededRng(std::uint64_t seed, std::string_view label = {});
    void fill(std::span<std::uint8_t> out) override;

private:
    sym::AesKey key_{};
    std::uint64_t counter_ = 0;
    Bytes buffer_;
    std::size_t pos_ = 0;
};

/// Replays a fixed byte script, then fails with RngFailure. Test fixture.
class ScriptedRng final : public Rng {
public:
    explicit ScriptedRng(Bytes script) : script_(std::move(script)) {}
    void fill(std::span<std::uint8_t> out) override;

    std::size_t remaining() const noexcept { return script_.size() - pos_; }

private:
    Bytes script_;
    std::size_t pos_ = 0;
};

} // namespace pcert
