#pragma once

// Thin wrappers over libcrypto for the fixed symmetric building blocks:
// SHA-2 digests, HMAC, and AES-128 in ECB (single block) and CTR modes.

#include <pcert/bytes.hpp>

#include <array>
#include <cstddef>

namespace pcert::sym {

enum class DigestAlg { Sha256, Sha384, Sha512 };

std::size_t digest_size(DigestAlg alg) noexcept;
Bytes digest(DigestAlg alg, ByteView data);
Bytes hmac(DigestAlg alg, ByteView key, ByteView data);

inline constexpr std::size_t aes_key_size = 16;
inline constexpr std::size_t aes_block_size = 16;
using AesKey = std::array<std::uint8_t, aes_key_size>;
using AesBlock = std::array<std::uint8_t, aes_block_size>;

/// Encrypts a sequence of independent 16-byte blocks under one key (ECB).
std::vector<AesBlock> aes128_ecb(const AesKey& key, std::span<const AesBlock> blocks);

/// AES-128-CTR with the given 16-byte initial counter block. Encryption and
/// decryption are the same operation.
Bytes aes128_ctr(const AesKey& key, const AesBlock& iv, ByteView data);

/// Constant-time comparison of two equal-length byte strings.
bool equal_ct(ByteView a, ByteView b) noexcept;

} // namespace pcert::sym
