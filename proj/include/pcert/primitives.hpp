#pragma once

// ECDSA, ECDH, the static-static ECIES construction and the AES-based
// expansion function used by butterfly key expansion.

#include <pcert/curve.hpp>

#include <array>
#include <optional>

namespace pcert::crypto {

using ec::CurveParams;
using ec::Point;
using ec::Scalar;

// ---- ECDSA -----------------------------------------------------------------

struct Signature {
    Scalar r; // x_K mod n
    Scalar s;

    friend bool operator==(const Signature&, const Signature&) = default;
};

/// r || s, each order-width big-endian.
Bytes encode_signature(const Signature& sig, const CurveParams& curve);
Signature decode_signature(ByteView data, const CurveParams& curve);

/// Digest with the curve's hash, leftmost order_bits bits as an integer.
Scalar message_digest(ByteView message, const CurveParams& curve);

/// Deterministic core: given digest e and nonce k in [1, n). Returns nullopt
/// when r or s comes out zero.
std::optional<Signature> sign_digest(const Scalar& priv, const Scalar& e, const Scalar& k, const CurveParams& curve);

/// Never throws on bad input; anything malformed rejects.
bool verify_digest(const Point& pub, const Scalar& e, const Signature& sig, const CurveParams& curve);

/// Fresh nonce from rng on every call, retrying on degenerate r or s.
Signature ecdsa_sign(const Scalar& priv, ByteView message, const CurveParams& curve, Rng& rng);
bool ecdsa_verify(const Point& pub, ByteView message, const Signature& sig, const CurveParams& curve);

// ---- ECDH / ECIES ----------------------------------------------------------

/// x-coordinate of priv * peer_pub. DegenerateSharedPoint if the product is
/// infinity (or peer_pub is), OffCurveInput if peer_pub is off-curve.
mpz_class ecdh_shared(const Scalar& priv, const Point& peer_pub, const CurveParams& curve);

inline constexpr std::size_t default_mac_key_len = 16;
inline constexpr std::size_t tag_len = 32;

struct DerivedKeys {
    Bytes mac_key;      // first l bytes of the KDF stream
    sym::AesKey enc_key; // next 16 bytes
    std::size_t split_index = 0;

    friend bool operator==(const DerivedKeys&, const DerivedKeys&) = default;
};

/// Counter-mode hash KDF over the field-width encoding of x_M, bound to
/// context, then split at l. InsufficientMaterial unless 0 < l < field width.
DerivedKeys kdf_split(const mpz_class& x_m, std::size_t l, const CurveParams& curve, ByteView context = {});

struct SealedMessage {
    Bytes ciphertext;
    std::array<std::uint8_t, tag_len> tag{};
    /// Fingerprint of the (sender, recipient) public-key pair. Informational;
    /// not part of the wire encoding, so decoded messages carry zeros here.
    std::array<std::uint8_t, 8> context{};

    friend bool operator==(const SealedMessage& a, const SealedMessage& b)
    {
        return a.ciphertext == b.ciphertext && a.tag == b.tag;
    }
};

/// u32 ciphertext length || ciphertext || 32-byte tag.
Bytes encode_sealed(const SealedMessage& msg);
SealedMessage decode_sealed(ByteView data);

SealedMessage ecies_encrypt(const Scalar& sender_priv, const Point& recipient_pub, ByteView plaintext,
                            const CurveParams& curve);
/// Tag is checked before any decryption; MacMismatch on failure.
Bytes ecies_decrypt(const Scalar& recipient_priv, const Point& sender_pub, const SealedMessage& sealed,
                    const CurveParams& curve);

// ---- expansion function ----------------------------------------------------

struct ExpansionKey {
    sym::AesKey key{};

    friend bool operator==(const ExpansionKey&, const ExpansionKey&) = default;
};

ExpansionKey random_expansion_key(Rng& rng);

/// AES-ECB over blocks (i || j), i and j as 8-byte big-endian, j = 0, 1, ...
/// until order_bytes + 8 bytes are available; big-endian integer mod n.
Scalar expand_f(const ExpansionKey& key, std::uint64_t index, const CurveParams& curve);

} // namespace pcert::crypto
