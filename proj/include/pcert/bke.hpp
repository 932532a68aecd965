#pragma once

// Butterfly key expansion: the device generates caterpillar material, the RA
// expands it into cocoon public keys, the PCA turns each cocoon into a
// butterfly public key plus an encrypted randomiser c, and the device
// reconstructs the matching private keys.

#include <pcert/primitives.hpp>

#include <functional>
#include <vector>

namespace pcert::bke {

using crypto::ExpansionKey;
using crypto::SealedMessage;
using crypto::Signature;
using ec::CurveParams;
using ec::KeyPair;
using ec::Point;
using ec::Scalar;

/// f(key, i) -> scalar mod n. The default is crypto::expand_f; tests swap in
/// a stub.
using Expander = std::function<Scalar(const ExpansionKey&, std::uint64_t, const CurveParams&)>;

const Expander& default_expander();

/// What the device sends to the RA: (ck, ek, A, P).
struct CaterpillarPublic {
    ExpansionKey ck;
    ExpansionKey ek;
    Point sign_pub; // A
    Point enc_pub;  // P

    friend bool operator==(const CaterpillarPublic&, const CaterpillarPublic&) = default;
};

struct CaterpillarMaterial {
    ExpansionKey ck;
    ExpansionKey ek;
    KeyPair sign_pair; // (a, A)
    KeyPair enc_pair;  // (p, P)

    CaterpillarPublic public_share() const { return {ck, ek, sign_pair.pub, enc_pair.pub}; }
};

struct CocoonPublic {
    std::uint32_t index = 0;
    Point sign_pub; // B_i
    Point enc_pub;  // Q_i

    friend bool operator==(const CocoonPublic&, const CocoonPublic&) = default;
};

struct CocoonPrivate {
    std::uint32_t index = 0;
    Scalar sign_priv; // b_i
    Scalar enc_priv;  // q_i
};

struct ButterflyResponse {
    std::uint32_t index = 0;
    Point butterfly_pub; // B_i + C
    SealedMessage wrapped_c;
    Signature pca_signature;

    friend bool operator==(const ButterflyResponse&, const ButterflyResponse&) = default;
};

CaterpillarMaterial gen_caterpillar(const CurveParams& curve, Rng& rng);

CocoonPublic cocoon_public(const CaterpillarPublic& share, std::uint32_t index, const CurveParams& curve,
                           const Expander& f = default_expander());

ButterflyResponse butterfly_public(const CocoonPublic& cocoon, const KeyPair& pca_keys, const CurveParams& curve,
                                   Rng& rng);

CocoonPrivate cocoon_private(const CaterpillarMaterial& material, std::uint32_t index, const CurveParams& curve,
                             const Expander& f = default_expander());

/// Device-side reconstruction of the butterfly private key and the PCA's
/// randomiser c. Checks, in order: index match (KeyMismatch), ECIES tag on
/// wrapped_c (MacMismatch), the PCA signature (BadPcaSignature), and finally
/// that the result matches butterfly_pub (KeyMismatch).
struct ButterflyPrivate {
    Scalar priv;       // (b_i + c) mod n
    Scalar randomiser; // c
};
ButterflyPrivate open_butterfly(const CocoonPrivate& cocoon_priv, const ButterflyResponse& response,
                                const Point& pca_pub, const CurveParams& curve);

Scalar butterfly_private(const CocoonPrivate& cocoon_priv, const ButterflyResponse& response, const Point& pca_pub,
                         const CurveParams& curve);

/// Runs cocoon_public then butterfly_public for start..start+count-1, in index
/// order. Element failures are rethrown with the index attached.
std::vector<std::pair<CocoonPublic, ButterflyResponse>> expand_batch(const CaterpillarPublic& share,
                                                                     std::uint32_t start, std::uint32_t count,
                                                                     const CurveParams& curve, Rng& rng,
                                                                     const KeyPair& pca_keys);

// ---- canonical encodings ---------------------------------------------------

/// ck(16) || ek(16) || lp16(A) || lp16(P)
Bytes encode_caterpillar_public(const CaterpillarPublic& share, const CurveParams& curve);
CaterpillarPublic decode_caterpillar_public(ByteView data, const CurveParams& curve);

/// u32 index || lp16(B_i) || lp16(Q_i)
Bytes encode_cocoon(const CocoonPublic& cocoon, const CurveParams& curve);
CocoonPublic decode_cocoon(ByteView data, const CurveParams& curve);

/// The bytes the PCA signs: u32 index || lp16(butterfly_pub) || lp32(sealed).
Bytes butterfly_signed_payload(std::uint32_t index, const Point& butterfly_pub, const SealedMessage& wrapped_c,
                               const CurveParams& curve);

/// signed payload || lp16(signature)
Bytes encode_butterfly(const ButterflyResponse& response, const CurveParams& curve);
ButterflyResponse decode_butterfly(ByteView data, const CurveParams& curve);

} // namespace pcert::bke
