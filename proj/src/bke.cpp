#include <pcert/bke.hpp>
#include <pcert/error.hpp>

namespace pcert::bke {

using namespace pcert::ec;
using crypto::decode_sealed;
using crypto::encode_sealed;

const Expander& default_expander()
{
    static const Expander f = [](const ExpansionKey& key, std::uint64_t i, const CurveParams& curve) {
        return crypto::expand_f(key, i, curve);
    };
    return f;
}

CaterpillarMaterial gen_caterpillar(const CurveParams& curve, Rng& rng)
{
    CaterpillarMaterial m;
    m.ck = crypto::random_expansion_key(rng);
    do {
        m.ek = crypto::random_expansion_key(rng);
    } while (m.ek == m.ck);
    m.sign_pair = keygen(curve, rng);
    m.enc_pair = keygen(curve, rng);
    return m;
}

CocoonPublic cocoon_public(const CaterpillarPublic& share, std::uint32_t index, const CurveParams& curve,
                           const Expander& f)
{
    if (share.sign_pub.is_infinity() || !on_curve(share.sign_pub, curve))
        fail(ErrorCode::OffCurveInput, "caterpillar signing key A is not a valid curve point");
    if (share.enc_pub.is_infinity() || !on_curve(share.enc_pub, curve))
        fail(ErrorCode::OffCurveInput, "caterpillar encryption key P is not a valid curve point");

    CocoonPublic out;
    out.index = index;
    out.sign_pub = point_add(share.sign_pub, scalar_mul_base(f(share.ck, index, curve), curve), curve);
    out.enc_pub = point_add(share.enc_pub, scalar_mul_base(f(share.ek, index, curve), curve), curve);
    if (out.sign_pub.is_infinity() || out.enc_pub.is_infinity())
        fail(ErrorCode::DegenerateSharedPoint, "cocoon key collapsed to the point at infinity");
    return out;
}

ButterflyResponse butterfly_public(const CocoonPublic& cocoon, const KeyPair& pca_keys, const CurveParams& curve,
                                   Rng& rng)
{
    if (cocoon.sign_pub.is_infinity() || !on_curve(cocoon.sign_pub, curve) || cocoon.enc_pub.is_infinity() ||
        !on_curve(cocoon.enc_pub, curve))
        fail(ErrorCode::OffCurveInput, "cocoon public keys are not valid curve points");

    KeyPair c;
    Point butterfly;
    do {
        c = keygen(curve, rng);
        butterfly = point_add(cocoon.sign_pub, c.pub, curve);
    } while (butterfly.is_infinity());

    ButterflyResponse out;
    out.index = cocoon.index;
    out.butterfly_pub = std::move(butterfly);
    out.wrapped_c = crypto::ecies_encrypt(pca_keys.priv, cocoon.enc_pub, encode_scalar(c.priv, curve), curve);
    auto payload = butterfly_signed_payload(out.index, out.butterfly_pub, out.wrapped_c, curve);
    out.pca_signature = crypto::ecdsa_sign(pca_keys.priv, payload, curve, rng);
    return out;
}

CocoonPrivate cocoon_private(const CaterpillarMaterial& material, std::uint32_t index, const CurveParams& curve,
                             const Expander& f)
{
    CocoonPrivate out;
    out.index = index;
    out.sign_priv = scalar_add(material.sign_pair.priv, f(material.ck, index, curve), curve);
    out.enc_priv = scalar_add(material.enc_pair.priv, f(material.ek, index, curve), curve);
    return out;
}

ButterflyPrivate open_butterfly(const CocoonPrivate& cocoon_priv, const ButterflyResponse& response,
                                const Point& pca_pub, const CurveParams& curve)
{
    if (cocoon_priv.index != response.index)
        fail(ErrorCode::KeyMismatch, "response index " + std::to_string(response.index) +
                                         " does not match cocoon index " + std::to_string(cocoon_priv.index));

    auto plain = crypto::ecies_decrypt(cocoon_priv.enc_priv, pca_pub, response.wrapped_c, curve);

    auto payload = butterfly_signed_payload(response.index, response.butterfly_pub, response.wrapped_c, curve);
    if (!crypto::ecdsa_verify(pca_pub, payload, response.pca_signature, curve))
        fail(ErrorCode::BadPcaSignature, "butterfly response not signed by the PCA");

    Scalar c;
    try {
        c = decode_scalar(plain, curve);
    } catch (const Error&) {
        fail(ErrorCode::KeyMismatch, "wrapped randomiser is not a scalar for " + curve.name());
    }
    if (c.is_zero())
        fail(ErrorCode::KeyMismatch, "wrapped randomiser is zero");

    auto priv = scalar_add(cocoon_priv.sign_priv, c, curve);
    if (!(scalar_mul_base(priv, curve) == response.butterfly_pub))
        fail(ErrorCode::KeyMismatch, "reconstructed butterfly key does not match the issued public key");
    return {std::move(priv), std::move(c)};
}

Scalar butterfly_private(const CocoonPrivate& cocoon_priv, const ButterflyResponse& response, const Point& pca_pub,
                         const CurveParams& curve)
{
    return open_butterfly(cocoon_priv, response, pca_pub, curve).priv;
}

std::vector<std::pair<CocoonPublic, ButterflyResponse>> expand_batch(const CaterpillarPublic& share,
                                                                     std::uint32_t start, std::uint32_t count,
                                                                     const CurveParams& curve, Rng& rng,
                                                                     const KeyPair& pca_keys)
{
    if (count == 0)
        fail(ErrorCode::InvalidArgument, "batch count must be at least 1");
    std::vector<std::pair<CocoonPublic, ButterflyResponse>> out;
    out.reserve(count);
    for (std::uint32_t k = 0; k < count; ++k) {
        const std::uint32_t i = start + k;
        try {
            auto cocoon = cocoon_public(share, i, curve);
            auto response = butterfly_public(cocoon, pca_keys, curve, rng);
            out.emplace_back(std::move(cocoon), std::move(response));
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), i);
        }
    }
    return out;
}

// ---- encodings -------------------------------------------------------------

Bytes encode_caterpillar_public(const CaterpillarPublic& share, const CurveParams& curve)
{
    ByteWriter w;
    w.raw(share.ck.key).raw(share.ek.key);
    w.lp16(encode_point(share.sign_pub, curve));
    w.lp16(encode_point(share.enc_pub, curve));
    return std::move(w).bytes();
}

CaterpillarPublic decode_caterpillar_public(ByteView data, const CurveParams& curve)
{
    ByteReader r(data);
    CaterpillarPublic share;
    auto ck = r.raw(sym::aes_key_size);
    auto ek = r.raw(sym::aes_key_size);
    std::copy(ck.begin(), ck.end(), share.ck.key.begin());
    std::copy(ek.begin(), ek.end(), share.ek.key.begin());
    share.sign_pub = decode_point(r.lp16(), curve);
    share.enc_pub = decode_point(r.lp16(), curve);
    r.expect_end();
    return share;
}

Bytes encode_cocoon(const CocoonPublic& cocoon, const CurveParams& curve)
{
    ByteWriter w;
    w.u32(cocoon.index);
    w.lp16(encode_point(cocoon.sign_pub, curve));
    w.lp16(encode_point(cocoon.enc_pub, curve));
    return std::move(w).bytes();
}

CocoonPublic decode_cocoon(ByteView data, const CurveParams& curve)
{
    ByteReader r(data);
    CocoonPublic c;
    c.index = r.u32();
    c.sign_pub = decode_point(r.lp16(), curve);
    c.enc_pub = decode_point(r.lp16(), curve);
    r.expect_end();
    return c;
}

Bytes butterfly_signed_payload(std::uint32_t index, const Point& butterfly_pub, const SealedMessage& wrapped_c,
                               const CurveParams& curve)
{
    ByteWriter w;
    w.u32(index);
    w.lp16(encode_point(butterfly_pub, curve));
    w.lp32(encode_sealed(wrapped_c));
    return std::move(w).bytes();
}

Bytes encode_butterfly(const ButterflyResponse& response, const CurveParams& curve)
{
    ByteWriter w;
    w.raw(butterfly_signed_payload(response.index, response.butterfly_pub, response.wrapped_c, curve));
    w.lp16(crypto::encode_signature(response.pca_signature, curve));
    return std::move(w).bytes();
}

ButterflyResponse decode_butterfly(ByteView data, const CurveParams& curve)
{
    ByteReader r(data);
    ButterflyResponse out;
    out.index = r.u32();
    out.butterfly_pub = decode_point(r.lp16(), curve);
    out.wrapped_c = decode_sealed(r.lp32());
    out.pca_signature = crypto::decode_signature(r.lp16(), curve);
    r.expect_end();
    return out;
}

} // namespace pcert::bke
