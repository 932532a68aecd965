#include <pcert/error.hpp>
#include <pcert/primitives.hpp>

namespace pcert::crypto {

using namespace pcert::ec;

Bytes encode_signature(const Signature& sig, const CurveParams& curve)
{
    ByteWriter w;
    w.raw(encode_scalar(sig.r, curve));
    w.raw(encode_scalar(sig.s, curve));
    return std::move(w).bytes();
}

Signature decode_signature(ByteView data, const CurveParams& curve)
{
    const auto width = curve.order_bytes();
    if (data.size() != 2 * width)
        fail(ErrorCode::MalformedEncoding, "bad signature length");
    return {decode_scalar(data.first(width), curve), decode_scalar(data.subspan(width), curve)};
}

Scalar message_digest(ByteView message, const CurveParams& curve)
{
    auto h = sym::digest(curve.digest(), message);
    mpz_class e = import_be(h);
    const std::size_t hbits = h.size() * 8;
    if (hbits > curve.order_bits())
        e >>= static_cast<mp_bitcnt_t>(hbits - curve.order_bits());
    return Scalar(std::move(e));
}

std::optional<Signature> sign_digest(const Scalar& priv, const Scalar& e, const Scalar& k, const CurveParams& curve)
{
    auto big_k = scalar_mul_base(k, curve);
    if (big_k.is_infinity())
        return std::nullopt;
    auto r = scalar_reduce(big_k.x(), curve);
    if (r.is_zero())
        return std::nullopt;
    // s = (e + priv * r) / k
    auto s = scalar_mul(scalar_add(scalar_reduce(e.value(), curve), scalar_mul(priv, r, curve), curve),
                        scalar_inv(k, curve), curve);
    if (s.is_zero())
        return std::nullopt;
    return Signature{std::move(r), std::move(s)};
}

bool verify_digest(const Point& pub, const Scalar& e, const Signature& sig, const CurveParams& curve)
{
    const auto& n = curve.order();
    auto in_range = [&](const Scalar& v) { return sgn(v.value()) > 0 && cmp(v.value(), n) < 0; };
    if (!in_range(sig.r) || !in_range(sig.s))
        return false;
    if (pub.is_infinity() || !on_curve(pub, curve))
        return false;
    auto w = scalar_inv(sig.s, curve);
    auto u = scalar_mul(scalar_reduce(e.value(), curve), w, curve);
    auto v = scalar_mul(sig.r, w, curve);
    auto d = mul_add(u, v, pub, curve);
    if (d.is_infinity())
        return false;
    return scalar_reduce(d.x(), curve) == sig.r;
}

Signature ecdsa_sign(const Scalar& priv, ByteView message, const CurveParams& curve, Rng& rng)
{
    if (priv.is_zero() || cmp(priv.value(), curve.order()) >= 0)
        fail(ErrorCode::InvalidArgument, "signing key out of range");
    auto e = message_digest(message, curve);
    for (;;) {
        auto k = random_scalar(curve, rng);
        if (auto sig = sign_digest(priv, e, k, curve))
            return *sig;
    }
}

bool ecdsa_verify(const Point& pub, ByteView message, const Signature& sig, const CurveParams& curve)
{
    return verify_digest(pub, message_digest(message, curve), sig, curve);
}

} // namespace pcert::crypto
