#include <pcert/error.hpp>
#include <pcert/primitives.hpp>

#include <algorithm>
#include <string_view>

namespace pcert::crypto {

using namespace pcert::ec;

namespace {

constexpr std::string_view kdf_label = "pcert/ecies/kdf/v1";

ByteView as_bytes(std::string_view s)
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

Bytes pair_context(const Point& sender, const Point& recipient, const CurveParams& curve)
{
    ByteWriter w;
    w.lp16(encode_point(sender, curve));
    w.lp16(encode_point(recipient, curve));
    return std::move(w).bytes();
}

std::array<std::uint8_t, 8> fingerprint(ByteView context)
{
    auto h = sym::digest(sym::DigestAlg::Sha256, context);
    std::array<std::uint8_t, 8> out{};
    std::copy_n(h.begin(), out.size(), out.begin());
    return out;
}

std::array<std::uint8_t, tag_len> compute_tag(const DerivedKeys& keys, ByteView ciphertext, const CurveParams& curve)
{
    auto mac = sym::hmac(curve.digest(), keys.mac_key, ciphertext);
    std::array<std::uint8_t, tag_len> tag{};
    std::copy_n(mac.begin(), tag_len, tag.begin());
    return tag;
}

const sym::AesBlock zero_iv{};

} // namespace

mpz_class ecdh_shared(const Scalar& priv, const Point& peer_pub, const CurveParams& curve)
{
    if (peer_pub.is_infinity())
        fail(ErrorCode::DegenerateSharedPoint, "peer public key is the point at infinity");
    auto m = scalar_mul(priv, peer_pub, curve);
    if (m.is_infinity())
        fail(ErrorCode::DegenerateSharedPoint, "shared point is the point at infinity");
    return m.x();
}

DerivedKeys kdf_split(const mpz_class& x_m, std::size_t l, const CurveParams& curve, ByteView context)
{
    if (l == 0 || l >= curve.field_bytes())
        fail(ErrorCode::InsufficientMaterial,
             "split index " + std::to_string(l) + " needs a shared secret longer than " +
                 std::to_string(curve.field_bytes()) + " bytes");
    const auto secret = encode_field_element(x_m, curve);
    const std::size_t need = l + sym::aes_key_size;

    Bytes stream;
    for (std::uint32_t counter = 1; stream.size() < need; ++counter) {
        ByteWriter block;
        block.raw(secret).u32(counter).raw(as_bytes(kdf_label)).raw(context);
        auto d = sym::digest(curve.digest(), block.bytes());
        stream.insert(stream.end(), d.begin(), d.end());
    }

    DerivedKeys keys;
    keys.split_index = l;
    keys.mac_key.assign(stream.begin(), stream.begin() + static_cast<std::ptrdiff_t>(l));
    std::copy_n(stream.begin() + static_cast<std::ptrdiff_t>(l), sym::aes_key_size, keys.enc_key.begin());
    return keys;
}

Bytes encode_sealed(const SealedMessage& msg)
{
    ByteWriter w;
    w.lp32(msg.ciphertext);
    w.raw(msg.tag);
    return std::move(w).bytes();
}

SealedMessage decode_sealed(ByteView data)
{
    ByteReader r(data);
    SealedMessage msg;
    msg.ciphertext = r.lp32();
    auto tag = r.raw(tag_len);
    std::copy(tag.begin(), tag.end(), msg.tag.begin());
    r.expect_end();
    return msg;
}

SealedMessage ecies_encrypt(const Scalar& sender_priv, const Point& recipient_pub, ByteView plaintext,
                            const CurveParams& curve)
{
    auto x_m = ecdh_shared(sender_priv, recipient_pub, curve);
    auto sender_pub = scalar_mul_base(sender_priv, curve);
    auto context = pair_context(sender_pub, recipient_pub, curve);
    auto keys = kdf_split(x_m, default_mac_key_len, curve, context);

    SealedMessage msg;
    msg.ciphertext = sym::aes128_ctr(keys.enc_key, zero_iv, plaintext);
    msg.tag = compute_tag(keys, msg.ciphertext, curve);
    msg.context = fingerprint(context);
    return msg;
}

Bytes ecies_decrypt(const Scalar& recipient_priv, const Point& sender_pub, const SealedMessage& sealed,
                    const CurveParams& curve)
{
    auto x_m = ecdh_shared(recipient_priv, sender_pub, curve);
    auto recipient_pub = scalar_mul_base(recipient_priv, curve);
    auto context = pair_context(sender_pub, recipient_pub, curve);
    auto keys = kdf_split(x_m, default_mac_key_len, curve, context);

    auto expected = compute_tag(keys, sealed.ciphertext, curve);
    if (!sym::equal_ct(expected, sealed.tag))
        fail(ErrorCode::MacMismatch, "ECIES tag does not verify");
    return sym::aes128_ctr(keys.enc_key, zero_iv, sealed.ciphertext);
}

ExpansionKey random_expansion_key(Rng& rng)
{
    ExpansionKey k;
    rng.fill(k.key);
    return k;
}

Scalar expand_f(const ExpansionKey& key, std::uint64_t index, const CurveParams& curve)
{
    const std::size_t need = curve.order_bytes() + 8;
    const std::size_t blocks = (need + sym::aes_block_size - 1) / sym::aes_block_size;
    std::vector<sym::AesBlock> input(blocks);
    for (std::size_t j = 0; j < blocks; ++j) {
        ByteWriter w;
        w.u64(index).u64(j);
        std::copy_n(w.bytes().begin(), sym::aes_block_size, input[j].begin());
    }
    auto out = sym::aes128_ecb(key.key, input);
    Bytes stream;
    stream.reserve(blocks * sym::aes_block_size);
    for (const auto& b : out)
        stream.insert(stream.end(), b.begin(), b.end());
    stream.resize(need);
    return scalar_reduce(import_be(stream), curve);
}

} // namespace pcert::crypto
