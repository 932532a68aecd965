#include <pcert/error.hpp>
#include <pcert/symmetric.hpp>

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <memory>

namespace pcert::sym {

namespace {

const EVP_MD* md_for(DigestAlg alg)
{
    switch (alg) {
    case DigestAlg::Sha256: return EVP_sha256();
    case DigestAlg::Sha384: return EVP_sha384();
    case DigestAlg::Sha512: return EVP_sha512();
    }
    return EVP_sha256();
}

struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* ctx) const noexcept { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

CipherCtx new_cipher(const EVP_CIPHER* cipher, const AesKey& key, const std::uint8_t* iv)
{
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx || EVP_EncryptInit_ex(ctx.get(), cipher, nullptr, key.data(), iv) != 1)
        fail(ErrorCode::InvalidArgument, "cipher initialisation failed");
    EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
    return ctx;
}

} // namespace

std::size_t digest_size(DigestAlg alg) noexcept
{
    return static_cast<std::size_t>(EVP_MD_get_size(md_for(alg)));
}

Bytes digest(DigestAlg alg, ByteView data)
{
    Bytes out(digest_size(alg));
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, md_for(alg), nullptr) != 1)
        fail(ErrorCode::InvalidArgument, "digest failed");
    out.resize(len);
    return out;
}

Bytes hmac(DigestAlg alg, ByteView key, ByteView data)
{
    Bytes out(EVP_MAX_MD_SIZE);
    unsigned int len = 0;
    // HMAC() rejects a null key pointer even for zero length.
    static const std::uint8_t empty_key = 0;
    const void* key_ptr = key.empty() ? &empty_key : key.data();
    if (!HMAC(md_for(alg), key_ptr, static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len))
        fail(ErrorCode::InvalidArgument, "hmac failed");
    out.resize(len);
    return out;
}

std::vector<AesBlock> aes128_ecb(const AesKey& key, std::span<const AesBlock> blocks)
{
    std::vector<AesBlock> out(blocks.size());
    if (blocks.empty())
        return out;
    auto ctx = new_cipher(EVP_aes_128_ecb(), key, nullptr);
    int len = 0;
    auto total = static_cast<int>(blocks.size() * aes_block_size);
    if (EVP_EncryptUpdate(ctx.get(), out.front().data(), &len, blocks.front().data(), total) != 1 || len != total)
        fail(ErrorCode::InvalidArgument, "aes-ecb failed");
    return out;
}

Bytes aes128_ctr(const AesKey& key, const AesBlock& iv, ByteView data)
{
    Bytes out(data.size());
    if (data.empty())
        return out;
    auto ctx = new_cipher(EVP_aes_128_ctr(), key, iv.data());
    int len = 0;
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, data.data(), static_cast<int>(data.size())) != 1 ||
        static_cast<std::size_t>(len) != data.size())
        fail(ErrorCode::InvalidArgument, "aes-ctr failed");
    return out;
}

bool equal_ct(ByteView a, ByteView b) noexcept
{
    return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

} // namespace pcert::sym
