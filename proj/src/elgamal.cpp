#include "crex/elgamal.hpp"

#include <openssl/evp.h>

#include <memory>

#include "crex/codec.hpp"
#include "crex/errors.hpp"

namespace crex {

namespace {

constexpr std::size_t kTagLen = 16;

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

Digest derive_key(const GroupParams& gp, const GroupElement& gen, const GroupElement& ephemeral,
                  const GroupElement& shared) {
    Bytes gid = to_bytes(gp.id);
    Bytes ge = gen.encode(gp);
    Bytes ee = ephemeral.encode(gp);
    Bytes se = shared.encode(gp);
    return sha256_parts("crex.kem", {gid, ge, ee, se});
}

// One key per ciphertext (fresh ephemeral), so a fixed zero IV is sound.
const std::uint8_t kIv[12] = {};

}  // namespace

Bytes Ciphertext::encode(const GroupParams& gp) const {
    Bytes out = ephemeral.encode(gp);
    put_u32(out, static_cast<std::uint32_t>(body.size()));
    append(out, body);
    append(out, tag);
    return out;
}

Ciphertext Ciphertext::decode(const GroupParams& gp, BytesView in) {
    std::size_t ew = gp.element_width();
    if (in.size() < ew + 4 + kTagLen)
        throw ParseError(0, "ciphertext too short");
    Ciphertext ct;
    ct.ephemeral = GroupElement::decode(gp, in.subspan(0, ew));
    std::size_t pos = ew;
    std::uint32_t blen = get_u32(in, pos);
    if (in.size() != ew + 4 + blen + kTagLen)
        throw ParseError(pos, "ciphertext body length mismatch");
    ct.body.assign(in.begin() + pos, in.begin() + pos + blen);
    ct.tag.assign(in.begin() + pos + blen, in.end());
    return ct;
}

Ciphertext encrypt(const GroupParams& gp, const GroupElement& pk, const GroupElement& gen,
                   BytesView msg, RandomSource& rng) {
    Scalar r = Scalar::random_nonzero(gp, rng);
    Ciphertext ct;
    ct.ephemeral = gen.pow(r, gp);
    Digest key = derive_key(gp, gen, ct.ephemeral, pk.pow(r, gp));

    CipherCtx ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
    if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), kIv) != 1)
        throw Error("gcm init failed");
    ct.body.resize(msg.size());
    int len = 0;
    if (!msg.empty() && EVP_EncryptUpdate(ctx.get(), ct.body.data(), &len, msg.data(),
                                          static_cast<int>(msg.size())) != 1)
        throw Error("gcm encrypt failed");
    int fin = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), ct.body.data() + len, &fin) != 1)
        throw Error("gcm finalize failed");
    ct.tag.resize(kTagLen);
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagLen, ct.tag.data()) != 1)
        throw Error("gcm tag extraction failed");
    return ct;
}

Bytes decrypt(const GroupParams& gp, const Scalar& sk, const GroupElement& gen,
              const Ciphertext& ct) {
    if (ct.tag.size() != kTagLen)
        throw AuthFailure("ciphertext tag has wrong length");
    Digest key = derive_key(gp, gen, ct.ephemeral, ct.ephemeral.pow(sk, gp));

    CipherCtx ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
    if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), kIv) != 1)
        throw Error("gcm init failed");
    Bytes out(ct.body.size());
    int len = 0;
    if (!ct.body.empty() && EVP_DecryptUpdate(ctx.get(), out.data(), &len, ct.body.data(),
                                              static_cast<int>(ct.body.size())) != 1)
        throw AuthFailure("authentication failure");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagLen,
                            const_cast<std::uint8_t*>(ct.tag.data())) != 1)
        throw Error("gcm tag set failed");
    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1)
        throw AuthFailure("authentication failure");
    return out;
}

}  // namespace crex
