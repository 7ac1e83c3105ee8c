#include "crex/group.hpp"

#include "crex/errors.hpp"

namespace crex {

namespace {

const char* kModp2048Hex =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

}  // namespace

GroupParams GroupParams::preset(std::string_view id) {
    GroupParams gp;
    gp.id = std::string(id);
    if (id == "micro11") {
        gp.p = 23;
        gp.q = 11;
        gp.g = 2;
    } else if (id == "test16") {
        // Largest 16-bit safe prime; g = 4 is a quadratic residue, so it
        // generates the order-q subgroup.
        gp.p = 65267;
        gp.q = 32633;
        gp.g = 4;
    } else if (id == "modp2048") {
        gp.p = mpz_class(kModp2048Hex, 16);
        gp.q = (gp.p - 1) / 2;
        gp.g = 2;  // p = 7 mod 8, so 2 is a QR of order q
    } else {
        throw ConfigError("unknown group preset '" + std::string(id) + "'");
    }
    return gp;
}

void GroupParams::validate() const {
    if (mpz_probab_prime_p(p.get_mpz_t(), 24) == 0)
        throw Error("group modulus p is composite");
    if (mpz_probab_prime_p(q.get_mpz_t(), 24) == 0)
        throw Error("subgroup order q is composite");
    if ((p - 1) % q != 0)
        throw Error("q does not divide p-1");
    if (g <= 1 || g >= p)
        throw Error("generator out of range");
    mpz_class r;
    mpz_powm(r.get_mpz_t(), g.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    if (r != 1)
        throw Error("generator is not of order q");
}

Bytes encode_mpz(const mpz_class& v, std::size_t width) {
    Bytes out(width, 0);
    if (v == 0)
        return out;
    std::size_t need = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
    if (need > width)
        throw Error("integer does not fit the fixed encoding width");
    std::size_t count = 0;
    mpz_export(out.data() + (width - need), &count, 1, 1, 1, 0, v.get_mpz_t());
    return out;
}

mpz_class decode_mpz(BytesView in) {
    mpz_class v;
    if (!in.empty())
        mpz_import(v.get_mpz_t(), in.size(), 1, 1, 1, 0, in.data());
    return v;
}

Scalar Scalar::reduced(mpz_class v, const GroupParams& gp) {
    mpz_class r = v % gp.q;
    if (r < 0)
        r += gp.q;
    return Scalar(std::move(r));
}

Scalar Scalar::random(const GroupParams& gp, RandomSource& rng) {
    return Scalar(rng.below(gp.q));
}

Scalar Scalar::random_nonzero(const GroupParams& gp, RandomSource& rng) {
    return Scalar(rng.nonzero_below(gp.q));
}

Scalar Scalar::add(const Scalar& o, const GroupParams& gp) const {
    return reduced(v_ + o.v_, gp);
}

Scalar Scalar::mul(const Scalar& o, const GroupParams& gp) const {
    return reduced(v_ * o.v_, gp);
}

Bytes Scalar::encode(const GroupParams& gp) const {
    return encode_mpz(v_, gp.scalar_width());
}

Scalar Scalar::decode(const GroupParams& gp, BytesView in) {
    if (in.size() != gp.scalar_width())
        throw ParseError(0, "scalar has wrong width");
    mpz_class v = decode_mpz(in);
    if (v >= gp.q)
        throw ParseError(0, "scalar out of range");
    return Scalar(std::move(v));
}

bool GroupElement::is_member(const mpz_class& v, const GroupParams& gp) {
    if (v < 1 || v >= gp.p)
        return false;
    mpz_class r;
    mpz_powm(r.get_mpz_t(), v.get_mpz_t(), gp.q.get_mpz_t(), gp.p.get_mpz_t());
    return r == 1;
}

GroupElement GroupElement::checked(mpz_class v, const GroupParams& gp) {
    if (!is_member(v, gp))
        throw ValidationFailure(0, "value is not a member of G_q");
    return GroupElement(std::move(v));
}

GroupElement GroupElement::assume_member(mpz_class v) {
    return GroupElement(std::move(v));
}

GroupElement GroupElement::mul(const GroupElement& o, const GroupParams& gp) const {
    return GroupElement(mpz_class(v_ * o.v_ % gp.p));
}

GroupElement GroupElement::pow(const Scalar& e, const GroupParams& gp) const {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), v_.get_mpz_t(), e.value().get_mpz_t(), gp.p.get_mpz_t());
    return GroupElement(std::move(r));
}

Bytes GroupElement::encode(const GroupParams& gp) const {
    return encode_mpz(v_, gp.element_width());
}

GroupElement GroupElement::decode(const GroupParams& gp, BytesView in) {
    if (in.size() != gp.element_width())
        throw ParseError(0, "group element has wrong width");
    mpz_class v = decode_mpz(in);
    if (!is_member(v, gp))
        throw ParseError(0, "group element is not a member of G_q");
    return GroupElement(std::move(v));
}

GroupElement generator(const GroupParams& gp) {
    return GroupElement::assume_member(gp.g);
}

KeyPair keygen(const GroupParams& gp, RandomSource& rng) {
    Scalar sk = Scalar::random_nonzero(gp, rng);
    return KeyPair{sk, generator(gp).pow(sk, gp)};
}

Scalar hash_to_scalar(const GroupParams& gp, std::string_view domain_tag,
                      std::initializer_list<BytesView> parts) {
    Digest d = sha256_parts(domain_tag, parts);
    return Scalar::reduced(decode_mpz(d), gp);
}

}  // namespace crex
