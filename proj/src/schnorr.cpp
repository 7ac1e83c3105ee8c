#include "crex/schnorr.hpp"

#include "crex/errors.hpp"

namespace crex {

namespace {

Scalar challenge(const GroupParams& gp, std::string_view tag, const GroupElement& gen,
                 const GroupElement& pk, const GroupElement& commitment, BytesView bound) {
    Bytes gid = to_bytes(gp.id);
    Bytes ge = gen.encode(gp);
    Bytes pe = pk.encode(gp);
    Bytes ce = commitment.encode(gp);
    return hash_to_scalar(gp, tag, {gid, ge, pe, ce, bound});
}

}  // namespace

Bytes SchnorrSignature::encode(const GroupParams& gp) const {
    Bytes out = generator.encode(gp);
    append(out, commitment.encode(gp));
    append(out, response.encode(gp));
    return out;
}

SchnorrSignature SchnorrSignature::decode(const GroupParams& gp, BytesView in) {
    std::size_t ew = gp.element_width();
    std::size_t sw = gp.scalar_width();
    if (in.size() != 2 * ew + sw)
        throw ParseError(0, "signature has wrong width");
    return SchnorrSignature{GroupElement::decode(gp, in.subspan(0, ew)),
                            GroupElement::decode(gp, in.subspan(ew, ew)),
                            Scalar::decode(gp, in.subspan(2 * ew, sw))};
}

Bytes DlogProof::encode(const GroupParams& gp) const {
    Bytes out = commitment.encode(gp);
    append(out, response.encode(gp));
    return out;
}

DlogProof DlogProof::decode(const GroupParams& gp, BytesView in) {
    std::size_t ew = gp.element_width();
    std::size_t sw = gp.scalar_width();
    if (in.size() != ew + sw)
        throw ParseError(0, "proof has wrong width");
    return DlogProof{GroupElement::decode(gp, in.subspan(0, ew)),
                     Scalar::decode(gp, in.subspan(ew, sw))};
}

SchnorrSignature schnorr_sign(const GroupParams& gp, const Scalar& sk, const GroupElement& gen,
                              BytesView msg, RandomSource& rng) {
    if (gen.is_one())
        throw Error("degenerate generator");
    GroupElement pk = gen.pow(sk, gp);
    Scalar k = Scalar::random_nonzero(gp, rng);
    GroupElement commitment = gen.pow(k, gp);
    Scalar c = challenge(gp, "crex.schnorr.sig", gen, pk, commitment, msg);
    Scalar response = k.add(c.mul(sk, gp), gp);
    return SchnorrSignature{gen, commitment, response};
}

bool schnorr_verify(const GroupParams& gp, const GroupElement& pk, const GroupElement& gen,
                    BytesView msg, const SchnorrSignature& sig) {
    if (gen.is_one() || !(sig.generator == gen))
        return false;
    Scalar c = challenge(gp, "crex.schnorr.sig", gen, pk, sig.commitment, msg);
    // gen^response == commitment * pk^c
    GroupElement lhs = gen.pow(sig.response, gp);
    GroupElement rhs = sig.commitment.mul(pk.pow(c, gp), gp);
    return lhs == rhs;
}

DlogProof dlog_prove(const GroupParams& gp, const Scalar& sk, const GroupElement& gen,
                     BytesView context, RandomSource& rng) {
    if (gen.is_one())
        throw Error("degenerate generator");
    GroupElement pk = gen.pow(sk, gp);
    Scalar k = Scalar::random_nonzero(gp, rng);
    GroupElement commitment = gen.pow(k, gp);
    Scalar c = challenge(gp, "crex.schnorr.zkpk", gen, pk, commitment, context);
    Scalar response = k.add(c.mul(sk, gp), gp);
    return DlogProof{commitment, response};
}

bool dlog_verify(const GroupParams& gp, const GroupElement& pk, const GroupElement& gen,
                 BytesView context, const DlogProof& proof) {
    if (gen.is_one())
        return false;
    Scalar c = challenge(gp, "crex.schnorr.zkpk", gen, pk, proof.commitment, context);
    GroupElement lhs = gen.pow(proof.response, gp);
    GroupElement rhs = proof.commitment.mul(pk.pow(c, gp), gp);
    return lhs == rhs;
}

}  // namespace crex
