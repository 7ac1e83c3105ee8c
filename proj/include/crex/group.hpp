#pragma once

#include <gmpxx.h>

#include <initializer_list>
#include <string>

#include "crex/bytes.hpp"
#include "crex/rng.hpp"

namespace crex {

// Prime-order multiplicative subgroup G_q of Z_p^*, q | p-1, generated by g.
struct GroupParams {
    std::string id;
    mpz_class p;
    mpz_class q;
    mpz_class g;

    // Presets: micro11 (p=23, q=11) for exhaustive/fuzz tests, test16
    // (16-bit safe prime) for fast simulation, modp2048 (RFC 3526 group 14,
    // safe prime) for realistic sizes.
    static GroupParams preset(std::string_view id);

    void validate() const;  // throws Error on any broken invariant

    std::size_t element_width() const { return (mpz_sizeinbase(p.get_mpz_t(), 2) + 7) / 8; }
    std::size_t scalar_width() const { return (mpz_sizeinbase(q.get_mpz_t(), 2) + 7) / 8; }

    bool operator==(const GroupParams&) const = default;
};

// Exponent in [0, q), always reduced.
class Scalar {
  public:
    Scalar() = default;

    static Scalar reduced(mpz_class v, const GroupParams& gp);
    static Scalar random(const GroupParams& gp, RandomSource& rng);          // [0, q)
    static Scalar random_nonzero(const GroupParams& gp, RandomSource& rng);  // [1, q)

    const mpz_class& value() const { return v_; }
    bool is_zero() const { return v_ == 0; }

    Scalar add(const Scalar& o, const GroupParams& gp) const;
    Scalar mul(const Scalar& o, const GroupParams& gp) const;

    Bytes encode(const GroupParams& gp) const;
    // Rejects out-of-range values and wrong widths.
    static Scalar decode(const GroupParams& gp, BytesView in);

    bool operator==(const Scalar&) const = default;

  private:
    explicit Scalar(mpz_class v) : v_(std::move(v)) {}
    mpz_class v_;
};

// Member of G_q. Public constructors check membership (x^q = 1 mod p,
// 1 <= x < p); values produced by group operations are members by closure
// and skip the re-check.
class GroupElement {
  public:
    GroupElement() = default;  // invalid sentinel (0); never a member

    static GroupElement checked(mpz_class v, const GroupParams& gp);
    // Caller vouches for membership (closure of mul/pow, trusted constants).
    static GroupElement assume_member(mpz_class v);

    static bool is_member(const mpz_class& v, const GroupParams& gp);

    const mpz_class& value() const { return v_; }
    bool is_one() const { return v_ == 1; }

    GroupElement mul(const GroupElement& o, const GroupParams& gp) const;
    GroupElement pow(const Scalar& e, const GroupParams& gp) const;

    Bytes encode(const GroupParams& gp) const;
    static GroupElement decode(const GroupParams& gp, BytesView in);  // membership-checked

    bool operator==(const GroupElement&) const = default;
    bool operator<(const GroupElement& o) const { return v_ < o.v_; }

  private:
    explicit GroupElement(mpz_class v) : v_(std::move(v)) {}
    mpz_class v_;
};

GroupElement generator(const GroupParams& gp);

struct KeyPair {
    Scalar sk;
    GroupElement pk;
};

// sk uniform in [1, q), pk = g^sk.
KeyPair keygen(const GroupParams& gp, RandomSource& rng);

// SHA-256 of the domain-separated, length-prefixed parts, reduced mod q.
Scalar hash_to_scalar(const GroupParams& gp, std::string_view domain_tag,
                      std::initializer_list<BytesView> parts);

// Fixed-width big-endian integer encoding helpers used by the canonical
// serialization contract.
Bytes encode_mpz(const mpz_class& v, std::size_t width);
mpz_class decode_mpz(BytesView in);

}  // namespace crex
