#include <pcert/curve.hpp>
#include <pcert/error.hpp>

#include <array>

namespace pcert::ec {

namespace {

struct NistSpec {
    const char* name;
    int strength;
    sym::DigestAlg digest;
    const char* p;
    const char* b;
    const char* gx;
    const char* gy;
    const char* n;
};

// SP 800-186 / FIPS 186-4 domain parameters; a = p - 3 for all of them.
constexpr std::array<NistSpec, 5> nist_specs{{
    {"P-192", 80, sym::DigestAlg::Sha256,
     "fffffffffffffffffffffffffffffffeffffffffffffffff",
     "64210519e59c80e70fa7e9ab72243049feb8deecc146b9b1",
     "188da80eb03090f67cbf20eb43a18800f4ff0afd82ff1012",
     "07192b95ffc8da78631011ed6b24cdd573f977a11e794811",
     "ffffffffffffffffffffffff99def836146bc9b1b4d22831"},
    {"P-224", 112, sym::DigestAlg::Sha256,
     "ffffffffffffffffffffffffffffffff000000000000000000000001",
     "b4050a850c04b3abf54132565044b0b7d7bfd8ba270b39432355ffb4",
     "b70e0cbd6bb4bf7f321390b94a03c1d356c21122343280d6115c1d21",
     "bd376388b5f723fb4c22dfe6cd4375a05a07476444d5819985007e34",
     "ffffffffffffffffffffffffffff16a2e0b8f03e13dd29455c5c2a3d"},
    {"P-256", 128, sym::DigestAlg::Sha256,
     "ffffffff00000001000000000000000000000000ffffffffffffffffffffffff",
     "5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b",
     "6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296",
     "4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5",
     "ffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551"},
    {"P-384", 192, sym::DigestAlg::Sha384,
     "fffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffeffffffff0000000000000000ffffffff",
     "b3312fa7e23ee7e4988e056be3f82d19181d9c6efe8141120314088f5013875ac656398d8a2ed19d2a85c8edd3ec2aef",
     "aa87ca22be8b05378eb1c71ef320ad746e1d3b628ba79b9859f741e082542a385502f25dbf55296c3a545e3872760ab7",
     "3617de4a96262c6f5d9e98bf9292dc29f8f41dbd289a147ce9da3113b5f0b8c00a60b1ce1d7e819d7a431d7c90ea0e5f",
     "ffffffffffffffffffffffffffffffffffffffffffffffffc7634d81f4372ddf581a0db248b0a77aecec196accc52973"},
    {"P-521", 256, sym::DigestAlg::Sha512,
     "01ffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffff",
     "0051953eb9618e1c9a1f929a21a0b68540eea2da725b99b315f3b8b489918ef109e156193951ec7e937b1652c0bd3bb1bf073573df883d2c34f1ef451fd46b503f00",
     "00c6858e06b70404e9cd9e3ecb662395b4429c648139053fb521f828af606b4d3dbaa14b5e77efe75928fe1dc127a2ffa8de3348b3c1856a429bf97e7e31c2e5bd66",
     "011839296a789a3bc0045c8a5fb42c7d1bd998f54449579b446817afbd17273e662c97ee72995ef42640c550b9013fad0761353c7086a272c24088be94769fd16650",
     "01fffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffa51868783bf2f966b7fcc0148f709a5d03bb5c9b8899c47aebb6fb71e91386409"},
}};

constexpr std::array<int, 5> strengths{80, 112, 128, 192, 256};

mpz_class hex(const char* s)
{
    return mpz_class(s, 16);
}

CurveParams make_nist(const NistSpec& spec)
{
    auto p = hex(spec.p);
    return CurveParams(spec.name, p, p - 3, hex(spec.b), Point(hex(spec.gx), hex(spec.gy)), hex(spec.n),
                       spec.strength, spec.digest);
}

struct Registry {
    std::vector<CurveParams> nist;
    CurveParams toy;

    Registry()
        : toy(std::string(toy_curve_name), mpz_class(17), mpz_class(2), mpz_class(2),
              Point(mpz_class(5), mpz_class(1)), mpz_class(19), 0, sym::DigestAlg::Sha256)
    {
        nist.reserve(nist_specs.size());
        for (const auto& spec : nist_specs)
            nist.push_back(make_nist(spec));
    }
};

const Registry& registry()
{
    static const Registry instance;
    return instance;
}

} // namespace

const CurveParams& curve_for_strength(int strength_bits)
{
    for (const auto& c : registry().nist)
        if (c.strength_bits() == strength_bits)
            return c;
    fail(ErrorCode::UnknownStrength, "no curve registered for strength " + std::to_string(strength_bits));
}

const CurveParams& curve_by_name(std::string_view name)
{
    const auto& reg = registry();
    if (name == toy_curve_name)
        return reg.toy;
    for (const auto& c : reg.nist)
        if (c.name() == name)
            return c;
    fail(ErrorCode::UnknownCurve, "unknown curve " + std::string(name));
}

const CurveParams& toy_curve()
{
    return registry().toy;
}

std::span<const int> registered_strengths() noexcept
{
    return strengths;
}

} // namespace pcert::ec
