#pragma once

// Prime-field short-Weierstrass curves y^2 = x^3 + a*x + b (mod p), scalar
// arithmetic mod the group order n, key generation, and the registry mapping
// NIST security strengths to curves.
//
// All public values are affine. Jacobian coordinates are used internally.

#include <pcert/bytes.hpp>
#include <pcert/rng.hpp>
#include <pcert/symmetric.hpp>

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace pcert::ec {

/// Integer in [0, n) for the curve it is used with. The type does not carry
/// its curve; functions that combine scalars take the curve explicitly.
class Scalar {
public:
    Scalar() = default;
    explicit Scalar(mpz_class value) : value_(std::move(value)) {}
    explicit Scalar(unsigned long value) : value_(value) {}

    const mpz_class& value() const noexcept { return value_; }
    bool is_zero() const noexcept { return sgn(value_) == 0; }

    friend bool operator==(const Scalar& a, const Scalar& b) { return cmp(a.value_, b.value_) == 0; }

private:
    mpz_class value_{0};
};

class Point {
public:
    /// Point at infinity.
    Point() = default;
    Point(mpz_class x, mpz_class y) : x_(std::move(x)), y_(std::move(y)), infinity_(false) {}

    static Point infinity() { return {}; }

    bool is_infinity() const noexcept { return infinity_; }
    const mpz_class& x() const noexcept { return x_; }
    const mpz_class& y() const noexcept { return y_; }

    friend bool operator==(const Point& a, const Point& b)
    {
        if (a.infinity_ || b.infinity_)
            return a.infinity_ == b.infinity_;
        return cmp(a.x_, b.x_) == 0 && cmp(a.y_, b.y_) == 0;
    }

private:
    mpz_class x_{0};
    mpz_class y_{0};
    bool infinity_ = true;
};

namespace detail {
struct BaseTable;
}

class CurveParams {
public:
    /// Validates the parameters: nonsingular, G on the curve, n*G at infinity.
    /// Throws InvalidArgument otherwise.
    CurveParams(std::string name, mpz_class p, mpz_class a, mpz_class b, Point g, mpz_class n, int strength_bits,
                sym::DigestAlg digest);

    const std::string& name() const noexcept { return name_; }
    const mpz_class& p() const noexcept { return p_; }
    const mpz_class& a() const noexcept { return a_; }
    const mpz_class& b() const noexcept { return b_; }
    const Point& generator() const noexcept { return g_; }
    const mpz_class& order() const noexcept { return n_; }
    int strength_bits() const noexcept { return strength_bits_; }
    sym::DigestAlg digest() const noexcept { return digest_; }

    std::size_t field_bytes() const noexcept { return field_bytes_; }
    std::size_t order_bytes() const noexcept { return order_bytes_; }
    std::size_t order_bits() const noexcept { return order_bits_; }

    const detail::BaseTable& base_table() const noexcept { return *base_table_; }

private:
    std::string name_;
    mpz_class p_, a_, b_;
    Point g_;
    mpz_class n_;
    int strength_bits_;
    sym::DigestAlg digest_;
    std::size_t field_bytes_, order_bytes_, order_bits_;
    std::shared_ptr<const detail::BaseTable> base_table_;
};

struct KeyPair {
    Scalar priv;
    Point pub;
};

// ---- registry --------------------------------------------------------------

/// NIST strengths 80/112/128/192/256 map to P-192/P-224/P-256/P-384/P-521.
/// Throws UnknownStrength for anything else.
const CurveParams& curve_for_strength(int strength_bits);

/// Looks up "P-192" ... "P-521" and the reserved toy curve name. Throws
/// UnknownCurve.
const CurveParams& curve_by_name(std::string_view name);

/// y^2 = x^3 + 2x + 2 over F_17, G = (5, 1), n = 19. Only for exhaustive
/// oracle tests; not reachable through curve_for_strength.
const CurveParams& toy_curve();
inline constexpr std::string_view toy_curve_name = "toy-p17";

std::span<const int> registered_strengths() noexcept;

// ---- group law -------------------------------------------------------------

bool on_curve(const Point& point, const CurveParams& curve);

Point point_add(const Point& lhs, const Point& rhs, const CurveParams& curve);
Point point_neg(const Point& point, const CurveParams& curve);
Point point_sub(const Point& lhs, const Point& rhs, const CurveParams& curve);

/// k*P for any non-negative k (k is not reduced, so n*G yields infinity).
/// Throws OffCurveInput if P is not on the curve, InvalidArgument if k < 0.
Point scalar_mul(const mpz_class& k, const Point& point, const CurveParams& curve);
Point scalar_mul(const Scalar& k, const Point& point, const CurveParams& curve);

/// k*G using the curve's precomputed generator table.
Point scalar_mul_base(const Scalar& k, const CurveParams& curve);

/// u*G + v*P.
Point mul_add(const Scalar& u, const Scalar& v, const Point& point, const CurveParams& curve);

// ---- scalars ---------------------------------------------------------------

enum class ScalarOp { Add, Mul, Inv, Neg };

/// Binary ops require rhs. Inv of zero throws DivisionByZero.
Scalar scalar_arith(ScalarOp op, const Scalar& lhs, const std::optional<Scalar>& rhs, const CurveParams& curve);

Scalar scalar_reduce(const mpz_class& value, const CurveParams& curve);
Scalar scalar_add(const Scalar& a, const Scalar& b, const CurveParams& curve);
Scalar scalar_mul(const Scalar& a, const Scalar& b, const CurveParams& curve);
Scalar scalar_neg(const Scalar& a, const CurveParams& curve);
Scalar scalar_inv(const Scalar& a, const CurveParams& curve);

/// Uniform in [1, n) by rejection sampling order-width random strings.
Scalar random_scalar(const CurveParams& curve, Rng& rng);

KeyPair keygen(const CurveParams& curve, Rng& rng);

// ---- encodings -------------------------------------------------------------

/// 0x04 || x || y with field-width big-endian coordinates; infinity is 0x00.
Bytes encode_point(const Point& point, const CurveParams& curve);
/// Throws MalformedEncoding for bad layout and OffCurveInput for a well-formed
/// point that does not satisfy the curve equation.
Point decode_point(ByteView data, const CurveParams& curve);

/// Fixed order-width big-endian.
Bytes encode_scalar(const Scalar& s, const CurveParams& curve);
/// Requires exact width and value < n.
Scalar decode_scalar(ByteView data, const CurveParams& curve);

/// Fixed field-width big-endian encoding of a coordinate.
Bytes encode_field_element(const mpz_class& x, const CurveParams& curve);

/// Unsigned big-endian helpers.
mpz_class import_be(ByteView data);
Bytes export_be(const mpz_class& value, std::size_t width);

} // namespace pcert::ec
