#include <pcert/curve.hpp>
#include <pcert/error.hpp>

#include <array>
#include <vector>

namespace pcert::ec {

namespace detail {

/// table[w][d - 1] = d * 16^w * G in affine form, for d in [1, 15].
struct BaseTable {
    static constexpr unsigned window_bits = 4;
    static constexpr unsigned digits = (1u << window_bits) - 1;
    std::vector<std::array<Point, digits>> windows;
};

} // namespace detail

namespace {

// Jacobian (X, Y, Z) represents (X/Z^2, Y/Z^3); Z == 0 is infinity.
struct Jacobian {
    mpz_class x{0}, y{1}, z{0};

    bool is_infinity() const { return sgn(z) == 0; }
};

class Field {
public:
    explicit Field(const CurveParams& curve) : p_(curve.p()), a_(curve.a())
    {
        // p = 2^k - 1 admits reduction by shift-and-add.
        mpz_class q = p_ + 1;
        if (mpz_popcount(q.get_mpz_t()) == 1)
            mersenne_bits_ = mpz_sizeinbase(q.get_mpz_t(), 2) - 1;
    }

    void mul(mpz_class& r, const mpz_class& x, const mpz_class& y)
    {
        mpz_mul(r.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        reduce(r);
    }
    void sqr(mpz_class& r, const mpz_class& x) { mul(r, x, x); }
    void add(mpz_class& r, const mpz_class& x, const mpz_class& y) const
    {
        mpz_add(r.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        if (cmp(r, p_) >= 0)
            mpz_sub(r.get_mpz_t(), r.get_mpz_t(), p_.get_mpz_t());
    }
    void sub(mpz_class& r, const mpz_class& x, const mpz_class& y) const
    {
        mpz_sub(r.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        if (sgn(r) < 0)
            mpz_add(r.get_mpz_t(), r.get_mpz_t(), p_.get_mpz_t());
    }
    void mul_small(mpz_class& r, const mpz_class& x, unsigned long k)
    {
        mpz_mul_ui(r.get_mpz_t(), x.get_mpz_t(), k);
        reduce(r);
    }

    /// r in [0, p^2) -> r mod p.
    void reduce(mpz_class& r)
    {
        if (mersenne_bits_ == 0) {
            mpz_mod(r.get_mpz_t(), r.get_mpz_t(), p_.get_mpz_t());
            return;
        }
        while (mpz_sizeinbase(r.get_mpz_t(), 2) > mersenne_bits_) {
            mpz_tdiv_q_2exp(hi_.get_mpz_t(), r.get_mpz_t(), mersenne_bits_);
            mpz_tdiv_r_2exp(r.get_mpz_t(), r.get_mpz_t(), mersenne_bits_);
            mpz_add(r.get_mpz_t(), r.get_mpz_t(), hi_.get_mpz_t());
        }
        if (cmp(r, p_) >= 0)
            mpz_sub(r.get_mpz_t(), r.get_mpz_t(), p_.get_mpz_t());
    }

    Jacobian lift(const Point& pt) const
    {
        if (pt.is_infinity())
            return {};
        return {pt.x(), pt.y(), mpz_class(1)};
    }

    Point to_affine(const Jacobian& pt)
    {
        if (pt.is_infinity())
            return Point::infinity();
        mpz_class zi, zi2, zi3, x, y;
        mpz_invert(zi.get_mpz_t(), pt.z.get_mpz_t(), p_.get_mpz_t());
        sqr(zi2, zi);
        mul(zi3, zi2, zi);
        mul(x, pt.x, zi2);
        mul(y, pt.y, zi3);
        return {x, y};
    }

    /// In place: pt = 2 * pt.
    void dbl(Jacobian& pt)
    {
        if (pt.is_infinity())
            return;
        if (sgn(pt.y) == 0) {
            pt = {};
            return;
        }
        auto& [xx, yy, yyyy, zz, s, m, t, unused] = t_;
        (void)unused;
        sqr(xx, pt.x);
        sqr(yy, pt.y);
        sqr(yyyy, yy);
        sqr(zz, pt.z);
        // S = 4 * X * YY
        mul(s, pt.x, yy);
        mul_small(s, s, 4);
        // M = 3 * XX + a * ZZ^2
        mul_small(m, xx, 3);
        if (sgn(a_) != 0) {
            sqr(t, zz);
            mul(t, t, a_);
            add(m, m, t);
        }
        // Z3 = 2 * Y * Z (before Y is overwritten)
        mul(pt.z, pt.y, pt.z);
        add(pt.z, pt.z, pt.z);
        // X3 = M^2 - 2S
        sqr(pt.x, m);
        sub(pt.x, pt.x, s);
        sub(pt.x, pt.x, s);
        // Y3 = M * (S - X3) - 8 * YYYY
        sub(t, s, pt.x);
        mul(pt.y, m, t);
        mul_small(t, yyyy, 8);
        sub(pt.y, pt.y, t);
    }

    /// In place: acc = acc + q.
    void add(Jacobian& acc, const Jacobian& q)
    {
        if (q.is_infinity())
            return;
        if (acc.is_infinity()) {
            acc = q;
            return;
        }
        auto& [z1z1, z2z2, u1, u2, s1, s2, h, r] = t_;
        sqr(z1z1, acc.z);
        sqr(z2z2, q.z);
        mul(u1, acc.x, z2z2);
        mul(u2, q.x, z1z1);
        mul(s1, acc.y, q.z);
        mul(s1, s1, z2z2);
        mul(s2, q.y, acc.z);
        mul(s2, s2, z1z1);
        sub(h, u2, u1);
        sub(r, s2, s1);
        if (sgn(h) == 0) {
            if (sgn(r) == 0)
                dbl(acc);
            else
                acc = {};
            return;
        }
        // Z3 = Z1 * Z2 * H
        mul(acc.z, acc.z, q.z);
        mul(acc.z, acc.z, h);
        finish_add(acc, u1, s1, h, r);
    }

    /// In place: acc = acc + q with q affine (Z = 1).
    void add_mixed(Jacobian& acc, const Point& q)
    {
        if (q.is_infinity())
            return;
        if (acc.is_infinity()) {
            acc = lift(q);
            return;
        }
        auto& [z1z1, u2, s2, h, r, u1, s1, unused] = t_;
        (void)unused;
        sqr(z1z1, acc.z);
        mul(u2, q.x(), z1z1);
        mul(s2, q.y(), acc.z);
        mul(s2, s2, z1z1);
        sub(h, u2, acc.x);
        sub(r, s2, acc.y);
        if (sgn(h) == 0) {
            if (sgn(r) == 0)
                dbl(acc);
            else
                acc = {};
            return;
        }
        u1 = acc.x;
        s1 = acc.y;
        mul(acc.z, acc.z, h);
        finish_add(acc, u1, s1, h, r);
    }

private:
    /// X3 = R^2 - H^3 - 2 U1 H^2, Y3 = R (U1 H^2 - X3) - S1 H^3. Z3 already set.
    void finish_add(Jacobian& out, const mpz_class& u1, const mpz_class& s1, const mpz_class& h,
                    const mpz_class& r)
    {
        auto& [hh, hhh, v, t] = f_;
        sqr(hh, h);
        mul(hhh, hh, h);
        mul(v, u1, hh);
        sqr(out.x, r);
        sub(out.x, out.x, hhh);
        sub(out.x, out.x, v);
        sub(out.x, out.x, v);
        sub(t, v, out.x);
        mul(out.y, r, t);
        mul(t, s1, hhh);
        sub(out.y, out.y, t);
    }

    const mpz_class& p_;
    const mpz_class& a_;
    // Scratch registers; a Field is local to one computation.
    std::array<mpz_class, 8> t_;
    std::array<mpz_class, 4> f_;
    mpz_class hi_;
    std::size_t mersenne_bits_ = 0;
};

void require_on_curve(const Point& pt, const CurveParams& curve, const char* what)
{
    if (!on_curve(pt, curve))
        fail(ErrorCode::OffCurveInput, std::string(what) + " is not on " + curve.name());
}

std::size_t byte_length(const mpz_class& v)
{
    return (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
}

std::shared_ptr<const detail::BaseTable> build_base_table(const CurveParams& curve)
{
    auto table = std::make_shared<detail::BaseTable>();
    Field f(curve);
    std::size_t windows = (curve.order_bits() + detail::BaseTable::window_bits - 1) / detail::BaseTable::window_bits;
    table->windows.resize(windows);
    Jacobian base = f.lift(curve.generator());
    for (std::size_t w = 0; w < windows; ++w) {
        Jacobian acc = base;
        for (unsigned d = 1; d <= detail::BaseTable::digits; ++d) {
            table->windows[w][d - 1] = f.to_affine(acc);
            f.add(acc, base);
        }
        // acc is now 16 * base
        base = acc;
    }
    return table;
}

} // namespace

// ---- CurveParams -----------------------------------------------------------

CurveParams::CurveParams(std::string name, mpz_class p, mpz_class a, mpz_class b, Point g, mpz_class n,
                         int strength_bits, sym::DigestAlg digest)
    : name_(std::move(name)), p_(std::move(p)), a_(std::move(a)), b_(std::move(b)), g_(std::move(g)),
      n_(std::move(n)), strength_bits_(strength_bits), digest_(digest)
{
    if (cmp(p_, 3) <= 0 || mpz_probab_prime_p(p_.get_mpz_t(), 30) == 0)
        fail(ErrorCode::InvalidArgument, name_ + ": field modulus is not a prime > 3");
    if (cmp(n_, 1) <= 0 || mpz_probab_prime_p(n_.get_mpz_t(), 30) == 0)
        fail(ErrorCode::InvalidArgument, name_ + ": group order is not prime");
    mpz_mod(a_.get_mpz_t(), a_.get_mpz_t(), p_.get_mpz_t());
    mpz_mod(b_.get_mpz_t(), b_.get_mpz_t(), p_.get_mpz_t());

    mpz_class disc = 4 * a_ * a_ * a_ + 27 * b_ * b_;
    mpz_mod(disc.get_mpz_t(), disc.get_mpz_t(), p_.get_mpz_t());
    if (sgn(disc) == 0)
        fail(ErrorCode::InvalidArgument, name_ + ": singular curve");

    field_bytes_ = byte_length(p_);
    order_bytes_ = byte_length(n_);
    order_bits_ = mpz_sizeinbase(n_.get_mpz_t(), 2);

    if (g_.is_infinity() || !on_curve(g_, *this))
        fail(ErrorCode::InvalidArgument, name_ + ": generator not on curve");
    if (!scalar_mul(n_, g_, *this).is_infinity())
        fail(ErrorCode::InvalidArgument, name_ + ": n * G is not the point at infinity");

    base_table_ = build_base_table(*this);
}

// ---- group law -------------------------------------------------------------

bool on_curve(const Point& pt, const CurveParams& curve)
{
    if (pt.is_infinity())
        return true;
    const auto& p = curve.p();
    if (sgn(pt.x()) < 0 || sgn(pt.y()) < 0 || cmp(pt.x(), p) >= 0 || cmp(pt.y(), p) >= 0)
        return false;
    mpz_class lhs = pt.y() * pt.y();
    mpz_class rhs = pt.x() * pt.x() * pt.x() + curve.a() * pt.x() + curve.b();
    mpz_class diff = lhs - rhs;
    mpz_mod(diff.get_mpz_t(), diff.get_mpz_t(), p.get_mpz_t());
    return sgn(diff) == 0;
}

Point point_add(const Point& lhs, const Point& rhs, const CurveParams& curve)
{
    require_on_curve(lhs, curve, "left operand");
    require_on_curve(rhs, curve, "right operand");
    Field f(curve);
    auto acc = f.lift(lhs);
    f.add_mixed(acc, rhs);
    return f.to_affine(acc);
}

Point point_neg(const Point& pt, const CurveParams& curve)
{
    require_on_curve(pt, curve, "operand");
    if (pt.is_infinity() || sgn(pt.y()) == 0)
        return pt;
    return {pt.x(), curve.p() - pt.y()};
}

Point point_sub(const Point& lhs, const Point& rhs, const CurveParams& curve)
{
    return point_add(lhs, point_neg(rhs, curve), curve);
}

Point scalar_mul(const mpz_class& k, const Point& pt, const CurveParams& curve)
{
    if (sgn(k) < 0)
        fail(ErrorCode::InvalidArgument, "negative scalar");
    require_on_curve(pt, curve, "point");
    if (sgn(k) == 0 || pt.is_infinity())
        return Point::infinity();

    Field f(curve);
    // Fixed 4-bit window, most significant digit first.
    std::array<Jacobian, 16> table;
    table[1] = f.lift(pt);
    for (std::size_t i = 2; i < table.size(); ++i) {
        table[i] = table[i - 1];
        f.add_mixed(table[i], pt);
    }

    std::size_t bits = mpz_sizeinbase(k.get_mpz_t(), 2);
    std::size_t windows = (bits + 3) / 4;
    Jacobian acc;
    for (std::size_t w = windows; w-- > 0;) {
        for (int i = 0; i < 4; ++i)
            f.dbl(acc);
        unsigned digit = 0;
        for (int i = 3; i >= 0; --i)
            digit = (digit << 1) | static_cast<unsigned>(mpz_tstbit(k.get_mpz_t(), 4 * w + static_cast<unsigned>(i)));
        if (digit != 0)
            f.add(acc, table[digit]);
    }
    return f.to_affine(acc);
}

Point scalar_mul(const Scalar& k, const Point& pt, const CurveParams& curve)
{
    return scalar_mul(k.value(), pt, curve);
}

Point scalar_mul_base(const Scalar& k, const CurveParams& curve)
{
    mpz_class e = k.value();
    mpz_mod(e.get_mpz_t(), e.get_mpz_t(), curve.order().get_mpz_t());
    const auto& table = curve.base_table();
    Field f(curve);
    Jacobian acc;
    for (std::size_t w = 0; w < table.windows.size(); ++w) {
        unsigned digit = 0;
        for (int i = 3; i >= 0; --i)
            digit = (digit << 1) | static_cast<unsigned>(mpz_tstbit(e.get_mpz_t(), 4 * w + static_cast<unsigned>(i)));
        if (digit != 0)
            f.add_mixed(acc, table.windows[w][digit - 1]);
    }
    return f.to_affine(acc);
}

Point mul_add(const Scalar& u, const Scalar& v, const Point& pt, const CurveParams& curve)
{
    auto ug = scalar_mul_base(u, curve);
    auto vp = scalar_mul(v, pt, curve);
    return point_add(ug, vp, curve);
}

// ---- scalars ---------------------------------------------------------------

Scalar scalar_reduce(const mpz_class& value, const CurveParams& curve)
{
    mpz_class r;
    mpz_mod(r.get_mpz_t(), value.get_mpz_t(), curve.order().get_mpz_t());
    return Scalar(std::move(r));
}

Scalar scalar_add(const Scalar& a, const Scalar& b, const CurveParams& curve)
{
    return scalar_reduce(a.value() + b.value(), curve);
}

Scalar scalar_mul(const Scalar& a, const Scalar& b, const CurveParams& curve)
{
    return scalar_reduce(a.value() * b.value(), curve);
}

Scalar scalar_neg(const Scalar& a, const CurveParams& curve)
{
    return scalar_reduce(-a.value(), curve);
}

Scalar scalar_inv(const Scalar& a, const CurveParams& curve)
{
    auto reduced = scalar_reduce(a.value(), curve);
    if (reduced.is_zero())
        fail(ErrorCode::DivisionByZero, "inverse of zero scalar");
    mpz_class r;
    mpz_invert(r.get_mpz_t(), reduced.value().get_mpz_t(), curve.order().get_mpz_t());
    return Scalar(std::move(r));
}

Scalar scalar_arith(ScalarOp op, const Scalar& lhs, const std::optional<Scalar>& rhs, const CurveParams& curve)
{
    auto need_rhs = [&]() -> const Scalar& {
        if (!rhs)
            fail(ErrorCode::InvalidArgument, "binary scalar op without right operand");
        return *rhs;
    };
    switch (op) {
    case ScalarOp::Add: return scalar_add(lhs, need_rhs(), curve);
    case ScalarOp::Mul: return scalar_mul(lhs, need_rhs(), curve);
    case ScalarOp::Inv: return scalar_inv(lhs, curve);
    case ScalarOp::Neg: return scalar_neg(lhs, curve);
    }
    fail(ErrorCode::InvalidArgument, "unknown scalar op");
}

Scalar random_scalar(const CurveParams& curve, Rng& rng)
{
    const auto width = curve.order_bytes();
    const auto excess_bits = width * 8 - curve.order_bits();
    const auto top_mask = static_cast<std::uint8_t>(0xff >> excess_bits);
    Bytes buf(width);
    // Acceptance probability is > 1/2 per draw; 256 rejections in a row means
    // the source is broken.
    for (int attempt = 0; attempt < 256; ++attempt) {
        rng.fill(buf);
        buf[0] &= top_mask;
        auto v = import_be(buf);
        if (sgn(v) != 0 && cmp(v, curve.order()) < 0)
            return Scalar(std::move(v));
    }
    fail(ErrorCode::RngFailure, "rng never produced a scalar in [1, n)");
}

KeyPair keygen(const CurveParams& curve, Rng& rng)
{
    auto priv = random_scalar(curve, rng);
    auto pub = scalar_mul_base(priv, curve);
    return {std::move(priv), std::move(pub)};
}

// ---- encodings -------------------------------------------------------------

mpz_class import_be(ByteView data)
{
    mpz_class v;
    if (!data.empty())
        mpz_import(v.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
    return v;
}

Bytes export_be(const mpz_class& value, std::size_t width)
{
    if (sgn(value) < 0 || byte_length(value) > width)
        fail(ErrorCode::InvalidArgument, "integer does not fit the encoding width");
    Bytes out(width, 0);
    std::size_t count = 0;
    if (sgn(value) != 0) {
        Bytes tmp(byte_length(value));
        mpz_export(tmp.data(), &count, 1, 1, 1, 0, value.get_mpz_t());
        std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(count),
                  out.end() - static_cast<std::ptrdiff_t>(count));
    }
    return out;
}

Bytes encode_field_element(const mpz_class& x, const CurveParams& curve)
{
    return export_be(x, curve.field_bytes());
}

Bytes encode_point(const Point& pt, const CurveParams& curve)
{
    if (pt.is_infinity())
        return Bytes{0x00};
    Bytes out;
    out.reserve(1 + 2 * curve.field_bytes());
    out.push_back(0x04);
    auto x = encode_field_element(pt.x(), curve);
    auto y = encode_field_element(pt.y(), curve);
    out.insert(out.end(), x.begin(), x.end());
    out.insert(out.end(), y.begin(), y.end());
    return out;
}

Point decode_point(ByteView data, const CurveParams& curve)
{
    if (data.size() == 1 && data[0] == 0x00)
        return Point::infinity();
    const auto w = curve.field_bytes();
    if (data.size() != 1 + 2 * w || data[0] != 0x04)
        fail(ErrorCode::MalformedEncoding, "bad point encoding for " + curve.name());
    Point pt(import_be(data.subspan(1, w)), import_be(data.subspan(1 + w, w)));
    require_on_curve(pt, curve, "decoded point");
    return pt;
}

Bytes encode_scalar(const Scalar& s, const CurveParams& curve)
{
    return export_be(s.value(), curve.order_bytes());
}

Scalar decode_scalar(ByteView data, const CurveParams& curve)
{
    if (data.size() != curve.order_bytes())
        fail(ErrorCode::MalformedEncoding, "bad scalar width for " + curve.name());
    auto v = import_be(data);
    if (cmp(v, curve.order()) >= 0)
        fail(ErrorCode::MalformedEncoding, "scalar not reduced mod n");
    return Scalar(std::move(v));
}

} // namespace pcert::ec
