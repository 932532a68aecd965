#include <pcert/certs.hpp>
#include <pcert/error.hpp>

#include <sstream>

namespace pcert::pki {

using namespace pcert::ec;

namespace {

constexpr std::array<std::uint8_t, 4> magic{'P', 'C', 'R', 'T'};
constexpr std::uint8_t format_version = 1;

void write_tbs(ByteWriter& w, const Certificate& cert, const CurveParams& curve)
{
    w.lp16(ByteView(reinterpret_cast<const std::uint8_t*>(cert.curve_name.data()), cert.curve_name.size()));
    w.raw(cert.serial);
    w.u8(static_cast<std::uint8_t>(cert.subject_kind));
    w.lp16(cert.subject_id);
    w.lp16(encode_point(cert.subject_pub, curve));
    w.raw(cert.issuer_serial);
    w.i64(cert.validity.not_before);
    w.i64(cert.validity.not_after);
}

Serial random_serial(Rng& rng)
{
    Serial s{};
    rng.fill(s);
    return s;
}

void sign_certificate(Certificate& cert, const Scalar& issuer_priv, const CurveParams& curve, Rng& rng)
{
    cert.signature = crypto::ecdsa_sign(issuer_priv, tbs_encoding(cert), curve, rng);
}

void check_validity(const Validity& v)
{
    if (v.not_before >= v.not_after)
        fail(ErrorCode::InvalidValidity, "not_before must precede not_after");
}

} // namespace

std::string_view to_string(SubjectKind kind) noexcept
{
    switch (kind) {
    case SubjectKind::Rca: return "rca";
    case SubjectKind::Eca: return "eca";
    case SubjectKind::Pca: return "pca";
    case SubjectKind::Ra: return "ra";
    case SubjectKind::Device: return "device";
    case SubjectKind::Hospital: return "hospital";
    case SubjectKind::Pseudonym: return "pseudonym";
    }
    return "unknown";
}

std::optional<SubjectKind> subject_kind_from_byte(std::uint8_t b) noexcept
{
    if (b < static_cast<std::uint8_t>(SubjectKind::Rca) || b > static_cast<std::uint8_t>(SubjectKind::Pseudonym))
        return std::nullopt;
    return static_cast<SubjectKind>(b);
}

bool issuance_allowed(SubjectKind issuer, SubjectKind subject) noexcept
{
    switch (issuer) {
    case SubjectKind::Rca:
        return subject == SubjectKind::Eca || subject == SubjectKind::Pca || subject == SubjectKind::Ra;
    case SubjectKind::Eca:
        return subject == SubjectKind::Device || subject == SubjectKind::Hospital;
    case SubjectKind::Pca:
        return subject == SubjectKind::Pseudonym;
    default:
        return false;
    }
}

std::string_view to_string(RejectReason reason) noexcept
{
    switch (reason) {
    case RejectReason::EmptyChain: return "EmptyChain";
    case RejectReason::Malformed: return "Malformed";
    case RejectReason::UntrustedRoot: return "UntrustedRoot";
    case RejectReason::BrokenLink: return "BrokenLink";
    case RejectReason::PolicyViolation: return "PolicyViolation";
    case RejectReason::BadSignature: return "BadSignature";
    case RejectReason::NotYetValid: return "NotYetValid";
    case RejectReason::Expired: return "Expired";
    }
    return "Unknown";
}

Bytes tbs_encoding(const Certificate& cert)
{
    const auto& curve = curve_by_name(cert.curve_name);
    ByteWriter w;
    write_tbs(w, cert, curve);
    return std::move(w).bytes();
}

Bytes encode(const Certificate& cert)
{
    const auto& curve = curve_by_name(cert.curve_name);
    ByteWriter w;
    w.raw(magic).u8(format_version);
    write_tbs(w, cert, curve);
    w.lp16(crypto::encode_signature(cert.signature, curve));
    return std::move(w).bytes();
}

Certificate decode(ByteView data)
{
    ByteReader r(data);
    if (r.raw(magic.size()) != Bytes(magic.begin(), magic.end()))
        fail(ErrorCode::MalformedEncoding, "not a certificate (bad magic)");
    if (r.u8() != format_version)
        fail(ErrorCode::MalformedEncoding, "unsupported certificate format version");

    Certificate cert;
    auto name = r.lp16();
    cert.curve_name.assign(name.begin(), name.end());
    const auto& curve = curve_by_name(cert.curve_name);

    auto serial = r.raw(cert.serial.size());
    std::copy(serial.begin(), serial.end(), cert.serial.begin());
    auto kind = subject_kind_from_byte(r.u8());
    if (!kind)
        fail(ErrorCode::MalformedEncoding, "unknown subject kind");
    cert.subject_kind = *kind;
    cert.subject_id = r.lp16();
    cert.subject_pub = decode_point(r.lp16(), curve);
    auto issuer = r.raw(cert.issuer_serial.size());
    std::copy(issuer.begin(), issuer.end(), cert.issuer_serial.begin());
    cert.validity.not_before = r.i64();
    cert.validity.not_after = r.i64();
    cert.signature = crypto::decode_signature(r.lp16(), curve);
    r.expect_end();
    return cert;
}

Bytes encode_chain(std::span<const Certificate> chain)
{
    ByteWriter w;
    for (const auto& c : chain)
        w.lp32(encode(c));
    return std::move(w).bytes();
}

std::vector<Certificate> decode_chain(ByteView data)
{
    ByteReader r(data);
    std::vector<Certificate> out;
    while (!r.empty())
        out.push_back(decode(r.lp32()));
    return out;
}

std::string describe(const Certificate& cert)
{
    const auto& curve = curve_by_name(cert.curve_name);
    std::ostringstream os;
    os << "certificate\n"
       << "  curve:         " << cert.curve_name << '\n'
       << "  serial:        " << to_hex(cert.serial) << '\n'
       << "  subject kind:  " << to_string(cert.subject_kind) << '\n'
       << "  subject id:    " << to_hex(cert.subject_id) << '\n'
       << "  subject pub:   " << to_hex(encode_point(cert.subject_pub, curve)) << '\n'
       << "  issuer serial: " << to_hex(cert.issuer_serial) << (cert.self_signed() ? " (self-signed)" : "") << '\n'
       << "  not before:    " << cert.validity.not_before << '\n'
       << "  not after:     " << cert.validity.not_after << '\n'
       << "  signature:     " << to_hex(crypto::encode_signature(cert.signature, curve)) << '\n';
    return os.str();
}

Certificate issue_root(const Scalar& root_priv, const Bytes& subject_id, Validity validity, const CurveParams& curve,
                       Rng& rng)
{
    check_validity(validity);
    Certificate cert;
    cert.curve_name = curve.name();
    cert.serial = random_serial(rng);
    cert.subject_kind = SubjectKind::Rca;
    cert.subject_id = subject_id;
    cert.subject_pub = scalar_mul_base(root_priv, curve);
    cert.issuer_serial = cert.serial;
    cert.validity = validity;
    sign_certificate(cert, root_priv, curve, rng);
    return cert;
}

Certificate issue(const Certificate& issuer_cert, const Scalar& issuer_priv, const Point& subject_pub,
                  SubjectKind subject_kind, const Bytes& subject_id, Validity validity, const CurveParams& curve,
                  Rng& rng)
{
    if (!issuance_allowed(issuer_cert.subject_kind, subject_kind))
        fail(ErrorCode::UnauthorizedIssuer, std::string(to_string(issuer_cert.subject_kind)) + " may not issue " +
                                                std::string(to_string(subject_kind)) + " certificates");
    if (issuer_cert.curve_name != curve.name())
        fail(ErrorCode::InvalidArgument, "issuer certificate is bound to a different curve");
    check_validity(validity);
    if (subject_pub.is_infinity() || !on_curve(subject_pub, curve))
        fail(ErrorCode::OffCurveInput, "subject public key is not a valid curve point");
    if (!(scalar_mul_base(issuer_priv, curve) == issuer_cert.subject_pub))
        fail(ErrorCode::KeyMismatch, "issuer private key does not match the issuer certificate");

    Certificate cert;
    cert.curve_name = curve.name();
    cert.serial = random_serial(rng);
    cert.subject_kind = subject_kind;
    cert.subject_id = subject_id;
    cert.subject_pub = subject_pub;
    cert.issuer_serial = issuer_cert.serial;
    cert.validity = validity;
    sign_certificate(cert, issuer_priv, curve, rng);
    return cert;
}

ChainVerdict verify_chain(std::span<const Certificate> chain, const Certificate& trusted_root, std::int64_t now)
{
    if (chain.empty())
        return {RejectReason::EmptyChain, 0};

    auto reject = [](RejectReason r, std::size_t pos) { return ChainVerdict{r, pos}; };

    const std::size_t root_pos = chain.size() - 1;
    const auto& root = chain.back();
    if (!(root == trusted_root))
        return reject(RejectReason::UntrustedRoot, root_pos);
    if (root.subject_kind != SubjectKind::Rca || !root.self_signed())
        return reject(RejectReason::PolicyViolation, root_pos);

    try {
        for (std::size_t i = 0; i < chain.size(); ++i) {
            const auto& cert = chain[i];
            const auto& issuer = (i == root_pos) ? root : chain[i + 1];
            if (cert.curve_name != root.curve_name)
                return reject(RejectReason::Malformed, i);
            if (i != root_pos) {
                if (cert.issuer_serial != issuer.serial || cert.self_signed())
                    return reject(RejectReason::BrokenLink, i);
                if (!issuance_allowed(issuer.subject_kind, cert.subject_kind))
                    return reject(RejectReason::PolicyViolation, i);
            }
            const auto& curve = curve_by_name(cert.curve_name);
            if (!crypto::ecdsa_verify(issuer.subject_pub, tbs_encoding(cert), cert.signature, curve))
                return reject(RejectReason::BadSignature, i);
        }
    } catch (const Error&) {
        return reject(RejectReason::Malformed, 0);
    }

    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& v = chain[i].validity;
        if (now < v.not_before)
            return reject(RejectReason::NotYetValid, i);
        if (now >= v.not_after)
            return reject(RejectReason::Expired, i);
    }
    return {};
}

} // namespace pcert::pki
