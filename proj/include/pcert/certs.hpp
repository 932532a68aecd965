#pragma once

// Minimal canonical certificate format, issuance policy and chain
// verification rooted at the RCA.

#include <pcert/primitives.hpp>

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace pcert::pki {

using crypto::Signature;
using ec::CurveParams;
using ec::Point;
using ec::Scalar;

enum class SubjectKind : std::uint8_t { Rca = 1, Eca, Pca, Ra, Device, Hospital, Pseudonym };

std::string_view to_string(SubjectKind kind) noexcept;
std::optional<SubjectKind> subject_kind_from_byte(std::uint8_t b) noexcept;
inline constexpr std::array<SubjectKind, 7> all_subject_kinds{SubjectKind::Rca,    SubjectKind::Eca,
                                                              SubjectKind::Pca,    SubjectKind::Ra,
                                                              SubjectKind::Device, SubjectKind::Hospital,
                                                              SubjectKind::Pseudonym};

/// rca -> {eca, pca, ra}; eca -> {device, hospital}; pca -> {pseudonym}.
/// The RCA's own self-signature is handled separately.
bool issuance_allowed(SubjectKind issuer, SubjectKind subject) noexcept;

using Serial = std::array<std::uint8_t, 16>;

struct Validity {
    std::int64_t not_before = 0;
    std::int64_t not_after = 0;

    bool contains(std::int64_t t) const noexcept { return not_before <= t && t < not_after; }
    friend bool operator==(const Validity&, const Validity&) = default;
};

struct Certificate {
    std::string curve_name;
    Serial serial{};
    SubjectKind subject_kind = SubjectKind::Device;
    Bytes subject_id;
    Point subject_pub;
    Serial issuer_serial{};
    Validity validity;
    Signature signature;

    bool self_signed() const noexcept { return serial == issuer_serial; }
    friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// Canonical to-be-signed bytes: everything except the signature.
Bytes tbs_encoding(const Certificate& cert);

/// "PCRT" || u8 version || tbs fields || lp16(signature)
Bytes encode(const Certificate& cert);
/// Throws MalformedEncoding / UnknownCurve / OffCurveInput.
Certificate decode(ByteView data);

/// u32 length || cert, repeated.
Bytes encode_chain(std::span<const Certificate> chain);
std::vector<Certificate> decode_chain(ByteView data);

/// Multi-line text dump for humans.
std::string describe(const Certificate& cert);

/// Self-signed RCA certificate.
Certificate issue_root(const Scalar& root_priv, const Bytes& subject_id, Validity validity, const CurveParams& curve,
                       Rng& rng);

/// Serial comes from rng. Throws UnauthorizedIssuer, InvalidValidity,
/// OffCurveInput.
Certificate issue(const Certificate& issuer_cert, const Scalar& issuer_priv, const Point& subject_pub,
                  SubjectKind subject_kind, const Bytes& subject_id, Validity validity, const CurveParams& curve,
                  Rng& rng);

enum class RejectReason : std::uint8_t {
    EmptyChain,
    Malformed,
    UntrustedRoot,
    BrokenLink,
    PolicyViolation,
    BadSignature,
    NotYetValid,
    Expired,
};

std::string_view to_string(RejectReason reason) noexcept;

struct ChainVerdict {
    std::optional<RejectReason> reason; // empty means accepted
    std::size_t position = 0;           // chain index the rejection refers to

    bool accepted() const noexcept { return !reason.has_value(); }
    explicit operator bool() const noexcept { return accepted(); }
};

/// chain[0] is the leaf; chain.back() must equal trusted_root.
ChainVerdict verify_chain(std::span<const Certificate> chain, const Certificate& trusted_root, std::int64_t now);

} // namespace pcert::pki
