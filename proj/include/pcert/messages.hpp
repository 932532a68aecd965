#pragma once

// Wire types for the healthcare flow: the envelope that travels on the bus
// and the per-kind payload schemas.

#include <pcert/bke.hpp>
#include <pcert/certs.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace pcert::proto {

using bke::ButterflyResponse;
using bke::CaterpillarPublic;
using bke::CocoonPublic;
using crypto::SealedMessage;
using crypto::Signature;
using ec::CurveParams;
using ec::Point;
using ec::Scalar;
using pki::Certificate;
using pki::SubjectKind;

enum class Role : std::uint8_t { Rca = 1, Eca, Pca, Ra, Device, Hospital };

std::string_view to_string(Role role) noexcept;

struct Address {
    Role role = Role::Device;
    std::uint32_t instance = 0;

    friend auto operator<=>(const Address&, const Address&) = default;
};

/// "ra", "device/2", ...
std::string to_string(const Address& addr);

enum class MsgKind : std::uint8_t {
    EnrollRequest = 1,
    EnrollResponse,
    PseudonymRequest,
    CocoonBatch,
    ButterflyBatch,
    PseudonymDelivery,
    ExpansionValue,
    Reading,
};

std::string_view to_string(MsgKind kind) noexcept;

struct Envelope {
    Address from;
    Address to;
    MsgKind kind = MsgKind::Reading;
    bool out_of_band = false;
    std::uint64_t seq = 0;
    Bytes payload;

    friend bool operator==(const Envelope&, const Envelope&) = default;
};

/// u8 version || from (u8 role, u32 instance) || to || u8 kind || u8 flags ||
/// u64 seq || lp32(payload)
Bytes encode_envelope(const Envelope& env);
Envelope decode_envelope(ByteView data);

// Payloads. Every decode throws MalformedEncoding on framing errors and
// OffCurveInput for invalid points.

struct EnrollRequest {
    SubjectKind kind = SubjectKind::Device;
    Bytes subject_id;
    Point pub;
};

struct EnrollResponse {
    std::vector<Certificate> chain; // [leaf, eca, rca]
};

struct PseudonymRequest {
    std::vector<Certificate> enrollment_chain;
    CaterpillarPublic share;
    std::uint32_t start = 0;
    std::uint32_t count = 0;
    Signature signature; // by the enrollment key over signed_body()
};

/// The request fields covered by its signature.
Bytes signed_body(const PseudonymRequest& req, const CurveParams& curve);

struct CocoonBatch {
    std::uint64_t request_id = 0;
    std::vector<CocoonPublic> cocoons;
    Signature ra_signature; // over request_id and cocoons
};

Bytes signed_body(const CocoonBatch& batch, const CurveParams& curve);

struct ButterflyBatch {
    std::uint64_t request_id = 0;
    std::vector<ButterflyResponse> responses;
    std::vector<Certificate> certs; // certs[k] covers responses[k]
};

struct PseudonymDelivery {
    std::vector<ButterflyResponse> responses;
    std::vector<Certificate> certs;
};

struct ExpansionValue {
    Scalar t;
    std::vector<Certificate> hospital_chain;
};

struct ReadingMessage {
    Certificate pseudonym_cert;
    SealedMessage sealed;
    Signature signature; // by the pseudonym key over encode_sealed(sealed)

    friend bool operator==(const ReadingMessage&, const ReadingMessage&) = default;
};

Bytes encode(const EnrollRequest& msg, const CurveParams& curve);
Bytes encode(const EnrollResponse& msg, const CurveParams& curve);
Bytes encode(const PseudonymRequest& msg, const CurveParams& curve);
Bytes encode(const CocoonBatch& msg, const CurveParams& curve);
Bytes encode(const ButterflyBatch& msg, const CurveParams& curve);
Bytes encode(const PseudonymDelivery& msg, const CurveParams& curve);
Bytes encode(const ExpansionValue& msg, const CurveParams& curve);
Bytes encode(const ReadingMessage& msg, const CurveParams& curve);

EnrollRequest decode_enroll_request(ByteView data, const CurveParams& curve);
EnrollResponse decode_enroll_response(ByteView data, const CurveParams& curve);
PseudonymRequest decode_pseudonym_request(ByteView data, const CurveParams& curve);
CocoonBatch decode_cocoon_batch(ByteView data, const CurveParams& curve);
ButterflyBatch decode_butterfly_batch(ByteView data, const CurveParams& curve);
PseudonymDelivery decode_pseudonym_delivery(ByteView data, const CurveParams& curve);
ExpansionValue decode_expansion_value(ByteView data, const CurveParams& curve);
ReadingMessage decode_reading(ByteView data, const CurveParams& curve);

} // namespace pcert::proto
