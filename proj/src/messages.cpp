#include <pcert/error.hpp>
#include <pcert/messages.hpp>

namespace pcert::proto {

using namespace pcert::ec;

namespace {

constexpr std::uint8_t envelope_version = 1;
constexpr std::uint8_t flag_out_of_band = 0x01;

void write_chain(ByteWriter& w, const std::vector<Certificate>& chain)
{
    w.lp32(pki::encode_chain(chain));
}

Certificate read_cert(ByteReader& r, const CurveParams& curve)
{
    auto cert = pki::decode(r.lp32());
    if (cert.curve_name != curve.name())
        fail(ErrorCode::MalformedEncoding, "certificate is for curve " + cert.curve_name);
    return cert;
}

std::vector<Certificate> read_chain(ByteReader& r, const CurveParams& curve)
{
    auto chain = pki::decode_chain(r.lp32());
    for (const auto& cert : chain)
        if (cert.curve_name != curve.name())
            fail(ErrorCode::MalformedEncoding, "certificate is for curve " + cert.curve_name);
    return chain;
}

std::uint32_t checked_count(std::size_t n)
{
    if (n > UINT32_MAX)
        fail(ErrorCode::InvalidArgument, "too many items for one message");
    return static_cast<std::uint32_t>(n);
}

void write_cocoons(ByteWriter& w, const std::vector<CocoonPublic>& cocoons, const CurveParams& curve)
{
    w.u32(checked_count(cocoons.size()));
    for (const auto& c : cocoons)
        w.lp32(bke::encode_cocoon(c, curve));
}

void write_responses(ByteWriter& w, const std::vector<ButterflyResponse>& responses,
                     const std::vector<Certificate>& certs, const CurveParams& curve)
{
    if (responses.size() != certs.size())
        fail(ErrorCode::InvalidArgument, "one certificate per butterfly response required");
    w.u32(checked_count(responses.size()));
    for (std::size_t k = 0; k < responses.size(); ++k) {
        w.lp32(bke::encode_butterfly(responses[k], curve));
        w.lp32(pki::encode(certs[k]));
    }
}

void read_responses(ByteReader& r, std::vector<ButterflyResponse>& responses, std::vector<Certificate>& certs,
                    const CurveParams& curve)
{
    auto n = r.u32();
    // Each entry needs at least its two length prefixes.
    if (n > r.remaining() / 8)
        fail(ErrorCode::MalformedEncoding, "response count exceeds payload");
    for (std::uint32_t k = 0; k < n; ++k) {
        responses.push_back(bke::decode_butterfly(r.lp32(), curve));
        certs.push_back(read_cert(r, curve));
    }
}

template <typename T, typename Fn> T decode_all(ByteView data, Fn&& body)
{
    ByteReader r(data);
    T out = body(r);
    r.expect_end();
    return out;
}

} // namespace

std::string_view to_string(Role role) noexcept
{
    switch (role) {
    case Role::Rca:
        return "rca";
    case Role::Eca:
        return "eca";
    case Role::Pca:
        return "pca";
    case Role::Ra:
        return "ra";
    case Role::Device:
        return "device";
    case Role::Hospital:
        return "hospital";
    }
    return "unknown";
}

std::string to_string(const Address& addr)
{
    std::string out(to_string(addr.role));
    if (addr.role == Role::Device || addr.role == Role::Hospital)
        out += "/" + std::to_string(addr.instance);
    return out;
}

std::string_view to_string(MsgKind kind) noexcept
{
    switch (kind) {
    case MsgKind::EnrollRequest:
        return "enroll_request";
    case MsgKind::EnrollResponse:
        return "enroll_response";
    case MsgKind::PseudonymRequest:
        return "pseudonym_request";
    case MsgKind::CocoonBatch:
        return "cocoon_batch";
    case MsgKind::ButterflyBatch:
        return "butterfly_batch";
    case MsgKind::PseudonymDelivery:
        return "pseudonym_delivery";
    case MsgKind::ExpansionValue:
        return "expansion_value";
    case MsgKind::Reading:
        return "reading";
    }
    return "unknown";
}

Bytes encode_envelope(const Envelope& env)
{
    ByteWriter w;
    w.u8(envelope_version)
        .u8(static_cast<std::uint8_t>(env.from.role))
        .u32(env.from.instance)
        .u8(static_cast<std::uint8_t>(env.to.role))
        .u32(env.to.instance)
        .u8(static_cast<std::uint8_t>(env.kind))
        .u8(env.out_of_band ? flag_out_of_band : 0)
        .u64(env.seq)
        .lp32(env.payload);
    return std::move(w).bytes();
}

Envelope decode_envelope(ByteView data)
{
    return decode_all<Envelope>(data, [](ByteReader& r) {
        if (r.u8() != envelope_version)
            fail(ErrorCode::MalformedEncoding, "unsupported envelope version");
        auto role = [](std::uint8_t b) {
            if (b < 1 || b > 6)
                fail(ErrorCode::MalformedEncoding, "unknown role");
            return static_cast<Role>(b);
        };
        Envelope env;
        env.from.role = role(r.u8());
        env.from.instance = r.u32();
        env.to.role = role(r.u8());
        env.to.instance = r.u32();
        auto kind = r.u8();
        if (kind < 1 || kind > 8)
            fail(ErrorCode::MalformedEncoding, "unknown message kind");
        env.kind = static_cast<MsgKind>(kind);
        auto flags = r.u8();
        if (flags & ~flag_out_of_band)
            fail(ErrorCode::MalformedEncoding, "unknown envelope flags");
        env.out_of_band = flags & flag_out_of_band;
        env.seq = r.u64();
        env.payload = r.lp32();
        return env;
    });
}

Bytes signed_body(const PseudonymRequest& req, const CurveParams& curve)
{
    ByteWriter w;
    write_chain(w, req.enrollment_chain);
    w.lp32(bke::encode_caterpillar_public(req.share, curve));
    w.u32(req.start).u32(req.count);
    return std::move(w).bytes();
}

Bytes signed_body(const CocoonBatch& batch, const CurveParams& curve)
{
    ByteWriter w;
    w.u64(batch.request_id);
    write_cocoons(w, batch.cocoons, curve);
    return std::move(w).bytes();
}

Bytes encode(const EnrollRequest& msg, const CurveParams& curve)
{
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(msg.kind)).lp16(msg.subject_id).lp16(encode_point(msg.pub, curve));
    return std::move(w).bytes();
}

EnrollRequest decode_enroll_request(ByteView data, const CurveParams& curve)
{
    return decode_all<EnrollRequest>(data, [&](ByteReader& r) {
        EnrollRequest msg;
        auto kind = pki::subject_kind_from_byte(r.u8());
        if (!kind)
            fail(ErrorCode::MalformedEncoding, "unknown subject kind");
        msg.kind = *kind;
        msg.subject_id = r.lp16();
        msg.pub = decode_point(r.lp16(), curve);
        return msg;
    });
}

Bytes encode(const EnrollResponse& msg, const CurveParams&)
{
    ByteWriter w;
    write_chain(w, msg.chain);
    return std::move(w).bytes();
}

EnrollResponse decode_enroll_response(ByteView data, const CurveParams& curve)
{
    return decode_all<EnrollResponse>(data, [&](ByteReader& r) { return EnrollResponse{read_chain(r, curve)}; });
}

Bytes encode(const PseudonymRequest& msg, const CurveParams& curve)
{
    ByteWriter w;
    w.raw(signed_body(msg, curve));
    w.lp16(crypto::encode_signature(msg.signature, curve));
    return std::move(w).bytes();
}

PseudonymRequest decode_pseudonym_request(ByteView data, const CurveParams& curve)
{
    return decode_all<PseudonymRequest>(data, [&](ByteReader& r) {
        PseudonymRequest msg;
        msg.enrollment_chain = read_chain(r, curve);
        msg.share = bke::decode_caterpillar_public(r.lp32(), curve);
        msg.start = r.u32();
        msg.count = r.u32();
        msg.signature = crypto::decode_signature(r.lp16(), curve);
        return msg;
    });
}

Bytes encode(const CocoonBatch& msg, const CurveParams& curve)
{
    ByteWriter w;
    w.raw(signed_body(msg, curve));
    w.lp16(crypto::encode_signature(msg.ra_signature, curve));
    return std::move(w).bytes();
}

CocoonBatch decode_cocoon_batch(ByteView data, const CurveParams& curve)
{
    return decode_all<CocoonBatch>(data, [&](ByteReader& r) {
        CocoonBatch msg;
        msg.request_id = r.u64();
        auto n = r.u32();
        if (n > r.remaining() / 4)
            fail(ErrorCode::MalformedEncoding, "cocoon count exceeds payload");
        for (std::uint32_t k = 0; k < n; ++k)
            msg.cocoons.push_back(bke::decode_cocoon(r.lp32(), curve));
        msg.ra_signature = crypto::decode_signature(r.lp16(), curve);
        return msg;
    });
}

Bytes encode(const ButterflyBatch& msg, const CurveParams& curve)
{
    ByteWriter w;
    w.u64(msg.request_id);
    write_responses(w, msg.responses, msg.certs, curve);
    return std::move(w).bytes();
}

ButterflyBatch decode_butterfly_batch(ByteView data, const CurveParams& curve)
{
    return decode_all<ButterflyBatch>(data, [&](ByteReader& r) {
        ButterflyBatch msg;
        msg.request_id = r.u64();
        read_responses(r, msg.responses, msg.certs, curve);
        return msg;
    });
}

Bytes encode(const PseudonymDelivery& msg, const CurveParams& curve)
{
    ByteWriter w;
    write_responses(w, msg.responses, msg.certs, curve);
    return std::move(w).bytes();
}

PseudonymDelivery decode_pseudonym_delivery(ByteView data, const CurveParams& curve)
{
    return decode_all<PseudonymDelivery>(data, [&](ByteReader& r) {
        PseudonymDelivery msg;
        read_responses(r, msg.responses, msg.certs, curve);
        return msg;
    });
}

Bytes encode(const ExpansionValue& msg, const CurveParams& curve)
{
    ByteWriter w;
    w.lp16(encode_scalar(msg.t, curve));
    write_chain(w, msg.hospital_chain);
    return std::move(w).bytes();
}

ExpansionValue decode_expansion_value(ByteView data, const CurveParams& curve)
{
    return decode_all<ExpansionValue>(data, [&](ByteReader& r) {
        ExpansionValue msg;
        msg.t = decode_scalar(r.lp16(), curve);
        msg.hospital_chain = read_chain(r, curve);
        return msg;
    });
}

Bytes encode(const ReadingMessage& msg, const CurveParams& curve)
{
    ByteWriter w;
    w.lp32(pki::encode(msg.pseudonym_cert));
    w.lp32(crypto::encode_sealed(msg.sealed));
    w.lp16(crypto::encode_signature(msg.signature, curve));
    return std::move(w).bytes();
}

ReadingMessage decode_reading(ByteView data, const CurveParams& curve)
{
    return decode_all<ReadingMessage>(data, [&](ByteReader& r) {
        ReadingMessage msg;
        msg.pseudonym_cert = read_cert(r, curve);
        msg.sealed = crypto::decode_sealed(r.lp32());
        msg.signature = crypto::decode_signature(r.lp16(), curve);
        return msg;
    });
}

} // namespace pcert::proto
