#include <pcert/entities.hpp>
#include <pcert/error.hpp>

namespace pcert::entity {

using namespace pcert::ec;
using namespace pcert::proto;

namespace {

template <typename... Certs> std::vector<Certificate> chain_of(const Certs&... certs)
{
    return {certs...};
}

bool leaf_is(const std::vector<Certificate>& chain, SubjectKind kind)
{
    return !chain.empty() && chain.front().subject_kind == kind;
}

void expect_kind(const Envelope& env, MsgKind kind, Role from)
{
    if (env.kind != kind || env.from.role != from)
        fail(ErrorCode::ProtocolViolation, "unexpected " + std::string(to_string(env.kind)) + " from " +
                                               to_string(env.from) + " at " + to_string(env.to));
}

Envelope make(const Address& from, const Address& to, MsgKind kind, Bytes payload, bool out_of_band = false)
{
    Envelope env;
    env.from = from;
    env.to = to;
    env.kind = kind;
    env.out_of_band = out_of_band;
    env.payload = std::move(payload);
    return env;
}

constexpr Address eca_address{Role::Eca, 0};
constexpr Address ra_address{Role::Ra, 0};
constexpr Address pca_address{Role::Pca, 0};

/// Enrollment chain check used by both end entities on enroll_response.
void accept_enrollment(const std::vector<Certificate>& chain, SubjectKind kind, const Point& own_pub,
                       const Directory& dir, const Environment& env)
{
    auto verdict = pki::verify_chain(chain, dir.rca, env.now());
    if (!verdict)
        fail(ErrorCode::BadChain,
             "enrollment chain rejected: " + std::string(to_string(*verdict.reason)) + " at position " +
                 std::to_string(verdict.position));
    if (!leaf_is(chain, kind) || !(chain.front().subject_pub == own_pub))
        fail(ErrorCode::BadChain, "enrollment certificate does not cover this entity's key");
}

} // namespace

std::string_view to_string(Checkpoint cp) noexcept
{
    switch (cp) {
    case Checkpoint::RaVerifyEnrollment:
        return "ra_verify_enrollment";
    case Checkpoint::DeviceVerifyResponse:
        return "device_verify_response";
    case Checkpoint::DeviceVerifyPseudonymChain:
        return "device_verify_pseudonym_chain";
    case Checkpoint::HospitalVerifyChain:
        return "hospital_verify_chain";
    case Checkpoint::HospitalVerifySignature:
        return "hospital_verify_signature";
    case Checkpoint::HospitalDecrypt:
        return "hospital_decrypt";
    }
    return "unknown";
}

void Environment::check(Checkpoint cp, bool passed, ErrorCode code, const std::string& what) const
{
    if (observer)
        observer(cp, passed);
    if (!passed)
        throw CheckFailed(cp, code, std::string(to_string(cp)) + ": " + what);
}

Authorities bootstrap(const CurveParams& curve, Rng& rng, std::int64_t now, const Lifetimes& lifetimes)
{
    Validity validity{now, now + lifetimes.authority};
    Authorities out;
    out.rca.keys = keygen(curve, rng);
    out.rca.cert = pki::issue_root(out.rca.keys.priv, {'r', 'c', 'a'}, validity, curve, rng);
    auto sub = [&](Authority& a, SubjectKind kind, Bytes id) {
        a.keys = keygen(curve, rng);
        a.cert = pki::issue(out.rca.cert, out.rca.keys.priv, a.keys.pub, kind, id, validity, curve, rng);
    };
    sub(out.eca, SubjectKind::Eca, {'e', 'c', 'a'});
    sub(out.pca, SubjectKind::Pca, {'p', 'c', 'a'});
    sub(out.ra, SubjectKind::Ra, {'r', 'a'});
    return out;
}

ExpandedKey hospital_expand(const Scalar& t, const KeyPair& hospital, const CurveParams& curve)
{
    if (t.is_zero() || t.value() < 0 || t.value() >= curve.order())
        fail(ErrorCode::InvalidArgument, "expansion value t must lie in [1, n)");
    ExpandedKey out;
    out.z = scalar_add(t, hospital.priv, curve);
    if (out.z.is_zero())
        fail(ErrorCode::InvalidArgument, "t + h = 0 mod n; draw another t");
    out.big_z = point_add(scalar_mul_base(t, curve), hospital.pub, curve);
    if (!(scalar_mul_base(out.z, curve) == out.big_z))
        fail(ErrorCode::KeyMismatch, "z*G != t*G + H; hospital key pair is inconsistent");
    return out;
}

Point device_expand_hospital_pub(const Scalar& t, const Point& hospital_pub, const CurveParams& curve)
{
    if (hospital_pub.is_infinity() || !on_curve(hospital_pub, curve))
        fail(ErrorCode::OffCurveInput, "hospital public key H is not a valid curve point");
    if (t.is_zero() || t.value() < 0 || t.value() >= curve.order())
        fail(ErrorCode::InvalidArgument, "expansion value t must lie in [1, n)");
    auto big_z = point_add(scalar_mul_base(t, curve), hospital_pub, curve);
    if (big_z.is_infinity())
        fail(ErrorCode::InvalidArgument, "t*G + H is the point at infinity");
    return big_z;
}

ReadingMessage send_reading(ByteView reading, const Pseudonym& pseudonym, const Point& big_z,
                            const CurveParams& curve, Rng& rng)
{
    ReadingMessage msg;
    msg.pseudonym_cert = pseudonym.cert;
    msg.sealed = crypto::ecies_encrypt(pseudonym.priv, big_z, reading, curve);
    msg.signature = crypto::ecdsa_sign(pseudonym.priv, crypto::encode_sealed(msg.sealed), curve, rng);
    return msg;
}

Bytes hospital_receive(const ReadingMessage& msg, const Scalar& z, const Certificate& pca_cert,
                       const Certificate& trusted_root, const Environment& env)
{
    const auto& curve = *env.curve;
    auto chain = chain_of(msg.pseudonym_cert, pca_cert, trusted_root);
    auto verdict = pki::verify_chain(chain, trusted_root, env.now());
    env.check(Checkpoint::HospitalVerifyChain, verdict && leaf_is(chain, SubjectKind::Pseudonym), ErrorCode::BadChain,
              verdict ? "leaf is not a pseudonym certificate"
                      : "pseudonym chain rejected: " + std::string(to_string(*verdict.reason)));

    const auto& signer = msg.pseudonym_cert.subject_pub;
    env.check(Checkpoint::HospitalVerifySignature,
              crypto::ecdsa_verify(signer, crypto::encode_sealed(msg.sealed), msg.signature, curve),
              ErrorCode::BadSignature, "reading signature does not verify under the pseudonym key");

    Bytes plaintext;
    try {
        plaintext = crypto::ecies_decrypt(z, signer, msg.sealed, curve);
    } catch (const Error& e) {
        env.check(Checkpoint::HospitalDecrypt, false, e.code(), e.what());
    }
    env.check(Checkpoint::HospitalDecrypt, true, ErrorCode::MacMismatch, {});
    return plaintext;
}

// ---------------------------------------------------------------------------

EcaNode::EcaNode(const Environment& env, Authority self, Certificate rca, Rng& rng, std::int64_t lifetime)
    : env_(env), self_(std::move(self)), rca_(std::move(rca)), rng_(rng), lifetime_(lifetime)
{
}

std::vector<Envelope> EcaNode::handle(const Envelope& env)
{
    if (env.kind != MsgKind::EnrollRequest || (env.from.role != Role::Device && env.from.role != Role::Hospital))
        fail(ErrorCode::ProtocolViolation, "eca accepts only enroll_request from end entities");
    const auto& curve = *env_.curve;
    auto req = decode_enroll_request(env.payload, curve);
    auto expected = env.from.role == Role::Device ? SubjectKind::Device : SubjectKind::Hospital;
    if (req.kind != expected)
        fail(ErrorCode::UnauthorizedIssuer, "enrollment kind does not match the requesting role");
    auto cert = pki::issue(self_.cert, self_.keys.priv, req.pub, req.kind, req.subject_id,
                           {env_.now(), env_.now() + lifetime_}, curve, rng_);
    EnrollResponse resp{chain_of(cert, self_.cert, rca_)};
    return {make(address(), env.from, MsgKind::EnrollResponse, encode(resp, curve))};
}

// ---------------------------------------------------------------------------

RaNode::RaNode(const Environment& env, Authority self, Directory dir, Rng& rng)
    : env_(env), self_(std::move(self)), dir_(std::move(dir)), rng_(rng)
{
}

std::vector<Envelope> RaNode::handle(const Envelope& env)
{
    if (env.kind == MsgKind::PseudonymRequest)
        return on_request(env);
    if (env.kind == MsgKind::ButterflyBatch)
        return on_batch(env);
    fail(ErrorCode::ProtocolViolation, "ra cannot handle " + std::string(to_string(env.kind)));
}

std::vector<Envelope> RaNode::on_request(const Envelope& env)
{
    expect_kind(env, MsgKind::PseudonymRequest, Role::Device);
    const auto& curve = *env_.curve;
    auto req = decode_pseudonym_request(env.payload, curve);

    auto verdict = pki::verify_chain(req.enrollment_chain, dir_.rca, env_.now());
    std::string why;
    if (!verdict)
        why = "enrollment chain rejected: " + std::string(to_string(*verdict.reason));
    else if (!leaf_is(req.enrollment_chain, SubjectKind::Device))
        why = "enrollment certificate is not a device certificate";
    else if (req.enrollment_chain.size() < 2 || !(req.enrollment_chain[1] == dir_.eca))
        why = "enrollment certificate not issued by the ECA";
    else if (!(req.enrollment_chain.front().subject_pub == req.share.sign_pub))
        why = "caterpillar key does not match the enrollment certificate";
    else if (!crypto::ecdsa_verify(req.share.sign_pub, signed_body(req, curve), req.signature, curve))
        why = "request signature does not verify";
    else if (req.count == 0 || req.start > UINT32_MAX - req.count)
        why = "invalid index range";
    env_.check(Checkpoint::RaVerifyEnrollment, why.empty(), ErrorCode::NotEnrolled, why);

    CocoonBatch batch;
    batch.request_id = next_request_++;
    batch.cocoons.reserve(req.count);
    for (std::uint32_t k = 0; k < req.count; ++k)
        batch.cocoons.push_back(bke::cocoon_public(req.share, req.start + k, curve));
    batch.ra_signature = crypto::ecdsa_sign(self_.keys.priv, signed_body(batch, curve), curve, rng_);
    pending_[batch.request_id] = env.from;
    return {make(address(), pca_address, MsgKind::CocoonBatch, encode(batch, curve))};
}

std::vector<Envelope> RaNode::on_batch(const Envelope& env)
{
    expect_kind(env, MsgKind::ButterflyBatch, Role::Pca);
    const auto& curve = *env_.curve;
    auto batch = decode_butterfly_batch(env.payload, curve);
    auto it = pending_.find(batch.request_id);
    if (it == pending_.end())
        fail(ErrorCode::ProtocolViolation, "butterfly batch for unknown request");
    auto device = it->second;
    pending_.erase(it);
    PseudonymDelivery delivery{std::move(batch.responses), std::move(batch.certs)};
    return {make(address(), device, MsgKind::PseudonymDelivery, encode(delivery, curve))};
}

// ---------------------------------------------------------------------------

PcaNode::PcaNode(const Environment& env, Authority self, Directory dir, Rng& rng, std::int64_t lifetime)
    : env_(env), self_(std::move(self)), dir_(std::move(dir)), rng_(rng), lifetime_(lifetime)
{
}

std::vector<Envelope> PcaNode::handle(const Envelope& env)
{
    expect_kind(env, MsgKind::CocoonBatch, Role::Ra);
    const auto& curve = *env_.curve;
    auto batch = decode_cocoon_batch(env.payload, curve);
    if (!pki::verify_chain(chain_of(dir_.ra, dir_.rca), dir_.rca, env_.now()) ||
        !crypto::ecdsa_verify(dir_.ra.subject_pub, signed_body(batch, curve), batch.ra_signature, curve))
        fail(ErrorCode::ProtocolViolation, "cocoon batch is not signed by the RA");

    ButterflyBatch out;
    out.request_id = batch.request_id;
    Validity validity{env_.now(), env_.now() + lifetime_};
    for (const auto& cocoon : batch.cocoons) {
        auto resp = bke::butterfly_public(cocoon, self_.keys, curve, rng_);
        out.certs.push_back(pki::issue(self_.cert, self_.keys.priv, resp.butterfly_pub, SubjectKind::Pseudonym,
                                       rng_.bytes(16), validity, curve, rng_));
        out.responses.push_back(std::move(resp));
    }
    return {make(address(), ra_address, MsgKind::ButterflyBatch, encode(out, curve))};
}

// ---------------------------------------------------------------------------

DeviceNode::DeviceNode(const Environment& env, std::uint32_t instance, Bytes subject_id, Directory dir, Rng& rng)
    : env_(env), instance_(instance), subject_id_(std::move(subject_id)), dir_(std::move(dir)), rng_(rng),
      caterpillar_(bke::gen_caterpillar(*env.curve, rng))
{
}

std::vector<Envelope> DeviceNode::handle(const Envelope& env)
{
    switch (env.kind) {
    case MsgKind::EnrollResponse:
        return on_enrolled(env);
    case MsgKind::PseudonymDelivery:
        return on_delivery(env);
    case MsgKind::ExpansionValue:
        return on_expansion(env);
    default:
        fail(ErrorCode::ProtocolViolation, "device cannot handle " + std::string(to_string(env.kind)));
    }
}

Envelope DeviceNode::enroll_request() const
{
    EnrollRequest req{SubjectKind::Device, subject_id_, caterpillar_.sign_pair.pub};
    return make(address(), eca_address, MsgKind::EnrollRequest, encode(req, *env_.curve));
}

std::vector<Envelope> DeviceNode::on_enrolled(const Envelope& env)
{
    expect_kind(env, MsgKind::EnrollResponse, Role::Eca);
    auto resp = decode_enroll_response(env.payload, *env_.curve);
    accept_enrollment(resp.chain, SubjectKind::Device, caterpillar_.sign_pair.pub, dir_, env_);
    enrollment_chain_ = std::move(resp.chain);
    return {};
}

Envelope DeviceNode::pseudonym_request(std::uint32_t count)
{
    if (!enrolled())
        fail(ErrorCode::NotEnrolled, "device has no enrollment certificate");
    if (count == 0)
        fail(ErrorCode::InvalidArgument, "pseudonym count must be at least 1");
    if (outstanding_)
        fail(ErrorCode::ProtocolViolation, "a pseudonym request is already outstanding");
    if (next_index_ > UINT32_MAX - count)
        fail(ErrorCode::InvalidArgument, "butterfly index space exhausted");
    const auto& curve = *env_.curve;
    PseudonymRequest req;
    req.enrollment_chain = enrollment_chain_;
    req.share = caterpillar_.public_share();
    req.start = next_index_;
    req.count = count;
    req.signature = crypto::ecdsa_sign(caterpillar_.sign_pair.priv, signed_body(req, curve), curve, rng_);
    outstanding_ = {next_index_, count};
    next_index_ += count;
    return make(address(), ra_address, MsgKind::PseudonymRequest, encode(req, curve));
}

void DeviceNode::set_next_index(std::uint32_t index)
{
    if (outstanding_)
        fail(ErrorCode::ProtocolViolation, "a pseudonym request is already outstanding");
    next_index_ = index;
}

std::vector<Envelope> DeviceNode::on_delivery(const Envelope& env)
{
    expect_kind(env, MsgKind::PseudonymDelivery, Role::Ra);
    const auto& curve = *env_.curve;
    if (!outstanding_)
        fail(ErrorCode::ProtocolViolation, "pseudonym delivery without a request");
    auto [start, count] = *outstanding_;
    outstanding_.reset();
    auto delivery = decode_pseudonym_delivery(env.payload, curve);
    if (delivery.responses.size() != count)
        fail(ErrorCode::ProtocolViolation, "pseudonym delivery has the wrong number of responses");

    std::vector<Pseudonym> fresh;
    for (std::uint32_t k = 0; k < count; ++k) {
        const auto& resp = delivery.responses[k];
        const auto& cert = delivery.certs[k];
        bke::ButterflyPrivate opened;
        try {
            opened = bke::open_butterfly(bke::cocoon_private(caterpillar_, start + k, curve), resp,
                                         dir_.pca.subject_pub, curve);
        } catch (const Error& e) {
            env_.check(Checkpoint::DeviceVerifyResponse, false, e.code(),
                       "response " + std::to_string(start + k) + ": " + e.what());
        }
        env_.check(Checkpoint::DeviceVerifyResponse, true, ErrorCode::KeyMismatch, {});

        auto verdict = pki::verify_chain(chain_of(cert, dir_.pca, dir_.rca), dir_.rca, env_.now());
        std::string why;
        if (!verdict)
            why = "pseudonym chain rejected: " + std::string(to_string(*verdict.reason));
        else if (cert.subject_kind != SubjectKind::Pseudonym || !(cert.subject_pub == resp.butterfly_pub))
            why = "pseudonym certificate does not cover the butterfly key";
        env_.check(Checkpoint::DeviceVerifyPseudonymChain, why.empty(), ErrorCode::BadChain, why);

        fresh.push_back({cert, opened.priv, opened.randomiser});
    }
    pseudonyms_.insert(pseudonyms_.end(), fresh.begin(), fresh.end());
    return {};
}

std::vector<Envelope> DeviceNode::on_expansion(const Envelope& env)
{
    expect_kind(env, MsgKind::ExpansionValue, Role::Hospital);
    if (!env.out_of_band)
        fail(ErrorCode::ProtocolViolation, "expansion value must arrive out of band");
    const auto& curve = *env_.curve;
    auto msg = decode_expansion_value(env.payload, curve);
    auto verdict = pki::verify_chain(msg.hospital_chain, dir_.rca, env_.now());
    if (!verdict || !leaf_is(msg.hospital_chain, SubjectKind::Hospital))
        fail(ErrorCode::BadChain, "hospital chain rejected");
    auto big_z = device_expand_hospital_pub(msg.t, msg.hospital_chain.front().subject_pub, curve);
    episodes_.insert_or_assign(env.from, Episode{msg.t, big_z});
    return {};
}

Envelope DeviceNode::reading(ByteView data, std::size_t pseudonym_index, const Address& hospital)
{
    auto it = episodes_.find(hospital);
    if (it == episodes_.end())
        fail(ErrorCode::ProtocolViolation, "no expansion value negotiated with " + to_string(hospital));
    if (pseudonym_index >= pseudonyms_.size())
        fail(ErrorCode::InvalidArgument, "no pseudonym at index " + std::to_string(pseudonym_index));
    const auto& curve = *env_.curve;
    auto msg = send_reading(data, pseudonyms_[pseudonym_index], it->second.big_z, curve, rng_);
    return make(address(), hospital, MsgKind::Reading, encode(msg, curve));
}

std::optional<Scalar> DeviceNode::expansion_value(const Address& hospital) const
{
    auto it = episodes_.find(hospital);
    if (it == episodes_.end())
        return std::nullopt;
    return it->second.t;
}

std::optional<Point> DeviceNode::hospital_target(const Address& hospital) const
{
    auto it = episodes_.find(hospital);
    if (it == episodes_.end())
        return std::nullopt;
    return it->second.big_z;
}

// ---------------------------------------------------------------------------

HospitalNode::HospitalNode(const Environment& env, std::uint32_t instance, Bytes subject_id, Directory dir,
                           Rng& rng)
    : env_(env), instance_(instance), subject_id_(std::move(subject_id)), dir_(std::move(dir)), rng_(rng),
      keys_(keygen(*env.curve, rng))
{
}

Envelope HospitalNode::enroll_request() const
{
    EnrollRequest req{SubjectKind::Hospital, subject_id_, keys_.pub};
    return make(address(), eca_address, MsgKind::EnrollRequest, encode(req, *env_.curve));
}

Envelope HospitalNode::negotiate(const Address& device)
{
    if (!enrolled())
        fail(ErrorCode::NotEnrolled, "hospital has no enrollment certificate");
    const auto& curve = *env_.curve;
    Scalar t;
    ExpandedKey key;
    for (;;) {
        t = random_scalar(curve, rng_);
        if (scalar_add(t, keys_.priv, curve).is_zero())
            continue;
        key = hospital_expand(t, keys_, curve);
        break;
    }
    episodes_.insert_or_assign(device, Episode{t, key});
    ExpansionValue msg{t, enrollment_chain_};
    return make(address(), device, MsgKind::ExpansionValue, encode(msg, curve), true);
}

std::vector<Envelope> HospitalNode::handle(const Envelope& env)
{
    const auto& curve = *env_.curve;
    if (env.kind == MsgKind::EnrollResponse) {
        expect_kind(env, MsgKind::EnrollResponse, Role::Eca);
        auto resp = decode_enroll_response(env.payload, curve);
        accept_enrollment(resp.chain, SubjectKind::Hospital, keys_.pub, dir_, env_);
        enrollment_chain_ = std::move(resp.chain);
        return {};
    }
    expect_kind(env, MsgKind::Reading, Role::Device);
    auto it = episodes_.find(env.from);
    if (it == episodes_.end())
        fail(ErrorCode::ProtocolViolation, "reading from a device with no care episode");
    auto msg = decode_reading(env.payload, curve);
    auto plaintext = hospital_receive(msg, it->second.key.z, dir_.pca, dir_.rca, env_);
    readings_.emplace_back(env.from, std::move(plaintext));
    return {};
}

std::optional<Scalar> HospitalNode::expansion_value(const Address& device) const
{
    auto it = episodes_.find(device);
    if (it == episodes_.end())
        return std::nullopt;
    return it->second.t;
}

std::optional<ExpandedKey> HospitalNode::expanded_key(const Address& device) const
{
    auto it = episodes_.find(device);
    if (it == episodes_.end())
        return std::nullopt;
    return it->second.key;
}

} // namespace pcert::entity
