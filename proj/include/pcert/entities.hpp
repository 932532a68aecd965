#pragma once

// State machines for the authorities and end entities of the healthcare
// flow, plus the pure key-expansion and reading operations they use.

#include <pcert/bus.hpp>
#include <pcert/error.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace pcert::entity {

using bke::CaterpillarMaterial;
using crypto::Signature;
using ec::CurveParams;
using ec::KeyPair;
using ec::Point;
using ec::Scalar;
using pki::Certificate;
using pki::SubjectKind;
using pki::Validity;
using proto::Address;
using proto::Envelope;
using proto::ReadingMessage;
using proto::Role;

/// Checks whose outcome the fail-closed matrix observes, in flow order.
enum class Checkpoint : std::uint8_t {
    RaVerifyEnrollment,
    DeviceVerifyResponse,
    DeviceVerifyPseudonymChain,
    HospitalVerifyChain,
    HospitalVerifySignature,
    HospitalDecrypt,
};

inline constexpr std::array<Checkpoint, 6> all_checkpoints{
    Checkpoint::RaVerifyEnrollment,  Checkpoint::DeviceVerifyResponse,    Checkpoint::DeviceVerifyPseudonymChain,
    Checkpoint::HospitalVerifyChain, Checkpoint::HospitalVerifySignature, Checkpoint::HospitalDecrypt,
};

std::string_view to_string(Checkpoint cp) noexcept;

using CheckObserver = std::function<void(Checkpoint, bool passed)>;

/// Error raised by a failing checkpoint; carries which one.
class CheckFailed : public Error {
public:
    CheckFailed(Checkpoint cp, ErrorCode code, const std::string& what) : Error(code, what), checkpoint_(cp) {}
    Checkpoint checkpoint() const noexcept { return checkpoint_; }

private:
    Checkpoint checkpoint_;
};

/// State shared read-only by every entity of one system.
struct Environment {
    const CurveParams* curve = nullptr;
    const std::int64_t* clock = nullptr; // logical seconds
    CheckObserver observer;

    std::int64_t now() const { return *clock; }
    /// Reports the outcome; throws CheckFailed(cp, code) if !passed.
    void check(Checkpoint cp, bool passed, ErrorCode code, const std::string& what) const;
};

struct Authority {
    KeyPair keys;
    Certificate cert;
};

/// Public certificates every participant is provisioned with.
struct Directory {
    Certificate rca;
    Certificate eca;
    Certificate pca;
    Certificate ra;
};

struct Lifetimes {
    std::int64_t authority = 10 * 365 * 86400;
    std::int64_t enrollment = 365 * 86400;
    std::int64_t pseudonym = 86400; // one logical day per batch
};

struct Authorities {
    Authority rca, eca, pca, ra;

    Directory directory() const { return {rca.cert, eca.cert, pca.cert, ra.cert}; }
};

/// Self-signed RCA plus ECA, PCA and RA certificates issued by it.
Authorities bootstrap(const CurveParams& curve, Rng& rng, std::int64_t now, const Lifetimes& lifetimes = {});

// Pure operations.

struct ExpandedKey {
    Scalar z;
    Point big_z;
};

/// Z = t*G + H, z = (t + h) mod n. Throws InvalidArgument for t outside
/// [1, n) or if z = 0.
ExpandedKey hospital_expand(const Scalar& t, const KeyPair& hospital, const CurveParams& curve);

/// Z = t*G + H. Throws OffCurveInput for an invalid or infinite H.
Point device_expand_hospital_pub(const Scalar& t, const Point& hospital_pub, const CurveParams& curve);

struct Pseudonym {
    Certificate cert;
    Scalar priv;       // s
    Scalar randomiser; // c, kept for audit only
};

/// sealed = ECIES(s -> Z, reading), signature = ECDSA_s(encode_sealed(sealed)).
ReadingMessage send_reading(ByteView reading, const Pseudonym& pseudonym, const Point& big_z,
                            const CurveParams& curve, Rng& rng);

/// Verifies [pseudonym, pca, root] at now, then the signature, then decrypts
/// with z. Throws CheckFailed with BadChain, BadSignature or MacMismatch.
Bytes hospital_receive(const ReadingMessage& msg, const Scalar& z, const Certificate& pca_cert,
                       const Certificate& trusted_root, const Environment& env);

// Nodes.

class EcaNode final : public proto::Node {
public:
    EcaNode(const Environment& env, Authority self, Certificate rca, Rng& rng, std::int64_t lifetime);

    Address address() const override { return {Role::Eca, 0}; }
    std::vector<Envelope> handle(const Envelope& env) override;

    /// Mutable for fault injection.
    Certificate& stored_cert() noexcept { return self_.cert; }

private:
    const Environment& env_;
    Authority self_;
    Certificate rca_;
    Rng& rng_;
    std::int64_t lifetime_;
};

class RaNode final : public proto::Node {
public:
    RaNode(const Environment& env, Authority self, Directory dir, Rng& rng);

    Address address() const override { return {Role::Ra, 0}; }
    std::vector<Envelope> handle(const Envelope& env) override;

private:
    std::vector<Envelope> on_request(const Envelope& env);
    std::vector<Envelope> on_batch(const Envelope& env);

    const Environment& env_;
    Authority self_;
    Directory dir_;
    Rng& rng_;
    std::uint64_t next_request_ = 1;
    std::map<std::uint64_t, Address> pending_;
};

class PcaNode final : public proto::Node {
public:
    PcaNode(const Environment& env, Authority self, Directory dir, Rng& rng, std::int64_t lifetime);

    Address address() const override { return {Role::Pca, 0}; }
    std::vector<Envelope> handle(const Envelope& env) override;

private:
    const Environment& env_;
    Authority self_;
    Directory dir_;
    Rng& rng_;
    std::int64_t lifetime_;
};

class DeviceNode final : public proto::Node {
public:
    DeviceNode(const Environment& env, std::uint32_t instance, Bytes subject_id, Directory dir, Rng& rng);

    Address address() const override { return {Role::Device, instance_}; }
    std::vector<Envelope> handle(const Envelope& env) override;

    Envelope enroll_request() const;
    /// Throws NotEnrolled before enrollment.
    Envelope pseudonym_request(std::uint32_t count);
    /// First butterfly index of the next request. Indices must not be reused.
    void set_next_index(std::uint32_t index);
    /// Throws ProtocolViolation without an expansion value for hospital.
    Envelope reading(ByteView data, std::size_t pseudonym_index, const Address& hospital);

    bool enrolled() const noexcept { return !enrollment_chain_.empty(); }
    // Mutable for fault injection.
    std::vector<Certificate>& enrollment_chain() noexcept { return enrollment_chain_; }
    const CaterpillarMaterial& caterpillar() const noexcept { return caterpillar_; }
    const std::vector<Pseudonym>& pseudonyms() const noexcept { return pseudonyms_; }
    std::optional<Scalar> expansion_value(const Address& hospital) const;
    std::optional<Point> hospital_target(const Address& hospital) const;

private:
    struct Episode {
        Scalar t;
        Point big_z;
    };

    std::vector<Envelope> on_enrolled(const Envelope& env);
    std::vector<Envelope> on_delivery(const Envelope& env);
    std::vector<Envelope> on_expansion(const Envelope& env);

    const Environment& env_;
    std::uint32_t instance_;
    Bytes subject_id_;
    Directory dir_;
    Rng& rng_;
    CaterpillarMaterial caterpillar_;
    std::vector<Certificate> enrollment_chain_;
    std::uint32_t next_index_ = 0;
    std::optional<std::pair<std::uint32_t, std::uint32_t>> outstanding_; // [start, start + count)
    std::vector<Pseudonym> pseudonyms_;
    std::map<Address, Episode> episodes_;
};

class HospitalNode final : public proto::Node {
public:
    HospitalNode(const Environment& env, std::uint32_t instance, Bytes subject_id, Directory dir, Rng& rng);

    Address address() const override { return {Role::Hospital, instance_}; }
    std::vector<Envelope> handle(const Envelope& env) override;

    Envelope enroll_request() const;
    /// Draws t in [1, n) (redrawn while t + h = 0), stores (t, z, Z) for the
    /// device and returns the out-of-band envelope carrying t.
    Envelope negotiate(const Address& device);

    const KeyPair& keys() const noexcept { return keys_; }
    bool enrolled() const noexcept { return !enrollment_chain_.empty(); }
    const std::vector<Certificate>& enrollment_chain() const noexcept { return enrollment_chain_; }
    std::optional<Scalar> expansion_value(const Address& device) const;
    std::optional<ExpandedKey> expanded_key(const Address& device) const;
    /// Plaintexts recovered so far, in arrival order.
    const std::vector<std::pair<Address, Bytes>>& readings() const noexcept { return readings_; }

private:
    struct Episode {
        Scalar t;
        ExpandedKey key;
    };

    const Environment& env_;
    std::uint32_t instance_;
    Bytes subject_id_;
    Directory dir_;
    Rng& rng_;
    KeyPair keys_;
    std::vector<Certificate> enrollment_chain_;
    std::map<Address, Episode> episodes_;
    std::vector<std::pair<Address, Bytes>> readings_;
};

} // namespace pcert::entity
