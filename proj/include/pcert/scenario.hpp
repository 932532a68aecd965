#pragma once

// End-to-end healthcare flow runner with fault injection and transcript
// privacy scans.

#include <pcert/system.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pcert::harness {

using entity::Checkpoint;

enum class TamperPoint : std::uint8_t {
    None,
    EnrollmentCert,
    PseudonymCert,
    WrappedC,
    ReadingCiphertext,
    ReadingSignature,
    WrongT,
};

inline constexpr std::array<TamperPoint, 6> all_tamper_points{
    TamperPoint::EnrollmentCert,    TamperPoint::PseudonymCert,    TamperPoint::WrappedC,
    TamperPoint::ReadingCiphertext, TamperPoint::ReadingSignature, TamperPoint::WrongT,
};

std::string_view to_string(TamperPoint t) noexcept;
std::optional<TamperPoint> tamper_from_string(std::string_view name) noexcept;
/// The checkpoint a tamper point must trip.
Checkpoint expected_checkpoint(TamperPoint t);

enum class Verdict : std::uint8_t { NotReached, Passed, Failed };

std::string_view to_string(Verdict v) noexcept;

struct ScenarioConfig {
    int strength = 128;
    std::uint64_t seed = 1;
    Bytes reading{'h', 'r', '=', '7', '2', ';', 's', 'p', 'o', '2', '=', '9', '8', ';', 't', '=', '3', '6', '.', '6'};
    std::uint32_t pseudonym_count = 20;
    std::int64_t start_time = 1'700'000'000;
    TamperPoint tamper = TamperPoint::None;
};

/// Secrets and identifiers the privacy scans look for.
struct AuditMaterial {
    Bytes sign_pub;         // A
    Bytes enc_pub;          // P
    Bytes ck;
    Bytes ek;
    Bytes enrollment_cert;  // as issued
    Bytes device_subject_id;
    std::vector<Bytes> randomisers;       // c per pseudonym
    std::vector<Bytes> butterfly_privates; // s per pseudonym
};

struct ScenarioResult {
    bool ok = false;
    std::string failed_step;              // flow step, empty on success
    std::optional<Checkpoint> failed_check;
    std::optional<ErrorCode> error;
    std::string message;
    Bytes recovered;
    std::map<Checkpoint, Verdict> checkpoints;

    std::map<proto::Address, proto::Transcript> transcripts;
    entity::Directory directory;
    std::optional<pki::Certificate> device_enrollment;
    std::optional<pki::Certificate> hospital_enrollment;
    std::vector<pki::Certificate> pseudonym_certs;
    AuditMaterial audit;
};

ScenarioResult run_scenario(const ScenarioConfig& config);

struct PrivacyFinding {
    std::string observer;
    std::string item;
};

/// RA transcript vs c and butterfly privates; PCA transcript vs A, P, ck,
/// ek and the device's enrollment identity; reading envelopes vs A and the
/// enrollment certificate.
std::vector<PrivacyFinding> scan_privacy(const ScenarioResult& result);

/// transcripts/<observer>.txt, certs/*.cert, summary.txt.
void write_scenario(const ScenarioResult& result, const ScenarioConfig& config, const std::filesystem::path& dir);

std::string summarize(const ScenarioResult& result);

} // namespace pcert::harness
