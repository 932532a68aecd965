#include <pcert/error.hpp>
#include <pcert/scenario.hpp>

#include <fstream>
#include <sstream>

namespace pcert::harness {

using namespace pcert::ec;
using proto::Envelope;
using proto::MsgKind;

namespace {

void flip_low_bit(Scalar& s)
{
    mpz_class v = s.value();
    mpz_combit(v.get_mpz_t(), 0);
    s = Scalar(v);
}

proto::Bus::Interceptor make_interceptor(TamperPoint tamper, const CurveParams& curve)
{
    switch (tamper) {
    case TamperPoint::WrappedC:
        return [&curve](Envelope& env) {
            if (env.kind != MsgKind::PseudonymDelivery)
                return;
            auto msg = proto::decode_pseudonym_delivery(env.payload, curve);
            msg.responses.at(0).wrapped_c.ciphertext.at(0) ^= 0x01;
            env.payload = proto::encode(msg, curve);
        };
    case TamperPoint::WrongT:
        return [&curve](Envelope& env) {
            if (env.kind != MsgKind::ExpansionValue)
                return;
            auto msg = proto::decode_expansion_value(env.payload, curve);
            msg.t = scalar_add(msg.t, Scalar(1ul), curve);
            if (msg.t.is_zero())
                msg.t = Scalar(1ul);
            env.payload = proto::encode(msg, curve);
        };
    case TamperPoint::PseudonymCert:
    case TamperPoint::ReadingCiphertext:
    case TamperPoint::ReadingSignature:
        return [tamper, &curve](Envelope& env) {
            if (env.kind != MsgKind::Reading)
                return;
            auto msg = proto::decode_reading(env.payload, curve);
            if (tamper == TamperPoint::PseudonymCert)
                msg.pseudonym_cert.subject_id.at(0) ^= 0x01;
            else if (tamper == TamperPoint::ReadingCiphertext)
                msg.sealed.ciphertext.at(0) ^= 0x01;
            else
                flip_low_bit(msg.signature.s);
            env.payload = proto::encode(msg, curve);
        };
    default:
        return {};
    }
}

std::string_view step_of(Checkpoint cp)
{
    switch (cp) {
    case Checkpoint::RaVerifyEnrollment:
    case Checkpoint::DeviceVerifyResponse:
    case Checkpoint::DeviceVerifyPseudonymChain:
        return "request_pseudonyms";
    default:
        return "hospital_receive";
    }
}

std::string file_stem(const proto::Address& addr)
{
    auto s = proto::to_string(addr);
    for (auto& ch : s)
        if (ch == '/')
            ch = '-';
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        fail(ErrorCode::InvalidArgument, "cannot write " + path.string());
}

void write_file(const std::filesystem::path& path, const Bytes& data)
{
    write_file(path, std::string(data.begin(), data.end()));
}

} // namespace

std::string_view to_string(TamperPoint t) noexcept
{
    switch (t) {
    case TamperPoint::None:
        return "none";
    case TamperPoint::EnrollmentCert:
        return "enrollment-cert";
    case TamperPoint::PseudonymCert:
        return "pseudonym-cert";
    case TamperPoint::WrappedC:
        return "wrapped-c";
    case TamperPoint::ReadingCiphertext:
        return "reading-ciphertext";
    case TamperPoint::ReadingSignature:
        return "reading-signature";
    case TamperPoint::WrongT:
        return "wrong-t";
    }
    return "unknown";
}

std::optional<TamperPoint> tamper_from_string(std::string_view name) noexcept
{
    if (name == "none")
        return TamperPoint::None;
    for (auto t : all_tamper_points)
        if (to_string(t) == name)
            return t;
    return std::nullopt;
}

Checkpoint expected_checkpoint(TamperPoint t)
{
    switch (t) {
    case TamperPoint::EnrollmentCert:
        return Checkpoint::RaVerifyEnrollment;
    case TamperPoint::WrappedC:
        return Checkpoint::DeviceVerifyResponse;
    case TamperPoint::PseudonymCert:
        return Checkpoint::HospitalVerifyChain;
    case TamperPoint::ReadingCiphertext:
    case TamperPoint::ReadingSignature:
        return Checkpoint::HospitalVerifySignature;
    case TamperPoint::WrongT:
        return Checkpoint::HospitalDecrypt;
    case TamperPoint::None:
        break;
    }
    fail(ErrorCode::InvalidArgument, "no checkpoint for tamper point none");
}

std::string_view to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::NotReached:
        return "not-reached";
    case Verdict::Passed:
        return "passed";
    case Verdict::Failed:
        return "failed";
    }
    return "unknown";
}

ScenarioResult run_scenario(const ScenarioConfig& config)
{
    ScenarioResult result;
    for (auto cp : entity::all_checkpoints)
        result.checkpoints[cp] = Verdict::NotReached;

    std::string step = "bootstrap";
    std::unique_ptr<entity::System> sys;
    proto::Address dev, hosp;
    try {
        const auto& curve = curve_for_strength(config.strength);
        sys = std::make_unique<entity::System>(curve, entity::SystemOptions{config.seed, config.start_time, {}});
        result.directory = sys->directory();
        sys->set_observer([&](Checkpoint cp, bool passed) {
            auto& v = result.checkpoints[cp];
            if (!passed)
                v = Verdict::Failed;
            else if (v != Verdict::Failed)
                v = Verdict::Passed;
        });
        sys->bus().set_interceptor(make_interceptor(config.tamper, curve));
        dev = sys->add_device("device-0001");
        hosp = sys->add_hospital("hospital-0001");

        step = "enroll";
        result.device_enrollment = sys->enroll(dev);
        result.hospital_enrollment = sys->enroll(hosp);
        if (config.tamper == TamperPoint::EnrollmentCert)
            sys->device(dev).enrollment_chain().front().subject_id.at(0) ^= 0x01;

        step = "request_pseudonyms";
        sys->request_pseudonyms(dev, config.pseudonym_count);

        step = "negotiate_t";
        sys->negotiate_t(hosp, dev);

        step = "send_reading";
        result.recovered = sys->send_reading(dev, hosp, config.reading, 0);
        result.ok = result.recovered == config.reading;
        if (!result.ok) {
            result.failed_step = "hospital_receive";
            result.message = "recovered reading differs from the one sent";
        }
    } catch (const entity::CheckFailed& e) {
        result.failed_check = e.checkpoint();
        result.failed_step = step_of(e.checkpoint());
        result.error = e.code();
        result.message = e.what();
    } catch (const Error& e) {
        result.failed_step = step;
        result.error = e.code();
        result.message = e.what();
    }

    if (sys) {
        const auto& curve = sys->curve();
        for (const auto& addr : sys->bus().observers())
            result.transcripts[addr] = sys->bus().transcript(addr);
        if (result.device_enrollment) {
            auto& d = sys->device(dev);
            const auto& cat = d.caterpillar();
            auto& a = result.audit;
            a.sign_pub = encode_point(cat.sign_pair.pub, curve);
            a.enc_pub = encode_point(cat.enc_pair.pub, curve);
            a.ck.assign(cat.ck.key.begin(), cat.ck.key.end());
            a.ek.assign(cat.ek.key.begin(), cat.ek.key.end());
            a.enrollment_cert = pki::encode(*result.device_enrollment);
            a.device_subject_id = result.device_enrollment->subject_id;
            for (const auto& p : d.pseudonyms()) {
                a.randomisers.push_back(encode_scalar(p.randomiser, curve));
                a.butterfly_privates.push_back(encode_scalar(p.priv, curve));
                result.pseudonym_certs.push_back(p.cert);
            }
        }
    }
    return result;
}

std::vector<PrivacyFinding> scan_privacy(const ScenarioResult& result)
{
    std::vector<PrivacyFinding> findings;
    const auto& a = result.audit;
    auto scan = [&](const std::string& observer, const Bytes& hay, const Bytes& needle, const std::string& item) {
        if (contains(hay, needle))
            findings.push_back({observer, item});
    };

    const proto::Address ra{proto::Role::Ra, 0};
    const proto::Address pca{proto::Role::Pca, 0};
    if (auto it = result.transcripts.find(ra); it != result.transcripts.end()) {
        auto bytes = proto::transcript_bytes(it->second);
        for (std::size_t i = 0; i < a.randomisers.size(); ++i) {
            scan("ra", bytes, a.randomisers[i], "c[" + std::to_string(i) + "]");
            scan("ra", bytes, a.butterfly_privates[i], "s[" + std::to_string(i) + "]");
        }
    }
    if (auto it = result.transcripts.find(pca); it != result.transcripts.end()) {
        auto bytes = proto::transcript_bytes(it->second);
        scan("pca", bytes, a.sign_pub, "A");
        scan("pca", bytes, a.enc_pub, "P");
        scan("pca", bytes, a.ck, "ck");
        scan("pca", bytes, a.ek, "ek");
        scan("pca", bytes, a.enrollment_cert, "enrollment cert");
        scan("pca", bytes, a.device_subject_id, "device subject id");
    }
    for (const auto& [addr, log] : result.transcripts) {
        for (const auto& env : log) {
            if (env.kind != MsgKind::Reading)
                continue;
            auto bytes = proto::encode_envelope(env);
            auto who = proto::to_string(addr) + " reading " + std::to_string(env.seq);
            scan(who, bytes, a.sign_pub, "A");
            scan(who, bytes, a.enrollment_cert, "enrollment cert");
        }
    }
    return findings;
}

std::string summarize(const ScenarioResult& result)
{
    std::ostringstream os;
    if (result.ok)
        os << "status: ok\n";
    else
        os << "status: failed\nfailed step: " << result.failed_step << '\n';
    if (result.failed_check)
        os << "failed check: " << entity::to_string(*result.failed_check) << '\n';
    if (result.error)
        os << "error: " << to_string(*result.error) << '\n';
    if (!result.message.empty())
        os << "message: " << result.message << '\n';
    os << "checkpoints:\n";
    for (const auto& [cp, v] : result.checkpoints)
        os << "  " << entity::to_string(cp) << ": " << to_string(v) << '\n';
    os << "pseudonyms issued: " << result.pseudonym_certs.size() << '\n';
    if (result.ok)
        os << "reading recovered: " << result.recovered.size() << " bytes\n";
    auto findings = scan_privacy(result);
    os << "privacy findings: " << findings.size() << '\n';
    for (const auto& f : findings)
        os << "  " << f.observer << " contains " << f.item << '\n';
    return os.str();
}

void write_scenario(const ScenarioResult& result, const ScenarioConfig& config, const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir / "transcripts");
    fs::create_directories(dir / "certs");
    for (const auto& [addr, log] : result.transcripts)
        write_file(dir / "transcripts" / (file_stem(addr) + ".txt"), proto::dump_transcript(addr, log));

    const auto& d = result.directory;
    if (!d.rca.curve_name.empty()) {
        write_file(dir / "certs" / "rca.cert", pki::encode(d.rca));
        write_file(dir / "certs" / "eca.cert", pki::encode(d.eca));
        write_file(dir / "certs" / "pca.cert", pki::encode(d.pca));
        write_file(dir / "certs" / "ra.cert", pki::encode(d.ra));
    }
    if (result.device_enrollment)
        write_file(dir / "certs" / "device-0.cert", pki::encode(*result.device_enrollment));
    if (result.hospital_enrollment)
        write_file(dir / "certs" / "hospital-0.cert", pki::encode(*result.hospital_enrollment));
    for (std::size_t i = 0; i < result.pseudonym_certs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "pseudonym-%02zu.cert", i);
        write_file(dir / "certs" / name, pki::encode(result.pseudonym_certs[i]));
    }
    if (!result.pseudonym_certs.empty())
        write_file(dir / "certs" / "pseudonym-0.chain",
                   pki::encode_chain(std::vector{result.pseudonym_certs[0], d.pca, d.rca}));

    std::ostringstream head;
    head << "strength: " << config.strength << "\nseed: " << config.seed
         << "\ntamper: " << to_string(config.tamper) << '\n';
    write_file(dir / "summary.txt", head.str() + summarize(result));
}

} // namespace pcert::harness
