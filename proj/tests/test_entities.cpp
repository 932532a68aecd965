#include "test_support.hpp"

#include <pcert/system.hpp>

#include <set>

using namespace pcert;
using namespace pcert::ec;
using namespace pcert::entity;
using pcert::proto::Envelope;
using pcert::proto::MsgKind;

namespace {

const Bytes sample_reading{'h', 'r', '=', '7', '2', ';', 's', 'p', 'o', '2', '=', '9', '8'};

struct Flow {
    System sys;
    Address dev;
    Address hosp;

    explicit Flow(int strength = 128, std::uint64_t seed = 1)
        : sys(curve_for_strength(strength), {seed, 1'700'000'000, {}})
    {
        dev = sys.add_device("device-0001");
        hosp = sys.add_hospital("hospital-a");
        sys.enroll(dev);
        sys.enroll(hosp);
    }
};

ErrorCode code_of(const std::function<void()>& fn)
{
    auto code = testing::error_of(fn);
    REQUIRE(code.has_value());
    return *code;
}

} // namespace

TEST_CASE("bootstrap")
{
    const auto& c = curve_for_strength(80);
    System a(c, {1, 0, {}});
    const auto& dir = a.directory();
    CHECK(dir.rca.self_signed());
    for (const auto* cert : {&dir.eca, &dir.pca, &dir.ra}) {
        CHECK(cert->issuer_serial == dir.rca.serial);
        CHECK(pki::verify_chain(std::vector{*cert, dir.rca}, dir.rca, 0).accepted());
    }
    std::set<pki::Serial> serials{dir.rca.serial, dir.eca.serial, dir.pca.serial, dir.ra.serial};
    CHECK(serials.size() == 4);

    System b(c, {2, 0, {}});
    CHECK(b.directory().rca.serial != dir.rca.serial);
    CHECK(b.directory().eca.serial != dir.eca.serial);

    System same(c, {1, 0, {}});
    CHECK(same.directory().rca == dir.rca);
}

TEST_CASE("enrollment")
{
    Flow f;
    auto& dev = f.sys.device(f.dev);
    const auto& dir = f.sys.directory();
    REQUIRE(dev.enrolled());
    CHECK(pki::verify_chain(dev.enrollment_chain(), dir.rca, f.sys.now()).accepted());
    CHECK(dev.enrollment_chain().front().subject_pub == dev.caterpillar().sign_pair.pub);
    CHECK(dev.enrollment_chain().front().subject_kind == pki::SubjectKind::Device);

    auto& hosp = f.sys.hospital(f.hosp);
    const auto& hcert = hosp.enrollment_chain().front();
    CHECK(hcert.subject_kind == pki::SubjectKind::Hospital);
    CHECK(hcert.subject_pub == scalar_mul_base(hosp.keys().priv, f.sys.curve()));

    SUBCASE("off-curve key is rejected")
    {
        const auto& c = f.sys.curve();
        auto env = dev.enroll_request();
        ByteWriter w;
        Bytes bad(1 + 2 * c.field_bytes(), 0);
        bad[0] = 0x04;
        bad.back() = 1;
        w.u8(static_cast<std::uint8_t>(pki::SubjectKind::Device)).lp16(Bytes{'x'}).lp16(bad);
        env.payload = std::move(w).bytes();
        f.sys.bus().post(env);
        CHECK(code_of([&] { f.sys.bus().run(); }) == ErrorCode::OffCurveInput);
    }
    SUBCASE("device cannot ask for a hospital certificate")
    {
        auto env = dev.enroll_request();
        env.payload[0] = static_cast<std::uint8_t>(pki::SubjectKind::Hospital);
        f.sys.bus().post(env);
        CHECK(code_of([&] { f.sys.bus().run(); }) == ErrorCode::UnauthorizedIssuer);
    }
    SUBCASE("a tampered stored ECA certificate breaks later enrollments")
    {
        f.sys.eca().stored_cert().signature.s = scalar_add(f.sys.eca().stored_cert().signature.s, Scalar(1ul),
                                                           f.sys.curve());
        auto fresh = f.sys.add_device("device-0002");
        CHECK(code_of([&] { f.sys.enroll(fresh); }) == ErrorCode::BadChain);
        CHECK_FALSE(f.sys.device(fresh).enrolled());
    }
}

TEST_CASE("request_pseudonyms")
{
    Flow f;
    auto& dev = f.sys.device(f.dev);
    const auto& dir = f.sys.directory();
    const auto& c = f.sys.curve();

    SUBCASE("count = 20")
    {
        auto ps = f.sys.request_pseudonyms(f.dev, 20);
        REQUIRE(ps.size() == 20);
        std::set<std::string> pubs;
        for (const auto& p : ps) {
            CHECK(pki::verify_chain(std::vector{p.cert, dir.pca, dir.rca}, dir.rca, f.sys.now()).accepted());
            CHECK(p.cert.subject_kind == pki::SubjectKind::Pseudonym);
            CHECK(scalar_mul_base(p.priv, c) == p.cert.subject_pub);
            pubs.insert(to_hex(encode_point(p.cert.subject_pub, c)));
        }
        CHECK(pubs.size() == 20);

        // A second batch continues the index space.
        auto more = f.sys.request_pseudonyms(f.dev, 2);
        CHECK(dev.pseudonyms().size() == 22);
        CHECK_FALSE(more[0].cert.subject_pub == ps[0].cert.subject_pub);
    }
    SUBCASE("count = 1")
    {
        auto ps = f.sys.request_pseudonyms(f.dev, 1);
        REQUIRE(ps.size() == 1);
        CHECK(scalar_mul_base(ps[0].priv, c) == ps[0].cert.subject_pub);
    }
    SUBCASE("count = 0")
    {
        CHECK(code_of([&] { f.sys.request_pseudonyms(f.dev, 0); }) == ErrorCode::InvalidArgument);
    }
    SUBCASE("expired enrollment")
    {
        f.sys.advance(Lifetimes{}.enrollment);
        CHECK(code_of([&] { f.sys.request_pseudonyms(f.dev, 3); }) == ErrorCode::NotEnrolled);
        CHECK(dev.pseudonyms().empty());
    }
    SUBCASE("unenrolled device")
    {
        auto other = f.sys.add_device("device-0009");
        CHECK(code_of([&] { f.sys.request_pseudonyms(other, 1); }) == ErrorCode::NotEnrolled);
    }
    SUBCASE("a caterpillar key that does not match the enrollment certificate")
    {
        auto env = dev.pseudonym_request(1);
        auto req = proto::decode_pseudonym_request(env.payload, c);
        SeededRng rng(5);
        auto k = keygen(c, rng);
        req.share.sign_pub = k.pub;
        req.signature = crypto::ecdsa_sign(k.priv, proto::signed_body(req, c), c, rng);
        env.payload = proto::encode(req, c);
        f.sys.bus().post(env);
        CHECK(code_of([&] { f.sys.bus().run(); }) == ErrorCode::NotEnrolled);
    }
}

TEST_CASE("negotiate_t")
{
    Flow f;
    auto t1 = f.sys.negotiate_t(f.hosp, f.dev);
    CHECK(f.sys.device(f.dev).expansion_value(f.hosp) == t1);
    CHECK(f.sys.hospital(f.hosp).expansion_value(f.dev) == t1);
    CHECK_FALSE(t1.is_zero());
    auto t2 = f.sys.negotiate_t(f.hosp, f.dev);
    CHECK_FALSE(t1 == t2);
    CHECK(f.sys.device(f.dev).expansion_value(f.hosp) == t2);

    const auto& log = f.sys.bus().transcript(f.dev);
    REQUIRE_FALSE(log.empty());
    CHECK(log.back().kind == MsgKind::ExpansionValue);
    CHECK(log.back().out_of_band);
}

TEST_CASE("hospital_expand and device_expand_hospital_pub")
{
    SUBCASE("toy curve: t = 3, h = 2 gives 5G")
    {
        const auto& toy = toy_curve();
        KeyPair h{Scalar(2ul), scalar_mul_base(Scalar(2ul), toy)};
        auto k = hospital_expand(Scalar(3ul), h, toy);
        auto expected = oracle::toy_repeated(5, oracle::toy_generator());
        CHECK(testing::to_toy(k.big_z) == expected);
        CHECK(testing::to_toy(k.big_z) == std::optional(std::make_pair(9L, 16L)));
        CHECK(k.z == Scalar(5ul));
        CHECK(device_expand_hospital_pub(Scalar(3ul), h.pub, toy) == k.big_z);
    }
    SUBCASE("z*G = Z and device agreement")
    {
        SeededRng rng(8);
        for (int s : registered_strengths()) {
            const auto& c = curve_for_strength(s);
            for (int i = 0; i < 20; ++i) {
                auto h = keygen(c, rng);
                auto t = random_scalar(c, rng);
                auto k = hospital_expand(t, h, c);
                CHECK(scalar_mul_base(k.z, c) == k.big_z);
                CHECK(k.z == scalar_add(t, h.priv, c));
                CHECK(encode_point(device_expand_hospital_pub(t, h.pub, c), c) == encode_point(k.big_z, c));
            }
        }
    }
    SUBCASE("degenerate inputs")
    {
        const auto& c = curve_for_strength(112);
        SeededRng rng(9);
        auto h = keygen(c, rng);
        CHECK_ERROR(hospital_expand(scalar_neg(h.priv, c), h, c), ErrorCode::InvalidArgument);
        CHECK_ERROR(hospital_expand(Scalar(0ul), h, c), ErrorCode::InvalidArgument);
        CHECK_ERROR(hospital_expand(Scalar(mpz_class(c.order())), h, c), ErrorCode::InvalidArgument);
        CHECK_ERROR(device_expand_hospital_pub(Scalar(1ul), Point::infinity(), c), ErrorCode::OffCurveInput);
        CHECK_ERROR(device_expand_hospital_pub(Scalar(1ul), Point(mpz_class(1), mpz_class(1)), c),
                    ErrorCode::OffCurveInput);
        CHECK_ERROR(device_expand_hospital_pub(Scalar(0ul), h.pub, c), ErrorCode::InvalidArgument);
    }
    SUBCASE("negotiation redraws t when t + h = 0")
    {
        // Drive the hospital rng so the first t drawn is n - h.
        const auto& toy = toy_curve();
        KeyPair h{Scalar(4ul), scalar_mul_base(Scalar(4ul), toy)};
        auto bad_t = scalar_neg(h.priv, toy);
        CHECK_ERROR(hospital_expand(bad_t, h, toy), ErrorCode::InvalidArgument);
        CHECK(hospital_expand(scalar_add(bad_t, Scalar(1ul), toy), h, toy).z == Scalar(1ul));
    }
}

TEST_CASE("readings")
{
    Flow f;
    const auto& c = f.sys.curve();
    const auto& dir = f.sys.directory();
    auto ps = f.sys.request_pseudonyms(f.dev, 3);
    f.sys.negotiate_t(f.hosp, f.dev);
    auto& dev = f.sys.device(f.dev);
    auto& hosp = f.sys.hospital(f.hosp);

    Environment env;
    env.curve = &c;
    std::int64_t now = f.sys.now();
    env.clock = &now;

    SUBCASE("roundtrip through the bus")
    {
        CHECK(f.sys.send_reading(f.dev, f.hosp, sample_reading, 0) == sample_reading);
        CHECK(f.sys.send_reading(f.dev, f.hosp, sample_reading, 2) == sample_reading);
        CHECK(hosp.readings().size() == 2);
    }
    SUBCASE("message carries the pseudonym, never the enrollment identity")
    {
        auto envl = dev.reading(sample_reading, 0, f.hosp);
        auto a_enc = encode_point(dev.caterpillar().sign_pair.pub, c);
        CHECK_FALSE(contains(envl.payload, a_enc));
        CHECK_FALSE(contains(envl.payload, pki::encode(dev.enrollment_chain().front())));
        auto msg = proto::decode_reading(envl.payload, c);
        CHECK(msg.pseudonym_cert == ps[0].cert);
    }
    SUBCASE("distinct pseudonyms sign distinct readings")
    {
        auto m0 = proto::decode_reading(dev.reading(sample_reading, 0, f.hosp).payload, c);
        auto m1 = proto::decode_reading(dev.reading(sample_reading, 1, f.hosp).payload, c);
        CHECK_FALSE(m0.pseudonym_cert.subject_pub == m1.pseudonym_cert.subject_pub);
    }
    SUBCASE("hospital_receive rejections")
    {
        auto key = *hosp.expanded_key(f.dev);
        auto msg = proto::decode_reading(dev.reading(sample_reading, 0, f.hosp).payload, c);
        CHECK(hospital_receive(msg, key.z, dir.pca, dir.rca, env) == sample_reading);

        // z from a different t.
        auto other = hospital_expand(scalar_add(*hosp.expansion_value(f.dev), Scalar(1ul), c), hosp.keys(), c);
        CHECK(code_of([&] { hospital_receive(msg, other.z, dir.pca, dir.rca, env); }) == ErrorCode::MacMismatch);

        // Unchained certificate: self-issued by an impostor PCA.
        SeededRng rng(11);
        auto rogue = bke::gen_caterpillar(c, rng).sign_pair;
        auto unchained = msg;
        auto rogue_root = pki::issue_root(rogue.priv, {'x'}, {0, now + 10}, c, rng);
        unchained.pseudonym_cert = rogue_root;
        CHECK(code_of([&] { hospital_receive(unchained, key.z, dir.pca, dir.rca, env); }) == ErrorCode::BadChain);
    }
    SUBCASE("every single-field tampering is rejected by exactly one check")
    {
        auto key = *hosp.expanded_key(f.dev);
        auto msg = proto::decode_reading(dev.reading(sample_reading, 0, f.hosp).payload, c);
        std::vector<std::pair<std::string, std::function<void(ReadingMessage&)>>> tampers{
            {"cert serial", [](ReadingMessage& m) { m.pseudonym_cert.serial[0] ^= 1; }},
            {"cert subject id", [](ReadingMessage& m) { m.pseudonym_cert.subject_id[0] ^= 1; }},
            {"cert subject pub", [&](ReadingMessage& m) { m.pseudonym_cert.subject_pub = ps[1].cert.subject_pub; }},
            {"cert issuer", [](ReadingMessage& m) { m.pseudonym_cert.issuer_serial[3] ^= 1; }},
            {"cert validity", [](ReadingMessage& m) { m.pseudonym_cert.validity.not_after += 1; }},
            {"cert signature", [&](ReadingMessage& m) {
                 m.pseudonym_cert.signature.s = scalar_add(m.pseudonym_cert.signature.s, Scalar(1ul), c);
             }},
            {"whole cert", [&](ReadingMessage& m) { m.pseudonym_cert = ps[1].cert; }},
            {"ciphertext", [](ReadingMessage& m) { m.sealed.ciphertext[2] ^= 0x10; }},
            {"tag", [](ReadingMessage& m) { m.sealed.tag[31] ^= 0x01; }},
            {"signature r", [&](ReadingMessage& m) { m.signature.r = scalar_add(m.signature.r, Scalar(1ul), c); }},
            {"signature s", [&](ReadingMessage& m) { m.signature.s = scalar_add(m.signature.s, Scalar(1ul), c); }},
        };
        for (const auto& [name, tamper] : tampers) {
            CAPTURE(name);
            auto bad = msg;
            tamper(bad);
            std::vector<std::pair<Checkpoint, bool>> seen;
            env.observer = [&](Checkpoint cp, bool ok) { seen.emplace_back(cp, ok); };
            auto code = code_of([&] { hospital_receive(bad, key.z, dir.pca, dir.rca, env); });
            CHECK((code == ErrorCode::BadChain || code == ErrorCode::BadSignature || code == ErrorCode::MacMismatch));
            int failures = 0;
            for (const auto& s : seen)
                failures += !s.second;
            CHECK(failures == 1);
        }
    }
}

TEST_CASE("distinct t gives distinct encryption targets")
{
    Flow f;
    auto dev2 = f.sys.add_device("device-0002");
    f.sys.enroll(dev2);
    auto t1 = f.sys.negotiate_t(f.hosp, f.dev);
    auto t2 = f.sys.negotiate_t(f.hosp, dev2);
    REQUIRE_FALSE(t1 == t2);
    auto z1 = *f.sys.device(f.dev).hospital_target(f.hosp);
    auto z2 = *f.sys.device(dev2).hospital_target(f.hosp);
    CHECK_FALSE(z1 == z2);
    CHECK(z1 == f.sys.hospital(f.hosp).expanded_key(f.dev)->big_z);
    CHECK(z2 == f.sys.hospital(f.hosp).expanded_key(dev2)->big_z);

    f.sys.request_pseudonyms(dev2, 1);
    CHECK(f.sys.send_reading(dev2, f.hosp, sample_reading) == sample_reading);
    CHECK(f.sys.hospital(f.hosp).readings().back().first == dev2);
}

TEST_CASE("transcripts and envelopes")
{
    auto run = [](std::uint64_t seed) {
        Flow f(80, seed);
        f.sys.request_pseudonyms(f.dev, 2);
        f.sys.negotiate_t(f.hosp, f.dev);
        f.sys.send_reading(f.dev, f.hosp, sample_reading);
        std::string dump;
        for (const auto& addr : f.sys.bus().observers())
            dump += proto::dump_transcript(addr, f.sys.bus().transcript(addr));
        return dump;
    };
    auto d1 = run(3);
    CHECK(d1 == run(3));
    CHECK(d1 != run(4));
    CHECK(d1.find("ra 5 pseudonym_request ") != std::string::npos);

    Flow f(80, 3);
    f.sys.request_pseudonyms(f.dev, 1);
    for (const auto& addr : f.sys.bus().observers()) {
        const auto& log = f.sys.bus().transcript(addr);
        for (std::size_t i = 1; i < log.size(); ++i)
            CHECK(log[i - 1].seq < log[i].seq);
        for (const auto& env : log) {
            CHECK((env.from == addr || env.to == addr));
            CHECK(proto::decode_envelope(proto::encode_envelope(env)) == env);
        }
    }

    SUBCASE("envelope decoding rejects garbage")
    {
        const auto& env = f.sys.bus().transcript(f.dev).front();
        auto enc = proto::encode_envelope(env);
        auto bad = enc;
        bad[0] = 9;
        CHECK_ERROR(proto::decode_envelope(bad), ErrorCode::MalformedEncoding);
        bad = enc;
        bad[11] = 0;
        CHECK_ERROR(proto::decode_envelope(bad), ErrorCode::MalformedEncoding);
        enc.pop_back();
        CHECK_ERROR(proto::decode_envelope(enc), ErrorCode::MalformedEncoding);
    }
    SUBCASE("messages to the wrong role are protocol violations")
    {
        auto env = f.sys.device(f.dev).enroll_request();
        env.to = {proto::Role::Pca, 0};
        f.sys.bus().post(env);
        CHECK(code_of([&] { f.sys.bus().run(); }) == ErrorCode::ProtocolViolation);
    }
}
