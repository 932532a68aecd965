// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.
//
//   acceptance [--cli PATH] [--bench-iterations N] [--only N]

#include "oracles.hpp"

#include <pcert/error.hpp>
#include <pcert/report.hpp>
#include <pcert/scenario.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace pcert;
using namespace pcert::ec;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            if (failures.size() < 10)
                failures.push_back(what);
        }
    }
};

std::string point_str(const Point& p)
{
    return p.is_infinity() ? "inf" : "(" + p.x().get_str() + "," + p.y().get_str() + ")";
}

oracle::ToyPoint to_toy(const Point& p)
{
    if (p.is_infinity())
        return std::nullopt;
    return std::make_pair(p.x().get_si(), p.y().get_si());
}

Point from_toy(const oracle::ToyPoint& p)
{
    return p ? Point(mpz_class(p->first), mpz_class(p->second)) : Point::infinity();
}

// 1 ------------------------------------------------------------------------

Outcome toy_exhaustive(double& seconds_out)
{
    Outcome out;
    auto start = std::chrono::steady_clock::now();
    const auto& toy = toy_curve();
    const auto g = oracle::toy_generator();
    const long n = oracle::toy_n;

    std::size_t mul_checks = 0;
    for (const auto& p : oracle::toy_enumerate()) {
        for (long k = 0; k < n; ++k) {
            auto got = scalar_mul(mpz_class(k), from_toy(p), toy);
            auto want = oracle::toy_repeated(k, p);
            out.require(to_toy(got) == want, "scalar_mul k=" + std::to_string(k) + " P=" + point_str(from_toy(p)));
            ++mul_checks;
        }
    }
    for (long k = 0; k < n; ++k) {
        out.require(to_toy(scalar_mul_base(Scalar(static_cast<unsigned long>(k)), toy)) ==
                        oracle::toy_repeated(k, g),
                    "scalar_mul_base k=" + std::to_string(k));
        ++mul_checks;
    }

    // ECDSA: every (priv, k, e) with nonzero r and s. Oracle values come from
    // the repeated-addition group law; the identity u + v*priv = k mod n is
    // checked on the library's signature.
    std::size_t signatures = 0, skipped = 0;
    for (long priv = 1; priv < n; ++priv) {
        auto q = oracle::toy_repeated(priv, g);
        for (long k = 1; k < n; ++k) {
            auto kg = oracle::toy_repeated(k, g);
            long r = oracle::mod(kg->first, n);
            for (long e = 0; e < n; ++e) {
                long s = oracle::mod(oracle::inverse(k, n) * (e + r * priv), n);
                auto sig = crypto::sign_digest(Scalar(static_cast<unsigned long>(priv)),
                                               Scalar(static_cast<unsigned long>(e)),
                                               Scalar(static_cast<unsigned long>(k)), toy);
                std::string at = "priv=" + std::to_string(priv) + " k=" + std::to_string(k) + " e=" + std::to_string(e);
                if (r == 0 || s == 0) {
                    out.require(!sig.has_value(), "degenerate signature returned at " + at);
                    ++skipped;
                    continue;
                }
                if (!sig) {
                    out.require(false, "no signature at " + at);
                    continue;
                }
                out.require(sig->r.value() == r && sig->s.value() == s, "signature differs from oracle at " + at);
                long w = oracle::inverse(s, n);
                long u = oracle::mod(e * w, n);
                long v = oracle::mod(r * w, n);
                out.require(oracle::mod(u + v * priv, n) == k, "u + v*priv != k at " + at);
                auto big_r = oracle::toy_add(oracle::toy_repeated(u, g), oracle::toy_repeated(v, q));
                out.require(big_r && oracle::mod(big_r->first, n) == r, "uG + vQ x-coordinate != r at " + at);
                out.require(crypto::verify_digest(from_toy(q), Scalar(static_cast<unsigned long>(e)), *sig, toy),
                            "verify_digest rejected at " + at);
                // s + 1 = -s mod n is the one perturbation that stays valid:
                // it yields -kG, which shares kG's x-coordinate.
                auto bad = *sig;
                bad.s = scalar_add(bad.s, Scalar(1ul), toy);
                out.require(!crypto::verify_digest(from_toy(q), Scalar(static_cast<unsigned long>(e)), bad, toy) ||
                                oracle::mod(2 * s + 1, n) == 0,
                            "verify_digest accepted s+1 at " + at);
                ++signatures;
            }
        }
    }
    seconds_out = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(seconds_out < 1.0, "runtime " + std::to_string(seconds_out) + " s >= 1 s");
    out.detail = std::to_string(mul_checks) + " scalar products, " + std::to_string(signatures) +
                 " signatures checked, " + std::to_string(skipped) + " degenerate (r or s = 0) excluded";
    return out;
}

// 2 ------------------------------------------------------------------------

Outcome bke_pipeline()
{
    Outcome out;
    std::size_t pairs = 0;
    SeededRng pick(2, "acceptance/bke-indices");
    for (int strength : registered_strengths()) {
        const auto& curve = curve_for_strength(strength);
        entity::System sys(curve, {static_cast<std::uint64_t>(strength), 1'700'000'000, {}});
        const auto& dir = sys.directory();
        for (int d = 0; d < 10; ++d) {
            auto dev = sys.add_device("device-" + std::to_string(d));
            sys.enroll(dev);
            std::set<std::uint32_t> used;
            while (used.size() < 10) {
                Bytes b = pick.bytes(4);
                std::uint32_t index = (std::uint32_t(b[0]) << 24 | std::uint32_t(b[1]) << 16 |
                                       std::uint32_t(b[2]) << 8 | b[3]) & 0x7fffffff;
                if (!used.insert(index).second)
                    continue;
                std::string at = curve.name() + " device " + std::to_string(d) + " index " + std::to_string(index);
                try {
                    sys.device(dev).set_next_index(index);
                    auto ps = sys.request_pseudonyms(dev, 1);
                    out.require(ps.size() == 1, "no pseudonym at " + at);
                    if (ps.size() != 1)
                        continue;
                    const auto& p = ps[0];
                    out.require(scalar_mul_base(p.priv, curve) == p.cert.subject_pub,
                                "butterfly_private*G != butterfly_pub at " + at);
                    out.require(pki::verify_chain(std::vector{p.cert, dir.pca, dir.rca}, dir.rca, sys.now())
                                    .accepted(),
                                "pseudonym chain rejected at " + at);
                    ++pairs;
                } catch (const Error& e) {
                    out.require(false, std::string(e.what()) + " at " + at);
                }
            }
        }
    }
    out.require(pairs == 100 * registered_strengths().size(), "pair count " + std::to_string(pairs));
    out.detail = std::to_string(pairs) + " (device, index) pairs across " +
                 std::to_string(registered_strengths().size()) + " curves, 0 tolerated failures";
    return out;
}

// 3 ------------------------------------------------------------------------

bool rejected(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error&) {
        return true;
    }
    return false;
}

Outcome ecdh_ecies()
{
    Outcome out;
    SeededRng rng(3, "acceptance/ecies");
    std::size_t agreements = 0, roundtrips = 0, flips = 0, rejections = 0;
    std::size_t max_len = 0;
    for (int strength : registered_strengths()) {
        const auto& curve = curve_for_strength(strength);
        for (int i = 0; i < 100; ++i) {
            auto c = keygen(curve, rng);
            auto q = keygen(curve, rng);
            out.require(crypto::ecdh_shared(c.priv, q.pub, curve) == crypto::ecdh_shared(q.priv, c.pub, curve),
                        curve.name() + ": cQ != qC");
            ++agreements;
        }

        auto sender = keygen(curve, rng);
        auto recipient = keygen(curve, rng);
        std::vector<std::size_t> lengths{0, 1, 15, 16, 17, 255, 4096, 65536};
        for (int i = 0; i < 8; ++i) {
            auto b = rng.bytes(3);
            lengths.push_back(((std::size_t(b[0]) << 16 | std::size_t(b[1]) << 8 | b[2]) % 65536) + 1);
        }
        for (auto len : lengths) {
            auto pt = rng.bytes(len);
            auto sealed = crypto::ecies_encrypt(sender.priv, recipient.pub, pt, curve);
            auto wire = crypto::decode_sealed(crypto::encode_sealed(sealed));
            out.require(crypto::ecies_decrypt(recipient.priv, sender.pub, wire, curve) == pt,
                        curve.name() + ": roundtrip failed at length " + std::to_string(len));
            ++roundtrips;
            max_len = std::max(max_len, len);
        }

        // Single-bit flips: every ciphertext bit of a 256-byte message, every
        // tag bit, every bit of the encoded sender public key; plus 64 random
        // ciphertext bits of a 64 KiB message.
        auto check_flip = [&](const crypto::SealedMessage& sealed, const Bytes& sender_enc, const std::string& what) {
            ++flips;
            bool ok = rejected([&] {
                auto pub = decode_point(sender_enc, curve);
                crypto::ecies_decrypt(recipient.priv, pub, sealed, curve);
            });
            rejections += ok;
            out.require(ok, curve.name() + ": accepted " + what);
        };
        auto sender_enc = encode_point(sender.pub, curve);
        auto pt = rng.bytes(256);
        auto sealed = crypto::ecies_encrypt(sender.priv, recipient.pub, pt, curve);
        for (std::size_t bit = 0; bit < sealed.ciphertext.size() * 8; ++bit) {
            auto bad = sealed;
            bad.ciphertext[bit / 8] ^= std::uint8_t(1u << (bit % 8));
            check_flip(bad, sender_enc, "ciphertext flip " + std::to_string(bit));
        }
        for (std::size_t bit = 0; bit < sealed.tag.size() * 8; ++bit) {
            auto bad = sealed;
            bad.tag[bit / 8] ^= std::uint8_t(1u << (bit % 8));
            check_flip(bad, sender_enc, "tag flip " + std::to_string(bit));
        }
        for (std::size_t bit = 0; bit < sender_enc.size() * 8; ++bit) {
            auto bad = sender_enc;
            bad[bit / 8] ^= std::uint8_t(1u << (bit % 8));
            check_flip(sealed, bad, "sender pub flip " + std::to_string(bit));
        }
        auto big = rng.bytes(65536);
        auto big_sealed = crypto::ecies_encrypt(sender.priv, recipient.pub, big, curve);
        for (int i = 0; i < 64; ++i) {
            auto b = rng.bytes(3);
            std::size_t bit = (std::size_t(b[0]) << 16 | std::size_t(b[1]) << 8 | b[2]) % (65536 * 8);
            auto bad = big_sealed;
            bad.ciphertext[bit / 8] ^= std::uint8_t(1u << (bit % 8));
            check_flip(bad, sender_enc, "64 KiB ciphertext flip " + std::to_string(bit));
        }
    }
    out.detail = std::to_string(agreements) + " ECDH pairs agree, " + std::to_string(roundtrips) +
                 " ECIES roundtrips (max " + std::to_string(max_len) + " bytes), " + std::to_string(rejections) +
                 "/" + std::to_string(flips) + " single-bit tampers rejected";
    return out;
}

// 4 ------------------------------------------------------------------------

Outcome hospital_expansion()
{
    Outcome out;
    SeededRng rng(4, "acceptance/expansion");
    std::size_t checked = 0;
    for (int strength : registered_strengths()) {
        const auto& curve = curve_for_strength(strength);
        for (int i = 0; i < 1000; ++i) {
            auto h = keygen(curve, rng);
            auto t = random_scalar(curve, rng);
            if (scalar_add(t, h.priv, curve).is_zero())
                continue;
            auto key = entity::hospital_expand(t, h, curve);
            auto zg = scalar_mul_base(key.z, curve);
            // Z recomputed independently as t*G + H via the generic ladder.
            auto tg_h = point_add(scalar_mul(t.value(), curve.generator(), curve), h.pub, curve);
            out.require(zg == key.big_z && tg_h == key.big_z, curve.name() + ": z*G != Z");
            out.require(key.z.value() == (t.value() + h.priv.value()) % curve.order(),
                        curve.name() + ": z != t + h mod n");
            auto device_z = entity::device_expand_hospital_pub(t, h.pub, curve);
            out.require(encode_point(device_z, curve) == encode_point(key.big_z, curve),
                        curve.name() + ": device Z differs from hospital Z");
            ++checked;
        }
    }
    out.require(checked == 1000 * registered_strengths().size(), "sample count " + std::to_string(checked));
    out.detail = std::to_string(checked) + " (t, h) samples; z*G = Z and device/hospital Z byte-identical";
    return out;
}

// 5 ------------------------------------------------------------------------

Outcome privacy_suite()
{
    Outcome out;
    std::size_t runs = 0, scanned_secrets = 0;
    auto strengths = registered_strengths();
    for (int i = 0; i < 20; ++i) {
        harness::ScenarioConfig cfg;
        cfg.strength = strengths[static_cast<std::size_t>(i) % strengths.size()];
        cfg.seed = 1000 + static_cast<std::uint64_t>(i);
        auto r = harness::run_scenario(cfg);
        std::string at = "run " + std::to_string(i) + " (strength " + std::to_string(cfg.strength) + ")";
        out.require(r.ok, at + " did not complete: " + r.message);
        const auto& a = r.audit;
        out.require(a.randomisers.size() == cfg.pseudonym_count && !a.sign_pub.empty() && a.ck.size() == 16,
                    at + ": audit material missing");
        scanned_secrets += 2 * a.randomisers.size() + 6;
        for (const auto& f : harness::scan_privacy(r))
            out.require(false, at + ": " + f.observer + " contains " + f.item);
        // The scan is live: the RA legitimately sees A.
        auto ra = proto::transcript_bytes(r.transcripts.at({proto::Role::Ra, 0}));
        out.require(contains(ra, a.sign_pub), at + ": control scan failed to find A in the RA transcript");
        ++runs;
    }
    out.detail = std::to_string(runs) + " scenario runs, " + std::to_string(scanned_secrets) +
                 " secret encodings scanned, 0 occurrences in RA/PCA transcripts or readings";
    return out;
}

// 6 ------------------------------------------------------------------------

Outcome benchmark(int iterations, std::string& table)
{
    Outcome out;
    harness::BenchConfig cfg;
    cfg.iterations = iterations;
    auto report = harness::bench(cfg);
    table = harness::emit_report(report, harness::ReportFormat::Table);

    out.require(report.cells.size() == 20, "expected 5x4 cells, got " + std::to_string(report.cells.size()));
    for (const auto& c : report.cells) {
        std::string at = std::to_string(c.strength) + "/exp" + std::to_string(c.experiment);
        out.require(std::isfinite(c.mean_us) && c.mean_us > 0, at + ": mean not finite and positive");
        out.require(std::isfinite(c.sd_us) && c.sd_us >= 0, at + ": sd not finite and non-negative");
        out.require(c.samples == static_cast<std::size_t>(iterations), at + ": sample count");
    }
    std::size_t rows = 0;
    std::istringstream in(table);
    std::string line;
    bool in_times = false;
    while (std::getline(in, line)) {
        if (line.rfind("strength", 0) == 0) {
            in_times = rows == 0;
            continue;
        }
        if (line.empty())
            in_times = false;
        if (in_times && !line.empty() && line.find('(') != std::string::npos)
            ++rows;
    }
    out.require(rows == 5, "table has " + std::to_string(rows) + " data rows");

    const auto* cell = report.find(256, 2);
    double kps = cell ? cell->keys_per_second() : 0;
    out.require(kps >= 1.0, "strength 256 experiment 2 below 1 key/s");
    const auto* lo = report.find(80, 1);
    const auto* hi = report.find(256, 1);
    out.require(lo && hi && hi->mean_us >= lo->mean_us, "experiment 1 cost at 256 below cost at 80");
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "iterations=%d, 5x4 table; 256/exp2 %.3f us per key = %.1f keys/s (floor 1/s, reference 18/s)",
                  iterations, cell ? cell->mean_us : 0.0, kps);
    out.detail = buf;
    return out;
}

// 7 ------------------------------------------------------------------------

struct CliRun {
    int status = -1;
    std::string err;
};

CliRun run_cli(const std::string& cli, const std::string& args)
{
    CliRun r;
    std::string cmd = "'" + cli + "' " + args + " 2>&1 >/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p)
        return r;
    char buf[512];
    while (std::fgets(buf, sizeof buf, p))
        r.err += buf;
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

Outcome tamper_matrix(const std::string& cli)
{
    Outcome out;
    int cells = 0, good = 0;
    for (auto t : harness::all_tamper_points) {
        harness::ScenarioConfig cfg;
        cfg.strength = 128;
        cfg.seed = 7;
        cfg.tamper = t;
        auto r = harness::run_scenario(cfg);
        auto target = harness::expected_checkpoint(t);
        std::string name(harness::to_string(t));
        out.require(!r.ok, name + ": scenario succeeded");
        out.require(r.failed_check == target, name + ": failed check is not " +
                                                  std::string(entity::to_string(target)));
        bool before = true;
        for (auto cp : entity::all_checkpoints) {
            harness::Verdict want = cp == target ? harness::Verdict::Failed
                                                 : (before ? harness::Verdict::Passed : harness::Verdict::NotReached);
            if (cp == target)
                before = false;
            bool ok = r.checkpoints.at(cp) == want;
            ++cells;
            good += ok;
            out.require(ok, name + " x " + std::string(entity::to_string(cp)) + ": " +
                                std::string(harness::to_string(r.checkpoints.at(cp))) + ", expected " +
                                std::string(harness::to_string(want)));
        }
        if (!cli.empty()) {
            auto run = run_cli(cli, "scenario --strength 128 --seed 7 --tamper " + name);
            out.require(run.status == 1, name + ": CLI exit status " + std::to_string(run.status));
            out.require(run.err.find(entity::to_string(target)) != std::string::npos,
                        name + ": CLI output does not name " + std::string(entity::to_string(target)));
        }
    }
    if (!cli.empty()) {
        auto clean = run_cli(cli, "scenario --strength 128 --seed 7");
        out.require(clean.status == 0, "untampered CLI run exit status " + std::to_string(clean.status));
    }
    out.detail = std::to_string(good) + "/" + std::to_string(cells) + " cells as specified" +
                 (cli.empty() ? " (CLI not checked)" : ", CLI exit codes and failing check names verified");
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    std::string cli;
    int bench_iterations = 1000;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc)
            cli = argv[++i];
        else if (a == "--bench-iterations" && i + 1 < argc)
            bench_iterations = std::stoi(argv[++i]);
        else if (a == "--only" && i + 1 < argc)
            only = std::stoi(argv[++i]);
        else {
            std::cerr << "usage: acceptance [--cli PATH] [--bench-iterations N] [--only N]\n";
            return 2;
        }
    }

    int failures = 0;
    std::string table;
    auto run = [&](int n, const char* title, const std::function<Outcome()>& fn) {
        if (only && only != n)
            return;
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.require(false, std::string("unexpected exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", n, title, o.detail.c_str(), secs);
        for (const auto& f : o.failures)
            std::printf("       %s\n", f.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    };

    double toy_secs = 0;
    run(1, "toy-curve exhaustive oracle", [&] { return toy_exhaustive(toy_secs); });
    run(2, "butterfly key expansion end to end", bke_pipeline);
    run(3, "ECDH symmetry and ECIES integrity", ecdh_ecies);
    run(4, "hospital expansion identity", hospital_expansion);
    run(5, "privacy transcript suite", privacy_suite);
    run(6, "benchmark reproduction", [&] { return benchmark(bench_iterations, table); });
    run(7, "fail-closed tamper matrix", [&] { return tamper_matrix(cli); });

    if (!table.empty())
        std::printf("\n%s", table.c_str());
    return failures;
}
