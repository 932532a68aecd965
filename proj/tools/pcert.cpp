// pcert: scenario runner, expansion benchmark and certificate dump.

#include <pcert/error.hpp>
#include <pcert/report.hpp>
#include <pcert/scenario.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using namespace pcert;
using namespace pcert::harness;

constexpr int exit_ok = 0;
constexpr int exit_protocol = 1;
constexpr int exit_usage = 2;

int env_int(const char* name, int fallback)
{
    const char* v = std::getenv(name);
    if (!v || !*v)
        return fallback;
    try {
        return std::stoi(v);
    } catch (const std::exception&) {
        std::cerr << "ignoring non-numeric " << name << "=" << v << '\n';
        return fallback;
    }
}

std::string env_str(const char* name, std::string fallback)
{
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

Bytes read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CLI::ValidationError("cannot open " + path);
    return Bytes((std::istreambuf_iterator<char>(in)), {});
}

struct ScenarioArgs {
    int strength;
    std::uint64_t seed = 1;
    std::string out;
    std::string tamper = "none";
    std::string reading;
    std::uint32_t count = 20;
};

int run_scenario_cmd(const ScenarioArgs& args)
{
    ScenarioConfig cfg;
    cfg.strength = args.strength;
    cfg.seed = args.seed;
    cfg.pseudonym_count = args.count;
    if (!args.reading.empty())
        cfg.reading.assign(args.reading.begin(), args.reading.end());
    auto tamper = tamper_from_string(args.tamper);
    if (!tamper) {
        std::cerr << "unknown tamper point '" << args.tamper << "'\n";
        return exit_usage;
    }
    cfg.tamper = *tamper;

    auto result = run_scenario(cfg);
    if (!args.out.empty()) {
        write_scenario(result, cfg, args.out);
        std::cout << "wrote " << args.out << '\n';
    }
    std::cout << summarize(result);
    if (!result.ok) {
        std::cerr << "scenario failed at " << result.failed_step;
        if (result.failed_check)
            std::cerr << " (" << entity::to_string(*result.failed_check) << ")";
        std::cerr << ": " << result.message << '\n';
        return exit_protocol;
    }
    return exit_ok;
}

struct BenchArgs {
    std::vector<int> strengths{80, 112, 128, 192, 256};
    std::vector<int> experiments{1, 2, 3, 4};
    int iterations = 1000;
    int batch = 20;
    int warmup = 10;
    std::uint64_t seed = 1;
    std::string format = "table";
    std::string out;
    bool quiet = false;
};

int run_bench_cmd(const BenchArgs& args)
{
    BenchConfig cfg;
    cfg.strengths = args.strengths;
    cfg.experiments = args.experiments;
    cfg.iterations = args.iterations;
    cfg.batch_size = args.batch;
    cfg.warmup = args.warmup;
    cfg.seed = args.seed;
    validate(cfg);
    auto progress = [&](const BenchCell& c) {
        if (!args.quiet)
            std::cerr << "strength " << c.strength << " exp" << c.experiment << ": " << c.mean_us << " us\n";
    };
    auto report = bench(cfg, progress);
    auto text = emit_report(report, args.format == "csv" ? ReportFormat::Csv : ReportFormat::Table);
    if (args.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream(args.out, std::ios::binary) << text;
        std::cerr << "wrote " << args.out << '\n';
    }
    return exit_ok;
}

int run_cert_dump(const std::string& path)
{
    auto data = read_file(path);
    try {
        std::cout << pki::describe(pki::decode(data));
        return exit_ok;
    } catch (const Error&) {
        // Not a single certificate; try a chain.
    }
    auto chain = pki::decode_chain(data);
    for (std::size_t i = 0; i < chain.size(); ++i)
        std::cout << "[" << i << "]\n" << pki::describe(chain[i]);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pseudonymous certificates with butterfly key expansion"};
    app.require_subcommand(1);

    ScenarioArgs sargs;
    sargs.strength = env_int("PCERT_STRENGTH", 128);
    sargs.out = env_str("PCERT_OUT_DIR", "");
    auto* scenario = app.add_subcommand("scenario", "Run the full healthcare flow");
    scenario->add_option("--strength", sargs.strength, "Security strength in bits (env PCERT_STRENGTH)")
        ->check(CLI::IsMember({80, 112, 128, 192, 256}));
    scenario->add_option("--seed", sargs.seed, "Seed for every role's rng");
    scenario->add_option("--out", sargs.out, "Directory for transcripts and certificates (env PCERT_OUT_DIR)");
    scenario->add_option("--tamper", sargs.tamper,
                         "Fault to inject: none, enrollment-cert, pseudonym-cert, wrapped-c, reading-ciphertext, "
                         "reading-signature, wrong-t");
    scenario->add_option("--reading", sargs.reading, "Reading payload text");
    scenario->add_option("--count", sargs.count, "Pseudonyms per batch")->check(CLI::PositiveNumber);

    BenchArgs bargs;
    auto* benchcmd = app.add_subcommand("bench", "Time cocoon and butterfly expansion");
    benchcmd->add_option("--strengths", bargs.strengths, "Comma-separated strengths")
        ->delimiter(',')
        ->check(CLI::IsMember({80, 112, 128, 192, 256}));
    benchcmd->add_option("--experiments", bargs.experiments, "Comma-separated experiments 1-4")
        ->delimiter(',')
        ->check(CLI::Range(1, 4));
    benchcmd->add_option("--iterations", bargs.iterations, "Timed iterations per cell")->check(CLI::PositiveNumber);
    benchcmd->add_option("--batch", bargs.batch, "Batch size for experiments 3 and 4")->check(CLI::PositiveNumber);
    benchcmd->add_option("--warmup", bargs.warmup, "Untimed iterations per cell")->check(CLI::NonNegativeNumber);
    benchcmd->add_option("--seed", bargs.seed, "Seed for key material");
    benchcmd->add_option("--format", bargs.format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
    benchcmd->add_option("--out", bargs.out, "Write the report to a file");
    benchcmd->add_flag("--quiet", bargs.quiet, "No per-cell progress on stderr");

    std::string cert_path;
    auto* cert = app.add_subcommand("cert", "Certificate tools");
    cert->require_subcommand(1);
    auto* dump = cert->add_subcommand("dump", "Print a certificate or chain file");
    dump->add_option("file", cert_path, "Certificate or chain file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*scenario)
            return run_scenario_cmd(sargs);
        if (*benchcmd)
            return run_bench_cmd(bargs);
        if (*dump)
            return run_cert_dump(cert_path);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_protocol;
    }
    return exit_usage;
}
