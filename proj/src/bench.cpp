#include <pcert/bench.hpp>
#include <pcert/bke.hpp>
#include <pcert/error.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#ifndef PCERT_BUILD_PROFILE
#define PCERT_BUILD_PROFILE "unknown"
#endif

namespace pcert::harness {

using namespace pcert::ec;
using Clock = std::chrono::steady_clock;

namespace {

double elapsed_us(Clock::time_point start, Clock::time_point stop)
{
    return std::chrono::duration<double, std::micro>(stop - start).count();
}

struct Setup {
    const CurveParams& curve;
    SeededRng rng;
    bke::CaterpillarMaterial material;
    KeyPair pca;
    std::vector<bke::CocoonPublic> pool;
    std::uint32_t next_index = 0;

    Setup(int strength, std::uint64_t seed, int pool_size)
        : curve(curve_for_strength(strength)), rng(seed, "pcert/bench/" + std::to_string(strength)),
          material(bke::gen_caterpillar(curve, rng)), pca(keygen(curve, rng))
    {
        for (int i = 0; i < pool_size; ++i)
            pool.push_back(bke::cocoon_public(material.public_share(), static_cast<std::uint32_t>(i), curve));
    }
};

/// One timed sample in microseconds per key.
double sample(Setup& s, int experiment, int batch)
{
    auto share = s.material.public_share();
    Clock::time_point start, stop;
    switch (experiment) {
    case 1:
    case 3: {
        int n = experiment == 1 ? 1 : batch;
        start = Clock::now();
        for (int k = 0; k < n; ++k)
            bke::cocoon_public(share, s.next_index++, s.curve);
        stop = Clock::now();
        return elapsed_us(start, stop) / n;
    }
    case 2:
    case 4: {
        int n = experiment == 2 ? 1 : batch;
        start = Clock::now();
        for (int k = 0; k < n; ++k)
            bke::butterfly_public(s.pool[s.next_index++ % s.pool.size()], s.pca, s.curve, s.rng);
        stop = Clock::now();
        return elapsed_us(start, stop) / n;
    }
    default:
        fail(ErrorCode::InvalidArgument, "unknown experiment " + std::to_string(experiment));
    }
}

} // namespace

void validate(const BenchConfig& config)
{
    if (config.iterations < 1)
        fail(ErrorCode::InvalidArgument, "iterations must be >= 1");
    if (config.batch_size < 1)
        fail(ErrorCode::InvalidArgument, "batch size must be >= 1");
    if (config.warmup < 0)
        fail(ErrorCode::InvalidArgument, "warm-up count must be >= 0");
    for (int s : config.strengths)
        curve_for_strength(s);
    for (int e : config.experiments)
        if (e < 1 || e > 4)
            fail(ErrorCode::InvalidArgument, "unknown experiment " + std::to_string(e));
}

const BenchCell* BenchReport::find(int strength, int experiment) const
{
    for (const auto& c : cells)
        if (c.strength == strength && c.experiment == experiment)
            return &c;
    return nullptr;
}

std::string_view experiment_label(int experiment)
{
    switch (experiment) {
    case 1:
        return "cocoon";
    case 2:
        return "butterfly";
    case 3:
        return "cocoon xB";
    case 4:
        return "butterfly xB";
    }
    return "unknown";
}

std::pair<double, double> mean_sd(const std::vector<double>& samples)
{
    if (samples.empty())
        return {0, 0};
    double sum = 0;
    for (double x : samples)
        sum += x;
    double mean = sum / static_cast<double>(samples.size());
    if (samples.size() == 1)
        return {mean, 0};
    double ss = 0;
    for (double x : samples)
        ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(samples.size() - 1))};
}

BenchReport bench(const BenchConfig& config, const BenchProgress& progress)
{
    validate(config);
    BenchReport report;
    report.host_cpu = host_cpu();
    report.build_profile = build_profile();
    report.config = config;

    for (int strength : config.strengths) {
        Setup setup(strength, config.seed, std::max(config.batch_size, 1));
        for (int experiment : config.experiments) {
            int batch = experiment >= 3 ? config.batch_size : 1;
            for (int i = 0; i < config.warmup; ++i)
                sample(setup, experiment, batch);
            std::vector<double> samples;
            samples.reserve(static_cast<std::size_t>(config.iterations));
            for (int i = 0; i < config.iterations; ++i)
                samples.push_back(sample(setup, experiment, batch));
            auto [mean, sd] = mean_sd(samples);
            BenchCell cell{strength, experiment, batch, mean, sd, samples.size()};
            report.cells.push_back(cell);
            if (progress)
                progress(cell);
        }
    }
    return report;
}

std::string host_cpu()
{
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("model name", 0) == 0) {
            auto colon = line.find(':');
            if (colon != std::string::npos) {
                auto v = line.substr(colon + 1);
                v.erase(0, v.find_first_not_of(' '));
                return v;
            }
        }
    }
    return "unknown";
}

std::string build_profile()
{
    std::string p = PCERT_BUILD_PROFILE;
    return p.empty() ? "unspecified" : p;
}

} // namespace pcert::harness
