#pragma once

// Timing of cocoon and butterfly expansion per security strength:
//   1 cocoon_public, batch 1      2 butterfly_public, batch 1
//   3 cocoon_public, batch B      4 butterfly_public, batch B
// Batched cells report per-key time (batch elapsed / B).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pcert::harness {

struct BenchConfig {
    std::vector<int> strengths{80, 112, 128, 192, 256};
    int iterations = 1000;
    int batch_size = 20;
    std::vector<int> experiments{1, 2, 3, 4};
    std::uint64_t seed = 1;
    int warmup = 10;
};

/// Throws InvalidArgument for unknown strengths/experiments or
/// non-positive counts.
void validate(const BenchConfig& config);

struct BenchCell {
    int strength = 0;
    int experiment = 0;
    int batch_size = 1;
    double mean_us = 0;
    double sd_us = 0;
    std::size_t samples = 0;

    double keys_per_second() const { return mean_us > 0 ? 1e6 / mean_us : 0; }
};

struct BenchReport {
    std::string host_cpu;
    std::string build_profile;
    BenchConfig config;
    std::vector<BenchCell> cells;

    const BenchCell* find(int strength, int experiment) const;
};

std::string_view experiment_label(int experiment);

/// Called after each cell.
using BenchProgress = std::function<void(const BenchCell&)>;

BenchReport bench(const BenchConfig& config, const BenchProgress& progress = {});

/// Sample mean and standard deviation (n - 1); sd = 0 for a single sample.
std::pair<double, double> mean_sd(const std::vector<double>& samples);

std::string host_cpu();
std::string build_profile();

} // namespace pcert::harness
