#include <pcert/error.hpp>
#include <pcert/report.hpp>

#include <charconv>
#include <cstdio>
#include <sstream>

namespace pcert::harness {

namespace {

constexpr std::string_view csv_header = "strength,experiment,batch_size,samples,mean_us,sd_us,keys_per_second";

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string shortest(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, end};
}

std::string column_title(int experiment, int batch)
{
    std::string t = "exp" + std::to_string(experiment) + " " +
                    std::string(experiment_label(experiment).substr(0, experiment_label(experiment).find(' ')));
    t += " (batch " + std::to_string(experiment >= 3 ? batch : 1) + ")";
    return t;
}

using Grid = std::vector<std::vector<std::string>>;

std::string render(const Grid& grid)
{
    std::vector<std::size_t> width;
    for (const auto& row : grid)
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (width.size() <= c)
                width.push_back(0);
            width[c] = std::max(width[c], row[c].size());
        }
    std::string out;
    for (const auto& row : grid) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            line += row[c];
            if (c + 1 < row.size())
                line += std::string(width[c] - row[c].size() + 2, ' ');
        }
        out += line + '\n';
    }
    return out;
}

template <typename T> T parse_number(std::string_view field)
{
    T v{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        fail(ErrorCode::MalformedEncoding, "bad csv field '" + std::string(field) + "'");
    return v;
}

std::string table(const BenchReport& report)
{
    const auto& cfg = report.config;
    std::ostringstream os;
    os << "# butterfly key expansion benchmark\n"
       << "# host cpu: " << report.host_cpu << '\n'
       << "# build profile: " << report.build_profile << '\n'
       << "# iterations: " << cfg.iterations << ", batch size: " << cfg.batch_size << ", warm-up: " << cfg.warmup
       << '\n'
       << "# cells: mean (sd) microseconds per key\n";

    Grid head{{"strength"}};
    for (int e : cfg.experiments)
        head[0].push_back(column_title(e, cfg.batch_size));

    Grid times = head;
    Grid rates = head;
    for (int s : cfg.strengths) {
        std::vector<std::string> t{std::to_string(s)}, r{std::to_string(s)};
        for (int e : cfg.experiments) {
            const auto* cell = report.find(s, e);
            t.push_back(cell ? fixed(cell->mean_us, 3) + " (" + fixed(cell->sd_us, 3) + ")" : "-");
            r.push_back(cell ? fixed(cell->keys_per_second(), 1) : "-");
        }
        times.push_back(std::move(t));
        rates.push_back(std::move(r));
    }
    os << render(times) << "\nkeys/second\n" << render(rates);
    return os.str();
}

std::string csv(const BenchReport& report)
{
    std::string out(csv_header);
    out += '\n';
    for (const auto& c : report.cells) {
        out += std::to_string(c.strength) + ',' + std::to_string(c.experiment) + ',' + std::to_string(c.batch_size) +
               ',' + std::to_string(c.samples) + ',' + shortest(c.mean_us) + ',' + shortest(c.sd_us) + ',' +
               shortest(c.keys_per_second()) + '\n';
    }
    return out;
}

} // namespace

std::string emit_report(const BenchReport& report, ReportFormat format)
{
    return format == ReportFormat::Csv ? csv(report) : table(report);
}

std::vector<BenchCell> parse_csv(std::string_view text)
{
    std::vector<BenchCell> cells;
    bool header = true;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty())
            continue;
        if (header) {
            if (line != csv_header)
                fail(ErrorCode::MalformedEncoding, "unexpected csv header");
            header = false;
            continue;
        }
        std::vector<std::string_view> f;
        std::size_t pos = 0;
        for (;;) {
            auto comma = line.find(',', pos);
            f.push_back(line.substr(pos, comma - pos));
            if (comma == std::string_view::npos)
                break;
            pos = comma + 1;
        }
        if (f.size() != 7)
            fail(ErrorCode::MalformedEncoding, "csv row has " + std::to_string(f.size()) + " fields");
        BenchCell c;
        c.strength = parse_number<int>(f[0]);
        c.experiment = parse_number<int>(f[1]);
        c.batch_size = parse_number<int>(f[2]);
        c.samples = parse_number<std::size_t>(f[3]);
        c.mean_us = parse_number<double>(f[4]);
        c.sd_us = parse_number<double>(f[5]);
        cells.push_back(c);
    }
    if (header)
        fail(ErrorCode::MalformedEncoding, "missing csv header");
    return cells;
}

} // namespace pcert::harness
