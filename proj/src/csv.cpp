#include "railsim/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "railsim/error.hpp"

namespace railsim {

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_timeseries_csv(std::ostream& out, const TimeSeries& s) {
    out << kTimeSeriesHeader << '\n';
    std::string line;
    for (std::size_t r = 0; r < s.size(); ++r) {
        line.clear();
        line += format_double(s.times[r]);
        for (double v : s.states[r].values) {
            line += ',';
            line += format_double(v);
        }
        for (double v : s.forcings[r].eta) {
            line += ',';
            line += format_double(v);
        }
        line += '\n';
        out << line;
    }
}

void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& series) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
    write_timeseries_csv(out, series);
    if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

TimeSeries read_timeseries_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kTimeSeriesHeader) {
        throw Error(ErrorCode::kIo, path.string() + ": unexpected CSV header");
    }
    TimeSeries s;
    constexpr std::size_t kColumns = 1 + kStateSize + kWheelCount;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        std::array<double, kColumns> vals{};
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (std::size_t c = 0; c < kColumns; ++c) {
            const auto res = std::from_chars(p, end, vals[c]);
            if (res.ec != std::errc{}) {
                throw Error(ErrorCode::kIo, path.string() + ": bad number in row " + std::to_string(row));
            }
            p = res.ptr;
            if (c + 1 < kColumns) {
                if (p == end || *p != ',') throw Error(ErrorCode::kIo, path.string() + ": short row " + std::to_string(row));
                ++p;
            }
        }
        StateVector x;
        ForcingSample u;
        for (std::size_t i = 0; i < kStateSize; ++i) x[i] = vals[1 + i];
        for (std::size_t w = 0; w < kWheelCount; ++w) u.eta[w] = vals[1 + kStateSize + w];
        s.push(vals[0], x, u);
    }
    return s;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace railsim
