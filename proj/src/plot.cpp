#include "railsim/plot.hpp"

#include <sstream>

#include "railsim/csv.hpp"
#include "railsim/error.hpp"

namespace railsim {

namespace {

struct Body {
    const char* label;
    const char* color;
    int displacement_column;  // 1-based gnuplot column
    int velocity_column;
};

// Column 1 is t; states follow in StateVector order.
constexpr Body kBodies[] = {
    {"carcass", "red", 6, 7},
    {"1st bogie", "blue", 2, 3},
    {"2nd bogie", "green", 4, 5},
};

}  // namespace

std::string plot_script(PlotKind kind, const std::filesystem::path& csv, const std::filesystem::path& image) {
    if (kind == PlotKind::kNone) throw Error(ErrorCode::kConfig, "plot kind 'none' has no script");
    std::ostringstream os;
    os << "# generated by railsim\n"
       << "set datafile separator ','\n"
       << "set terminal pngcairo size 1200,900\n"
       << "set output '" << image.string() << "'\n"
       << "data = '" << csv.string() << "'\n"
       << "set key outside right\n"
       << "set grid\n";
    if (kind == PlotKind::kTimeSeries) {
        os << "set multiplot layout 2,1 title 'Vertical response'\n"
           << "set xlabel 't, s'\n"
           << "set ylabel 'displacement, m'\n"
           << "plot \\\n";
        for (std::size_t i = 0; i < 3; ++i) {
            const Body& b = kBodies[i];
            os << "  data using 1:" << b.displacement_column << " skip 1 with lines lc rgb '" << b.color
               << "' title '" << b.label << "'" << (i + 1 < 3 ? ", \\\n" : "\n");
        }
        os << "set ylabel 'velocity, m/s'\n"
           << "plot \\\n";
        for (std::size_t i = 0; i < 3; ++i) {
            const Body& b = kBodies[i];
            os << "  data using 1:" << b.velocity_column << " skip 1 with lines lc rgb '" << b.color
               << "' title '" << b.label << "'" << (i + 1 < 3 ? ", \\\n" : "\n");
        }
        os << "unset multiplot\n";
    } else {
        os << "set multiplot layout 1,3 title 'Phase diagrams'\n";
        for (const Body& b : kBodies) {
            os << "set title '" << b.label << " phase diagram'\n"
               << "set xlabel 'displacement, m'\n"
               << "set ylabel 'velocity, m/s'\n"
               << "plot data using " << b.displacement_column << ":" << b.velocity_column
               << " skip 1 with lines lc rgb '" << b.color << "' title '" << b.label << "'\n";
        }
        os << "unset multiplot\n";
    }
    return os.str();
}

void emit_plot(const TimeSeries& series, PlotKind kind, const std::filesystem::path& csv,
               const std::filesystem::path& script) {
    if (series.empty()) throw Error(ErrorCode::kEmptySeries, "cannot plot an empty series");
    auto image = script;
    image.replace_extension(".png");
    write_text_file(script, plot_script(kind, csv, image));
}

std::filesystem::path default_plot_path(const std::filesystem::path& csv, PlotKind kind) {
    auto p = csv;
    p.replace_extension(std::string(".") + std::string(to_string(kind)) + ".gp");
    return p;
}

}  // namespace railsim
