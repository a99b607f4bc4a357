#ifndef CRITWAVE_SVG_HPP
#define CRITWAVE_SVG_HPP

#include <string>
#include <vector>

namespace critwave::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal line chart: axes box, polylines, series labels. log_y switches the
// vertical axis to log10 (nonpositive samples are dropped).
std::string line_chart(const std::string& title, const std::vector<Series>& series,
                       bool log_y = false);

void write_chart(const std::string& path, const std::string& title,
                 const std::vector<Series>& series, bool log_y = false);

}  // namespace critwave::svg

#endif
