#pragma once

#include <string>
#include <vector>

namespace adsvol::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;  // NaN entries break the line
};

struct SmilePlot {
    std::string title;
    std::string comment;  // embedded as an XML comment (provenance)
    Series observed;      // drawn as points
    std::vector<Series> curves;
    int width = 720;
    int height = 480;
};

/// Static smile chart: observed points, one polyline per curve, axes
/// labeled moneyness / IV, legend. Output is deterministic for given input.
std::string render(const SmilePlot& plot);

}  // namespace adsvol::svg
