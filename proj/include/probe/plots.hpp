#pragma once

#include <string>
#include <vector>

namespace probe {

/// Minimal deterministic SVG line-plot writer.
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel);

    void add_line(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color, const std::string& name, bool dashed = false);
    void add_markers(const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& color, const std::string& name);
    void write(const std::string& path) const;

  private:
    struct Series {
        std::vector<double> x, y;
        std::string color, name;
        bool dashed = false;
        bool markers = false;
    };
    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
};

}  // namespace probe
