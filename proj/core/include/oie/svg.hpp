#ifndef OIE_SVG_HPP
#define OIE_SVG_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace oie::svg {

/// Maps v in [0,1] to a hex color (dark blue -> teal -> yellow ramp).
std::string color_map(double v);

/// Minimal self-contained SVG plot: one linear axes box with ticks, labels
/// and a legend. Every add_* call uses data coordinates.
class Figure {
 public:
  Figure(int width, int height, std::string title);

  void set_axes(double xmin, double xmax, double ymin, double ymax,
                std::string xlabel, std::string ylabel);

  void add_polyline(std::span<const double> x, std::span<const double> y,
                    const std::string& color, const std::string& label = "");
  void add_points(std::span<const double> x, std::span<const double> y,
                  const std::string& color, double radius = 3.0,
                  const std::string& label = "");
  /// Vertical bar centered at x with the given width in data units.
  void add_bar(double x, double height, double bar_width, const std::string& color,
               const std::string& label = "");
  /// Filled cell covering [x0,x1] x [y0,y1].
  void add_cell(double x0, double x1, double y0, double y1, const std::string& color);

  std::string render() const;
  void save(const std::filesystem::path& path) const;

 private:
  struct Legend {
    std::string label;
    std::string color;
  };
  double sx(double x) const;
  double sy(double y) const;

  int width_, height_;
  std::string title_;
  double xmin_ = 0, xmax_ = 1, ymin_ = 0, ymax_ = 1;
  std::string xlabel_, ylabel_;
  std::vector<std::string> body_;
  std::vector<Legend> legend_;
};

/// Escapes &, <, > and quotes for XML text/attribute content.
std::string xml_escape(std::string_view text);

}  // namespace oie::svg

#endif  // OIE_SVG_HPP
