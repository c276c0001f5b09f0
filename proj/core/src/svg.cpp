#include "oie/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oie::svg {
namespace {

constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 48;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string color_map(double v) {
  v = std::clamp(v, 0.0, 1.0);
  // three-stop ramp: #21306b -> #2a9d8f -> #ffd166
  auto lerp = [](int a, int b, double t) { return static_cast<int>(a + (b - a) * t + 0.5); };
  int r, g, b;
  if (v < 0.5) {
    double t = v / 0.5;
    r = lerp(0x21, 0x2a, t);
    g = lerp(0x30, 0x9d, t);
    b = lerp(0x6b, 0x8f, t);
  } else {
    double t = (v - 0.5) / 0.5;
    r = lerp(0x2a, 0xff, t);
    g = lerp(0x9d, 0xd1, t);
    b = lerp(0x8f, 0x66, t);
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

Figure::Figure(int width, int height, std::string title)
    : width_(width), height_(height), title_(std::move(title)) {}

void Figure::set_axes(double xmin, double xmax, double ymin, double ymax,
                      std::string xlabel, std::string ylabel) {
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  xmin_ = xmin;
  xmax_ = xmax;
  ymin_ = ymin;
  ymax_ = ymax;
  xlabel_ = std::move(xlabel);
  ylabel_ = std::move(ylabel);
}

double Figure::sx(double x) const {
  return kMarginLeft + (x - xmin_) / (xmax_ - xmin_) * (width_ - kMarginLeft - kMarginRight);
}

double Figure::sy(double y) const {
  return height_ - kMarginBottom -
         (y - ymin_) / (ymax_ - ymin_) * (height_ - kMarginTop - kMarginBottom);
}

void Figure::add_polyline(std::span<const double> x, std::span<const double> y,
                          const std::string& color, const std::string& label) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("Figure::add_polyline: empty or mismatched series");
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i)
    os << num(sx(x[i])) << "," << num(sy(y[i])) << (i + 1 < x.size() ? " " : "");
  os << "\"/>";
  body_.push_back(os.str());
  if (!label.empty()) legend_.push_back({label, color});
}

void Figure::add_points(std::span<const double> x, std::span<const double> y,
                        const std::string& color, double radius, const std::string& label) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("Figure::add_points: empty or mismatched series");
  std::ostringstream os;
  for (std::size_t i = 0; i < x.size(); ++i)
    os << "<circle cx=\"" << num(sx(x[i])) << "\" cy=\"" << num(sy(y[i])) << "\" r=\""
       << num(radius) << "\" fill=\"" << color << "\"/>";
  body_.push_back(os.str());
  if (!label.empty()) legend_.push_back({label, color});
}

void Figure::add_bar(double x, double height, double bar_width, const std::string& color,
                     const std::string& label) {
  double x0 = sx(x - 0.5 * bar_width), x1 = sx(x + 0.5 * bar_width);
  double y0 = sy(std::max(0.0, ymin_)), y1 = sy(height);
  std::ostringstream os;
  os << "<rect x=\"" << num(x0) << "\" y=\"" << num(std::min(y0, y1)) << "\" width=\""
     << num(x1 - x0) << "\" height=\"" << num(std::abs(y0 - y1)) << "\" fill=\"" << color
     << "\"/>";
  body_.push_back(os.str());
  if (!label.empty()) legend_.push_back({label, color});
}

void Figure::add_cell(double x0, double x1, double y0, double y1, const std::string& color) {
  std::ostringstream os;
  os << "<rect x=\"" << num(sx(x0)) << "\" y=\"" << num(sy(y1)) << "\" width=\""
     << num(sx(x1) - sx(x0)) << "\" height=\"" << num(sy(y0) - sy(y1)) << "\" fill=\"" << color
     << "\"/>";
  body_.push_back(os.str());
}

std::string Figure::render() const {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
     << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n"
     << "<rect width=\"" << width_ << "\" height=\"" << height_ << "\" fill=\"white\"/>\n"
     << "<text x=\"" << width_ / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
        "font-family=\"sans-serif\">"
     << xml_escape(title_) << "</text>\n";

  for (const auto& el : body_) os << el << "\n";

  // axes box and ticks on top of the data
  double x0 = kMarginLeft, x1 = width_ - kMarginRight;
  double y0 = height_ - kMarginBottom, y1 = kMarginTop;
  os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
     << "\" height=\"" << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double fx = xmin_ + (xmax_ - xmin_) * i / 4.0;
    double fy = ymin_ + (ymax_ - ymin_) * i / 4.0;
    os << "<line x1=\"" << num(sx(fx)) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(sx(fx))
       << "\" y2=\"" << num(y0 + 4) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(y0 + 16)
       << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">"
       << xml_escape(tick_label(fx)) << "</text>\n"
       << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(sy(fy)) << "\" x2=\"" << num(x0)
       << "\" y2=\"" << num(sy(fy)) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(sy(fy) + 3)
       << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
       << xml_escape(tick_label(fy)) << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << height_ - 10
     << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
     << xml_escape(xlabel_) << "</text>\n"
     << "<text x=\"14\" y=\"" << (y0 + y1) / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
        "transform=\"rotate(-90 14 "
     << (y0 + y1) / 2 << ")\">" << xml_escape(ylabel_) << "</text>\n";

  double ly = y1 + 12;
  for (const auto& item : legend_) {
    os << "<rect x=\"" << num(x1 - 130) << "\" y=\"" << num(ly - 8)
       << "\" width=\"10\" height=\"10\" fill=\"" << item.color << "\"/>\n"
       << "<text x=\"" << num(x1 - 116) << "\" y=\"" << num(ly + 1)
       << "\" font-size=\"10\" font-family=\"sans-serif\">" << xml_escape(item.label)
       << "</text>\n";
    ly += 14;
  }
  os << "</svg>\n";
  return os.str();
}

void Figure::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("Figure::save: cannot write '" + path.string() + "'");
  out << render();
}

}  // namespace oie::svg
