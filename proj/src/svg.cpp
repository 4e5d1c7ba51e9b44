#include "modsig/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace modsig {

namespace {

constexpr double kW = 640, kH = 400, kLeft = 50, kRight = 15, kTop = 30, kBottom = 35;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

}  // namespace

void write_svg(std::ostream& out, const SvgChart& c) {
  double ymax = 0;
  for (const auto& s : c.series)
    for (double v : s.y) ymax = std::max(ymax, v);
  if (c.y_reference > 0) ymax = std::max(ymax, c.y_reference);
  if (ymax <= 0) ymax = 1;
  ymax *= 1.05;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto X = [&](double x) { return kLeft + (x - c.x0) / (c.x1 - c.x0) * pw; };
  auto Y = [&](double y) { return kTop + ph - y / ymax * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
      << kW << ' ' << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(kW / 2) << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(c.title) << "</text>\n";
  for (auto [a, b] : c.shaded)
    out << "<rect x=\"" << fmt(X(a)) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(X(b) - X(a)) << "\" height=\""
        << fmt(ph) << "\" fill=\"#eeeeec\"/>\n";
  for (const auto& s : c.series) {
    if (s.y.empty()) continue;
    const double step = (c.x1 - c.x0) / static_cast<double>(s.y.size());
    if (s.bars) {
      out << "<g fill=\"" << s.color << "\">\n";
      for (std::size_t i = 0; i < s.y.size(); ++i) {
        double x = c.x0 + step * static_cast<double>(i);
        out << "<rect x=\"" << fmt(X(x)) << "\" y=\"" << fmt(Y(s.y[i])) << "\" width=\"" << fmt(X(x + step) - X(x))
            << "\" height=\"" << fmt(Y(0) - Y(s.y[i])) << "\"/>\n";
      }
      out << "</g>\n";
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < s.y.size(); ++i)
        out << (i ? " " : "") << fmt(X(c.x0 + step * (static_cast<double>(i) + 0.5))) << ',' << fmt(Y(s.y[i]));
      out << "\"/>\n";
    }
  }
  if (c.y_reference >= 0)
    out << "<line x1=\"" << fmt(X(c.x0)) << "\" x2=\"" << fmt(X(c.x1)) << "\" y1=\"" << fmt(Y(c.y_reference))
        << "\" y2=\"" << fmt(Y(c.y_reference)) << "\" stroke=\"#555753\" stroke-dasharray=\"4 3\"/>\n";
  // axes and ticks
  out << "<g stroke=\"black\" fill=\"none\"><path d=\"M" << fmt(kLeft) << ' ' << fmt(kTop) << " V" << fmt(kTop + ph)
      << " H" << fmt(kLeft + pw) << "\"/></g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
  for (int i = 0; i <= 4; ++i) {
    double x = c.x0 + (c.x1 - c.x0) * i / 4.0, y = ymax * i / 4.0;
    out << "<text x=\"" << fmt(X(x)) << "\" y=\"" << fmt(kTop + ph + 14) << "\" text-anchor=\"middle\">" << fmt(x)
        << "</text>\n";
    out << "<text x=\"" << fmt(kLeft - 4) << "\" y=\"" << fmt(Y(y) + 3) << "\" text-anchor=\"end\">" << fmt(y)
        << "</text>\n";
  }
  double ly = kTop + 12;
  for (const auto& s : c.series) {
    if (s.label.empty()) continue;
    out << "<text x=\"" << fmt(kLeft + pw - 4) << "\" y=\"" << fmt(ly) << "\" text-anchor=\"end\" fill=\"" << s.color
        << "\">" << escape(s.label) << "</text>\n";
    ly += 13;
  }
  out << "</g>\n</svg>\n";
}

}  // namespace modsig
