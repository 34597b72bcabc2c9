#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "adaptune/stats.hpp"

namespace adaptune::stats {

namespace {

std::string fixed_decimals(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

}  // namespace

std::string format_uncertainty(double mean, double delta, int decimals) {
  if (decimals < 0 || decimals > 17) {
    throw std::invalid_argument("format_uncertainty: bad decimals");
  }
  if (!(delta >= 0.0) || !std::isfinite(mean) || !std::isfinite(delta)) {
    throw std::invalid_argument("format_uncertainty: bad mean/delta");
  }
  const double unit = std::pow(10.0, decimals);
  const long long scaled = std::llround(delta * unit);
  std::string out = fixed_decimals(mean, decimals);
  out += '(';
  if (static_cast<double>(scaled) < unit) {
    // uncertainty below 1: digits in units of the last decimals, "0.6112(97)"
    out += std::to_string(scaled);
  } else {
    // uncertainty of 1 or more: shown as a plain decimal, "49.4(1.9)"
    out += fixed_decimals(delta, decimals);
  }
  out += ')';
  return out;
}

ParsedValue parse_uncertainty(const std::string& text) {
  const std::size_t open = text.find('(');
  const std::size_t close = text.find(')', open == std::string::npos ? 0 : open);
  if (open == std::string::npos || close == std::string::npos ||
      close != text.size() - 1 || close <= open + 1) {
    throw std::invalid_argument("parse_uncertainty: expected 'mean(delta)'");
  }
  const std::string mean_part = text.substr(0, open);
  const std::string delta_part = text.substr(open + 1, close - open - 1);

  std::size_t pos = 0;
  double mean = 0.0;
  try {
    mean = std::stod(mean_part, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("parse_uncertainty: bad mean '" + mean_part + "'");
  }
  if (pos != mean_part.size()) {
    throw std::invalid_argument("parse_uncertainty: bad mean '" + mean_part + "'");
  }
  const std::size_t point = mean_part.find('.');
  const int decimals =
      point == std::string::npos ? 0 : static_cast<int>(mean_part.size() - point - 1);

  ParsedValue out;
  out.mean = mean;
  out.decimals = decimals;
  if (delta_part.find('.') != std::string::npos) {
    out.delta = std::stod(delta_part);
  } else {
    for (char c : delta_part) {
      if (c < '0' || c > '9') {
        throw std::invalid_argument("parse_uncertainty: bad delta '" + delta_part + "'");
      }
    }
    out.delta = std::stod(delta_part) * std::pow(10.0, -decimals);
  }
  return out;
}

}  // namespace adaptune::stats
