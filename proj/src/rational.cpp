#include "rankone/rational.hpp"

#include <cctype>

#include "rankone/error.hpp"

namespace rankone {

namespace {

BigInt parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) throw Error(Errc::parse_error, "empty number in \"" + std::string(whole) + "\"");
  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size()) throw Error(Errc::parse_error, "bad number \"" + std::string(whole) + "\"");
  BigInt value = 0;
  for (; pos < text.size(); ++pos) {
    if (!std::isdigit(static_cast<unsigned char>(text[pos]))) {
      throw Error(Errc::parse_error, "bad number \"" + std::string(whole) + "\"");
    }
    value = value * 10 + (text[pos] - '0');
  }
  return negative ? BigInt(-value) : value;
}

}  // namespace

std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash), text);
    BigInt den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw Error(Errc::parse_error, "zero denominator in \"" + std::string(text) + "\"");
    return Rational(num, den);
  }
  const auto dot = text.find('.');
  if (dot != std::string_view::npos) {
    std::string digits(text.substr(0, dot));
    std::string_view frac = text.substr(dot + 1);
    digits.append(frac);
    if (digits.empty() || digits == "-" || digits == "+") {
      throw Error(Errc::parse_error, "bad number \"" + std::string(text) + "\"");
    }
    BigInt den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    return Rational(parse_integer(digits, text), den);
  }
  return Rational(parse_integer(text, text));
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_params: return "InvalidParams";
    case Errc::odd_cut_count: return "OddCutCount";
    case Errc::stage_out_of_range: return "StageOutOfRange";
    case Errc::depth_too_shallow: return "DepthTooShallow";
    case Errc::cardinality_cap: return "CardinalityCap";
    case Errc::divisibility_failed: return "DivisibilityFailed";
    case Errc::coverage_too_small: return "CoverageTooSmall";
    case Errc::usage_error: return "UsageError";
    case Errc::parse_error: return "ParseError";
  }
  return "Error";
}

}  // namespace rankone
