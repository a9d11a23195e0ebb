#include "emshock/dates.hpp"

#include <cctype>
#include <cstdio>

#include "emshock/errors.hpp"

namespace emshock {

std::string Month::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year(), month());
  return buf;
}

std::string Quarter::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-Q%d", year(), quarter());
  return buf;
}

namespace {

bool parse_int(const std::string& s, std::size_t begin, std::size_t len, int& out) {
  if (begin + len > s.size()) return false;
  int value = 0;
  for (std::size_t i = begin; i < begin + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    value = value * 10 + (s[i] - '0');
  }
  out = value;
  return true;
}

}  // namespace

Month parse_month(const std::string& text) {
  int y = 0, m = 0;
  if (text.size() >= 7 && text[4] == '-' && parse_int(text, 0, 4, y) &&
      parse_int(text, 5, 2, m) && m >= 1 && m <= 12 &&
      (text.size() == 7 || (text.size() == 10 && text[7] == '-')))
    return Month(y, m);
  throw Error(ErrorKind::SchemaMismatch, "cannot parse month from '" + text + "'");
}

Quarter parse_quarter(const std::string& text) {
  if (text.size() == 7 && text[4] == '-' && (text[5] == 'Q' || text[5] == 'q')) {
    int y = 0, q = 0;
    if (parse_int(text, 0, 4, y) && parse_int(text, 6, 1, q) && q >= 1 && q <= 4)
      return Quarter(y, q);
    throw Error(ErrorKind::SchemaMismatch, "cannot parse quarter from '" + text + "'");
  }
  return quarter_of(parse_month(text));
}

}  // namespace emshock
