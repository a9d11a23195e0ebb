#pragma once

#include <compare>
#include <string>

namespace emshock {

// Calendar month encoded as year*12 + (month-1); supports arithmetic and
// ordering directly.
struct Month {
  int index = 0;

  Month() = default;
  Month(int year, int month) : index(year * 12 + month - 1) {}

  int year() const { return index >= 0 ? index / 12 : -((-index + 11) / 12); }
  int month() const {
    int m = index % 12;
    if (m < 0) m += 12;
    return m + 1;
  }
  Month plus(int months) const {
    Month out;
    out.index = index + months;
    return out;
  }
  auto operator<=>(const Month&) const = default;

  std::string str() const;  // "YYYY-MM"
};

struct Quarter {
  int index = 0;  // year*4 + (quarter-1)

  Quarter() = default;
  Quarter(int year, int quarter) : index(year * 4 + quarter - 1) {}

  int year() const { return index >= 0 ? index / 4 : -((-index + 3) / 4); }
  int quarter() const {
    int q = index % 4;
    if (q < 0) q += 4;
    return q + 1;
  }
  Quarter plus(int quarters) const {
    Quarter out;
    out.index = index + quarters;
    return out;
  }
  Month last_month() const { return Month(year(), quarter() * 3); }
  auto operator<=>(const Quarter&) const = default;

  std::string str() const;  // "YYYY-Qn"
};

inline Quarter quarter_of(Month m) {
  return Quarter(m.year(), (m.month() - 1) / 3 + 1);
}

// Accepts "YYYY-MM" or "YYYY-MM-DD".
Month parse_month(const std::string& text);

// Accepts "YYYY-Qn", "YYYY-MM" or "YYYY-MM-DD" (mapped to its quarter).
Quarter parse_quarter(const std::string& text);

}  // namespace emshock
