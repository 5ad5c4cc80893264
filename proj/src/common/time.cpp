#include "crisis/common/time.hpp"

#include <charconv>
#include <cstdio>

#include "crisis/common/error.hpp"

namespace crisis {

using namespace std::chrono;

Timestamp now_utc() { return time_point_cast<milliseconds>(system_clock::now()); }

std::string format_rfc3339(Timestamp t) {
  const sys_days day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss<milliseconds> tod{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()),
                static_cast<int>(tod.subseconds().count()));
  return buf;
}

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t width) {
  if (pos + width > text.size()) throw ParseError("timestamp too short: " + std::string(text));
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + width, value);
  if (ec != std::errc{} || ptr != first + width) {
    throw ParseError("malformed timestamp: " + std::string(text));
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw ParseError("malformed timestamp: " + std::string(text));
  }
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  const int y = read_int(text, 0, 4);
  expect(text, 4, '-');
  const int mo = read_int(text, 5, 2);
  expect(text, 7, '-');
  const int d = read_int(text, 8, 2);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != 't' && text[10] != ' ')) {
    throw ParseError("malformed timestamp: " + std::string(text));
  }
  const int h = read_int(text, 11, 2);
  expect(text, 13, ':');
  const int mi = read_int(text, 14, 2);
  expect(text, 16, ':');
  const int s = read_int(text, 17, 2);

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw ParseError("timestamp out of range: " + std::string(text));
  }

  std::size_t pos = 19;
  milliseconds fraction{0};
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    long long ms = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) ms = ms * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) throw ParseError("malformed timestamp: " + std::string(text));
    for (int i = digits; i < 3; ++i) ms *= 10;
    fraction = milliseconds{ms};
  }

  minutes offset{0};
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    const int sign = text[pos] == '-' ? -1 : 1;
    const int oh = read_int(text, pos + 1, 2);
    expect(text, pos + 3, ':');
    const int om = read_int(text, pos + 4, 2);
    offset = minutes{sign * (oh * 60 + om)};
    pos += 6;
  } else {
    throw ParseError("timestamp lacks a UTC offset: " + std::string(text));
  }
  if (pos != text.size()) throw ParseError("trailing characters in timestamp: " + std::string(text));

  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + fraction - offset;
}

}  // namespace crisis
