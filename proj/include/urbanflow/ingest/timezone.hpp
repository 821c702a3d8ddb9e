#pragma once

// Minimal reader for compiled zoneinfo (TZif) files, enough to convert
// between UTC seconds and naive local wall-clock seconds.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace urbanflow::ingest {

class TimeZoneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeZone {
 public:
  // "UTC" or a zoneinfo name such as "America/New_York". Zone files are looked
  // up under $TZDIR, then /usr/share/zoneinfo.
  static TimeZone load(const std::string& name) {
    if (name == "UTC" || name == "Etc/UTC" || name == "Z") return TimeZone(name);
    if (name.empty() || name.find("..") != std::string::npos)
      throw TimeZoneError("invalid timezone name '" + name + "'");
    std::vector<std::filesystem::path> roots;
    if (const char* dir = std::getenv("TZDIR")) roots.emplace_back(dir);
    roots.emplace_back("/usr/share/zoneinfo");
    for (const auto& root : roots) {
      std::ifstream in(root / name, std::ios::binary);
      if (!in) continue;
      std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
      TimeZone tz(name);
      tz.parse(bytes);
      return tz;
    }
    throw TimeZoneError("unknown timezone '" + name + "'");
  }

  static TimeZone utc() { return TimeZone("UTC"); }

  const std::string& name() const { return name_; }

  // UTC offset in seconds in force at the given UTC instant.
  std::int64_t offset_at(std::int64_t utc) const {
    if (transitions_.empty()) return default_offset_;
    auto it = std::upper_bound(transitions_.begin(), transitions_.end(), utc,
                               [](std::int64_t t, const Transition& tr) { return t < tr.at; });
    if (it == transitions_.begin()) return default_offset_;
    const auto& last = *std::prev(it);
    if (it == transitions_.end() && rule_) return rule_->offset_at(utc, last.offset);
    return last.offset;
  }

  std::int64_t to_local(std::int64_t utc) const { return utc + offset_at(utc); }

  // Local wall-clock seconds to UTC. Ambiguous times resolve to the earlier
  // instant; times inside a gap are shifted forward by the gap length.
  std::int64_t to_utc(std::int64_t local) const {
    // Candidate offsets are whatever is in force a day either side.
    const std::int64_t a = offset_at(local - 86400);
    const std::int64_t b = offset_at(local + 86400);
    std::int64_t best = INT64_MAX;
    for (std::int64_t off : {a, b}) {
      const std::int64_t u = local - off;
      if (offset_at(u) == off) best = std::min(best, u);
    }
    if (best != INT64_MAX) return best;
    // Gap: interpret with the earlier offset.
    return local - a;
  }

 private:
  struct Transition {
    std::int64_t at;
    std::int64_t offset;
  };

  // POSIX TZ footer rule of the form STD<off>DST[<off>],Mm.w.d[/time],Mm.w.d[/time]
  // used for instants past the last listed transition.
  struct PosixRule {
    std::int64_t std_offset = 0;
    std::int64_t dst_offset = 0;
    bool has_dst = false;
    struct When {
      int month = 0, week = 0, weekday = 0;
      std::int64_t time = 7200;
    } start, end;

    static std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
      y -= m <= 2;
      const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
      const auto yoe = static_cast<unsigned>(y - era * 400);
      const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
      const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
      return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
    }

    static std::int64_t local_instant(std::int64_t year, const When& w) {
      const std::int64_t first = days_from_civil(year, static_cast<unsigned>(w.month), 1);
      const std::int64_t first_wd = ((first % 7) + 11) % 7;  // 0 = Sunday
      std::int64_t day = first + ((w.weekday - first_wd) % 7 + 7) % 7 + 7 * (w.week - 1);
      if (w.week == 5) {
        const int next_month = w.month == 12 ? 1 : w.month + 1;
        const std::int64_t next_first =
            days_from_civil(w.month == 12 ? year + 1 : year, static_cast<unsigned>(next_month), 1);
        while (day >= next_first) day -= 7;
      }
      return day * 86400 + w.time;
    }

    std::int64_t offset_at(std::int64_t utc, std::int64_t /*fallback*/) const {
      if (!has_dst) return std_offset;
      const std::int64_t days = (utc + std_offset) / 86400 - ((utc + std_offset) % 86400 < 0);
      // civil year from days
      const std::int64_t z = days + 719468;
      const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
      const auto doe = static_cast<unsigned>(z - era * 146097);
      const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
      const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
      const unsigned mp = (5 * doy + 2) / 153;
      const unsigned m = mp < 10 ? mp + 3 : mp - 9;
      const std::int64_t year = static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2);
      const std::int64_t dst_begin = local_instant(year, start) - std_offset;
      const std::int64_t dst_end = local_instant(year, end) - dst_offset;
      if (dst_begin < dst_end) return (utc >= dst_begin && utc < dst_end) ? dst_offset : std_offset;
      return (utc >= dst_end && utc < dst_begin) ? std_offset : dst_offset;
    }
  };

  explicit TimeZone(std::string name) : name_(std::move(name)) {}

  static std::int64_t be(const unsigned char* p, int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | p[i];
    if (n == 4) return static_cast<std::int32_t>(static_cast<std::uint32_t>(v));
    return static_cast<std::int64_t>(v);
  }

  void parse(const std::vector<unsigned char>& b) {
    auto fail = [&] { throw TimeZoneError("malformed zoneinfo file for '" + name_ + "'"); };
    if (b.size() < 44 || b[0] != 'T' || b[1] != 'Z' || b[2] != 'i' || b[3] != 'f') fail();
    const int version = b[4] == 0 ? 1 : b[4] - '0';
    std::size_t pos = 0;
    auto read_block = [&](int time_size) {
      if (pos + 44 > b.size()) fail();
      const unsigned char* h = b.data() + pos;
      const auto isutcnt = be(h + 20, 4), isstdcnt = be(h + 24, 4), leapcnt = be(h + 28, 4),
                 timecnt = be(h + 32, 4), typecnt = be(h + 36, 4), charcnt = be(h + 40, 4);
      pos += 44;
      const std::size_t need = timecnt * time_size + timecnt + typecnt * 6 + charcnt +
                               leapcnt * (time_size + 4) + isstdcnt + isutcnt;
      if (pos + need > b.size()) fail();
      std::vector<std::int64_t> times(timecnt);
      for (std::int64_t i = 0; i < timecnt; ++i) times[i] = be(b.data() + pos + i * time_size, time_size);
      pos += timecnt * time_size;
      std::vector<int> idx(timecnt);
      for (std::int64_t i = 0; i < timecnt; ++i) idx[i] = b[pos + i];
      pos += timecnt;
      std::vector<std::int64_t> offsets(typecnt);
      std::vector<bool> isdst(typecnt);
      for (std::int64_t i = 0; i < typecnt; ++i) {
        offsets[i] = be(b.data() + pos + i * 6, 4);
        isdst[i] = b[pos + i * 6 + 4] != 0;
      }
      pos += typecnt * 6 + charcnt + leapcnt * (time_size + 4) + isstdcnt + isutcnt;
      transitions_.clear();
      for (std::int64_t i = 0; i < timecnt; ++i) {
        if (idx[i] >= typecnt) fail();
        transitions_.push_back({times[i], offsets[idx[i]]});
      }
      default_offset_ = 0;
      for (std::int64_t i = 0; i < typecnt; ++i)
        if (!isdst[i]) {
          default_offset_ = offsets[i];
          break;
        }
    };
    read_block(4);
    if (version >= 2) {
      read_block(8);
      // Footer: \n<rule>\n
      if (pos < b.size() && b[pos] == '\n') {
        const auto end = std::find(b.begin() + static_cast<std::ptrdiff_t>(pos) + 1, b.end(), '\n');
        std::string footer(b.begin() + static_cast<std::ptrdiff_t>(pos) + 1, end);
        parse_footer(footer);
      }
    }
  }

  void parse_footer(const std::string& s) {
    if (s.empty()) return;
    std::size_t i = 0;
    auto skip_name = [&] {
      if (i < s.size() && s[i] == '<') {
        while (i < s.size() && s[i] != '>') ++i;
        ++i;
      } else {
        while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
      }
    };
    auto read_hms = [&]() -> std::int64_t {
      int sign = 1;
      if (i < s.size() && (s[i] == '+' || s[i] == '-')) sign = s[i++] == '-' ? -1 : 1;
      std::int64_t parts[3] = {0, 0, 0};
      for (int p = 0; p < 3; ++p) {
        std::int64_t v = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) v = v * 10 + (s[i++] - '0');
        parts[p] = v;
        if (i < s.size() && s[i] == ':' && p < 2) ++i;
        else break;
      }
      return sign * (parts[0] * 3600 + parts[1] * 60 + parts[2]);
    };
    PosixRule r;
    skip_name();
    r.std_offset = -read_hms();  // POSIX offsets are west-positive
    if (i >= s.size()) {
      rule_ = std::make_shared<PosixRule>(r);
      return;
    }
    skip_name();
    r.has_dst = true;
    r.dst_offset = r.std_offset + 3600;
    if (i < s.size() && s[i] != ',') r.dst_offset = -read_hms();
    auto read_when = [&](PosixRule::When& w) {
      if (i >= s.size() || s[i] != ',') return false;
      ++i;
      if (i >= s.size() || s[i] != 'M') return false;
      ++i;
      w.month = static_cast<int>(std::strtol(s.c_str() + i, nullptr, 10));
      while (i < s.size() && s[i] != '.') ++i;
      ++i;
      w.week = static_cast<int>(std::strtol(s.c_str() + i, nullptr, 10));
      while (i < s.size() && s[i] != '.') ++i;
      ++i;
      w.weekday = static_cast<int>(std::strtol(s.c_str() + i, nullptr, 10));
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == '/') {
        ++i;
        w.time = read_hms();
      }
      return true;
    };
    if (!read_when(r.start) || !read_when(r.end)) return;  // unsupported rule form: keep table only
    rule_ = std::make_shared<PosixRule>(r);
  }

  std::string name_;
  std::vector<Transition> transitions_;
  std::int64_t default_offset_ = 0;
  std::shared_ptr<const PosixRule> rule_;
};

}  // namespace urbanflow::ingest
