#pragma once

// Client for a GraphHopper-compatible routing endpoint, used to cross-check
// the engine's routes. Never on the routing path itself.
//
//   GET <base>/route?point=<lat>,<lon>&point=<lat>,<lon>[&key=<key>]
//
// The body's first path supplies distance (m), time (ms) and points, given
// either as GeoJSON [lon, lat] pairs or as an encoded polyline (1e5).

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "urbanflow/detail/http.hpp"
#include "urbanflow/ingest/parse.hpp"
#include "urbanflow/routing/geo.hpp"

namespace urbanflow::realtime {

struct ExternalRouterConfig {
  std::string base_url = "http://localhost:8989";  // scheme://host[:port][/prefix]
  std::string api_key;
  std::chrono::milliseconds timeout{5000};
  std::string profile;  // optional "profile" parameter
};

struct ExternalRoute {
  double distance_m = 0;
  double time_sec = 0;
  std::vector<routing::LatLon> points;
};

class ExternalRouterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ExternalTimeoutError : public ExternalRouterError {
 public:
  using ExternalRouterError::ExternalRouterError;
};
class ExternalConnectionError : public ExternalRouterError {
 public:
  using ExternalRouterError::ExternalRouterError;
};
class ExternalStatusError : public ExternalRouterError {
 public:
  ExternalStatusError(int status, const std::string& body)
      : ExternalRouterError("router returned HTTP " + std::to_string(status)), status_(status), body_(body) {}
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};
class ExternalRateLimitError : public ExternalStatusError {
 public:
  ExternalRateLimitError(std::optional<double> retry_after, const std::string& body)
      : ExternalStatusError(429, body), retry_after_(retry_after) {}
  /// Seconds from the Retry-After header, when it was a number.
  std::optional<double> retry_after() const { return retry_after_; }

 private:
  std::optional<double> retry_after_;
};
class ExternalMalformedError : public ExternalRouterError {
 public:
  using ExternalRouterError::ExternalRouterError;
};

/// Google polyline decoding at 1e-5 degrees.
inline std::vector<routing::LatLon> decode_polyline(const std::string& s, double precision = 1e5) {
  std::vector<routing::LatLon> out;
  std::size_t i = 0;
  std::int64_t lat = 0, lon = 0;
  auto next = [&]() -> std::int64_t {
    std::int64_t result = 0;
    int shift = 0;
    while (true) {
      if (i >= s.size()) throw ExternalMalformedError("truncated polyline");
      const int b = static_cast<unsigned char>(s[i++]) - 63;
      if (b < 0 || b > 63) throw ExternalMalformedError("bad polyline character");
      if (shift > 60) throw ExternalMalformedError("polyline value overflow");
      result |= static_cast<std::int64_t>(b & 0x1f) << shift;
      shift += 5;
      if (b < 0x20) break;
    }
    return (result & 1) ? ~(result >> 1) : (result >> 1);
  };
  while (i < s.size()) {
    lat += next();
    lon += next();
    out.push_back({static_cast<double>(lat) / precision, static_cast<double>(lon) / precision});
  }
  return out;
}

inline std::string encode_polyline(const std::vector<routing::LatLon>& pts, double precision = 1e5) {
  std::string out;
  auto put = [&](std::int64_t v) {
    std::uint64_t u = v < 0 ? ~(static_cast<std::uint64_t>(v) << 1) : static_cast<std::uint64_t>(v) << 1;
    while (u >= 0x20) {
      out.push_back(static_cast<char>((0x20 | (u & 0x1f)) + 63));
      u >>= 5;
    }
    out.push_back(static_cast<char>(u + 63));
  };
  std::int64_t plat = 0, plon = 0;
  for (const auto& p : pts) {
    const auto lat = static_cast<std::int64_t>(std::llround(p.lat * precision));
    const auto lon = static_cast<std::int64_t>(std::llround(p.lon * precision));
    put(lat - plat);
    put(lon - plon);
    plat = lat;
    plon = lon;
  }
  return out;
}

/// Parses a routing response body.
inline ExternalRoute parse_external_route(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ExternalMalformedError(std::string("unparseable body: ") + e.what());
  }
  try {
    const auto& paths = j.at("paths");
    if (!paths.is_array() || paths.empty()) throw ExternalMalformedError("no paths in response");
    const auto& p = paths.at(0);
    ExternalRoute r;
    r.distance_m = p.at("distance").get<double>();
    r.time_sec = p.at("time").get<double>() / 1000.0;
    if (p.contains("points")) {
      const auto& pts = p.at("points");
      if (pts.is_string()) {
        r.points = decode_polyline(pts.get<std::string>());
      } else {
        for (const auto& c : pts.at("coordinates")) r.points.push_back({c.at(1).get<double>(), c.at(0).get<double>()});
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ExternalMalformedError(std::string("unexpected body: ") + e.what());
  }
}

inline std::string external_route_path(const ExternalRouterConfig& cfg, const std::string& prefix,
                                       const routing::LatLon& origin, const routing::LatLon& dest) {
  using ingest::detail::shortest;
  std::string path = prefix + "/route?point=" + shortest(origin.lat) + "," + shortest(origin.lon) +
                     "&point=" + shortest(dest.lat) + "," + shortest(dest.lon);
  if (!cfg.profile.empty()) path += "&profile=" + httplib::detail::encode_query_param(cfg.profile);
  if (!cfg.api_key.empty()) path += "&key=" + httplib::detail::encode_query_param(cfg.api_key);
  return path;
}

/// One routing query. Throws the typed errors above.
inline ExternalRoute external_router_query(const ExternalRouterConfig& cfg, const routing::LatLon& origin,
                                           const routing::LatLon& dest) {
  // Split scheme://host:port from any path prefix.
  std::string host = cfg.base_url, prefix;
  if (const auto scheme = host.find("://"); scheme != std::string::npos) {
    if (const auto slash = host.find('/', scheme + 3); slash != std::string::npos) {
      prefix = host.substr(slash);
      host.erase(slash);
    }
  }
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(host);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  auto res = client.Get(external_route_path(cfg, prefix, origin, dest));
  if (!res) {
    const auto err = res.error();
    const auto msg = "router request failed: " + httplib::to_string(err);
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) throw ExternalTimeoutError(msg);
    throw ExternalConnectionError(msg);
  }
  if (res->status == 429) {
    std::optional<double> retry;
    if (res->has_header("Retry-After")) {
      try {
        std::size_t used = 0;
        const auto v = res->get_header_value("Retry-After");
        const double d = std::stod(v, &used);
        if (used == v.size()) retry = d;
      } catch (const std::exception&) {
      }
    }
    throw ExternalRateLimitError(retry, res->body);
  }
  if (res->status < 200 || res->status >= 300) throw ExternalStatusError(res->status, res->body);
  return parse_external_route(res->body);
}

}  // namespace urbanflow::realtime
