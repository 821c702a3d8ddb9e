#pragma once

// Model persistence.
//
// A model file is a short text header followed by a JSON payload:
//
//   URBANFLOW-MODEL
//   format_version=1
//   kind=linreg
//   length=<payload bytes>
//   crc32=<8 lowercase hex digits of the payload>
//   ---
//   <payload>
//
// Doubles are written with round-trip precision, so load(save(m)) == m
// exactly.

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>
#include <zlib.h>

#include "urbanflow/ingest/features.hpp"
#include "urbanflow/ml/kmeans.hpp"
#include "urbanflow/ml/linreg.hpp"

namespace urbanflow::ml {

inline constexpr int kModelFormatVersion = 1;

class ModelFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ModelVersionError : public ModelFileError {
 public:
  ModelVersionError(int found, int expected)
      : ModelFileError("model format_version " + std::to_string(found) + " is not supported (expected " +
                       std::to_string(expected) + ")"),
        found_(found),
        expected_(expected) {}
  int found() const { return found_; }
  int expected() const { return expected_; }

 private:
  int found_, expected_;
};
class ModelTruncatedError : public ModelFileError {
 public:
  using ModelFileError::ModelFileError;
};
class ModelChecksumError : public ModelFileError {
 public:
  using ModelFileError::ModelFileError;
};
class ModelFormatError : public ModelFileError {
 public:
  using ModelFileError::ModelFileError;
};

/// Training context stored next to the fitted parameters.
struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
  std::optional<ingest::NormStats> norm;
  std::string target;
  std::map<std::string, std::string> extra;

  bool operator==(const TrainingMetadata&) const = default;
};

struct ModelFile {
  int format_version = kModelFormatVersion;
  std::variant<LinRegModel, KMeansModel> model;
  TrainingMetadata meta;

  std::string kind() const { return std::holds_alternative<LinRegModel>(model) ? "linreg" : "kmeans"; }
  bool operator==(const ModelFile&) const = default;
};

namespace model_detail {

inline std::uint32_t crc(const std::string& s) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size())));
}

inline nlohmann::json meta_to_json(const TrainingMetadata& m) {
  nlohmann::json j;
  j["seed"] = m.seed;
  j["feature_names"] = m.feature_names;
  j["target"] = m.target;
  j["extra"] = m.extra;
  if (m.norm) j["norm"] = {{"features", m.norm->features}, {"mean", m.norm->mean}, {"stddev", m.norm->stddev}};
  return j;
}

inline TrainingMetadata meta_from_json(const nlohmann::json& j) {
  TrainingMetadata m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.target = j.at("target").get<std::string>();
  m.extra = j.at("extra").get<std::map<std::string, std::string>>();
  if (j.contains("norm")) {
    const auto& n = j.at("norm");
    m.norm = ingest::NormStats{n.at("features").get<std::vector<std::string>>(),
                               n.at("mean").get<std::vector<double>>(), n.at("stddev").get<std::vector<double>>()};
  }
  return m;
}

}  // namespace model_detail

inline std::string save_model(const ModelFile& file) {
  nlohmann::json payload;
  if (const auto* lr = std::get_if<LinRegModel>(&file.model)) {
    payload["intercept"] = lr->intercept;
    payload["coefficients"] = lr->coefficients;
    payload["feature_names"] = lr->feature_names;
    payload["ridge_epsilon"] = lr->ridge_epsilon;
  } else {
    const auto& km = std::get<KMeansModel>(file.model);
    payload["k"] = km.k;
    payload["dim"] = km.centroids.dim();
    payload["centroids"] = km.centroids.data();
    payload["inertia"] = km.inertia;
    payload["iterations"] = km.iterations;
    payload["seed"] = km.seed;
  }
  payload["metadata"] = model_detail::meta_to_json(file.meta);
  const std::string body = payload.dump();
  char crc_hex[9];
  std::snprintf(crc_hex, sizeof crc_hex, "%08x", model_detail::crc(body));
  std::ostringstream out;
  out << "URBANFLOW-MODEL\n"
      << "format_version=" << file.format_version << '\n'
      << "kind=" << file.kind() << '\n'
      << "length=" << body.size() << '\n'
      << "crc32=" << crc_hex << '\n'
      << "---\n"
      << body;
  return out.str();
}

inline ModelFile load_model(const std::string& bytes) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::optional<std::string> {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) return std::nullopt;
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  auto magic = next_line();
  if (!magic) throw ModelTruncatedError("model file truncated in header");
  if (*magic != "URBANFLOW-MODEL") throw ModelFormatError("not a model file (bad magic)");
  std::map<std::string, std::string> header;
  for (;;) {
    auto line = next_line();
    if (!line) throw ModelTruncatedError("model file truncated in header");
    if (*line == "---") break;
    const auto eq = line->find('=');
    if (eq == std::string::npos) throw ModelFormatError("malformed header line '" + *line + "'");
    header[line->substr(0, eq)] = line->substr(eq + 1);
  }
  auto field = [&](const char* key) {
    auto it = header.find(key);
    if (it == header.end()) throw ModelFormatError(std::string("model header lacks '") + key + "'");
    return it->second;
  };
  int version = 0;
  try {
    version = std::stoi(field("format_version"));
  } catch (const std::logic_error&) {
    throw ModelFormatError("unreadable format_version");
  }
  if (version != kModelFormatVersion) throw ModelVersionError(version, kModelFormatVersion);
  const std::string kind = field("kind");
  std::size_t length = 0;
  try {
    length = std::stoull(field("length"));
  } catch (const std::logic_error&) {
    throw ModelFormatError("unreadable length");
  }
  const std::string body = bytes.substr(pos);
  if (body.size() < length)
    throw ModelTruncatedError("model payload truncated: " + std::to_string(body.size()) + " of " +
                              std::to_string(length) + " bytes");
  if (body.size() > length) throw ModelFormatError("trailing bytes after model payload");
  char crc_hex[9];
  std::snprintf(crc_hex, sizeof crc_hex, "%08x", model_detail::crc(body));
  if (field("crc32") != crc_hex) throw ModelChecksumError("model payload checksum mismatch");

  ModelFile file;
  file.format_version = version;
  try {
    const auto j = nlohmann::json::parse(body);
    if (kind == "linreg") {
      LinRegModel lr;
      lr.intercept = j.at("intercept").get<double>();
      lr.coefficients = j.at("coefficients").get<std::vector<double>>();
      lr.feature_names = j.at("feature_names").get<std::vector<std::string>>();
      lr.ridge_epsilon = j.at("ridge_epsilon").get<double>();
      if (lr.coefficients.size() != lr.feature_names.size())
        throw ModelFormatError("coefficient and feature counts differ");
      file.model = std::move(lr);
    } else if (kind == "kmeans") {
      KMeansModel km;
      km.k = j.at("k").get<std::size_t>();
      const auto dim = j.at("dim").get<std::size_t>();
      const auto flat = j.at("centroids").get<std::vector<double>>();
      if (dim == 0 || flat.size() != km.k * dim) throw ModelFormatError("centroid block has wrong size");
      km.centroids = Points(dim);
      for (std::size_t c = 0; c < km.k; ++c)
        km.centroids.push_back(std::span<const double>(flat.data() + c * dim, dim));
      km.inertia = j.at("inertia").get<double>();
      km.iterations = j.at("iterations").get<int>();
      km.seed = j.at("seed").get<std::uint64_t>();
      file.model = std::move(km);
    } else {
      throw ModelFormatError("unknown model kind '" + kind + "'");
    }
    file.meta = model_detail::meta_from_json(j.at("metadata"));
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("malformed model payload: ") + e.what());
  }
  return file;
}

}  // namespace urbanflow::ml
