// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <string>

#include "moelaw/datastore.hpp"
#include "moelaw/error.hpp"
#include "moelaw/json_io.hpp"

namespace moelaw {

namespace {

bool safe_label(const std::string& label) {
  if (label.empty() || label.size() > 128 || label.front() == '.') return false;
  return std::all_of(label.begin(), label.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' ||
           ch == '_' || ch == '.';
  });
}

}  // namespace

ConstantsRegistry::ConstantsRegistry(std::optional<std::filesystem::path> dir) {
  if (dir) {
    dir_ = *dir;
  } else if (const char* env = std::getenv(kRegistryEnv); env && *env) {
    dir_ = env;
  } else {
    dir_ = "moelaw-registry";
  }
}

RegistryEntry ConstantsRegistry::load(const std::string& label) const {
  if (label == kPaperLabel) {
    return {label, ScalingConstants{}, "published fit (built-in)", true};
  }
  if (!safe_label(label)) throw UnknownLabelError("unknown label '" + label + "'");
  const auto path = dir_ / (label + ".json");
  std::ifstream in(path);
  if (!in) {
    throw UnknownLabelError("unknown label '" + label + "' (no " +
                            path.string() + ")");
  }
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  RegistryEntry entry;
  entry.label = label;
  entry.constants = constants_from_json(doc.at("constants"));
  if (doc.contains("provenance") && doc.at("provenance").is_string()) {
    entry.provenance = doc.at("provenance").get<std::string>();
  }
  return entry;
}

void ConstantsRegistry::save(const std::string& label,
                             const ScalingConstants& constants,
                             const std::string& provenance) const {
  if (label == kPaperLabel) {
    throw DomainError(std::string("'") + kPaperLabel +
                      "' is built in and cannot be overwritten");
  }
  if (!safe_label(label)) {
    throw DomainError("label '" + label +
                      "' may only use letters, digits, '-', '_' and '.'");
  }
  std::filesystem::create_directories(dir_);
  const auto path = dir_ / (label + ".json");
  const auto tmp = dir_ / (label + ".json.tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw SchemaError("cannot write " + tmp.string());
    const Json doc = {{"label", label},
                      {"provenance", provenance},
                      {"constants", to_json(constants)}};
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::string> ConstantsRegistry::labels() const {
  std::vector<std::string> out;
  std::error_code ec;
  if (std::filesystem::is_directory(dir_, ec)) {
    for (const auto& e : std::filesystem::directory_iterator(dir_)) {
      if (e.path().extension() == ".json") {
        out.push_back(e.path().stem().string());
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.insert(out.begin(), kPaperLabel);
  return out;
}

}  // namespace moelaw
