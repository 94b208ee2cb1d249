#pragma once

#include <string>

#include <json.hpp>

#include "error.hpp"
#include "labeling.hpp"

namespace lambdatree {

inline std::string labeling_to_json(const Labeling& f, int lambda) {
  nlohmann::json j;
  j["lambda"] = lambda;
  j["labels"] = f.labels;
  return j.dump();
}

/// Parses {"lambda": int, "labels": [int, ...]}; throws ParseError on bad shape.
inline Labeling labeling_from_json(const std::string& text, int* lambda_out = nullptr) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed labeling JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("labels") || !j["labels"].is_array())
    throw ParseError("labeling JSON needs a \"labels\" array");
  Labeling f;
  for (const auto& x : j["labels"]) {
    if (!x.is_number_integer()) throw ParseError("labels must be integers");
    f.labels.push_back(x.get<int>());
  }
  if (lambda_out) {
    if (j.contains("lambda") && j["lambda"].is_number_integer())
      *lambda_out = j["lambda"].get<int>();
    else
      *lambda_out = f.span();
  }
  return f;
}

}  // namespace lambdatree
