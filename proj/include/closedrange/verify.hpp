#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace closedrange::verify {

struct Check {
  std::string name;
  double value = 0.0;      // measured quantity (max residual, disagreement count, ...)
  double threshold = 0.0;
  bool pass = false;
};

struct TagResult {
  std::string tag;
  std::vector<Check> checks;
  bool pass = true;
};

struct Summary {
  std::vector<TagResult> tags;
  bool pass = true;

  nlohmann::json to_json() const;
};

/// geometry, symbols, counting, dirichlet, changevar, carleson.
const std::vector<std::string>& known_tags();

/// Runs the invariant checks of every selected tag ("all" selects every
/// tag). Deterministic for a fixed seed. Throws ValidationError on an
/// unknown tag.
Summary verify_suite(const std::vector<std::string>& tags, std::uint64_t seed = 42);

}  // namespace closedrange::verify
