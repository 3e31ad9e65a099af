#pragma once

#include <vector>

#include "sgaug/core_model.hpp"

namespace sgaug {

// Ordered collection of scene graphs sharing one vocabulary.
struct Dataset {
  Vocabulary vocab;
  std::vector<SceneGraph> graphs;

  bool operator==(const Dataset&) const = default;
};

}  // namespace sgaug
