#pragma once

#include <memory>

#include "tandem/dispatch.hpp"
#include "tandem/object_space.hpp"

namespace tandem {

// A booted runtime: the five-class helix with its meta side, the core value
// classes in both environments, the Enumerable demo module and the wrapper
// machinery.
struct Runtime {
  ObjectSpace space;
  Interp interp{space};
};

// Objects a fresh bootstrap allocates; laziness anchors count against it.
constexpr std::size_t kBootstrapObjectCount = 32;
constexpr std::size_t kHelixClassCount = 5;

std::unique_ptr<Runtime> bootstrap();

}  // namespace tandem
