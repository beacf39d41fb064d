#pragma once

#include <cstdint>
#include <stdexcept>

#include "crudesched/genome.hpp"
#include "crudesched/instance.hpp"

namespace crudesched {

class GeneratorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GeneratorParams {
  Index tanks = 8;
  Index cdus = 2;
  Index periods = 6;
  Index crudes = 4;
  Index vessels = 2;
  Index residues = 2;
  Index properties = 1;
  Index max_tanks = 2;  // MT_u for every CDU
  Index berths = 1;
  std::uint64_t seed = 1;

  /// Throws GeneratorError when no witness can be planted.
  void validate() const;
};

struct GeneratedInstance {
  Instance instance;
  Schedule witness;  // simulates to CVN = 0 on `instance`
};

/// Plants a witness schedule (each CDU feeds from its own tank group, each
/// vessel unloads on arrival into spare tanks), simulates it on a permissive
/// draft, then sets the bounds around the observed trajectory with random
/// margins. Deterministic in `params.seed`.
GeneratedInstance generate_instance(const GeneratorParams& params);

}  // namespace crudesched
