#pragma once

#include <stdexcept>
#include <string>

namespace evonet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// vector/matrix shape disagreements
struct DimensionError : Error { using Error::Error; };
// bit strings or serialized genomes that cannot be decomposed
struct DecodeError : Error { using Error::Error; };
// a weight that the codebook cannot represent
struct RepresentationError : Error { using Error::Error; };
// initialization ranges that admit no valid genome
struct InfeasibleRangeError : Error { using Error::Error; };
// enabled connections form a cycle in feedforward scope
struct CyclicGenomeError : Error { using Error::Error; };
// empty or malformed data where patterns are required
struct DataError : Error { using Error::Error; };
// NaN/inf where a finite value is required
struct NumericError : Error { using Error::Error; };
// empty or too-small population
struct PopulationError : Error { using Error::Error; };
// no legal slot/pair left for a structural addition
struct ExhaustedSlotsError : Error { using Error::Error; };
// hidden-neuron capacity reached
struct CapacityError : Error { using Error::Error; };
// operator aimed at a gene/neuron that cannot take it
struct InvalidTargetError : Error { using Error::Error; };
// crossover parents of different fixed lengths
struct IncompatibleParentsError : Error { using Error::Error; };
// parameter outside its stated domain
struct ParamError : Error { using Error::Error; };
// backward pass fed a cache that does not match
struct CacheError : Error { using Error::Error; };
// CSV/JSON input that does not parse
struct ParseError : Error { using Error::Error; };
// experiment configuration that fails validation
struct ConfigError : Error { using Error::Error; };

}  // namespace evonet
