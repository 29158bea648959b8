#pragma once

#include <cstdint>
#include <string>

#include "evonet/data.hpp"

namespace evonet {

// Where a dataset comes from: a builtin name ("xor", "parity:N") or a CSV
// path with declared input/output column counts.
struct DatasetSpec {
    std::string source = "xor";
    int csv_inputs = 0;
    int csv_outputs = 0;
    double split_fraction = 0.8;  // share of patterns in the training split
    bool whiten_inputs = false;
};

Dataset make_xor();
Dataset make_parity(int bits);

// Strict numeric CSV, no header: the first `inputs` columns feed the network,
// the next `outputs` columns are targets. Any non-numeric cell is a parse
// error naming row and column.
Dataset load_csv(const std::string& path, int inputs, int outputs);

// Loads per the spec and applies the deterministic split: indices shuffled by
// a stream derived from the run seed, the first floor(fraction * n) of them
// train, the rest validate (an empty validation split falls back to train at
// view time).
Dataset load_dataset(const DatasetSpec& spec, std::uint64_t seed);

}  // namespace evonet
