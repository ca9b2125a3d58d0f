#pragma once

#include <cstdint>
#include <vector>

#include "chordseed/corpus/vocab.hpp"

namespace chordseed::corpus {

struct DatasetSplit {
  std::vector<Sequence> train;
  std::vector<Sequence> validation;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
};

/// Seeded shuffle, then the first round(fraction * n) sequences go to validation.
/// Keeps at least one training sequence.
DatasetSplit make_split(std::vector<Sequence> sequences, double validation_fraction,
                        std::uint64_t seed);

}  // namespace chordseed::corpus
