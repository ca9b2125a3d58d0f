#include "chordseed/corpus/split.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace chordseed::corpus {

DatasetSplit make_split(std::vector<Sequence> sequences, double validation_fraction,
                        std::uint64_t seed) {
  if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
    throw std::invalid_argument("validation fraction must lie in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(sequences.begin(), sequences.end(), rng);

  auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(sequences.size())));
  if (!sequences.empty() && n_val >= sequences.size()) n_val = sequences.size() - 1;

  DatasetSplit split;
  split.validation_fraction = validation_fraction;
  split.seed = seed;
  split.validation.assign(sequences.begin(), sequences.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.train.assign(sequences.begin() + static_cast<std::ptrdiff_t>(n_val), sequences.end());
  return split;
}

}  // namespace chordseed::corpus
