#pragma once

#include <cstddef>
#include <span>

namespace klab::mc {

// Monte Carlo mean with a batch-means error bar.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  double tau = 0.5;  // integrated autocorrelation time implied by the batching

  // Upper confidence bound mean + z * std_error.
  double upper(double z = 2.0) const { return mean + z * std_error; }
  double lower(double z = 2.0) const { return mean - z * std_error; }
};

// Batch-means estimate over a sample sequence; uses min(batches, n) batches of
// equal size, dropping the remainder from the error bar but not from the mean.
Estimate batch_means(std::span<const double> samples, std::size_t batches = 16);

}  // namespace klab::mc
