// Recover a sparse-spectrum signal on a random sensor graph from half of its
// vertex values and compare against a bandlimited reconstruction.

#include <cstdio>

#include "gsr/gsr.hpp"

int main() {
  const std::size_t n = 300;
  const auto graph = gsr::random_geometric_graph(n, 7);
  const auto basis = gsr::gft_basis(graph);
  const auto truth = gsr::make_k_sparse(basis, {30, 11});
  const auto mask = gsr::bernoulli_mask(n, 0.5, 13);
  const auto observed = gsr::subsample(truth, mask);

  gsr::ImatgiConfig config;
  config.max_iters = 60;
  const auto result = gsr::imatgi_reconstruct(observed, mask, basis, config, &truth);
  const auto bandlimited = gsr::ilsr_reconstruct(observed, mask, basis, {30, 500, 1e-9});

  std::printf("kept %zu of %zu vertices\n", mask.count(), n);
  for (const auto& r : result.trace.records)
    std::printf("k=%2zu  t=%.4f  support=%3zu  mse=%.3e\n", r.k, r.threshold, r.support_size, *r.mse);
  std::printf("IMATGI SNR %.2f dB, ILSR (30 lowest frequencies) SNR %.2f dB\n", gsr::snr(truth, result.signal).db,
              gsr::snr(truth, bandlimited.signal).db);
}
