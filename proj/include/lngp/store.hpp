#pragma once

#include <string>
#include <vector>

#include "lngp/model.hpp"

namespace lngp {

// Retained posterior draws plus chain metadata. One entry per retained
// iteration across all vectors.
struct SampleStore {
  int K = 0;
  int p = 0;
  int T = 0;      // field length (number of increments)
  int n_obs = 0;  // observed-increment count, the likelihood sample size

  std::vector<MixtureParams> mixture;
  std::vector<GPParams> gp;
  std::vector<Matrix> pi;            // T x K per draw
  std::vector<std::vector<int>> z;   // length-T labels per draw
  std::vector<double> loglik;        // complete-data log-likelihood
  std::vector<double> accept_trace;  // running MH acceptance rate
  double final_accept_rate = 0.0;

  std::size_t size() const { return loglik.size(); }
  int map_index() const;  // argmax of loglik; -1 when empty

  // Flat row layout: xi.k.1 xi.k.2 per component, Omega.k.11 .12 .22 per
  // component, beta.j, phi.k, Sigma.kl (upper triangle, row-major), loglik.
  std::vector<std::string> column_names() const;
  std::vector<double> row(std::size_t i) const;

  // Full-precision CSV of all retained draws in the layout above.
  void write_samples_csv(const std::string& path) const;
};

}  // namespace lngp
