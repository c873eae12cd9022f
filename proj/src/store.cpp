#include "lngp/store.hpp"

#include "lngp/csv.hpp"

namespace lngp {

int SampleStore::map_index() const {
  if (loglik.empty()) return -1;
  int best = 0;
  for (std::size_t i = 1; i < loglik.size(); ++i)
    if (loglik[i] > loglik[best]) best = static_cast<int>(i);
  return best;
}

std::vector<std::string> SampleStore::column_names() const {
  std::vector<std::string> names;
  for (int k = 1; k <= K; ++k) {
    names.push_back("xi." + std::to_string(k) + ".1");
    names.push_back("xi." + std::to_string(k) + ".2");
  }
  for (int k = 1; k <= K; ++k) {
    names.push_back("Omega." + std::to_string(k) + ".11");
    names.push_back("Omega." + std::to_string(k) + ".12");
    names.push_back("Omega." + std::to_string(k) + ".22");
  }
  for (int j = 1; j <= p * (K - 1); ++j)
    names.push_back("beta." + std::to_string(j));
  for (int k = 1; k <= K; ++k) names.push_back("phi." + std::to_string(k));
  for (int k = 1; k <= K; ++k)
    for (int l = k; l <= K; ++l)
      names.push_back("Sigma." + std::to_string(k) + std::to_string(l));
  names.push_back("loglik");
  return names;
}

std::vector<double> SampleStore::row(std::size_t i) const {
  if (i >= size()) throw Error("sample store row out of range");
  std::vector<double> out;
  const MixtureParams& mx = mixture[i];
  const GPParams& g = gp[i];
  for (int k = 0; k < K; ++k) {
    out.push_back(mx.xi[k][0]);
    out.push_back(mx.xi[k][1]);
  }
  for (int k = 0; k < K; ++k) {
    out.push_back(mx.omega_cov[k](0, 0));
    out.push_back(mx.omega_cov[k](0, 1));
    out.push_back(mx.omega_cov[k](1, 1));
  }
  for (int j = 0; j < g.beta.size(); ++j) out.push_back(g.beta[j]);
  for (int k = 0; k < K; ++k) out.push_back(g.decays[k]);
  for (int k = 0; k < K; ++k)
    for (int l = k; l < K; ++l) out.push_back(g.sigma_star(k, l));
  out.push_back(loglik[i]);
  return out;
}

void SampleStore::write_samples_csv(const std::string& path) const {
  CsvWriter writer(column_names());
  for (std::size_t i = 0; i < size(); ++i) writer.add_row(row(i));
  writer.write(path);
}

}  // namespace lngp
