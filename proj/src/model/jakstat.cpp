#include "psmc/model/jakstat.hpp"

#include <string>

#include "psmc/error.hpp"

namespace psmc::jakstat {

ParameterSpace parameter_space() {
  return ParameterSpace({"k1", "k2", "k3", "k4"},
                        {{0.0, 5.0}, {0.0, 30.0}, {0.0, 1.0}, {0.0, 5.0}});
}

std::vector<double> proposal_sigmas() { return {0.02, 0.5, 0.01, 0.02}; }

std::vector<std::string> state_names(int delay_stages) {
  std::vector<std::string> names{"STAT", "STATp", "STATpd"};
  for (int j = 1; j <= delay_stages; ++j) names.push_back("X" + std::to_string(j));
  names.push_back("STATn");
  return names;
}

OdeSystem model(int delay_stages, InputSignal epo, const Options& options) {
  if (delay_stages < 1) throw ValidationError("JAK-STAT model needs at least one delay stage");
  const std::size_t K = static_cast<std::size_t>(delay_stages);
  const std::size_t n = K + 4;
  constexpr std::size_t kStat = 0, kStatP = 1, kStatPd = 2, kX1 = 3;
  const std::size_t kXK = kX1 + K - 1;
  const std::size_t kStatN = kX1 + K;

  auto field = [=](std::span<const double> x, std::span<const double> u,
                   std::span<const double> k, double, std::span<double> dx) {
    const double epo_level = u[0];
    const double phosphorylation = k[0] * x[kStat] * epo_level;
    const double dimerization = k[1] * x[kStatP] * x[kStatP];
    const double nuclear_import = k[2] * x[kStatPd];
    const double nuclear_export = k[3] * x[kXK];
    dx[kStat] = -phosphorylation + 2.0 * nuclear_export;
    dx[kStatP] = phosphorylation - dimerization;
    dx[kStatPd] = -nuclear_import + 0.5 * dimerization;
    dx[kX1] = nuclear_import - k[3] * x[kX1];
    for (std::size_t j = kX1 + 1; j <= kXK; ++j) dx[j] = k[3] * x[j - 1] - k[3] * x[j];
    dx[kStatN] = nuclear_import - nuclear_export;
  };

  std::vector<double> initial(n, 0.0);
  initial[kStat] = options.initial_stat;

  std::vector<ObservationForm> observables{
      {"pSTAT_total", {{kStatP, 1.0}, {kStatPd, 2.0}}, options.phospho_scale},
      {"STAT_cytoplasm", {{kStat, 1.0}, {kStatP, 1.0}, {kStatPd, 2.0}},
       options.cytoplasmic_scale},
  };

  return OdeSystem(state_names(delay_stages), std::move(initial), {"Epo"}, {std::move(epo)},
                   std::move(field), std::move(observables), parameter_space());
}

double conserved_total(std::span<const double> state, int delay_stages) {
  double total = state[0] + state[1] + 2.0 * state[2];
  for (int j = 0; j < delay_stages; ++j) total += 2.0 * state[3 + j];
  return total;
}

}  // namespace psmc::jakstat
