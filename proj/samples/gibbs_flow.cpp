// Draw one sample of the truncated Gibbs measure, run the truncated flow and
// print the conserved quantities together with the first few coefficients.
//
//   gibbs_flow [N] [k] [t] [seed]

#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "discnls/gibbs.hpp"
#include "discnls/truncated_flow.hpp"

int main(int argc, char** argv) {
  using namespace discnls;
  const double N = argc > 1 ? std::atof(argv[1]) : 32.0;
  const int k = argc > 2 ? std::atoi(argv[2]) : 1;
  const double t = argc > 3 ? std::atof(argv[3]) : 1.0;
  const std::uint64_t seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 1;

  try {
    const int modes = modes_below(N);
    const SpectralBasis basis = build_basis(modes, 2 * k + 2);
    const GibbsSample draw = sample_gibbs(basis, N, k, seed);
    std::cout << "N = " << N << " (" << modes << " modes), k = " << k << ", accepted after " << draw.attempts
              << " attempts\n";

    FlowConfig cfg;
    cfg.k = k;
    cfg.N = N;
    const Trajectory tr = evolve(basis, draw.field, t, cfg, t / 10.0);
    std::cout << std::setprecision(10);
    std::cout << "time            mass            hamiltonian     |u_1|^2\n";
    for (std::size_t i = 0; i < tr.size(); ++i)
      std::cout << std::left << std::setw(16) << tr.times[i] << std::setw(16) << tr.mass[i] << std::setw(16)
                << tr.hamiltonian[i] << std::norm(tr.states[i](1)) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
