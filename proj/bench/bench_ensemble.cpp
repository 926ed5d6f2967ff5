// Serial reference vs OpenMP ensemble estimator on the same workload.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "sinv/experiments.hpp"

using namespace sinv;

namespace {

template <class F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n_nodes = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1000;
  const std::size_t n_samples = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 200;
  const GraphSpec spec{GraphModel::static_scale_free, n_nodes, 8.0, 2.4};
  const SamplingScheme scheme{Scenario::sc1_uniform, 10, 10};

  RhoEstimate serial, parallel;
  const double t_serial = seconds([&] { serial = estimate_rho_serial(spec, scheme, n_samples, 7); });
  const double t_parallel = seconds([&] { parallel = estimate_rho(spec, scheme, n_samples, 7); });

  std::printf("workload: static scale-free N=%zu, mean degree 8, M=P=10, %zu samples\n", n_nodes, n_samples);
  std::printf("threads:  %d\n", omp_get_max_threads());
  std::printf("serial:   %.3f s  rho=%.4f\n", t_serial, serial.rho);
  std::printf("openmp:   %.3f s  rho=%.4f  speedup %.2fx\n", t_parallel, parallel.rho, t_serial / t_parallel);
  if (serial.invertible != parallel.invertible) {
    std::printf("MISMATCH between serial and parallel estimates\n");
    return 1;
  }
  return 0;
}
