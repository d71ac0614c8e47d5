// Serial reference kernel against the OpenMP kernel on the same lattice prefix.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>

#include <CLI11.hpp>

#include "thetasing/theta_core.hpp"
#include "thetasing/types.hpp"

using namespace thetasing;

namespace {

CMatrix random_tau(int g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Eigen::MatrixXd re(g, g), l(g, g);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      re(i, j) = u(rng);
      l(i, j) = 0.4 * u(rng);
    }
  }
  re = 0.5 * (re + re.transpose()).eval();
  CMatrix tau(g, g);
  tau.real() = re;
  tau.imag() = l * l.transpose() + 0.8 * Eigen::MatrixXd::Identity(g, g);
  return tau;
}

template <class F>
double seconds(int reps, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"theta kernel benchmark"};
  int reps = 20;
  int threads = 0;
  double radius = 9.0;
  std::uint64_t seed = 1;
  app.add_option("--reps", reps, "repetitions per case")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
  app.add_option("--radius", radius, "lattice ball radius")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for tau and z");
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::printf("threads=%d radius=%g reps=%d seed=%llu\n", omp_get_max_threads(), radius, reps,
              static_cast<unsigned long long>(seed));
  std::printf("%3s %5s %8s %12s %12s %8s %10s\n", "g", "order", "points", "serial_ms", "parallel_ms", "speedup",
              "max_diff");
  for (int g = 1; g <= 3; ++g) {
    const ThetaContext ctx(random_tau(g, rng), 1e-12);
    const LatticeTable table = build_lattice_table(g, radius);
    CVector z(g);
    for (int i = 0; i < g; ++i) z(i) = cplx(u(rng), u(rng));
    const Eigen::VectorXi shift = Eigen::VectorXi::Zero(g);
    for (int order : {0, 2, 4}) {
      Jet js, jp;
      const double ts = seconds(reps, [&] { js = theta_jet_serial(ctx, table, table.size(), z, shift, order); });
      const double tp = seconds(reps, [&] { jp = theta_jet_parallel(ctx, table, table.size(), z, shift, order); });
      double diff = 0.0;
      for (std::size_t k = 0; k < js.values().size(); ++k) diff = std::max(diff, std::abs(js.values()[k] - jp.values()[k]));
      std::printf("%3d %5d %8zu %12.3f %12.3f %8.2f %10.2e\n", g, order, table.size(), 1e3 * ts / reps,
                  1e3 * tp / reps, ts / tp, diff);
    }
  }
  return 0;
}
