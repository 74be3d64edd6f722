// Compares the serial reference kernels against the OpenMP variants and
// checks that both produce identical results.
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "revpref/fields.hpp"
#include "revpref/rationality.hpp"
#include "revpref/utility.hpp"

using namespace revpref;

namespace {

using clock_type = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& fn) {
  const auto t0 = clock_type::now();
  fn();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const std::string& name, double serial_ms, double parallel_ms,
         bool equal) {
  std::printf("%-28s %10.1f ms %10.1f ms   %5.2fx   %s\n", name.c_str(),
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              equal ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t scale = argc > 1 ? std::stoul(argv[1]) : 1;
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run serially\n");
#endif
  std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "parallel",
              "speedup");

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> coord(0.1, 10.0);

  {
    const std::size_t n = 1200 * scale;
    std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> q(8), p(8);
      for (double& c : q) c = coord(rng);
      for (double& c : p) c = coord(rng);
      pairs.emplace_back(std::move(q), std::move(p));
    }
    const Dataset data = Dataset::from_pairs(pairs);
    CrossLogMatrix serial, parallel;
    const double ts = time_ms([&] {
      serial = CrossLogMatrix::build_serial(data, Kernel::standard_inner());
    });
    const double tp = time_ms([&] {
      parallel = CrossLogMatrix::build_parallel(data, Kernel::standard_inner());
    });
    row("cross_log_matrix n=" + std::to_string(n), ts, tp,
        serial.a == parallel.a);

    const std::size_t fw_n = 700 * scale;
    CrossLogMatrix small;
    small.n = fw_n;
    small.a.assign(fw_n * fw_n, 0.0);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    for (std::size_t i = 0; i < fw_n; ++i) {
      for (std::size_t j = 0; j < fw_n; ++j) {
        if (i != j) small.at(i, j) = w(rng);
      }
    }
    Closure cs, cp;
    const double fs = time_ms([&] { cs = floyd_warshall_serial(small); });
    const double fp = time_ms([&] { cp = floyd_warshall_parallel(small); });
    row("floyd_warshall n=" + std::to_string(fw_n), fs, fp,
        cs.dist == cp.dist && cs.next == cp.next);
  }

  {
    const Dataset data = gen_cobb_douglas(24, 6, {0.1, 0.1, 0.2, 0.2, 0.2, 0.2},
                                          {0.5, 2.0}, {1.0, 10.0}, 7);
    const HomogeneousUtility model = HomogeneousUtility::build(data);
    const std::size_t samples = 20000 * scale;
    VerificationReport rs, rp;
    const double vs = time_ms(
        [&] { rs = verify_rationalization_serial(model, samples, 1e-9, 3); });
    const double vp = time_ms([&] {
      rp = verify_rationalization_parallel(model, samples, 1e-9, 3);
    });
    row("verify " + std::to_string(samples) + " samples/obs", vs, vp,
        rs.max_violation == rp.max_violation &&
            rs.worst_observation == rp.worst_observation);
  }

  {
    const SmoothDemandField field =
        SmoothDemandField::cobb_douglas({0.25, 0.25, 0.5});
    const ClosedPath loop =
        ClosedPath::ellipse({2.0, 2.0, 2.0}, 0, 1, 0.7, 0.4);
    const std::size_t n_steps = 3000000 * scale;
    double ss = 0.0, sp = 0.0;
    const double ps = time_ms([&] {
      ss = discrete_path_sum_serial(loop, field, log_inner_cost(), n_steps);
    });
    const double pp = time_ms([&] {
      sp = discrete_path_sum_parallel(loop, field, log_inner_cost(), n_steps);
    });
    row("path_sum N=" + std::to_string(n_steps), ps, pp, ss == sp);
  }
  return 0;
}
