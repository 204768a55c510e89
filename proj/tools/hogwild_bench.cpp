// Compares the lock-free parallel SGD kernel against the serial reference
// implementation on the bundled sparse logistic regression generator.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "gradbench/parallel.hpp"
#include "gradbench/problems.hpp"

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gradbench;

  std::size_t n = 10000;
  std::size_t d = 1000;
  double density = 0.01;
  int epochs = 5;
  std::uint64_t seed = 42;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    const std::string val = argv[i + 1];
    if (key == "--n") n = std::stoull(val);
    else if (key == "--d") d = std::stoull(val);
    else if (key == "--density") density = std::stod(val);
    else if (key == "--epochs") epochs = std::stoi(val);
    else if (key == "--seed") seed = std::stoull(val);
    else {
      std::fprintf(stderr, "unknown option %s\n", key.c_str());
      return 2;
    }
  }

  std::printf("dataset: n=%zu d=%zu density=%.4f epochs=%d seed=%llu\n", n, d,
              density, epochs, static_cast<unsigned long long>(seed));

  const SparseLogReg problem = SparseLogReg::make(n, d, density, seed);
  const double eta = 0.1;

  double t0 = now_seconds();
  const HogwildResult serial = sequential_baseline(problem, eta, epochs, seed);
  const double serial_time = now_seconds() - t0;
  std::printf("%-12s time=%8.3fs final_loss=%.6f\n", "serial", serial_time,
              serial.final_loss);

  for (int workers : {1, 2, 4}) {
    HogwildConfig cfg;
    cfg.workers = workers;
    cfg.eta = eta;
    cfg.epochs = epochs;
    cfg.seed = seed;
    t0 = now_seconds();
    const HogwildResult r = hogwild_train(problem, cfg);
    const double elapsed = now_seconds() - t0;
    std::printf("%-12s time=%8.3fs final_loss=%.6f speedup=%.2fx\n",
                ("hogwild(" + std::to_string(workers) + ")").c_str(), elapsed,
                r.final_loss, serial_time / elapsed);
  }
  return 0;
}
