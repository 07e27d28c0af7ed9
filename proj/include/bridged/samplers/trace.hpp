#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "bridged/error.hpp"
#include "bridged/numerics/linalg.hpp"

namespace bridged {

/// Post-burn-in output of one chain. Samples are on the native scale.
struct Trace {
  std::vector<std::string> names;
  MatrixXd samples;                     // kept × d
  std::vector<std::uint8_t> accepted;   // per kept iteration (λ move)
  std::vector<int> inner_iterations;    // per kept iteration, proposal solve
  std::vector<std::string> aux_names;   // e.g. imputed labels, grid indices
  MatrixXd aux;                         // kept × aux_names.size()

  double acceptance = 0.0;              // over all post-adaptation iterations
  int adaptation_window = 0;
  int solver_failures = 0;              // proposals rejected because the inner solve failed
  VectorXd step;                        // final (frozen) proposal scale

  // Wall clock; never part of the deterministic outputs.
  double seconds = 0.0;
  int block_size = 100;
  std::vector<double> block_seconds;

  Index kept() const noexcept { return samples.rows(); }
  Index dim() const noexcept { return samples.cols(); }

  Index index_of(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j)
      if (names[j] == name) return static_cast<Index>(j);
    throw InvalidInput("trace has no parameter '" + name + "'");
  }
  VectorXd column(const std::string& name) const { return samples.col(index_of(name)); }
};

namespace detail {

/// Accumulates wall-clock per block of iterations.
class BlockTimer {
 public:
  explicit BlockTimer(Trace& t) : t_(t), start_(clock::now()), block_start_(start_) {}

  void tick(int iteration) {
    if ((iteration + 1) % t_.block_size != 0) return;
    const auto now = clock::now();
    t_.block_seconds.push_back(std::chrono::duration<double>(now - block_start_).count());
    block_start_ = now;
  }

  void finish() { t_.seconds = std::chrono::duration<double>(clock::now() - start_).count(); }

 private:
  using clock = std::chrono::steady_clock;
  Trace& t_;
  clock::time_point start_, block_start_;
};

inline void check_iterations(int iters, int burn_in) {
  if (iters < 1 || burn_in < 0 || burn_in >= iters) throw InvalidInput("sampler: need 0 ≤ burn_in < iters");
}

}  // namespace detail

}  // namespace bridged
