#pragma once

#include "modrec/types.hpp"

#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

namespace modrec {

struct IterationRecord {
  int iteration = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  /// ||Phi z - u||_2 (ADMM only)
  double primal_residual = std::numeric_limits<double>::quiet_NaN();
  /// rho ||Phi^T (u_new - u_old)||_2 (ADMM only)
  double dual_residual = std::numeric_limits<double>::quiet_NaN();
};

/// Keeps the most recent `capacity` entries.
template <typename T>
class BoundedHistory {
 public:
  explicit BoundedHistory(std::size_t capacity = 4096) : capacity_(capacity) {}

  void push(T value) {
    if (capacity_ == 0) return;
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(value));
  }

  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  [[nodiscard]] bool empty() const { return items_.empty(); }
  [[nodiscard]] const T& back() const { return items_.back(); }
  [[nodiscard]] std::vector<T> to_vector() const { return {items_.begin(), items_.end()}; }

 private:
  std::size_t capacity_;
  std::deque<T> items_;
};

struct ReconResult {
  /// Final residual estimate (on the 2 lambda grid when rounding is enabled).
  RealVector residual;
  /// What the optimizer returned before rounding: z for FSR, the difference
  /// estimate for the LASSO baseline.
  RealVector solver_output;
  /// f_est = f_lambda - residual
  RealVector signal_estimate;
  std::vector<IterationRecord> diagnostics;
  int iterations_run = 0;
  double elapsed_ms = 0.0;
};

}  // namespace modrec
