#pragma once

// Lower-triangular Toeplitz products y_k = sum_{l<=k} c_{k-l} x_l.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fracbound {

/// Direct O(N^2) evaluation.
void lower_toeplitz_apply_naive(std::span<const double> c, std::span<const double> x,
                                std::span<double> y);

/// O(N log N) evaluation through a circulant embedding of size L >= 2N (a power of two).
/// The spectrum of c is computed once; apply() is safe to call concurrently.
class LowerToeplitzFft {
 public:
  explicit LowerToeplitzFft(std::span<const double> c);
  ~LowerToeplitzFft();
  LowerToeplitzFft(const LowerToeplitzFft&) = delete;
  LowerToeplitzFft& operator=(const LowerToeplitzFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t embedding_size() const { return l_; }
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  struct Plans;
  std::size_t n_;
  std::size_t l_;
  std::vector<double> spectrum_;  // interleaved re/im, l_/2 + 1 entries
  std::unique_ptr<Plans> plans_;
};

}  // namespace fracbound
