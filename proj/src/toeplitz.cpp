#include "fracbound/toeplitz.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "fracbound/errors.hpp"

namespace fracbound {

namespace {

// The FFTW planner is not re-entrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwFree {
  void operator()(T* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree<T>>;

FftwBuffer<double> real_buffer(std::size_t n) {
  return FftwBuffer<double>(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}
FftwBuffer<fftw_complex> complex_buffer(std::size_t n) {
  return FftwBuffer<fftw_complex>(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

std::size_t next_pow2(std::size_t n) {
  std::size_t l = 1;
  while (l < n) l <<= 1;
  return l;
}

}  // namespace

void lower_toeplitz_apply_naive(std::span<const double> c, std::span<const double> x,
                                std::span<double> y) {
  const std::size_t n = x.size();
  if (c.size() < n || y.size() != n) throw InvalidArgument("toeplitz size mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    const double* ck = c.data() + k;
    for (std::size_t l = 0; l <= k; ++l) acc += ck[-static_cast<std::ptrdiff_t>(l)] * x[l];
    y[k] = acc;
  }
}

struct LowerToeplitzFft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

LowerToeplitzFft::LowerToeplitzFft(std::span<const double> c)
    : n_(c.size()), l_(next_pow2(std::max<std::size_t>(2 * c.size(), 2))), plans_(std::make_unique<Plans>()) {
  const std::size_t m = l_ / 2 + 1;
  auto in = real_buffer(l_);
  auto out = complex_buffer(m);
  {
    std::lock_guard lock(planner_mutex());
    plans_->forward = fftw_plan_dft_r2c_1d(static_cast<int>(l_), in.get(), out.get(), FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_1d(static_cast<int>(l_), out.get(), in.get(), FFTW_ESTIMATE);
  }
  std::fill(in.get(), in.get() + l_, 0.0);
  std::copy(c.begin(), c.end(), in.get());
  fftw_execute_dft_r2c(plans_->forward, in.get(), out.get());
  spectrum_.resize(2 * m);
  std::memcpy(spectrum_.data(), out.get(), sizeof(fftw_complex) * m);
}

LowerToeplitzFft::~LowerToeplitzFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plans_->forward);
  fftw_destroy_plan(plans_->backward);
}

void LowerToeplitzFft::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw InvalidArgument("toeplitz size mismatch");
  const std::size_t m = l_ / 2 + 1;
  auto buf = real_buffer(l_);
  auto spec = complex_buffer(m);
  std::fill(buf.get(), buf.get() + l_, 0.0);
  std::copy(x.begin(), x.end(), buf.get());
  fftw_execute_dft_r2c(plans_->forward, buf.get(), spec.get());
  for (std::size_t k = 0; k < m; ++k) {
    const double ar = spec[k][0], ai = spec[k][1];
    const double br = spectrum_[2 * k], bi = spectrum_[2 * k + 1];
    spec[k][0] = ar * br - ai * bi;
    spec[k][1] = ar * bi + ai * br;
  }
  fftw_execute_dft_c2r(plans_->backward, spec.get(), buf.get());
  const double scale = 1.0 / static_cast<double>(l_);
  for (std::size_t k = 0; k < n_; ++k) y[k] = buf[k] * scale;
}

}  // namespace fracbound
