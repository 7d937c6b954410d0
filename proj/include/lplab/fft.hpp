#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "numeric.hpp"

namespace lplab::fft {

using cplx = std::complex<double>;

// Iterative radix-2 plan for one power-of-two length.
class Plan {
 public:
  explicit Plan(std::size_t n) : n_(n), twiddle_(n / 2), rev_(n) {
    for (std::size_t k = 0; k < n / 2; ++k) {
      double a = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
      twiddle_[k] = cplx(std::cos(a), std::sin(a));
    }
    int bits = ilog2(static_cast<std::int64_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      rev_[i] = r;
    }
  }

  std::size_t size() const { return n_; }

  // Unnormalized; sign -1 gives exp(-2 pi i jk/n).
  void run(cplx* a, int sign) const {
    for (std::size_t i = 0; i < n_; ++i)
      if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      std::size_t half = len / 2, step = n_ / len;
      for (std::size_t i = 0; i < n_; i += len) {
        for (std::size_t k = 0; k < half; ++k) {
          cplx w = twiddle_[k * step];
          if (sign > 0) w = std::conj(w);
          cplx u = a[i + k], v = a[i + k + half] * w;
          a[i + k] = u + v;
          a[i + k + half] = u - v;
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<cplx> twiddle_;
  std::vector<std::size_t> rev_;
};

inline const Plan& plan_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plan>(n);
  return *slot;
}

// In-place transform of an n^dim array stored row-major.
inline void transform(std::vector<cplx>& data, int dim, std::size_t n, int sign) {
  const Plan& plan = plan_for(n);
  std::vector<cplx> line(n);
  std::size_t total = data.size();
  for (int axis = 0; axis < dim; ++axis) {
    std::size_t stride = 1;
    for (int a = axis + 1; a < dim; ++a) stride *= n;
    std::size_t block = stride * n;
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t i = 0; i < n; ++i) line[i] = data[base + off + i * stride];
        plan.run(line.data(), sign);
        for (std::size_t i = 0; i < n; ++i) data[base + off + i * stride] = line[i];
      }
    }
  }
}

}  // namespace lplab::fft
