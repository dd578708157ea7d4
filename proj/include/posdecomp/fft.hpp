#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

#include "posdecomp/grid.hpp"

namespace posdecomp {

/// Complex buffer with the alignment FFTW plans expect.
class FftBuffer {
public:
  explicit FftBuffer(std::size_t n);
  FftBuffer(FftBuffer&&) noexcept = default;
  FftBuffer& operator=(FftBuffer&&) noexcept = default;

  std::complex<double>* data() noexcept { return data_.get(); }
  const std::complex<double>* data() const noexcept { return data_.get(); }
  std::size_t size() const noexcept { return n_; }
  std::complex<double>& operator[](std::size_t i) noexcept { return data_[i]; }
  const std::complex<double>& operator[](std::size_t i) const noexcept { return data_[i]; }

private:
  struct Free {
    void operator()(std::complex<double>* p) const noexcept;
  };
  std::unique_ptr<std::complex<double>[], Free> data_;
  std::size_t n_ = 0;
};

/// In-place unnormalized complex DFT over an N-d row-major array. Plans are cached per
/// (shape, direction); plan creation is serialized, execution is reentrant.
void fft_forward(FftBuffer& buf, int ndim, const Index3& shape);
void fft_backward(FftBuffer& buf, int ndim, const Index3& shape);

/// Smallest integer >= n of the form 2^a 3^b 5^c 7^d.
int fft_friendly_size(int n) noexcept;

}  // namespace posdecomp
