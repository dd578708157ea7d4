#include "posdecomp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <new>
#include <tuple>

namespace posdecomp {

void FftBuffer::Free::operator()(std::complex<double>* p) const noexcept {
  fftw_free(reinterpret_cast<fftw_complex*>(p));
}

FftBuffer::FftBuffer(std::size_t n) : n_(n) {
  auto* raw = fftw_alloc_complex(n == 0 ? 1 : n);
  if (!raw) throw std::bad_alloc();
  data_.reset(reinterpret_cast<std::complex<double>*>(raw));
  for (std::size_t i = 0; i < n; ++i) data_[i] = 0.0;
}

namespace {

using PlanKey = std::tuple<int, int, int, int, int>;

class PlanCache {
public:
  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

  fftw_plan get(int ndim, const Index3& shape, int sign) {
    const PlanKey key{ndim, shape[0], shape[1], shape[2], sign};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t n = 1;
    for (int a = 0; a < ndim; ++a) n *= static_cast<std::size_t>(shape[a]);
    // Planning never touches the data with FFTW_ESTIMATE, but it needs aligned storage.
    FftBuffer scratch(n);
    auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
    int dims[3] = {shape[0], shape[1], shape[2]};
    fftw_plan plan = fftw_plan_dft(ndim, dims, data, data, sign, FFTW_ESTIMATE);
    if (!plan) throw std::bad_alloc();
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(FftBuffer& buf, int ndim, const Index3& shape, int sign) {
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(cache().get(ndim, shape, sign), data, data);
}

}  // namespace

void fft_forward(FftBuffer& buf, int ndim, const Index3& shape) { run(buf, ndim, shape, FFTW_FORWARD); }

void fft_backward(FftBuffer& buf, int ndim, const Index3& shape) { run(buf, ndim, shape, FFTW_BACKWARD); }

int fft_friendly_size(int n) noexcept {
  if (n <= 1) return 1;
  for (int c = n;; ++c) {
    int r = c;
    for (int f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return c;
  }
}

}  // namespace posdecomp
