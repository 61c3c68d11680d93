#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <span>
#include <vector>

namespace fibereq {

using cplx = std::complex<double>;

// 64-byte aligned storage so transforms can use the widest SIMD kernels.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};
  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}
  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) { ::operator delete(p, kAlign); }
  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const {
    return true;
  }
};

using CVec = std::vector<cplx, AlignedAllocator<cplx>>;

// In-place complex DFTs of arbitrary length. The inverse includes the 1/N
// factor so inverse(forward(x)) == x. Plans are cached per length and
// creation is serialized; execution is reentrant.
void fft_forward(std::span<cplx> data);
void fft_inverse(std::span<cplx> data);

// Frequency of each DFT bin in the same unit as sample_rate, in FFT order
// (0, df, ..., then negative frequencies). The Nyquist bin of an even
// length maps to -sample_rate/2.
std::vector<double> fft_frequencies(std::size_t n, double sample_rate);

}  // namespace fibereq
