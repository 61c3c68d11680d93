#include "fibereq/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>

namespace fibereq {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~PlanPair() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;

  // Plans are made on aligned scratch; misaligned inputs are staged through
  // an aligned copy so every call runs the same kernels.
  CVec scratch(n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE;
  auto pair = std::make_unique<PlanPair>();
  pair->forward = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_FORWARD, flags);
  pair->backward = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_BACKWARD, flags);
  auto& ref = *pair;
  cache.emplace(n, std::move(pair));
  return ref;
}

void execute(fftw_plan plan, std::span<cplx> data) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  if (reinterpret_cast<std::uintptr_t>(p) % 64 == 0) {
    fftw_execute_dft(plan, p, p);
    return;
  }
  CVec staged(data.begin(), data.end());
  auto* q = reinterpret_cast<fftw_complex*>(staged.data());
  fftw_execute_dft(plan, q, q);
  std::copy(staged.begin(), staged.end(), data.begin());
}

}  // namespace

void fft_forward(std::span<cplx> data) {
  if (data.empty()) return;
  execute(plans_for(data.size()).forward, data);
}

void fft_inverse(std::span<cplx> data) {
  if (data.empty()) return;
  execute(plans_for(data.size()).backward, data);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

std::vector<double> fft_frequencies(std::size_t n, double sample_rate) {
  std::vector<double> f(n);
  const double df = sample_rate / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<double>(k);
    f[k] = (2 * k < n) ? kk * df : (kk - static_cast<double>(n)) * df;
  }
  return f;
}

}  // namespace fibereq
