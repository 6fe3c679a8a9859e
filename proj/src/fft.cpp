#include "gptw/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace gptw {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// Planning is not thread-safe in FFTW; execution on new arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plans] : plans_) {
      fftw_destroy_plan(plans.forward);
      fftw_destroy_plan(plans.backward);
    }
  }

  const PlanPair& get(const std::vector<int>& sizes) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(sizes);
    if (it != plans_.end()) return it->second;

    Eigen::Index n = 1;
    for (int m : sizes) n *= m;
    Eigen::VectorXcd a(n), b(n);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair plans;
    plans.forward = fftw_plan_dft(static_cast<int>(sizes.size()), sizes.data(), in, out,
                                  FFTW_FORWARD, flags);
    plans.backward = fftw_plan_dft(static_cast<int>(sizes.size()), sizes.data(), in, out,
                                   FFTW_BACKWARD, flags);
    return plans_.emplace(sizes, plans).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::vector<int>, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(fftw_plan plan, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  if (in.data() == out.data()) {
    Eigen::VectorXcd copy = in;
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(copy.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return;
  }
  // FFTW does not modify the input of an out-of-place complex transform.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void fft_forward(const TorusGrid& grid, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  out.resize(in.size());
  execute(cache().get(grid.sizes()).forward, in, out);
  out /= static_cast<double>(grid.node_count());
}

void fft_inverse(const TorusGrid& grid, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  out.resize(in.size());
  execute(cache().get(grid.sizes()).backward, in, out);
}

}  // namespace gptw
