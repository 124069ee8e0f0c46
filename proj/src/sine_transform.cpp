#include "gff/sine_transform.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

namespace gff {

namespace {

// The FFTW planner is not re-entrant; execution of a finished plan is.
std::mutex planner_mutex;

struct FftwFree {
  void operator()(double* p) const { fftw_free(p); }
};

} // namespace

void orthonormal_dst2(std::span<double> data, int rows, int cols) {
  if (rows <= 0 || cols <= 0 || data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw std::invalid_argument("orthonormal_dst2: shape mismatch");
  std::unique_ptr<double, FftwFree> buf(fftw_alloc_real(data.size()));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex);
    plan = fftw_plan_r2r_2d(rows, cols, buf.get(), buf.get(), FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  }
  std::copy(data.begin(), data.end(), buf.get());
  fftw_execute(plan);
  // RODFT00 computes 2 sum_j x_j sin(pi (j+1)(k+1)/(n+1)) per axis.
  const double scale = 0.5 * std::sqrt(2.0 / (rows + 1)) * 0.5 * std::sqrt(2.0 / (cols + 1));
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = buf.get()[i] * scale;
  {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
}

double walk_eigenvalue(int k, int l, int rows, int cols) {
  return 0.5 * (std::cos(std::numbers::pi * k / (rows + 1)) + std::cos(std::numbers::pi * l / (cols + 1)));
}

} // namespace gff
