#include "kerrlab/parallel.hpp"

#include <omp.h>

#include <algorithm>

#if defined(__SSE2__)
#include <xmmintrin.h>
#define KERRLAB_HAVE_MXCSR 1
#endif

namespace kerrlab {

namespace {
int g_threads = 1;

unsigned read_fp_mode() {
#ifdef KERRLAB_HAVE_MXCSR
  return _mm_getcsr();
#else
  return 0;
#endif
}

void write_fp_mode([[maybe_unused]] unsigned mode) {
#ifdef KERRLAB_HAVE_MXCSR
  _mm_setcsr(mode);
#endif
}

// flush-to-zero and denormals-are-zero bits
constexpr unsigned kFlushBits = 0x8040;
}  // namespace

FlushSubnormals::FlushSubnormals() : saved_(read_fp_mode()) { write_fp_mode(saved_ | kFlushBits); }

FlushSubnormals::~FlushSubnormals() { write_fp_mode(saved_); }

void set_thread_count(int n) { g_threads = std::max(1, n); }

int thread_count() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const auto count = static_cast<long long>(n);
  if (g_threads == 1 || n < 2) {
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    return;
  }
  const unsigned mode = read_fp_mode();
#pragma omp parallel num_threads(g_threads)
  {
    const unsigned own = read_fp_mode();
    write_fp_mode(mode);
#pragma omp for schedule(static)
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    write_fp_mode(own);
  }
}

double parallel_row_sum(std::size_t n, const std::function<double(std::size_t)>& row) {
  std::vector<double> partial(n, 0.0);
  parallel_for(n, [&](std::size_t i) { partial[i] = row(i); });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace kerrlab
