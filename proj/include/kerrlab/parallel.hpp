#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace kerrlab {

/// Number of worker threads used by row-parallel kernels (>= 1).
void set_thread_count(int n);
int thread_count();

/// Calls body(i) for i in [0, n) with a static partition. Bodies must only
/// write to slots owned by i; results are then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// While alive, subnormal results and operands are flushed to zero on this
/// thread; parallel_for hands the caller's setting to its workers. Values this
/// small carry no information for the evolution but are very slow to process.
class FlushSubnormals {
 public:
  FlushSubnormals();
  ~FlushSubnormals();
  FlushSubnormals(const FlushSubnormals&) = delete;
  FlushSubnormals& operator=(const FlushSubnormals&) = delete;

 private:
  unsigned saved_;
};

/// Sum of row(i) over [0, n): rows evaluated in parallel, then added serially
/// in index order so the result does not depend on the thread count.
double parallel_row_sum(std::size_t n, const std::function<double(std::size_t)>& row);

}  // namespace kerrlab
