#pragma once

#include <cstddef>
#include <exception>

namespace cthmm::detail {

/// OpenMP loop over [0, n). The first exception thrown by any iteration is
/// rethrown on the calling thread once the loop has finished.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr error;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(cthmm_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace cthmm::detail
