#pragma once

#include <mutex>

namespace nacs::detail {

// Held around every FFTW plan creation and destruction.
std::mutex &fftw_planner_mutex();

} // namespace nacs::detail
