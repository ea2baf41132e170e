#pragma once

// Internal FFTW wrapper shared by grid.cpp (grid transforms) and frames.cpp
// (padded lattice transforms). FFTW's planner is not thread-safe; plan
// creation/destruction is serialized behind a mutex, execution is not.

#include <complex>
#include <vector>

namespace decospace::detail {

// sign: -1 = FFTW_FORWARD (e^{-2 pi i jk/n}), +1 = FFTW_BACKWARD.
// dims has `rank` entries; in/out hold prod(dims) values, row-major.
void fft_raw(int rank, const int* dims, const std::complex<double>* in,
             std::complex<double>* out, int sign);

} // namespace decospace::detail
