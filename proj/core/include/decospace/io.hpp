#pragma once

#include <string>
#include <vector>

#include "decospace/frames.hpp"
#include "decospace/grid.hpp"

namespace decospace {

// Flat little-endian field container:
// header {magic "DSPF", version u32, d u32, n u32, L f64}, then n^d complex128
// space samples in flat grid order.
void write_field_dspf(const std::string& path, const SampledField& f);
SampledField read_field_dspf(const std::string& path);

// Inspection dump: one row (index, re, im) per grid point.
void write_field_csv(const std::string& path, const SampledField& f);

// Coefficient container:
// header {magic "DSCF", delta f64, index count u32, d u32}, then per-index
// blocks {kmin i32[2], kmax i32[2], values complex128[count]}.
void write_coefficients_dscf(const std::string& path, const CoefficientArray& C);
CoefficientArray read_coefficients_dscf(const std::string& path);

// Coefficient dump: one row (i, k..., re, im) per retained lattice point.
void write_coefficients_csv(const std::string& path, const CoefficientArray& C);

// Minimal CSV writer shared by the CLI reports.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows);

} // namespace decospace
