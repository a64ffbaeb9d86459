#pragma once

#include <string>

#include "afree/field.hpp"

namespace afree {

/// Binary field container: one JSON header line
///   {"d":..,"n":..,"N":..,"layout":"row-major","kind":"samples"|"coeffs"}
/// followed by little-endian 64-bit floats (re/im interleaved for coeffs).
void write_field(const std::string& path, const PeriodicField& field);
void write_field(const std::string& path, const SpectralField& field);

PeriodicField read_field(const std::string& path);
SpectralField read_spectral_field(const std::string& path);

/// Per-frequency magnitudes (fiber norm) as CSV: xi_0,..,xi_{d-1},magnitude.
void export_magnitudes_csv(const std::string& path, const SpectralField& field);

} // namespace afree
