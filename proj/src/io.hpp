#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "estimation.hpp"

namespace diffract {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form, locale independent.
std::string fmt_double(double x);

/// FNV-1a 64-bit digest of a file's bytes; hex64 renders it as 16 lowercase
/// hex digits. Throws IoError when the file cannot be read.
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

/// CSV layout shared by all writers: one "# key=value ..." metadata line,
/// then a fixed header row, then data rows with '\n' endings. Numbers use
/// shortest round-trip formatting, so read-back is bit exact.
void write_comb_csv(const WeightedComb& comb, const std::string& path);
WeightedComb read_comb_csv(const std::string& path);

/// Writes the single component the measure carries (pp, ac, or sc);
/// refuses mixed measures to keep the format unambiguous.
void write_spectrum_csv(const SpectralMeasure& m, const std::string& path);
SpectralMeasure read_spectrum_csv(const std::string& path);

/// Distribution functions serialize as the sc component (columns k,F).
void write_distribution_csv(const DistributionFn& f, const std::string& path);

void write_estimate_csv(const DiffractionEstimate& est, const std::string& path);
DiffractionEstimate read_estimate_csv(const std::string& path);

void write_autocorr_csv(const AutocorrelationTable& t, const std::string& path);

}  // namespace diffract
