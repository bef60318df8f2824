#pragma once

#include <filesystem>
#include <iosfwd>

#include "pocs/linalg.hpp"
#include "pocs/reformulation.hpp"
#include "pocs/sensing.hpp"

namespace pocs {

// Complex matrix CSV: "# complex <m> <n>", then m rows of 2n values, re,im per entry.
// Real matrix CSV:    "# real <p> <q>",    then p rows of q values.
// Values are written with 17 significant digits, so a round trip is exact.
// Readers throw IoError on malformed headers or bodies.

void write_complex_csv(std::ostream& os, const ComplexMatrix& a);
ComplexMatrix read_complex_csv(std::istream& is);

void write_real_csv(std::ostream& os, const RealMatrix& a);
RealMatrix read_real_csv(std::istream& is);

/// "# corrupted <0|1> tau0 <float>" followed by z as an m x 1 complex CSV.
/// The reader also accepts a bare complex CSV (a clean observation), taking
/// the first column when the matrix has several.
void write_observation(std::ostream& os, const PhaseObservation& obs);
PhaseObservation read_observation(std::istream& is);

/// "# system case <tag> m <m> n <n> that <t_hat> kappa <kappa>" followed by the real CSV of a.
void write_system(std::ostream& os, const ReformulatedSystem& sys);
ReformulatedSystem read_system(std::istream& is);

void save_complex_csv(const std::filesystem::path& path, const ComplexMatrix& a);
ComplexMatrix load_complex_csv(const std::filesystem::path& path);
void save_real_csv(const std::filesystem::path& path, const RealMatrix& a);
RealMatrix load_real_csv(const std::filesystem::path& path);
void save_observation(const std::filesystem::path& path, const PhaseObservation& obs);
PhaseObservation load_observation(const std::filesystem::path& path);

/// Formats with 17 significant digits.
std::string format_double(double v);

}  // namespace pocs
