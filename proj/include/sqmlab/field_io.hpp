#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "sqmlab/field.hpp"

namespace sqmlab {

/// Deterministic shortest-width formatting used by every CSV writer
/// (printf %.17g, locale-independent).
std::string format_double(double x);

/// Field CSV: one metadata header line, a column header row
/// x[,y,z],re[,im], then one row per node in flat order. An optional time
/// stamp goes into the metadata line.
void write_field_csv(std::ostream& os, const ScalarField& f,
                     std::optional<double> time = std::nullopt);
void write_field_csv(std::ostream& os, const ComplexField& f,
                     std::optional<double> time = std::nullopt);

void write_field_csv_file(const std::string& path, const ScalarField& f,
                          std::optional<double> time = std::nullopt);
void write_field_csv_file(const std::string& path, const ComplexField& f,
                          std::optional<double> time = std::nullopt);

}  // namespace sqmlab
