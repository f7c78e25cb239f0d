#pragma once

#include <filesystem>
#include <iosfwd>

#include "sgad/acshear.hpp"
#include "sgad/field.hpp"

namespace sgad {

/// n lines of n comma-separated values, row i = y index.
void write_field_csv(std::ostream& os, const Field2D& f);
Field2D read_field_csv(std::istream& is);

/// 16-byte header "FLD2", u32 n, two reserved u32 (0), then n*n little-endian float64 values.
void write_field_binary(std::ostream& os, const Field2D& f);
Field2D read_field_binary(std::istream& is);

/// Format chosen by extension: ".csv" text, anything else FLD2.
void save_field(const std::filesystem::path& path, const Field2D& f);
Field2D load_field(const std::filesystem::path& path);

/// Header "gamma,energy,residual,x_variation,symmetry_residual,steps".
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

}  // namespace sgad
