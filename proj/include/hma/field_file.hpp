#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "hma/grid.hpp"
#include "hma/hermitian.hpp"

namespace hma {

// Binary layout, all integers u32 little-endian:
//   "HMAF" | version | n | axis count | sizes... | payload kind | f64 LE samples
// Matrix payloads store n*n complex entries per point, row-major, re then im.

inline constexpr std::uint32_t kFieldFileVersion = 1;

enum class PayloadKind : std::uint32_t { real_scalar = 0, complex_scalar = 1, hermitian_matrix = 2 };

class FieldFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldFile {
  TorusGrid grid;
  PayloadKind kind = PayloadKind::real_scalar;
  std::vector<double> samples;
};

void write_field_file(const std::filesystem::path& path, const FieldFile& file);
FieldFile read_field_file(const std::filesystem::path& path);

void write_field(const std::filesystem::path& path, const ScalarField& f);
void write_field(const std::filesystem::path& path, const ComplexField& f);
void write_field(const std::filesystem::path& path, const HermitianField& f);

/// Throw FieldFileError when the stored payload kind differs.
ScalarField read_scalar_field(const std::filesystem::path& path);
ComplexField read_complex_field(const std::filesystem::path& path);
HermitianField read_hermitian_field(const std::filesystem::path& path);

}  // namespace hma
