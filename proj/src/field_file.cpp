#include "hma/field_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace hma {

namespace {

constexpr char kMagic[4] = {'H', 'M', 'A', 'F'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_f64(std::vector<unsigned char>& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

class Reader {
 public:
  Reader(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) : b_(bytes), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b_[pos_ + k]) << (8 * k);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b_[pos_ + k]) << (8 * k);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::size_t remaining() const { return b_.size() - pos_; }
  void need(std::size_t k) const {
    if (remaining() < k) fail("truncated file");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw FieldFileError(path_.string() + ": " + what);
  }

 private:
  const std::vector<unsigned char>& b_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 4;
};

std::size_t per_point(PayloadKind kind, int n) {
  switch (kind) {
    case PayloadKind::real_scalar: return 1;
    case PayloadKind::complex_scalar: return 2;
    case PayloadKind::hermitian_matrix: return 2 * static_cast<std::size_t>(n * n);
  }
  return 0;
}

FieldFile expect_kind(const std::filesystem::path& path, PayloadKind kind) {
  FieldFile f = read_field_file(path);
  if (f.kind != kind) {
    throw FieldFileError(path.string() + ": payload kind " + std::to_string(static_cast<unsigned>(f.kind)) +
                         ", expected " + std::to_string(static_cast<unsigned>(kind)));
  }
  return f;
}

}  // namespace

void write_field_file(const std::filesystem::path& path, const FieldFile& file) {
  const TorusGrid& g = file.grid;
  if (file.samples.size() != g.point_count() * per_point(file.kind, g.dim())) {
    throw FieldFileError(path.string() + ": sample count does not match the grid");
  }
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  put_u32(out, kFieldFileVersion);
  put_u32(out, static_cast<std::uint32_t>(g.dim()));
  put_u32(out, static_cast<std::uint32_t>(g.axes()));
  for (int s : g.sizes()) put_u32(out, static_cast<std::uint32_t>(s));
  put_u32(out, static_cast<std::uint32_t>(file.kind));
  out.reserve(out.size() + 8 * file.samples.size());
  for (double d : file.samples) put_f64(out, d);

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FieldFileError(path.string() + ": cannot open for writing");
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!os) throw FieldFileError(path.string() + ": write failed");
}

FieldFile read_field_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FieldFileError(path.string() + ": cannot open for reading");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FieldFileError(path.string() + ": bad magic");
  }
  Reader r(bytes, path);
  const std::uint32_t version = r.u32();
  if (version != kFieldFileVersion) r.fail("unsupported version " + std::to_string(version));
  const std::uint32_t n = r.u32();
  const std::uint32_t axes = r.u32();
  if (axes != 2 * n || axes > kMaxAxes) r.fail("inconsistent dimension header");
  std::vector<int> sizes;
  for (std::uint32_t a = 0; a < axes; ++a) sizes.push_back(static_cast<int>(r.u32()));
  const std::uint32_t kind = r.u32();
  if (kind > 2) r.fail("unknown payload kind " + std::to_string(kind));

  FieldFile f;
  try {
    f.grid = TorusGrid::build(static_cast<int>(n), sizes);
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
  f.kind = static_cast<PayloadKind>(kind);
  const std::size_t count = f.grid.point_count() * per_point(f.kind, f.grid.dim());
  if (r.remaining() != 8 * count) r.fail("payload length does not match header");
  f.samples.resize(count);
  for (double& d : f.samples) d = r.f64();
  return f;
}

void write_field(const std::filesystem::path& path, const ScalarField& f) {
  write_field_file(path, {f.grid(), PayloadKind::real_scalar, {f.values().begin(), f.values().end()}});
}

void write_field(const std::filesystem::path& path, const ComplexField& f) {
  FieldFile out{f.grid(), PayloadKind::complex_scalar, {}};
  for (const cplx& v : f.values()) {
    out.samples.push_back(v.real());
    out.samples.push_back(v.imag());
  }
  write_field_file(path, out);
}

void write_field(const std::filesystem::path& path, const HermitianField& f) {
  FieldFile out{f.grid(), PayloadKind::hermitian_matrix, {}};
  for (const cplx& v : f.raw()) {
    out.samples.push_back(v.real());
    out.samples.push_back(v.imag());
  }
  write_field_file(path, out);
}

ScalarField read_scalar_field(const std::filesystem::path& path) {
  FieldFile f = expect_kind(path, PayloadKind::real_scalar);
  return ScalarField(f.grid, std::move(f.samples));
}

ComplexField read_complex_field(const std::filesystem::path& path) {
  const FieldFile f = expect_kind(path, PayloadKind::complex_scalar);
  ComplexField out(f.grid);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = {f.samples[2 * p], f.samples[2 * p + 1]};
  return out;
}

HermitianField read_hermitian_field(const std::filesystem::path& path) {
  const FieldFile f = expect_kind(path, PayloadKind::hermitian_matrix);
  HermitianField out(f.grid);
  auto raw = out.raw();
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = {f.samples[2 * i], f.samples[2 * i + 1]};
  return out;
}

}  // namespace hma
