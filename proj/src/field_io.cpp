#include "sgad/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "sgad/errors.hpp"

namespace sgad {

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'L', 'D', '2'};

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
    throw InvalidArgument("read_field_binary: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_field_csv(std::ostream& os, const Field2D& f) {
  os << std::setprecision(17);
  for (std::size_t i = 0; i < f.n(); ++i) {
    for (std::size_t j = 0; j < f.n(); ++j) os << (j ? "," : "") << f(i, j);
    os << "\n";
  }
}

Field2D read_field_csv(std::istream& is) {
  Vector values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw InvalidArgument("read_field_csv: unparsable value '" + cell + "' on row " + std::to_string(rows + 1));
      }
      ++count;
    }
    if (rows == 0) cols = count;
    if (count != cols) throw InvalidArgument("read_field_csv: ragged row " + std::to_string(rows + 1));
    ++rows;
  }
  if (rows != cols) throw InvalidArgument("read_field_csv: field is not square");
  return Field2D(rows, std::move(values));
}

void write_field_binary(std::ostream& os, const Field2D& f) {
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.n()));
  put_le<std::uint32_t>(os, 0);
  put_le<std::uint32_t>(os, 0);
  for (double v : f.values()) put_le<double>(os, v);
}

Field2D read_field_binary(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic)
    throw InvalidArgument("read_field_binary: missing FLD2 header");
  const auto n = get_le<std::uint32_t>(is);
  get_le<std::uint32_t>(is);
  get_le<std::uint32_t>(is);
  if (n < Field2D::kMinSize) throw InvalidArgument("read_field_binary: grid size " + std::to_string(n) + " below 8");
  Vector values(static_cast<std::size_t>(n) * n);
  for (double& v : values) v = get_le<double>(is);
  return Field2D(n, std::move(values));
}

void save_field(const std::filesystem::path& path, const Field2D& f) {
  const bool text = path.extension() == ".csv";
  std::ofstream os(path, text ? std::ios::out : std::ios::out | std::ios::binary);
  if (!os) throw InvalidArgument("save_field: cannot open " + path.string());
  if (text)
    write_field_csv(os, f);
  else
    write_field_binary(os, f);
}

Field2D load_field(const std::filesystem::path& path) {
  const bool text = path.extension() == ".csv";
  std::ifstream is(path, text ? std::ios::in : std::ios::in | std::ios::binary);
  if (!is) throw InvalidArgument("load_field: cannot open " + path.string());
  return text ? read_field_csv(is) : read_field_binary(is);
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << "gamma,energy,residual,x_variation,symmetry_residual,steps\n" << std::setprecision(17);
  for (const auto& s : sweep.stages)
    os << s.gamma << ',' << s.result.energy << ',' << s.result.residual << ',' << s.x_variation << ','
       << s.symmetry_residual << ',' << s.result.steps << "\n";
}

}  // namespace sgad
