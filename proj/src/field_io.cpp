#include "afree/field_io.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace afree {

using json = nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "field container assumes a little-endian host");

namespace {

void write_header(std::ofstream& out, const Grid& g, int fiber, const char* kind) {
  json h;
  h["d"] = g.dim;
  h["n"] = g.n;
  h["N"] = fiber;
  h["layout"] = "row-major";
  h["kind"] = kind;
  out << h.dump() << '\n';
}

json read_header(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("field file: missing header in " + path);
  return json::parse(line);
}

} // namespace

void write_field(const std::string& path, const PeriodicField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("field file: cannot open " + path);
  write_header(out, field.grid, field.fiber, "samples");
  out.write(reinterpret_cast<const char*>(field.samples.data()),
            static_cast<std::streamsize>(field.samples.size() * sizeof(double)));
}

void write_field(const std::string& path, const SpectralField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("field file: cannot open " + path);
  write_header(out, field.grid, field.fiber, "coeffs");
  out.write(reinterpret_cast<const char*>(field.coeffs.data()),
            static_cast<std::streamsize>(field.coeffs.size() * 2 * sizeof(double)));
}

PeriodicField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("field file: cannot open " + path);
  const json h = read_header(in, path);
  if (h.at("kind").get<std::string>() != "samples")
    throw std::runtime_error("field file: expected samples in " + path);
  PeriodicField f(Grid(h.at("d").get<int>(), h.at("n").get<int>()), h.at("N").get<int>());
  in.read(reinterpret_cast<char*>(f.samples.data()),
          static_cast<std::streamsize>(f.samples.size() * sizeof(double)));
  if (!in) throw std::runtime_error("field file: truncated payload in " + path);
  return f;
}

SpectralField read_spectral_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("field file: cannot open " + path);
  const json h = read_header(in, path);
  if (h.at("kind").get<std::string>() != "coeffs")
    throw std::runtime_error("field file: expected coeffs in " + path);
  SpectralField f(Grid(h.at("d").get<int>(), h.at("n").get<int>()), h.at("N").get<int>());
  in.read(reinterpret_cast<char*>(f.coeffs.data()),
          static_cast<std::streamsize>(f.coeffs.size() * 2 * sizeof(double)));
  if (!in) throw std::runtime_error("field file: truncated payload in " + path);
  return f;
}

void export_magnitudes_csv(const std::string& path, const SpectralField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot open " + path);
  for (int a = 0; a < field.grid.dim; ++a) out << "xi_" << a << ",";
  out << "magnitude\n";
  char buf[64];
  for_each_mode(field.grid, [&](long long flat, const int* freq) {
    for (int a = 0; a < field.grid.dim; ++a) out << freq[a] << ",";
    const double mag =
        Eigen::Map<const Eigen::VectorXcd>(field.at(flat), field.fiber).norm();
    std::snprintf(buf, sizeof(buf), "%.17g", mag);
    out << buf << "\n";
  });
}

} // namespace afree
