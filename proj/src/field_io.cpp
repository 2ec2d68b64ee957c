#include "sqmlab/field_io.hpp"

#include <cstdio>
#include <fstream>

#include "sqmlab/errors.hpp"

namespace sqmlab {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

void write_meta(std::ostream& os, const Grid& g, Boundary bc, std::optional<double> time) {
  os << "# dim=" << g.dim();
  const char* names[3] = {"x", "y", "z"};
  for (int a = 0; a < g.dim(); ++a) {
    os << " " << names[a] << "=[" << format_double(g.lo(a)) << "," << format_double(g.hi(a))
       << "," << g.n(a) << "]";
  }
  os << " boundary=" << (bc == Boundary::dirichlet ? "dirichlet" : "periodic");
  if (time) os << " t=" << format_double(*time);
  os << "\n";
}

void write_columns(std::ostream& os, int dim, bool complex_values) {
  const char* names[3] = {"x", "y", "z"};
  for (int a = 0; a < dim; ++a) os << names[a] << ",";
  os << (complex_values ? "re,im" : "re") << "\n";
}

template <class F>
void write_rows(std::ostream& os, const F& f, bool complex_values) {
  const Grid& g = f.grid();
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Vec3 p = g.point(k);
    for (int a = 0; a < g.dim(); ++a) os << format_double(p[a]) << ",";
    if (complex_values) {
      os << format_double(std::real(f[k])) << "," << format_double(std::imag(f[k]));
    } else {
      os << format_double(std::real(f[k]));
    }
    os << "\n";
  }
}

}  // namespace

void write_field_csv(std::ostream& os, const ScalarField& f, std::optional<double> time) {
  write_meta(os, f.grid(), f.boundary(), time);
  write_columns(os, f.grid().dim(), false);
  write_rows(os, f, false);
}

void write_field_csv(std::ostream& os, const ComplexField& f, std::optional<double> time) {
  write_meta(os, f.grid(), f.boundary(), time);
  write_columns(os, f.grid().dim(), true);
  write_rows(os, f, true);
}

namespace {

template <class F>
void write_file(const std::string& path, const F& f, std::optional<double> time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot open for writing: " + path);
  write_field_csv(os, f, time);
}

}  // namespace

void write_field_csv_file(const std::string& path, const ScalarField& f,
                          std::optional<double> time) {
  write_file(path, f, time);
}

void write_field_csv_file(const std::string& path, const ComplexField& f,
                          std::optional<double> time) {
  write_file(path, f, time);
}

}  // namespace sqmlab
