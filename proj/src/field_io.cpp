#include "nacs/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace nacs {

namespace {

constexpr char kMagic[8] = {'N', 'A', 'C', 'S', 'F', 'L', 'D', '1'};

template <class T> void put(std::ostream &out, T v) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(b[i], b[sizeof(T) - 1 - i]);
  out.write(reinterpret_cast<const char *>(b), sizeof(T));
}

template <class T> T get(std::istream &in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char *>(b), sizeof(T)))
    throw std::runtime_error("field dump truncated");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(b[i], b[sizeof(T) - 1 - i]);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

std::pair<double, double> extents(const Grid &g) {
  if (g.geometry() == Geometry::periodic)
    return {g.extent1(), g.extent2()};
  return {g.extent1() / 2.0, g.extent2() / 2.0};
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace

void write_field_csv(const std::filesystem::path &path, const SolveResult &r) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  const Grid &g = r.u1.grid();
  const auto [e1, e2] = extents(g);
  const bool torus = g.geometry() == Geometry::periodic;
  out << "# geometry = " << to_string(g.geometry()) << '\n'
      << "# M1 = " << g.M1() << '\n'
      << "# M2 = " << g.M2() << '\n'
      << (torus ? "# L1 = " : "# R1 = ") << fmt(e1) << '\n'
      << (torus ? "# L2 = " : "# R2 = ") << fmt(e2) << '\n'
      << "# c1 = " << fmt(r.c1) << '\n'
      << "# c2 = " << fmt(r.c2) << '\n'
      << "# converged = " << (r.converged ? "true" : "false") << '\n'
      << "# columns = x,y,u1,u2,v1,v2\n";
  for (int i = 0; i < g.M1(); ++i)
    for (int j = 0; j < g.M2(); ++j)
      out << fmt(g.x(i)) << ',' << fmt(g.y(j)) << ',' << fmt(r.u1(i, j)) << ','
          << fmt(r.u2(i, j)) << ',' << fmt(r.v1(i, j)) << ','
          << fmt(r.v2(i, j)) << '\n';
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

void write_field_binary(const std::filesystem::path &path,
                        const SolveResult &r) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  const Grid &g = r.u1.grid();
  const auto [e1, e2] = extents(g);
  out.write(kMagic, sizeof kMagic);
  put<std::int32_t>(out, g.geometry() == Geometry::periodic ? 1 : 0);
  put<std::int32_t>(out, g.M1());
  put<std::int32_t>(out, g.M2());
  put<std::int32_t>(out, r.converged ? 1 : 0);
  put<double>(out, e1);
  put<double>(out, e2);
  put<double>(out, r.c1);
  put<double>(out, r.c2);
  for (const ScalarField *f : {&r.u1, &r.u2, &r.v1, &r.v2})
    for (double x : f->values())
      put<double>(out, x);
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

SolveResult read_field_binary(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error(path.string() + ": not a field dump");
  const auto geo = get<std::int32_t>(in);
  const auto M1 = get<std::int32_t>(in);
  const auto M2 = get<std::int32_t>(in);
  const auto conv = get<std::int32_t>(in);
  const double e1 = get<double>(in), e2 = get<double>(in);
  const double c1 = get<double>(in), c2 = get<double>(in);
  if (geo != 0 && geo != 1)
    throw std::runtime_error(path.string() + ": bad geometry tag");
  const Grid g = geo == 1 ? Grid::torus({e1, e2}, M1, M2)
                          : Grid::box({e1, e2}, M1, M2);
  SolveResult r(g);
  r.geometry = geo == 1 ? Geometry::periodic : Geometry::planar;
  r.converged = conv != 0;
  r.c1 = c1;
  r.c2 = c2;
  for (ScalarField *f : {&r.u1, &r.u2, &r.v1, &r.v2})
    for (double &x : f->values())
      x = get<double>(in);
  if (in.peek() != std::char_traits<char>::eof())
    throw std::runtime_error(path.string() + ": trailing bytes");
  return r;
}

} // namespace nacs
