#include "pocs/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace pocs {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok) {
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) throw IoError("malformed number '" + tok + "'");
  return v;
}

long parse_dim(const std::string& tok) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 1) {
    throw IoError("malformed dimension '" + tok + "'");
  }
  return v;
}

std::string next_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw IoError(std::string("unexpected end of input reading ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<double> parse_row(const std::string& line, long expected) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(expected));
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(parse_double(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (static_cast<long>(out.size()) != expected) {
    throw IoError("row has " + std::to_string(out.size()) + " values, expected " + std::to_string(expected));
  }
  return out;
}

/// Parses "# <kind> <rows> <cols>".
std::pair<long, long> parse_matrix_header(const std::string& line, const char* kind) {
  const auto tok = split_ws(line);
  if (tok.size() != 4 || tok[0] != "#" || tok[1] != kind) {
    throw IoError(std::string("malformed header, expected '# ") + kind + " <rows> <cols>', got '" + line + "'");
  }
  return {parse_dim(tok[2]), parse_dim(tok[3])};
}

ComplexMatrix read_complex_body(std::istream& is, const std::string& header) {
  const auto [m, n] = parse_matrix_header(header, "complex");
  ComplexMatrix out(m, n);
  for (long i = 0; i < m; ++i) {
    const auto row = parse_row(next_line(is, "complex matrix row"), 2 * n);
    for (long j = 0; j < n; ++j) out(i, j) = Complex{row[2 * j], row[2 * j + 1]};
  }
  return out;
}

RealMatrix read_real_body(std::istream& is, const std::string& header) {
  const auto [p, q] = parse_matrix_header(header, "real");
  RealMatrix out(p, q);
  for (long i = 0; i < p; ++i) {
    const auto row = parse_row(next_line(is, "real matrix row"), q);
    for (long j = 0; j < q; ++j) out(i, j) = row[j];
  }
  return out;
}

template <class F>
void with_output(const std::filesystem::path& path, F&& body) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  body(os);
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

template <class F>
auto with_input(const std::filesystem::path& path, F&& body) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return body(is);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace

void write_complex_csv(std::ostream& os, const ComplexMatrix& a) {
  os << "# complex " << a.rows() << ' ' << a.cols() << '\n';
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) os << ',';
      os << format_double(a(i, j).real()) << ',' << format_double(a(i, j).imag());
    }
    os << '\n';
  }
}

ComplexMatrix read_complex_csv(std::istream& is) { return read_complex_body(is, next_line(is, "complex header")); }

void write_real_csv(std::ostream& os, const RealMatrix& a) {
  os << "# real " << a.rows() << ' ' << a.cols() << '\n';
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) os << ',';
      os << format_double(a(i, j));
    }
    os << '\n';
  }
}

RealMatrix read_real_csv(std::istream& is) { return read_real_body(is, next_line(is, "real header")); }

void write_observation(std::ostream& os, const PhaseObservation& obs) {
  os << "# corrupted " << (obs.corrupted ? 1 : 0) << " tau0 " << format_double(obs.noise_bound) << '\n';
  write_complex_csv(os, obs.z);
}

PhaseObservation read_observation(std::istream& is) {
  PhaseObservation obs;
  std::string line = next_line(is, "observation header");
  const auto tok = split_ws(line);
  if (tok.size() >= 2 && tok[0] == "#" && tok[1] == "corrupted") {
    if (tok.size() != 5 || tok[3] != "tau0" || (tok[2] != "0" && tok[2] != "1")) {
      throw IoError("malformed observation header '" + line + "'");
    }
    obs.corrupted = tok[2] == "1";
    obs.noise_bound = parse_double(tok[4]);
    if (obs.noise_bound < 0.0) throw IoError("negative tau0 in observation header");
    line = next_line(is, "complex header");
  }
  const ComplexMatrix z = read_complex_body(is, line);
  obs.z = z.col(0);
  return obs;
}

void write_system(std::ostream& os, const ReformulatedSystem& sys) {
  os << "# system case " << to_string(sys.kind) << " m " << sys.m << " n " << sys.n << " that "
     << format_double(sys.t_hat) << " kappa " << format_double(sys.kappa) << '\n';
  write_real_csv(os, sys.a);
}

ReformulatedSystem read_system(std::istream& is) {
  const std::string line = next_line(is, "system header");
  const auto tok = split_ws(line);
  if (tok.size() != 12 || tok[0] != "#" || tok[1] != "system" || tok[2] != "case" || tok[4] != "m" ||
      tok[6] != "n" || tok[8] != "that" || tok[10] != "kappa") {
    throw IoError("malformed system header '" + line + "'");
  }
  ReformulatedSystem sys;
  try {
    sys.kind = system_case_from_string(tok[3]);
  } catch (const ParameterError& e) {
    throw IoError(e.what());
  }
  sys.m = static_cast<int>(parse_dim(tok[5]));
  sys.n = static_cast<int>(parse_dim(tok[7]));
  sys.t_hat = parse_double(tok[9]);
  sys.kappa = parse_double(tok[11]);
  sys.a = read_real_csv(is);
  if (sys.a.rows() != sys.m + 1) throw IoError("system matrix row count does not equal m + 1");
  return sys;
}

void save_complex_csv(const std::filesystem::path& path, const ComplexMatrix& a) {
  with_output(path, [&](std::ostream& os) { write_complex_csv(os, a); });
}

ComplexMatrix load_complex_csv(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& is) { return read_complex_csv(is); });
}

void save_real_csv(const std::filesystem::path& path, const RealMatrix& a) {
  with_output(path, [&](std::ostream& os) { write_real_csv(os, a); });
}

RealMatrix load_real_csv(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& is) { return read_real_csv(is); });
}

void save_observation(const std::filesystem::path& path, const PhaseObservation& obs) {
  with_output(path, [&](std::ostream& os) { write_observation(os, obs); });
}

PhaseObservation load_observation(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& is) { return read_observation(is); });
}

}  // namespace pocs
