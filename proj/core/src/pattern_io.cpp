#include <charconv>
#include <fstream>
#include <sstream>

#include "hyperu/errors.hpp"
#include "hyperu/io.hpp"

namespace hyperu {

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  std::string s = hash == std::string::npos ? line : line.substr(0, hash);
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view token, std::size_t line_no) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    std::ostringstream msg;
    msg << "line " << line_no << ": cannot parse number '" << token << "'";
    throw FormatError(msg.str());
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, bool comma) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i <= s.size()) {
    if (comma) {
      const auto j = s.find(',', i);
      auto tok = s.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i);
      while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
      while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.remove_suffix(1);
      out.push_back(tok);
      if (j == std::string_view::npos) break;
      i = j + 1;
    } else {
      const auto b = s.find_first_not_of(" \t", i);
      if (b == std::string_view::npos) break;
      const auto e = s.find_first_of(" \t", b);
      out.push_back(s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
      if (e == std::string_view::npos) break;
      i = e;
    }
  }
  return out;
}

void write_header(std::ostream& out, const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw FormatError("cannot format number");
  return std::string(buf, ptr);
}

PointPattern read_pattern(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  int dim = 0;
  std::vector<double> coords;
  double box = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip_comment(line);
    if (body.empty()) continue;
    const auto tokens = split(body, false);
    if (dim == 0) {
      if (tokens.size() != 2) throw FormatError("pattern header must be 'd L'");
      const double d = parse_double(tokens[0], line_no);
      box = parse_double(tokens[1], line_no);
      if (d < 1 || d != static_cast<int>(d)) throw FormatError("pattern dimension must be a positive integer");
      dim = static_cast<int>(d);
      if (!(box > 0.0)) throw FormatError("pattern box length must be positive");
      continue;
    }
    if (tokens.size() != static_cast<std::size_t>(dim)) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << dim << " coordinates, got " << tokens.size();
      throw FormatError(msg.str());
    }
    for (auto t : tokens) coords.push_back(parse_double(t, line_no));
  }
  if (dim == 0) throw FormatError("missing pattern header 'd L'");
  try {
    return PointPattern(dim, box, std::move(coords));
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
}

PointPattern read_pattern_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open pattern file " + path.string());
  return read_pattern(in);
}

void write_pattern(std::ostream& out, const PointPattern& pattern,
                   const std::vector<std::string>& header) {
  write_header(out, header);
  out << pattern.dim() << ' ' << format_double(pattern.box_length()) << '\n';
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const auto p = pattern.point(i);
    for (std::size_t a = 0; a < p.size(); ++a) {
      if (a) out << ' ';
      out << format_double(p[a]);
    }
    out << '\n';
  }
}

SpectralSample read_spectral_csv(std::istream& in) {
  SpectralSample s;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip_comment(line);
    if (body.empty()) continue;
    const auto cols = split(body, true);
    if (!seen_header) {
      if (cols.size() != 2 || cols[0] != "kappa" || cols[1] != "x")
        throw FormatError("spectral CSV must start with the header 'kappa,x'");
      seen_header = true;
      continue;
    }
    if (cols.size() != 2) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected 'kappa,x'";
      throw FormatError(msg.str());
    }
    const double k = parse_double(cols[0], line_no);
    const double x = parse_double(cols[1], line_no);
    if (!(k > 0.0)) throw FormatError("line " + std::to_string(line_no) + ": kappa must be positive");
    if (!(x >= 0.0)) throw FormatError("line " + std::to_string(line_no) + ": x must be non-negative");
    s.kappa.push_back(k);
    s.x.push_back(x);
  }
  if (!seen_header) throw FormatError("spectral CSV is missing the 'kappa,x' header");
  return s;
}

SpectralSample read_spectral_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open spectral CSV " + path.string());
  auto s = read_spectral_csv(in);
  s.source = path.string();
  return s;
}

void write_spectral_csv(std::ostream& out, const SpectralSample& sample,
                        const std::vector<std::string>& header) {
  write_header(out, header);
  out << "kappa,x\n";
  for (std::size_t j = 0; j < sample.size(); ++j)
    out << format_double(sample.kappa[j]) << ',' << format_double(sample.x[j]) << '\n';
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace hyperu
