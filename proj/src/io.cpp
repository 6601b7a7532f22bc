#include "dyadic/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace dyadic {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw FormatError("not a number: '" + std::string(text) + "'");
  return v;
}

namespace {

std::int64_t parse_int(std::string_view text) {
  std::int64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw FormatError("not an integer: '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? line.size() - start : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> words(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  // Next non-empty line split into words; the first word must equal `key`.
  std::vector<std::string_view> expect(std::string_view key, std::size_t min_words = 1) {
    while (std::getline(is_, line_)) {
      ++number_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      fields_ = words(line_);
      if (fields_.empty()) continue;
      if (fields_.front() != key) fail("expected '" + std::string(key) + "'");
      if (fields_.size() < min_words) fail("too few fields");
      return fields_;
    }
    throw FormatError("unexpected end of input, expected '" + std::string(key) + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("line " + std::to_string(number_) + ": " + what);
  }

  // Runs fn, prefixing errors that lack a position with the current line.
  template <class Fn>
  auto located(Fn fn) {
    try {
      return fn();
    } catch (const FormatError& e) {
      if (std::string_view(e.what()).starts_with("line ")) throw;
      fail(e.what());
    }
  }

 private:
  std::istream& is_;
  std::string line_;
  std::vector<std::string_view> fields_;
  int number_ = 0;
};

void write_grid(std::ostream& os, const DyadicGrid& g) {
  os << "grid " << g.dim() << ' ' << g.top_level() << ' ' << g.finest_level();
  for (double s : g.shift()) os << ' ' << format_double(s);
  os << '\n';
}

DyadicGrid read_grid(LineReader& in) {
  const auto w = in.expect("grid", 4);
  const auto dim = parse_int(w[1]);
  if (dim < 1 || static_cast<std::size_t>(dim) + 4 != w.size()) in.fail("malformed grid line");
  std::vector<double> shift;
  for (std::size_t i = 4; i < w.size(); ++i) shift.push_back(parse_double(w[i]));
  try {
    return DyadicGrid(static_cast<int>(dim), static_cast<int>(parse_int(w[2])),
                      static_cast<int>(parse_int(w[3])), shift);
  } catch (const std::invalid_argument& e) {
    in.fail(e.what());
  }
}

void write_cube(std::ostream& os, const DyadicCube& q) {
  os << q.level;
  for (auto c : q.coords) os << ' ' << c;
}

// Parses "<level> <coords...>" starting at w[at]; advances `at`.
DyadicCube parse_cube(LineReader& in, const DyadicGrid& grid, const std::vector<std::string_view>& w,
                      std::size_t& at) {
  if (w.size() < at + 1 + static_cast<std::size_t>(grid.dim())) in.fail("truncated cube");
  DyadicCube q;
  q.level = static_cast<int>(parse_int(w[at++]));
  for (int i = 0; i < grid.dim(); ++i) q.coords.push_back(parse_int(w[at++]));
  if (!grid.in_window(q)) in.fail("cube " + q.to_string() + " is outside the window");
  return q;
}

void write_header(std::ostream& os, std::string_view kind, const DyadicGrid& grid) {
  os << "dyadic-" << kind << " 1\n";
  write_grid(os, grid);
}

void read_header(LineReader& in, std::string_view kind) {
  const auto w = in.expect("dyadic-" + std::string(kind), 2);
  if (w[1] != "1") in.fail("unsupported version " + std::string(w[1]));
}

std::size_t count_of(LineReader& in, std::string_view key) {
  const auto w = in.expect(key, 2);
  const auto n = parse_int(w[1]);
  if (n < 0) in.fail("negative count");
  return static_cast<std::size_t>(n);
}

void write_haar(std::ostream& os, std::string_view key, const HaarFunction& h) {
  os << key << ' ';
  write_cube(os, h.cube);
  os << ' ' << h.depth;
  for (double v : h.values) os << ' ' << format_double(v);
  os << '\n';
}

HaarFunction read_haar(LineReader& in, const DyadicGrid& grid, std::string_view key) {
  const auto w = in.expect(key, 2);
  std::size_t at = 1;
  HaarFunction h;
  h.cube = parse_cube(in, grid, w, at);
  if (at >= w.size()) in.fail("missing depth");
  h.depth = static_cast<int>(parse_int(w[at++]));
  if (h.depth < 0 || h.cube.level - h.depth < grid.finest_level()) in.fail("invalid depth");
  const std::size_t expected = std::size_t{1} << (h.depth * grid.dim());
  if (w.size() - at != expected) in.fail("expected " + std::to_string(expected) + " values");
  h.values.resize(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) h.values[static_cast<Eigen::Index>(i)] = parse_double(w[at + i]);
  return h;
}

}  // namespace

void write_step_csv(std::ostream& os, const StepFunction& f) {
  const DyadicGrid& grid = f.grid();
  for (int a = 0; a < grid.dim(); ++a) os << 'c' << a << ',';
  os << "value\n";
  for (std::int64_t cell = 0; cell < f.size(); ++cell) {
    const DyadicCube q = grid.cube(grid.finest_level(), cell);
    for (auto c : q.coords) os << c << ',';
    os << format_double(f[cell]) << '\n';
  }
}

StepFunction read_step_csv(std::istream& is, const DyadicGrid& grid) {
  std::string line;
  int number = 0;
  auto fail = [&](const std::string& what) -> void {
    throw FormatError("line " + std::to_string(number) + ": " + what);
  };
  if (!std::getline(is, line)) throw FormatError("empty input");
  ++number;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  if (header.size() != static_cast<std::size_t>(grid.dim()) + 1 || header.back() != "value")
    fail("header does not match a " + std::to_string(grid.dim()) + "-dimensional grid");
  Vector values = Vector::Zero(grid.cell_count());
  std::vector<char> seen(static_cast<std::size_t>(grid.cell_count()), 0);
  while (std::getline(is, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) fail("wrong number of columns");
    DyadicCube q{grid.finest_level(), {}};
    double v = 0.0;
    try {
      for (int a = 0; a < grid.dim(); ++a) q.coords.push_back(parse_int(fields[static_cast<std::size_t>(a)]));
      v = parse_double(fields.back());
    } catch (const FormatError& e) {
      fail(e.what());
    }
    if (!grid.in_window(q)) fail("cell outside the window");
    const auto cell = grid.index_of(q);
    if (seen[static_cast<std::size_t>(cell)]) fail("duplicate cell " + q.to_string());
    seen[static_cast<std::size_t>(cell)] = 1;
    if (!std::isfinite(v)) fail("non-finite value");
    values[cell] = v;
  }
  return StepFunction(grid, std::move(values));
}

void write_shift(std::ostream& os, const HaarShiftSpec& spec) {
  write_header(os, "haar-shift", spec.grid);
  os << "type " << spec.m << ' ' << spec.k << '\n';
  os << "scale " << format_double(spec.scale) << '\n';
  os << "terms " << spec.terms.size() << '\n';
  for (const auto& t : spec.terms) {
    os << "term ";
    write_cube(os, t.cube);
    os << '\n';
    write_haar(os, "input", t.input);
    write_haar(os, "output", t.output);
  }
}

HaarShiftSpec read_shift(std::istream& is) {
  LineReader in(is);
  return in.located([&] {
    read_header(in, "haar-shift");
    HaarShiftSpec spec{read_grid(in), 0, 0, 1.0, {}};
    const auto type = in.expect("type", 3);
    spec.m = static_cast<int>(parse_int(type[1]));
    spec.k = static_cast<int>(parse_int(type[2]));
    spec.scale = parse_double(in.expect("scale", 2)[1]);
    const std::size_t n = count_of(in, "terms");
    spec.terms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto w = in.expect("term", 2);
      std::size_t at = 1;
      ShiftTerm t;
      t.cube = parse_cube(in, spec.grid, w, at);
      t.input = read_haar(in, spec.grid, "input");
      t.output = read_haar(in, spec.grid, "output");
      spec.terms.push_back(std::move(t));
    }
    return spec;
  });
}

void write_sparse_family(std::ostream& os, const SparseFamily& family) {
  write_header(os, "sparse-family", family.grid);
  os << "generations " << family.generations.size() << '\n';
  for (std::size_t k = 0; k < family.generations.size(); ++k) {
    os << "generation " << k << ' ' << family.generations[k].size() << '\n';
    for (const auto& q : family.generations[k]) {
      os << "cube ";
      write_cube(os, q);
      os << '\n';
    }
  }
}

SparseFamily read_sparse_family(std::istream& is) {
  LineReader in(is);
  return in.located([&] {
    read_header(in, "sparse-family");
    SparseFamily family{read_grid(in), {}};
    const std::size_t g = count_of(in, "generations");
    for (std::size_t k = 0; k < g; ++k) {
      const auto w = in.expect("generation", 3);
      if (parse_int(w[1]) != static_cast<std::int64_t>(k)) in.fail("generations out of order");
      const auto n = parse_int(w[2]);
      if (n < 0) in.fail("negative count");
      std::vector<DyadicCube> gen;
      for (std::int64_t i = 0; i < n; ++i) {
        const auto c = in.expect("cube", 2);
        std::size_t at = 1;
        gen.push_back(parse_cube(in, family.grid, c, at));
      }
      family.generations.push_back(std::move(gen));
    }
    return family;
  });
}

void write_coefficients(std::ostream& os, const CoefficientMap& alpha) {
  write_header(os, "coefficients", alpha.grid());
  os << "entries " << alpha.entries().size() << '\n';
  for (const auto& [q, a] : alpha.entries()) {
    os << "entry ";
    write_cube(os, q);
    os << ' ' << format_double(a) << '\n';
  }
}

CoefficientMap read_coefficients(std::istream& is) {
  LineReader in(is);
  return in.located([&] {
    read_header(in, "coefficients");
    CoefficientMap alpha(read_grid(in));
    const std::size_t n = count_of(in, "entries");
    for (std::size_t i = 0; i < n; ++i) {
      const auto w = in.expect("entry", 2);
      std::size_t at = 1;
      const DyadicCube q = parse_cube(in, alpha.grid(), w, at);
      if (at + 1 != w.size()) in.fail("expected one coefficient");
      try {
        alpha.set(q, parse_double(w[at]));
      } catch (const PreconditionError& e) {
        in.fail(e.what());
      }
    }
    return alpha;
  });
}

std::string detect_kind(std::string_view first_line) {
  const auto w = words(first_line);
  if (w.empty()) return {};
  for (std::string_view kind : {"haar-shift", "sparse-family", "coefficients"})
    if (w.front() == "dyadic-" + std::string(kind)) return std::string(kind);
  return {};
}

}  // namespace dyadic
