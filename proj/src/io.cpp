#include "io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <vector>

namespace diffract {

namespace {

void append_double(std::string& s, double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  s.append(buf, res.ptr);
}

void append_int(std::string& s, std::int64_t x) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  s.append(buf, res.ptr);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double_tok(std::string_view s) {
  double v{};
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw IoError("malformed number: '" + std::string(s) + "'");
  return v;
}

std::int64_t parse_int_tok(std::string_view s) {
  std::int64_t v{};
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw IoError("malformed integer: '" + std::string(s) + "'");
  return v;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw IoError("write failed: " + path);
}

struct CsvDoc {
  std::map<std::string, std::string, std::less<>> meta;
  std::string header;
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::string> lines;  // backing storage for the views
};

CsvDoc read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  CsvDoc doc;
  std::string line;
  if (!std::getline(f, line) || line.rfind("# ", 0) != 0)
    throw IoError("missing metadata line: " + path);
  for (auto tok : split(std::string_view(line).substr(2), ' ')) {
    if (tok.empty()) continue;
    auto eq = tok.find('=');
    if (eq == std::string_view::npos)
      throw IoError("malformed metadata in " + path);
    doc.meta.emplace(std::string(tok.substr(0, eq)),
                     std::string(tok.substr(eq + 1)));
  }
  if (!std::getline(f, doc.header))
    throw IoError("missing header row: " + path);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    doc.lines.push_back(std::move(line));
  }
  doc.rows.reserve(doc.lines.size());
  for (const auto& l : doc.lines) doc.rows.push_back(split(l, ','));
  return doc;
}

std::string require_meta(const CsvDoc& doc, const std::string& key,
                         const std::string& path) {
  auto it = doc.meta.find(key);
  if (it == doc.meta.end())
    throw IoError("metadata key '" + key + "' missing in " + path);
  return it->second;
}

void require_cols(const std::vector<std::string_view>& row, std::size_t n,
                  const std::string& path) {
  if (row.size() != n)
    throw IoError("wrong column count in " + path);
}

}  // namespace

std::string fmt_double(double x) {
  std::string s;
  append_double(s, x);
  return s;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (f) {
    f.read(buf, sizeof buf);
    auto got = static_cast<std::size_t>(f.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

void write_comb_csv(const WeightedComb& comb, const std::string& path) {
  const auto d = static_cast<std::size_t>(comb.dim);
  const char* kind = comb.has_exact() ? "exact"
                     : comb.integer_positions ? "integer"
                                              : "real";
  std::string s = "# dim=";
  append_int(s, comb.dim);
  s += " kind=";
  s += kind;
  s += " volume=";
  append_double(s, comb.volume);
  for (std::size_t c = 0; c < d; ++c) {
    s += " lo" + std::to_string(c) + "=";
    append_double(s, comb.patch_lo[c]);
    s += " hi" + std::to_string(c) + "=";
    append_double(s, comb.patch_hi[c]);
  }
  s += "\n";
  if (comb.dim == 1) {
    s += comb.has_exact() ? "position,weight_re,weight_im,a,b\n"
                          : "position,weight_re,weight_im\n";
  } else {
    for (std::size_t c = 0; c < d; ++c) s += "x" + std::to_string(c) + ",";
    s += "weight_re,weight_im\n";
  }
  for (std::size_t i = 0; i < comb.size(); ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      append_double(s, comb.positions[i * d + c]);
      s += ",";
    }
    append_double(s, comb.weights[i].real());
    s += ",";
    append_double(s, comb.weights[i].imag());
    if (comb.has_exact()) {
      s += ",";
      append_int(s, comb.exact[i].a);
      s += ",";
      append_int(s, comb.exact[i].b);
    }
    s += "\n";
  }
  write_file(path, s);
}

WeightedComb read_comb_csv(const std::string& path) {
  auto doc = read_csv(path);
  WeightedComb comb;
  comb.dim = static_cast<int>(parse_int_tok(require_meta(doc, "dim", path)));
  if (comb.dim < 1 || comb.dim > 3) throw IoError("bad dim in " + path);
  const std::string kind = require_meta(doc, "kind", path);
  if (kind != "exact" && kind != "integer" && kind != "real")
    throw IoError("bad kind in " + path);
  comb.integer_positions = kind == "integer";
  comb.volume = parse_double_tok(require_meta(doc, "volume", path));
  const auto d = static_cast<std::size_t>(comb.dim);
  for (std::size_t c = 0; c < d; ++c) {
    comb.patch_lo[c] =
        parse_double_tok(require_meta(doc, "lo" + std::to_string(c), path));
    comb.patch_hi[c] =
        parse_double_tok(require_meta(doc, "hi" + std::to_string(c), path));
  }
  const bool exact = kind == "exact";
  const std::size_t ncols = d + 2 + (exact ? 2 : 0);
  for (const auto& row : doc.rows) {
    require_cols(row, ncols, path);
    for (std::size_t c = 0; c < d; ++c)
      comb.positions.push_back(parse_double_tok(row[c]));
    comb.weights.emplace_back(parse_double_tok(row[d]),
                              parse_double_tok(row[d + 1]));
    if (exact)
      comb.exact.push_back(
          GoldenInt{parse_int_tok(row[d + 2]), parse_int_tok(row[d + 3])});
  }
  return comb;
}

void write_spectrum_csv(const SpectralMeasure& m, const std::string& path) {
  const bool pp = !m.pp_intensity.empty();
  const bool ac = !m.ac_grid.empty();
  const bool sc = !m.sc_grid.empty();
  if (static_cast<int>(pp) + static_cast<int>(ac) + static_cast<int>(sc) > 1)
    throw IoError("spectrum holds more than one component");
  std::string s = "# component=";
  s += pp ? "pp" : ac ? "ac" : "sc";
  s += " dim=";
  append_int(s, m.dim);
  s += "\n";
  const auto d = static_cast<std::size_t>(m.dim);
  if (pp) {
    if (m.dim == 1) {
      s += "k,intensity\n";
    } else {
      for (std::size_t c = 0; c < d; ++c) s += "k" + std::to_string(c) + ",";
      s += "intensity\n";
    }
    for (std::size_t i = 0; i < m.pp_count(); ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        append_double(s, m.pp_pos[i * d + c]);
        s += ",";
      }
      append_double(s, m.pp_intensity[i]);
      s += "\n";
    }
  } else {
    const auto& grid = ac ? m.ac_grid : m.sc_grid;
    const auto& vals = ac ? m.ac_values : m.sc_values;
    s += ac ? "k,density\n" : "k,F\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      append_double(s, grid[i]);
      s += ",";
      append_double(s, vals[i]);
      s += "\n";
    }
  }
  write_file(path, s);
}

SpectralMeasure read_spectrum_csv(const std::string& path) {
  auto doc = read_csv(path);
  SpectralMeasure m;
  m.dim = static_cast<int>(parse_int_tok(require_meta(doc, "dim", path)));
  if (m.dim < 1 || m.dim > 3) throw IoError("bad dim in " + path);
  const std::string comp = require_meta(doc, "component", path);
  const auto d = static_cast<std::size_t>(m.dim);
  if (comp == "pp") {
    for (const auto& row : doc.rows) {
      require_cols(row, d + 1, path);
      for (std::size_t c = 0; c < d; ++c)
        m.pp_pos.push_back(parse_double_tok(row[c]));
      m.pp_intensity.push_back(parse_double_tok(row[d]));
    }
  } else if (comp == "ac" || comp == "sc") {
    auto& grid = comp == "ac" ? m.ac_grid : m.sc_grid;
    auto& vals = comp == "ac" ? m.ac_values : m.sc_values;
    for (const auto& row : doc.rows) {
      require_cols(row, 2, path);
      grid.push_back(parse_double_tok(row[0]));
      vals.push_back(parse_double_tok(row[1]));
    }
  } else {
    throw IoError("unknown spectrum component in " + path);
  }
  return m;
}

void write_distribution_csv(const DistributionFn& f, const std::string& path) {
  std::string s = "# component=sc dim=1 method=" + f.method + " disagreement=";
  append_double(s, f.max_disagreement);
  s += "\nk,F\n";
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    append_double(s, f.grid[i]);
    s += ",";
    append_double(s, f.values[i]);
    s += "\n";
  }
  write_file(path, s);
}

void write_estimate_csv(const DiffractionEstimate& est, const std::string& path) {
  std::string s = "# component=estimate norm=";
  s += est.norm == Norm::density ? "density" : "bragg";
  s += " volume=";
  append_double(s, est.volume);
  s += " realizations=";
  append_int(s, est.realizations);
  s += "\nk,value\n";
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    append_double(s, est.grid[i]);
    s += ",";
    append_double(s, est.values[i]);
    s += "\n";
  }
  write_file(path, s);
}

DiffractionEstimate read_estimate_csv(const std::string& path) {
  auto doc = read_csv(path);
  if (require_meta(doc, "component", path) != "estimate")
    throw IoError("not an estimate file: " + path);
  DiffractionEstimate est;
  const std::string norm = require_meta(doc, "norm", path);
  if (norm == "density")
    est.norm = Norm::density;
  else if (norm == "bragg")
    est.norm = Norm::bragg;
  else
    throw IoError("bad norm in " + path);
  est.volume = parse_double_tok(require_meta(doc, "volume", path));
  est.realizations =
      static_cast<int>(parse_int_tok(require_meta(doc, "realizations", path)));
  for (const auto& row : doc.rows) {
    require_cols(row, 2, path);
    est.grid.push_back(parse_double_tok(row[0]));
    est.values.push_back(parse_double_tok(row[1]));
  }
  return est;
}

void write_autocorr_csv(const AutocorrelationTable& t, const std::string& path) {
  const auto d = static_cast<std::size_t>(t.dim);
  std::string s = "# component=autocorr dim=";
  append_int(s, t.dim);
  s += " kind=";
  s += t.has_exact() ? "exact" : "real";
  s += " volume=";
  append_double(s, t.volume);
  s += "\n";
  if (t.dim == 1) {
    s += t.has_exact() ? "z,coeff_re,coeff_im,a,b\n" : "z,coeff_re,coeff_im\n";
  } else {
    for (std::size_t c = 0; c < d; ++c) s += "z" + std::to_string(c) + ",";
    s += "coeff_re,coeff_im\n";
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      append_double(s, t.z[i * d + c]);
      s += ",";
    }
    append_double(s, t.coeff[i].real());
    s += ",";
    append_double(s, t.coeff[i].imag());
    if (t.has_exact()) {
      s += ",";
      append_int(s, t.zg[i].a);
      s += ",";
      append_int(s, t.zg[i].b);
    }
    s += "\n";
  }
  write_file(path, s);
}

}  // namespace diffract
