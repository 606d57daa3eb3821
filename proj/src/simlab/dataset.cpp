#include "gencp/simlab/dataset.hpp"

#include "gencp/estimators/estimate.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace gencp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Index k >= 1 of a column named prefix + k, or 0.
int numbered(const std::string& name, const std::string& prefix) {
  if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) return 0;
  int k = 0;
  const char* b = name.data() + prefix.size();
  const char* e = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(b, e, k);
  return ec == std::errc() && ptr == e && k >= 1 ? k : 0;
}

}  // namespace

void Dataset::validate() const {
  const Index n = y.size();
  if (n < 2) throw ConfigError(source + ": need at least two rows");
  if (locations.size() != n || x.rows() != n) throw ConfigError(source + ": inconsistent dimensions");
  if (y_star && y_star->size() != n) throw ConfigError(source + ": y_star length differs from y");
  if (!locations.points().allFinite() || !x.allFinite() || !y.allFinite() || (y_star && !y_star->allFinite()))
    throw ConfigError(source + ": non-finite values");
}

Dataset parse_dataset_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(source + ": empty file");
  const std::vector<std::string> header = split_line(line);
  std::map<int, std::size_t> xs, fs;
  std::optional<std::size_t> y_col, y_star_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    bool dup = false;
    if (int k = numbered(h, "x")) {
      dup = !xs.emplace(k, c).second;
    } else if (int k2 = numbered(h, "f")) {
      dup = !fs.emplace(k2, c).second;
    } else if (h == "y") {
      dup = y_col.has_value();
      y_col = c;
    } else if (h == "y_star") {
      dup = y_star_col.has_value();
      y_star_col = c;
    } else {
      throw ConfigError(source + ": unknown column '" + h + "'");
    }
    if (dup) throw ConfigError(source + ": duplicate column '" + h + "'");
  }
  if (!y_col) throw ConfigError(source + ": missing column 'y'");
  if (xs.empty()) throw ConfigError(source + ": no coordinate columns x1..xd");
  auto contiguous = [&](const std::map<int, std::size_t>& m, const char* what) {
    int expect = 1;
    for (const auto& kv : m)
      if (kv.first != expect++) throw ConfigError(source + ": " + what + " columns must be numbered 1..k");
  };
  contiguous(xs, "x");
  contiguous(fs, "f");

  std::vector<std::vector<double>> rows;
  Index line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                        " fields");
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& s = cells[c];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), row[c]);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(source + ":" + std::to_string(line_no) + ": cannot parse '" + s + "'");
    }
    rows.push_back(std::move(row));
  }

  const auto n = static_cast<Index>(rows.size());
  Dataset d;
  d.source = source;
  Matrix loc(n, static_cast<Index>(xs.size()));
  d.x.resize(n, static_cast<Index>(fs.size()));
  d.y.resize(n);
  if (y_star_col) d.y_star = Vector(n);
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (const auto& [k, c] : xs) loc(i, k - 1) = r[c];
    for (const auto& [k, c] : fs) d.x(i, k - 1) = r[c];
    d.y(i) = r[*y_col];
    if (y_star_col) (*d.y_star)(i) = r[*y_star_col];
  }
  d.locations = Locations(std::move(loc));
  d.validate();
  return d;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return parse_dataset_csv(in, path);
}

std::string dataset_to_csv(const Dataset& data) {
  std::ostringstream os;
  const Index d = data.locations.dim(), p = data.x.cols();
  for (Index k = 0; k < d; ++k) os << (k ? "," : "") << "x" << k + 1;
  for (Index k = 0; k < p; ++k) os << ",f" << k + 1;
  os << ",y" << (data.y_star ? ",y_star" : "") << "\n";
  for (Index i = 0; i < data.size(); ++i) {
    for (Index k = 0; k < d; ++k) os << (k ? "," : "") << format_double(data.locations.points()(i, k));
    for (Index k = 0; k < p; ++k) os << "," << format_double(data.x(i, k));
    os << "," << format_double(data.y(i));
    if (data.y_star) os << "," << format_double((*data.y_star)(i));
    os << "\n";
  }
  return os.str();
}

std::string matrix_to_csv(const Matrix& m) {
  std::ostringstream os;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
    os << "\n";
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace gencp
