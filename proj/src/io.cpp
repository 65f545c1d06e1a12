#include "anticonc/io.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "anticonc/errors.hpp"

namespace anticonc {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.precision(17);
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<double> split_numbers(const std::string& line, const std::filesystem::path& path, std::size_t lineno) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    if (first == std::string::npos) throw IoError(path.string() + ":" + std::to_string(lineno) + ": empty field");
    double v = 0.0;
    const char* b = cell.data() + first;
    const char* e = cell.data() + last + 1;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
    }
    row.push_back(v);
  }
  return row;
}

bool skippable(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#';
}

std::vector<std::vector<double>> read_rows(std::ifstream& in, const std::filesystem::path& path, bool header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = !header;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    rows.push_back(split_numbers(line, path, lineno));
  }
  return rows;
}

Eigen::MatrixXd rows_to_matrix(const std::vector<std::vector<double>>& rows, const std::filesystem::path& path) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw IoError(path.string() + ": ragged rows");
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
  finish(out, path);
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return rows_to_matrix(read_rows(in, path, false), path);
}

void write_points_csv(const std::filesystem::path& path, const Eigen::MatrixXd& pts) {
  write_matrix_csv(path, pts.transpose());
}

Eigen::MatrixXd read_points_csv(const std::filesystem::path& path) { return read_matrix_csv(path).transpose(); }

void write_disorder_csv(const std::filesystem::path& path, const SKDisorder& dis) {
  auto out = open_out(path);
  out << "i,j,g\n";
  for (int i = 0; i < dis.n(); ++i)
    for (int j = i + 1; j < dis.n(); ++j) out << i << ',' << j << ',' << dis.g(i, j) << '\n';
  finish(out, path);
}

SKDisorder read_disorder_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto rows = read_rows(in, path, true);
  int n = 0;
  for (const auto& r : rows) {
    if (r.size() != 3) throw IoError(path.string() + ": expected rows i,j,g");
    n = std::max(n, static_cast<int>(r[1]) + 1);
  }
  std::vector<double> upper(static_cast<std::size_t>(n) * (n - 1) / 2, 0.0);
  std::vector<char> seen(upper.size(), 0);
  for (const auto& r : rows) {
    const int i = static_cast<int>(r[0]), j = static_cast<int>(r[1]);
    if (!(0 <= i && i < j && j < n) || r[0] != i || r[1] != j) throw IoError(path.string() + ": bad pair index");
    const std::size_t k = static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i + 1) / 2 + (j - i - 1);
    upper[k] = r[2];
    seen[k] = 1;
  }
  for (char s : seen)
    if (!s) throw IoError(path.string() + ": missing couplings");
  return SKDisorder(n, upper);
}

void write_grid_csv(const std::filesystem::path& path, const FppGrid& grid) {
  auto out = open_out(path);
  out << "# width=" << grid.width() << " height=" << grid.height() << " source=" << grid.source().x << ':'
      << grid.source().y << " target=" << grid.target().x << ':' << grid.target().y << '\n';
  out << "x1,y1,x2,y2,weight\n";
  for (std::size_t e = 0; e < grid.edge_count(); ++e) {
    const Edge ed = grid.edge(e);
    out << ed.a.x << ',' << ed.a.y << ',' << ed.b.x << ',' << ed.b.y << ',' << grid.weight(e) << '\n';
  }
  finish(out, path);
}

FppGrid read_grid_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string meta;
  std::getline(in, meta);
  int w = 0, h = 0;
  Vertex s, t;
  if (std::sscanf(meta.c_str(), "# width=%d height=%d source=%d:%d target=%d:%d", &w, &h, &s.x, &s.y, &t.x, &t.y) !=
      6) {
    throw IoError(path.string() + ": missing grid metadata line");
  }
  if (w < 1 || h < 1 || w > 4096 || h > 4096) throw IoError(path.string() + ": bad grid size");
  const auto rows = read_rows(in, path, true);
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(FppGrid::edge_count(w, h)), -1.0);
  const FppGrid shape(w, h, Eigen::VectorXd::Ones(weights.size()), s, t);
  for (const auto& r : rows) {
    if (r.size() != 5) throw IoError(path.string() + ": expected rows x1,y1,x2,y2,weight");
    const long e = shape.edge_between({static_cast<int>(r[0]), static_cast<int>(r[1])},
                                      {static_cast<int>(r[2]), static_cast<int>(r[3])});
    if (e < 0) throw IoError(path.string() + ": row is not a box edge");
    weights[e] = r[4];
  }
  if ((weights.array() < 0.0).any()) throw IoError(path.string() + ": missing edges");
  return shape.with_weights(std::move(weights));
}

void write_grid_binary(const std::filesystem::path& path, const FppGrid& grid) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out.write("FPPG", 4);
  const std::array<std::int32_t, 6> head{grid.width(), grid.height(), grid.source().x,
                                         grid.source().y, grid.target().x, grid.target().y};
  out.write(reinterpret_cast<const char*>(head.data()), sizeof(head));
  const std::uint64_t count = grid.edge_count();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  out.write(reinterpret_cast<const char*>(grid.weights().data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  finish(out, path);
}

FppGrid read_grid_binary(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  char magic[4];
  std::array<std::int32_t, 6> head{};
  std::uint64_t count = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(head.data()), sizeof(head));
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in || std::memcmp(magic, "FPPG", 4) != 0) throw IoError(path.string() + ": not an FPPG grid file");
  if (head[0] < 1 || head[1] < 1 || head[0] > 4096 || head[1] > 4096 ||
      count != FppGrid::edge_count(head[0], head[1])) {
    throw IoError(path.string() + ": inconsistent grid header");
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(count));
  in.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw IoError(path.string() + ": truncated grid file");
  return FppGrid(head[0], head[1], std::move(w), {head[2], head[3]}, {head[4], head[5]});
}

}  // namespace anticonc
