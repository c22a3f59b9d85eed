#include "spacedec/matrix_market.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "spacedec/error.h"

namespace spacedec::io {
namespace {

struct Header {
  bool coordinate = false;
  bool pattern = false;
  bool symmetric = false;
  Index rows = 0, cols = 0, entries = 0;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

Header read_header(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidInput, path + ": empty file");
  std::istringstream banner(lower(line));
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix")
    throw Error(ErrorCode::InvalidInput, path + ": missing MatrixMarket banner");
  Header h;
  if (format == "coordinate") h.coordinate = true;
  else if (format != "array") throw Error(ErrorCode::InvalidInput, path + ": unsupported format " + format);
  if (field == "pattern") h.pattern = true;
  else if (field != "real" && field != "integer" && field != "double")
    throw Error(ErrorCode::InvalidInput, path + ": unsupported field " + field);
  if (symmetry == "symmetric") h.symmetric = true;
  else if (symmetry != "general") throw Error(ErrorCode::InvalidInput, path + ": unsupported symmetry " + symmetry);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream dims(line);
    dims >> h.rows >> h.cols;
    if (h.coordinate) dims >> h.entries;
    if (!dims || h.rows < 0 || h.cols < 0)
      throw Error(ErrorCode::InvalidInput, path + ": malformed size line");
    return h;
  }
  throw Error(ErrorCode::InvalidInput, path + ": missing size line");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  return in;
}

std::vector<Eigen::Triplet<double>> read_triplets(std::istream& in, const Header& h,
                                                  const std::string& path) {
  std::vector<Eigen::Triplet<double>> trip;
  for (Index k = 0; k < h.entries; ++k) {
    Index i, j;
    double v = 1.0;
    if (!(in >> i >> j)) throw Error(ErrorCode::InvalidInput, path + ": truncated entry list");
    if (!h.pattern && !(in >> v)) throw Error(ErrorCode::InvalidInput, path + ": truncated entry list");
    if (i < 1 || j < 1 || i > h.rows || j > h.cols)
      throw Error(ErrorCode::InvalidInput, path + ": entry index out of range");
    trip.emplace_back(i - 1, j - 1, v);
    if (h.symmetric && i != j) trip.emplace_back(j - 1, i - 1, v);
  }
  return trip;
}

} // namespace

Matrix read_matrix_market(const std::string& path) {
  std::ifstream in = open_in(path);
  const Header h = read_header(in, path);
  if (h.coordinate) {
    SparseMatrix S(h.rows, h.cols);
    const auto trip = read_triplets(in, h, path);
    S.setFromTriplets(trip.begin(), trip.end());
    return Matrix(S);
  }
  Matrix A(h.rows, h.cols);
  for (Index j = 0; j < h.cols; ++j)
    for (Index i = h.symmetric ? j : 0; i < h.rows; ++i) {
      if (!(in >> A(i, j))) throw Error(ErrorCode::InvalidInput, path + ": truncated array data");
      if (h.symmetric) A(j, i) = A(i, j);
    }
  if (!A.allFinite()) throw Error(ErrorCode::InvalidInput, path + ": non-finite entries");
  return A;
}

SparseMatrix read_matrix_market_sparse(const std::string& path) {
  std::ifstream in = open_in(path);
  const Header h = read_header(in, path);
  if (!h.coordinate) return read_matrix_market(path).sparseView();
  SparseMatrix S(h.rows, h.cols);
  const auto trip = read_triplets(in, h, path);
  S.setFromTriplets(trip.begin(), trip.end());
  S.makeCompressed();
  return S;
}

void write_matrix_market_array(const std::string& path, const Matrix& A) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << "%%MatrixMarket matrix array real general\n" << A.rows() << ' ' << A.cols() << '\n';
  out << std::setprecision(17);
  for (Index j = 0; j < A.cols(); ++j)
    for (Index i = 0; i < A.rows(); ++i) out << A(i, j) << '\n';
}

void write_matrix_market_coordinate(const std::string& path, const SparseMatrix& A) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << "%%MatrixMarket matrix coordinate real general\n"
      << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  out << std::setprecision(17);
  for (Index j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it)
      out << it.row() + 1 << ' ' << j + 1 << ' ' << it.value() << '\n';
}

std::vector<std::pair<Index, Index>> read_edge_list(const std::string& path, Index* max_node) {
  std::ifstream in = open_in(path);
  std::vector<std::pair<Index, Index>> edges;
  std::string line;
  Index lineno = 0, top = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#%");
    if (cut != std::string::npos) line.resize(cut);
    std::istringstream ls(line);
    Index u, v;
    if (!(ls >> u)) continue;
    std::string extra;
    if (!(ls >> v) || (ls >> extra) || u < 1 || v < 1)
      throw Error(ErrorCode::InvalidInput, path + ":" + std::to_string(lineno) + ": expected 'u v' with 1-indexed nodes");
    edges.emplace_back(u - 1, v - 1);
    top = std::max({top, u, v});
  }
  if (max_node) *max_node = top;
  return edges;
}

} // namespace spacedec::io
