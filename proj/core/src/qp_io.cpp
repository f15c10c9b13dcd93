#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "graphmask/error.hpp"
#include "graphmask/qp.hpp"

namespace graphmask {

namespace {

void write_sparse(std::ostream& os, const char* tag, const SparseMatrix& m) {
  os << tag << ' ' << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

void write_vector(std::ostream& os, const char* tag, const Vector& v) {
  os << tag << ' ' << v.size() << '\n';
  for (Eigen::Index k = 0; k < v.size(); ++k) os << v(k) << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  std::istringstream next() {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_;
      if (!line.empty() && line[0] != '#') return std::istringstream(line);
    }
    throw ParseError("unexpected end of problem dump", line_);
  }

  void expect_tag(std::istringstream& ss, const std::string& tag) {
    std::string got;
    ss >> got;
    if (got != tag) throw ParseError("expected '" + tag + "', found '" + got + "'", line_);
  }

  SparseMatrix sparse(const std::string& tag) {
    auto ss = next();
    expect_tag(ss, tag);
    long rows = 0, cols = 0, nnz = 0;
    if (!(ss >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) throw ParseError("bad matrix header", line_);
    std::vector<Eigen::Triplet<double>> trip;
    for (long k = 0; k < nnz; ++k) {
      auto es = next();
      long i = 0, j = 0;
      double v = 0;
      if (!(es >> i >> j >> v) || i < 0 || j < 0 || i >= rows || j >= cols) throw ParseError("bad matrix entry", line_);
      trip.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    }
    SparseMatrix m(rows, cols);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
  }

  Vector vector(const std::string& tag) {
    auto ss = next();
    expect_tag(ss, tag);
    long size = 0;
    if (!(ss >> size) || size < 0) throw ParseError("bad vector header", line_);
    Vector v(size);
    for (long k = 0; k < size; ++k) {
      auto es = next();
      if (!(es >> v(k))) throw ParseError("bad vector entry", line_);
    }
    return v;
  }

 private:
  std::istream& is_;
  int line_ = 0;
};

}  // namespace

void write_problem(std::ostream& os, const QpProblem& pr) {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(17);
  os << "graphmask-qp 1\n";
  write_sparse(os, "P", pr.p);
  write_vector(os, "q", pr.q);
  write_sparse(os, "A", pr.a);
  write_vector(os, "b", pr.b);
  write_sparse(os, "G", pr.g);
  write_vector(os, "h", pr.h);
  os.flags(flags);
  os.precision(precision);
}

QpProblem read_problem(std::istream& is) {
  Reader r(is);
  {
    auto ss = r.next();
    r.expect_tag(ss, "graphmask-qp");
    int version = 0;
    if (!(ss >> version) || version != 1) throw ParseError("unsupported problem dump version");
  }
  QpProblem pr;
  pr.p = r.sparse("P");
  pr.q = r.vector("q");
  pr.a = r.sparse("A");
  pr.b = r.vector("b");
  pr.g = r.sparse("G");
  pr.h = r.vector("h");
  pr.var_names.assign(static_cast<std::size_t>(pr.q.size()), VariableTag{});
  pr.validate();
  return pr;
}

}  // namespace graphmask
