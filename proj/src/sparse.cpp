#include "mfdmg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace mfdmg
{

SparseOperator from_triplets(int rows, int cols, const Triplets &entries)
{
  SparseOperator op(rows, cols);
  op.setFromTriplets(entries.begin(), entries.end());
  op.prune(0.0, 0.0);
  op.makeCompressed();
  return op;
}

SparseOperator select(const SparseOperator &op, const std::vector<int> &rows,
                      const std::vector<int> &cols)
{
  std::vector<int> col_map(op.cols(), -1);
  for (int j = 0; j < static_cast<int>(cols.size()); ++j)
  {
    col_map.at(cols[j]) = j;
  }
  Triplets t;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
  {
    for (SparseOperator::InnerIterator it(op, rows[i]); it; ++it)
    {
      const int j = col_map[it.col()];
      if (j >= 0)
      {
        t.emplace_back(i, j, it.value());
      }
    }
  }
  return from_triplets(static_cast<int>(rows.size()), static_cast<int>(cols.size()), t);
}

SparseOperator diagonal_operator(const Eigen::VectorXd &d)
{
  Triplets t;
  t.reserve(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
  {
    t.emplace_back(i, i, d(i));
  }
  return from_triplets(static_cast<int>(d.size()), static_cast<int>(d.size()), t);
}

double max_abs(const SparseOperator &op)
{
  double m = 0.0;
  for (int k = 0; k < op.outerSize(); ++k)
  {
    for (SparseOperator::InnerIterator it(op, k); it; ++it)
    {
      m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

double max_relative_deviation(const SparseOperator &a, const SparseOperator &b)
{
  if (a.rows() != b.rows() || a.cols() != b.cols())
  {
    throw std::invalid_argument("operator dimensions differ");
  }
  const double scale = std::max(max_abs(b), max_abs(a));
  if (scale == 0.0)
  {
    return 0.0;
  }
  SparseOperator diff = a - b;
  return max_abs(diff) / scale;
}

void write_coordinate(std::ostream &out, const SparseOperator &op)
{
  out << std::setprecision(17);
  for (int k = 0; k < op.outerSize(); ++k)
  {
    for (SparseOperator::InnerIterator it(op, k); it; ++it)
    {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

void write_vector(std::ostream &out, const Eigen::VectorXd &v)
{
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i)
  {
    out << i << ' ' << v(i) << '\n';
  }
}

}  // namespace mfdmg
