#ifndef MFDMG_SPARSE_HPP
#define MFDMG_SPARSE_HPP

#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace mfdmg
{

using SparseOperator = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplets = std::vector<Eigen::Triplet<double>>;

SparseOperator from_triplets(int rows, int cols, const Triplets &entries);

// Submatrix with the given row and column index lists (in that order).
SparseOperator select(const SparseOperator &op, const std::vector<int> &rows,
                      const std::vector<int> &cols);

SparseOperator diagonal_operator(const Eigen::VectorXd &d);

double max_abs(const SparseOperator &op);

// max |a_ij - b_ij| / max |b_ij| over the union of both patterns.
double max_relative_deviation(const SparseOperator &a, const SparseOperator &b);

// Coordinate text format: one "row col value" record per stored entry, 17 digits.
void write_coordinate(std::ostream &out, const SparseOperator &op);
void write_vector(std::ostream &out, const Eigen::VectorXd &v);

}  // namespace mfdmg

#endif  // MFDMG_SPARSE_HPP
