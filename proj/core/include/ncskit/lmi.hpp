#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ncskit {

/// Registry of named scalar decision variables. Ids are dense indices.
class VariableRegistry {
 public:
  int add(std::string name) {
    names_.push_back(std::move(name));
    return static_cast<int>(names_.size()) - 1;
  }
  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int id) const { return names_[static_cast<size_t>(id)]; }

 private:
  std::vector<std::string> names_;
};

/// One symmetric affine matrix inequality: constant + sum_v x_v * coeff_v,
/// required positive definite. All matrices are dense, symmetric and share
/// the block dimension.
struct AffineMatrixConstraint {
  int size = 0;
  Eigen::MatrixXd constant;
  std::vector<std::pair<int, Eigen::MatrixXd>> coefficients;  // variable id -> matrix

  /// Evaluates the constraint at a full assignment vector.
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& assignment) const;
};

/// Scalar affine expression over registry variables.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}
  static LinearExpr variable(int id, double coeff = 1.0) {
    LinearExpr e;
    e.terms_.emplace_back(id, coeff);
    return e;
  }

  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator-=(const LinearExpr& other);
  LinearExpr& operator*=(double factor);
  friend LinearExpr operator+(LinearExpr lhs, const LinearExpr& rhs) { return lhs += rhs; }
  friend LinearExpr operator-(LinearExpr lhs, const LinearExpr& rhs) { return lhs -= rhs; }
  friend LinearExpr operator*(double factor, LinearExpr e) { return e *= factor; }

  double constant() const { return constant_; }
  const std::vector<std::pair<int, double>>& terms() const { return terms_; }

 private:
  double constant_ = 0.0;
  std::vector<std::pair<int, double>> terms_;  // unsorted, may repeat ids
};

/// Dense matrix whose entries are LinearExprs. Only the operations needed to
/// assemble block LMIs are provided: block writes, transpose, addition,
/// subtraction, scalar multiply, and multiplication by constant matrices.
class AffineMatrix {
 public:
  AffineMatrix() = default;
  AffineMatrix(int rows, int cols) : rows_(rows), cols_(cols), entries_(size_t(rows) * cols) {}
  static AffineMatrix constant(const Eigen::MatrixXd& value);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  LinearExpr& at(int r, int c) { return entries_[size_t(r) * cols_ + c]; }
  const LinearExpr& at(int r, int c) const { return entries_[size_t(r) * cols_ + c]; }

  void set_block(int row0, int col0, const AffineMatrix& block);
  AffineMatrix transpose() const;

  AffineMatrix& operator+=(const AffineMatrix& other);
  AffineMatrix& operator-=(const AffineMatrix& other);
  friend AffineMatrix operator+(AffineMatrix lhs, const AffineMatrix& rhs) { return lhs += rhs; }
  friend AffineMatrix operator-(AffineMatrix lhs, const AffineMatrix& rhs) { return lhs -= rhs; }
  friend AffineMatrix operator*(double factor, AffineMatrix m);
  friend AffineMatrix operator*(const Eigen::MatrixXd& lhs, const AffineMatrix& rhs);

  /// Scatters into the dense constraint form. Requires a square matrix whose
  /// mirrored entries carry identical linear forms; the produced constant and
  /// coefficient matrices are then exactly symmetric.
  AffineMatrixConstraint to_constraint(int num_variables) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<LinearExpr> entries_;
};

/// Matrix-valued decision variable: a grid of registry ids. Symmetric
/// variables share one id per unordered index pair.
class MatrixVar {
 public:
  static MatrixVar full(VariableRegistry& registry, const std::string& name, int rows, int cols);
  static MatrixVar symmetric(VariableRegistry& registry, const std::string& name, int dim);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int id(int r, int c) const { return ids_[size_t(r) * cols_ + c]; }

  AffineMatrix expr() const;

  /// Reads the matrix value out of a full assignment vector.
  Eigen::MatrixXd value(const Eigen::VectorXd& assignment) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> ids_;
};

/// Writes a constraint system in a self-describing portable text format:
/// header with counts, variable names, then each constraint as dense
/// symmetric matrices in row-major lower-triangle order.
void dump_constraint_system(std::ostream& out, const VariableRegistry& registry,
                            const std::vector<AffineMatrixConstraint>& constraints);

}  // namespace ncskit
