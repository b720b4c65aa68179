#include "ncskit/lmi.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace ncskit {

Eigen::MatrixXd AffineMatrixConstraint::evaluate(const Eigen::VectorXd& assignment) const {
  Eigen::MatrixXd value = constant;
  for (const auto& [id, coeff] : coefficients) {
    value += assignment(id) * coeff;
  }
  return value;
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  constant_ += other.constant_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& other) {
  constant_ -= other.constant_;
  for (const auto& [id, coeff] : other.terms_) {
    terms_.emplace_back(id, -coeff);
  }
  return *this;
}

LinearExpr& LinearExpr::operator*=(double factor) {
  constant_ *= factor;
  for (auto& [id, coeff] : terms_) {
    (void)id;
    coeff *= factor;
  }
  return *this;
}

AffineMatrix AffineMatrix::constant(const Eigen::MatrixXd& value) {
  AffineMatrix m(static_cast<int>(value.rows()), static_cast<int>(value.cols()));
  for (int r = 0; r < m.rows_; ++r) {
    for (int c = 0; c < m.cols_; ++c) {
      m.at(r, c) = LinearExpr(value(r, c));
    }
  }
  return m;
}

void AffineMatrix::set_block(int row0, int col0, const AffineMatrix& block) {
  if (row0 + block.rows() > rows_ || col0 + block.cols() > cols_) {
    throw std::invalid_argument("AffineMatrix::set_block: block out of range");
  }
  for (int r = 0; r < block.rows(); ++r) {
    for (int c = 0; c < block.cols(); ++c) {
      at(row0 + r, col0 + c) = block.at(r, c);
    }
  }
}

AffineMatrix AffineMatrix::transpose() const {
  AffineMatrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      t.at(c, r) = at(r, c);
    }
  }
  return t;
}

AffineMatrix& AffineMatrix::operator+=(const AffineMatrix& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw std::invalid_argument("AffineMatrix: dimension mismatch in addition");
  }
  for (size_t i = 0; i < entries_.size(); ++i) {
    entries_[i] += other.entries_[i];
  }
  return *this;
}

AffineMatrix& AffineMatrix::operator-=(const AffineMatrix& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw std::invalid_argument("AffineMatrix: dimension mismatch in subtraction");
  }
  for (size_t i = 0; i < entries_.size(); ++i) {
    entries_[i] -= other.entries_[i];
  }
  return *this;
}

AffineMatrix operator*(double factor, AffineMatrix m) {
  for (auto& entry : m.entries_) {
    entry *= factor;
  }
  return m;
}

AffineMatrix operator*(const Eigen::MatrixXd& lhs, const AffineMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) {
    throw std::invalid_argument("AffineMatrix: dimension mismatch in product");
  }
  AffineMatrix result(static_cast<int>(lhs.rows()), rhs.cols());
  for (int r = 0; r < result.rows(); ++r) {
    for (int c = 0; c < result.cols(); ++c) {
      LinearExpr sum;
      for (int k = 0; k < rhs.rows(); ++k) {
        const double factor = lhs(r, k);
        if (factor != 0.0) {
          LinearExpr term = rhs.at(k, c);
          term *= factor;
          sum += term;
        }
      }
      result.at(r, c) = sum;
    }
  }
  return result;
}

AffineMatrixConstraint AffineMatrix::to_constraint(int num_variables) const {
  if (rows_ != cols_) {
    throw std::invalid_argument("AffineMatrix::to_constraint: matrix must be square");
  }
  AffineMatrixConstraint constraint;
  constraint.size = rows_;
  constraint.constant = Eigen::MatrixXd::Zero(rows_, rows_);

  std::map<int, Eigen::MatrixXd> by_variable;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const LinearExpr& e = at(r, c);
      constraint.constant(r, c) += e.constant();
      for (const auto& [id, coeff] : e.terms()) {
        if (id < 0 || id >= num_variables) {
          throw std::invalid_argument("AffineMatrix::to_constraint: variable id out of range");
        }
        auto [it, inserted] = by_variable.try_emplace(id, Eigen::MatrixXd::Zero(rows_, rows_));
        it->second(r, c) += coeff;
      }
    }
  }
  constraint.coefficients.assign(by_variable.begin(), by_variable.end());

  auto check_symmetric = [](const Eigen::MatrixXd& m) {
    return m == m.transpose().eval();
  };
  if (!check_symmetric(constraint.constant)) {
    throw std::logic_error("AffineMatrix::to_constraint: constant block is not symmetric");
  }
  for (const auto& [id, coeff] : constraint.coefficients) {
    (void)id;
    if (!check_symmetric(coeff)) {
      throw std::logic_error("AffineMatrix::to_constraint: coefficient block is not symmetric");
    }
  }
  return constraint;
}

MatrixVar MatrixVar::full(VariableRegistry& registry, const std::string& name, int rows,
                          int cols) {
  MatrixVar var;
  var.rows_ = rows;
  var.cols_ = cols;
  var.ids_.resize(size_t(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      var.ids_[size_t(r) * cols + c] =
          registry.add(name + "[" + std::to_string(r) + "," + std::to_string(c) + "]");
    }
  }
  return var;
}

MatrixVar MatrixVar::symmetric(VariableRegistry& registry, const std::string& name, int dim) {
  MatrixVar var;
  var.rows_ = dim;
  var.cols_ = dim;
  var.ids_.resize(size_t(dim) * dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c <= r; ++c) {
      const int id =
          registry.add(name + "[" + std::to_string(r) + "," + std::to_string(c) + "]");
      var.ids_[size_t(r) * dim + c] = id;
      var.ids_[size_t(c) * dim + r] = id;
    }
  }
  return var;
}

AffineMatrix MatrixVar::expr() const {
  AffineMatrix m(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      m.at(r, c) = LinearExpr::variable(id(r, c));
    }
  }
  return m;
}

Eigen::MatrixXd MatrixVar::value(const Eigen::VectorXd& assignment) const {
  Eigen::MatrixXd m(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      m(r, c) = assignment(id(r, c));
    }
  }
  return m;
}

void dump_constraint_system(std::ostream& out, const VariableRegistry& registry,
                            const std::vector<AffineMatrixConstraint>& constraints) {
  char buffer[64];
  auto format = [&buffer](double v) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return std::string(buffer);
  };
  auto lower_triangle = [&](const Eigen::MatrixXd& m) {
    std::string line;
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c <= r; ++c) {
        line += format(m(r, c));
        line += (r == m.rows() - 1 && c == r) ? "" : " ";
      }
    }
    return line;
  };

  out << "ncskit-lmi-system v1\n";
  out << "variables " << registry.size() << "\n";
  for (int id = 0; id < registry.size(); ++id) {
    out << "var " << id << " " << registry.name(id) << "\n";
  }
  out << "constraints " << constraints.size() << "\n";
  out << "# each matrix is dense symmetric, row-major lower triangle\n";
  for (size_t c = 0; c < constraints.size(); ++c) {
    const auto& constraint = constraints[c];
    out << "constraint " << c << " size " << constraint.size << " terms "
        << constraint.coefficients.size() << "\n";
    out << "const " << lower_triangle(constraint.constant) << "\n";
    for (const auto& [id, coeff] : constraint.coefficients) {
      out << "coeff " << id << " " << lower_triangle(coeff) << "\n";
    }
  }
}

}  // namespace ncskit
