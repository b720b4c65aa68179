#include "ncskit/matrix_exp.hpp"

#include <cmath>
#include <stdexcept>

namespace ncskit {

namespace {

// Diagonal Pade(6,6) coefficients for e^x.
constexpr double kPade6[] = {
    1.0, 1.0 / 2.0, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0,
};

Eigen::MatrixXd pade6(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a4 * a2;

  // Even part and odd part of the numerator; denominator uses the same
  // polynomials with the odd part negated.
  const Eigen::MatrixXd even = kPade6[0] * identity + kPade6[2] * a2 + kPade6[4] * a4 + kPade6[6] * a6;
  const Eigen::MatrixXd odd = a * (kPade6[1] * identity + kPade6[3] * a2 + kPade6[5] * a4);

  const Eigen::MatrixXd numerator = even + odd;
  const Eigen::MatrixXd denominator = even - odd;
  return denominator.partialPivLu().solve(numerator);
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("matrix_exponential: matrix must be square");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("matrix_exponential: matrix has non-finite entries");
  }
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  Eigen::MatrixXd result = pade6(a / std::exp2(squarings));
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
  }
  return result;
}

}  // namespace ncskit
