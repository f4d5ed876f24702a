#include "gaussopt/expm.hpp"

#include <array>
#include <cmath>

namespace gaussopt {

namespace {

using Mat = Eigen::MatrixXcd;

double one_norm(const Mat& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Evaluates the order-m diagonal Pade approximant r(A) = (V-U)^{-1}(V+U)
// given the odd/even polynomial parts U (already multiplied by A) and V.
Mat pade_solve(const Mat& u, const Mat& v) {
  return (v - u).partialPivLu().solve(v + u);
}

Mat pade_low(const Mat& a, const std::array<double, 14>& b, int m) {
  const int n = static_cast<int>(a.rows());
  const Mat id = Mat::Identity(n, n);
  Mat a2 = a * a;
  Mat odd = b[1] * id;   // coefficient of A^1, A^3, ...
  Mat even = b[0] * id;  // coefficient of A^0, A^2, ...
  Mat a_pow = Mat::Identity(n, n);
  for (int k = 2; k <= m; k += 2) {
    a_pow = a_pow * a2;  // A^k
    even += b[k] * a_pow;
    if (k + 1 <= m) odd += b[k + 1] * a_pow;
  }
  return pade_solve(a * odd, even);
}

Mat pade13(const Mat& a) {
  static const std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const int n = static_cast<int>(a.rows());
  const Mat id = Mat::Identity(n, n);
  Mat a2 = a * a;
  Mat a4 = a2 * a2;
  Mat a6 = a4 * a2;
  Mat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
               b[5] * a4 + b[3] * a2 + b[1] * id);
  Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
          b[2] * a2 + b[0] * id;
  return pade_solve(u, v);
}

}  // namespace

Eigen::MatrixXcd matrix_exp(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("matrix_exp: matrix must be square");
  if (a.rows() == 0) return a;

  const double norm = one_norm(a);
  static const std::array<double, 14> b3 = {120, 60, 12, 1};
  static const std::array<double, 14> b5 = {30240, 15120, 3360, 420, 30, 1};
  static const std::array<double, 14> b7 = {17297280, 8648640, 1995840, 277200,
                                            25200,    1512,    56,      1};
  static const std::array<double, 14> b9 = {
      17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
      2162160.0,     110880.0,     3960.0,       90.0,        1.0};

  if (norm <= 1.495585217958292e-2) return pade_low(a, b3, 3);
  if (norm <= 2.539398330063230e-1) return pade_low(a, b5, 5);
  if (norm <= 9.504178996162932e-1) return pade_low(a, b7, 7);
  if (norm <= 2.097847961257068e0) return pade_low(a, b9, 9);

  const double theta13 = 5.371920351148152;
  int squarings = 0;
  Mat scaled = a;
  if (norm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    scaled *= std::pow(2.0, -squarings);
  }
  Mat result = pade13(scaled);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace gaussopt
