#include "siggame/reference_case.hpp"

namespace siggame {

MatrixGameSpec reference_case_4d() {
  MatrixGameSpec spec;
  spec.lambda = 1.0311;
  spec.source_cov = Eigen::MatrixXd{{1.6421, 0.1299, 0.5713, 0.2305},
                                    {0.1299, 1.4803, 0.6810, 0.4749},
                                    {0.5713, 0.6810, 1.7312, 0.4292},
                                    {0.2305, 0.4749, 0.4292, 1.3515}};
  spec.noise_cov = Eigen::MatrixXd{{1.2742, 0.1868, 0.2318, 0.0559},
                                   {0.1868, 1.8266, 0.5955, 0.3091},
                                   {0.2318, 0.5955, 1.2377, 0.4951},
                                   {0.0559, 0.3091, 0.4951, 1.5336}};
  spec.bias = Eigen::VectorXd::Zero(4);
  return spec;
}

std::array<Eigen::MatrixXd, 2> reference_fixed_points_4d() {
  Eigen::MatrixXd first{{-0.1543, 0.1762, 0.0606, 0.1117},
                        {0.1602, 0.0159, 0.1036, 0.0279},
                        {-0.2000, -0.1879, -0.2700, -0.1565},
                        {0.0603, 0.1052, 0.1221, 0.0824}};
  Eigen::MatrixXd second{{-0.2431, 0.0738, -0.0752, 0.0285},
                         {0.0293, -0.1351, -0.0966, -0.0948},
                         {0.1520, 0.2181, 0.2682, 0.1735},
                         {-0.1003, -0.0801, -0.1236, -0.0683}};
  return {first, second};
}

}  // namespace siggame
