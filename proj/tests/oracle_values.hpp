#pragma once

// Reference values frozen from 50-digit evaluations in oracles/gen_grading.py.

namespace oracle {

struct GradingPoint {
  double s;
  int panels;
  int p;
  double w;
  double w_prime;
};

inline constexpr GradingPoint kGrading[] = {
  {1.5707963267948966192, 1, 2, 0.62831853071795864769, 0.96},
  {1.0, 1, 3, 0.13782432799801186797, 0.42438482459332064424},
  {0.3, 4, 2, 0.082919665103796395525, 0.64722794624556645935},
  {4.0, 3, 5, 4.1880134445124899527, 0.021064241455857342854},
};

}  // namespace oracle
