// Copyright 2026 the crsopt authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CRSOPT_LIFT_HPP
#define CRSOPT_LIFT_HPP

#include <Eigen/Dense>

namespace crsopt {

// Complex-to-real lifting convention used everywhere a complex vector f
// enters a cone program: x = [Re f; Im f] (all real parts first).
// The squared norm is preserved: ||x||^2 == ||f||^2.

inline Eigen::VectorXd lift_vector(const Eigen::VectorXcd& f) {
  Eigen::VectorXd x(2 * f.size());
  x.head(f.size()) = f.real();
  x.tail(f.size()) = f.imag();
  return x;
}

inline Eigen::VectorXcd unlift_vector(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size() / 2;
  Eigen::VectorXcd f(n);
  f.real() = x.head(n);
  f.imag() = x.tail(n);
  return f;
}

// Coefficients c such that Re(h^H f) = c . lift_vector(f).
inline Eigen::VectorXd lift_inner_re(const Eigen::VectorXcd& h) {
  Eigen::VectorXd c(2 * h.size());
  c.head(h.size()) = h.real();
  c.tail(h.size()) = h.imag();
  return c;
}

// Coefficients c such that Im(h^H f) = c . lift_vector(f).
inline Eigen::VectorXd lift_inner_im(const Eigen::VectorXcd& h) {
  Eigen::VectorXd c(2 * h.size());
  c.head(h.size()) = -h.imag();
  c.tail(h.size()) = h.real();
  return c;
}

}  // namespace crsopt

#endif  // CRSOPT_LIFT_HPP
