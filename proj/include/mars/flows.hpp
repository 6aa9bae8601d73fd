#pragma once

#include <functional>
#include <string>

#include "mars/geometry.hpp"

namespace mars {

// Prescribed velocity field on the unit cube. `sup_norm` is the analytic
// bound on the largest velocity component, used for the CFL time step;
// `period` is the reversal period T when the field carries the cos(pi t/T)
// factor.
struct VelocityField {
  std::string name;
  double sup_norm = 1.0;
  double period = 0.0;
  std::function<Vec3(const Vec3&, double)> eval;

  Vec3 operator()(const Vec3& x, double t) const { return eval(x, t); }
};

// Single-vortex shear about the axis x = y = 0.5, reversing at T/2.
VelocityField vortical_shear_field(double period);

// Fully 3D deformation field, reversing at T/2.
VelocityField deformation_field(double period);

// Constant translation; advection is exact for any step size.
VelocityField constant_field(const Vec3& velocity);

// Rigid rotation about the z axis through the origin, u = (-y, x, 0).
VelocityField rotation_field();

// Classical 4-stage Runge-Kutta step of dx/dt = u(x, t) over [t, t + dt].
Vec3 rk4_step(const VelocityField& field, const Vec3& x, double t, double dt);

}  // namespace mars
