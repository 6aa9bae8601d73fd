#include "mars/flows.hpp"

#include <cmath>

namespace mars {

VelocityField vortical_shear_field(double period) {
  VelocityField field;
  field.name = "vortical_shear";
  field.sup_norm = 2.0;
  field.period = period;
  field.eval = [period](const Vec3& x, double t) -> Vec3 {
    const double reversal = std::cos(t / period * kPi);
    const double sx = std::sin(kPi * x.x());
    const double sy = std::sin(kPi * x.y());
    const double r = std::sqrt((x.x() - 0.5) * (x.x() - 0.5) +
                               (x.y() - 0.5) * (x.y() - 0.5));
    return {2.0 * sx * sx * std::sin(2.0 * kPi * x.y()) * reversal,
            -std::sin(2.0 * kPi * x.x()) * sy * sy * reversal,
            (1.0 - 2.0 * r) * (1.0 - 2.0 * r) * reversal};
  };
  return field;
}

VelocityField deformation_field(double period) {
  VelocityField field;
  field.name = "deformation";
  field.sup_norm = 2.0;
  field.period = period;
  field.eval = [period](const Vec3& x, double t) -> Vec3 {
    const double reversal = std::cos(t / period * kPi);
    const double sx = std::sin(kPi * x.x());
    const double sy = std::sin(kPi * x.y());
    const double sz = std::sin(kPi * x.z());
    const double s2x = std::sin(2.0 * kPi * x.x());
    const double s2y = std::sin(2.0 * kPi * x.y());
    const double s2z = std::sin(2.0 * kPi * x.z());
    return {2.0 * sx * sx * s2y * s2z * reversal,
            -sy * sy * s2z * s2x * reversal,
            -sz * sz * s2x * s2y * reversal};
  };
  return field;
}

VelocityField constant_field(const Vec3& velocity) {
  VelocityField field;
  field.name = "constant";
  field.sup_norm = velocity.cwiseAbs().maxCoeff();
  field.eval = [velocity](const Vec3&, double) { return velocity; };
  return field;
}

VelocityField rotation_field() {
  VelocityField field;
  field.name = "rotation";
  field.sup_norm = 1.0;
  field.eval = [](const Vec3& x, double) -> Vec3 {
    return {-x.y(), x.x(), 0.0};
  };
  return field;
}

Vec3 rk4_step(const VelocityField& field, const Vec3& x, double t, double dt) {
  const Vec3 k1 = field(x, t);
  const Vec3 k2 = field(x + 0.5 * dt * k1, t + 0.5 * dt);
  const Vec3 k3 = field(x + 0.5 * dt * k2, t + 0.5 * dt);
  const Vec3 k4 = field(x + dt * k3, t + dt);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace mars
