// Homogeneous mobility for several interaction strengths: the z0-averaged
// response resonates only at omega_l whatever the coupling.

#include <cstdio>
#include <vector>

#include "trapkohn/trapkohn.hpp"

int main() {
  using namespace trapkohn;
  const double z = 0.3;
  std::printf("%8s %8s %24s %24s %10s\n", "V", "omega", "Im mu (quadrature)", "Im mu (Kohn form)", "rel err");
  for (double v : {0.0, 0.3, 0.6, -0.4}) {
    ModelParams p;
    p.vtilde_c = v;
    const DerivedConstants dc = derive_constants(p);
    for (double omega : {0.5, 1.3, 2.1}) {
      const ComplexFrequency f(omega, 1e-6);
      const cplx quad = mobility_homogeneous_quadrature(z, f, p, dc);
      const cplx exact = mobility_homogeneous_analytic(z, f, p, dc);
      std::printf("%8.2f %8.2f %24.16e %24.16e %10.2e\n", v, omega, quad.imag(), exact.imag(),
                  std::abs(quad - exact) / std::abs(exact));
    }
  }
}
