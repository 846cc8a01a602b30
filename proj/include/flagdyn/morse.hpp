#pragma once

// Critical points V_π, closed-form Jacobian/Hessian spectra and their
// finite-difference checks, Morse and Poincaré polynomials, and the
// perfectness certificate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flagdyn/flow.hpp"
#include "flagdyn/skeleton.hpp"

namespace flagdyn {

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<std::int64_t> coeffs);

  // 1 + t + … + t^d
  static Polynomial geometric(int d);

  const std::vector<std::int64_t>& coeffs() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  std::int64_t operator[](int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : 0; }
  std::int64_t eval(std::int64_t t) const;
  Polynomial operator*(const Polynomial& o) const;
  bool operator==(const Polynomial& o) const = default;
  std::string to_string() const;

 private:
  void trim();
  std::vector<std::int64_t> c_;
};

// λ_i = r^{n+1−2i} (determinant one); symplectic: λ_i = r^{n+1−i}, λ_{i+n} = 1/λ_i.
SpectralData geometric_spectrum(int n, bool symplectic, double r = 2.0);
// Positive values, sorted into the library order and scaled to determinant one;
// for symplectic data each value λ is paired with 1/λ on the conjugate direction.
SpectralData normalized_spectrum(std::vector<double> values, bool symplectic);

std::vector<Perm> fixed_points(int n, int k, bool symplectic, std::uint64_t budget = 100'000);

// X_π: column i is e_{π_i}.
Frame perm_frame(const Perm& p);

// Skew generator of the chart direction belonging to a move out of p.
MatX chart_generator(const Perm& p, const Move& m);

std::vector<double> jacobian_spectrum(const SpectralData& a, const Perm& p);
std::vector<double> hessian_spectrum(const SpectralData& a, const Weights& b, const Perm& p);

// Central differences in the chart θ ↦ exp(Σ θ_m Ω_m) X_π, directions in the
// order of moves(p).
MatX numerical_jacobian(const SpectralData& a, const Perm& p, double h = 1e-6);
MatX numerical_hessian(const SpectralData& a, const Weights& b, const Perm& p, double h = 1e-4);

Polynomial poincare_poly(int n, int k, bool symplectic);
Polynomial morse_poly(int n, int k, bool symplectic, std::uint64_t budget = 100'000);

// s ↦ π with π_i the (s_i+1)-th element of C_i, and its inverse.
Perm counting_bijection(int n, int k, bool symplectic, const std::vector<int>& s);
std::vector<int> counting_code(const Perm& p);

struct CriticalReport {
  explicit CriticalReport(Perm p) : perm(std::move(p)) {}

  Perm perm;
  int h = 0;
  std::vector<double> jacobian_eigs;
  std::vector<double> hessian_eigs;
  std::optional<std::vector<double>> numeric_hessian_eigs;
  int morse_index = 0;
  bool nondegenerate = true;
  bool ok = true;
};

struct CertificateCheck {
  std::string name;
  bool pass;
};

struct Certificate {
  int n = 0, k = 0;
  bool symplectic = false;
  Polynomial morse;
  Polynomial poincare;
  bool match = false;
  std::vector<CriticalReport> per_point;
  std::vector<CertificateCheck> checks;

  bool passed() const;
};

struct CertificateOptions {
  std::optional<SpectralData> spectrum;  // default: geometric_spectrum
  std::optional<Weights> weights;        // default: b_i = k + 1 − i
  bool numeric = true;                   // finite-difference Hessians when small
  std::uint64_t numeric_max_points = 400;
  double rel_tol = 1e-4;
  std::uint64_t budget = 100'000;
};

Certificate perfectness_certificate(int n, int k, bool symplectic, const CertificateOptions& opt = {});

}  // namespace flagdyn
