#pragma once

namespace specdecay {

/// Canonical algebraic decay exponent sigma of a datum u0:
///
///   ||e^{t Delta} u0||^2 ~ (1+t)^{-sigma},
///   ||Delta_j u0||       ~ 2^{sigma j},
///   int_{|xi|<=rho} |u0^|^2 ~ rho^{2 sigma}.
///
/// Two alpha conventions circulate for the same quantity. The "energy"
/// convention states decay of the squared norm, so alpha == sigma. The
/// "amplitude" convention states decay of the unsquared norm,
/// ||u(t)|| ~ (1+t)^{-alpha}, so alpha == sigma / 2. Use the named
/// constructors so call sites say which one they mean.
class DecayExponent {
 public:
  constexpr DecayExponent() = default;

  static constexpr DecayExponent squared(double sigma) { return DecayExponent(sigma); }
  static constexpr DecayExponent from_energy_alpha(double alpha) { return DecayExponent(alpha); }
  static constexpr DecayExponent from_amplitude_alpha(double alpha) { return DecayExponent(2.0 * alpha); }

  constexpr double sigma() const { return sigma_; }
  constexpr double energy_alpha() const { return sigma_; }
  constexpr double amplitude_alpha() const { return 0.5 * sigma_; }

  friend constexpr bool operator==(DecayExponent, DecayExponent) = default;

 private:
  constexpr explicit DecayExponent(double sigma) : sigma_(sigma) {}
  double sigma_ = 0.0;
};

}  // namespace specdecay
