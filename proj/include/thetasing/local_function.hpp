#pragma once

#include <string>

#include "thetasing/multi_index.hpp"
#include "thetasing/polynomial.hpp"
#include "thetasing/theta_core.hpp"

namespace thetasing {

/// Anything that can report d_I f(z) for |I| <= order at a point. The
/// singularity and jet computations only talk to this interface, so the
/// theta function and exact polynomial stand-ins are interchangeable.
class LocalFunction {
 public:
  virtual ~LocalFunction() = default;
  virtual int dim() const = 0;
  virtual Jet jet(const CVector& z, int order) const = 0;
};

class ThetaFunction final : public LocalFunction {
 public:
  explicit ThetaFunction(ThetaContext ctx) : ctx_(std::move(ctx)) {}

  int dim() const override { return ctx_.g(); }
  Jet jet(const CVector& z, int order) const override { return theta_jet(ctx_, z, order); }
  const ThetaContext& context() const { return ctx_; }

 private:
  ThetaContext ctx_;
};

/// Polynomial with rational coefficients, differentiated exactly.
class PolynomialFunction final : public LocalFunction {
 public:
  explicit PolynomialFunction(QPolynomial poly) : poly_(std::move(poly)) {}

  int dim() const override { return poly_.dim(); }
  Jet jet(const CVector& z, int order) const override;
  const QPolynomial& polynomial() const { return poly_; }

 private:
  QPolynomial poly_;
};

/// Parses expressions such as "z1^2 + 3/2*z1*z2^2 - z3" in variables z1..zg.
QPolynomial parse_polynomial(const std::string& text, int g);

}  // namespace thetasing
