#include "cogarch/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace cogarch {

namespace {

// 15-point Kronrod nodes (positive half) and weights, 7-point Gauss weights.
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWeightsK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWeightsG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double value;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kNodes[i]);
    fv[14 - i] = f(c + h * kNodes[i]);
  }
  fv[7] = f(c);
  double kronrod = kWeightsK[7] * fv[7];
  for (int i = 0; i < 7; ++i) kronrod += kWeightsK[i] * (fv[i] + fv[14 - i]);
  // Gauss nodes are the odd Kronrod nodes.
  double gauss = kWeightsG[3] * fv[7];
  for (int i = 0; i < 3; ++i) gauss += kWeightsG[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  return {h * kronrod, std::abs(h * (kronrod - gauss))};
}

double integrate_rec(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int depth) {
  const PanelResult r = gk15(f, a, b);
  if (r.error <= abs_tol || b - a < 1e-14 * (std::abs(a) + std::abs(b)))
    return r.value;
  if (depth >= 52) throw std::runtime_error("integrate: subdivision limit reached");
  const double c = 0.5 * (a + b);
  return integrate_rec(f, a, c, 0.5 * abs_tol, depth + 1) +
         integrate_rec(f, c, b, 0.5 * abs_tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate: tolerance must be positive");
  if (a == b) return 0.0;
  return integrate_rec(f, a, b, abs_tol, 0);
}

double integrate_half_line(const std::function<double(double)>& f, double a,
                           double initial_width, double abs_tol) {
  if (!(initial_width > 0.0))
    throw std::invalid_argument("integrate_half_line: width must be positive");
  double total = integrate(f, a, a + initial_width, 0.5 * abs_tol);
  double lo = a + initial_width;
  double w = initial_width;
  const double panel_tol = 0.05 * abs_tol;
  int quiet = 0;
  for (int i = 0; i < 80; ++i) {
    const double piece = integrate(f, lo, lo + w, panel_tol);
    total += piece;
    lo += w;
    w *= 2.0;
    quiet = std::abs(piece) <= panel_tol ? quiet + 1 : 0;
    if (quiet >= 3) return total;
  }
  throw std::runtime_error("integrate_half_line: tail failed to decay");
}

}  // namespace cogarch
