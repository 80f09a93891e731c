#include "edlab/wasserstein.hpp"

#include <cmath>
#include <vector>

#include "edlab/error.hpp"

namespace edlab {

double wasserstein2(std::span<const double> atoms_a, std::span<const double> masses_a,
                    std::span<const double> atoms_b, std::span<const double> masses_b) {
  if (atoms_a.size() != masses_a.size() || atoms_b.size() != masses_b.size() || atoms_a.empty() ||
      atoms_b.empty()) {
    throw PreconditionError("wasserstein2: atoms and masses must be non-empty and equal length");
  }
  double total_a = 0.0;
  double total_b = 0.0;
  for (double m : masses_a) total_a += m;
  for (double m : masses_b) total_b += m;
  if (!(total_a > 0.0) || std::abs(total_a - total_b) > 1e-9 * total_a) {
    throw PreconditionError("wasserstein2: measures must have equal positive mass");
  }

  // Walk both cumulative distributions; each step transports the smaller
  // remaining mass between the current atoms.
  std::size_t i = 0;
  std::size_t j = 0;
  double left_a = masses_a[0] / total_a;
  double left_b = masses_b[0] / total_b;
  double cost = 0.0;
  while (i < atoms_a.size() && j < atoms_b.size()) {
    const double moved = std::min(left_a, left_b);
    const double d = atoms_a[i] - atoms_b[j];
    cost += moved * d * d;
    left_a -= moved;
    left_b -= moved;
    if (left_a <= left_b) {
      if (++i < atoms_a.size()) left_a += masses_a[i] / total_a;
    } else {
      if (++j < atoms_b.size()) left_b += masses_b[j] / total_b;
    }
  }
  return std::sqrt(std::max(cost, 0.0));
}

namespace {

// One cell of a piecewise-linear quantile function: Q(t) runs from x0 to x1 over [t0, t1].
struct Piece {
  double t0;
  double t1;
  double x0;
  double x1;
  [[nodiscard]] double at(double t) const { return x0 + (t - t0) / (t1 - t0) * (x1 - x0); }
};

std::vector<Piece> quantile_pieces(std::span<const double> centers, std::span<const double> masses,
                                   double width) {
  double total = 0.0;
  for (double m : masses) total += m;
  std::vector<Piece> out;
  double t = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (masses[i] <= 0.0) continue;
    const double next = t + masses[i] / total;
    out.push_back({t, next, centers[i] - 0.5 * width, centers[i] + 0.5 * width});
    t = next;
  }
  out.back().t1 = 1.0;
  return out;
}

}  // namespace

double wasserstein2_cells(std::span<const double> centers_a, std::span<const double> masses_a,
                          double width_a, std::span<const double> centers_b,
                          std::span<const double> masses_b, double width_b) {
  if (centers_a.size() != masses_a.size() || centers_b.size() != masses_b.size() || centers_a.empty() ||
      centers_b.empty()) {
    throw PreconditionError("wasserstein2: atoms and masses must be non-empty and equal length");
  }
  if (!(width_a > 0.0) || !(width_b > 0.0)) throw PreconditionError("wasserstein2: cell widths must be positive");
  double total_a = 0.0;
  double total_b = 0.0;
  for (double m : masses_a) {
    if (m < 0.0) throw PreconditionError("wasserstein2: negative mass");
    total_a += m;
  }
  for (double m : masses_b) {
    if (m < 0.0) throw PreconditionError("wasserstein2: negative mass");
    total_b += m;
  }
  if (!(total_a > 0.0) || std::abs(total_a - total_b) > 1e-9 * total_a) {
    throw PreconditionError("wasserstein2: measures must have equal positive mass");
  }
  const auto pa = quantile_pieces(centers_a, masses_a, width_a);
  const auto pb = quantile_pieces(centers_b, masses_b, width_b);

  // Merge the two breakpoint sets; on each common interval the difference of
  // the quantile functions is linear, so its square integrates exactly.
  double cost = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  double t = 0.0;
  while (i < pa.size() && j < pb.size()) {
    const double end = std::min(pa[i].t1, pb[j].t1);
    if (end > t) {
      const double d0 = pa[i].at(t) - pb[j].at(t);
      const double d1 = pa[i].at(end) - pb[j].at(end);
      cost += (end - t) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
      t = end;
    }
    if (pa[i].t1 <= end) ++i;
    if (j < pb.size() && pb[j].t1 <= end) ++j;
  }
  return std::sqrt(std::max(cost, 0.0));
}

double wasserstein2(const ProbabilityDistribution& a, const ProbabilityDistribution& b) {
  std::vector<double> ma(a.size());
  std::vector<double> mb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ma[i] = a.mass(i);
  for (std::size_t j = 0; j < b.size(); ++j) mb[j] = b.mass(j);
  return wasserstein2_cells(a.support(), ma, a.spacing(), b.support(), mb, b.spacing());
}

}  // namespace edlab
