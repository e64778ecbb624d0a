#include "flatsim/sde.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "flatsim/common.hpp"

namespace flatsim {

void euler_maruyama_step(std::span<double> x, const DriftField& drift, double theta,
                         double dt, double t, RngStream& rng) {
  require(drift.dimension == static_cast<int>(x.size()),
          "euler_maruyama_step: drift dimension mismatch");
  require(std::isfinite(theta) && theta >= 0.0, "euler_maruyama_step: theta must be >= 0");
  require(std::isfinite(dt) && dt > 0.0, "euler_maruyama_step: dt must be positive");
  std::vector<double> b(x.size());
  drift.eval(x, t, b);
  if (!all_finite(b)) throw SimulationFault("euler_maruyama_step: non-finite drift");
  const double s = std::sqrt(2.0 * theta * dt);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] += b[i] * dt;
    if (s > 0.0) x[i] += s * rng.normal();
  }
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int k : nodes) n *= static_cast<std::size_t>(k);
  return n;
}

void GridSpec::validate() const {
  require(dimension() == 1 || dimension() == 2, "GridSpec: one or two dimensions supported");
  require(bounds.size() == nodes.size(), "GridSpec: bounds/nodes size mismatch");
  for (int a = 0; a < dimension(); ++a) {
    require(std::isfinite(bounds[a][0]) && std::isfinite(bounds[a][1]) &&
                bounds[a][1] > bounds[a][0],
            "GridSpec: bounds must be finite with hi > lo");
    require(nodes[a] >= 3, "GridSpec: need at least three nodes per axis");
  }
}

DensityGrid::DensityGrid(GridSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  v_.assign(spec_.size(), 0.0);
}

double DensityGrid::node_weight(std::size_t flat) const {
  double w = 1.0;
  if (spec_.dimension() == 1) {
    const int i = static_cast<int>(flat);
    w = spec_.spacing(0) * ((i == 0 || i == spec_.nodes[0] - 1) ? 0.5 : 1.0);
  } else {
    const int ny = spec_.nodes[1];
    const int i = static_cast<int>(flat) / ny;
    const int j = static_cast<int>(flat) % ny;
    w = spec_.spacing(0) * ((i == 0 || i == spec_.nodes[0] - 1) ? 0.5 : 1.0) *
        spec_.spacing(1) * ((j == 0 || j == spec_.nodes[1] - 1) ? 0.5 : 1.0);
  }
  return w;
}

double DensityGrid::mass() const {
  double m = 0.0;
  for (std::size_t k = 0; k < v_.size(); ++k) m += node_weight(k) * v_[k];
  return m;
}

void DensityGrid::normalize() {
  const double m = mass();
  require(std::isfinite(m) && m > 0.0,
          "DensityGrid::normalize: mass must be positive and finite; "
          "rescale the potential or refine the grid");
  for (double& x : v_) x /= m;
}

double DensityGrid::moment_mean(int axis) const {
  double m = 0.0, num = 0.0;
  for (std::size_t k = 0; k < v_.size(); ++k) {
    const double w = node_weight(k) * v_[k];
    const int i = spec_.dimension() == 1 ? static_cast<int>(k)
                  : axis == 0            ? static_cast<int>(k) / spec_.nodes[1]
                                         : static_cast<int>(k) % spec_.nodes[1];
    num += w * spec_.coord(axis, i);
    m += w;
  }
  require(m > 0.0, "moment_mean: zero mass");
  return num / m;
}

double DensityGrid::moment_variance(int axis) const {
  const double mu = moment_mean(axis);
  double m = 0.0, num = 0.0;
  for (std::size_t k = 0; k < v_.size(); ++k) {
    const double w = node_weight(k) * v_[k];
    const int i = spec_.dimension() == 1 ? static_cast<int>(k)
                  : axis == 0            ? static_cast<int>(k) / spec_.nodes[1]
                                         : static_cast<int>(k) % spec_.nodes[1];
    const double d = spec_.coord(axis, i) - mu;
    num += w * d * d;
    m += w;
  }
  return num / m;
}

double DensityGrid::l1_distance(const DensityGrid& other) const {
  require(spec_.nodes == other.spec_.nodes && spec_.bounds == other.spec_.bounds,
          "l1_distance: grids must match");
  double s = 0.0;
  for (std::size_t k = 0; k < v_.size(); ++k)
    s += node_weight(k) * std::abs(v_[k] - other.v_[k]);
  return s;
}

namespace {

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void DensityGrid::write_csv(std::ostream& os, std::span<const std::string> comments) const {
  for (const auto& c : comments) os << "# " << c << "\n";
  if (spec_.dimension() == 1) {
    os << "x,density\n";
    for (int i = 0; i < spec_.nodes[0]; ++i)
      os << g17(spec_.coord(0, i)) << ',' << g17(at(i)) << "\n";
  } else {
    os << "x,y,density\n";
    for (int i = 0; i < spec_.nodes[0]; ++i)
      for (int j = 0; j < spec_.nodes[1]; ++j)
        os << g17(spec_.coord(0, i)) << ',' << g17(spec_.coord(1, j)) << ','
           << g17(at(i, j)) << "\n";
  }
}

namespace {

std::vector<double> sample_potential(const GridSpec& spec, const PotentialFn& f) {
  std::vector<double> fv(spec.size());
  double x[2];
  if (spec.dimension() == 1) {
    for (int i = 0; i < spec.nodes[0]; ++i) {
      x[0] = spec.coord(0, i);
      fv[i] = f(std::span<const double>(x, 1));
    }
  } else {
    const int ny = spec.nodes[1];
    for (int i = 0; i < spec.nodes[0]; ++i)
      for (int j = 0; j < spec.nodes[1]; ++j) {
        x[0] = spec.coord(0, i);
        x[1] = spec.coord(1, j);
        fv[static_cast<std::size_t>(i) * ny + j] = f(std::span<const double>(x, 2));
      }
  }
  require(all_finite(fv), "potential must be finite on the grid");
  return fv;
}

}  // namespace

DensityGrid make_gibbs_density(const GridSpec& spec, const PotentialFn& f, double beta) {
  require(std::isfinite(beta) && beta > 0.0, "make_gibbs_density: beta must be positive");
  DensityGrid g(spec);
  const auto fv = sample_potential(g.grid(), f);
  double fmin = fv[0];
  for (double v : fv) fmin = std::min(fmin, v);
  auto vals = g.values();
  for (std::size_t k = 0; k < fv.size(); ++k) vals[k] = std::exp(-beta * (fv[k] - fmin));
  g.normalize();
  return g;
}

double fokker_planck_step_limit(const GridSpec& spec, double theta) {
  require(std::isfinite(theta) && theta > 0.0, "fokker_planck_step_limit: theta must be > 0");
  double h = spec.spacing(0);
  for (int a = 1; a < spec.dimension(); ++a) h = std::min(h, spec.spacing(a));
  return h * h / (4.0 * theta);
}

void fokker_planck_evolve(DensityGrid& u, const PotentialFn& f, double theta, double dt,
                          long steps) {
  const GridSpec& spec = u.grid();
  require(std::isfinite(theta) && theta > 0.0, "fokker_planck_evolve: theta must be > 0");
  require(std::isfinite(dt) && dt > 0.0, "fokker_planck_evolve: dt must be positive");
  require(steps >= 0, "fokker_planck_evolve: steps must be >= 0");
  const double limit = fokker_planck_step_limit(spec, theta);
  require(dt <= limit, "fokker_planck_evolve: dt exceeds the explicit step limit " +
                           std::to_string(limit));
  const auto fv = sample_potential(spec, f);
  const double beta = 1.0 / theta;

  // Edge flux through midpoint-fitted weights: with g = u exp(beta f), the flux
  // theta * exp(-beta f_mid) * dg/dx reduces to (theta/h) * (u_hi e^{+beta df/2} -
  // u_lo e^{-beta df/2}); it vanishes identically on the grid Gibbs density.
  struct EdgeAxis {
    std::vector<double> hi, lo;  // fitted weights per edge
    double inv_h = 0.0;
  };
  std::vector<EdgeAxis> axes(spec.dimension());
  const int nx = spec.nodes[0];
  const int ny = spec.dimension() == 2 ? spec.nodes[1] : 1;
  for (int a = 0; a < spec.dimension(); ++a) {
    const int n_edges = (a == 0 ? nx - 1 : nx) * (a == 0 ? ny : ny - 1);
    axes[a].hi.resize(n_edges);
    axes[a].lo.resize(n_edges);
    axes[a].inv_h = 1.0 / spec.spacing(a);
    int e = 0;
    const int di = a == 0 ? ny : 1;
    const int ilim = a == 0 ? nx - 1 : nx;
    const int jlim = a == 0 ? ny : ny - 1;
    for (int i = 0; i < ilim; ++i)
      for (int j = 0; j < jlim; ++j, ++e) {
        const std::size_t k = static_cast<std::size_t>(i) * ny + j;
        const double df = fv[k + di] - fv[k];
        axes[a].hi[e] = std::exp(+0.5 * beta * df);
        axes[a].lo[e] = std::exp(-0.5 * beta * df);
        require(std::isfinite(axes[a].hi[e]) && std::isfinite(axes[a].lo[e]),
                "fokker_planck_evolve: potential jump between neighbors overflows the "
                "fitted weights; refine the grid");
      }
  }

  auto vals = u.values();
  std::vector<double> net(vals.size());
  for (long s = 0; s < steps; ++s) {
    std::fill(net.begin(), net.end(), 0.0);
    for (int a = 0; a < spec.dimension(); ++a) {
      const int di = a == 0 ? ny : 1;
      const int ilim = a == 0 ? nx - 1 : nx;
      const int jlim = a == 0 ? ny : ny - 1;
      const double scale = theta * axes[a].inv_h * axes[a].inv_h;
      int e = 0;
      for (int i = 0; i < ilim; ++i)
        for (int j = 0; j < jlim; ++j, ++e) {
          const std::size_t k = static_cast<std::size_t>(i) * ny + j;
          // Flux times 1/h: contributes du/dt = (phi_right - phi_left) / h per node
          // with half cells (factor 2) at the boundary nodes.
          const double phi = scale * (vals[k + di] * axes[a].hi[e] - vals[k] * axes[a].lo[e]);
          const int pos = a == 0 ? i : j;
          const int last = (a == 0 ? nx : ny) - 2;
          net[k] += phi * (pos == 0 ? 2.0 : 1.0);
          net[k + di] -= phi * (pos == last ? 2.0 : 1.0);
        }
    }
    for (std::size_t k = 0; k < vals.size(); ++k) vals[k] += dt * net[k];
  }
}

}  // namespace flatsim
