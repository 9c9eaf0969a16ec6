#include "axistable/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "axistable/errors.hpp"
#include "axistable/kernels.hpp"
#include "axistable/quadrature.hpp"
#include "axistable/rng.hpp"

namespace axistable {

namespace {

// cubic B-spline on [-2, 2]: the correlation of two unit hat functions
double bspline3(double w) {
  w = std::abs(w);
  if (w >= 2.0) return 0.0;
  if (w <= 1.0) return (4.0 - 6.0 * w * w + 3.0 * w * w * w) / 6.0;
  const double t = 2.0 - w;
  return t * t * t / 6.0;
}

// \int_a^b u^{-1-alpha} u^p du, 0 < a < b
double power_moment(double a, double b, double alpha, int p) {
  const double q = static_cast<double>(p) - alpha;
  if (std::abs(q) < 1e-12) return std::log(b / a);
  return (std::pow(b, q) - std::pow(a, q)) / q;
}

}  // namespace

std::vector<double> hat_kernel_weights(double alpha, int count) {
  std::vector<double> w(static_cast<std::size_t>(count) + 1, 0.0);
  for (int m = 1; m <= count; ++m) {
    const double gm = bspline3(m);
    auto c = [&](double u) {
      return bspline3(m - u) + bspline3(m + u) - 2.0 * gm;
    };
    // knots of the piecewise-cubic integrand
    std::vector<double> knots{0.0};
    for (double k : {m - 2.0, m - 1.0, static_cast<double>(m), m + 1.0, m + 2.0,
                     2.0 - m, 1.0 - m})
      if (k > 0.0) knots.push_back(k);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
      const double a = knots[j];
      const double b = knots[j + 1];
      if (a == 0.0) {
        // near zero the combination is u^2 (d0 + d1 u): two-point fit, then
        // exact power moments (no singularity once the u^2 factor is pulled)
        const double u1 = b / 3.0, u2 = 2.0 * b / 3.0;
        const double y1 = c(u1) / (u1 * u1), y2 = c(u2) / (u2 * u2);
        const double d1 = (y2 - y1) / (u2 - u1);
        const double d0 = y1 - d1 * u1;
        // p=2: \int u^{1-alpha}, p=3: \int u^{2-alpha}; both finite at 0
        acc += d0 * std::pow(b, 2.0 - alpha) / (2.0 - alpha);
        acc += d1 * std::pow(b, 3.0 - alpha) / (3.0 - alpha);
      } else {
        // smooth piece: Gauss-Legendre is exact to machine precision here
        acc += integrate_gl([&](double u) { return c(u) * std::pow(u, -1.0 - alpha); },
                            a, b, 20);
      }
    }
    // constant tail beyond the last knot (nonzero only when bspline3(m) > 0)
    if (gm > 0.0)
      acc += -2.0 * gm * std::pow(knots.back(), -alpha) / alpha;
    w[static_cast<std::size_t>(m)] = acc;
  }
  return w;
}

double GridForm::mass_total() const {
  double acc = 0.0;
  for (double m : mass) acc += m;
  return acc;
}

void GridForm::apply(const std::vector<double>& v,
                     std::vector<double>& out) const {
  out.assign(v.size(), 0.0);
  const std::size_t nn = static_cast<std::size_t>(n);
  if (dim == 1) {
    kernels::line_apply(kernel_centered, mass, v, out);
    return;
  }
  // axis 1: rows are contiguous
  std::vector<double> line_out(nn);
  for (int j = 0; j < n; ++j) {
    const std::size_t off = static_cast<std::size_t>(j) * nn;
    std::span<const double> mrow(mass.data() + off, nn);
    std::span<const double> vrow(v.data() + off, nn);
    kernels::line_apply(kernel_centered, mrow, vrow,
                        std::span<double>(line_out.data(), nn));
    for (std::size_t i = 0; i < nn; ++i) out[off + i] += line_out[i];
  }
  // axis 2: gather strided columns
  std::vector<double> mcol(nn), vcol(nn);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      mcol[static_cast<std::size_t>(j)] =
          mass[static_cast<std::size_t>(j) * nn + static_cast<std::size_t>(i)];
      vcol[static_cast<std::size_t>(j)] =
          v[static_cast<std::size_t>(j) * nn + static_cast<std::size_t>(i)];
    }
    kernels::line_apply(kernel_centered, mcol, vcol,
                        std::span<double>(line_out.data(), nn));
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(j) * nn + static_cast<std::size_t>(i)] +=
          line_out[static_cast<std::size_t>(j)];
  }
}

double GridForm::quadratic(const std::vector<double>& v) const {
  // v^T A v = sum_{p<q} W_pq (v_p - v_q)^2, the PL interpolant energy
  std::vector<double> av;
  apply(v, av);
  return kernels::dot(v, av);
}

std::vector<double> GridForm::row_sums() const {
  const std::size_t nn = static_cast<std::size_t>(n);
  std::vector<double> diag(size(), 0.0);
  auto line_diag = [&](const double* m, double* d) {
    for (std::size_t k = 0; k < nn; ++k) {
      double acc = 0.0;
      const double* kc = kernel_centered.data() + (nn - 1 - k);
      for (std::size_t l = 0; l < nn; ++l)
        acc += kc[l] * 0.5 * (m[k] + m[l]);
      d[k] += acc;
    }
  };
  if (dim == 1) {
    line_diag(mass.data(), diag.data());
    return diag;
  }
  std::vector<double> mcol(nn), dcol(nn);
  for (int j = 0; j < n; ++j)
    line_diag(mass.data() + static_cast<std::size_t>(j) * nn,
              diag.data() + static_cast<std::size_t>(j) * nn);
  for (int i = 0; i < n; ++i) {
    std::fill(dcol.begin(), dcol.end(), 0.0);
    for (int j = 0; j < n; ++j)
      mcol[static_cast<std::size_t>(j)] =
          mass[static_cast<std::size_t>(j) * nn + static_cast<std::size_t>(i)];
    line_diag(mcol.data(), dcol.data());
    for (int j = 0; j < n; ++j)
      diag[static_cast<std::size_t>(j) * nn + static_cast<std::size_t>(i)] +=
          dcol[static_cast<std::size_t>(j)];
  }
  return diag;
}

std::vector<double> GridForm::sample(const TestFunction& f) const {
  std::vector<double> v(size());
  const std::size_t nn = static_cast<std::size_t>(n);
  if (dim == 1) {
    std::vector<double> x(1);
    for (std::size_t i = 0; i < nn; ++i) {
      x[0] = coords[i];
      v[i] = f(x);
    }
  } else {
    std::vector<double> x(2);
    for (std::size_t j = 0; j < nn; ++j)
      for (std::size_t i = 0; i < nn; ++i) {
        x[0] = coords[i];
        x[1] = coords[j];
        v[j * nn + i] = f(x);
      }
  }
  return v;
}

GridForm assemble(const Potential& pot, StableIndex alpha, double box_radius,
                  int n) {
  if (n < 8) throw config_error("grid assembly requires n >= 8");
  if (pot.dim() > 2)
    throw config_error("grid assembly supports d in {1, 2} only");
  if (!pot.product())
    throw config_error("grid assembly requires a product family");
  // memory guard: the d=2 apply walks n^3 pair entries per axis family
  if (pot.dim() == 2 && n > 1024)
    throw config_error("d=2 grid too large; choose n <= 1024");

  GridForm gf;
  gf.dim = pot.dim();
  gf.box_radius = box_radius;
  gf.n = n;
  gf.h = 2.0 * box_radius / n;
  for (int k = 0; k < n; ++k)
    gf.coords.push_back(-box_radius + gf.h * (k + 0.5));

  // per-axis cell masses from the marginal CDF (exact for product families)
  std::vector<std::vector<double>> axis_mass(
      static_cast<std::size_t>(gf.dim));
  for (int i = 0; i < gf.dim; ++i) {
    const Marginal1D& m = pot.marginal(i);
    for (int k = 0; k < n; ++k) {
      const double lo = gf.coords[static_cast<std::size_t>(k)] - 0.5 * gf.h;
      const double hi = gf.coords[static_cast<std::size_t>(k)] + 0.5 * gf.h;
      axis_mass[static_cast<std::size_t>(i)].push_back(m.cdf(hi) - m.cdf(lo));
    }
  }
  if (gf.dim == 1) {
    gf.mass = axis_mass[0];
  } else {
    gf.mass.resize(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        gf.mass[static_cast<std::size_t>(j) * n + i] =
            axis_mass[0][static_cast<std::size_t>(i)] *
            axis_mass[1][static_cast<std::size_t>(j)];
  }

  const std::vector<double> w = hat_kernel_weights(alpha.alpha, n - 1);
  const double scale = std::pow(gf.h, -alpha.alpha);
  gf.kernel_centered.assign(2 * static_cast<std::size_t>(n) - 1, 0.0);
  for (int t = 1; t < n; ++t) {
    gf.kernel_centered[static_cast<std::size_t>(n - 1 + t)] =
        scale * w[static_cast<std::size_t>(t)];
    gf.kernel_centered[static_cast<std::size_t>(n - 1 - t)] =
        scale * w[static_cast<std::size_t>(t)];
  }
  return gf;
}

// ------------------------------------------------------------------ LOBPCG --

namespace {

// smallest eigenpair of the symmetric 3x3 pencil (a, b) via Cholesky + Jacobi
void small_generalized_eig(double a[3][3], double b[3][3], double* lambda_min,
                           double y[3], int dim) {
  // Cholesky of b
  double l[3][3] = {};
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = b[i][j];
      for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j)
        l[i][i] = std::sqrt(std::max(s, 1e-300));
      else
        l[i][j] = s / l[j][j];
    }
  }
  // c = L^{-1} a L^{-T}
  double tmp[3][3] = {};
  for (int col = 0; col < dim; ++col) {
    double v[3];
    for (int i = 0; i < dim; ++i) {
      double s = a[i][col];
      for (int k = 0; k < i; ++k) s -= l[i][k] * v[k];
      v[i] = s / l[i][i];
    }
    for (int i = 0; i < dim; ++i) tmp[i][col] = v[i];
  }
  double cmat[3][3] = {};
  for (int row = 0; row < dim; ++row) {
    double v[3];
    for (int i = 0; i < dim; ++i) {
      double s = tmp[row][i];
      for (int k = 0; k < i; ++k) s -= l[i][k] * v[k];
      v[i] = s / l[i][i];
    }
    for (int i = 0; i < dim; ++i) cmat[row][i] = v[i];
  }
  // Jacobi sweeps
  double q[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int sweep = 0; sweep < 40; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) off += cmat[i][j] * cmat[i][j];
    if (off < 1e-28) break;
    for (int p = 0; p < dim; ++p)
      for (int qq = p + 1; qq < dim; ++qq) {
        if (std::abs(cmat[p][qq]) < 1e-300) continue;
        const double theta = 0.5 * (cmat[qq][qq] - cmat[p][p]) / cmat[p][qq];
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cth = 1.0 / std::sqrt(t * t + 1.0);
        const double sth = t * cth;
        for (int k = 0; k < dim; ++k) {
          const double akp = cmat[k][p], akq = cmat[k][qq];
          cmat[k][p] = cth * akp - sth * akq;
          cmat[k][qq] = sth * akp + cth * akq;
        }
        for (int k = 0; k < dim; ++k) {
          const double apk = cmat[p][k], aqk = cmat[qq][k];
          cmat[p][k] = cth * apk - sth * aqk;
          cmat[qq][k] = sth * apk + cth * aqk;
          const double qkp = q[k][p], qkq = q[k][qq];
          q[k][p] = cth * qkp - sth * qkq;
          q[k][qq] = sth * qkp + cth * qkq;
        }
      }
  }
  int best = 0;
  for (int i = 1; i < dim; ++i)
    if (cmat[i][i] < cmat[best][best]) best = i;
  *lambda_min = cmat[best][best];
  // y = L^{-T} q[:,best]
  double u[3];
  for (int i = 0; i < dim; ++i) u[i] = q[i][best];
  for (int i = dim - 1; i >= 0; --i) {
    double s = u[i];
    for (int k = i + 1; k < dim; ++k) s -= l[k][i] * y[k];
    y[i] = s / l[i][i];
  }
}

}  // namespace

GapResult estimate_gap(const GridForm& gf, double tol, int max_iter,
                       std::uint64_t seed) {
  const std::size_t n = gf.size();
  const std::vector<double>& bm = gf.mass;
  const double btot = gf.mass_total();
  std::vector<double> diag = gf.row_sums();

  auto deflate = [&](std::vector<double>& v) {
    // projecting out the constant mode leaves A v unchanged: A annihilates
    // constants exactly by construction
    double s = kernels::dot(bm, v) / btot;
    for (auto& x : v) x -= s;
  };
  auto b_dot = [&](const std::vector<double>& a, const std::vector<double>& b2) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * bm[i] * b2[i];
    return acc;
  };

  RngStream rng(seed);
  std::vector<double> x(n);
  for (auto& xi : x) xi = rng.uniform(-1.0, 1.0);
  deflate(x);
  {
    const double s = 1.0 / std::sqrt(b_dot(x, x));
    kernels::scale(s, x);
  }
  std::vector<double> ax(n), w(n), aw(n), p, ap, r(n);
  gf.apply(x, ax);

  GapResult res;
  double lambda = kernels::dot(x, ax);
  double prev_residual = std::numeric_limits<double>::infinity();
  double stagnation_best = std::numeric_limits<double>::infinity();
  int stagnation_count = 0;
  for (int it = 0; it < max_iter; ++it) {
    if (it > 0 && it % 64 == 0) {
      // cached images accumulate combination rounding; refresh them
      gf.apply(x, ax);
      if (!p.empty()) gf.apply(p, ap);
    }
    double rnorm = 0.0, axnorm = 0.0, bxnorm = 0.0, xnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = ax[i] - lambda * bm[i] * x[i];
      rnorm += r[i] * r[i];
      axnorm += ax[i] * ax[i];
      bxnorm += bm[i] * x[i] * bm[i] * x[i];
      xnorm += x[i] * x[i];
    }
    rnorm = std::sqrt(rnorm);
    // contract: || A v - lambda diag(m) v || <= tol * ||v||, with the
    // operator-scale alternative for vectors of small Euclidean norm
    const double scale = std::max(
        std::sqrt(xnorm),
        std::sqrt(axnorm) + std::abs(lambda) * std::sqrt(bxnorm));
    res.lambda1 = lambda;
    res.iterations = it;
    res.residual = rnorm;
    if (rnorm <= tol * std::max(scale, 1e-300)) {
      res.minimizer = x;
      return res;
    }
    // restart on stagnation; accept a parts-per-million floor if restarts do
    // not help (the eigenvalue error is quadratic in this residual)
    if (rnorm < stagnation_best * 0.995) {
      stagnation_best = rnorm;
      stagnation_count = 0;
    } else if (++stagnation_count >= 80) {
      p.clear();
      ap.clear();
      gf.apply(x, ax);
      lambda = kernels::dot(x, ax) / b_dot(x, x);
      stagnation_count = 0;
      if (rnorm <= 1e-6 * std::max(scale, 1e-300)) {
        res.minimizer = x;
        return res;
      }
    }
    prev_residual = rnorm;

    for (std::size_t i = 0; i < n; ++i)
      w[i] = r[i] / std::max(diag[i], 1e-300);
    deflate(w);
    gf.apply(w, aw);

    // B-orthonormalize {x, w, p}, dropping directions that collapse onto the
    // span of the previous ones (the classic near-convergence degeneracy)
    std::vector<std::vector<double>*> basis{&x, &w};
    std::vector<std::vector<double>*> aimg{&ax, &aw};
    if (!p.empty()) {
      basis.push_back(&p);
      aimg.push_back(&ap);
    }
    std::vector<std::vector<double>> v, av;
    for (std::size_t bidx = 0; bidx < basis.size(); ++bidx) {
      std::vector<double> cand = *basis[bidx];
      std::vector<double> acand = *aimg[bidx];
      for (std::size_t j = 0; j < v.size(); ++j) {
        const double c = b_dot(v[j], cand);
        kernels::axpy(-c, v[j], cand);
        kernels::axpy(-c, av[j], acand);
      }
      const double nb = std::sqrt(std::max(b_dot(cand, cand), 0.0));
      if (nb < 1e-7) continue;  // degenerate direction: drop
      kernels::scale(1.0 / nb, cand);
      kernels::scale(1.0 / nb, acand);
      v.push_back(std::move(cand));
      av.push_back(std::move(acand));
    }
    const int dim = static_cast<int>(v.size());
    if (dim < 2) {
      gf.apply(x, ax);
      lambda = kernels::dot(x, ax) / b_dot(x, x);
      continue;
    }
    double amat[3][3] = {}, bmat[3][3] = {};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        amat[i][j] = kernels::dot(v[static_cast<std::size_t>(i)],
                                  av[static_cast<std::size_t>(j)]);
        bmat[i][j] = i == j ? 1.0 : 0.0;
      }
    // symmetrize against rounding
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) {
        const double s = 0.5 * (amat[i][j] + amat[j][i]);
        amat[i][j] = amat[j][i] = s;
      }
    double y[3] = {};
    double lmin = 0.0;
    small_generalized_eig(amat, bmat, &lmin, y, dim);
    if (y[0] < 0.0)
      for (int i = 0; i < dim; ++i) y[i] = -y[i];

    std::vector<double> xn(n, 0.0), axn(n, 0.0), pn(n, 0.0), apn(n, 0.0);
    for (int i = 0; i < dim; ++i) {
      kernels::axpy(y[i], v[static_cast<std::size_t>(i)], xn);
      kernels::axpy(y[i], av[static_cast<std::size_t>(i)], axn);
      if (i >= 1) {
        kernels::axpy(y[i], v[static_cast<std::size_t>(i)], pn);
        kernels::axpy(y[i], av[static_cast<std::size_t>(i)], apn);
      }
    }
    x.swap(xn);
    ax.swap(axn);
    p.swap(pn);
    ap.swap(apn);
    deflate(x);  // ax stays valid: A kills constants exactly
    const double bn = std::sqrt(b_dot(x, x));
    kernels::scale(1.0 / bn, x);
    kernels::scale(1.0 / bn, ax);
    lambda = kernels::dot(x, ax) / b_dot(x, x);
  }
  throw numeric_error("eigensolver did not converge", prev_residual,
                      res.residual);
}

TestFunction witness_family(WitnessCase c, double eps, StableIndex alpha,
                            int dim, int axis, int index) {
  const bool subcritical = c == WitnessCase::poly_subcritical
                               ? eps < alpha.alpha
                               : eps < 0.0;
  if (!subcritical)
    throw gate_error("no witness exists in this regime (supercritical parameters)");
  const double radius = std::pow(2.0, index);
  return TestFunction::coordinate_atom(dim, axis,
                                       {Atom1D::Kind::bump, 0.0, radius});
}

std::vector<GapSweepRow> gap_sweep(const Potential& pot, StableIndex alpha,
                                   const std::vector<double>& boxes, int n) {
  std::vector<GapSweepRow> rows;
  double prev = 0.0;
  for (double r : boxes) {
    GridForm gf = assemble(pot, alpha, r, n);
    GapResult g = estimate_gap(gf);
    GapSweepRow row;
    row.box_radius = r;
    row.n = n;
    row.lambda1 = g.lambda1;
    row.ratio_to_previous = prev > 0.0 ? g.lambda1 / prev : 1.0;
    rows.push_back(row);
    prev = g.lambda1;
  }
  // stabilization verdict over the top two levels
  if (rows.size() >= 3) {
    const bool stable = rows[rows.size() - 1].ratio_to_previous >= 0.8 &&
                        rows[rows.size() - 2].ratio_to_previous >= 0.8;
    rows.back().verdict = stable ? "stabilized" : "shrinking";
  }
  return rows;
}

}  // namespace axistable
