#include "expkernel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "error.hpp"

namespace soliton {

namespace {

struct Kahan {
  double sum = 0.0, carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// exp of the (small, upper bidiagonal) Opitz matrix by Taylor series after
// centering, with scaling and squaring. Entries stay positive, so the
// squaring phase is cancellation-free.
std::vector<std::vector<double>> opitz_exp(const std::vector<double>& y) {
  const int k = static_cast<int>(y.size());
  double r = 0.0;
  for (double v : y) r = std::max(r, std::fabs(v));
  int s = 0;
  while (r / std::pow(2.0, s) > 0.5) ++s;
  const double scale = std::pow(2.0, s);

  std::vector<std::vector<double>> A(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i) A[i][i] = y[i] / scale;
  for (int i = 0; i + 1 < k; ++i) A[i][i + 1] = 1.0 / scale;

  auto matmul = [k](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    std::vector<std::vector<double>> c(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i)
      for (int l = i; l < k; ++l) {
        if (a[i][l] == 0.0) continue;
        for (int j = l; j < k; ++j) c[i][j] += a[i][l] * b[l][j];
      }
    return c;
  };

  std::vector<std::vector<double>> E(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i) E[i][i] = 1.0;
  std::vector<std::vector<double>> term = E;
  for (int j = 1; j <= 40; ++j) {
    term = matmul(term, A);
    double tn = 0.0;
    for (int i = 0; i < k; ++i)
      for (int l = 0; l < k; ++l) {
        term[i][l] /= j;
        tn = std::max(tn, std::fabs(term[i][l]));
      }
    for (int i = 0; i < k; ++i)
      for (int l = 0; l < k; ++l) E[i][l] += term[i][l];
    if (tn < 1e-22) break;
  }
  for (int step = 0; step < s; ++step) E = matmul(E, E);
  return E;
}

double dot_av(const RatVec& a, const Vec& b) { return dot(a, b); }

struct CellNodes {
  std::vector<double> x;  // exp nodes: -<apex, xi>
  std::vector<double> d;  // ray pairings <ray, xi>
  double inv_d = 1.0;     // product of 1/d
};

CellNodes cell_nodes(const KernelCell& cell, const Vec& xi) {
  CellNodes cn;
  for (const Vec& a : cell.apexes) cn.x.push_back(-dot(a, xi));
  for (const Vec& r : cell.rays) {
    double dq = dot(r, xi);
    cn.d.push_back(dq);
    cn.inv_d /= dq;
  }
  return cn;
}

bool near_confluent(const std::vector<double>& x) {
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = i + 1; j < x.size(); ++j)
      if (std::fabs(x[i] - x[j]) < 1e-8 * (1.0 + std::fabs(x[i]))) return true;
  return false;
}

void check_reeb(const std::vector<RatVec>& rec_rays, const Vec& xi) {
  for (const RatVec& r : rec_rays) {
    double s = dot_av(r, xi);
    if (s == 0.0) fail(ErrorKind::UnboundedIntegral, "recession ray pairs to zero; integral diverges");
    if (s < 0.0) fail(ErrorKind::ReebViolation, "xi is not interior to the dual recession cone");
  }
}

std::vector<double> with_extra(const std::vector<double>& x, int i, int copies_i, int j = -1) {
  std::vector<double> y = x;
  for (int c = 0; c < copies_i; ++c) y.push_back(x[i]);
  if (j >= 0) y.push_back(x[j]);
  return y;
}

}  // namespace

double ddexp(std::vector<double> nodes) {
  const int k = static_cast<int>(nodes.size());
  if (k == 0) fail(ErrorKind::Internal, "divided difference needs at least one node");
  if (k == 1) return std::exp(nodes[0]);
  double mu = std::accumulate(nodes.begin(), nodes.end(), 0.0) / k;
  for (double& v : nodes) v -= mu;
  auto E = opitz_exp(nodes);
  return std::exp(mu) * E[0][k - 1];
}

std::vector<KernelCell> kernel_cells(const Polyhedron& P) {
  std::vector<KernelCell> cells;
  for (const GeneralizedSimplex& s : P.triangulate()) {
    KernelCell c;
    for (const RatVec& a : s.apexes) c.apexes.push_back(to_double(a));
    for (const RatVec& r : s.rays) c.rays.push_back(to_double(r));
    c.jac = to_double(s.jacobian);
    cells.push_back(std::move(c));
  }
  return cells;
}

ExpIntegralResult exp_integral(const std::vector<KernelCell>& cells, const std::vector<RatVec>& rec_rays,
                               const Vec& xi) {
  check_reeb(rec_rays, xi);
  ExpIntegralResult res;
  Kahan acc;
  for (const KernelCell& cell : cells) {
    CellNodes cn = cell_nodes(cell, xi);
    acc.add(cell.jac * ddexp(cn.x) * cn.inv_d);
    res.cells_used += 1;
    if (near_confluent(cn.x)) res.confluent_cells += 1;
  }
  res.value = acc.sum;
  if (!(res.value > 0.0) || !std::isfinite(res.value))
    fail(ErrorKind::Internal, "non-positive exponential integral");
  return res;
}

ExpIntegralResult exp_integral(const Polyhedron& P, const Vec& xi) {
  return exp_integral(kernel_cells(P), P.rays(), xi);
}

double exp_moment(const std::vector<KernelCell>& cells, const std::vector<RatVec>& rec_rays, const Vec& xi,
                  const Vec& eta) {
  check_reeb(rec_rays, xi);
  Kahan acc;
  for (const KernelCell& cell : cells) {
    CellNodes cn = cell_nodes(cell, xi);
    const int k = static_cast<int>(cn.x.size());
    double apex_part = 0.0;
    for (int i = 0; i < k; ++i) apex_part += dot(cell.apexes[i], eta) * ddexp(with_extra(cn.x, i, 1));
    double ray_part = 0.0;
    for (size_t q = 0; q < cn.d.size(); ++q) ray_part += dot(cell.rays[q], eta) / cn.d[q];
    acc.add(cell.jac * cn.inv_d * (apex_part + ddexp(cn.x) * ray_part));
  }
  return acc.sum;
}

double exp_moment(const Polyhedron& P, const Vec& xi, const Vec& eta) {
  return exp_moment(kernel_cells(P), P.rays(), xi, eta);
}

double exp_hessian_entry(const std::vector<KernelCell>& cells, const std::vector<RatVec>& rec_rays,
                         const Vec& xi, const Vec& eta1, const Vec& eta2) {
  check_reeb(rec_rays, xi);
  Kahan acc;
  for (const KernelCell& cell : cells) {
    CellNodes cn = cell_nodes(cell, xi);
    const int k = static_cast<int>(cn.x.size());
    std::vector<double> A(k), B(k);
    for (int i = 0; i < k; ++i) {
      A[i] = dot(cell.apexes[i], eta1);
      B[i] = dot(cell.apexes[i], eta2);
    }
    double sum_g = 0.0, sum_d = 0.0, sum_gd = 0.0;
    for (size_t q = 0; q < cn.d.size(); ++q) {
      double g = dot(cell.rays[q], eta1) / cn.d[q];
      double dl = dot(cell.rays[q], eta2) / cn.d[q];
      sum_g += g;
      sum_d += dl;
      sum_gd += g * dl;
    }
    double F = ddexp(cn.x);
    std::vector<double> Fi(k);
    for (int i = 0; i < k; ++i) Fi[i] = ddexp(with_extra(cn.x, i, 1));
    // symmetrized so that entry(eta1, eta2) == entry(eta2, eta1) bit-exactly
    double apex2 = 0.0;
    for (int i = 0; i < k; ++i) {
      apex2 += A[i] * B[i] * (2.0 * ddexp(with_extra(cn.x, i, 2)));
      for (int j = i + 1; j < k; ++j)
        apex2 += (A[i] * B[j] + A[j] * B[i]) * ddexp(with_extra(cn.x, i, 1, j));
    }
    double a1 = 0.0, b1 = 0.0;
    for (int i = 0; i < k; ++i) {
      a1 += A[i] * Fi[i];
      b1 += B[i] * Fi[i];
    }
    acc.add(cell.jac * cn.inv_d * (apex2 + a1 * sum_d + b1 * sum_g + F * (sum_g * sum_d + sum_gd)));
  }
  return acc.sum;
}

double exp_hessian_entry(const Polyhedron& P, const Vec& xi, const Vec& eta1, const Vec& eta2) {
  return exp_hessian_entry(kernel_cells(P), P.rays(), xi, eta1, eta2);
}

std::uint64_t CounterRng::next_u64() {
  std::uint64_t z = state_ + 0x9E3779B97F4A7C15ULL * ++counter_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

McResult mc_oracle(const Polyhedron& P, const Vec& xi, IntegrandKind kind, std::int64_t samples,
                   std::uint64_t seed, const Vec& eta1, const Vec& eta2) {
  check_reeb(P.rays(), xi);
  std::vector<KernelCell> cells = kernel_cells(P);
  const int n = P.dim();

  // Rough per-cell weights for sample allocation only; the estimator is
  // unbiased for any allocation.
  std::vector<double> w(cells.size());
  double W = 0.0;
  for (size_t c = 0; c < cells.size(); ++c) {
    CellNodes cn = cell_nodes(cells[c], xi);
    double xmax = *std::max_element(cn.x.begin(), cn.x.end());
    w[c] = cells[c].jac * std::exp(xmax) * cn.inv_d;
    W += w[c];
  }

  // SOLITON_THREADS caps the worker count; per-cell streams and a fixed
  // reduction order keep the result identical at any setting.
  int workers = 1;
  if (const char* env = std::getenv("SOLITON_THREADS")) workers = std::max(1, std::atoi(env));
  workers = std::min<int>(workers, static_cast<int>(cells.size()));

  struct CellOut {
    double contribution = 0.0;
    double variance = 0.0;
    std::int64_t samples = 0;
  };
  std::vector<CellOut> per_cell(cells.size());

  auto run_cell = [&](size_t c) {
    const KernelCell& cell = cells[c];
    std::int64_t nc = std::max<std::int64_t>(16, static_cast<std::int64_t>(samples * (w[c] / W)));
    CounterRng rng(seed, static_cast<std::uint64_t>(c));
    const int k = static_cast<int>(cell.apexes.size());
    CellNodes cn = cell_nodes(cell, xi);
    double kfact = 1.0;
    for (int i = 2; i < k; ++i) kfact *= i;  // (k-1)!
    const double scale = cell.jac * cn.inv_d / kfact;

    Kahan mean_acc;
    double m2 = 0.0, mean = 0.0;
    std::vector<double> lam(k);
    for (std::int64_t t = 0; t < nc; ++t) {
      // Dirichlet(1,...,1) barycentric weights.
      double lsum = 0.0;
      for (int i = 0; i < k; ++i) {
        lam[i] = -std::log(1.0 - rng.next_unit());
        lsum += lam[i];
      }
      for (int i = 0; i < k; ++i) lam[i] /= lsum;
      Vec x(n, 0.0);
      double cval = 0.0;
      for (int i = 0; i < k; ++i) {
        cval += lam[i] * (-cn.x[i]);
        for (int j = 0; j < n; ++j) x[j] += lam[i] * cell.apexes[i][j];
      }
      for (size_t q = 0; q < cell.rays.size(); ++q) {
        double s = -std::log(1.0 - rng.next_unit()) / cn.d[q];
        for (int j = 0; j < n; ++j) x[j] += s * cell.rays[q][j];
      }
      double g = 1.0;
      if (kind == IntegrandKind::Moment) g = dot(x, eta1);
      if (kind == IntegrandKind::Hessian) g = dot(x, eta1) * dot(x, eta2);
      double val = g * std::exp(-cval);
      double delta = val - mean;
      mean += delta / static_cast<double>(t + 1);
      m2 += delta * (val - mean);
      mean_acc.add(val);
    }
    double cell_mean = mean_acc.sum / static_cast<double>(nc);
    double cell_var = m2 / (static_cast<double>(nc) - 1.0) / static_cast<double>(nc);
    per_cell[c] = CellOut{scale * cell_mean, scale * scale * cell_var, nc};
  };

  if (workers <= 1) {
    for (size_t c = 0; c < cells.size(); ++c) run_cell(c);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (size_t c = next.fetch_add(1); c < cells.size(); c = next.fetch_add(1)) run_cell(c);
      });
    for (auto& th : pool) th.join();
  }

  McResult out;
  double var_total = 0.0;
  Kahan est;
  for (const CellOut& co : per_cell) {
    est.add(co.contribution);
    var_total += co.variance;
    out.samples += co.samples;
  }
  out.estimate = est.sum;
  out.standard_error = std::sqrt(var_total);
  return out;
}

}  // namespace soliton
