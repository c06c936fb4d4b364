#include "jointspec/branches.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "jointspec/errors.hpp"
#include "jointspec/linalg.hpp"
#include "jointspec/richardson.hpp"

namespace jointspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool complex_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Single-linkage clusters of points at distance <= tol, as index groups
// ordered by first member.
std::vector<std::vector<int>> single_linkage(const std::vector<Complex>& pts, double tol) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(pts[i] - pts[j]) <= tol) parent[find(j)] = find(i);

  std::vector<std::vector<int>> groups;
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

Complex mean_of(const std::vector<Complex>& v, const std::vector<int>& idx) {
  Complex s = 0.0;
  for (int i : idx) s += v[i];
  return s / static_cast<double>(idx.size());
}

// Lagrange interpolation through (ts, vs) evaluated at t.
Complex lagrange(const std::vector<double>& ts, const std::vector<Complex>& vs, double t) {
  Complex out = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < ts.size(); ++j)
      if (j != i) w *= (t - ts[j]) / (ts[i] - ts[j]);
    out += w * vs[i];
  }
  return out;
}

int algebraic_multiplicity(const Matrix& a1, Complex lambda) {
  const double tol = 1e-6 * std::max(1.0, linalg::operator_norm(a1));
  int count = 0;
  for (Complex mu : linalg::eigenvalues(a1))
    if (std::abs(mu - lambda) <= tol) ++count;
  return count;
}

double sample_residual(const MatrixTuple& tuple, const Branch& b, double t, Complex value) {
  const Matrix trans = tuple.transverse(b.direction);
  if (b.kind == BranchKind::nonzero_lambda) {
    Matrix pencil = value * tuple[0] + t * trans;
    Matrix shifted = pencil;
    shifted.diagonal().array() -= 1.0;
    return linalg::min_singular_value(shifted) / (1.0 + linalg::operator_norm(pencil));
  }
  Matrix m = tuple[0] + t * trans;
  const double scale = 1.0 + linalg::operator_norm(m);
  m.diagonal().array() -= value;
  return linalg::min_singular_value(m) / scale;
}

struct Track {
  std::vector<double> ts;
  std::vector<Complex> vs;
  int multiplicity = 1;
};

// Claims `multiplicity` candidates nearest to each prediction; every claim
// has to beat the next candidate by `ratio` and no candidate may be shared.
std::vector<Complex> match_step(const std::vector<Complex>& cands, const std::vector<Complex>& preds,
                                const std::vector<int>& mult, double ratio, double floor,
                                double t) {
  std::vector<int> owner(cands.size(), -1);
  std::vector<Complex> out(preds.size());
  for (std::size_t b = 0; b < preds.size(); ++b) {
    std::vector<int> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      return std::abs(cands[i] - preds[b]) < std::abs(cands[j] - preds[b]);
    });
    const int m = mult[b];
    if (static_cast<int>(order.size()) < m) {
      throw BranchCollision("too few roots at t=" + std::to_string(t));
    }
    const double near = std::max(std::abs(cands[order[m - 1]] - preds[b]), floor);
    if (static_cast<int>(order.size()) > m) {
      const double next = std::abs(cands[order[m]] - preds[b]);
      if (next < ratio * near) {
        std::ostringstream msg;
        msg << "branch " << b << " ambiguous at t=" << t << " (nearest " << near
            << ", runner-up " << next << ")";
        throw BranchCollision(msg.str());
      }
    }
    std::vector<int> mine(order.begin(), order.begin() + m);
    for (int i : mine) {
      if (owner[i] >= 0) {
        throw BranchCollision("two branches claim one root at t=" + std::to_string(t));
      }
      owner[i] = static_cast<int>(b);
    }
    out[b] = mean_of(cands, mine);
  }
  return out;
}

}  // namespace

std::size_t SpectralResolution::index_of(Complex lambda, double tol) const {
  std::size_t best = 0;
  double dist = kInf;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double d = std::abs(eigenvalues[i] - lambda);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  if (!(dist <= tol * std::max(1.0, std::abs(lambda)))) {
    std::ostringstream msg;
    msg << "lambda " << lambda << " is not an eigenvalue of A1";
    throw UnknownEigenvalue(msg.str());
  }
  return best;
}

SpectralResolution spectral_resolution(const Matrix& a1, double cluster_tol) {
  const auto report = normality(a1);
  if (!report.is_normal) {
    std::ostringstream msg;
    msg << "A1 is not normal (||A1 A1* - A1* A1|| = " << report.commutator_norm
        << "); limit projections may blow up, see demo-blowup";
    throw NotNormalError(msg.str());
  }
  if (cluster_tol <= 0.0) cluster_tol = 1e-8 * std::max(1.0, linalg::operator_norm(a1));

  Eigen::ComplexSchur<Matrix> schur(a1);
  if (schur.info() != Eigen::Success) throw EigensolverError("complex Schur failed");
  const Matrix& q = schur.matrixU();
  const Matrix& tri = schur.matrixT();
  std::vector<Complex> diag(static_cast<std::size_t>(tri.rows()));
  for (int i = 0; i < tri.rows(); ++i) diag[i] = tri(i, i);

  auto groups = single_linkage(diag, cluster_tol);
  std::vector<Complex> centers;
  for (const auto& g : groups) centers.push_back(mean_of(diag, g));
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return complex_less(centers[a], centers[b]); });

  SpectralResolution res;
  for (std::size_t o : order) {
    const auto& g = groups[o];
    Matrix basis(q.rows(), static_cast<Eigen::Index>(g.size()));
    for (std::size_t c = 0; c < g.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = q.col(g[c]);
    res.eigenvalues.push_back(centers[o]);
    res.projections.push_back(basis * basis.adjoint());
    res.multiplicities.push_back(static_cast<int>(g.size()));
  }
  return res;
}

TOperator t_operator(const SpectralResolution& res, Complex lambda) {
  const std::size_t self = res.index_of(lambda);
  const auto n = res.projections.front().rows();
  TOperator out{res.eigenvalues[self], Matrix::Zero(n, n)};
  for (std::size_t i = 0; i < res.eigenvalues.size(); ++i) {
    if (i == self) continue;
    out.matrix += res.projections[i] / (out.base_eigenvalue - res.eigenvalues[i]);
  }
  return out;
}

BranchKind branch_kind(const Matrix& a1, Complex lambda) {
  const double scale = std::max(1.0, linalg::operator_norm(a1));
  return std::abs(lambda) <= 1e-10 * scale ? BranchKind::zero_lambda : BranchKind::nonzero_lambda;
}

Complex Branch::base() const {
  return kind == BranchKind::nonzero_lambda ? 1.0 / lambda : Complex(0.0);
}

std::vector<double> geometric_ladder(double t_max, int samples) {
  if (!(t_max > 0.0) || samples < 1) throw std::invalid_argument("ladder needs t_max > 0, samples >= 1");
  std::vector<double> ts;
  for (int k = 0; k < samples; ++k) ts.push_back(std::ldexp(t_max, -k));
  return ts;
}

std::vector<Complex> branch_candidates(const MatrixTuple& tuple, Complex lambda,
                                       const Direction& xhat, double t, Complex near) {
  std::vector<Complex> cands;
  if (branch_kind(tuple[0], lambda) == BranchKind::nonzero_lambda) {
    cands = slice_roots(tuple, xhat, t).finite;
  } else {
    cands = linalg::eigenvalues(tuple[0] + t * tuple.transverse(xhat));
  }
  std::stable_sort(cands.begin(), cands.end(), [&](Complex a, Complex b) {
    return std::abs(a - near) < std::abs(b - near);
  });
  return cands;
}

std::vector<Branch> local_branches(const MatrixTuple& tuple, Complex lambda, const Direction& xhat,
                                   const BranchOptions& options) {
  if (tuple.size() < 2) throw DimensionMismatch("branches need n >= 2");
  if (xhat.size() != tuple.size() - 1 || xhat.norm() == 0.0) {
    throw DimensionMismatch("direction must be a nonzero vector of length n-1");
  }
  if (options.samples < 3) throw std::invalid_argument("local_branches: need at least 3 samples");

  const int total = algebraic_multiplicity(tuple[0], lambda);
  if (total == 0) {
    std::ostringstream msg;
    msg << "lambda " << lambda << " is not an eigenvalue of A1";
    throw UnknownEigenvalue(msg.str());
  }
  const BranchKind kind = branch_kind(tuple[0], lambda);
  const Complex x0 = kind == BranchKind::nonzero_lambda ? 1.0 / lambda : Complex(0.0);
  const auto ladder = geometric_ladder(options.t_max, options.samples);
  const double t_small = ladder.back();
  const double floor = 1e-13 * (1.0 + std::abs(x0));

  // Establish the branches at the smallest positive t.
  const auto cands = branch_candidates(tuple, lambda, xhat, t_small, x0);
  if (static_cast<int>(cands.size()) < total) {
    throw BranchCollision("fewer finite roots than the multiplicity of lambda");
  }
  const double reach = std::abs(cands[total - 1] - x0);
  if (static_cast<int>(cands.size()) > total &&
      std::abs(cands[total] - x0) < options.match_ratio * std::max(reach, floor)) {
    throw BranchCollision("roots through the base point are not isolated at the smallest t");
  }
  std::vector<Complex> slopes;
  for (int i = 0; i < total; ++i) slopes.push_back((cands[i] - x0) / t_small);
  double slope_scale = 1.0;
  for (Complex s : slopes) slope_scale = std::max(slope_scale, std::abs(s));
  auto groups = single_linkage(slopes, options.cluster_tol * slope_scale);
  std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
    return complex_less(mean_of(slopes, a), mean_of(slopes, b));
  });

  std::vector<Track> pos(groups.size()), neg(groups.size());
  std::vector<int> mult;
  for (std::size_t b = 0; b < groups.size(); ++b) {
    const int m = static_cast<int>(groups[b].size());
    mult.push_back(m);
    pos[b] = Track{{t_small}, {mean_of(cands, groups[b])}, m};
  }

  auto predict = [&](const Track& tr, double t, const Track* seed) {
    std::vector<double> ts{0.0};
    std::vector<Complex> vs{x0};
    const std::size_t keep = std::min<std::size_t>(2, tr.ts.size());
    for (std::size_t i = tr.ts.size() - keep; i < tr.ts.size(); ++i) {
      ts.push_back(tr.ts[i]);
      vs.push_back(tr.vs[i]);
    }
    if (tr.ts.empty() && seed != nullptr) {
      ts.push_back(seed->ts.front());
      vs.push_back(seed->vs.front());
    }
    return lagrange(ts, vs, t);
  };

  auto advance = [&](std::vector<Track>& tracks, double t, const std::vector<Track>* seeds) {
    std::vector<Complex> preds;
    for (std::size_t b = 0; b < tracks.size(); ++b) {
      preds.push_back(predict(tracks[b], t, seeds ? &(*seeds)[b] : nullptr));
    }
    const auto roots = branch_candidates(tuple, lambda, xhat, t, x0);
    const auto matched = match_step(roots, preds, mult, options.match_ratio, floor, t);
    for (std::size_t b = 0; b < tracks.size(); ++b) {
      tracks[b].ts.push_back(t);
      tracks[b].vs.push_back(matched[b]);
    }
  };

  for (int k = static_cast<int>(ladder.size()) - 2; k >= 0; --k) advance(pos, ladder[k], nullptr);
  for (int k = static_cast<int>(ladder.size()) - 1; k >= 0; --k) advance(neg, -ladder[k], &pos);

  std::vector<Branch> out;
  for (std::size_t b = 0; b < groups.size(); ++b) {
    Branch br;
    br.lambda = lambda;
    br.kind = kind;
    br.direction = xhat;
    br.index = static_cast<int>(b);
    br.multiplicity = mult[b];
    for (const Track* tr : {&neg[b], &pos[b]}) {
      for (std::size_t i = 0; i < tr->ts.size(); ++i) {
        br.samples.push_back({tr->ts[i], tr->vs[i], sample_residual(tuple, br, tr->ts[i], tr->vs[i])});
      }
    }
    std::sort(br.samples.begin(), br.samples.end(),
              [](const BranchSample& a, const BranchSample& b) { return a.t < b.t; });
    const auto der = branch_derivatives(br);
    br.d1 = der.d1;
    br.d2 = der.d2;
    br.d1_error = der.d1_error;
    br.d2_error = der.d2_error;
    out.push_back(std::move(br));
  }
  return out;
}

BranchDerivatives branch_derivatives(const Branch& branch) {
  // Pair up +h and -h samples, largest h first.
  std::vector<double> hs;
  std::vector<Complex> plus, minus;
  for (const auto& s : branch.samples) {
    if (s.t <= 0.0) continue;
    for (const auto& r : branch.samples) {
      if (r.t < 0.0 && std::abs(r.t + s.t) <= 1e-14 * s.t) {
        hs.push_back(s.t);
        plus.push_back(s.value);
        minus.push_back(r.value);
        break;
      }
    }
  }
  std::vector<std::size_t> order(hs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return hs[a] > hs[b]; });
  if (order.size() < 3) {
    throw NonconvergentError("branch derivatives need at least 3 symmetric sample pairs");
  }

  const Complex x0 = branch.base();
  std::vector<Complex> first, second;
  for (std::size_t i : order) {
    const double h = hs[i];
    first.push_back((plus[i] - minus[i]) / (2.0 * h));
    second.push_back((plus[i] - 2.0 * x0 + minus[i]) / (h * h));
  }
  const double ratio = hs[order[0]] / hs[order[1]];
  const double factor = ratio * ratio;
  auto mag = [](Complex z) { return std::abs(z); };
  const auto e1 = richardson(first, factor, mag);
  const auto e2 = richardson(second, factor, mag);
  if (!(e1.error <= 1e-3 * (1.0 + std::abs(e1.value))) ||
      !(e2.error <= 1e-3 * (1.0 + std::abs(e2.value)))) {
    std::ostringstream msg;
    msg << "derivative extrapolation did not settle (errors " << e1.error << ", " << e2.error << ")";
    throw NonconvergentError(msg.str());
  }
  return {e1.value, e2.value, e1.error, e2.error};
}

RegularityReport check_regularity(const MatrixTuple& tuple, Complex lambda, const Direction& xhat,
                                  const RegularityOptions& options) {
  RegularityReport rep;
  rep.lambda = lambda;
  const int total = algebraic_multiplicity(tuple[0], lambda);
  rep.total_multiplicity = total;
  if (total == 0) {
    rep.note = "not an eigenvalue of A1";
    return rep;
  }

  // a): roots through the base point move at a linear rate in t. Puiseux
  // branches (rate ~ |t|^{-1/2}) and roots escaping to infinity fail here.
  const Complex x0 =
      branch_kind(tuple[0], lambda) == BranchKind::zero_lambda ? Complex(0.0) : 1.0 / lambda;
  const auto ladder = geometric_ladder(options.branches.t_max, options.branches.samples);
  std::vector<double> rates;
  bool finite = true;
  for (double t : ladder) {
    double rate = 0.0;
    for (double signed_t : {t, -t}) {
      const auto c = branch_candidates(tuple, lambda, xhat, signed_t, x0);
      if (static_cast<int>(c.size()) < total) {
        finite = false;
        break;
      }
      for (int i = 0; i < total; ++i) rate = std::max(rate, std::abs(c[i] - x0) / t);
    }
    rates.push_back(rate);
  }
  rep.condition_a = finite && rates.back() <= options.rate_growth * std::max(rates.front(), 1e-12) + 1e-9;

  try {
    const auto branches = local_branches(tuple, lambda, xhat, options.branches);
    rep.branch_count = static_cast<int>(branches.size());
    double gap = kInf;
    double margin = kInf;
    bool simple = true;
    for (const auto& b : branches) {
      if (b.multiplicity > 1) {
        simple = false;
        gap = 0.0;
        margin = 0.0;
      }
    }
    for (std::size_t i = 0; i < branches.size(); ++i) {
      for (std::size_t j = i + 1; j < branches.size(); ++j) {
        gap = std::min(gap, std::abs(branches[i].d1 - branches[j].d1));
        for (std::size_t k = 0; k < branches[i].samples.size(); ++k) {
          const auto& si = branches[i].samples[k];
          const auto& sj = branches[j].samples[k];
          margin = std::min(margin, std::abs(si.value - sj.value) / std::abs(si.t));
        }
      }
    }
    rep.branch_derivative_gaps = gap;
    rep.tangency_margin = margin;
    rep.condition_b = simple && gap > options.gap_tol;
    if (!simple) rep.note = "a component passes through the base point with multiplicity > 1";
  } catch (const BranchCollision& e) {
    rep.condition_b = false;
    rep.note = e.what();
  } catch (const NonconvergentError& e) {
    rep.condition_b = false;
    rep.note = e.what();
  }
  return rep;
}

std::vector<RegularityReport> probe_regularity(const MatrixTuple& tuple, Complex lambda,
                                               const std::vector<Direction>& directions,
                                               const RegularityOptions& options) {
  std::vector<RegularityReport> out;
  for (const auto& d : directions) out.push_back(check_regularity(tuple, lambda, d, options));
  return out;
}

}  // namespace jointspec
