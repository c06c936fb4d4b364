#include "jointspec/coxeter.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

#include "jointspec/branches.hpp"
#include "jointspec/errors.hpp"
#include "jointspec/linalg.hpp"

namespace jointspec {

namespace {

constexpr double kPi = std::numbers::pi;

Matrix scalar_block(double v) { return Matrix::Constant(1, 1, Complex(v)); }

Matrix matrix_power(const Matrix& m, int k) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

double identity_defect(const Matrix& m) {
  return linalg::operator_norm(m - Matrix::Identity(m.rows(), m.cols()));
}

std::string join_names(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " x " : "") + parts[i];
  return out;
}

// Uniform point in the complex disc of the given radius.
Complex disc_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  return std::polar(r, 2.0 * kPi * u(rng));
}

Vector random_direction(std::mt19937_64& rng, int n, int skip) {
  Vector v(n);
  for (int k = 0; k < n; ++k) v(k) = k == skip ? Complex(0.0) : linalg::complex_normal(rng);
  const double nrm = v.norm();
  return nrm > 0.0 ? Vector(v / nrm) : v;
}

// Orthonormal basis of the numerical null space of m.
Matrix null_space(const Matrix& m, double tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  std::vector<int> cols;
  for (int k = 0; k < m.cols(); ++k) {
    const double sk = k < s.size() ? s(k) : 0.0;
    if (sk <= tol) cols.push_back(k);
  }
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(cols[c]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Coxeter matrices

CoxeterMatrix::CoxeterMatrix(std::vector<std::vector<int>> m) : m_(std::move(m)) {
  const std::size_t n = m_.size();
  if (n == 0) throw InconsistentAssignment("Coxeter matrix must be nonempty");
  for (std::size_t i = 0; i < n; ++i) {
    if (m_[i].size() != n) throw InconsistentAssignment("Coxeter matrix must be square");
    if (m_[i][i] != 1) throw InconsistentAssignment("Coxeter matrix diagonal must be 1");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (m_[i][j] != m_[j][i]) throw InconsistentAssignment("Coxeter matrix must be symmetric");
      if (m_[i][j] != 0 && m_[i][j] < 2) {
        throw InconsistentAssignment("off-diagonal Coxeter entries must be >= 2 (0 for infinity)");
      }
    }
  }
}

CoxeterMatrix CoxeterMatrix::dihedral(int m) { return CoxeterMatrix({{1, m}, {m, 1}}); }

CoxeterMatrix CoxeterMatrix::type_a(int n) {
  std::vector<std::vector<int>> m(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 2));
  for (int i = 0; i < n; ++i) {
    m[i][i] = 1;
    if (i + 1 < n) m[i][i + 1] = m[i + 1][i] = 3;
  }
  return CoxeterMatrix(std::move(m));
}

GroupType classify(const CoxeterMatrix& cm) {
  const int n = cm.size();
  auto edge = [&](int i, int j) { return i != j && (cm.at(i, j) == 0 || cm.at(i, j) >= 3); };

  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> comps;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comps.emplace_back();
    std::vector<int> stack{s};
    comp[s] = static_cast<int>(comps.size()) - 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      comps.back().push_back(v);
      for (int w = 0; w < n; ++w) {
        if (edge(v, w) && comp[w] < 0) {
          comp[w] = comp[s];
          stack.push_back(w);
        }
      }
    }
  }

  GroupType out{"", true, true};
  std::vector<std::string> names;
  for (auto& vs : comps) {
    std::sort(vs.begin(), vs.end());
    const int k = static_cast<int>(vs.size());
    std::string name = "other";
    bool finite = false, nonspecial = false;

    std::vector<int> degree(static_cast<std::size_t>(k), 0);
    std::vector<std::pair<std::pair<int, int>, int>> edges;
    bool has_inf = false;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        if (edge(vs[a], vs[b])) {
          ++degree[a];
          ++degree[b];
          edges.push_back({{a, b}, cm.at(vs[a], vs[b])});
          has_inf = has_inf || cm.at(vs[a], vs[b]) == 0;
        }
    const bool tree = static_cast<int>(edges.size()) == k - 1;
    const int max_degree = *std::max_element(degree.begin(), degree.end());

    if (k == 1) {
      name = "A1";
      finite = nonspecial = true;
    } else if (k == 2) {
      const int m = edges.front().second;
      name = m == 0 ? "I2(inf)" : "I2(" + std::to_string(m) + ")";
      finite = nonspecial = m != 0;
    } else if (tree && !has_inf && max_degree <= 2) {
      // Path: walk it from one end to read the labels in order.
      int start = static_cast<int>(std::find(degree.begin(), degree.end(), 1) - degree.begin());
      std::vector<int> labels;
      int prev = -1, cur = start;
      for (int step = 0; step < k - 1; ++step) {
        for (const auto& [ab, m] : edges) {
          const int other = ab.first == cur ? ab.second : ab.second == cur ? ab.first : -1;
          if (other >= 0 && other != prev) {
            labels.push_back(m);
            prev = cur;
            cur = other;
            break;
          }
        }
      }
      const int fours = static_cast<int>(std::count(labels.begin(), labels.end(), 4));
      const int fives = static_cast<int>(std::count(labels.begin(), labels.end(), 5));
      const int threes = static_cast<int>(std::count(labels.begin(), labels.end(), 3));
      const int last = static_cast<int>(labels.size()) - 1;
      if (threes == last + 1) {
        name = "A" + std::to_string(k);
        finite = nonspecial = true;
      } else if (fours == 1 && threes == last && (labels.front() == 4 || labels.back() == 4)) {
        name = "B" + std::to_string(k);
        finite = nonspecial = true;
      } else if (k == 4 && fours == 1 && labels[1] == 4 && threes == 2) {
        name = "F4";
        finite = true;
      } else if ((k == 3 || k == 4) && fives == 1 && threes == last &&
                 (labels.front() == 5 || labels.back() == 5)) {
        name = "H" + std::to_string(k);
        finite = true;
      }
    } else if (tree && !has_inf && max_degree == 3 &&
               std::all_of(edges.begin(), edges.end(), [](const auto& e) { return e.second == 3; })) {
      const int hub = static_cast<int>(std::find(degree.begin(), degree.end(), 3) - degree.begin());
      if (std::count(degree.begin(), degree.end(), 3) == 1) {
        std::vector<int> arms;
        for (const auto& [ab, m] : edges) {
          if (ab.first != hub && ab.second != hub) continue;
          int prev = hub, cur = ab.first == hub ? ab.second : ab.first, len = 1;
          while (degree[cur] == 2) {
            for (const auto& [cd, mm] : edges) {
              const int other = cd.first == cur ? cd.second : cd.second == cur ? cd.first : -1;
              if (other >= 0 && other != prev) {
                prev = cur;
                cur = other;
                ++len;
                break;
              }
            }
          }
          arms.push_back(len);
        }
        std::sort(arms.begin(), arms.end());
        if (arms[0] == 1 && arms[1] == 1) {
          name = "D" + std::to_string(k);
          finite = nonspecial = true;
        } else if (arms[0] == 1 && arms[1] == 2 && arms[2] <= 4) {
          name = "E" + std::to_string(k);
          finite = true;
        }
      }
    }
    names.push_back(name);
    out.finite = out.finite && finite;
    out.non_special = out.non_special && nonspecial;
  }
  out.name = join_names(names);
  out.non_special = out.non_special && out.finite;
  return out;
}

// ---------------------------------------------------------------------------
// Dihedral irreps and representations

std::string to_string(IrrepKind kind) {
  switch (kind) {
    case IrrepKind::one_dim_pp: return "one_dim_pp";
    case IrrepKind::one_dim_mm: return "one_dim_mm";
    case IrrepKind::one_dim_pm: return "one_dim_pm";
    case IrrepKind::one_dim_mp: return "one_dim_mp";
    case IrrepKind::two_dim: return "two_dim";
  }
  return "unknown";
}

std::pair<Matrix, Matrix> DihedralIrrep::generators() const {
  switch (kind) {
    case IrrepKind::one_dim_pp: return {scalar_block(1), scalar_block(1)};
    case IrrepKind::one_dim_mm: return {scalar_block(-1), scalar_block(-1)};
    case IrrepKind::one_dim_pm: return {scalar_block(1), scalar_block(-1)};
    case IrrepKind::one_dim_mp: return {scalar_block(-1), scalar_block(1)};
    case IrrepKind::two_dim: break;
  }
  const double c = std::cos(angle), s = std::sin(angle);
  Matrix g1(2, 2), g2(2, 2);
  g1 << 1.0, 0.0, 0.0, -1.0;
  g2 << c, s, s, -c;
  return {g1, g2};
}

int DihedralIrrep::product_order(int cap) const {
  switch (kind) {
    case IrrepKind::one_dim_pp:
    case IrrepKind::one_dim_mm: return 1;
    case IrrepKind::one_dim_pm:
    case IrrepKind::one_dim_mp: return 2;
    case IrrepKind::two_dim: break;
  }
  const double turns = angle / (2.0 * kPi);
  for (int m = 1; m <= cap; ++m) {
    if (std::abs(m * turns - std::round(m * turns)) <= 1e-9 * m) return m;
  }
  return 0;
}

CoxeterRep build_representation(const CoxeterMatrix& cm, const std::vector<Summand>& summands,
                                std::optional<std::uint64_t> seed) {
  const int n = cm.size();
  if (summands.empty()) throw InconsistentAssignment("representation needs at least one summand");

  std::vector<Matrix> gens(static_cast<std::size_t>(n), Matrix(0, 0));
  auto append = [&](const std::vector<Matrix>& blocks) {
    for (int i = 0; i < n; ++i) gens[i] = linalg::direct_sum(gens[i], blocks[i]);
  };

  for (const auto& s : summands) {
    switch (s.kind) {
      case SummandKind::trivial: append(std::vector<Matrix>(static_cast<std::size_t>(n), scalar_block(1))); break;
      case SummandKind::sign: append(std::vector<Matrix>(static_cast<std::size_t>(n), scalar_block(-1))); break;
      case SummandKind::dihedral: {
        if (n != 2) throw InconsistentAssignment("dihedral irreps need a two-generator Coxeter matrix");
        const auto& irrep = s.irrep;
        if (irrep.kind == IrrepKind::two_dim && !(irrep.angle > 0.0 && irrep.angle < kPi)) {
          throw InconsistentAssignment("two-dimensional irrep angle must lie in (0, pi)");
        }
        const int m = cm.at(0, 1);
        if (m != 0) {
          const int order = irrep.product_order();
          if (order == 0 || m % order != 0) {
            std::ostringstream msg;
            msg << to_string(irrep.kind);
            if (irrep.kind == IrrepKind::two_dim) msg << " with angle " << irrep.angle;
            msg << " has (g1 g2) of order " << (order ? std::to_string(order) : std::string("> cap"))
                << ", which does not divide m = " << m;
            throw InconsistentAssignment(msg.str());
          }
        }
        const auto [g1, g2] = irrep.generators();
        append({g1, g2});
        break;
      }
      case SummandKind::geometric: {
        Eigen::MatrixXd gram(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const int m = cm.at(i, j);
            gram(i, j) = i == j ? 1.0 : (m == 0 ? -1.0 : -std::cos(kPi / m));
          }
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success) {
          throw InconsistentAssignment("geometric representation needs a positive definite cosine form");
        }
        const Eigen::MatrixXd l = llt.matrixL();
        std::vector<Matrix> blocks;
        for (int i = 0; i < n; ++i) {
          const Eigen::VectorXd u = l.row(i).transpose();
          blocks.push_back((Eigen::MatrixXd::Identity(n, n) - 2.0 * u * u.transpose()).cast<Complex>());
        }
        append(blocks);
        break;
      }
    }
  }

  if (seed) {
    std::mt19937_64 rng(*seed);
    const Matrix u = linalg::random_unitary(static_cast<int>(gens.front().rows()), rng);
    for (auto& g : gens) g = u * g * u.adjoint();
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const int m = cm.at(i, j);
      if (m == 0) continue;
      const double r = identity_defect(matrix_power(gens[i] * gens[j], m));
      if (r > 1e-9) {
        std::ostringstream msg;
        msg << "relation (g" << i + 1 << " g" << j + 1 << ")^" << m << " = 1 fails (residual " << r << ")";
        throw InconsistentAssignment(msg.str());
      }
    }
  }
  return CoxeterRep{cm, summands, std::move(gens), seed};
}

// ---------------------------------------------------------------------------
// Spectrum catalog

std::string to_string(ComponentShape shape) {
  switch (shape) {
    case ComponentShape::line: return "line";
    case ComponentShape::ellipse: return "ellipse";
    case ComponentShape::gen_line: return "gen_line";
    case ComponentShape::gen_ellipse_z: return "gen_ellipse_z";
  }
  return "unknown";
}

Complex SpectrumComponentDescriptor::evaluate(Complex x1, Complex x2) const {
  switch (shape) {
    case ComponentShape::line:
    case ComponentShape::gen_line: return double(c1) * x1 + double(c2) * x2 - 1.0;
    case ComponentShape::ellipse: return x1 * x1 + 2.0 * cos_alpha * x1 * x2 + x2 * x2 - 1.0;
    case ComponentShape::gen_ellipse_z: return x1 * x1 - x2 * x2 + 2.0 * cos_alpha * x2 - 1.0;
  }
  return 0.0;
}

std::vector<PencilPoint> SpectrumComponentDescriptor::sample(std::mt19937_64& rng, int count,
                                                              double radius) const {
  std::vector<PencilPoint> out;
  for (int k = 0; k < count; ++k) {
    const Complex x2 = disc_point(rng, radius);
    const double branch = k % 2 == 0 ? 1.0 : -1.0;
    Complex x1;
    switch (shape) {
      case ComponentShape::line:
      case ComponentShape::gen_line: x1 = (1.0 - double(c2) * x2) / double(c1); break;
      case ComponentShape::ellipse:
        x1 = -cos_alpha * x2 + branch * std::sqrt(cos_alpha * cos_alpha * x2 * x2 - x2 * x2 + 1.0);
        break;
      case ComponentShape::gen_ellipse_z: x1 = branch * std::sqrt(1.0 + x2 * x2 - 2.0 * cos_alpha * x2); break;
    }
    PencilPoint p(2);
    p << x1, x2;
    out.push_back(std::move(p));
  }
  return out;
}

std::pair<SpectrumComponentDescriptor, SpectrumComponentDescriptor> dihedral_component_catalog(
    const DihedralIrrep& irrep) {
  if (irrep.kind == IrrepKind::two_dim) {
    const double c = std::cos(irrep.angle);
    return {{ComponentShape::ellipse, 1, 1, c}, {ComponentShape::gen_ellipse_z, 1, 1, c}};
  }
  const auto [g1, g2] = irrep.generators();
  const int s1 = g1(0, 0).real() > 0 ? 1 : -1;
  const int s2 = g2(0, 0).real() > 0 ? 1 : -1;
  return {{ComponentShape::line, s1, s2, 0.0}, {ComponentShape::gen_line, s1, s1 * s2, 0.0}};
}

// ---------------------------------------------------------------------------
// Condition (*)

std::vector<PairDecomposition> check_condition_star(const CoxeterRep& rep, double angle_tol) {
  std::vector<PairDecomposition> out;
  const Matrix& r1 = rep.generators.front();
  for (int i = 1; i < rep.cm.size(); ++i) {
    const Matrix& ri = rep.generators[static_cast<std::size_t>(i)];
    Eigen::ComplexSchur<Matrix> schur(r1 * ri);
    if (schur.info() != Eigen::Success) throw EigensolverError("Schur form of the product failed");
    const Matrix& q = schur.matrixU();
    const Matrix& t = schur.matrixT();

    std::vector<int> fixed, flipped;
    std::vector<double> upper;
    int lower = 0;
    for (int k = 0; k < t.rows(); ++k) {
      const Complex e = t(k, k);
      if (std::abs(e - 1.0) <= angle_tol) fixed.push_back(k);
      else if (std::abs(e + 1.0) <= angle_tol) flipped.push_back(k);
      else if (e.imag() > 0.0) upper.push_back(std::arg(e));
      else ++lower;
    }
    if (lower != static_cast<int>(upper.size())) {
      throw EigensolverError("rotation eigenvalues do not pair up as e^{+-i alpha}");
    }

    // On the fixed and flipped eigenspaces rho(g1) separates the 1-dim irreps.
    auto split = [&](const std::vector<int>& idx) {
      Matrix basis(q.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t c = 0; c < idx.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = q.col(idx[c]);
      Matrix h = basis.adjoint() * r1 * basis;
      h = 0.5 * (h + h.adjoint()).eval();
      std::pair<int, int> counts{0, 0};
      if (idx.empty()) return counts;
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      for (int k = 0; k < es.eigenvalues().size(); ++k) {
        const double v = es.eigenvalues()(k);
        if (std::abs(v - 1.0) <= 1e-6) ++counts.first;
        else if (std::abs(v + 1.0) <= 1e-6) ++counts.second;
        else throw EigensolverError("rho(g1) is not an involution on a product eigenspace");
      }
      return counts;
    };

    PairDecomposition pd;
    pd.i = i;
    const auto [pp, mm] = split(fixed);
    const auto [pm, mp] = split(flipped);
    auto add = [&](IrrepKind k, int mult, double angle = 0.0) {
      if (mult > 0) pd.constituents.push_back({DihedralIrrep{k, angle}, mult});
    };
    add(IrrepKind::one_dim_pp, pp);
    add(IrrepKind::one_dim_mm, mm);
    add(IrrepKind::one_dim_pm, pm);
    add(IrrepKind::one_dim_mp, mp);

    std::sort(upper.begin(), upper.end());
    for (std::size_t k = 0; k < upper.size();) {
      std::size_t e = k + 1;
      while (e < upper.size() && upper[e] - upper[e - 1] <= angle_tol) ++e;
      double mean = 0.0;
      for (std::size_t r = k; r < e; ++r) mean += upper[r];
      add(IrrepKind::two_dim, static_cast<int>(e - k), mean / static_cast<double>(e - k));
      k = e;
    }
    for (const auto& [irrep, mult] : pd.constituents) pd.multiplicity_free = pd.multiplicity_free && mult <= 1;
    out.push_back(std::move(pd));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conditions (I), (II)

InclusionResult sampled_inclusion(const MatrixTuple& from, const MatrixTuple& into, int sample_count,
                                  std::uint64_t seed, double tol) {
  if (from.size() != into.size()) throw DimensionMismatch("inclusion test needs tuples of equal n");
  InclusionResult res;
  res.seed = seed;
  std::mt19937_64 rng(seed);
  const int n = from.size();
  for (int attempt = 0; res.sampled < sample_count && attempt < 20 * sample_count + 20; ++attempt) {
    const int lead = attempt % n;
    PencilPoint offset(n);
    for (int k = 0; k < n; ++k) offset(k) = k == lead ? Complex(0.0) : 0.5 * linalg::complex_normal(rng);
    for (Complex r : lead_roots(from, lead, offset).finite) {
      if (res.sampled >= sample_count) break;
      PencilPoint x = offset;
      x(lead) = r;
      const double d = spectral_distance(into, x);
      ++res.sampled;
      res.worst_distance = std::max(res.worst_distance, d);
      if (d > tol && res.holds) {
        res.holds = false;
        res.witness = x;
      }
    }
  }
  return res;
}

InclusionResult check_condition_I(const MatrixTuple& a, const CoxeterRep& rep, int sample_count,
                                  std::uint64_t seed, double tol) {
  return sampled_inclusion(rep.tuple(), a, sample_count, seed, tol);
}

MatrixTuple extended_tuple(const MatrixTuple& a) {
  std::vector<Matrix> ms(a.matrices().begin(), a.matrices().end());
  for (int k = 1; k < a.size(); ++k) ms.push_back(a[0] * a[k]);
  return MatrixTuple(std::move(ms));
}

std::vector<LocalMatchResult> check_condition_II(const MatrixTuple& a, const CoxeterRep& rep,
                                                 double epsilon, int sample_count,
                                                 std::uint64_t seed, double tol) {
  if (a.size() != rep.cm.size()) throw DimensionMismatch("tuple and representation differ in n");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const MatrixTuple ta = extended_tuple(a);
  const MatrixTuple tr = extended_tuple(rep.tuple());
  const int dim = ta.size();
  std::vector<LocalMatchResult> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int j = 0; j < a.size(); ++j) {
    for (int sign : {1, -1}) {
      LocalMatchResult res;
      res.coordinate = j;
      res.sign = sign;
      PencilPoint zeta = PencilPoint::Zero(dim);
      zeta(j) = double(sign);

      auto probe = [&](const MatrixTuple& from, const MatrixTuple& into, int& counter, const char* side) {
        for (int s = 0; s < sample_count; ++s) {
          const PencilPoint offset = 0.5 * epsilon * unit(rng) * random_direction(rng, dim, j);
          for (Complex r : lead_roots(from, j, offset).finite) {
            PencilPoint x = offset;
            x(j) = r;
            if ((x - zeta).norm() >= epsilon) continue;
            const double d = spectral_distance(into, x);
            ++counter;
            res.worst_distance = std::max(res.worst_distance, d);
            if (d > tol && res.holds) {
              res.holds = false;
              res.witness = x;
              res.witness_side = side;
            }
          }
        }
      };
      probe(ta, tr, res.sampled_a, "A");
      probe(tr, ta, res.sampled_rho, "rho");
      out.push_back(std::move(res));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Invariant subspace and restrictions

InvariantSubspace extract_invariant_subspace(const MatrixTuple& a, double tol) {
  const Matrix& a1 = a[0];
  const auto n = a1.rows();
  const Matrix eye = Matrix::Identity(n, n);
  const double scale = std::max(1.0, linalg::operator_norm(a1));
  const Matrix plus = null_space(a1 - eye, tol * scale);
  const Matrix minus = null_space(a1 + eye, tol * scale);
  if (plus.cols() + minus.cols() == 0) {
    throw EmptySubspaceError("A1 has no eigenvalues +-1; the subspace L is empty");
  }
  Matrix stacked(n, plus.cols() + minus.cols());
  stacked << plus, minus;
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  int rank = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > 1e-10) ++rank;

  InvariantSubspace out;
  out.basis = svd.matrixU().leftCols(rank);
  out.dim = rank;
  const Matrix proj = out.basis * out.basis.adjoint();
  for (const Matrix& aj : a.matrices()) {
    out.invariance_residuals.push_back(linalg::operator_norm((eye - proj) * aj * proj));
    out.restricted.push_back(out.basis.adjoint() * aj * out.basis);
  }
  return out;
}

ExponentRecovery recover_exponent(const Matrix& ai, const Matrix& aj, int cap, double tol) {
  ExponentRecovery out;
  Matrix h = ai + aj;
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  long long total = 1;
  bool infinite = false;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    const double mu = es.eigenvalues()(k);
    const double c = std::clamp(0.5 * mu * mu - 1.0, -1.0, 1.0);
    out.cosines.push_back(c);
    int order = 0;
    if (std::abs(c - 1.0) <= tol) {
      order = 1;
    } else if (std::abs(c + 1.0) <= tol) {
      order = 2;
    } else {
      const double alpha = std::acos(c);
      std::vector<int> candidates;
      for (int m = 3; m <= cap; ++m)
        for (int kk = 1; 2 * kk < m; ++kk)
          if (std::gcd(kk, m) == 1 && std::abs(2.0 * kPi * kk / m - alpha) <= tol) candidates.push_back(m);
      if (candidates.empty()) {
        infinite = true;
        continue;
      }
      if (candidates.size() > 1) out.ambiguous = true;
      order = *std::min_element(candidates.begin(), candidates.end());
    }
    total = std::lcm(total, static_cast<long long>(order));
  }
  out.recovered = infinite ? 0 : static_cast<int>(total);
  return out;
}

RestrictionCheck verify_restriction(const std::vector<Matrix>& restricted, const CoxeterRep& rep,
                                    int sample_count, std::uint64_t seed, double tol) {
  const int n = rep.cm.size();
  if (static_cast<int>(restricted.size()) != n) throw DimensionMismatch("one restriction per generator expected");
  RestrictionCheck out;
  double worst = 0.0;
  for (const Matrix& r : restricted) {
    const double u = identity_defect(r.adjoint() * r);
    const double sa = linalg::operator_norm(r - r.adjoint());
    out.unitary_residuals.push_back(u);
    out.selfadjoint_residuals.push_back(sa);
    worst = std::max({worst, u, sa});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const int m = rep.cm.at(i, j);
      if (m == 0) continue;
      const double r = identity_defect(matrix_power(restricted[i] * restricted[j], m));
      out.coxeter_residuals.push_back({i, j, m, r});
      worst = std::max(worst, r);
    }
  }
  out.max_residual = worst;

  const MatrixTuple mine(restricted);
  const MatrixTuple theirs = rep.tuple();
  out.restricted_in_rho = sampled_inclusion(mine, theirs, sample_count, seed, tol);
  out.rho_in_restricted = sampled_inclusion(theirs, mine, sample_count, seed + 1, tol);
  out.spectra_match = out.restricted_in_rho.holds && out.rho_in_restricted.holds;

  out.exponents_match = true;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      auto rec = recover_exponent(restricted[i], restricted[j]);
      rec.i = i;
      rec.j = j;
      rec.expected = rep.cm.at(i, j);
      out.exponents_match = out.exponents_match && !rec.ambiguous && rec.recovered == rec.expected;
      out.exponents.push_back(std::move(rec));
    }
  }
  return out;
}

EquivalenceEvidence equivalence_evidence(const std::vector<Matrix>& restricted,
                                         const std::vector<Matrix>& rho, int word_length_cap) {
  if (restricted.size() != rho.size()) throw DimensionMismatch("tuples differ in n");
  EquivalenceEvidence out;
  out.word_length_cap = word_length_cap;
  const int n = static_cast<int>(rho.size());
  std::vector<int> word;

  std::function<void(const Matrix&, const Matrix&, int)> walk = [&](const Matrix& a, const Matrix& b, int last) {
    ++out.words;
    const double d = std::abs(a.trace() - b.trace());
    if (d > out.max_discrepancy) {
      out.max_discrepancy = d;
      out.worst_word = word;
    }
    if (static_cast<int>(word.size()) == word_length_cap) return;
    for (int g = 0; g < n; ++g) {
      if (g == last) continue;  // g^2 = 1, so only reduced words are needed
      word.push_back(g);
      walk(a * restricted[g], b * rho[g], g);
      word.pop_back();
    }
  };
  const auto da = restricted.front().rows(), db = rho.front().rows();
  walk(Matrix::Identity(da, da), Matrix::Identity(db, db), -1);
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

RigidityReport rigidity_check(const MatrixTuple& a, const CoxeterRep& rep, const RigidityOptions& options) {
  if (a.size() != rep.cm.size()) throw DimensionMismatch("tuple and representation differ in n");
  if (a.size() < 2) throw DimensionMismatch("rigidity check needs n >= 2");
  RigidityReport out;
  out.group = classify(rep.cm);

  try {
    out.star = check_condition_star(rep);
    out.condition_star = std::all_of(out.star.begin(), out.star.end(),
                                     [](const PairDecomposition& p) { return p.multiplicity_free; });
  } catch (const Error& e) {
    out.notes.push_back(std::string("condition (*): ") + e.what());
  }
  out.condition_I = check_condition_I(a, rep, options.samples_I, options.seed, options.membership_tol);
  out.condition_II = check_condition_II(a, rep, options.epsilon, options.samples_II, options.seed + 1,
                                        options.membership_tol);
  out.condition_II_all = std::all_of(out.condition_II.begin(), out.condition_II.end(),
                                     [](const LocalMatchResult& r) { return r.holds; });

  out.a1_normal = normality(a[0]).is_normal;
  out.norms_ok = true;
  for (int j = 1; j < a.size(); ++j) {
    const double nj = linalg::operator_norm(a[j]);
    out.generator_norms.push_back(nj);
    out.norms_ok = out.norms_ok && std::abs(nj - 1.0) <= 1e-8;
  }

  if (options.check_pair_regularity) {
    std::vector<Complex> lambdas;
    const double tol = 1e-6 * std::max(1.0, linalg::operator_norm(a[0]));
    for (Complex mu : linalg::eigenvalues(a[0])) {
      if (std::none_of(lambdas.begin(), lambdas.end(), [&](Complex l) { return std::abs(l - mu) <= tol; })) {
        lambdas.push_back(mu);
      }
    }
    std::sort(lambdas.begin(), lambdas.end(), [](Complex x, Complex y) {
      return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    Direction xhat(1);
    xhat(0) = 1.0;
    out.hypotheses_regular = true;
    for (int i = 1; i < a.size(); ++i) {
      for (bool product : {false, true}) {
        const MatrixTuple pair({a[0], product ? Matrix(a[0] * a[i]) : a[i]});
        for (Complex lam : lambdas) {
          const auto r = check_regularity(pair, lam, xhat);
          out.regularity.push_back({i, product, lam, r.condition_a, r.condition_b});
          out.hypotheses_regular = out.hypotheses_regular && r.condition_a && r.condition_b;
        }
      }
    }
  }

  try {
    out.subspace = extract_invariant_subspace(a, options.residual_tol);
  } catch (const EmptySubspaceError& e) {
    out.notes.push_back(e.what());
    return out;
  }
  const auto& sub = *out.subspace;
  out.dim_L = sub.dim;
  out.max_invariance_residual = *std::max_element(sub.invariance_residuals.begin(), sub.invariance_residuals.end());
  out.conclusion_1 = out.dim_L == rep.dim() && out.max_invariance_residual <= options.residual_tol;

  out.restriction = verify_restriction(sub.restricted, rep, options.samples_restriction, options.seed + 2,
                                       options.membership_tol);
  out.conclusion_2 = out.restriction->max_residual <= options.residual_tol && out.restriction->spectra_match &&
                     out.restriction->exponents_match;

  if (out.group.non_special) {
    out.equivalence = equivalence_evidence(sub.restricted, rep.generators, options.word_length_cap);
    out.conclusion_3 = out.dim_L == rep.dim() && out.equivalence->max_discrepancy <= options.character_tol;
  } else {
    out.notes.push_back("conclusion 3) not applicable: group " + out.group.name +
                        " is not a finite non-special Coxeter group");
  }
  return out;
}

MatrixTuple planted_tuple(const CoxeterRep& rep, const std::vector<Matrix>& blocks, std::uint64_t seed) {
  const int n = rep.cm.size();
  if (static_cast<int>(blocks.size()) != n) throw DimensionMismatch("one block per generator expected");
  std::vector<Matrix> out;
  std::mt19937_64 rng(seed);
  const int total = rep.dim() + static_cast<int>(blocks.front().rows());
  const Matrix u = linalg::random_unitary(total, rng);
  for (int i = 0; i < n; ++i) {
    if (blocks[i].rows() != blocks.front().rows() || blocks[i].cols() != blocks[i].rows()) {
      throw DimensionMismatch("blocks must be square and of equal size");
    }
    out.push_back(u * linalg::direct_sum(rep.generators[i], blocks[i]) * u.adjoint());
  }
  return MatrixTuple(std::move(out));
}

}  // namespace jointspec
