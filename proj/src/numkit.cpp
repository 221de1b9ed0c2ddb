// numkit.cpp - dense linear algebra and LP feasibility.
#include "rsl/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsl {

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kDeflateTol = 1e-12;
constexpr int kQrIterCap = 10000;
constexpr double kFeasTol = 1e-9;
constexpr double kRadiusBand = 1e-9;
// Thresholds internal to the simplex routines.
constexpr double kReducedCostTol = 1e-11;
constexpr double kRatioTol = 1e-11;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
  require(rows >= 0 && cols >= 0, "matrix dimensions must be nonnegative");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::multiply(const Matrix& other) const {
  require(cols_ == other.rows_, "matrix product dimension mismatch");
  Matrix out(rows_, other.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (int j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  }
  return out;
}

std::vector<double> Matrix::apply_left(const std::vector<double>& v) const {
  require(static_cast<int>(v.size()) == rows_, "vector-matrix dimension mismatch");
  std::vector<double> out(cols_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double a = v[i];
    if (a == 0.0) continue;
    for (int j = 0; j < cols_; ++j) out[j] += a * (*this)(i, j);
  }
  return out;
}

std::vector<double> Matrix::apply_right(const std::vector<double>& v) const {
  require(static_cast<int>(v.size()) == cols_, "matrix-vector dimension mismatch");
  std::vector<double> out(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

double Matrix::inf_norm() const {
  double best = 0.0;
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

bool Matrix::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

bool Matrix::nonnegative() const {
  for (double x : data_)
    if (x < 0.0) return false;
  return true;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), "dot dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace {

// LU factorization with partial pivoting, kept for re-solving during
// iterative refinement.
struct LuFactors {
  Matrix lu;
  std::vector<int> perm;

  std::vector<double> solve(const std::vector<double>& b) const {
    int n = lu.rows();
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
      x[i] /= lu(i, i);
    }
    return x;
  }
};

LuFactors lu_factor(Matrix a, double pivot_tol) {
  int n = a.rows();
  std::vector<int> perm(n);
  std::vector<int> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = i;
  for (int k = 0; k < n; ++k) {
    int best = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(a(i, k)) > std::fabs(a(best, k))) best = i;
    if (std::fabs(a(best, k)) <= pivot_tol)
      throw SingularMatrix("pivot below tolerance at column " + std::to_string(k));
    if (best != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(best, j));
      std::swap(rows[k], rows[best]);
    }
    for (int i = k + 1; i < n; ++i) {
      double f = a(i, k) / a(k, k);
      a(i, k) = f;
      if (f == 0.0) continue;
      for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  for (int i = 0; i < n; ++i) perm[i] = rows[i];
  return LuFactors{std::move(a), std::move(perm)};
}

}  // namespace

std::vector<double> solve_linear(const Matrix& a, const std::vector<double>& b) {
  require(a.square(), "solve_linear needs a square matrix");
  require(static_cast<int>(b.size()) == a.rows(), "rhs length mismatch");
  require(a.all_finite(), "solve_linear: non-finite matrix entry");
  int n = a.rows();
  if (n == 0) return {};
  LuFactors f = lu_factor(a, kPivotTol);
  std::vector<double> x = f.solve(b);
  // One refinement step; residuals of well-posed systems drop to roundoff.
  std::vector<double> r = b;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += a(i, j) * x[j];
    r[i] -= s;
  }
  std::vector<double> d = f.solve(r);
  for (int i = 0; i < n; ++i) x[i] += d[i];
  return x;
}

namespace {

// Householder reduction to upper Hessenberg form (EISPACK orthes layout).
void to_hessenberg(Matrix& a) {
  int n = a.rows();
  std::vector<double> v(n, 0.0);
  for (int k = 0; k + 2 < n; ++k) {
    double scale = 0.0;
    for (int i = k + 1; i < n; ++i) scale += std::fabs(a(i, k));
    if (scale == 0.0) continue;
    double h = 0.0;
    for (int i = k + 1; i < n; ++i) {
      v[i] = a(i, k) / scale;
      h += v[i] * v[i];
    }
    double f = v[k + 1];
    double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
    h -= f * g;
    v[k + 1] = f - g;
    // Apply P = I - v v^T / h from the left, then from the right.
    for (int j = k; j < n; ++j) {
      double s = 0.0;
      for (int i = k + 1; i < n; ++i) s += v[i] * a(i, j);
      s /= h;
      for (int i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = k + 1; j < n; ++j) s += v[j] * a(i, j);
      s /= h;
      for (int j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
    }
    a(k + 1, k) = scale * g;
    for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Eigenvalue magnitudes of an upper Hessenberg matrix by the implicit
// double-shift QR iteration, as in the classic hqr routine (Wilkinson
// shifts with the standard exceptional shift every ten stalled sweeps).
double hessenberg_radius(Matrix& h) {
  int n = h.rows();
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(h(i, j));
  double radius = 0.0;
  double t = 0.0;
  int total_its = 0;
  int nn = n - 1;
  while (nn >= 0) {
    int its = 0;
    for (;;) {
      int l;
      for (l = nn; l >= 1; --l) {
        double s = std::fabs(h(l - 1, l - 1)) + std::fabs(h(l, l));
        if (s == 0.0) s = anorm;
        if (std::fabs(h(l, l - 1)) <= kDeflateTol * s) {
          h(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 0) l = 0;
      double x = h(nn, nn);
      if (l == nn) {
        radius = std::max(radius, std::fabs(x + t));
        --nn;
        break;
      }
      double y = h(nn - 1, nn - 1);
      double w = h(nn, nn - 1) * h(nn - 1, nn);
      if (l == nn - 1) {
        double p = 0.5 * (y - x);
        double q = p * p + w;
        double z = std::sqrt(std::fabs(q));
        x += t;
        if (q >= 0.0) {
          z = p + std::copysign(z, p);
          double l1 = x + z;
          double l2 = (z != 0.0) ? x - w / z : l1;
          radius = std::max({radius, std::fabs(l1), std::fabs(l2)});
        } else {
          radius = std::max(radius, std::hypot(x + p, z));
        }
        nn -= 2;
        break;
      }
      if (total_its >= kQrIterCap)
        throw NoConvergence("QR iteration cap exhausted");
      if (its == 10 || its == 20) {
        t += x;
        for (int i = 0; i <= nn; ++i) h(i, i) -= x;
        double s = std::fabs(h(nn, nn - 1)) + std::fabs(h(nn - 1, nn - 2));
        y = x = 0.75 * s;
        w = -0.4375 * s * s;
      }
      ++its;
      ++total_its;
      int m;
      double p = 0.0, q = 0.0, r = 0.0;
      for (m = nn - 2; m >= l; --m) {
        double z = h(m, m);
        double rr = x - z;
        double ss = y - z;
        p = (rr * ss - w) / h(m + 1, m) + h(m, m + 1);
        q = h(m + 1, m + 1) - z - rr - ss;
        r = h(m + 2, m + 1);
        double s = std::fabs(p) + std::fabs(q) + std::fabs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        double u = std::fabs(h(m, m - 1)) * (std::fabs(q) + std::fabs(r));
        double v = std::fabs(p) * (std::fabs(h(m - 1, m - 1)) + std::fabs(z) +
                                   std::fabs(h(m + 1, m + 1)));
        if (u <= kDeflateTol * v) break;
      }
      for (int i = m + 2; i <= nn; ++i) {
        h(i, i - 2) = 0.0;
        if (i != m + 2) h(i, i - 3) = 0.0;
      }
      for (int k = m; k <= nn - 1; ++k) {
        if (k != m) {
          p = h(k, k - 1);
          q = h(k + 1, k - 1);
          r = (k != nn - 1) ? h(k + 2, k - 1) : 0.0;
          x = std::fabs(p) + std::fabs(q) + std::fabs(r);
          if (x != 0.0) {
            p /= x;
            q /= x;
            r /= x;
          }
        }
        double s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
        if (s == 0.0) continue;
        if (k == m) {
          if (l != m) h(k, k - 1) = -h(k, k - 1);
        } else {
          h(k, k - 1) = -s * x;
        }
        p += s;
        x = p / s;
        y = q / s;
        double z = r / s;
        q /= p;
        r /= p;
        for (int j = k; j <= nn; ++j) {
          double pp = h(k, j) + q * h(k + 1, j);
          if (k != nn - 1) pp += r * h(k + 2, j);
          h(k, j) -= pp * x;
          h(k + 1, j) -= pp * y;
          if (k != nn - 1) h(k + 2, j) -= pp * z;
        }
        int mmin = std::min(nn, k + 3);
        for (int i = l; i <= mmin; ++i) {
          double pp = x * h(i, k) + y * h(i, k + 1);
          if (k != nn - 1) pp += z * h(i, k + 2);
          h(i, k) -= pp;
          h(i, k + 1) -= pp * q;
          if (k != nn - 1) h(i, k + 2) -= pp * r;
        }
      }
    }
  }
  return radius;
}

}  // namespace

double spectral_radius(const Matrix& m) {
  require(m.square(), "spectral_radius needs a square matrix");
  require(m.all_finite(), "spectral_radius: non-finite matrix entry");
  if (m.rows() == 0) return 0.0;
  if (m.rows() == 1) return std::fabs(m(0, 0));
  Matrix h = m;
  to_hessenberg(h);
  return hessenberg_radius(h);
}

bool is_spectral_radius_lt_one(const Matrix& m) {
  require(m.square(), "is_spectral_radius_lt_one needs a square matrix");
  require(m.all_finite(), "is_spectral_radius_lt_one: non-finite matrix entry");
  int n = m.rows();
  if (n == 0) return true;
  if (m.nonnegative()) {
    // Perron-Frobenius: the minimum row sum bounds the radius from below,
    // in exact arithmetic, so this "no" needs no band.
    double min_row = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += m(i, j);
      min_row = std::min(min_row, s);
    }
    if (min_row >= 1.0) return false;
  }
  // Norm certificates: rho <= ||m^k||^(1/k) for any k, so any power with
  // infinity norm below one certifies "yes".
  Matrix p = m;
  for (int squarings = 0; squarings <= 6; ++squarings) {
    double norm = p.inf_norm();
    if (norm < 1.0) return true;
    if (!p.all_finite() || norm > 1e100) break;
    p = p.multiply(p);
  }
  double rho = spectral_radius(m);
  if (std::fabs(rho - 1.0) <= kRadiusBand)
    throw Undecided("spectral radius within 1e-9 of 1");
  return rho < 1.0;
}

double constraint_violation(const ConstraintSystem& sys, const std::vector<double>& x) {
  require(static_cast<int>(x.size()) == sys.num_vars, "witness length mismatch");
  double worst = 0.0;
  for (const AbsRow& row : sys.abs_rows)
    worst = std::max(worst, std::fabs(dot(row.coeffs, x) - row.target) - row.bound);
  for (const EqRow& row : sys.eq_rows)
    worst = std::max(worst, std::fabs(dot(row.coeffs, x) - row.value));
  return std::max(worst, 0.0);
}

namespace {

void check_system(const ConstraintSystem& sys) {
  require(sys.num_vars >= 0, "negative variable count");
  auto check_coeffs = [&](const std::vector<double>& c) {
    require(static_cast<int>(c.size()) == sys.num_vars, "row width mismatch");
    for (double v : c) require(std::isfinite(v), "non-finite coefficient");
  };
  for (const AbsRow& row : sys.abs_rows) {
    check_coeffs(row.coeffs);
    require(std::isfinite(row.target), "non-finite target");
    require(std::isfinite(row.bound) && row.bound >= 0.0, "bad bound");
  }
  for (const EqRow& row : sys.eq_rows) {
    check_coeffs(row.coeffs);
    require(std::isfinite(row.value), "non-finite value");
  }
}

enum class Sense { Le, Ge, Eq };

struct LinearRow {
  std::vector<double> coeffs;
  double rhs = 0.0;
  Sense sense = Sense::Le;
};

std::vector<LinearRow> expand_rows(const ConstraintSystem& sys) {
  std::vector<LinearRow> rows;
  rows.reserve(2 * sys.abs_rows.size() + sys.eq_rows.size());
  for (const AbsRow& row : sys.abs_rows) {
    rows.push_back({row.coeffs, row.target + row.bound, Sense::Le});
    rows.push_back({row.coeffs, row.target - row.bound, Sense::Ge});
  }
  for (const EqRow& row : sys.eq_rows) rows.push_back({row.coeffs, row.value, Sense::Eq});
  return rows;
}

}  // namespace

namespace detail {

// Textbook phase-1 simplex on the expanded system: free variables split into
// positive and negative parts, absolute-value rows expanded into inequality
// pairs, slack/surplus and artificial columns appended, artificial mass
// minimized under Bland's rule.
FeasibilityResult lp_feasible_phase1(const ConstraintSystem& sys) {
  check_system(sys);
  int n = sys.num_vars;
  std::vector<LinearRow> rows = expand_rows(sys);
  int m = static_cast<int>(rows.size());
  if (m == 0) return {true, std::vector<double>(n, 0.0)};

  // Normalize right-hand sides to be nonnegative.
  for (LinearRow& row : rows) {
    if (row.rhs < 0.0) {
      for (double& c : row.coeffs) c = -c;
      row.rhs = -row.rhs;
      if (row.sense == Sense::Le)
        row.sense = Sense::Ge;
      else if (row.sense == Sense::Ge)
        row.sense = Sense::Le;
    }
  }

  int slack_count = 0, art_count = 0;
  for (const LinearRow& row : rows) {
    if (row.sense != Sense::Eq) ++slack_count;
    if (row.sense != Sense::Le) ++art_count;
  }
  int cols = 2 * n + slack_count + art_count;
  int rhs_col = cols;
  int art_begin = 2 * n + slack_count;

  std::vector<std::vector<double>> tab(m, std::vector<double>(cols + 1, 0.0));
  std::vector<int> basis(m, -1);
  {
    int next_slack = 2 * n, next_art = art_begin;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        tab[i][j] = rows[i].coeffs[j];
        tab[i][n + j] = -rows[i].coeffs[j];
      }
      tab[i][rhs_col] = rows[i].rhs;
      switch (rows[i].sense) {
        case Sense::Le:
          tab[i][next_slack] = 1.0;
          basis[i] = next_slack++;
          break;
        case Sense::Ge:
          tab[i][next_slack++] = -1.0;
          tab[i][next_art] = 1.0;
          basis[i] = next_art++;
          break;
        case Sense::Eq:
          tab[i][next_art] = 1.0;
          basis[i] = next_art++;
          break;
      }
    }
  }

  // Reduced costs for minimizing the artificial sum, with basic artificial
  // columns priced out.
  std::vector<double> red(cols, 0.0);
  double objective = 0.0;
  for (int j = art_begin; j < cols; ++j) red[j] = 1.0;
  for (int i = 0; i < m; ++i) {
    if (basis[i] < art_begin) continue;
    for (int j = 0; j < cols; ++j) red[j] -= tab[i][j];
    objective += tab[i][rhs_col];
  }

  long iter_cap = 1000 + 50L * (m + cols);
  for (long iter = 0;; ++iter) {
    if (iter > iter_cap) throw NumericError("phase-1 simplex iteration cap");
    int enter = -1;
    for (int j = 0; j < cols; ++j) {
      if (red[j] < -kReducedCostTol) {
        enter = j;
        break;  // Bland: smallest eligible index
      }
    }
    if (enter < 0) break;
    // Two-pass ratio test, as in the margin solver: tightest ratio under a
    // small relaxation first, then the largest pivot within that bound.
    int leave = -1;
    double theta_max = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (tab[i][enter] <= kRatioTol) continue;
      theta_max = std::min(theta_max, (tab[i][rhs_col] + 1e-9) / tab[i][enter]);
    }
    if (std::isfinite(theta_max)) {
      double best_piv = 0.0;
      for (int i = 0; i < m; ++i) {
        if (tab[i][enter] <= kRatioTol) continue;
        if (tab[i][rhs_col] / tab[i][enter] <= theta_max && tab[i][enter] > best_piv) {
          leave = i;
          best_piv = tab[i][enter];
        }
      }
    }
    if (leave < 0) throw NumericError("phase-1 simplex detected an unbounded column");
    double piv = tab[leave][enter];
    for (int j = 0; j <= cols; ++j) tab[leave][j] /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      double f = tab[i][enter];
      if (f == 0.0) continue;
      for (int j = 0; j <= cols; ++j) tab[i][j] -= f * tab[leave][j];
    }
    double f = red[enter];
    for (int j = 0; j < cols; ++j) red[j] -= f * tab[leave][j];
    objective += f * tab[leave][rhs_col];
    basis[leave] = enter;
  }

  if (objective > kFeasTol) return {false, {}};
  std::vector<double> witness(n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n)
      witness[basis[i]] += tab[i][rhs_col];
    else if (basis[i] < 2 * n)
      witness[basis[i] - n] -= tab[i][rhs_col];
  }
  return {true, std::move(witness)};
}

// Equivalent feasibility decision through the worst-violation program
//   minimize d  s.t.  a_r . x - d <= b_r  for every expanded row,  d >= -1,
// which is feasible for any x once d is large, and whose optimum is <= 0
// exactly when the original system is satisfiable.  It is solved as a
// standard-form LP on the dual, where the basis stays (num_vars+1)-square no
// matter how many rows the system has.
FeasibilityResult lp_feasible_minimax(const ConstraintSystem& sys) {
  check_system(sys);
  int n = sys.num_vars;
  if (n == 0) {
    double worst = constraint_violation(sys, {});
    if (worst <= kFeasTol) return {true, {}};
    return {false, {}};
  }

  // Column r of the dual carries (a_r, margin) with cost b_r.  Margin 1 on
  // the absolute-value pairs makes the recovered point maximize the uniform
  // slack under those rows; margin 0 keeps the equality pairs exact.  The
  // trailing (0, 1) column with cost 1 caps the slack (d >= -1).
  std::vector<std::vector<double>> col;
  std::vector<double> cost;
  auto push = [&](const std::vector<double>& a, double sign, double b,
                  double margin) {
    std::vector<double> c(n + 1, 0.0);
    for (int j = 0; j < n; ++j) c[j] = sign * a[j];
    c[n] = margin;
    col.push_back(std::move(c));
    cost.push_back(b);
  };
  for (const AbsRow& row : sys.abs_rows) {
    push(row.coeffs, 1.0, row.target + row.bound, 1.0);
    push(row.coeffs, -1.0, row.bound - row.target, 1.0);
  }
  for (const EqRow& row : sys.eq_rows) {
    push(row.coeffs, 1.0, row.value, 0.0);
    push(row.coeffs, -1.0, -row.value, 0.0);
  }
  {
    std::vector<double> zero(n, 0.0);
    push(zero, 1.0, 1.0, 1.0);
  }
  int ncols = static_cast<int>(col.size());
  int dim = n + 1;

  // Revised two-phase simplex on: minimize cost.y, sum_r y_r col_r = e_dim,
  // y >= 0.  Artificial columns seed the basis.
  std::vector<int> basis(dim);
  for (int i = 0; i < dim; ++i) basis[i] = ncols + i;

  auto column_of = [&](int id, int i) -> double {
    if (id < ncols) return col[id][i];
    return (id - ncols == i) ? 1.0 : 0.0;
  };
  std::vector<char> is_basic(static_cast<size_t>(ncols) + dim, 0);
  for (int i = 0; i < dim; ++i) is_basic[basis[i]] = 1;

  // The basis inverse is kept explicitly: the artificial start basis is the
  // identity, each pivot is a rank-one row update, and the inverse is rebuilt
  // from scratch every so often (and after any small pivot) so rounding from
  // long update chains cannot accumulate into a bogus verdict.
  Matrix binv = Matrix::identity(dim);
  auto refactor = [&]() {
    Matrix b(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k) b(i, k) = column_of(basis[k], i);
    LuFactors f = lu_factor(std::move(b), 1e-30);
    std::vector<double> unit(dim, 0.0);
    for (int j = 0; j < dim; ++j) {
      unit[j] = 1.0;
      std::vector<double> bj = f.solve(unit);
      unit[j] = 0.0;
      for (int i = 0; i < dim; ++i) binv(i, j) = bj[i];
    }
  };
  auto multipliers = [&](auto&& cost_of) {
    std::vector<double> pi(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
      double c = cost_of(basis[i]);
      if (c == 0.0) continue;
      for (int j = 0; j < dim; ++j) pi[j] += c * binv(i, j);
    }
    return pi;
  };
  int since_refactor = 0;

  for (int phase = 1; phase <= 2; ++phase) {
    auto cost_of = [&](int id) -> double {
      if (phase == 1) return id < ncols ? 0.0 : 1.0;
      return id < ncols ? cost[id] : 0.0;
    };
    for (long iter = 0;; ++iter) {
      if (iter > 200000) throw NumericError("dual simplex iteration cap");
      std::vector<double> pi = multipliers(cost_of);
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        if (is_basic[j]) continue;
        double rc = cost_of(j) - dot(pi, col[j]);
        if (rc < -kFeasTol) {
          enter = j;
          break;  // Bland
        }
      }
      if (enter < 0) break;
      std::vector<double> w(dim, 0.0);
      for (int j = 0; j < dim; ++j) {
        double a = col[enter][j];
        if (a == 0.0) continue;
        for (int i = 0; i < dim; ++i) w[i] += binv(i, j) * a;
      }
      // rhs is the last unit vector, so the basic solution is a column of binv.
      // Two-pass ratio test: find the tightest ratio under a small feasibility
      // relaxation, then among rows within that bound take the largest pivot.
      // Degenerate vertices tie almost every ratio at zero, and picking by
      // index there would happily run a 1e-11 pivot into the basis.
      int leave = -1;
      double theta_max = std::numeric_limits<double>::infinity();
      for (int i = 0; i < dim; ++i) {
        if (w[i] <= kRatioTol) continue;
        theta_max = std::min(theta_max, (binv(i, dim - 1) + 1e-9) / w[i]);
      }
      if (std::isfinite(theta_max)) {
        double best_piv = 0.0;
        for (int i = 0; i < dim; ++i) {
          if (w[i] <= kRatioTol) continue;
          if (binv(i, dim - 1) / w[i] <= theta_max && w[i] > best_piv) {
            leave = i;
            best_piv = w[i];
          }
        }
      }
      if (leave < 0) {
        // An improving ray in phase 2 means the recovered-point program has
        // no feasible point: the equality rows are contradictory.
        if (phase == 2) return {false, {}};
        throw NumericError("dual simplex detected an unbounded column");
      }
      double piv = w[leave];
      is_basic[basis[leave]] = 0;
      is_basic[enter] = 1;
      basis[leave] = enter;
      double inv_piv = 1.0 / piv;
      for (int j = 0; j < dim; ++j) binv(leave, j) *= inv_piv;
      for (int i = 0; i < dim; ++i) {
        if (i == leave) continue;
        double wi = w[i];
        if (wi == 0.0) continue;
        for (int j = 0; j < dim; ++j) binv(i, j) -= wi * binv(leave, j);
      }
      if (++since_refactor >= 64 || std::fabs(piv) < 1e-8) {
        refactor();
        since_refactor = 0;
      }
    }
    if (phase == 1) {
      double art = 0.0;
      for (int i = 0; i < dim; ++i)
        if (basis[i] >= ncols) art += std::fabs(binv(i, dim - 1));
      if (art > 1e-7) throw NumericError("dual phase-1 failed to zero artificials");
    }
  }

  // Optimal multipliers carry the primal point: pi = (x, -d).
  refactor();
  std::vector<double> pi =
      multipliers([&](int id) { return id < ncols ? cost[id] : 0.0; });
  double worst = -pi[n];
  if (worst > kFeasTol) return {false, {}};
  std::vector<double> witness(pi.begin(), pi.begin() + n);
  return {true, std::move(witness)};
}

}  // namespace detail

FeasibilityResult lp_feasible(const ConstraintSystem& sys) {
  try {
    return detail::lp_feasible_minimax(sys);
  } catch (const NumericError&) {
    // Degenerate systems can stall or break the margin solver; the tableau
    // solver still settles feasibility, it just returns a vertex witness
    // instead of a margin-optimal one.
    return detail::lp_feasible_phase1(sys);
  }
}

}  // namespace rsl
