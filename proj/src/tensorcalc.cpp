#include "rfk/tensorcalc.hpp"

#include <algorithm>
#include <sstream>

namespace rfk {

std::string_view chart_name(ChartId id) {
  switch (id) {
    case ChartId::generic: return "generic";
    case ChartId::hitchin_zy: return "hitchin-zy";
    case ChartId::gh_theta_b_a: return "gh-theta-b-a";
  }
  return "generic";
}

Mat4 identity4() {
  Mat4 m{};
  for (int i = 0; i < kDim; ++i) m[i][i] = 1.0;
  return m;
}

Mat4 transpose(const Mat4& a) {
  Mat4 t{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t[i][j] = a[j][i];
  return t;
}

Mat4 multiply(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k)
      for (int j = 0; j < kDim; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

namespace {

// 2x2 minors of rows (r0, r1) used by the Laplace expansion.
double minor2(const Mat4& m, int r0, int r1, int c0, int c1) {
  return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
}

}  // namespace

double determinant(const Mat4& m) {
  // Laplace expansion along the first two rows.
  const double s0 = minor2(m, 0, 1, 0, 1), s1 = minor2(m, 0, 1, 0, 2);
  const double s2 = minor2(m, 0, 1, 0, 3), s3 = minor2(m, 0, 1, 1, 2);
  const double s4 = minor2(m, 0, 1, 1, 3), s5 = minor2(m, 0, 1, 2, 3);
  const double c5 = minor2(m, 2, 3, 2, 3), c4 = minor2(m, 2, 3, 1, 3);
  const double c3 = minor2(m, 2, 3, 1, 2), c2 = minor2(m, 2, 3, 0, 3);
  const double c1 = minor2(m, 2, 3, 0, 2), c0 = minor2(m, 2, 3, 0, 1);
  return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

Mat4 inverse(const Mat4& m) {
  const double s0 = minor2(m, 0, 1, 0, 1), s1 = minor2(m, 0, 1, 0, 2);
  const double s2 = minor2(m, 0, 1, 0, 3), s3 = minor2(m, 0, 1, 1, 2);
  const double s4 = minor2(m, 0, 1, 1, 3), s5 = minor2(m, 0, 1, 2, 3);
  const double c5 = minor2(m, 2, 3, 2, 3), c4 = minor2(m, 2, 3, 1, 3);
  const double c3 = minor2(m, 2, 3, 1, 2), c2 = minor2(m, 2, 3, 0, 3);
  const double c1 = minor2(m, 2, 3, 0, 2), c0 = minor2(m, 2, 3, 0, 1);
  const double det = s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
  if (det == 0.0 || !std::isfinite(det)) {
    fail(ErrorCode::degenerate_metric, "inverse: singular 4x4 matrix");
  }
  const double inv = 1.0 / det;
  Mat4 r{};
  r[0][0] = (m[1][1] * c5 - m[1][2] * c4 + m[1][3] * c3) * inv;
  r[0][1] = (-m[0][1] * c5 + m[0][2] * c4 - m[0][3] * c3) * inv;
  r[0][2] = (m[3][1] * s5 - m[3][2] * s4 + m[3][3] * s3) * inv;
  r[0][3] = (-m[2][1] * s5 + m[2][2] * s4 - m[2][3] * s3) * inv;
  r[1][0] = (-m[1][0] * c5 + m[1][2] * c2 - m[1][3] * c1) * inv;
  r[1][1] = (m[0][0] * c5 - m[0][2] * c2 + m[0][3] * c1) * inv;
  r[1][2] = (-m[3][0] * s5 + m[3][2] * s2 - m[3][3] * s1) * inv;
  r[1][3] = (m[2][0] * s5 - m[2][2] * s2 + m[2][3] * s1) * inv;
  r[2][0] = (m[1][0] * c4 - m[1][1] * c2 + m[1][3] * c0) * inv;
  r[2][1] = (-m[0][0] * c4 + m[0][1] * c2 - m[0][3] * c0) * inv;
  r[2][2] = (m[3][0] * s4 - m[3][1] * s2 + m[3][3] * s0) * inv;
  r[2][3] = (-m[2][0] * s4 + m[2][1] * s2 - m[2][3] * s0) * inv;
  r[3][0] = (-m[1][0] * c3 + m[1][1] * c1 - m[1][2] * c0) * inv;
  r[3][1] = (m[0][0] * c3 - m[0][1] * c1 + m[0][2] * c0) * inv;
  r[3][2] = (-m[3][0] * s3 + m[3][1] * s1 - m[3][2] * s0) * inv;
  r[3][3] = (m[2][0] * s3 - m[2][1] * s1 + m[2][2] * s0) * inv;
  return r;
}

Vec4 symmetric_eigenvalues(const Mat4& input) {
  Mat4 a = input;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0, diag = 0;
    for (int i = 0; i < kDim; ++i) {
      diag += a[i][i] * a[i][i];
      for (int j = i + 1; j < kDim; ++j) off += a[i][j] * a[i][j];
    }
    if (off <= 1e-32 * diag || off == 0.0) break;
    for (int p = 0; p < kDim; ++p) {
      for (int q = p + 1; q < kDim; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < kDim; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < kDim; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  Vec4 ev{a[0][0], a[1][1], a[2][2], a[3][3]};
  std::sort(ev.begin(), ev.end());
  return ev;
}

double max_abs(const Mat4& a) {
  double m = 0;
  for (const auto& row : a)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Mat4& a, const Mat4& b) {
  double m = 0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

Vec4 default_steps(const ChartPoint& p) {
  Vec4 h;
  for (int i = 0; i < kDim; ++i) h[i] = 1e-3 * std::max(1.0, std::abs(p.coords[i]));
  return h;
}

void check_metric(const Mat4& g, double condition_limit) {
  for (int i = 0; i < kDim; ++i) {
    if (!(g[i][i] > 0) || !std::isfinite(g[i][i])) {
      std::ostringstream os;
      os << "metric not positive definite (g_" << i << i << " = " << g[i][i] << ")";
      fail(ErrorCode::degenerate_metric, os.str());
    }
  }
  // Diagonal equilibration removes pure coordinate scalings from the
  // condition number.
  Vec4 d;
  for (int i = 0; i < kDim; ++i) d[i] = 1.0 / std::sqrt(g[i][i]);
  Mat4 scaled;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) scaled[i][j] = d[i] * g[i][j] * d[j];
  const Vec4 ev = symmetric_eigenvalues(scaled);
  if (!(ev[0] > 0) || !std::isfinite(ev[3])) {
    std::ostringstream os;
    os << "metric not positive definite (min eigenvalue " << ev[0] << ")";
    fail(ErrorCode::degenerate_metric, os.str());
  }
  if (ev[3] / ev[0] > condition_limit) {
    std::ostringstream os;
    os << "metric condition number " << ev[3] / ev[0] << " exceeds limit";
    fail(ErrorCode::degenerate_metric, os.str());
  }
}

namespace {

Tensor3 christoffel_from(const Mat4& ginv, const Tensor3& dg) {
  // dg[m][i][j] = ∂_m g_ij
  Tensor3 lowered{};  // Γ_{m i j}
  for (int m = 0; m < kDim; ++m)
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) {
        const double v = 0.5 * (dg[i][m][j] + dg[j][m][i] - dg[m][i][j]);
        lowered[m][i][j] = v;
        lowered[m][j][i] = v;
      }
  Tensor3 gamma{};
  for (int k = 0; k < kDim; ++k)
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) {
        double s = 0;
        for (int m = 0; m < kDim; ++m) s += ginv[k][m] * lowered[m][i][j];
        gamma[k][i][j] = s;
        gamma[k][j][i] = s;
      }
  return gamma;
}

Mat4 symmetrized(const Mat4& g) {
  Mat4 s = g;
  for (int i = 0; i < kDim; ++i)
    for (int j = i + 1; j < kDim; ++j) s[i][j] = s[j][i] = 0.5 * (g[i][j] + g[j][i]);
  return s;
}

}  // namespace

Tensor3 christoffel_at(const MetricField& metric, const ChartPoint& p,
                       const Vec4& step, const CurvatureOptions& opts) {
  const Mat4 g = symmetrized(metric(p).g);
  check_metric(g, opts.condition_limit);
  auto gfield = [&](const ChartPoint& q) { return metric(q).g; };
  Tensor3 dg{};
  for (int m = 0; m < kDim; ++m) {
    MultiIndex mi{};
    mi[m] = 1;
    dg[m] = symmetrized(differentiate_field(gfield, p, mi, step));
  }
  return christoffel_from(inverse(g), dg);
}

void fill_curvature_norms(CurvatureBundle& c, const Mat4& g) {
  const Mat4 ginv = inverse(g);
  Mat4 ric{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double s = 0;
      for (int k = 0; k < kDim; ++k) s += c.riemann[k][i][k][j];
      ric[i][j] = s;
    }
  c.ricci = symmetrized(ric);
  double scalar = 0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) scalar += ginv[i][j] * c.ricci[i][j];
  c.scalar = scalar;

  const Mat4 ric_up = multiply(multiply(ginv, c.ricci), ginv);
  double rn = 0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) rn += c.ricci[i][j] * ric_up[i][j];
  c.ricci_norm = std::sqrt(std::max(0.0, rn));

  // Lower the first index, raise the remaining ones, contract.
  Tensor4 low{};
  for (int l = 0; l < kDim; ++l)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k) {
          double s = 0;
          for (int m = 0; m < kDim; ++m) s += g[l][m] * c.riemann[m][i][j][k];
          low[l][i][j][k] = s;
        }
  Tensor4 up = low;
  for (int slot = 0; slot < 4; ++slot) {
    Tensor4 next{};
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int cc = 0; cc < kDim; ++cc)
          for (int d = 0; d < kDim; ++d) {
            double s = 0;
            for (int m = 0; m < kDim; ++m) {
              switch (slot) {
                case 0: s += ginv[a][m] * up[m][b][cc][d]; break;
                case 1: s += ginv[b][m] * up[a][m][cc][d]; break;
                case 2: s += ginv[cc][m] * up[a][b][m][d]; break;
                default: s += ginv[d][m] * up[a][b][cc][m]; break;
              }
            }
            next[a][b][cc][d] = s;
          }
    up = next;
  }
  double kr = 0;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int cc = 0; cc < kDim; ++cc)
        for (int d = 0; d < kDim; ++d) kr += low[a][b][cc][d] * up[a][b][cc][d];
  c.riem_norm_sq = std::max(0.0, kr);
}

CurvatureBundle curvature_at(const MetricField& metric, const ChartPoint& p,
                             const Vec4& step, const CurvatureOptions& opts) {
  const Mat4 g = symmetrized(metric(p).g);
  check_metric(g, opts.condition_limit);

  CurvatureBundle c;
  c.christoffel = christoffel_at(metric, p, step, opts);

  auto gamma_field = [&](const ChartPoint& q) {
    return christoffel_at(metric, q, step, opts);
  };
  Tensor4 dgamma{};  // dgamma[j][l][k][i] = ∂_j Γ^l_{ki}
  for (int j = 0; j < kDim; ++j) {
    MultiIndex mi{};
    mi[j] = 1;
    dgamma[j] = differentiate_field(gamma_field, p, mi, step);
  }

  const Tensor3& G = c.christoffel;
  for (int l = 0; l < kDim; ++l)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = j + 1; k < kDim; ++k) {
          double v = dgamma[j][l][k][i] - dgamma[k][l][j][i];
          for (int m = 0; m < kDim; ++m) {
            v += G[l][j][m] * G[m][k][i] - G[l][k][m] * G[m][j][i];
          }
          c.riemann[l][i][j][k] = v;
          c.riemann[l][i][k][j] = -v;
        }
  fill_curvature_norms(c, g);
  return c;
}

CurvatureBundle curvature_at(const MetricField& metric, const ChartPoint& p) {
  return curvature_at(metric, p, default_steps(p));
}

CurvatureBundle rescale_curvature(const CurvatureBundle& c, const Mat4& g,
                                  double lambda) {
  CurvatureBundle r = c;
  Mat4 scaled = g;
  for (auto& row : scaled)
    for (double& v : row) v *= lambda;
  fill_curvature_norms(r, scaled);
  return r;
}

ThreeFormSample exterior_derivative(const TwoFormField& form,
                                    const ChartPoint& p, const Vec4& step) {
  auto wfield = [&](const ChartPoint& q) { return form(q).omega; };
  Tensor3 dw{};  // dw[i][j][k] = ∂_i ω_jk
  for (int i = 0; i < kDim; ++i) {
    MultiIndex mi{};
    mi[i] = 1;
    dw[i] = differentiate_field(wfield, p, mi, step);
  }
  constexpr int triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  ThreeFormSample out;
  for (int t = 0; t < 4; ++t) {
    const int i = triples[t][0], j = triples[t][1], k = triples[t][2];
    const double a = dw[i][j][k], b = dw[j][k][i], cc = dw[k][i][j];
    out.components[t] = a + b + cc;
    out.term_scale = std::max(out.term_scale, std::abs(a) + std::abs(b) + std::abs(cc));
  }
  return out;
}

NijenhuisSample nijenhuis_at(const ComplexStructureField& Jfield,
                             const ChartPoint& p, const Vec4& step) {
  const Mat4 J = Jfield(p).J;
  auto jf = [&](const ChartPoint& q) { return Jfield(q).J; };
  Tensor3 dJ{};  // dJ[l][k][j] = ∂_l J^k_j
  for (int l = 0; l < kDim; ++l) {
    MultiIndex mi{};
    mi[l] = 1;
    dJ[l] = differentiate_field(jf, p, mi, step);
  }
  NijenhuisSample out;
  for (int k = 0; k < kDim; ++k)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        double v = 0, scale = 0;
        for (int l = 0; l < kDim; ++l) {
          const double t1 = J[l][i] * dJ[l][k][j];
          const double t2 = -J[l][j] * dJ[l][k][i];
          const double t3 = -J[k][l] * dJ[i][l][j];
          const double t4 = J[k][l] * dJ[j][l][i];
          v += t1 + t2 + t3 + t4;
          scale += std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
        }
        out.n[k][i][j] = v;
        out.term_scale = std::max(out.term_scale, scale);
      }
  return out;
}

double compatibility_residual(const Mat4& g, const Mat4& J, const Mat4& omega) {
  const Mat4 jg = multiply(transpose(J), g);
  return max_abs_diff(jg, omega) / std::max(max_abs(g), 1e-300);
}

double hermitian_residual(const Mat4& g, const Mat4& J) {
  const Mat4 pulled = multiply(multiply(transpose(J), g), J);
  return max_abs_diff(pulled, g) / std::max(max_abs(g), 1e-300);
}

}  // namespace rfk
