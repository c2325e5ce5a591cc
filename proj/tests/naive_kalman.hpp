#pragma once

// Plain-array Kalman filter written straight from the matrix formulas, used
// as an independent reference for the Eigen implementation.

namespace naive {

struct Kf {
  double x[3];
  double p[3][3];
};

struct Params {
  double dt, q_i, q_bias, q_p, r_i, r_p;
};

inline void matmul3(const double a[3][3], const double b[3][3], double out[3][3]) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      out[i][j] = s;
    }
}

inline void step(Kf& kf, double u, double z_theta, double z_lp, const Params& prm) {
  const double a[3][3] = {{1, -prm.dt, 0}, {0, 1, 0}, {0, 0, 1}};
  const double at[3][3] = {{1, 0, 0}, {-prm.dt, 1, 0}, {0, 0, 1}};
  const double b[3] = {prm.dt, 0, 0};
  const double q[3] = {prm.q_i * prm.dt, prm.q_bias * prm.dt, prm.q_p * prm.dt};
  const double h[2][3] = {{1, 0, 0}, {0, 0, 1}};

  // a priori
  double xb[3];
  for (int i = 0; i < 3; ++i) {
    xb[i] = b[i] * u;
    for (int k = 0; k < 3; ++k) xb[i] += a[i][k] * kf.x[k];
  }
  double ap[3][3], pb[3][3];
  matmul3(a, kf.p, ap);
  matmul3(ap, at, pb);
  for (int i = 0; i < 3; ++i) pb[i][i] += q[i];

  // S = H Pb H^T + R
  double hp[2][3];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) {
      hp[i][j] = 0;
      for (int k = 0; k < 3; ++k) hp[i][j] += h[i][k] * pb[k][j];
    }
  double s[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      s[i][j] = 0;
      for (int k = 0; k < 3; ++k) s[i][j] += hp[i][k] * h[j][k];
    }
  s[0][0] += prm.r_i;
  s[1][1] += prm.r_p;
  const double det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
  const double si[2][2] = {{s[1][1] / det, -s[0][1] / det}, {-s[1][0] / det, s[0][0] / det}};

  // K = Pb H^T S^-1
  double pht[3][2];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) {
      pht[i][j] = 0;
      for (int k = 0; k < 3; ++k) pht[i][j] += pb[i][k] * h[j][k];
    }
  double kg[3][2];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) kg[i][j] = pht[i][0] * si[0][j] + pht[i][1] * si[1][j];

  // innovation and a posteriori
  const double v[2] = {z_theta - xb[0], z_lp - xb[2]};
  for (int i = 0; i < 3; ++i) kf.x[i] = xb[i] + kg[i][0] * v[0] + kg[i][1] * v[1];
  double ikh[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ikh[i][j] = (i == j ? 1.0 : 0.0) - (kg[i][0] * h[0][j] + kg[i][1] * h[1][j]);
  double pn[3][3];
  matmul3(ikh, pb, pn);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) kf.p[i][j] = 0.5 * (pn[i][j] + pn[j][i]);
}

}  // namespace naive
