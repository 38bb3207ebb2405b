// Copyright 2026 The BLADE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "blade/structure_tensor.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "blade/parallel.h"

namespace blade {

GradientField DiagonalGradient(const ImageGray& img) {
  if (img.width() < 2 || img.height() < 2) {
    throw std::invalid_argument("structure tensor needs an image of at "
                                "least 2x2");
  }
  GradientField g;
  g.width = img.width() - 1;
  g.height = img.height() - 1;
  const size_t n = static_cast<size_t>(g.width) * g.height;
  g.g1.resize(n);
  g.g2.resize(n);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const int threads = NumThreads();
#pragma omp parallel for num_threads(threads) schedule(static)
  for (int y = 0; y < g.height; ++y) {
    const float* r0 = img.row(y);
    const float* r1 = img.row(y + 1);
    double* g1 = g.g1.data() + static_cast<size_t>(y) * g.width;
    double* g2 = g.g2.data() + static_cast<size_t>(y) * g.width;
    for (int x = 0; x < g.width; ++x) {
      g1[x] = (static_cast<double>(r0[x + 1]) - r1[x]) * inv_sqrt2;
      g2[x] = (static_cast<double>(r1[x + 1]) - r0[x]) * inv_sqrt2;
    }
  }
  return g;
}

std::vector<double> HalfSampleGaussian(double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  const int half = static_cast<int>(std::ceil(3.0 * rho));
  std::vector<double> taps(2 * half);
  double sum = 0.0;
  for (int t = 0; t < 2 * half; ++t) {
    const double d = t - half + 0.5;
    taps[t] = std::exp(-d * d / (2.0 * rho * rho));
    sum += taps[t];
  }
  for (double& v : taps) v /= sum;
  return taps;
}

TensorField SmoothTensor(const GradientField& grad, double rho) {
  const std::vector<double> taps = HalfSampleGaussian(rho);
  const int half = static_cast<int>(taps.size() / 2);
  const int gw = grad.width;
  const int gh = grad.height;
  const int out_w = gw + 1;
  const int out_h = gh + 1;
  const int len = static_cast<int>(taps.size());

  // Cell x + t - half feeds output x through tap t.
  std::vector<int> col(static_cast<size_t>(out_w) * len);
  for (int x = 0; x < out_w; ++x) {
    for (int t = 0; t < len; ++t) col[x * len + t] = ReflectIndex(x + t - half, gw);
  }
  std::vector<int> row(static_cast<size_t>(out_h) * len);
  for (int y = 0; y < out_h; ++y) {
    for (int t = 0; t < len; ++t) row[y * len + t] = ReflectIndex(y + t - half, gh);
  }

  const size_t mid_n = static_cast<size_t>(out_w) * gh;
  std::vector<double> ha(mid_n), hb(mid_n), hc(mid_n);
  const int threads = NumThreads();
#pragma omp parallel num_threads(threads)
  {
    std::vector<double> pa(gw), pb(gw), pc(gw);
#pragma omp for schedule(static)
    for (int y = 0; y < gh; ++y) {
      const double* g1 = grad.g1.data() + static_cast<size_t>(y) * gw;
      const double* g2 = grad.g2.data() + static_cast<size_t>(y) * gw;
      for (int x = 0; x < gw; ++x) {
        pa[x] = g1[x] * g1[x];
        pb[x] = g1[x] * g2[x];
        pc[x] = g2[x] * g2[x];
      }
      const size_t base = static_cast<size_t>(y) * out_w;
      for (int x = 0; x < out_w; ++x) {
        const int* idx = &col[static_cast<size_t>(x) * len];
        double sa = 0.0, sb = 0.0, sc = 0.0;
        for (int t = 0; t < len; ++t) {
          sa += taps[t] * pa[idx[t]];
          sb += taps[t] * pb[idx[t]];
          sc += taps[t] * pc[idx[t]];
        }
        ha[base + x] = sa;
        hb[base + x] = sb;
        hc[base + x] = sc;
      }
    }
  }

  TensorField out;
  out.width = out_w;
  out.height = out_h;
  const size_t n = static_cast<size_t>(out_w) * out_h;
  out.a.resize(n);
  out.b.resize(n);
  out.c.resize(n);
#pragma omp parallel for num_threads(threads) schedule(static)
  for (int y = 0; y < out_h; ++y) {
    const int* idx = &row[static_cast<size_t>(y) * len];
    const size_t base = static_cast<size_t>(y) * out_w;
    for (int x = 0; x < out_w; ++x) {
      double sa = 0.0, sb = 0.0, sc = 0.0;
      for (int t = 0; t < len; ++t) {
        const size_t src = static_cast<size_t>(idx[t]) * out_w + x;
        sa += taps[t] * ha[src];
        sb += taps[t] * hb[src];
        sc += taps[t] * hc[src];
      }
      out.a[base + x] = sa;
      out.b[base + x] = sb;
      out.c[base + x] = sc;
    }
  }
  return out;
}

TensorField StructureTensor(const ImageGray& img, double rho) {
  return SmoothTensor(DiagonalGradient(img), rho);
}

void ForEachTensorRow(const ImageGray& img, double rho,
                      const TensorRowVisitor& visit) {
  if (img.width() < 2 || img.height() < 2) {
    throw std::invalid_argument("structure tensor needs an image of at "
                                "least 2x2");
  }
  const std::vector<double> taps = HalfSampleGaussian(rho);
  const int len = static_cast<int>(taps.size());
  const int half = len / 2;
  const int gw = img.width() - 1;
  const int gh = img.height() - 1;
  const int out_w = img.width();
  const int out_h = img.height();
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  constexpr int kStrip = 32;
  const int strips = (out_h + kStrip - 1) / kStrip;
  const int threads = NumThreads();
#pragma omp parallel num_threads(threads)
  {
    // Horizontally smoothed products for virtual cell rows
    // y0 - half .. y1 + half - 2 of the strip.
    const int rows = kStrip + len - 1;
    std::vector<double> ha(static_cast<size_t>(rows) * out_w);
    std::vector<double> hb(ha.size()), hc(ha.size());
    // Reflect-padded product rows: entry j holds cell ReflectIndex(j - half).
    const int padded = out_w + len - 1;
    std::vector<double> pa(padded), pb(padded), pc(padded);
    std::vector<double> oa(out_w), ob(out_w), oc(out_w);
#pragma omp for schedule(static)
    for (int s = 0; s < strips; ++s) {
      const int y0 = s * kStrip;
      const int y1 = std::min(out_h, y0 + kStrip);
      const int count = y1 - y0 + len - 1;
      for (int v = 0; v < count; ++v) {
        const int r = ReflectIndex(y0 - half + v, gh);
        const float* r0 = img.row(r);
        const float* r1 = img.row(r + 1);
        for (int x = 0; x < gw; ++x) {
          const double g1 = (static_cast<double>(r0[x + 1]) - r1[x]) * inv_sqrt2;
          const double g2 = (static_cast<double>(r1[x + 1]) - r0[x]) * inv_sqrt2;
          pa[x + half] = g1 * g1;
          pb[x + half] = g1 * g2;
          pc[x + half] = g2 * g2;
        }
        for (int j = 0; j < padded; ++j) {
          if (j >= half && j < half + gw) continue;
          const int src = ReflectIndex(j - half, gw) + half;
          pa[j] = pa[src];
          pb[j] = pb[src];
          pc[j] = pc[src];
        }
        double* da = ha.data() + static_cast<size_t>(v) * out_w;
        double* db = hb.data() + static_cast<size_t>(v) * out_w;
        double* dc = hc.data() + static_cast<size_t>(v) * out_w;
        for (int x = 0; x < out_w; ++x) {
          da[x] = 0.0;
          db[x] = 0.0;
          dc[x] = 0.0;
        }
        // Tap-outer loops keep the per-pixel summation order of
        // SmoothTensor while vectorizing across x.
        for (int t = 0; t < len; ++t) {
          const double w = taps[t];
          const double* sa = pa.data() + t;
          const double* sb = pb.data() + t;
          const double* sc = pc.data() + t;
          for (int x = 0; x < out_w; ++x) {
            da[x] += w * sa[x];
            db[x] += w * sb[x];
            dc[x] += w * sc[x];
          }
        }
      }
      for (int y = y0; y < y1; ++y) {
        const size_t base = static_cast<size_t>(y - y0) * out_w;
        for (int x = 0; x < out_w; ++x) {
          oa[x] = 0.0;
          ob[x] = 0.0;
          oc[x] = 0.0;
        }
        for (int t = 0; t < len; ++t) {
          const double w = taps[t];
          const size_t src = base + static_cast<size_t>(t) * out_w;
          const double* sa = ha.data() + src;
          const double* sb = hb.data() + src;
          const double* sc = hc.data() + src;
          for (int x = 0; x < out_w; ++x) {
            oa[x] += w * sa[x];
            ob[x] += w * sb[x];
            oc[x] += w * sc[x];
          }
        }
        visit(y, oa.data(), ob.data(), oc.data());
      }
    }
  }
}

TensorEigen EigenDecompose(double a, double b, double c) {
  TensorEigen e;
  const double trace = a + c;
  const double delta = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
  e.lambda1 = 0.5 * (trace + delta);
  e.lambda2 = trace - e.lambda1;
  // Rounding can push delta past the trace for rank-1 tensors; clamp so
  // that lambda2 >= 0 and lambda1 + lambda2 == a + c both hold.
  if (e.lambda2 < 0.0) {
    e.lambda1 = trace;
    e.lambda2 = 0.0;
  }
  // Two analytically equivalent eigenvector forms; each one collapses to
  // zero on a different degenerate set, so keep the larger.
  const double p1 = 2.0 * b, p2 = c - a + delta;
  const double q1 = a - c + delta, q2 = 2.0 * b;
  if (p1 * p1 + p2 * p2 >= q1 * q1 + q2 * q2) {
    e.w1 = p1;
    e.w2 = p2;
  } else {
    e.w1 = q1;
    e.w2 = q2;
  }
  return e;
}

std::array<double, 2> DominantDirection(double a, double b, double c) {
  const TensorEigen e = EigenDecompose(a, b, c);
  const double x = e.w1 + e.w2;
  const double y = e.w2 - e.w1;
  const double norm = std::hypot(x, y);
  if (norm == 0.0) return {0.0, 0.0};
  return {x / norm, y / norm};
}

Features EigenFeatures(double a, double b, double c) {
  const TensorEigen e = EigenDecompose(a, b, c);
  Features f;
  const double x = e.w1 + e.w2;
  const double y = e.w2 - e.w1;
  if (x != 0.0 || y != 0.0) {
    double theta = std::atan2(y, x);
    if (theta > std::numbers::pi / 2) {
      theta -= std::numbers::pi;
    } else if (theta <= -std::numbers::pi / 2) {
      theta += std::numbers::pi;
    }
    f.orientation = theta;
  }
  const double s1 = std::sqrt(e.lambda1);
  const double s2 = std::sqrt(e.lambda2);
  f.strength = s1;
  f.coherence = s1 > 0.0 ? (s1 - s2) / (s1 + s2) : 0.0;
  return f;
}

}  // namespace blade
