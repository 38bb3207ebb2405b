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

#include "blade/reference_ops.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "blade/parallel.h"
#include "blade/structure_tensor.h"

namespace blade {

void FlowParams::Validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (!(half_length >= 0.0)) {
    throw std::invalid_argument("half_length must be >= 0");
  }
  if (!(sigma_r > 0.0) || !(sigma_s > 0.0)) {
    throw std::invalid_argument("bilateral sigmas must be positive");
  }
}

ImageGray Bilateral(const ImageGray& img, double sigma_r, double sigma_s) {
  if (!(sigma_r > 0.0) || !(sigma_s > 0.0)) {
    throw std::invalid_argument("bilateral sigmas must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma_s));
  const int side = 2 * radius + 1;
  std::vector<double> spatial(static_cast<size_t>(side) * side);
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      spatial[(dy + radius) * side + dx + radius] =
          std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_s * sigma_s));
    }
  }
  const int w = img.width();
  const int h = img.height();
  const int pw = w + 2 * radius;
  std::vector<float> pad(static_cast<size_t>(pw) * (h + 2 * radius));
  for (int y = 0; y < h + 2 * radius; ++y) {
    for (int x = 0; x < pw; ++x) {
      pad[static_cast<size_t>(y) * pw + x] = img.reflected(x - radius, y - radius);
    }
  }
  const double range_scale = -1.0 / (2.0 * sigma_r * sigma_r);
  ImageGray out(w, h);
  const int threads = NumThreads();
#pragma omp parallel for num_threads(threads) schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double center = img.at(x, y);
      double num = 0.0, den = 0.0;
      for (int dy = 0; dy < side; ++dy) {
        const float* row = pad.data() + static_cast<size_t>(y + dy) * pw + x;
        const double* sw = spatial.data() + dy * side;
        for (int dx = 0; dx < side; ++dx) {
          const double v = row[dx];
          const double d = v - center;
          const double wgt = sw[dx] * std::exp(d * d * range_scale);
          num += wgt * v;
          den += wgt;
        }
      }
      out.at(x, y) = static_cast<float>(num / den);
    }
  }
  return out;
}

ImageGray TvFlow(const ImageGray& img, const FlowParams& params) {
  params.Validate();
  const int w = img.width();
  const int h = img.height();
  const double eps2 = params.epsilon * params.epsilon;
  std::vector<double> u(img.samples().begin(), img.samples().end());
  std::vector<double> next(u.size());
  std::vector<int> xm(w), xp(w), ym(h), yp(h);
  for (int x = 0; x < w; ++x) {
    xm[x] = ReflectIndex(x - 1, w);
    xp[x] = ReflectIndex(x + 1, w);
  }
  for (int y = 0; y < h; ++y) {
    ym[y] = ReflectIndex(y - 1, h);
    yp[y] = ReflectIndex(y + 1, h);
  }
  const int threads = NumThreads();
  for (int step = 0; step < params.steps; ++step) {
#pragma omp parallel for num_threads(threads) schedule(static)
    for (int y = 0; y < h; ++y) {
      const double* r0 = u.data() + static_cast<size_t>(ym[y]) * w;
      const double* r1 = u.data() + static_cast<size_t>(y) * w;
      const double* r2 = u.data() + static_cast<size_t>(yp[y]) * w;
      double* dst = next.data() + static_cast<size_t>(y) * w;
      for (int x = 0; x < w; ++x) {
        const double c = r1[x];
        const double ux = 0.5 * (r1[xp[x]] - r1[xm[x]]);
        const double uy = 0.5 * (r2[x] - r0[x]);
        const double uxx = r1[xp[x]] - 2.0 * c + r1[xm[x]];
        const double uyy = r2[x] - 2.0 * c + r0[x];
        const double uxy =
            0.25 * (r2[xp[x]] - r0[xp[x]] - r2[xm[x]] + r0[xm[x]]);
        // |grad u|_eps * div(grad u / |grad u|_eps)
        const double speed =
            (uxx * (uy * uy + eps2) - 2.0 * ux * uy * uxy +
             uyy * (ux * ux + eps2)) /
            (ux * ux + uy * uy + eps2);
        dst[x] = c + params.dt * speed;
      }
    }
    u.swap(next);
  }
  std::vector<float> out(u.begin(), u.end());
  return ImageGray(w, h, std::move(out));
}

namespace {

// Bilinear read of a row-major double field; p is clamped to the domain.
double Bilinear(const double* f, int w, int h, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = std::min(static_cast<int>(x), w - 1);
  const int y0 = std::min(static_cast<int>(y), h - 1);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = f[y0 * static_cast<size_t>(w) + x0] * (1 - fx) +
                     f[y0 * static_cast<size_t>(w) + x1] * fx;
  const double bot = f[y1 * static_cast<size_t>(w) + x0] * (1 - fx) +
                     f[y1 * static_cast<size_t>(w) + x1] * fx;
  return top * (1 - fy) + bot * fy;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

}  // namespace

ImageGray EdgeTangentFlow(const ImageGray& img, const FlowParams& params) {
  params.Validate();
  const int w = img.width();
  const int h = img.height();
  if (params.half_length == 0.0 || w < 2 || h < 2) return img;
  const TensorField t = StructureTensor(img, params.rho);
  const std::vector<double> u(img.samples().begin(), img.samples().end());

  // Unit edge tangent at a continuous position, or zero where isotropic.
  auto tangent = [&](double x, double y) {
    const double a = Bilinear(t.a.data(), w, h, x, y);
    const double b = Bilinear(t.b.data(), w, h, x, y);
    const double c = Bilinear(t.c.data(), w, h, x, y);
    const auto g = DominantDirection(a, b, c);
    return Vec2{-g[1], g[0]};
  };
  // Flip v onto the half-plane of `ref` so streamlines do not reverse.
  auto align = [](Vec2 v, Vec2 ref) {
    if (v.x * ref.x + v.y * ref.y < 0.0) return Vec2{-v.x, -v.y};
    return v;
  };

  constexpr double kStep = 0.5;
  const double sigma = params.half_length / 2.0;
  const int max_steps = static_cast<int>(std::floor(params.half_length / kStep));
  std::vector<double> weights(max_steps + 1);
  for (int s = 0; s <= max_steps; ++s) {
    const double arc = s * kStep;
    weights[s] = std::exp(-arc * arc / (2.0 * sigma * sigma));
  }

  ImageGray out(w, h);
  const int threads = NumThreads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 4)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = u[static_cast<size_t>(y) * w + x];
      double wsum = 1.0;
      const Vec2 t0 = tangent(x, y);
      if (t0.x == 0.0 && t0.y == 0.0) {
        out.at(x, y) = static_cast<float>(sum);
        continue;
      }
      for (int sign = -1; sign <= 1; sign += 2) {
        Vec2 p{static_cast<double>(x), static_cast<double>(y)};
        Vec2 prev{sign * t0.x, sign * t0.y};
        for (int s = 1; s <= max_steps; ++s) {
          Vec2 k1 = align(tangent(p.x, p.y), prev);
          if (k1.x == 0.0 && k1.y == 0.0) break;
          const Vec2 mid{p.x + 0.5 * kStep * k1.x, p.y + 0.5 * kStep * k1.y};
          Vec2 k2 = align(tangent(mid.x, mid.y), k1);
          if (k2.x == 0.0 && k2.y == 0.0) k2 = k1;
          p = {p.x + kStep * k2.x, p.y + kStep * k2.y};
          if (p.x < 0.0 || p.y < 0.0 || p.x > w - 1 || p.y > h - 1) break;
          prev = k2;
          sum += weights[s] * Bilinear(u.data(), w, h, p.x, p.y);
          wsum += weights[s];
        }
      }
      out.at(x, y) = static_cast<float>(sum / wsum);
    }
  }
  return out;
}

}  // namespace blade
