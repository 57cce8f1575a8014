// Copyright 2026 The Foveascan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "foveascan/calibration.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "foveascan/errors.hpp"

namespace foveascan {

namespace {

struct Similarity {
    double scale = 1.0;
    double cx = 0.0, cy = 0.0;

    std::pair<double, double> apply(double x, double y) const {
        return {scale * (x - cx), scale * (y - cy)};
    }
};

// Hartley normalization: centroid to origin, mean distance sqrt(2).
Similarity normalize_points(std::span<const Correspondence> corrs, bool pixel_side) {
    Similarity t;
    const std::size_t n = corrs.size();
    for (const auto& c : corrs) {
        t.cx += pixel_side ? c.u : c.tilt_x_deg;
        t.cy += pixel_side ? c.v : c.tilt_y_deg;
    }
    t.cx /= n;
    t.cy /= n;
    double mean_dist = 0.0;
    for (const auto& c : corrs) {
        const double dx = (pixel_side ? c.u : c.tilt_x_deg) - t.cx;
        const double dy = (pixel_side ? c.v : c.tilt_y_deg) - t.cy;
        mean_dist += std::hypot(dx, dy);
    }
    mean_dist /= n;
    if (mean_dist < 1e-12)
        throw DegenerateConfigurationError("correspondence points are coincident");
    t.scale = std::sqrt(2.0) / mean_dist;
    return t;
}

}  // namespace

Homography::Homography() : h_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Homography::Homography(const std::array<double, 9>& h, double residual_rms_deg)
    : h_(h), residual_rms_(residual_rms_deg) {
    if (std::fabs(h[8]) > 1e-12)
        for (int i = 0; i < 9; ++i) h_[i] = h[i] / h[8];
}

double Homography::determinant() const {
    return h_[0] * (h_[4] * h_[8] - h_[5] * h_[7]) -
           h_[1] * (h_[3] * h_[8] - h_[5] * h_[6]) +
           h_[2] * (h_[3] * h_[7] - h_[4] * h_[6]);
}

std::pair<double, double> Homography::apply(double u, double v) const {
    const double x = h_[0] * u + h_[1] * v + h_[2];
    const double y = h_[3] * u + h_[4] * v + h_[5];
    const double w = h_[6] * u + h_[7] * v + h_[8];
    if (std::fabs(w) < 1e-12)
        throw PointAtInfinityError("pixel maps to the line at infinity");
    return {x / w, y / w};
}

Homography Homography::inverse() const {
    const double det = determinant();
    if (std::fabs(det) < 1e-12)
        throw DegenerateConfigurationError("homography is singular");
    const auto& h = h_;
    std::array<double, 9> a{};
    a[0] = (h[4] * h[8] - h[5] * h[7]) / det;
    a[1] = (h[2] * h[7] - h[1] * h[8]) / det;
    a[2] = (h[1] * h[5] - h[2] * h[4]) / det;
    a[3] = (h[5] * h[6] - h[3] * h[8]) / det;
    a[4] = (h[0] * h[8] - h[2] * h[6]) / det;
    a[5] = (h[2] * h[3] - h[0] * h[5]) / det;
    a[6] = (h[3] * h[7] - h[4] * h[6]) / det;
    a[7] = (h[1] * h[6] - h[0] * h[7]) / det;
    a[8] = (h[0] * h[4] - h[1] * h[3]) / det;
    return Homography(a);
}

Homography estimate_homography(std::span<const Correspondence> corrs) {
    const std::size_t n = corrs.size();
    if (n < 4) {
        std::ostringstream os;
        os << "homography needs at least 4 correspondences, got " << n;
        throw InsufficientPointsError(os.str());
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(corrs[i].u - corrs[j].u) < 1e-9 &&
                std::fabs(corrs[i].v - corrs[j].v) < 1e-9)
                throw DegenerateConfigurationError("duplicate pixel correspondence");

    const Similarity tp = normalize_points(corrs, true);
    const Similarity tt = normalize_points(corrs, false);

    Eigen::MatrixXd a(2 * n, 9);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [u, v] = tp.apply(corrs[i].u, corrs[i].v);
        const auto [x, y] = tt.apply(corrs[i].tilt_x_deg, corrs[i].tilt_y_deg);
        a.row(2 * i) << u, v, 1, 0, 0, 0, -x * u, -x * v, -x;
        a.row(2 * i + 1) << 0, 0, 0, u, v, 1, -y * u, -y * v, -y;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // A second vanishing singular value means the null space is not a
    // single homography: collinear or otherwise degenerate geometry.
    const int second_last = static_cast<int>(sv.size()) - 2;
    if (second_last >= 0 && sv(second_last) < 1e-9 * sv(0))
        throw DegenerateConfigurationError(
            "degenerate correspondence configuration (collinear points?)");

    const Eigen::VectorXd h = svd.matrixV().col(8);

    // denormalize: H = Ttilt^-1 * Hn * Tpixel
    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    Eigen::Matrix3d tpix;
    tpix << tp.scale, 0, -tp.scale * tp.cx, 0, tp.scale, -tp.scale * tp.cy, 0, 0, 1;
    Eigen::Matrix3d ttilt_inv;
    ttilt_inv << 1.0 / tt.scale, 0, tt.cx, 0, 1.0 / tt.scale, tt.cy, 0, 0, 1;
    const Eigen::Matrix3d hw = ttilt_inv * hn * tpix;

    std::array<double, 9> out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[r * 3 + c] = hw(r, c);

    Homography result(out);
    if (std::fabs(result.determinant()) < 1e-12)
        throw DegenerateConfigurationError("estimated homography is singular");

    double sq = 0.0;
    for (const auto& c : corrs) {
        const auto [x, y] = result.apply(c.u, c.v);
        sq += (x - c.tilt_x_deg) * (x - c.tilt_x_deg) + (y - c.tilt_y_deg) * (y - c.tilt_y_deg);
    }
    return Homography(result.coefficients(), std::sqrt(sq / n));
}

TiltPoint pixel_to_tilt(const Homography& H, double u, double v, double theta_max_deg) {
    const auto [tx, ty] = H.apply(u, v);
    TiltPoint p{tx, ty, true};
    if (std::fabs(tx) > theta_max_deg || std::fabs(ty) > theta_max_deg)
        p.in_mirror_range = false;
    return p;
}

PixelPoint tilt_to_pixel(const Homography& H, double tilt_x_deg, double tilt_y_deg) {
    const auto [u, v] = H.inverse().apply(tilt_x_deg, tilt_y_deg);
    return {u, v};
}

std::vector<Correspondence> build_calibration_mosaic(const Scene& scene,
                                                     const RgbCameraModel& rgb,
                                                     const Frame& mount,
                                                     double theta_max_deg) {
    std::vector<Correspondence> corrs;
    for (const auto& f : scene.fiducials) {
        const Vec3 dir = mount.dir_to_local(normalized(f.quad.center - mount.origin));
        const auto px = rgb.project(dir);
        if (!px) continue;
        try {
            const auto [tx, ty] = mirror_tilt_for_target(dir, theta_max_deg);
            corrs.push_back({px->u, px->v, tx, ty});
        } catch (const UnreachableTargetError&) {
            continue;  // fiducial outside the mirror sweep
        }
    }
    if (corrs.size() < 4) {
        std::ostringstream os;
        os << "calibration needs at least 4 visible fiducials, found " << corrs.size();
        throw InsufficientFiducialsError(os.str());
    }
    return corrs;
}

ScanPlan plan_sweep(const Homography& H, const BBox& bbox, double margin_frac,
                    double step_deg, double theta_max_deg, int mirror_memory) {
    if (step_deg <= 0.0) throw InvalidRangeError("sweep step must be positive");

    const double us[4] = {bbox.u - bbox.w / 2, bbox.u + bbox.w / 2, bbox.u + bbox.w / 2,
                          bbox.u - bbox.w / 2};
    const double vs[4] = {bbox.v - bbox.h / 2, bbox.v - bbox.h / 2, bbox.v + bbox.h / 2,
                          bbox.v + bbox.h / 2};

    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    std::vector<int> offending;
    for (int i = 0; i < 4; ++i) {
        const TiltPoint t = pixel_to_tilt(H, us[i], vs[i], theta_max_deg);
        if (!t.in_mirror_range) offending.push_back(i);
        if (i == 0) {
            x0 = x1 = t.tilt_x_deg;
            y0 = y1 = t.tilt_y_deg;
        } else {
            x0 = std::fmin(x0, t.tilt_x_deg);
            x1 = std::fmax(x1, t.tilt_x_deg);
            y0 = std::fmin(y0, t.tilt_y_deg);
            y1 = std::fmax(y1, t.tilt_y_deg);
        }
    }
    if (!offending.empty()) {
        std::ostringstream os;
        os << "bbox corner(s)";
        for (int i : offending) os << " " << i;
        os << " map outside the mirror tilt range";
        throw OutOfRangeError(os.str(), offending);
    }

    // expand each half-extent by margin_frac, then clamp to the range
    const double xc = (x0 + x1) / 2, yc = (y0 + y1) / 2;
    const double hx = (x1 - x0) / 2 * (1.0 + margin_frac);
    const double hy = (y1 - y0) / 2 * (1.0 + margin_frac);
    x0 = std::fmax(xc - hx, -theta_max_deg);
    x1 = std::fmin(xc + hx, theta_max_deg);
    y0 = std::fmax(yc - hy, -theta_max_deg);
    y1 = std::fmin(yc + hy, theta_max_deg);

    ScanPlan plan;
    plan.tilt_x_start = x0;
    plan.tilt_x_end = x1;
    plan.tilt_y_start = plan.tilt_y_end = (y0 + y1) / 2;
    const double extent = x1 - x0;
    plan.lines = std::max(1, static_cast<int>(std::ceil(extent / step_deg)));
    plan.lines = std::min(plan.lines, mirror_memory);
    if (plan.lines == 1) plan.tilt_x_end = plan.tilt_x_start = xc;
    return plan;
}

void save_calibration(const CalibrationData& cal, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write calibration file " + path);
    char buf[64];
    out << "foveascan calibration v1\n";
    out << "H =";
    for (double v : cal.H.coefficients()) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        out << buf;
    }
    out << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cal.H.residual_rms_deg());
    out << "residual_rms_deg = " << buf << "\n";
    out << "rgb_focal_px = " << cal.rgb.focal_px << "\n";
    out << "rgb_width = " << cal.rgb.width << "\n";
    out << "rgb_height = " << cal.rgb.height << "\n";
    out << "correspondences = " << cal.correspondences.size() << "\n";
    for (const auto& c : cal.correspondences) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g", c.u, c.v, c.tilt_x_deg,
                      c.tilt_y_deg);
        out << "corr = " << buf << "\n";
    }
    if (!out) throw IoError("failed writing calibration file " + path);
}

CalibrationData load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open calibration file " + path);
    std::string line;
    if (!std::getline(in, line) || line != "foveascan calibration v1")
        throw ConfigError("not a foveascan calibration file: " + path);

    CalibrationData cal;
    std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1};
    double residual = 0.0;
    bool have_h = false;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        std::istringstream val(line.substr(eq + 1));
        if (key.starts_with("H ")) {
            for (auto& v : h)
                if (!(val >> v)) throw ConfigError("malformed H row in " + path);
            have_h = true;
        } else if (key.starts_with("residual_rms_deg")) {
            val >> residual;
        } else if (key.starts_with("rgb_focal_px")) {
            val >> cal.rgb.focal_px;
        } else if (key.starts_with("rgb_width")) {
            val >> cal.rgb.width;
        } else if (key.starts_with("rgb_height")) {
            val >> cal.rgb.height;
        } else if (key.starts_with("corr ")) {
            Correspondence c;
            if (!(val >> c.u >> c.v >> c.tilt_x_deg >> c.tilt_y_deg))
                throw ConfigError("malformed correspondence in " + path);
            cal.correspondences.push_back(c);
        }
    }
    if (!have_h) throw ConfigError("calibration file lacks H: " + path);
    cal.H = Homography(h, residual);
    return cal;
}

}  // namespace foveascan
