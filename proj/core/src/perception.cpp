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

#include "foveascan/perception.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "foveascan/errors.hpp"

namespace foveascan {

std::vector<Detection> simulate_detections(const Scene& scene, const Frame& mount,
                                           const RgbCameraModel& rgb,
                                           const DetectorNoiseModel& noise, int frame_id,
                                           Rng& rng) {
    std::vector<Detection> out;
    for (const auto& sensor : scene.sensors) {
        const Vec3 to_sensor = sensor.position - mount.origin;
        const double range = norm(to_sensor);
        if (range > noise.max_range_m) continue;
        const Vec3 dir_world = normalized(to_sensor);
        if (dot(-dir_world, sensor.normal) < 0.1) continue;  // facing away / grazing

        // project the quad boundary (corners and edge midpoints) for the
        // true bbox; midpoints carry the extremal extents of the edges
        const Quad q = sensor.quad();
        double u0 = 0, u1 = 0, v0 = 0, v1 = 0;
        bool all_visible = true;
        for (int i = 0; i < 8; ++i) {
            const Vec3 p = i < 4 ? q.corner(i)
                                 : 0.5 * (q.corner(i - 4) + q.corner((i - 3) % 4));
            const Vec3 d = mount.dir_to_local(normalized(p - mount.origin));
            const auto px = rgb.project(d);
            if (!px) {
                all_visible = false;
                break;
            }
            if (i == 0) {
                u0 = u1 = px->u;
                v0 = v1 = px->v;
            } else {
                u0 = std::fmin(u0, px->u);
                u1 = std::fmax(u1, px->u);
                v0 = std::fmin(v0, px->v);
                v1 = std::fmax(v1, px->v);
            }
        }
        if (!all_visible) continue;
        if (u1 - u0 < noise.min_bbox_px || v1 - v0 < noise.min_bbox_px) continue;
        if (rng.uniform() < noise.miss_rate) continue;

        Detection d;
        d.frame_id = frame_id;
        d.bbox.u = (u0 + u1) / 2 + noise.centroid_jitter_px * rng.gaussian();
        d.bbox.v = (v0 + v1) / 2 + noise.centroid_jitter_px * rng.gaussian();
        d.bbox.w = (u1 - u0) * (1.0 + noise.size_jitter_frac * rng.gaussian());
        d.bbox.h = (v1 - v0) * (1.0 + noise.size_jitter_frac * rng.gaussian());
        d.bbox.w = std::fmax(d.bbox.w, 1.0);
        d.bbox.h = std::fmax(d.bbox.h, 1.0);
        d.confidence = std::clamp(0.95 - 0.1 * range / noise.max_range_m -
                                      0.03 * std::fabs(rng.gaussian()),
                                  0.0, 1.0);
        d.truth_link = sensor.id;
        out.push_back(d);
    }

    if (rng.uniform() < noise.false_positive_rate) {
        Detection fp;
        fp.frame_id = frame_id;
        fp.bbox.u = rng.uniform(0.0, rgb.width);
        fp.bbox.v = rng.uniform(0.0, rgb.height);
        fp.bbox.w = rng.uniform(10.0, 60.0);
        fp.bbox.h = rng.uniform(10.0, 60.0);
        fp.confidence = rng.uniform(0.25, 0.55);
        out.push_back(fp);
    }
    return out;
}

std::vector<Detection> load_detection_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open detection log " + path);
    std::vector<Detection> dets;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("frame_id", 0) == 0) continue;  // header
        std::istringstream is(line);
        Detection d;
        char comma;
        if (!(is >> d.frame_id >> comma >> d.bbox.u >> comma >> d.bbox.v >> comma >>
              d.bbox.w >> comma >> d.bbox.h >> comma >> d.confidence))
            throw IoError("malformed detection log line: " + line);
        dets.push_back(d);
    }
    return dets;
}

void save_detection_log(std::span<const Detection> dets, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write detection log " + path);
    out << "frame_id,u,v,w,h,confidence\n";
    char buf[160];
    for (const auto& d : dets) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", d.frame_id,
                      d.bbox.u, d.bbox.v, d.bbox.w, d.bbox.h, d.confidence);
        out << buf;
    }
}

TrackResult verify_track(std::span<const Detection> history, int k,
                         double centroid_var_thresh_px2) {
    TrackResult r;
    if (static_cast<int>(history.size()) < k) return r;

    const auto tail = history.subspan(history.size() - k);
    for (int i = 1; i < k; ++i)
        if (tail[i].frame_id != tail[i - 1].frame_id + 1) return r;  // gap resets

    double mu = 0, mv = 0;
    for (const auto& d : tail) {
        mu += d.bbox.u;
        mv += d.bbox.v;
    }
    mu /= k;
    mv /= k;
    double su = 0, sv = 0;
    for (const auto& d : tail) {
        su += (d.bbox.u - mu) * (d.bbox.u - mu);
        sv += (d.bbox.v - mv) * (d.bbox.v - mv);
    }
    // pooled: mean of the per-axis sample variances
    r.centroid_variance_px2 = (su + sv) / (2.0 * (k - 1));
    if (r.centroid_variance_px2 > centroid_var_thresh_px2) {
        r.status = TrackStatus::rejected;
        return r;
    }

    BBox mean;
    for (const auto& d : tail) {
        mean.u += d.bbox.u;
        mean.v += d.bbox.v;
        mean.w += d.bbox.w;
        mean.h += d.bbox.h;
    }
    mean.u /= k;
    mean.v /= k;
    mean.w /= k;
    mean.h /= k;
    r.status = TrackStatus::verified;
    r.target = VerifiedTarget{mean, tail.back().frame_id};
    return r;
}

std::string GateResult::reason() const {
    if (pass) return "ok";
    std::string s;
    const auto add = [&](const char* what) {
        if (!s.empty()) s += ",";
        s += what;
    };
    if (!distance_ok) add("distance");
    if (!lateral_ok) add("lateral");
    if (!angle_ok) add("angle");
    return s;
}

GateResult capture_gate(const CaptureGate& gate, const VerifiedTarget& target,
                        double est_angle_deg) {
    if (target.mean_bbox.h <= 0.0)
        throw InvalidRangeError("verified target bbox height must be positive");

    GateResult r;
    r.est_distance_mm = gate.rgb_focal_px * gate.sensor_size_mm / target.mean_bbox.h;
    r.est_angle_deg = est_angle_deg;
    r.lateral_along_mm =
        r.est_distance_mm * std::tan((target.mean_bbox.u - gate.rgb_cu) / gate.rgb_focal_px);
    r.lateral_vert_mm =
        r.est_distance_mm * std::tan((gate.rgb_cv - target.mean_bbox.v) / gate.rgb_focal_px);

    r.distance_ok =
        std::fabs(r.est_distance_mm - gate.distance_nominal_mm) <= gate.distance_tol_mm;
    r.lateral_ok = std::fabs(r.lateral_along_mm) <= gate.zone_width_mm / 2.0 &&
                   std::fabs(r.lateral_vert_mm) <= gate.zone_height_mm / 2.0;
    r.angle_ok = std::fabs(est_angle_deg) <= gate.max_angle_deg;
    r.pass = r.distance_ok && r.lateral_ok && r.angle_ok;
    return r;
}

CorrectedSpectrum reflectance_correct(const Spectrum& raw, const Spectrum& white_ref,
                                      const Spectrum& dark_ref) {
    if (!(raw.grid == white_ref.grid) || !(raw.grid == dark_ref.grid))
        throw GridMismatchError("raw, white and dark spectra must share a grid");

    const int n = raw.grid.bands;
    CorrectedSpectrum out{Spectrum(raw.grid), std::vector<char>(n, 1)};
    int good = 0;
    for (int b = 0; b < n; ++b)
        if (white_ref.values[b] - dark_ref.values[b] > 1e-6) ++good;
    if (good < static_cast<int>(0.95 * n))
        throw InvalidRangeError("white reference does not exceed dark on 95% of bands");

    for (int b = 0; b < n; ++b) {
        const double denom = white_ref.values[b] - dark_ref.values[b];
        if (denom <= 1e-6) {
            out.spectrum.values[b] = 0.0;
            out.valid[b] = 0;
        } else {
            out.spectrum.values[b] = (raw.values[b] - dark_ref.values[b]) / denom;
        }
    }
    return out;
}

namespace {

std::vector<double> moving_average(const std::vector<double>& v, int window,
                                   std::span<const char> valid) {
    const int n = static_cast<int>(v.size());
    const int half = window / 2;
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        int cnt = 0;
        for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j) {
            if (!valid.empty() && !valid[j]) continue;
            acc += v[j];
            ++cnt;
        }
        out[i] = cnt ? acc / cnt : 0.0;
    }
    return out;
}

std::vector<double> running_median(const std::vector<double>& v, int window) {
    const int n = static_cast<int>(v.size());
    const int half = window / 2;
    std::vector<double> out(n, 0.0);
    std::vector<double> buf;
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        buf.assign(v.begin() + lo, v.begin() + hi + 1);
        const auto mid = buf.begin() + buf.size() / 2;
        std::nth_element(buf.begin(), mid, buf.end());
        double m = *mid;
        if (buf.size() % 2 == 0) {
            const auto lo_mid = std::max_element(buf.begin(), mid);
            m = (m + *lo_mid) / 2.0;
        }
        out[i] = m;
    }
    return out;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + v.size() / 2;
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) {
        const auto lo_mid = std::max_element(v.begin(), mid);
        m = (m + *lo_mid) / 2.0;
    }
    return m;
}

}  // namespace

const PeakInfo* ResonanceReport::best_peak() const {
    const PeakInfo* best = nullptr;
    for (const auto& p : peaks)
        if (!best || p.snr > best->snr) best = &p;
    return best;
}

ResonanceReport detect_resonance(const Spectrum& spec, const PeakFindParams& params,
                                 std::span<const char> valid) {
    const int n = spec.grid.bands;
    ResonanceReport report;
    report.snr_threshold = params.snr_threshold;

    const std::vector<double> smooth =
        moving_average(spec.values, params.smooth_window_bands, valid);
    const std::vector<double> baseline = running_median(smooth, params.baseline_window_bands);
    std::vector<double> residual(n);
    for (int i = 0; i < n; ++i) residual[i] = smooth[i] - baseline[i];

    // robust noise scale from the residual outside the search range
    std::vector<double> outside;
    for (int i = 0; i < n; ++i) {
        const double nm = spec.grid.wavelength(i);
        if (nm >= params.search_min_nm && nm <= params.search_max_nm) continue;
        if (!valid.empty() && !valid[i]) continue;
        outside.push_back(residual[i]);
    }
    const double centre = median_of(outside);
    std::vector<double> dev;
    dev.reserve(outside.size());
    for (double r : outside) dev.push_back(std::fabs(r - centre));
    report.noise_scale = std::fmax(1.4826 * median_of(dev), 1e-12);

    // candidate peaks: local maxima of the residual inside the range
    const double step = spec.grid.spacing_nm();
    for (int i = 1; i + 1 < n; ++i) {
        const double nm = spec.grid.wavelength(i);
        if (nm < params.search_min_nm || nm > params.search_max_nm) continue;
        if (!valid.empty() && (!valid[i] || !valid[i - 1] || !valid[i + 1])) continue;
        if (!(residual[i] > residual[i - 1] && residual[i] >= residual[i + 1])) continue;
        if (residual[i] <= 0.0) continue;

        // sub-band centre by quadratic interpolation
        const double denom = residual[i - 1] - 2.0 * residual[i] + residual[i + 1];
        double delta = 0.0;
        if (std::fabs(denom) > 1e-300)
            delta = 0.5 * (residual[i - 1] - residual[i + 1]) / denom;
        delta = std::clamp(delta, -0.5, 0.5);
        const double centre_nm = nm + delta * step;

        // height from a fixed-width Gaussian template fit around the
        // candidate (linear least squares in the amplitude)
        const double fw = params.fit_fwhm_nm;
        double num = 0.0, den = 0.0;
        const int halfwin = std::max(2, static_cast<int>(std::ceil(1.25 * fw / step)));
        for (int j = std::max(0, i - halfwin); j <= std::min(n - 1, i + halfwin); ++j) {
            if (!valid.empty() && !valid[j]) continue;
            const double d = spec.grid.wavelength(j) - centre_nm;
            const double g = std::exp(-4.0 * 0.6931471805599453 * d * d / (fw * fw));
            num += residual[j] * g;
            den += g * g;
        }
        if (den <= 0.0) continue;
        const double height = num / den;
        if (height <= 0.0) continue;

        report.peaks.push_back({centre_nm, height, height / report.noise_scale});
    }

    // prune clutter far below the dominant peak
    if (!report.peaks.empty()) {
        double best = 0.0;
        for (const auto& p : report.peaks) best = std::fmax(best, p.height);
        std::erase_if(report.peaks,
                      [&](const PeakInfo& p) { return p.height < 0.2 * best; });
        std::sort(report.peaks.begin(), report.peaks.end(),
                  [](const PeakInfo& a, const PeakInfo& b) {
                      return a.wavelength_nm < b.wavelength_nm;
                  });
    }
    for (const auto& p : report.peaks)
        if (p.snr >= params.snr_threshold) report.accepted = true;
    return report;
}

ReferenceMatch match_resonance(const ResonanceReport& report,
                               std::span<const double> reference_peaks_nm, double tol_nm) {
    if (!report.accepted)
        throw UnacceptedReportError("cannot match an unaccepted resonance report");

    ReferenceMatch m{true, 0.0};
    if (reference_peaks_nm.empty()) return m;  // vacuously matched

    double offset_sum = 0.0;
    for (double ref : reference_peaks_nm) {
        double best_d = 0.0;
        bool found = false;
        for (const auto& p : report.peaks) {
            if (p.snr < report.snr_threshold) continue;
            const double d = p.wavelength_nm - ref;
            if (!found || std::fabs(d) < std::fabs(best_d)) {
                best_d = d;
                found = true;
            }
        }
        if (!found || std::fabs(best_d) > tol_nm) m.matched = false;
        if (found) offset_sum += best_d;
    }
    m.offset_nm = offset_sum / static_cast<double>(reference_peaks_nm.size());
    return m;
}

std::string format_resonance_report(const ResonanceReport& report) {
    std::ostringstream os;
    char buf[128];
    os << "resonance report\n";
    os << "accepted = " << (report.accepted ? 1 : 0) << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", report.noise_scale);
    os << "noise_scale = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", report.snr_threshold);
    os << "snr_threshold = " << buf << "\n";
    os << "peaks = " << report.peaks.size() << "\n";
    for (const auto& p : report.peaks) {
        std::snprintf(buf, sizeof buf, "peak = %.17g %.17g %.17g\n", p.wavelength_nm,
                      p.height, p.snr);
        os << buf;
    }
    if (report.reference_match) {
        os << "matched = " << (report.reference_match->matched ? 1 : 0) << "\n";
        std::snprintf(buf, sizeof buf, "%.17g", report.reference_match->offset_nm);
        os << "offset_nm = " << buf << "\n";
    }
    return os.str();
}

}  // namespace foveascan
