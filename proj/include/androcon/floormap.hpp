// Indoor floor-map reconstruction from activity-landmarked trajectories:
// ALC/NALC labeling, rigid trajectory alignment on common landmarks,
// Levenberg-Marquardt graph optimization, and GDM/SDM map scoring.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <json.hpp>

#include "androcon/common.hpp"
#include "androcon/log_ingest.hpp"

namespace androcon {

// ---------------------------------------------------------------------------
// Trajectory types
// ---------------------------------------------------------------------------

enum class LandmarkClass : int { Lift = 0, Stairs = 1, Room = 2, Corner = 3 };

inline const char* landmark_class_name(LandmarkClass c) {
    switch (c) {
        case LandmarkClass::Lift: return "lift";
        case LandmarkClass::Stairs: return "stairs";
        case LandmarkClass::Room: return "room";
        case LandmarkClass::Corner: return "corner";
    }
    return "?";
}

inline std::optional<LandmarkClass> landmark_class_from_activity(const std::string& label) {
    if (label == "lift") return LandmarkClass::Lift;
    if (label == "stairs") return LandmarkClass::Stairs;
    if (label == "room-dwell") return LandmarkClass::Room;
    if (label == "corner-turn") return LandmarkClass::Corner;
    return std::nullopt;
}

inline std::string activity_from_landmark_class(LandmarkClass c) {
    switch (c) {
        case LandmarkClass::Lift: return "lift";
        case LandmarkClass::Stairs: return "stairs";
        case LandmarkClass::Room: return "room-dwell";
        case LandmarkClass::Corner: return "corner-turn";
    }
    return "";
}

enum class PointKind { Alc, Nalc };

struct TrajPoint {
    Eigen::Vector2d xy = Eigen::Vector2d::Zero();
    PointKind kind = PointKind::Nalc;
    std::optional<LandmarkClass> landmark_class;  // set iff kind == Alc
    double t = 0.0;
};

struct Trajectory {
    std::vector<TrajPoint> points;
    std::string source_id;

    void validate() const {
        if (points.size() < 2)
            throw Error(ErrorCode::InvalidSpec, "trajectory needs >= 2 points");
        for (size_t i = 1; i < points.size(); ++i)
            if (!(points[i].t > points[i - 1].t))
                throw Error(ErrorCode::InvalidSpec, "timestamps must strictly increase");
        for (const auto& p : points) {
            if (p.kind == PointKind::Alc && !p.landmark_class)
                throw Error(ErrorCode::InvalidSpec, "ALC point without a landmark class");
            if (p.kind == PointKind::Nalc && p.landmark_class)
                throw Error(ErrorCode::InvalidSpec, "NALC point with a landmark class");
        }
    }
};

struct TimedPosition {
    double t = 0.0;
    Eigen::Vector2d xy = Eigen::Vector2d::Zero();
};

struct TimedActivity {
    double t = 0.0;
    std::string label;
};

struct LandmarkingOptions {
    double max_gap_s = 2.0;       // nearest-time join tolerance
    double blackout_min_s = 5.0;  // GPS loss duration that implies a lift
};

/// Tag positions with ALC/NALC using time-aligned activity labels. A
/// position gap of at least blackout_min_s inserts an ALC(Lift) point at the
/// blackout centroid (elevators block GPS entirely).
inline Trajectory landmark_trajectory(std::span<const TimedPosition> positions,
                                      std::span<const TimedActivity> activities,
                                      const std::string& source_id = "traj",
                                      const LandmarkingOptions& opts = {}) {
    if (positions.size() < 2)
        throw Error(ErrorCode::EmptyInput, "need at least 2 positions");

    auto nearest_activity = [&](double t) -> const TimedActivity* {
        if (activities.empty()) return nullptr;
        const TimedActivity* best = &activities[0];
        double best_dt = std::abs(activities[0].t - t);
        for (const auto& a : activities) {
            double dt = std::abs(a.t - t);
            if (dt < best_dt) {
                best = &a;
                best_dt = dt;
            }
        }
        if (best_dt > opts.max_gap_s)
            throw Error(ErrorCode::AlignmentGapTooLarge,
                        "no activity label within " + format_g9(opts.max_gap_s) +
                            " s of t=" + format_g9(t));
        return best;
    };

    Trajectory traj;
    traj.source_id = source_id;
    for (size_t i = 0; i < positions.size(); ++i) {
        if (i > 0) {
            double gap = positions[i].t - positions[i - 1].t;
            if (!(gap > 0))
                throw Error(ErrorCode::InvalidSpec, "positions must strictly increase in time");
            if (gap >= opts.blackout_min_s) {
                TrajPoint lift;
                lift.xy = 0.5 * (positions[i - 1].xy + positions[i].xy);
                lift.t = 0.5 * (positions[i - 1].t + positions[i].t);
                lift.kind = PointKind::Alc;
                lift.landmark_class = LandmarkClass::Lift;
                traj.points.push_back(lift);
            }
        }
        TrajPoint p;
        p.xy = positions[i].xy;
        p.t = positions[i].t;
        const TimedActivity* act = nearest_activity(positions[i].t);
        if (act) {
            if (auto cls = landmark_class_from_activity(act->label)) {
                p.kind = PointKind::Alc;
                p.landmark_class = cls;
            }
        }
        traj.points.push_back(p);
    }
    traj.validate();
    return traj;
}

// ---------------------------------------------------------------------------
// Rigid geometry
// ---------------------------------------------------------------------------

/// Planar rigid transform (orthogonal linear part; det -1 marks a reflection
/// chosen during disambiguation). No scaling: positions are metric.
struct RigidTransform {
    Eigen::Matrix2d rot = Eigen::Matrix2d::Identity();
    Eigen::Vector2d trans = Eigen::Vector2d::Zero();

    Eigen::Vector2d apply(const Eigen::Vector2d& p) const { return rot * p + trans; }
    bool reflected() const { return rot.determinant() < 0.0; }

    static RigidTransform rotation(double angle_rad, const Eigen::Vector2d& t) {
        RigidTransform out;
        out.rot = Eigen::Rotation2Dd(angle_rad).toRotationMatrix();
        out.trans = t;
        return out;
    }
};

namespace detail {

/// Least-squares rigid fit mapping src onto dst (Kabsch). force_reflection
/// constrains det to -1 instead of +1.
inline RigidTransform fit_rigid(const std::vector<Eigen::Vector2d>& src,
                                const std::vector<Eigen::Vector2d>& dst,
                                bool force_reflection = false) {
    if (src.size() != dst.size() || src.size() < 2)
        throw Error(ErrorCode::InsufficientCommonLandmarks,
                    "rigid fit needs >= 2 point pairs");
    Eigen::Vector2d cs = Eigen::Vector2d::Zero(), cd = Eigen::Vector2d::Zero();
    for (size_t i = 0; i < src.size(); ++i) {
        cs += src[i];
        cd += dst[i];
    }
    cs /= static_cast<double>(src.size());
    cd /= static_cast<double>(src.size());

    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    for (size_t i = 0; i < src.size(); ++i)
        h += (src[i] - cs) * (dst[i] - cd).transpose();

    Eigen::JacobiSVD<Eigen::Matrix2d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double target_det = force_reflection ? -1.0 : 1.0;
    Eigen::Matrix2d d = Eigen::Matrix2d::Identity();
    double vut_det = (svd.matrixV() * svd.matrixU().transpose()).determinant();
    if (vut_det * target_det < 0) d(1, 1) = -1.0;

    RigidTransform out;
    out.rot = svd.matrixV() * d * svd.matrixU().transpose();
    out.trans = cd - out.rot * cs;
    return out;
}

inline double rigid_fit_rms(const RigidTransform& tf, const std::vector<Eigen::Vector2d>& src,
                            const std::vector<Eigen::Vector2d>& dst) {
    double acc = 0.0;
    for (size_t i = 0; i < src.size(); ++i)
        acc += (tf.apply(src[i]) - dst[i]).squaredNorm();
    return std::sqrt(acc / static_cast<double>(src.size()));
}

/// Hungarian algorithm (n rows <= m cols); returns row -> col assignment.
inline std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(m) + 1, 0.0);
    std::vector<int> p(static_cast<size_t>(m) + 1, 0), way(static_cast<size_t>(m) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<size_t>(m) + 1, inf);
        std::vector<char> used(static_cast<size_t>(m) + 1, 0);
        do {
            used[static_cast<size_t>(j0)] = 1;
            int i0 = p[static_cast<size_t>(j0)], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] -
                             v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<size_t>(j0)] != 0);
        do {
            int j1 = way[static_cast<size_t>(j0)];
            p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(static_cast<size_t>(n), -1);
    for (int j = 1; j <= m; ++j)
        if (p[static_cast<size_t>(j)] > 0) row_to_col[static_cast<size_t>(p[static_cast<size_t>(j)]) - 1] = j - 1;
    return row_to_col;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trajectory alignment
// ---------------------------------------------------------------------------

struct AlignOptions {
    int min_common = 2;          // matched ALC pairs a trajectory must share
    double merge_radius = 2.0;   // same-class landmarks within this merge
    bool segment_correction = false;  // per-segment rigid warp between shared ALCs
    size_t max_hypotheses = 200000;   // correspondence enumeration budget
};

/// One landmark observation inside a trajectory: a cluster of ALC points of
/// one class, summarized by its centroid.
struct AlcCluster {
    LandmarkClass cls = LandmarkClass::Lift;
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    std::vector<int> point_indices;
};

inline std::vector<AlcCluster> cluster_trajectory_alcs(const Trajectory& traj,
                                                       double merge_radius) {
    // A landmark visit is a temporal run of same-class ALC points (a dwell).
    std::vector<AlcCluster> runs;
    for (size_t i = 0; i < traj.points.size(); ++i) {
        const TrajPoint& p = traj.points[i];
        if (p.kind != PointKind::Alc) continue;
        bool continues = !runs.empty() && runs.back().cls == *p.landmark_class &&
                         runs.back().point_indices.back() == static_cast<int>(i) - 1;
        if (continues)
            runs.back().point_indices.push_back(static_cast<int>(i));
        else
            runs.push_back({*p.landmark_class, p.xy, {static_cast<int>(i)}});
    }
    for (auto& r : runs) {
        Eigen::Vector2d sum = Eigen::Vector2d::Zero();
        for (int idx : r.point_indices) sum += traj.points[static_cast<size_t>(idx)].xy;
        r.centroid = sum / static_cast<double>(r.point_indices.size());
    }

    // Revisits of the same spot merge when their centroids are close.
    std::vector<AlcCluster> clusters;
    for (auto& r : runs) {
        AlcCluster* home = nullptr;
        for (auto& c : clusters)
            if (c.cls == r.cls && (c.centroid - r.centroid).norm() <= merge_radius) {
                home = &c;
                break;
            }
        if (!home) {
            clusters.push_back(std::move(r));
            continue;
        }
        for (int idx : r.point_indices) home->point_indices.push_back(idx);
        Eigen::Vector2d sum = Eigen::Vector2d::Zero();
        for (int idx : home->point_indices) sum += traj.points[static_cast<size_t>(idx)].xy;
        home->centroid = sum / static_cast<double>(home->point_indices.size());
    }
    return clusters;
}

struct MapLandmark {
    LandmarkClass cls = LandmarkClass::Lift;
    Eigen::Vector2d pos = Eigen::Vector2d::Zero();
    int obs_count = 0;
};

struct AlignmentResult {
    std::vector<Trajectory> aligned;
    std::vector<RigidTransform> transforms;
    std::vector<MapLandmark> landmarks;
    // landmark id per (trajectory, cluster): which map landmark each ALC
    // cluster was merged into.
    std::vector<std::vector<std::pair<AlcCluster, int>>> cluster_assignments;
};

namespace detail {

/// Signed curvature accumulated along a trajectory slice: sum of cross
/// products of consecutive segment directions. Proper rotations preserve the
/// sign, reflections flip it.
inline double path_curvature(const Trajectory& traj, int from_idx, int to_idx) {
    if (from_idx > to_idx) std::swap(from_idx, to_idx);
    double acc = 0.0;
    for (int i = from_idx; i + 2 <= to_idx; ++i) {
        Eigen::Vector2d a = traj.points[static_cast<size_t>(i + 1)].xy -
                            traj.points[static_cast<size_t>(i)].xy;
        Eigen::Vector2d b = traj.points[static_cast<size_t>(i + 2)].xy -
                            traj.points[static_cast<size_t>(i + 1)].xy;
        acc += a.x() * b.y() - a.y() * b.x();
    }
    return acc;
}

/// Enumerate injective correspondences between same-class cluster and
/// landmark index lists; the smaller side is fully matched.
inline std::vector<std::vector<std::pair<int, int>>> class_match_options(
    const std::vector<int>& cluster_ids, const std::vector<int>& landmark_ids) {
    std::vector<std::vector<std::pair<int, int>>> options;
    const bool clusters_smaller = cluster_ids.size() <= landmark_ids.size();
    const std::vector<int>& small = clusters_smaller ? cluster_ids : landmark_ids;
    const std::vector<int>& large = clusters_smaller ? landmark_ids : cluster_ids;

    std::vector<int> pick(small.size(), -1);
    std::vector<char> used(large.size(), 0);
    std::function<void(size_t)> rec = [&](size_t k) {
        if (k == small.size()) {
            std::vector<std::pair<int, int>> opt;
            for (size_t i = 0; i < small.size(); ++i) {
                int c = clusters_smaller ? small[i] : large[static_cast<size_t>(pick[i])];
                int l = clusters_smaller ? large[static_cast<size_t>(pick[i])] : small[i];
                opt.emplace_back(c, l);
            }
            options.push_back(std::move(opt));
            return;
        }
        for (size_t j = 0; j < large.size(); ++j) {
            if (used[j]) continue;
            used[j] = 1;
            pick[k] = static_cast<int>(j);
            rec(k + 1);
            used[j] = 0;
        }
    };
    rec(0);
    return options;
}

}  // namespace detail

/// Align trajectories onto a common frame using shared activity landmarks.
/// The first trajectory anchors the frame; each subsequent one is matched by
/// enumerating class-respecting landmark correspondences, fitted with a
/// least-squares rigid transform, and merged into the growing landmark map.
inline AlignmentResult align_trajectories(const std::vector<Trajectory>& trajectories,
                                          const AlignOptions& opts = {}) {
    if (trajectories.empty()) throw Error(ErrorCode::EmptyInput, "no trajectories");
    for (const auto& t : trajectories) t.validate();

    AlignmentResult result;

    // Reference curvature between landmark pairs, keyed on (min id, max id),
    // written by the first trajectory that traverses the pair. Used to
    // resolve the reflection ambiguity of two-point matches.
    std::map<std::pair<int, int>, double> pair_curvature;

    for (size_t k = 0; k < trajectories.size(); ++k) {
        const Trajectory& traj = trajectories[k];
        std::vector<AlcCluster> clusters = cluster_trajectory_alcs(traj, opts.merge_radius);

        RigidTransform tf;  // identity for the anchor
        std::vector<std::pair<int, int>> matched;  // (cluster idx, landmark idx)

        if (k > 0) {
            // Group cluster/landmark indices per class.
            std::map<LandmarkClass, std::vector<int>> clusters_by_class, landmarks_by_class;
            for (size_t i = 0; i < clusters.size(); ++i)
                clusters_by_class[clusters[i].cls].push_back(static_cast<int>(i));
            for (size_t i = 0; i < result.landmarks.size(); ++i)
                landmarks_by_class[result.landmarks[i].cls].push_back(static_cast<int>(i));

            std::vector<std::vector<std::vector<std::pair<int, int>>>> per_class;
            size_t hypothesis_count = 1;
            for (auto& [cls, cl_ids] : clusters_by_class) {
                auto it = landmarks_by_class.find(cls);
                if (it == landmarks_by_class.end()) continue;
                auto options = detail::class_match_options(cl_ids, it->second);
                if (options.empty()) continue;
                hypothesis_count *= options.size();
                if (hypothesis_count > opts.max_hypotheses)
                    throw Error(ErrorCode::InvalidSpec,
                                "landmark correspondence search space too large");
                per_class.push_back(std::move(options));
            }

            // Cartesian product over per-class options; keep the lowest-RMS fit.
            double best_rms = std::numeric_limits<double>::infinity();
            std::vector<std::pair<int, int>> best_pairs;
            RigidTransform best_tf;
            std::vector<size_t> cursor(per_class.size(), 0);
            bool done = per_class.empty();
            while (!done) {
                std::vector<std::pair<int, int>> pairs;
                for (size_t c = 0; c < per_class.size(); ++c)
                    for (auto& pr : per_class[c][cursor[c]]) pairs.push_back(pr);

                if (static_cast<int>(pairs.size()) >= opts.min_common) {
                    std::vector<Eigen::Vector2d> src, dst;
                    for (auto& [ci, li] : pairs) {
                        src.push_back(clusters[static_cast<size_t>(ci)].centroid);
                        dst.push_back(result.landmarks[static_cast<size_t>(li)].pos);
                    }
                    RigidTransform cand = detail::fit_rigid(src, dst);
                    double rms = detail::rigid_fit_rms(cand, src, dst);
                    if (rms < best_rms - 1e-15) {
                        best_rms = rms;
                        best_pairs = pairs;
                        best_tf = cand;
                    }
                }
                // Advance the cartesian cursor.
                size_t c = 0;
                for (; c < per_class.size(); ++c) {
                    if (++cursor[c] < per_class[c].size()) break;
                    cursor[c] = 0;
                }
                done = c == per_class.size();
            }

            if (best_pairs.empty())
                throw Error(ErrorCode::InsufficientCommonLandmarks,
                            "trajectory " + traj.source_id + " shares fewer than " +
                                std::to_string(opts.min_common) + " landmarks with the map");

            matched = best_pairs;
            tf = best_tf;

            // Reflection disambiguation.
            std::vector<Eigen::Vector2d> src, dst;
            for (auto& [ci, li] : matched) {
                src.push_back(clusters[static_cast<size_t>(ci)].centroid);
                dst.push_back(result.landmarks[static_cast<size_t>(li)].pos);
            }
            RigidTransform mirrored = detail::fit_rigid(src, dst, /*force_reflection=*/true);
            if (matched.size() >= 3) {
                // Geometry decides: three or more pairs make the handedness
                // observable through the residual.
                if (detail::rigid_fit_rms(mirrored, src, dst) <
                    detail::rigid_fit_rms(tf, src, dst) - 1e-12)
                    tf = mirrored;
            } else if (matched.size() == 2) {
                // Two pairs fit either handedness; compare path curvature
                // against the reference stored by an earlier trajectory.
                int ca = matched[0].first, cb = matched[1].first;
                auto key = std::minmax(matched[0].second, matched[1].second);
                auto ref = pair_curvature.find({key.first, key.second});
                if (ref != pair_curvature.end() && std::abs(ref->second) > 1e-12) {
                    double mine = detail::path_curvature(
                        traj, clusters[static_cast<size_t>(ca)].point_indices.front(),
                        clusters[static_cast<size_t>(cb)].point_indices.front());
                    if (mine * ref->second < 0) tf = mirrored;
                }
            }
        } else {
            for (size_t i = 0; i < clusters.size(); ++i)
                matched.emplace_back(static_cast<int>(i), -1);  // anchor defines landmarks
        }

        // Apply the transform.
        Trajectory aligned = traj;
        for (auto& p : aligned.points) p.xy = tf.apply(p.xy);

        // Merge clusters into the landmark map.
        std::vector<std::pair<AlcCluster, int>> assignment;
        std::vector<int> landmark_of_cluster(clusters.size(), -1);
        for (auto& [ci, li] : matched) {
            Eigen::Vector2d obs = tf.apply(clusters[static_cast<size_t>(ci)].centroid);
            if (li >= 0) {
                MapLandmark& lm = result.landmarks[static_cast<size_t>(li)];
                lm.pos = (lm.pos * lm.obs_count + obs) / (lm.obs_count + 1);
                lm.obs_count += 1;
                landmark_of_cluster[static_cast<size_t>(ci)] = li;
            }
        }
        for (size_t ci = 0; ci < clusters.size(); ++ci) {
            if (landmark_of_cluster[ci] >= 0) continue;
            Eigen::Vector2d obs = tf.apply(clusters[ci].centroid);
            // Absorb into an existing same-class landmark when close enough;
            // otherwise the map grows.
            int found = -1;
            for (size_t li = 0; li < result.landmarks.size(); ++li) {
                if (result.landmarks[li].cls == clusters[ci].cls &&
                    (result.landmarks[li].pos - obs).norm() <= opts.merge_radius) {
                    found = static_cast<int>(li);
                    break;
                }
            }
            if (found >= 0) {
                MapLandmark& lm = result.landmarks[static_cast<size_t>(found)];
                lm.pos = (lm.pos * lm.obs_count + obs) / (lm.obs_count + 1);
                lm.obs_count += 1;
                landmark_of_cluster[ci] = found;
            } else {
                result.landmarks.push_back({clusters[ci].cls, obs, 1});
                landmark_of_cluster[ci] = static_cast<int>(result.landmarks.size()) - 1;
            }
        }

        // Optional curvilinear correction: pin consecutive shared ALC pairs
        // exactly onto their map landmarks with per-segment rigid warps.
        if (opts.segment_correction && k > 0) {
            std::vector<std::pair<int, int>> anchors;  // (point idx, landmark idx)
            for (size_t ci = 0; ci < clusters.size(); ++ci)
                anchors.emplace_back(clusters[ci].point_indices.front(), landmark_of_cluster[ci]);
            std::sort(anchors.begin(), anchors.end());
            for (size_t a = 0; a + 1 < anchors.size(); ++a) {
                auto [i0, l0] = anchors[a];
                auto [i1, l1] = anchors[a + 1];
                if (l0 < 0 || l1 < 0 || i1 <= i0) continue;
                std::vector<Eigen::Vector2d> seg_src = {aligned.points[static_cast<size_t>(i0)].xy,
                                                        aligned.points[static_cast<size_t>(i1)].xy};
                std::vector<Eigen::Vector2d> seg_dst = {
                    result.landmarks[static_cast<size_t>(l0)].pos,
                    result.landmarks[static_cast<size_t>(l1)].pos};
                if ((seg_src[0] - seg_src[1]).norm() < 1e-9) continue;
                RigidTransform seg_tf = detail::fit_rigid(seg_src, seg_dst);
                for (int i = i0; i <= i1; ++i)
                    aligned.points[static_cast<size_t>(i)].xy =
                        seg_tf.apply(aligned.points[static_cast<size_t>(i)].xy);
            }
        }

        // Record reference curvatures for landmark pairs this trajectory
        // traverses consecutively (first writer wins).
        {
            std::vector<std::pair<int, int>> ordered;  // (first point idx, landmark id)
            for (size_t ci = 0; ci < clusters.size(); ++ci)
                ordered.emplace_back(clusters[ci].point_indices.front(),
                                     landmark_of_cluster[ci]);
            std::sort(ordered.begin(), ordered.end());
            for (size_t a = 0; a + 1 < ordered.size(); ++a) {
                auto key = std::minmax(ordered[a].second, ordered[a + 1].second);
                if (key.first < 0) continue;
                double curv = detail::path_curvature(aligned, ordered[a].first,
                                                     ordered[a + 1].first);
                pair_curvature.emplace(std::make_pair(key.first, key.second), curv);
            }
        }

        for (size_t ci = 0; ci < clusters.size(); ++ci) {
            AlcCluster moved = clusters[ci];
            moved.centroid = tf.apply(moved.centroid);
            assignment.emplace_back(std::move(moved), landmark_of_cluster[ci]);
        }
        result.aligned.push_back(std::move(aligned));
        result.transforms.push_back(tf);
        result.cluster_assignments.push_back(std::move(assignment));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Landmark graph and Levenberg-Marquardt optimization
// ---------------------------------------------------------------------------

struct LandmarkGraph {
    struct Node {
        Eigen::Vector2d xy = Eigen::Vector2d::Zero();
        bool is_landmark = false;
        std::optional<LandmarkClass> cls;
    };
    struct Edge {
        int i = 0;
        int j = 0;
        Eigen::Vector2d delta = Eigen::Vector2d::Zero();  // measured p_j - p_i
        double weight = 1.0;                              // information, 1/sigma^2
    };
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    int gauge_node = 0;
    // Node ids traversed by each trajectory, for path extraction.
    std::vector<std::vector<int>> trajectory_paths;

    double cost() const {
        double acc = 0.0;
        for (const auto& e : edges) {
            Eigen::Vector2d r = (nodes[static_cast<size_t>(e.j)].xy -
                                 nodes[static_cast<size_t>(e.i)].xy) -
                                e.delta;
            acc += e.weight * r.squaredNorm();
        }
        return acc;
    }

    void check_connected() const {
        if (nodes.empty()) throw Error(ErrorCode::EmptyInput, "graph has no nodes");
        std::vector<char> seen(nodes.size(), 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        std::vector<std::vector<int>> adj(nodes.size());
        for (const auto& e : edges) {
            adj[static_cast<size_t>(e.i)].push_back(e.j);
            adj[static_cast<size_t>(e.j)].push_back(e.i);
        }
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[static_cast<size_t>(v)]) {
                if (!seen[static_cast<size_t>(w)]) {
                    seen[static_cast<size_t>(w)] = 1;
                    stack.push_back(w);
                }
            }
        }
        for (char s : seen)
            if (!s) throw Error(ErrorCode::NotConnected, "landmark graph is not connected");
    }
};

struct GraphBuildOptions {
    double sigma = 1.0;  // odometry noise; edge information weight is 1/sigma^2
};

/// Build the pose graph from aligned trajectories: shared landmark nodes tie
/// trajectories together, per-trajectory waypoint nodes keep their shape via
/// odometry edges measured in the aligned frame.
inline LandmarkGraph build_landmark_graph(const AlignmentResult& alignment,
                                          const GraphBuildOptions& opts = {}) {
    if (!(opts.sigma > 0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
    LandmarkGraph g;
    const double weight = 1.0 / (opts.sigma * opts.sigma);

    for (const auto& lm : alignment.landmarks)
        g.nodes.push_back({lm.pos, true, lm.cls});

    for (size_t k = 0; k < alignment.aligned.size(); ++k) {
        const Trajectory& traj = alignment.aligned[k];
        // Landmark node id per point index, from the cluster assignments.
        std::map<int, int> landmark_node_of_point;
        for (const auto& [cluster, lm_id] : alignment.cluster_assignments[k])
            for (int idx : cluster.point_indices) landmark_node_of_point[idx] = lm_id;

        std::vector<int> path;
        int prev_node = -1;
        Eigen::Vector2d prev_pos = Eigen::Vector2d::Zero();
        for (size_t i = 0; i < traj.points.size(); ++i) {
            int node;
            auto it = landmark_node_of_point.find(static_cast<int>(i));
            if (it != landmark_node_of_point.end()) {
                node = it->second;
            } else {
                node = static_cast<int>(g.nodes.size());
                g.nodes.push_back({traj.points[i].xy, false, std::nullopt});
            }
            if (prev_node >= 0 && node != prev_node) {
                LandmarkGraph::Edge e;
                e.i = prev_node;
                e.j = node;
                e.delta = traj.points[i].xy - prev_pos;  // measured displacement
                e.weight = weight;
                g.edges.push_back(e);
            }
            if (path.empty() || path.back() != node) path.push_back(node);
            prev_node = node;
            prev_pos = traj.points[i].xy;
        }
        g.trajectory_paths.push_back(std::move(path));
    }
    g.gauge_node = 0;
    return g;
}

struct OptimizeOptions {
    double initial_damping = 1e-3;
    double damping_increase = 10.0;
    double damping_decrease = 10.0;
    double relative_tolerance = 1e-9;
    int max_iterations = 200;
    int max_consecutive_rejects = 20;
};

struct OptimizeResult {
    LandmarkGraph graph;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    std::vector<double> cost_history;  // accepted costs, non-increasing
    int iterations = 0;
};

/// Minimize the weighted squared residuals of all edges with
/// Levenberg-Marquardt. The gauge node is held fixed to remove the global
/// translation/rotation freedom of the solution.
inline OptimizeResult optimize_graph(const LandmarkGraph& input,
                                     const OptimizeOptions& opts = {}) {
    input.check_connected();
    OptimizeResult result;
    result.graph = input;
    LandmarkGraph& g = result.graph;

    const int n = static_cast<int>(g.nodes.size());
    const int gauge = g.gauge_node;
    auto var_of_node = [&](int node) { return node < gauge ? node : node - 1; };
    const int nv = 2 * (n - 1);

    result.initial_cost = g.cost();
    result.cost_history.push_back(result.initial_cost);
    if (nv == 0 || g.edges.empty()) {
        result.final_cost = result.initial_cost;
        return result;
    }

    double damping = opts.initial_damping;
    double cost = result.initial_cost;
    int rejects = 0;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        // Normal equations J^T W J delta = -J^T W r with the gauge column removed.
        Eigen::SparseMatrix<double> h(nv, nv);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(nv);
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(g.edges.size() * 8);
        for (const auto& e : g.edges) {
            Eigen::Vector2d r = (g.nodes[static_cast<size_t>(e.j)].xy -
                                 g.nodes[static_cast<size_t>(e.i)].xy) -
                                e.delta;
            for (int axis = 0; axis < 2; ++axis) {
                // dr/dp_j = +1, dr/dp_i = -1 on the matching axis.
                if (e.j != gauge) {
                    int vj = 2 * var_of_node(e.j) + axis;
                    triplets.emplace_back(vj, vj, e.weight);
                    b(vj) -= e.weight * r(axis);
                }
                if (e.i != gauge) {
                    int vi = 2 * var_of_node(e.i) + axis;
                    triplets.emplace_back(vi, vi, e.weight);
                    b(vi) += e.weight * r(axis);
                }
                if (e.i != gauge && e.j != gauge) {
                    int vi = 2 * var_of_node(e.i) + axis;
                    int vj = 2 * var_of_node(e.j) + axis;
                    triplets.emplace_back(vi, vj, -e.weight);
                    triplets.emplace_back(vj, vi, -e.weight);
                }
            }
        }
        h.setFromTriplets(triplets.begin(), triplets.end());

        // Stationary point: nothing left for a step to improve.
        if (b.cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, cost)) break;

        bool accepted = false;
        while (rejects < opts.max_consecutive_rejects) {
            Eigen::SparseMatrix<double> damped = h;
            for (int v = 0; v < nv; ++v)
                damped.coeffRef(v, v) += damping * std::max(h.coeff(v, v), 1e-12);

            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(damped);
            if (solver.info() != Eigen::Success) {
                damping *= opts.damping_increase;
                ++rejects;
                continue;
            }
            Eigen::VectorXd delta = solver.solve(b);

            // Trial step.
            std::vector<Eigen::Vector2d> backup(static_cast<size_t>(n));
            for (int v = 0; v < n; ++v) backup[static_cast<size_t>(v)] = g.nodes[static_cast<size_t>(v)].xy;
            for (int v = 0; v < n; ++v) {
                if (v == gauge) continue;
                int idx = 2 * var_of_node(v);
                g.nodes[static_cast<size_t>(v)].xy += Eigen::Vector2d(delta(idx), delta(idx + 1));
            }
            double new_cost = g.cost();
            if (new_cost < cost) {
                cost = new_cost;
                damping /= opts.damping_decrease;
                rejects = 0;
                accepted = true;
                result.cost_history.push_back(cost);
                break;
            }
            for (int v = 0; v < n; ++v) g.nodes[static_cast<size_t>(v)].xy = backup[static_cast<size_t>(v)];
            damping *= opts.damping_increase;
            ++rejects;
        }
        if (rejects >= opts.max_consecutive_rejects) {
            if (result.cost_history.size() > 1) break;  // converged; steps just stalled
            throw Error(ErrorCode::DivergedOptimization,
                        "cost failed to decrease for " +
                            std::to_string(opts.max_consecutive_rejects) + " attempts");
        }
        result.iterations = iter + 1;
        double prev = result.cost_history[result.cost_history.size() - (accepted ? 2 : 1)];
        if (prev <= 0.0 || std::abs(prev - cost) / std::max(prev, 1e-300) <
                               opts.relative_tolerance)
            break;
    }
    result.final_cost = cost;
    return result;
}

// ---------------------------------------------------------------------------
// Floor maps and discrepancy metrics
// ---------------------------------------------------------------------------

struct FloorMap {
    struct Landmark {
        LandmarkClass cls = LandmarkClass::Lift;
        Eigen::Vector2d xy = Eigen::Vector2d::Zero();
    };
    std::vector<Landmark> landmarks;
    std::vector<std::vector<Eigen::Vector2d>> paths;
    std::string frame = "map";
};

inline FloorMap extract_floor_map(const LandmarkGraph& g, const std::string& frame = "map") {
    FloorMap fm;
    fm.frame = frame;
    for (const auto& node : g.nodes)
        if (node.is_landmark && node.cls) fm.landmarks.push_back({*node.cls, node.xy});
    for (const auto& path : g.trajectory_paths) {
        std::vector<Eigen::Vector2d> poly;
        poly.reserve(path.size());
        for (int node : path) poly.push_back(g.nodes[static_cast<size_t>(node)].xy);
        fm.paths.push_back(std::move(poly));
    }
    return fm;
}

struct DiscrepancySummary {
    double max = 0.0;
    double p90 = 0.0;
    double mean = 0.0;
};

struct DiscrepancyReport {
    std::vector<double> distances;
    DiscrepancySummary summary;
    std::vector<std::pair<int, int>> matches;  // (generated idx, truth idx)
    std::vector<int> unmatched_generated;
    std::vector<int> unmatched_truth;
    RigidTransform registration;
};

namespace detail {

inline DiscrepancySummary summarize_distances(const std::vector<double>& distances) {
    DiscrepancySummary s;
    if (distances.empty()) return s;
    std::vector<double> sorted = distances;
    std::sort(sorted.begin(), sorted.end());
    s.max = sorted.back();
    size_t idx = static_cast<size_t>(
        std::ceil(0.9 * static_cast<double>(sorted.size())));
    s.p90 = sorted[std::min(sorted.size() - 1, idx == 0 ? 0 : idx - 1)];
    double sum = 0.0;
    for (double d : sorted) sum += d;
    s.mean = sum / static_cast<double>(sorted.size());
    return s;
}

/// Class-respecting Hungarian matching of landmark lists under a transform.
inline std::vector<std::pair<int, int>> match_landmarks(const FloorMap& generated,
                                                        const FloorMap& truth,
                                                        const RigidTransform& tf) {
    std::map<LandmarkClass, std::vector<int>> gen_by_class, truth_by_class;
    for (size_t i = 0; i < generated.landmarks.size(); ++i)
        gen_by_class[generated.landmarks[i].cls].push_back(static_cast<int>(i));
    for (size_t i = 0; i < truth.landmarks.size(); ++i)
        truth_by_class[truth.landmarks[i].cls].push_back(static_cast<int>(i));

    std::vector<std::pair<int, int>> matches;
    for (auto& [cls, gen_ids] : gen_by_class) {
        auto it = truth_by_class.find(cls);
        if (it == truth_by_class.end()) continue;
        const auto& truth_ids = it->second;
        const bool gen_rows = gen_ids.size() <= truth_ids.size();
        const auto& rows = gen_rows ? gen_ids : truth_ids;
        const auto& cols = gen_rows ? truth_ids : gen_ids;
        Eigen::MatrixXd cost(static_cast<Eigen::Index>(rows.size()),
                             static_cast<Eigen::Index>(cols.size()));
        for (size_t r = 0; r < rows.size(); ++r) {
            for (size_t c = 0; c < cols.size(); ++c) {
                int gi = gen_rows ? rows[r] : cols[c];
                int ti = gen_rows ? cols[c] : rows[r];
                cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    (tf.apply(generated.landmarks[static_cast<size_t>(gi)].xy) -
                     truth.landmarks[static_cast<size_t>(ti)].xy)
                        .norm();
            }
        }
        auto assign = hungarian(cost);
        for (size_t r = 0; r < rows.size(); ++r) {
            if (assign[r] < 0) continue;
            int gi = gen_rows ? rows[r] : cols[static_cast<size_t>(assign[r])];
            int ti = gen_rows ? cols[static_cast<size_t>(assign[r])] : rows[r];
            matches.emplace_back(gi, ti);
        }
    }
    std::sort(matches.begin(), matches.end());
    return matches;
}

/// Best rigid registration of the generated map onto the truth map. The
/// match-then-refit iteration only converges locally, so it is run from a
/// deterministic set of starts (identity, class-mean fit, and a rotation
/// grid); an exact-identity snap keeps a perfect overlay registering
/// exactly.
inline RigidTransform register_maps(const FloorMap& generated, const FloorMap& truth) {
    auto cost_of = [&](const RigidTransform& t) {
        auto matches = match_landmarks(generated, truth, t);
        double acc = 0.0;
        for (auto& [gi, ti] : matches)
            acc += (t.apply(generated.landmarks[static_cast<size_t>(gi)].xy) -
                    truth.landmarks[static_cast<size_t>(ti)].xy)
                       .squaredNorm();
        return acc;
    };
    auto refine = [&](RigidTransform tf) {
        for (int pass = 0; pass < 6; ++pass) {
            auto matches = match_landmarks(generated, truth, tf);
            if (matches.size() < 2) return tf;
            std::vector<Eigen::Vector2d> src, dst;
            for (auto& [gi, ti] : matches) {
                src.push_back(generated.landmarks[static_cast<size_t>(gi)].xy);
                dst.push_back(truth.landmarks[static_cast<size_t>(ti)].xy);
            }
            tf = fit_rigid(src, dst);
        }
        return tf;
    };

    Eigen::Vector2d cg = Eigen::Vector2d::Zero(), ct = Eigen::Vector2d::Zero();
    for (const auto& lm : generated.landmarks) cg += lm.xy;
    for (const auto& lm : truth.landmarks) ct += lm.xy;
    cg /= static_cast<double>(generated.landmarks.size());
    ct /= static_cast<double>(truth.landmarks.size());

    std::vector<RigidTransform> starts;
    starts.push_back(RigidTransform{});
    for (int a = 0; a < 16; ++a) {
        double angle = 2.0 * std::numbers::pi * a / 16.0;
        RigidTransform t0;
        t0.rot = Eigen::Rotation2Dd(angle).toRotationMatrix();
        t0.trans = ct - t0.rot * cg;
        starts.push_back(t0);
    }
    // Class-mean correspondence gives a shape-aware start when at least two
    // classes are shared.
    {
        std::map<LandmarkClass, std::pair<Eigen::Vector2d, int>> gm, tm;
        for (const auto& lm : generated.landmarks) {
            gm[lm.cls].first += lm.xy;
            gm[lm.cls].second += 1;
        }
        for (const auto& lm : truth.landmarks) {
            tm[lm.cls].first += lm.xy;
            tm[lm.cls].second += 1;
        }
        std::vector<Eigen::Vector2d> src, dst;
        for (auto& [cls, acc] : gm) {
            auto it = tm.find(cls);
            if (it == tm.end()) continue;
            src.push_back(acc.first / acc.second);
            dst.push_back(it->second.first / it->second.second);
        }
        if (src.size() >= 2) starts.push_back(detail::fit_rigid(src, dst));
    }

    RigidTransform best;
    double best_cost = cost_of(best);
    for (const auto& start : starts) {
        RigidTransform cand = refine(start);
        double cost = cost_of(cand);
        if (cost < best_cost - 1e-15) {
            best_cost = cost;
            best = cand;
        }
    }
    // Identity snap: a perfect overlay must register exactly, not to within
    // solver roundoff.
    RigidTransform identity;
    if (cost_of(identity) <= best_cost) return identity;
    return best;
}

}  // namespace detail

/// Graph Discrepancy Metric: Euclidean distances between corresponding
/// landmarks of the generated and ground-truth maps after rigid
/// registration. Unmatched landmarks are reported, not fatal.
inline DiscrepancyReport gdm(const FloorMap& generated, const FloorMap& truth) {
    if (generated.landmarks.empty() || truth.landmarks.empty())
        throw Error(ErrorCode::EmptyInput, "both maps need landmarks");

    DiscrepancyReport report;
    report.registration = detail::register_maps(generated, truth);
    report.matches = detail::match_landmarks(generated, truth, report.registration);

    std::set<int> gen_used, truth_used;
    for (auto& [gi, ti] : report.matches) {
        gen_used.insert(gi);
        truth_used.insert(ti);
        report.distances.push_back(
            (report.registration.apply(generated.landmarks[static_cast<size_t>(gi)].xy) -
             truth.landmarks[static_cast<size_t>(ti)].xy)
                .norm());
    }
    for (size_t i = 0; i < generated.landmarks.size(); ++i)
        if (!gen_used.count(static_cast<int>(i)))
            report.unmatched_generated.push_back(static_cast<int>(i));
    for (size_t i = 0; i < truth.landmarks.size(); ++i)
        if (!truth_used.count(static_cast<int>(i)))
            report.unmatched_truth.push_back(static_cast<int>(i));

    report.summary = detail::summarize_distances(report.distances);
    return report;
}

/// Shape Discrepancy Metric: distances between corresponding points sampled
/// uniformly along the lines connecting every matched landmark pair in both
/// maps.
inline DiscrepancyReport sdm(const FloorMap& generated, const FloorMap& truth,
                             int samples_per_edge = 10) {
    if (samples_per_edge < 2)
        throw Error(ErrorCode::InvalidArgument, "samples_per_edge must be >= 2");

    DiscrepancyReport base = gdm(generated, truth);
    DiscrepancyReport report;
    report.registration = base.registration;
    report.matches = base.matches;
    report.unmatched_generated = base.unmatched_generated;
    report.unmatched_truth = base.unmatched_truth;

    const auto& tf = report.registration;
    for (size_t a = 0; a < report.matches.size(); ++a) {
        for (size_t b = a + 1; b < report.matches.size(); ++b) {
            Eigen::Vector2d ga =
                tf.apply(generated.landmarks[static_cast<size_t>(report.matches[a].first)].xy);
            Eigen::Vector2d gb =
                tf.apply(generated.landmarks[static_cast<size_t>(report.matches[b].first)].xy);
            Eigen::Vector2d ta = truth.landmarks[static_cast<size_t>(report.matches[a].second)].xy;
            Eigen::Vector2d tb = truth.landmarks[static_cast<size_t>(report.matches[b].second)].xy;
            for (int s = 0; s < samples_per_edge; ++s) {
                double t = static_cast<double>(s) / static_cast<double>(samples_per_edge - 1);
                Eigen::Vector2d gp = (1.0 - t) * ga + t * gb;
                Eigen::Vector2d tp = (1.0 - t) * ta + t * tb;
                report.distances.push_back((gp - tp).norm());
            }
        }
    }
    report.summary = detail::summarize_distances(report.distances);
    return report;
}

// ---------------------------------------------------------------------------
// Trajectory CSV and floor-map JSON/SVG
// ---------------------------------------------------------------------------

inline std::string trajectories_to_csv(const std::vector<Trajectory>& trajectories) {
    std::string out = "t,x,y,activity_label,source_id\n";
    for (const auto& traj : trajectories) {
        for (const auto& p : traj.points) {
            out += format_g9(p.t);
            out += ',';
            out += format_g9(p.xy.x());
            out += ',';
            out += format_g9(p.xy.y());
            out += ',';
            if (p.landmark_class) out += activity_from_landmark_class(*p.landmark_class);
            out += ',';
            out += traj.source_id;
            out += '\n';
        }
    }
    return out;
}

/// Read the trajectory CSV (t, x, y, activity_label, source_id), grouping
/// rows by source and running landmark_trajectory per group.
inline std::vector<Trajectory> trajectories_from_csv(std::istream& in,
                                                     const LandmarkingOptions& opts = {}) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyInput, "empty trajectory file");
    std::vector<std::string> order;
    std::map<std::string, std::vector<TimedPosition>> positions;
    std::map<std::string, std::vector<TimedActivity>> activities;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv(line);
        if (fields.size() != 5)
            throw Error(ErrorCode::LengthMismatch,
                        "line " + std::to_string(line_no) + ": expected 5 fields");
        auto t = detail::parse_double(fields[0]);
        auto x = detail::parse_double(fields[1]);
        auto y = detail::parse_double(fields[2]);
        if (!t || !x || !y)
            throw Error(ErrorCode::OutOfRange, "line " + std::to_string(line_no) + ": bad number");
        std::string label = detail::trim(fields[3]);
        std::string source = detail::trim(fields[4]);
        if (!positions.count(source)) order.push_back(source);
        positions[source].push_back({*t, Eigen::Vector2d(*x, *y)});
        // Rows are time-aligned by construction; an empty label is an
        // ordinary (non-landmark) sample.
        activities[source].push_back({*t, label.empty() ? "none" : label});
    }
    std::vector<Trajectory> out;
    for (const auto& source : order)
        out.push_back(
            landmark_trajectory(positions[source], activities[source], source, opts));
    return out;
}

inline nlohmann::json floor_map_to_json(const FloorMap& fm) {
    nlohmann::json j;
    j["schema"] = "androcon-floormap/1";
    j["frame"] = fm.frame;
    nlohmann::json lms = nlohmann::json::array();
    for (const auto& lm : fm.landmarks)
        lms.push_back({{"class", landmark_class_name(lm.cls)},
                       {"x", lm.xy.x()},
                       {"y", lm.xy.y()}});
    j["landmarks"] = lms;
    nlohmann::json paths = nlohmann::json::array();
    for (const auto& path : fm.paths) {
        nlohmann::json poly = nlohmann::json::array();
        for (const auto& p : path) poly.push_back({{"x", p.x()}, {"y", p.y()}});
        paths.push_back(poly);
    }
    j["paths"] = paths;
    return j;
}

inline FloorMap floor_map_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "androcon-floormap/1")
        throw Error(ErrorCode::InvalidSpec, "unsupported floor map schema");
    FloorMap fm;
    fm.frame = j.value("frame", "map");
    for (const auto& lj : j.at("landmarks")) {
        std::string cls = lj.at("class").get<std::string>();
        std::optional<LandmarkClass> parsed;
        for (LandmarkClass c : {LandmarkClass::Lift, LandmarkClass::Stairs,
                                LandmarkClass::Room, LandmarkClass::Corner})
            if (cls == landmark_class_name(c)) parsed = c;
        if (!parsed) throw Error(ErrorCode::InvalidSpec, "unknown landmark class " + cls);
        fm.landmarks.push_back(
            {*parsed, Eigen::Vector2d(lj.at("x").get<double>(), lj.at("y").get<double>())});
    }
    if (j.contains("paths")) {
        for (const auto& pj : j.at("paths")) {
            std::vector<Eigen::Vector2d> poly;
            for (const auto& p : pj)
                poly.emplace_back(p.at("x").get<double>(), p.at("y").get<double>());
            fm.paths.push_back(std::move(poly));
        }
    }
    return fm;
}

/// SVG rendering for visual inspection: trajectory polylines in grey,
/// landmarks as colored circles.
inline std::string floor_map_to_svg(const FloorMap& fm) {
    double min_x = 0, min_y = 0, max_x = 1, max_y = 1;
    bool first = true;
    auto grow = [&](const Eigen::Vector2d& p) {
        if (first) {
            min_x = max_x = p.x();
            min_y = max_y = p.y();
            first = false;
        } else {
            min_x = std::min(min_x, p.x());
            max_x = std::max(max_x, p.x());
            min_y = std::min(min_y, p.y());
            max_y = std::max(max_y, p.y());
        }
    };
    for (const auto& lm : fm.landmarks) grow(lm.xy);
    for (const auto& path : fm.paths)
        for (const auto& p : path) grow(p);
    const double pad = 0.05 * std::max(max_x - min_x, max_y - min_y) + 1.0;
    min_x -= pad; min_y -= pad; max_x += pad; max_y += pad;

    auto color_of = [](LandmarkClass c) {
        switch (c) {
            case LandmarkClass::Lift: return "#d62728";
            case LandmarkClass::Stairs: return "#1f77b4";
            case LandmarkClass::Room: return "#2ca02c";
            case LandmarkClass::Corner: return "#ff7f0e";
        }
        return "#000000";
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + format_g9(min_x) + " " +
           format_g9(min_y) + " " + format_g9(max_x - min_x) + " " + format_g9(max_y - min_y) +
           "\">\n";
    for (const auto& path : fm.paths) {
        svg += "  <polyline fill=\"none\" stroke=\"#999999\" stroke-width=\"0.2\" points=\"";
        for (const auto& p : path) svg += format_g9(p.x()) + "," + format_g9(p.y()) + " ";
        svg += "\"/>\n";
    }
    for (const auto& lm : fm.landmarks) {
        svg += std::string("  <circle r=\"0.8\" fill=\"") + color_of(lm.cls) + "\" cx=\"" +
               format_g9(lm.xy.x()) + "\" cy=\"" + format_g9(lm.xy.y()) + "\"><title>" +
               landmark_class_name(lm.cls) + "</title></circle>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace androcon
