#include <doctest.h>

#include "mobility/tracking.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <random>

using namespace mobility;

namespace {

JointTrajectory wiggle(unsigned seed, int n, double dt = 0.02, double t0 = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 0.02);
    JointTrajectory traj;
    traj.joint = JointId::left_hand();
    Vec3 p(0.2, 1.0, 0.4);
    for (int i = 0; i < n; ++i) {
        p += Vec3(gauss(rng), gauss(rng), gauss(rng));
        traj.samples.push_back({t0 + i * dt, p});
    }
    return traj;
}

JointTrajectory transformed(const JointTrajectory& traj, const Eigen::Matrix3d& r,
                            const Vec3& t) {
    JointTrajectory out = traj;
    for (TimedPoint& s : out.samples) s.p = r * s.p + t;
    return out;
}

}  // namespace

TEST_CASE("association on matching and offset grids") {
    JointTrajectory est = wiggle(1, 100);

    SUBCASE("identical grids match completely") {
        TrajectoryPair pair = associate(est, est);
        CHECK(pair.matches.size() == 100);
        CHECK(pair.unmatched_estimated == 0);
        CHECK(pair.unmatched_reference == 0);
    }
    SUBCASE("uniform offset of twice the tolerance matches nothing") {
        // 4 ms tolerance, 8 ms shift: every |dt| is at least 8 ms on a 20 ms
        // grid, so nothing can pair up.
        JointTrajectory ref = est;
        for (TimedPoint& s : ref.samples) s.t += 0.008;
        CHECK_THROWS_WITH_AS(associate(est, ref, 0.004), "no temporal overlap",
                             ValidationError);
    }
    SUBCASE("offset inside the tolerance still matches") {
        JointTrajectory ref = est;
        for (TimedPoint& s : ref.samples) s.t += 0.004;
        TrajectoryPair pair = associate(est, ref);
        CHECK(pair.matches.size() == 100);
    }
}

TEST_CASE("sparse stream against a dense reference finds true nearest") {
    JointTrajectory est = wiggle(2, 150, 0.02);          // 50 Hz
    JointTrajectory ref = wiggle(3, 300, 0.01, 0.0031);  // 100 Hz, offset grid

    TrajectoryPair pair = associate(est, ref);
    CHECK(pair.matches.size() == est.size());

    for (const auto& [i, j] : pair.matches) {
        double best = 1e9;
        std::size_t best_j = 0;
        for (std::size_t k = 0; k < ref.size(); ++k) {
            double d = std::fabs(ref.samples[k].t - est.samples[i].t);
            if (d < best) {
                best = d;
                best_j = k;
            }
        }
        CHECK(j == best_j);
    }
    // One-to-one and time-ordered.
    for (std::size_t m = 1; m < pair.matches.size(); ++m) {
        CHECK(pair.matches[m].first > pair.matches[m - 1].first);
        CHECK(pair.matches[m].second > pair.matches[m - 1].second);
    }
}

TEST_CASE("registration modes") {
    JointTrajectory est = wiggle(4, 200);

    SUBCASE("aligned pair gives the identity") {
        TrajectoryPair pair = associate(est, est);
        RigidTransform t = register_pair(pair, RegisterMode::rigid);
        CHECK((t.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-9);
        CHECK(t.translation.norm() < 1e-9);
    }
    SUBCASE("pure shift is recovered by translation mode") {
        JointTrajectory ref = est;
        for (TimedPoint& s : ref.samples) s.p += Vec3(0.03, 0.0, 0.0);
        TrajectoryPair pair = associate(est, ref);
        RigidTransform t = register_pair(pair, RegisterMode::translation);
        CHECK((t.translation - Vec3(0.03, 0, 0)).norm() < 1e-12);
        CHECK((t.rotation - Eigen::Matrix3d::Identity()).norm() == 0.0);
    }
    SUBCASE("random rigid transform is recovered by rigid mode") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Eigen::Matrix3d rot =
            Eigen::AngleAxisd(1.13, Vec3(u(rng), u(rng), u(rng)).normalized())
                .toRotationMatrix();
        Vec3 shift(0.4, -0.2, 1.1);
        TrajectoryPair pair = associate(est, transformed(est, rot, shift));

        RigidTransform t = register_pair(pair, RegisterMode::rigid);
        CHECK((t.rotation - rot).norm() < 1e-6);
        CHECK((t.translation - shift).norm() < 1e-6);
        // Proper rotation invariants.
        CHECK((t.rotation * t.rotation.transpose() - Eigen::Matrix3d::Identity()).norm() <
              1e-9);
        CHECK(t.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-9));
        // Residual vanishes.
        CHECK(ape(pair, t).rmse < 1e-9);
    }
    SUBCASE("collinear geometry is rank deficient") {
        JointTrajectory line;
        line.joint = JointId::left_hand();
        for (int i = 0; i < 50; ++i) {
            line.samples.push_back({i * 0.02, Vec3(0.01 * i, 1.0, 0.4)});
        }
        TrajectoryPair pair = associate(line, line);
        CHECK_THROWS_WITH_AS(register_pair(pair, RegisterMode::rigid), "rank deficient",
                             ValidationError);
        // Translation mode is still fine.
        CHECK(register_pair(pair, RegisterMode::translation).translation.norm() < 1e-12);
    }
}

TEST_CASE("APE statistics") {
    JointTrajectory est = wiggle(6, 300);

    SUBCASE("identical trajectories: all zeros") {
        TrajectoryPair pair = associate(est, est);
        TrackingErrorStats s = ape(pair, RigidTransform{});
        CHECK(s.mean == 0.0);
        CHECK(s.sd == 0.0);
        CHECK(s.rmse == 0.0);
        CHECK(s.max == 0.0);
        CHECK(s.n == 300);
    }
    SUBCASE("constant offset: mean is the offset, sd 0") {
        JointTrajectory ref = est;
        for (TimedPoint& s : ref.samples) s.p += Vec3(0.03, 0.0, 0.0);
        TrajectoryPair pair = associate(est, ref);
        TrackingErrorStats s = ape(pair, RigidTransform{});
        CHECK(s.mean == doctest::Approx(0.03).epsilon(1e-12));
        CHECK(s.sd < 1e-12);
        CHECK(s.max == doctest::Approx(0.03).epsilon(1e-12));
    }
    SUBCASE("rmse^2 = mean^2 + sd^2 (population convention)") {
        JointTrajectory ref = wiggle(7, 300);
        TrajectoryPair pair = associate(est, ref);
        TrackingErrorStats s = ape(pair, RigidTransform{});
        CHECK(s.rmse * s.rmse ==
              doctest::Approx(s.mean * s.mean + s.sd * s.sd).epsilon(1e-9));
        CHECK(s.mean <= s.max);
    }
    SUBCASE("isotropic noise mean matches the 3D norm expectation") {
        // E|N(0, s^2 I3)| = s sqrt(8/pi).
        const double sigma = 0.01;
        std::mt19937_64 rng(8);
        std::normal_distribution<double> gauss(0.0, sigma);
        JointTrajectory big_est, big_ref;
        big_est.joint = big_ref.joint = JointId::left_hand();
        for (int i = 0; i < 100000; ++i) {
            Vec3 p(0.2, 1.0, 0.4);
            big_est.samples.push_back({i * 0.02, p});
            big_ref.samples.push_back({i * 0.02, p + Vec3(gauss(rng), gauss(rng), gauss(rng))});
        }
        TrajectoryPair pair = associate(big_est, big_ref);
        TrackingErrorStats s = ape(pair, RigidTransform{});
        double expectation = sigma * std::sqrt(8.0 / M_PI);
        CHECK(std::fabs(s.mean - expectation) / expectation < 0.03);
    }
}

TEST_CASE("APE with no alignment is invariant under a common rigid motion") {
    JointTrajectory est = wiggle(9, 200);
    JointTrajectory ref = wiggle(10, 200);
    TrackingErrorStats base = ape(associate(est, ref), RigidTransform{});

    Eigen::Matrix3d rot =
        Eigen::AngleAxisd(0.61, Vec3(0, 1, 1).normalized()).toRotationMatrix();
    Vec3 shift(2.0, 0.5, -1.0);
    TrackingErrorStats moved =
        ape(associate(transformed(est, rot, shift), transformed(ref, rot, shift)),
            RigidTransform{});
    CHECK(moved.mean == doctest::Approx(base.mean).epsilon(1e-9));
    CHECK(moved.rmse == doctest::Approx(base.rmse).epsilon(1e-9));
    CHECK(moved.max == doctest::Approx(base.max).epsilon(1e-9));
}

TEST_CASE("least-squares nesting: rigid <= translation <= none in RMSE") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 0.005);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    for (int trial = 0; trial < 5; ++trial) {
        JointTrajectory est = wiggle(100 + trial, 150);
        Eigen::Matrix3d rot =
            Eigen::AngleAxisd(0.2 * u(rng), Vec3(u(rng), u(rng), u(rng)).normalized())
                .toRotationMatrix();
        JointTrajectory ref = transformed(est, rot, Vec3(0.05 * u(rng), 0.02, -0.03));
        for (TimedPoint& s : ref.samples) s.p += Vec3(noise(rng), noise(rng), noise(rng));

        TrajectoryPair pair = associate(est, ref);
        double none = ape(pair, register_pair(pair, RegisterMode::none)).rmse;
        double trans = ape(pair, register_pair(pair, RegisterMode::translation)).rmse;
        double rigid = ape(pair, register_pair(pair, RegisterMode::rigid)).rmse;
        CHECK(rigid <= trans + 1e-9);
        CHECK(trans <= none + 1e-9);
    }
}

TEST_CASE("APE report over tasks and joints") {
    // Reference stream with three joints; estimate injects per-joint offsets
    // ordered shoulders < hands < elbows.
    std::vector<PoseSample> ref_samples, est_samples;
    std::mt19937_64 rng(12);
    std::normal_distribution<double> gauss(0.0, 0.001);
    for (int i = 0; i < 600; ++i) {
        PoseSample r, e;
        r.t = e.t = i * 0.02;
        auto put = [&](const JointId& id, const Vec3& base, double offset) {
            Vec3 p = base + Vec3(gauss(rng), gauss(rng), gauss(rng));
            r.joints[id] = p;
            e.joints[id] = p + Vec3(offset, 0, 0);
        };
        put(JointId::left_shoulder(), Vec3(-0.2, 1.4, 0.0), 0.015);
        put(JointId::left_hand(), Vec3(0.2, 1.0, 0.4), 0.05);
        put(JointId::left_elbow(), Vec3(0.0, 1.2, 0.2), 0.11);
        ref_samples.push_back(std::move(r));
        est_samples.push_back(std::move(e));
    }
    LevelSegmentation tasks;
    tasks.windows = {{"L1", 0.0, 6.0}, {"M1", 6.0, 12.0}};

    std::vector<JointId> joints = {JointId::left_shoulder(), JointId::left_hand(),
                                   JointId::left_elbow(), JointId::right_hand()};
    ApeReport report = ape_report(est_samples, ref_samples, tasks, joints);
    REQUIRE(report.cells.size() == 8);

    for (const char* task : {"L1", "M1"}) {
        const ApeCell* shoulder = report.find(task, JointId::left_shoulder());
        const ApeCell* hand = report.find(task, JointId::left_hand());
        const ApeCell* elbow = report.find(task, JointId::left_elbow());
        REQUIRE(shoulder->stats.has_value());
        REQUIRE(hand->stats.has_value());
        REQUIRE(elbow->stats.has_value());
        CHECK(shoulder->stats->mean == doctest::Approx(0.015).epsilon(1e-9));
        CHECK(shoulder->stats->mean < hand->stats->mean);
        CHECK(hand->stats->mean < elbow->stats->mean);
    }

    // Joint absent from both streams: flagged, not fatal.
    const ApeCell* missing = report.find("L1", JointId::right_hand());
    REQUIRE(missing != nullptr);
    CHECK_FALSE(missing->stats.has_value());
    CHECK(missing->error == "joint not tracked: RH");

    std::string csv = ape_report_csv(report);
    CHECK(csv.find("task,joint,mean_m,sd_m,rmse_m,max_m,n,flags") == 0);
    CHECK(csv.find("joint not tracked: RH") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}
