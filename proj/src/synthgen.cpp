#include "mobility/synthgen.hpp"

#include "mobility/format.hpp"
#include "mobility/pose_log.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace mobility {

namespace {

constexpr double kDt = 0.02;          // 50 Hz
constexpr double kMaxHandSpeed = 2.5; // m/s at speed_scale 1
constexpr double kUpperArm = 0.30;    // m
constexpr double kForearm = 0.28;     // m
constexpr double kTremorCutoffHz = 4.0;

// Idle hands rest here (fractions of the boundary spans); the small pull
// toward the body in z gives every trajectory honest 3D extent.
constexpr double kRestOutFrac = 0.12;
constexpr double kRestLiftFrac = 0.08;
constexpr double kRestPullback = 0.05;

// Fixed shoulder anchors relative to the boundary.
constexpr double kShoulderHalfWidth = 0.17;
constexpr double kShoulderLiftFrac = 0.45;
constexpr double kShoulderSetback = 0.32;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Box-Muller over explicit 53-bit uniforms: identical byte streams on every
// platform, unlike std::normal_distribution.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = m * std::sin(a);
        has_spare_ = true;
        return m * std::cos(a);
    }

private:
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Two-segment arm closure: upper arm exactly kUpperArm, forearm kForearm
// when the hand is in reach, straightening (and notionally stretching)
// beyond it. The elbow leaves the shoulder-hand axis downward and slightly
// outward/backward.
Vec3 solve_elbow(const Vec3& shoulder, const Vec3& hand, double side_sign) {
    const Vec3 to_hand = hand - shoulder;
    const double r = to_hand.norm();
    if (r < 1e-9) return shoulder + Vec3(0.0, -kUpperArm, 0.0);
    const Vec3 u = to_hand / r;
    if (r >= kUpperArm + kForearm) return shoulder + kUpperArm * u;

    Vec3 ref(side_sign * 0.35, -1.0, -0.15);
    Vec3 w = ref - ref.dot(u) * u;
    if (w.norm() < 1e-9) {
        ref = Vec3(side_sign, 0.0, 0.0);
        w = ref - ref.dot(u) * u;
    }
    if (w.norm() < 1e-9) {
        ref = Vec3(0.0, 0.0, 1.0);
        w = ref - ref.dot(u) * u;
    }
    w.normalize();

    const double rr = std::max(r, kUpperArm - kForearm + 1e-6);
    double cosa = (rr * rr + kUpperArm * kUpperArm - kForearm * kForearm) /
                  (2.0 * rr * kUpperArm);
    cosa = std::clamp(cosa, -1.0, 1.0);
    const double sina = std::sqrt(1.0 - cosa * cosa);
    return shoulder + kUpperArm * (cosa * u + sina * w);
}

double parse_double_field(const std::string& value, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ValidationError("profile: bad value for " + key + ": " + value);
    }
    if (used != value.size())
        throw ValidationError("profile: bad value for " + key + ": " + value);
    return v;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void PatientProfile::validate() const {
    if (name.empty() || name.find(',') != std::string::npos)
        throw ValidationError("profile: name must be non-empty and comma-free");
    if (!std::isfinite(amplitude_scale) || amplitude_scale < 0.0 || amplitude_scale > 1.0)
        throw ValidationError("profile: amplitude_scale must lie in [0, 1]");
    if (!std::isfinite(speed_scale) || speed_scale <= 0.0 || speed_scale > 1.0)
        throw ValidationError("profile: speed_scale must lie in (0, 1]");
    if (!std::isfinite(tremor_sd) || tremor_sd < 0.0)
        throw ValidationError("profile: tremor_sd must be non-negative");
    if (!std::isfinite(reaction_delay) || reaction_delay < 0.0)
        throw ValidationError("profile: reaction_delay must be non-negative");
}

PatientProfile PatientProfile::perfect() {
    PatientProfile p;
    p.name = "perfect";
    return p;
}

PatientProfile PatientProfile::healthy(std::uint64_t seed) {
    PatientProfile p;
    p.name = "healthy";
    p.amplitude_scale = 1.0;
    p.speed_scale = 1.0;
    p.tremor_sd = 1e-4;
    p.reaction_delay = 0.10;
    p.seed = seed;
    return p;
}

std::vector<PatientProfile> healthy_population(std::size_t n, std::uint64_t seed) {
    std::vector<PatientProfile> out;
    out.reserve(n);
    std::uint64_t state = splitmix64(seed ^ 0xA5A5A5A5A5A5A5A5ULL);
    auto next = [&state]() {
        state = splitmix64(state);
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    for (std::size_t i = 0; i < n; ++i) {
        PatientProfile p = PatientProfile::healthy(splitmix64(seed + i));
        p.amplitude_scale = 0.93 + 0.07 * next();
        p.speed_scale = 0.92 + 0.08 * next();
        p.tremor_sd = 1e-4 * (0.6 + 0.8 * next());
        p.reaction_delay = 0.08 + 0.04 * next();
        const std::string num = std::to_string(i + 1);
        p.name = "healthy-" + std::string(num.size() < 2 ? "0" : "") + num;
        out.push_back(p);
    }
    return out;
}

PatientProfile parse_profile_text(const std::string& text) {
    PatientProfile p;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ValidationError("profile line " + std::to_string(line_no) +
                                  ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "name") {
            p.name = value;
        } else if (key == "amplitude_scale") {
            p.amplitude_scale = parse_double_field(value, key);
        } else if (key == "speed_scale") {
            p.speed_scale = parse_double_field(value, key);
        } else if (key == "tremor_sd") {
            p.tremor_sd = parse_double_field(value, key);
        } else if (key == "reaction_delay") {
            p.reaction_delay = parse_double_field(value, key);
        } else if (key == "seed") {
            try {
                std::size_t used = 0;
                p.seed = std::stoull(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ValidationError("profile: bad value for seed: " + value);
            }
        } else {
            throw ValidationError("profile: unknown key: " + key);
        }
    }
    p.validate();
    return p;
}

PatientProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_profile_text(buf.str());
}

std::string profile_text(const PatientProfile& profile) {
    std::string out;
    out += "name = " + profile.name + "\n";
    out += "amplitude_scale = " + format_double(profile.amplitude_scale) + "\n";
    out += "speed_scale = " + format_double(profile.speed_scale) + "\n";
    out += "tremor_sd = " + format_double(profile.tremor_sd) + "\n";
    out += "reaction_delay = " + format_double(profile.reaction_delay) + "\n";
    out += "seed = " + std::to_string(profile.seed) + "\n";
    return out;
}

MovementBoundary default_boundary() {
    MovementBoundary bd;
    bd.rest_y = -0.40;
    bd.overhead_y = 0.15;
    bd.lateral_left_x = -0.30;
    bd.lateral_right_x = 0.30;
    bd.forward_z = 0.40;
    return bd;
}

std::uint64_t script_hash(const TargetScript& script) {
    std::ostringstream out;
    serialize_script(script, out);
    const std::string bytes = out.str();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

PoseLog SyntheticStream::to_pose_log() const {
    PoseLog log;
    log.header.version = 1;
    log.header.rate_hz = 1.0 / kDt;
    log.samples = samples;
    return log;
}

SyntheticStream generate(const PatientProfile& profile, const TargetScript& script,
                         const MovementBoundary& boundary) {
    profile.validate();
    script.validate(boundary);

    const double xs = boundary.x_span();
    const double ys = boundary.y_span();
    const double cx = boundary.x_center();
    const double fz = boundary.forward_z;
    const Vec3 center(cx, 0.5 * (boundary.rest_y + boundary.overhead_y), fz);
    const Vec3 rest_l(cx - kRestOutFrac * xs, boundary.rest_y + kRestLiftFrac * ys,
                      fz - kRestPullback);
    const Vec3 rest_r = boundary.mirror_x(rest_l);
    const Vec3 shoulder_l(cx - kShoulderHalfWidth, boundary.rest_y + kShoulderLiftFrac * ys,
                          fz - kShoulderSetback);
    const Vec3 shoulder_r = boundary.mirror_x(shoulder_l);

    const double a = profile.amplitude_scale;
    auto scaled = [&](const Vec3& p) -> Vec3 { return center + a * (p - center); };
    const double cap = kMaxHandSpeed * profile.speed_scale * kDt;
    auto chase = [&](Vec3& p, const Vec3& d) {
        const Vec3 step = d - p;
        const double len = step.norm();
        if (len <= cap)
            p = d;
        else
            p += step * (cap / len);
    };

    SyntheticStream stream;
    stream.profile = profile;
    stream.level = script.level;
    stream.chart_hash = script_hash(script);

    GaussianSource noise(splitmix64(profile.seed ^ splitmix64(stream.chart_hash)));
    const double alpha = 1.0 - std::exp(-2.0 * std::numbers::pi * kTremorCutoffHz * kDt);
    const double gain = std::sqrt((2.0 - alpha) / alpha);  // unit output sd
    Vec3 trem_l = Vec3::Zero(), trem_r = Vec3::Zero();

    Vec3 pl = scaled(rest_l), pr = scaled(rest_r);
    std::size_t cursor = 0;
    const long n = static_cast<long>(std::floor(script.level.duration_s / kDt + 1e-9)) + 1;
    stream.samples.reserve(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * kDt;
        const double lagged = t - profile.reaction_delay;
        while (cursor < script.events.size() && lagged >= script.events[cursor].deadline_t)
            ++cursor;

        Vec3 dl = scaled(rest_l), dr = scaled(rest_r);
        if (cursor < script.events.size() && lagged >= script.events[cursor].appear_t) {
            const TargetEvent& ev = script.events[cursor];
            const Vec3 raw = ev.position_at(lagged);
            switch (ev.hand) {
                case Hand::Left: dl = scaled(raw); break;
                case Hand::Right: dr = scaled(raw); break;
                case Hand::Both:
                    dr = scaled(raw);
                    dl = boundary.mirror_x(dr);
                    break;
            }
        }
        chase(pl, dl);
        chase(pr, dr);

        if (profile.tremor_sd > 0.0) {
            const double s = profile.tremor_sd * gain;
            trem_l = (1.0 - alpha) * trem_l + alpha * Vec3(s * noise(), s * noise(), s * noise());
            trem_r = (1.0 - alpha) * trem_r + alpha * Vec3(s * noise(), s * noise(), s * noise());
        }
        const Vec3 hl = pl + trem_l;
        const Vec3 hr = pr + trem_r;

        PoseSample sample;
        sample.t = t;
        sample.joints[JointId::left_hand()] = hl;
        sample.joints[JointId::right_hand()] = hr;
        sample.joints[JointId::left_elbow()] = solve_elbow(shoulder_l, hl, -1.0);
        sample.joints[JointId::right_elbow()] = solve_elbow(shoulder_r, hr, 1.0);
        sample.joints[JointId::left_shoulder()] = shoulder_l;
        sample.joints[JointId::right_shoulder()] = shoulder_r;
        stream.samples.push_back(std::move(sample));
    }
    return stream;
}

std::vector<TargetScript> population_charts(const std::vector<LevelSpec>& specs,
                                            const MovementBoundary& boundary,
                                            std::uint64_t seed) {
    std::vector<TargetScript> charts;
    charts.reserve(specs.size());
    for (std::size_t j = 0; j < specs.size(); ++j)
        charts.push_back(build_level_schedule(specs[j], boundary, splitmix64(seed + j)));
    return charts;
}

Population generate_population(const std::vector<PatientProfile>& profiles,
                               const std::vector<LevelSpec>& specs,
                               const MovementBoundary& boundary, std::uint64_t seed) {
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        profiles[i].validate();
        for (std::size_t j = 0; j < i; ++j)
            if (profiles[j].name == profiles[i].name)
                throw ValidationError("duplicate profile name: " + profiles[i].name);
    }

    const std::vector<TargetScript> charts = population_charts(specs, boundary, seed);

    Population pop;
    pop.profiles = profiles;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        for (std::size_t j = 0; j < specs.size(); ++j) {
            PopulationEntry entry;
            entry.profile_index = i;
            entry.level_id = specs[j].id;
            entry.stream = generate(profiles[i], charts[j], boundary);

            LevelSegmentation seg;
            seg.windows.push_back({specs[j].id, 0.0, specs[j].duration_s});
            entry.metrics = level_metrics(entry.stream.samples, seg, JointId::core());
            pop.entries.push_back(std::move(entry));
        }
    }
    return pop;
}

std::string Population::metrics_csv() const {
    std::string out = "subject,level,joint,mean_speed_mps,rom_m,volume_m3,flags\n";
    for (const PopulationEntry& entry : entries) {
        const std::string block = mobility::metrics_csv(entry.metrics);
        std::size_t start = block.find('\n') + 1;
        while (start < block.size()) {
            std::size_t end = block.find('\n', start);
            if (end == std::string::npos) end = block.size();
            out += profiles[entry.profile_index].name + "," +
                   block.substr(start, end - start) + "\n";
            start = end + 1;
        }
    }
    return out;
}

RepeatedMeasures Population::hand_table(const std::string& metric) const {
    auto pick = [&](const MetricCell* cell) -> double {
        if (cell == nullptr) throw ValidationError("population: missing metric cell");
        if (!cell->error.empty())
            throw ValidationError("population: metric cell failed: " + cell->error);
        std::optional<double> v;
        if (metric == "speed")
            v = cell->mean_speed;
        else if (metric == "rom")
            v = cell->rom;
        else if (metric == "volume")
            v = cell->volume;
        else
            throw ValidationError("unknown metric: " + metric);
        if (!v) throw ValidationError("population: metric cell empty for " + metric);
        return *v;
    };

    RepeatedMeasures table;
    std::vector<std::size_t> subject_rows;
    for (const PopulationEntry& entry : entries) {
        if (std::find(subject_rows.begin(), subject_rows.end(), entry.profile_index) ==
            subject_rows.end())
            subject_rows.push_back(entry.profile_index);
        if (std::find(table.conditions.begin(), table.conditions.end(), entry.level_id) ==
            table.conditions.end())
            table.conditions.push_back(entry.level_id);
    }
    for (std::size_t idx : subject_rows) table.subjects.push_back(profiles[idx].name);

    table.values.resize(static_cast<Eigen::Index>(table.subjects.size()),
                        static_cast<Eigen::Index>(table.conditions.size()));
    table.values.setConstant(std::numeric_limits<double>::quiet_NaN());
    for (const PopulationEntry& entry : entries) {
        const auto row = std::distance(
            subject_rows.begin(),
            std::find(subject_rows.begin(), subject_rows.end(), entry.profile_index));
        const auto col = std::distance(
            table.conditions.begin(),
            std::find(table.conditions.begin(), table.conditions.end(), entry.level_id));
        const double lh = pick(entry.metrics.find(entry.level_id, JointId::left_hand()));
        const double rh = pick(entry.metrics.find(entry.level_id, JointId::right_hand()));
        table.values(row, col) = 0.5 * (lh + rh);
    }
    // Stats consumers re-validate shape; here only completeness can go wrong.
    if (!table.values.allFinite())
        throw ValidationError("population: some subject/level cells were never generated");
    return table;
}

}  // namespace mobility
