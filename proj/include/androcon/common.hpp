// Shared error type, deterministic RNG, seed derivation and text formatting
// used across the androcon library.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace androcon {

enum class ErrorCode {
    MissingField,
    OutOfRange,
    EmptyInput,
    UnreadableStream,
    HeaderMissing,
    AllAbsent,
    TooFewRows,
    InvalidArgument,
    NonPsdCovariance,
    SingularInnovation,
    SingularScatter,
    DegenerateClasses,
    DimMismatch,
    DegenerateDataset,
    ClassTooSmall,
    LengthMismatch,
    AlignmentGapTooLarge,
    InsufficientCommonLandmarks,
    NotConnected,
    DivergedOptimization,
    NonPhysical,
    InvalidSpec,
    MissingInput,
    IoError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::MissingField: return "MissingField";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::UnreadableStream: return "UnreadableStream";
        case ErrorCode::HeaderMissing: return "HeaderMissing";
        case ErrorCode::AllAbsent: return "AllAbsent";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonPsdCovariance: return "NonPsdCovariance";
        case ErrorCode::SingularInnovation: return "SingularInnovation";
        case ErrorCode::SingularScatter: return "SingularScatter";
        case ErrorCode::DegenerateClasses: return "DegenerateClasses";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::DegenerateDataset: return "DegenerateDataset";
        case ErrorCode::ClassTooSmall: return "ClassTooSmall";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::AlignmentGapTooLarge: return "AlignmentGapTooLarge";
        case ErrorCode::InsufficientCommonLandmarks: return "InsufficientCommonLandmarks";
        case ErrorCode::NotConnected: return "NotConnected";
        case ErrorCode::DivergedOptimization: return "DivergedOptimization";
        case ErrorCode::NonPhysical: return "NonPhysical";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::MissingInput: return "MissingInput";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Library-wide exception. Every failure carries a stable code plus a
/// human-readable message; callers dispatch on code(), not on text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Seeding and random sampling.
//
// All stochastic steps draw from one root seed through named sub-streams so a
// run is reproducible end to end and independent stages never share a stream.
// ---------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derive a named sub-seed from a root seed. Distinct names give independent
/// streams; the same (root, name) pair always gives the same seed.
inline uint64_t derive_seed(uint64_t root, const std::string& name) {
    return splitmix64(root ^ fnv1a64(name));
}

/// Counter-based split for per-item streams (per class, per trajectory, ...).
inline uint64_t derive_seed(uint64_t root, const std::string& name, uint64_t index) {
    return splitmix64(derive_seed(root, name) + 0x632be59bd9b4e019ULL * (index + 1));
}

/// Deterministic random source. Wraps the (fully specified) mt19937_64 engine
/// and implements its own transforms so generated values are identical across
/// standard libraries and platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)) {
        // mt19937_64 seeded from a splitmix pass avoids correlated low-entropy seeds.
        engine_.seed(state_);
    }

    uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n). Rejection sampling, exact for any n >= 1.
    uint64_t uniform_int(uint64_t n) {
        if (n == 0) throw Error(ErrorCode::InvalidArgument, "uniform_int(0)");
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    /// Standard normal via Box-Muller (cosine branch only, stateless).
    double gaussian() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Text formatting and file helpers.
// ---------------------------------------------------------------------------

/// Fixed 9-significant-digit float formatting. Every float written to a
/// primary artifact goes through here so reruns are byte-identical.
inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// Write a file atomically (temp file in the same directory, then rename).
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path dir = path.parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingInput, "cannot open " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

}  // namespace androcon
