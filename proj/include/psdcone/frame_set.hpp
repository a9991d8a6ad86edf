#pragma once

#include <psdcone/error.hpp>
#include <psdcone/frames.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace psdcone {

/// Where a frame set came from: generator label, its parameters, and the
/// seed (0 for deterministic families).
struct Provenance {
    std::string generator;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
};

/// Ordered, non-empty collection of frames sharing one ambient dimension.
/// Sub-dimensions may differ (chordal cliques); packed sets are uniform.
class FrameSet {
public:
    FrameSet(std::vector<Frame> frames, Provenance provenance)
        : frames_(std::move(frames)), provenance_(std::move(provenance)) {
        if (frames_.empty()) throw DimensionError("frame set must contain at least one frame");
        const Index n = frames_.front().ambient_dim();
        for (const auto& f : frames_) {
            if (f.ambient_dim() != n) throw DimensionError("frames in a set must share ambient_dim");
        }
    }

    std::size_t size() const noexcept { return frames_.size(); }
    Index ambient_dim() const noexcept { return frames_.front().ambient_dim(); }
    const std::vector<Frame>& frames() const noexcept { return frames_; }
    const Frame& operator[](std::size_t i) const { return frames_[i]; }
    auto begin() const noexcept { return frames_.begin(); }
    auto end() const noexcept { return frames_.end(); }

    const Provenance& provenance() const noexcept { return provenance_; }
    void set_provenance(Provenance p) { provenance_ = std::move(p); }

    /// Common sub_dim, or nullopt when frames differ.
    std::optional<Index> uniform_sub_dim() const {
        const Index s = frames_.front().sub_dim();
        for (const auto& f : frames_)
            if (f.sub_dim() != s) return std::nullopt;
        return s;
    }

    Index max_sub_dim() const {
        Index s = 0;
        for (const auto& f : frames_) s = std::max(s, f.sub_dim());
        return s;
    }

    const std::optional<double>& min_chordal() const noexcept { return min_chordal_; }

    /// Computes and caches the minimum pairwise chordal distance.
    double annotate_min_chordal() {
        if (!uniform_sub_dim()) throw DimensionError("min chordal distance needs a uniform sub_dim");
        min_chordal_ = min_pairwise_distance(frames_);
        return *min_chordal_;
    }

    /// Records an already computed value; validate() checks it later.
    void set_min_chordal(std::optional<double> d) { min_chordal_ = d; }

    /// Re-checks every invariant, including the cached distance.
    void validate(double tol = 1e-10) const {
        for (const auto& f : frames_) {
            const Index s = f.sub_dim();
            const double err = (f.columns().transpose() * f.columns() - Eigen::MatrixXd::Identity(s, s)).norm();
            if (err > kStiefelTol) throw NumericalError("frame violates orthonormality: " + std::to_string(err));
        }
        if (min_chordal_) {
            if (!uniform_sub_dim() || frames_.size() < 2) throw DimensionError("min_chordal recorded on a set where it is undefined");
            const double actual = min_pairwise_distance(frames_);
            if (std::abs(actual - *min_chordal_) > tol) {
                throw NumericalError("recorded min_chordal " + std::to_string(*min_chordal_) +
                                     " disagrees with recomputed " + std::to_string(actual));
            }
        }
    }

private:
    std::vector<Frame> frames_;
    Provenance provenance_;
    std::optional<double> min_chordal_;
};

inline double min_pairwise_distance(const FrameSet& set) { return min_pairwise_distance(set.frames()); }

} // namespace psdcone
