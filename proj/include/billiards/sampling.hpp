#ifndef BILLIARDS_SAMPLING_HPP
#define BILLIARDS_SAMPLING_HPP

#include <cstdint>
#include <random>

#include "billiards/intersect.hpp"

namespace billiards {

/// Seeded rejection sampler over the oriented-line phase space of a shape:
/// v uniform on S^{n-1}, Q uniform in the (n-1)-ball of radius q_radius
/// inside v-perp; lines through the vertex rejected.
class LineSampler {
public:
    LineSampler(const ConeShape& shape, std::uint64_t seed, double q_radius = 3.0);

    struct Sample {
        OrientedLine line;
        PhaseClass cls;
    };

    /// A raw candidate line, not yet classified.
    OrientedLine candidate();

    /// Next candidate classified inside Psi (rejection sampling).
    Sample next_in_psi();

    /// A line of Delta0: v on Gamma exactly (normalized section point),
    /// Q perpendicular with <n_v, Q> > 0.
    OrientedLine delta0_line();

    /// A direction in the open escape region D; shrink < 1 stays away from Gamma.
    Vec direction_in_d(double shrink = 0.99);

    /// A direction on Gamma (normalized section point).
    Vec direction_on_gamma();

    /// A line of the open part of psi+: v in D (shrunk), Q != O perpendicular.
    OrientedLine psi_plus_interior_line(double shrink = 0.99);

    double acceptance_rate() const {
        return proposals_ == 0 ? 0.0 : double(accepted_) / double(proposals_);
    }
    std::uint64_t proposals() const { return proposals_; }
    std::uint64_t accepted() const { return accepted_; }

    std::mt19937_64& rng() { return rng_; }

private:
    Vec unit_sphere_vector(int dim);
    Vec ball_vector_in_perp(const Vec& v, double radius);
    Vec random_section_parameter();

    const ConeShape* shape_;
    std::mt19937_64 rng_;
    double q_radius_;
    std::uint64_t proposals_ = 0;
    std::uint64_t accepted_ = 0;
};

} // namespace billiards

#endif
