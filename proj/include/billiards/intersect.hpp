#ifndef BILLIARDS_INTERSECT_HPP
#define BILLIARDS_INTERSECT_HPP

#include <limits>
#include <optional>
#include <string>

#include "billiards/cone_shape.hpp"
#include "billiards/types.hpp"

namespace billiards {

/// A transversal intersection of a line with the cone K.
struct SurfaceHit {
    double t = 0.0;
    Vec point;
    Vec normal;              // inward unit normal at point
    double incidence = 0.0;  // <v, normal>; > 0 entering, < 0 exiting
};

/// The open interval { t : Q + t v inside conv(K) } with its finite endpoints
/// resolved to surface hits. Convexity makes it a single interval.
struct IntervalRecord {
    bool empty = true;
    double t_enter = -std::numeric_limits<double>::infinity();
    double t_exit = std::numeric_limits<double>::infinity();
    std::optional<SurfaceHit> enter_hit;
    std::optional<SurfaceHit> exit_hit;

    int hit_count() const { return (enter_hit ? 1 : 0) + (exit_hit ? 1 : 0); }
};

/// Closed-form quadratic solution; ellipsoid sections only.
IntervalRecord intersect_closed_form(const ConeShape& shape, const OrientedLine& line);

/// Generic bracketing solver on the interiority indicator; any section.
IntervalRecord intersect_generic(const ConeShape& shape, const OrientedLine& line);

/// Dispatch: closed form for ellipsoid sections, bracketing otherwise.
/// Throws TangentLine when an endpoint fails the transversality threshold.
IntervalRecord intersect(const ConeShape& shape, const OrientedLine& line);

enum class PhaseTag { PsiMinus, Psi, PsiPlus, Delta0, Delta1, NotInPhaseSpace };

const char* phase_tag_name(PhaseTag tag);

struct PhaseClass {
    PhaseTag tag = PhaseTag::NotInPhaseSpace;
    std::string reason;  // set for NotInPhaseSpace

    bool in_psi() const {
        return tag == PhaseTag::PsiMinus || tag == PhaseTag::Psi || tag == PhaseTag::PsiPlus;
    }
};

/// Places an oriented line in the decomposition of the phase space.
/// Absorbs TangentLine into NotInPhaseSpace; never throws for valid input lines.
PhaseClass classify(const ConeShape& shape, const OrientedLine& line);

} // namespace billiards

#endif
