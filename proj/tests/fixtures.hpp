#pragma once

// Planes and ladders shared by the tests of one executable, built on first use.

#include <string>

#include "cycloid/plane.hpp"
#include "cycloid/spectrum.hpp"

namespace fixtures {

using namespace cycloid;

inline const PlaneField& plane(const std::string& s)
{
    if (s == "euclidean") { static const PlaneField f = build_plane({Euclidean{}, s}, 2048); return f; }
    if (s == "lp:3") { static const PlaneField f = build_plane({LpBall{3.0}, s}, 2048); return f; }
    if (s == "lp:4") { static const PlaneField f = build_plane({LpBall{4.0}, s}, 2048); return f; }
    if (s == "ellipse") { static const PlaneField f = build_plane({Ellipse{2.0, 1.0}, s}, 2048); return f; }
    static const PlaneField f = build_plane({FourierSupport{1.0, {{2, 0.1, 0.0}, {4, 0.0, 0.02}}}, "fourier"}, 2048);
    return f;
}

/// k_max = 8 for the Euclidean plane, 7 elsewhere.
inline const Ladder& ladder(const std::string& s)
{
    if (s == "euclidean") { static const Ladder l = find_ladder(plane(s), 8); return l; }
    if (s == "lp:3") { static const Ladder l = find_ladder(plane(s), 7); return l; }
    if (s == "lp:4") { static const Ladder l = find_ladder(plane(s), 7); return l; }
    if (s == "ellipse") { static const Ladder l = find_ladder(plane(s), 7); return l; }
    static const Ladder l = find_ladder(plane("fourier"), 7);
    return l;
}

inline constexpr const char* all_planes[] = {"euclidean", "lp:3", "lp:4", "ellipse", "fourier"};

} // namespace fixtures
