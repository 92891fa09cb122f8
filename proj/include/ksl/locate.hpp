#pragma once

namespace ksl {

// Positions within this many cell widths of a node snap onto it, so aligned shifts stay exact.
constexpr double locate_tol = 1e-9;

// Locates u (in units of cells from the first node) on an axis of `count` nodes.
// Returns false outside [0, count-1]; otherwise sets cell i and fraction s in [0, 1].
inline bool locate(double u, int count, int& i, double& s) {
    const double top = count - 1;
    if (u < -locate_tol || u > top + locate_tol) return false;
    if (u <= 0) {
        i = 0;
        s = 0;
        return true;
    }
    if (u >= top) {
        i = count - 2;
        s = 1;
        return true;
    }
    i = static_cast<int>(u);
    s = u - i;
    if (s < locate_tol) {
        s = 0;
    } else if (s > 1 - locate_tol) {
        s = 0;
        ++i;
    }
    if (i == count - 1) {
        i = count - 2;
        s = 1;
    }
    return true;
}

}  // namespace ksl
