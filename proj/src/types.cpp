#include "hsk/types.hpp"

#include <cmath>

namespace hsk {

double distance(const Vec2& p, const Vec2& q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace hsk
