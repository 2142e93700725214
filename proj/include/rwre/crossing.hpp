#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace rwre {

enum class CrossingSign { positive, negative };

/// A crossing (i1, i2) of (w1, w2): S(i1) = w1, S(i2) = w2 and no index strictly
/// between them hits either endpoint. Positive when i1 < i2.
template <class Point>
struct CrossingRecord {
    std::size_t i1 = 0;
    std::size_t i2 = 0;
    Point w1{};
    Point w2{};
    CrossingSign sign = CrossingSign::positive;
    bool straight = false;
    bool confined = true;

    std::size_t length() const { return i1 < i2 ? i2 - i1 : i1 - i2; }
};

/// All crossings of (w1, w2) by `path`, in order of their later index.
///
/// `distance(w1, w2)` is the path distance in the state space; `inside(p)`
/// decides confinement of interior points.
template <class Point, class Distance, class Inside>
std::vector<CrossingRecord<Point>> find_crossings(std::span<const Point> path, Point w1, Point w2,
                                                  Distance&& distance, Inside&& inside) {
    std::vector<CrossingRecord<Point>> out;
    if (w1 == w2) return out;
    const std::size_t dist = distance(w1, w2);

    std::optional<std::size_t> last_hit;
    bool last_was_w1 = false;
    bool confined = true;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const Point& p = path[i];
        const bool hit1 = p == w1;
        const bool hit2 = p == w2;
        if (!hit1 && !hit2) {
            if (last_hit && !inside(p)) confined = false;
            continue;
        }
        if (last_hit && last_was_w1 != hit1) {
            CrossingRecord<Point> c;
            c.w1 = w1;
            c.w2 = w2;
            c.i1 = hit1 ? i : *last_hit;
            c.i2 = hit1 ? *last_hit : i;
            c.sign = c.i1 < c.i2 ? CrossingSign::positive : CrossingSign::negative;
            c.straight = c.length() == dist;
            c.confined = confined;
            out.push_back(c);
        }
        last_hit = i;
        last_was_w1 = hit1;
        confined = true;
    }
    return out;
}

template <class Point, class Distance>
std::vector<CrossingRecord<Point>> find_crossings(std::span<const Point> path, Point w1, Point w2,
                                                  Distance&& distance) {
    return find_crossings(path, w1, w2, std::forward<Distance>(distance), [](const Point&) { return true; });
}

} // namespace rwre
