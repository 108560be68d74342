#pragma once

#include <cmath>
#include <vector>

namespace wavekin {

/// Exact running sum held as non-overlapping partials (Shewchuk). value()
/// returns the correctly rounded total, independent of insertion order.
class ExactSum {
public:
    void add(double x)
    {
        std::size_t used = 0;
        for (double y : partials_) {
            if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials_[used++] = lo;
            x = hi;
        }
        partials_.resize(used);
        partials_.push_back(x);
    }

    double value() const
    {
        if (partials_.empty()) return 0.0;
        auto i = partials_.size() - 1;
        double hi = partials_[i];
        double lo = 0.0;
        while (i > 0) {
            const double x = hi;
            const double y = partials_[--i];
            hi = x + y;
            const double yr = hi - x;
            lo = y - yr;
            if (lo != 0.0) break;
        }
        // Half-way cases need the sign of the next partial to round correctly.
        if (i > 0 && ((lo < 0.0 && partials_[i - 1] < 0.0) || (lo > 0.0 && partials_[i - 1] > 0.0))) {
            const double y = lo * 2.0;
            const double x = hi + y;
            if (y == x - hi) hi = x;
        }
        return hi;
    }

private:
    std::vector<double> partials_;
};

}  // namespace wavekin
