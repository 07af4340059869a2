#pragma once

#include <functional>
#include <vector>

namespace rfde {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Rule of the given order (= node count), computed once and cached.
/// Exact for polynomials of degree <= 2*order - 1.
const GaussRule& gauss_legendre(int order);

/// Integrate fn over [a, b] with a composite Gauss rule: the interval is cut
/// at the interior points of `splits` and each cell gets `order` nodes.
/// Values are accumulated through the templated accumulator so the same
/// driver serves scalars and matrices.
template <typename F, typename Acc>
void gauss_composite(F&& fn, double a, double b, const std::vector<double>& splits, int order,
                     Acc&& accumulate) {
    if (!(b > a)) return;
    const GaussRule& rule = gauss_legendre(order);
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double s : splits)
        if (s > a && s < b) cuts.push_back(s);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (hi - lo < 1e-15) continue;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int k = 0; k < order; ++k)
            accumulate(half * rule.weights[k], fn(mid + half * rule.nodes[k]));
    }
}

/// Scalar convenience wrapper around gauss_composite.
double gauss_integrate(const std::function<double(double)>& fn, double a, double b,
                       const std::vector<double>& splits = {}, int order = 8);

}  // namespace rfde
