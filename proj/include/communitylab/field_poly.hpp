#pragma once

// Prime-field arithmetic and the low-degree encodings built on it: univariate
// Lagrange interpolation, bivariate extension of a grid function to a table
// of bounded individual degree, and restriction of such a table to a line.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "communitylab/error.hpp"

namespace communitylab {

struct FieldElem {
    std::uint32_t value = 0;

    friend auto operator<=>(const FieldElem&, const FieldElem&) = default;
};

enum class FieldOp { add, sub, mul, inv, div };

class PrimeField {
public:
    explicit PrimeField(std::uint32_t p) : p_(p) {
        if (!is_prime(p)) throw ParameterError("field modulus " + std::to_string(p) + " is not prime");
        if (p > (1u << 16)) throw ParameterError("field modulus too large (max 65536)");
    }

    static bool is_prime(std::uint32_t n) {
        if (n < 2) return false;
        for (std::uint32_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

    std::uint32_t modulus() const noexcept { return p_; }
    std::uint32_t size() const noexcept { return p_; }

    FieldElem elem(std::int64_t v) const noexcept {
        std::int64_t r = v % static_cast<std::int64_t>(p_);
        if (r < 0) r += p_;
        return FieldElem{static_cast<std::uint32_t>(r)};
    }

    bool contains(FieldElem a) const noexcept { return a.value < p_; }

    FieldElem add(FieldElem a, FieldElem b) const noexcept {
        std::uint32_t s = a.value + b.value;
        return FieldElem{s >= p_ ? s - p_ : s};
    }
    FieldElem sub(FieldElem a, FieldElem b) const noexcept {
        return FieldElem{a.value >= b.value ? a.value - b.value : a.value + p_ - b.value};
    }
    FieldElem neg(FieldElem a) const noexcept { return FieldElem{a.value == 0 ? 0 : p_ - a.value}; }
    FieldElem mul(FieldElem a, FieldElem b) const noexcept {
        return FieldElem{static_cast<std::uint32_t>((static_cast<std::uint64_t>(a.value) * b.value) % p_)};
    }
    FieldElem inv(FieldElem a) const {
        if (a.value == 0) throw Error("inverse of zero in GF(" + std::to_string(p_) + ")");
        // extended Euclid
        std::int64_t t = 0, new_t = 1, r = p_, new_r = a.value;
        while (new_r != 0) {
            std::int64_t q = r / new_r;
            t = std::exchange(new_t, t - q * new_t);
            r = std::exchange(new_r, r - q * new_r);
        }
        return elem(t);
    }
    FieldElem div(FieldElem a, FieldElem b) const {
        if (b.value == 0) throw Error("division by zero in GF(" + std::to_string(p_) + ")");
        return mul(a, inv(b));
    }
    FieldElem pow(FieldElem a, std::uint64_t e) const noexcept {
        FieldElem result{1 % p_};
        while (e) {
            if (e & 1) result = mul(result, a);
            a = mul(a, a);
            e >>= 1;
        }
        return result;
    }

    std::vector<FieldElem> elements() const {
        std::vector<FieldElem> out(p_);
        for (std::uint32_t i = 0; i < p_; ++i) out[i] = FieldElem{i};
        return out;
    }

    friend bool operator==(const PrimeField&, const PrimeField&) = default;

private:
    std::uint32_t p_;
};

inline FieldElem field_arith(const PrimeField& f, FieldElem a, FieldElem b, FieldOp op) {
    switch (op) {
    case FieldOp::add: return f.add(a, b);
    case FieldOp::sub: return f.sub(a, b);
    case FieldOp::mul: return f.mul(a, b);
    case FieldOp::inv: return f.inv(a);
    case FieldOp::div: return f.div(a, b);
    }
    throw Error("unknown field operation");
}

/// Polynomial of degree at most degree_bound, stored as degree_bound+1
/// coefficients in ascending order (the top ones may be zero).
class UniPoly {
public:
    UniPoly() : coeffs_(1) {}

    UniPoly(std::vector<FieldElem> coeffs, std::size_t degree_bound) : coeffs_(std::move(coeffs)) {
        if (coeffs_.size() > degree_bound + 1) {
            for (std::size_t i = degree_bound + 1; i < coeffs_.size(); ++i)
                if (coeffs_[i].value != 0)
                    throw ParameterError("polynomial exceeds degree bound " + std::to_string(degree_bound));
        }
        coeffs_.resize(degree_bound + 1);
    }

    static UniPoly constant(FieldElem c, std::size_t degree_bound = 0) {
        return UniPoly(std::vector<FieldElem>{c}, degree_bound);
    }

    std::span<const FieldElem> coefficients() const noexcept { return coeffs_; }
    std::size_t degree_bound() const noexcept { return coeffs_.size() - 1; }

    /// Actual degree; -1 for the zero polynomial.
    int degree() const noexcept {
        for (std::size_t i = coeffs_.size(); i-- > 0;)
            if (coeffs_[i].value != 0) return static_cast<int>(i);
        return -1;
    }

    FieldElem evaluate(const PrimeField& f, FieldElem x) const noexcept {
        FieldElem acc{0};
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = f.add(f.mul(acc, x), coeffs_[i]);
        return acc;
    }

    /// Values at 0, 1, ..., p-1.
    std::vector<FieldElem> values(const PrimeField& f) const {
        std::vector<FieldElem> out(f.size());
        for (std::uint32_t x = 0; x < f.size(); ++x) out[x] = evaluate(f, FieldElem{x});
        return out;
    }

    /// Equal as functions of the coefficient sequence, ignoring trailing zeros.
    friend bool operator==(const UniPoly& a, const UniPoly& b) noexcept {
        const std::size_t n = std::max(a.coeffs_.size(), b.coeffs_.size());
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t ca = i < a.coeffs_.size() ? a.coeffs_[i].value : 0;
            const std::uint32_t cb = i < b.coeffs_.size() ? b.coeffs_[i].value : 0;
            if (ca != cb) return false;
        }
        return true;
    }

    /// Ascending coefficient list as plain integers (the serialized form).
    std::vector<std::uint32_t> coefficient_values() const {
        std::vector<std::uint32_t> out;
        out.reserve(coeffs_.size());
        for (auto c : coeffs_) out.push_back(c.value);
        return out;
    }

private:
    std::vector<FieldElem> coeffs_;
};

/// Number of polynomials of degree <= bound over f.
inline std::uint64_t poly_count(const PrimeField& f, std::size_t bound) {
    std::uint64_t n = 1;
    for (std::size_t i = 0; i <= bound; ++i) n *= f.size();
    return n;
}

/// The index-th polynomial of degree <= bound; coefficient i is digit i in base p.
inline UniPoly poly_from_index(const PrimeField& f, std::size_t bound, std::uint64_t index) {
    std::vector<FieldElem> c(bound + 1);
    for (std::size_t i = 0; i <= bound; ++i) {
        c[i] = FieldElem{static_cast<std::uint32_t>(index % f.size())};
        index /= f.size();
    }
    return UniPoly(std::move(c), bound);
}

inline std::uint64_t poly_index(const PrimeField& f, const UniPoly& q) {
    std::uint64_t idx = 0;
    auto c = q.coefficients();
    for (std::size_t i = c.size(); i-- > 0;) idx = idx * f.size() + c[i].value;
    return idx;
}

/// Lagrange interpolation through the given points; the result has degree
/// bound |points|-1.
inline UniPoly interpolate(const PrimeField& f, std::span<const std::pair<FieldElem, FieldElem>> points) {
    const std::size_t k = points.size();
    if (k > f.size()) throw ParameterError("more interpolation points than field elements");
    if (k == 0) return UniPoly();
    for (std::size_t i = 0; i < k; ++i) {
        if (!f.contains(points[i].first) || !f.contains(points[i].second))
            throw ParameterError("interpolation point outside the field");
        for (std::size_t j = 0; j < i; ++j)
            if (points[i].first == points[j].first)
                throw ParameterError("duplicate x-coordinate " + std::to_string(points[i].first.value) +
                                     " in interpolation");
    }

    // master(x) = prod (x - x_j), degree k
    std::vector<FieldElem> master(k + 1);
    master[0] = FieldElem{1};
    for (std::size_t j = 0; j < k; ++j) {
        const FieldElem neg_x = f.neg(points[j].first);
        for (std::size_t d = j + 1; d-- > 0;) {
            master[d + 1] = f.add(master[d + 1], master[d]);
            master[d] = f.mul(master[d], neg_x);
        }
    }

    std::vector<FieldElem> result(k);
    std::vector<FieldElem> basis(k);
    for (std::size_t i = 0; i < k; ++i) {
        const FieldElem xi = points[i].first;
        // basis = master / (x - xi), synthetic division from the top
        FieldElem carry{0};
        for (std::size_t d = k; d-- > 0;) {
            carry = f.add(master[d + 1], f.mul(carry, xi));
            basis[d] = carry;
        }
        FieldElem denom{1};
        for (std::size_t j = 0; j < k; ++j)
            if (j != i) denom = f.mul(denom, f.sub(xi, points[j].first));
        const FieldElem scale = f.div(points[i].second, denom);
        for (std::size_t d = 0; d < k; ++d) result[d] = f.add(result[d], f.mul(basis[d], scale));
    }
    return UniPoly(std::move(result), k - 1);
}

inline UniPoly interpolate(const PrimeField& f, const std::vector<std::pair<FieldElem, FieldElem>>& points) {
    return interpolate(f, std::span<const std::pair<FieldElem, FieldElem>>(points));
}

/// Interpolate at xs/ys and reinterpret with a (possibly larger) degree bound.
inline UniPoly interpolate_values(const PrimeField& f, std::span<const FieldElem> xs, std::span<const FieldElem> ys,
                                  std::size_t degree_bound) {
    std::vector<std::pair<FieldElem, FieldElem>> pts;
    pts.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(xs[i], ys[i]);
    UniPoly q = interpolate(f, std::span<const std::pair<FieldElem, FieldElem>>(pts));
    return UniPoly(std::vector<FieldElem>(q.coefficients().begin(), q.coefficients().end()), degree_bound);
}

enum class Axis {
    row, ///< the line {g} x G: first coordinate fixed
    col  ///< the line G x {g}: second coordinate fixed
};

/// Full p x p table of a bivariate function with individual degree <= bound.
class BiPolyTable {
public:
    BiPolyTable(PrimeField f, std::size_t individual_degree_bound)
        : field_(f), bound_(individual_degree_bound), values_(static_cast<std::size_t>(f.size()) * f.size()) {}

    const PrimeField& field() const noexcept { return field_; }
    std::size_t individual_degree_bound() const noexcept { return bound_; }

    FieldElem at(FieldElem x, FieldElem y) const noexcept { return values_[index(x, y)]; }
    void set(FieldElem x, FieldElem y, FieldElem v) noexcept { values_[index(x, y)] = v; }

    /// Every row and column agrees with the interpolant of its first bound+1 points.
    bool is_low_degree() const {
        const std::uint32_t p = field_.size();
        if (bound_ + 1 >= p) return true;
        std::vector<FieldElem> xs(bound_ + 1), ys(bound_ + 1);
        for (std::uint32_t i = 0; i <= bound_; ++i) xs[i] = FieldElem{i};
        for (int axis = 0; axis < 2; ++axis) {
            for (std::uint32_t g = 0; g < p; ++g) {
                auto value = [&](std::uint32_t j) {
                    return axis == 0 ? at(FieldElem{g}, FieldElem{j}) : at(FieldElem{j}, FieldElem{g});
                };
                for (std::uint32_t i = 0; i <= bound_; ++i) ys[i] = value(i);
                UniPoly q = interpolate_values(field_, xs, ys, bound_);
                for (std::uint32_t j = 0; j < p; ++j)
                    if (q.evaluate(field_, FieldElem{j}) != value(j)) return false;
            }
        }
        return true;
    }

    friend bool operator==(const BiPolyTable&, const BiPolyTable&) = default;

private:
    std::size_t index(FieldElem x, FieldElem y) const noexcept {
        return static_cast<std::size_t>(x.value) * field_.size() + y.value;
    }

    PrimeField field_;
    std::size_t bound_;
    std::vector<FieldElem> values_;
};

using GridPoint = std::pair<FieldElem, FieldElem>;

/// Extend a function on the grid F x F (points missing from `partial` take
/// `fill`) to the unique table over G^2 with individual degree <= |F|-1.
inline BiPolyTable low_degree_extend(const PrimeField& f, std::span<const FieldElem> grid,
                                     const std::map<GridPoint, FieldElem>& partial, FieldElem fill) {
    const std::size_t k = grid.size();
    if (k == 0) throw ParameterError("low-degree extension over an empty grid");
    if (k > f.size()) throw ParameterError("grid larger than the field");
    for (std::size_t i = 0; i < k; ++i) {
        if (!f.contains(grid[i])) throw ParameterError("grid point outside the field");
        for (std::size_t j = 0; j < i; ++j)
            if (grid[i] == grid[j]) throw ParameterError("grid has duplicate elements");
    }
    auto in_grid = [&](FieldElem e) {
        for (auto g : grid)
            if (g == e) return true;
        return false;
    };
    for (const auto& [pt, v] : partial) {
        if (!in_grid(pt.first) || !in_grid(pt.second)) throw ParameterError("partial assignment outside F x F");
        if (!f.contains(v)) throw ParameterError("partial value outside the field");
    }

    const std::size_t bound = k - 1;
    const std::uint32_t p = f.size();
    BiPolyTable table(f, bound);

    // columns: for each grid y, extend x -> value from grid x's to all x
    std::vector<std::vector<FieldElem>> column_values(k, std::vector<FieldElem>(p));
    std::vector<FieldElem> ys(k);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
            auto it = partial.find({grid[i], grid[j]});
            ys[i] = it == partial.end() ? fill : it->second;
        }
        UniPoly q = interpolate_values(f, grid, ys, bound);
        column_values[j] = q.values(f);
    }
    // rows: for each x, extend y -> value from grid y's
    for (std::uint32_t x = 0; x < p; ++x) {
        for (std::size_t j = 0; j < k; ++j) ys[j] = column_values[j][x];
        UniPoly q = interpolate_values(f, grid, ys, bound);
        for (std::uint32_t y = 0; y < p; ++y) table.set(FieldElem{x}, FieldElem{y}, q.evaluate(f, FieldElem{y}));
    }
    return table;
}

/// Restriction of the table to a row ({g} x G, as a polynomial in y) or a
/// column (G x {g}, as a polynomial in x).
inline UniPoly restrict_line(const BiPolyTable& table, Axis axis, FieldElem g) {
    const PrimeField& f = table.field();
    const std::size_t bound = table.individual_degree_bound();
    const std::size_t k = std::min<std::size_t>(bound + 1, f.size());
    std::vector<FieldElem> xs(k), ys(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        xs[i] = FieldElem{i};
        ys[i] = axis == Axis::row ? table.at(g, xs[i]) : table.at(xs[i], g);
    }
    return interpolate_values(f, xs, ys, bound);
}

inline std::size_t agreement_count(const PrimeField& f, const UniPoly& q1, const UniPoly& q2) {
    std::size_t n = 0;
    for (std::uint32_t x = 0; x < f.size(); ++x)
        if (q1.evaluate(f, FieldElem{x}) == q2.evaluate(f, FieldElem{x})) ++n;
    return n;
}

} // namespace communitylab
