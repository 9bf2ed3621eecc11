#pragma once

#include "pamp/rational.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace pamp
{

// One entry of a difference-bound matrix: x_i - x_j < value or <= value.
struct Bound
{
    Rational value;
    bool strict = false;
    bool infinite = false;

    static Bound inf() { return Bound{Rational{0}, false, true}; }
    static Bound le(const Rational& v) { return Bound{v, false, false}; }
    static Bound lt(const Rational& v) { return Bound{v, true, false}; }

    bool operator==(const Bound& o) const;
};

bool operator<(const Bound& a, const Bound& b);
inline bool operator<=(const Bound& a, const Bound& b) { return !(b < a); }
Bound operator+(const Bound& a, const Bound& b);
std::ostream& operator<<(std::ostream& os, const Bound& b);

/// Difference-bound matrix over variables 0..dim-1, where variable 0 is the
/// constant reference point 0. Kept canonical (shortest-path closed) after
/// every public mutation; an inconsistent system is flagged empty.
///
/// Used both for clock zones (variable i+1 is clock i) and for simple
/// temporal networks (variable i+1 is the time of event i).
class Dbm
{
public:
    explicit Dbm(std::size_t dim = 1);

    /// Every variable pinned to 0.
    static Dbm zero(std::size_t dim);
    /// Every variable >= 0, otherwise unconstrained.
    static Dbm nonnegative(std::size_t dim);

    [[nodiscard]] std::size_t dim() const { return _dim; }
    [[nodiscard]] bool empty() const { return _empty; }
    [[nodiscard]] const Bound& at(std::size_t i, std::size_t j) const { return _m[i * _dim + j]; }

    /// Tightens x_i - x_j by b and restores canonical form incrementally.
    /// Returns false (and marks the matrix empty) if the system becomes
    /// inconsistent.
    bool constrain(std::size_t i, std::size_t j, const Bound& b);

    /// Full Floyd-Warshall recomputation; returns !empty().
    bool close();

    /// Removes upper bounds of every variable (time elapse).
    void up();
    /// Pins variable x to 0.
    void reset(std::size_t x);
    /// Appends an unconstrained variable; returns its index.
    std::size_t add_variable();

    /// this ⊇ other.
    [[nodiscard]] bool includes(const Dbm& other) const;
    [[nodiscard]] bool contains_point(const std::vector<Rational>& values) const;

    /// A rational point of the set: variables are fixed one by one in index
    /// order to the midpoint of their currently feasible interval (lower
    /// bound when closed and unbounded above, lower bound + 1 when open and
    /// unbounded). values[0] == 0. Throws std::logic_error if empty.
    [[nodiscard]] std::vector<Rational> sample() const;

    bool operator==(const Dbm& o) const;

private:
    Bound& ref(std::size_t i, std::size_t j) { return _m[i * _dim + j]; }

    std::size_t _dim;
    std::vector<Bound> _m;
    bool _empty = false;
};

std::ostream& operator<<(std::ostream& os, const Dbm& d);

} // namespace pamp
