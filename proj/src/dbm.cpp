#include "pamp/dbm.hpp"

#include <ostream>
#include <stdexcept>

namespace pamp
{

bool Bound::operator==(const Bound& o) const
{
    if (infinite || o.infinite)
        return infinite == o.infinite;
    return value == o.value && strict == o.strict;
}

bool operator<(const Bound& a, const Bound& b)
{
    if (a.infinite)
        return false;
    if (b.infinite)
        return true;
    if (a.value != b.value)
        return a.value < b.value;
    return a.strict && !b.strict;
}

Bound operator+(const Bound& a, const Bound& b)
{
    if (a.infinite || b.infinite)
        return Bound::inf();
    return Bound{a.value + b.value, a.strict || b.strict, false};
}

std::ostream& operator<<(std::ostream& os, const Bound& b)
{
    if (b.infinite)
        return os << "inf";
    return os << (b.strict ? "<" : "<=") << to_display_string(b.value);
}

namespace
{

const Bound& zero_le()
{
    static const Bound b = Bound::le(Rational{0});
    return b;
}

bool negative(const Bound& b) { return b < zero_le(); }

} // namespace

Dbm::Dbm(std::size_t dim) : _dim(dim), _m(dim * dim, Bound::inf())
{
    for (std::size_t i = 0; i < dim; ++i)
        ref(i, i) = Bound::le(Rational{0});
}

Dbm Dbm::zero(std::size_t dim)
{
    Dbm d(dim);
    for (auto& b : d._m)
        b = Bound::le(Rational{0});
    return d;
}

Dbm Dbm::nonnegative(std::size_t dim)
{
    Dbm d(dim);
    for (std::size_t i = 1; i < dim; ++i)
        d.ref(0, i) = Bound::le(Rational{0});
    return d;
}

bool Dbm::constrain(std::size_t i, std::size_t j, const Bound& b)
{
    if (i >= _dim || j >= _dim)
        throw std::out_of_range("dbm index out of range");
    if (_empty)
        return false;
    if (b.infinite || !(b < at(i, j)))
        return true;
    if (negative(at(j, i) + b)) {
        _empty = true;
        return false;
    }
    ref(i, j) = b;
    // Every shortest path improved by the new edge goes through i -> j.
    std::vector<Bound> to_i(_dim), from_j(_dim);
    for (std::size_t a = 0; a < _dim; ++a) {
        to_i[a] = at(a, i);
        from_j[a] = at(j, a);
    }
    for (std::size_t a = 0; a < _dim; ++a) {
        if (to_i[a].infinite)
            continue;
        Bound via = to_i[a] + b;
        for (std::size_t c = 0; c < _dim; ++c) {
            if (from_j[c].infinite)
                continue;
            Bound cand = via + from_j[c];
            if (cand < at(a, c))
                ref(a, c) = cand;
        }
    }
    for (std::size_t a = 0; a < _dim; ++a)
        if (negative(at(a, a))) {
            _empty = true;
            return false;
        }
    return true;
}

bool Dbm::close()
{
    if (_empty)
        return false;
    for (std::size_t k = 0; k < _dim; ++k)
        for (std::size_t i = 0; i < _dim; ++i) {
            if (at(i, k).infinite)
                continue;
            for (std::size_t j = 0; j < _dim; ++j) {
                Bound cand = at(i, k) + at(k, j);
                if (cand < at(i, j))
                    ref(i, j) = cand;
            }
        }
    for (std::size_t i = 0; i < _dim; ++i)
        if (negative(at(i, i))) {
            _empty = true;
            return false;
        }
    return true;
}

void Dbm::up()
{
    if (_empty)
        return;
    for (std::size_t i = 1; i < _dim; ++i)
        ref(i, 0) = Bound::inf();
}

void Dbm::reset(std::size_t x)
{
    if (_empty || x == 0)
        return;
    for (std::size_t j = 0; j < _dim; ++j) {
        if (j == x)
            continue;
        ref(x, j) = at(0, j);
        ref(j, x) = at(j, 0);
    }
    ref(x, x) = Bound::le(Rational{0});
}

std::size_t Dbm::add_variable()
{
    std::size_t n = _dim + 1;
    std::vector<Bound> m(n * n, Bound::inf());
    for (std::size_t i = 0; i < _dim; ++i)
        for (std::size_t j = 0; j < _dim; ++j)
            m[i * n + j] = at(i, j);
    m[_dim * n + _dim] = Bound::le(Rational{0});
    _m = std::move(m);
    _dim = n;
    return _dim - 1;
}

bool Dbm::includes(const Dbm& other) const
{
    if (other._empty)
        return true;
    if (_empty || other._dim != _dim)
        return false;
    for (std::size_t k = 0; k < _m.size(); ++k)
        if (_m[k] < other._m[k])
            return false;
    return true;
}

bool Dbm::contains_point(const std::vector<Rational>& values) const
{
    if (_empty || values.size() != _dim)
        return false;
    for (std::size_t i = 0; i < _dim; ++i)
        for (std::size_t j = 0; j < _dim; ++j) {
            const Bound& b = at(i, j);
            if (b.infinite)
                continue;
            Rational diff = values[i] - values[j];
            if (b.strict ? !(diff < b.value) : !(diff <= b.value))
                return false;
        }
    return true;
}

std::vector<Rational> Dbm::sample() const
{
    if (_empty)
        throw std::logic_error("cannot sample an empty difference-bound matrix");
    Dbm work = *this;
    std::vector<Rational> values(_dim, Rational{0});
    for (std::size_t i = 1; i < _dim; ++i) {
        const Bound& lower = work.at(0, i); // 0 - x_i <= -lo
        const Bound& upper = work.at(i, 0); // x_i - 0 <= hi
        Rational lo = lower.infinite ? Rational{0} : Rational{-lower.value};
        Rational v;
        if (upper.infinite) {
            if (lower.infinite)
                v = 0;
            else
                v = lower.strict ? Rational{lo + 1} : lo;
        } else if (lower.infinite) {
            v = upper.value - 1;
        } else if (lo == upper.value) {
            v = lo;
        } else {
            v = midpoint(lo, upper.value);
        }
        v.canonicalize();
        values[i] = v;
        work.constrain(i, 0, Bound::le(v));
        work.constrain(0, i, Bound::le(-v));
        if (work.empty())
            throw std::logic_error("difference-bound matrix sampling reached an empty set");
    }
    return values;
}

bool Dbm::operator==(const Dbm& o) const
{
    if (_empty || o._empty)
        return _empty == o._empty;
    return _dim == o._dim && _m == o._m;
}

std::ostream& operator<<(std::ostream& os, const Dbm& d)
{
    if (d.empty())
        return os << "[empty]";
    os << "[";
    for (std::size_t i = 0; i < d.dim(); ++i) {
        if (i)
            os << "; ";
        for (std::size_t j = 0; j < d.dim(); ++j)
            os << (j ? " " : "") << d.at(i, j);
    }
    return os << "]";
}

} // namespace pamp
