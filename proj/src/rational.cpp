#include "pamp/rational.hpp"

#include <cctype>

namespace pamp
{

std::string to_fraction_string(const Rational& q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_display_string(const Rational& q)
{
    if (q.get_den() == 1)
        return q.get_num().get_str();
    return q.get_str();
}

namespace
{

bool is_integer_literal(std::string_view s)
{
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+'))
        ++i;
    if (i == s.size())
        return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            return false;
    return true;
}

std::string strip_plus(std::string_view s)
{
    if (!s.empty() && s[0] == '+')
        s.remove_prefix(1);
    return std::string{s};
}

} // namespace

std::optional<Rational> parse_rational(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (text.empty())
        return std::nullopt;

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = text.substr(0, slash);
        auto den = text.substr(slash + 1);
        if (!is_integer_literal(num) || !is_integer_literal(den))
            return std::nullopt;
        mpz_class n{strip_plus(num), 10};
        mpz_class d{strip_plus(den), 10};
        if (d == 0)
            return std::nullopt;
        Rational q{n, d};
        q.canonicalize();
        return q;
    }

    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto whole = text.substr(0, dot);
        auto frac = text.substr(dot + 1);
        bool negative = !whole.empty() && whole[0] == '-';
        if (!whole.empty() && (whole[0] == '-' || whole[0] == '+'))
            whole.remove_prefix(1);
        if (whole.empty() && frac.empty())
            return std::nullopt;
        for (char c : whole)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                return std::nullopt;
        for (char c : frac)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                return std::nullopt;
        mpz_class scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i)
            scale *= 10;
        std::string digits = std::string{whole} + std::string{frac};
        if (digits.empty())
            digits = "0";
        Rational q{mpz_class{digits, 10}, scale};
        q.canonicalize();
        if (negative)
            q = -q;
        return q;
    }

    if (!is_integer_literal(text))
        return std::nullopt;
    return Rational{mpz_class{strip_plus(text), 10}};
}

Rational midpoint(const Rational& a, const Rational& b)
{
    Rational m = (a + b) / 2;
    m.canonicalize();
    return m;
}

} // namespace pamp
