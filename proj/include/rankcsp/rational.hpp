#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rankcsp/error.hpp"

namespace rankcsp {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Largest integer not above r.
inline std::int64_t floor(const Rational& r) {
    std::int64_t q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
    return q;
}

/// Accepts "a/b", integers and plain decimals ("0.05" -> 1/20).
inline Rational parse_rational(std::string_view text) {
    auto bad = [&] { return InvalidArgument("not a rational number: '" + std::string(text) + "'"); };
    if (text.empty()) throw bad();
    auto parse_int = [&](std::string_view s) -> std::int64_t {
        if (s.empty()) throw bad();
        std::size_t i = 0;
        bool neg = false;
        if (s[0] == '-' || s[0] == '+') {
            neg = s[0] == '-';
            i = 1;
        }
        if (i == s.size()) throw bad();
        std::int64_t v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw bad();
            v = v * 10 + (s[i] - '0');
            if (v > (std::int64_t{1} << 50)) throw bad();
        }
        return neg ? -v : v;
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::int64_t den = parse_int(text.substr(slash + 1));
        if (den == 0) throw bad();
        return Rational(parse_int(text.substr(0, slash)), den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if (frac.size() > 12) throw bad();
        bool neg = !whole.empty() && whole[0] == '-';
        std::int64_t w = (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole);
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        std::int64_t f = frac.empty() ? 0 : parse_int(frac);
        if (!frac.empty() && (frac[0] == '-' || frac[0] == '+')) throw bad();
        Rational r(w < 0 ? -w : w);
        r += Rational(f, scale);
        return neg ? -r : r;
    }
    return Rational(parse_int(text));
}

/// Pascal-triangle binomial table; entries are exact for every (n, r) the
/// library ever asks for (n <= 1000, r <= 8 stays well inside 64 bits).
class BinomialTable {
public:
    BinomialTable(int max_n, int max_r) : max_n_(max_n), max_r_(max_r),
        table_(static_cast<std::size_t>((max_n + 1) * (max_r + 1)), 0) {
        for (int n = 0; n <= max_n; ++n) {
            at(n, 0) = 1;
            for (int r = 1; r <= max_r && r <= n; ++r)
                at(n, r) = at(n - 1, r - 1) + (r <= n - 1 ? at(n - 1, r) : 0);
        }
    }

    std::uint64_t operator()(int n, int r) const {
        if (n < 0 || r < 0 || r > n) return 0;
        return table_[static_cast<std::size_t>(n * (max_r_ + 1) + r)];
    }

    int max_n() const { return max_n_; }

private:
    std::uint64_t& at(int n, int r) { return table_[static_cast<std::size_t>(n * (max_r_ + 1) + r)]; }

    int max_n_;
    int max_r_;
    std::vector<std::uint64_t> table_;
};

inline std::int64_t binomial(std::int64_t n, std::int64_t r) {
    if (r < 0 || n < 0 || r > n) return 0;
    if (r > n - r) r = n - r;
    std::int64_t result = 1;
    for (std::int64_t i = 1; i <= r; ++i) result = result * (n - r + i) / i;
    return result;
}

inline std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t result = 1;
    while (exp-- > 0) result *= base;
    return result;
}

} // namespace rankcsp
