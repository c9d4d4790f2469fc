#pragma once

// Tiny exact rational on __int128, enough for detailed-balance identities on
// enumerable boxes with rational (p, q).

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace rclab::testing {

struct Rat {
    __int128 num = 0;
    __int128 den = 1;

    Rat() = default;
    Rat(long long n) : num(n), den(1) {}
    Rat(long long n, long long d) : num(n), den(d) { reduce(); }

    void reduce() {
        if (den == 0) throw std::runtime_error("rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        __int128 a = num < 0 ? -num : num, b = den;
        while (b) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            num /= a;
            den /= a;
        }
    }

    friend Rat operator*(Rat a, Rat b) {
        Rat r;
        r.num = a.num * b.num;
        r.den = a.den * b.den;
        r.reduce();
        return r;
    }
    friend Rat operator/(Rat a, Rat b) {
        Rat r;
        r.num = a.num * b.den;
        r.den = a.den * b.num;
        r.reduce();
        return r;
    }
    friend Rat operator+(Rat a, Rat b) {
        Rat r;
        r.num = a.num * b.den + b.num * a.den;
        r.den = a.den * b.den;
        r.reduce();
        return r;
    }
    friend Rat operator-(Rat a, Rat b) { return a + Rat(-1) * b; }
    friend bool operator==(Rat a, Rat b) { return a.num * b.den == b.num * a.den; }

    Rat pow(int k) const {
        Rat r(1);
        Rat base = *this;
        for (int i = 0; i < k; ++i) r = r * base;
        return r;
    }
};

} // namespace rclab::testing
