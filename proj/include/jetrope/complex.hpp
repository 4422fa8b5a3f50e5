#pragma once

#include <cmath>

namespace jetrope {

// Complex number kept as an explicit (re, im) pair so every product and sum
// follows the same operation order on every platform.
struct Complex {
    double re = 0.0;
    double im = 0.0;

    constexpr Complex() = default;
    constexpr Complex(double real, double imag = 0.0) : re(real), im(imag) {}

    constexpr Complex& operator+=(const Complex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    constexpr Complex& operator-=(const Complex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    constexpr Complex& operator*=(double s) {
        re *= s;
        im *= s;
        return *this;
    }

    friend constexpr Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend constexpr Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend constexpr Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
    friend constexpr Complex operator*(Complex a, double s) { return a *= s; }
    friend constexpr Complex operator*(double s, Complex a) { return a *= s; }
    friend constexpr Complex operator*(const Complex& a, const Complex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend constexpr bool operator==(const Complex&, const Complex&) = default;
};

constexpr Complex conj(const Complex& z) { return {z.re, -z.im}; }

inline double abs(const Complex& z) { return std::hypot(z.re, z.im); }

// e^{a + ib} = e^a (cos b + i sin b)
inline Complex exp(const Complex& z) {
    const double scale = std::exp(z.re);
    return {scale * std::cos(z.im), scale * std::sin(z.im)};
}

} // namespace jetrope
