#include "jetrope/matrix.hpp"

#include <cmath>

namespace jetrope {

double frobenius_norm(const ComplexMatrix& m) {
    double sum = 0.0;
    for (const Complex& z : m.data()) {
        sum += z.re * z.re + z.im * z.im;
    }
    return std::sqrt(sum);
}

double frobenius_norm(const RealMatrix& m) {
    double sum = 0.0;
    for (double v : m.data()) {
        sum += v * v;
    }
    return std::sqrt(sum);
}

std::vector<double> multiply(const RealMatrix& m, std::span<const double> x) {
    if (x.size() != m.cols()) {
        throw std::invalid_argument("matrix-vector product: size mismatch");
    }
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            acc += m(i, j) * x[j];
        }
        out[i] = acc;
    }
    return out;
}

} // namespace jetrope
