#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "qptrace/errors.hpp"
#include "qptrace/polynomial.hpp"

namespace qptrace {

/// f(s, h) = a(s) + b(s) e^{-h s} with real-coefficient a, b and
/// degree(a) > degree(b) (retarded type).  A problem with b identically zero
/// is accepted only when the caller sets allow_delay_free.
class QuasiPolynomial {
public:
    QuasiPolynomial(RealPolynomial a, RealPolynomial b, bool allow_delay_free = false)
        : a_(std::move(a)),
          b_(std::move(b)),
          da_(a_.derivative()),
          db_(b_.derivative()),
          delay_free_(b_.is_zero()),
          scale_(a_.max_coeff_magnitude()) {
        if (delay_free_ && !allow_delay_free)
            throw InvalidInput("b is identically zero; pass allow_delay_free to accept");
        if (a_.degree() <= b_.degree())
            throw InvalidInput("not retarded: degree(a) = " + std::to_string(a_.degree()) +
                               " must exceed degree(b) = " + std::to_string(b_.degree()));
        if (scale_ == 0.0) throw InvalidInput("a is identically zero");
    }

    const RealPolynomial& a() const { return a_; }
    const RealPolynomial& b() const { return b_; }
    const RealPolynomial& da() const { return da_; }
    const RealPolynomial& db() const { return db_; }
    bool delay_free() const { return delay_free_; }

    /// Largest coefficient magnitude of a; reference magnitude for all
    /// residual and singularity tolerances.
    double coeff_scale() const { return scale_; }

    Complex f(Complex s, double h) const {
        if (delay_free_) return a_(s);
        return a_(s) + b_(s) * delay_factor(s, h);
    }

    /// df/ds = a'(s) + (b'(s) - h b(s)) e^{-h s}.
    Complex f_s(Complex s, double h) const {
        if (delay_free_) return da_(s);
        return da_(s) + (db_(s) - h * b_(s)) * delay_factor(s, h);
    }

    /// df/dh = -s b(s) e^{-h s}.
    Complex f_h(Complex s, double h) const {
        if (delay_free_) return Complex(0.0, 0.0);
        return -s * b_(s) * delay_factor(s, h);
    }

private:
    Complex delay_factor(Complex s, double h) const {
        if (h == 0.0) return Complex(1.0, 0.0);
        const Complex arg = -h * s;
        if (arg.real() > 700.0)
            throw OutOfDomain("exp overflow: Re(-h*s) = " + std::to_string(arg.real()) + " > 700");
        return std::exp(arg);
    }

    RealPolynomial a_, b_, da_, db_;
    bool delay_free_;
    double scale_;
};

///// First-order zero-displacement rate |f_h / f_s|: a zero at (s, h) moves by
/// at most this rate times |dh| to first order.
inline double sensitivity_bound(const QuasiPolynomial& q, Complex s, double h) {
    const Complex fs = q.f_s(s, h);
    if (std::abs(fs) <= 1e-12 * q.coeff_scale())
        throw SingularDerivative("sensitivity undefined: |f_s| <= 1e-12 * scale");
    return std::abs(q.f_h(s, h)) / std::abs(fs);
}

}  // namespace qptrace
