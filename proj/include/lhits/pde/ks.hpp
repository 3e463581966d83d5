#pragma once

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>

#include "lhits/pde/trajectory.hpp"

namespace lhits::pde {

/// u_t = -u u_x - uxx_coeff u_xx - u_xxxx on a periodic grid.
struct KsParams {
    double uxx_coeff = 0.5;
    bool nonlinear = true;  // false drops -u u_x, leaving the linear semigroup
};

using ComplexVector = Eigen::VectorXcd;

/// Fourier wavenumbers and the 2/3-rule mask for an even periodic grid.
struct KsSpectrum {
    Vector k_odd;    // Nyquist mode zeroed, used for odd derivatives
    Vector k_even;   // full wavenumbers, used for even derivatives
    Vector dealias;  // 1 where |j| < n/3, else 0

    explicit KsSpectrum(const Grid1D& grid)
    {
        if (!grid.periodic)
            throw ParameterError("KS requires a periodic grid");
        if (grid.n % 2 != 0)
            throw ParameterError("KS requires an even number of grid points, got " + std::to_string(grid.n));
        const auto n = static_cast<Eigen::Index>(grid.n);
        const double base = 2.0 * std::numbers::pi / grid.length;
        k_odd.resize(n);
        k_even.resize(n);
        dealias.resize(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index signed_j = j <= n / 2 ? j : j - n;
            k_even(j) = base * static_cast<double>(signed_j);
            k_odd(j) = j == n / 2 ? 0.0 : k_even(j);
            dealias(j) = 3 * std::abs(signed_j) < n ? 1.0 : 0.0;
        }
    }

    /// Diagonal linear operator c k^2 - k^4 in Fourier space.
    Vector linear_operator(const KsParams& p) const
    {
        return (p.uxx_coeff * k_even.array().square() - k_even.array().square().square()).matrix();
    }
};

/// d^order u / dx^order by FFT multipliers (i k)^order; odd orders drop the Nyquist mode.
inline Vector spectral_derivative(const Vector& u, const Grid1D& grid, int order)
{
    const KsSpectrum spec(grid);
    require_shape(u.size() == static_cast<Eigen::Index>(grid.n), "spectral_derivative: field length does not match grid");
    if (order < 0)
        throw ParameterError("spectral_derivative: negative order");
    Eigen::FFT<double> fft;
    ComplexVector u_hat;
    fft.fwd(u_hat, u);
    const Vector& k = order % 2 == 0 ? spec.k_even : spec.k_odd;
    for (Eigen::Index j = 0; j < u_hat.size(); ++j)
        u_hat(j) *= std::pow(std::complex<double>(0.0, k(j)), order);
    Vector out;
    fft.inv(out, u_hat);
    return out;
}

/// Spectral right-hand side -u u_x - c u_xx - u_xxxx; the product is dealiased.
inline Vector ks_rhs(const Vector& u, const Grid1D& grid, const KsParams& params = {})
{
    const KsSpectrum spec(grid);
    require_shape(u.size() == static_cast<Eigen::Index>(grid.n), "ks_rhs: field length does not match grid");
    Eigen::FFT<double> fft;
    ComplexVector u_hat;
    fft.fwd(u_hat, u);
    ComplexVector rhs_hat = spec.linear_operator(params).cast<std::complex<double>>().cwiseProduct(u_hat);
    if (params.nonlinear) {
        const std::complex<double> i1(0.0, 1.0);
        ComplexVector ux_hat = (i1 * spec.k_odd.cast<std::complex<double>>()).cwiseProduct(u_hat);
        Vector ux;
        fft.inv(ux, ux_hat);
        const Vector product = -u.cwiseProduct(ux);
        ComplexVector product_hat;
        fft.fwd(product_hat, product);
        rhs_hat += spec.dealias.cast<std::complex<double>>().cwiseProduct(product_hat);
    }
    Vector rhs;
    fft.inv(rhs, rhs_hat);
    return rhs;
}

/// Exponential time differencing RK4 coefficients for a diagonal linear
/// operator, evaluated by averaging over 32 points on a unit circle around
/// each h*L to avoid cancellation.
struct Etdrk4Coefficients {
    ComplexVector e, e_half, q, f1, f2, f3;
    double max_imag_residue = 0.0;

    Etdrk4Coefficients(const Vector& linear, double h, int contour_points = 32)
    {
        const auto n = linear.size();
        e.resize(n);
        e_half.resize(n);
        q.resize(n);
        f1.resize(n);
        f2.resize(n);
        f3.resize(n);
        using C = std::complex<double>;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double hl = h * linear(j);
            e(j) = std::exp(hl);
            e_half(j) = std::exp(0.5 * hl);
            C sq{}, s1{}, s2{}, s3{};
            for (int m = 0; m < contour_points; ++m) {
                const double angle = 2.0 * std::numbers::pi * (m + 0.5) / contour_points;
                const C lr = hl + std::polar(1.0, angle);
                const C elr = std::exp(lr);
                const C lr3 = lr * lr * lr;
                sq += (std::exp(0.5 * lr) - 1.0) / lr;
                s1 += (-4.0 - lr + elr * (4.0 - 3.0 * lr + lr * lr)) / lr3;
                s2 += (2.0 + lr + elr * (lr - 2.0)) / lr3;
                s3 += (-4.0 - 3.0 * lr - lr * lr + elr * (4.0 - lr)) / lr3;
            }
            const double inv = 1.0 / contour_points;
            for (const C* c : {&sq, &s1, &s2, &s3})
                max_imag_residue = std::max(max_imag_residue, std::abs(c->imag() * inv));
            q(j) = h * sq.real() * inv;
            f1(j) = h * s1.real() * inv;
            f2(j) = h * s2.real() * inv;
            f3(j) = h * s3.real() * inv;
        }
    }
};

/// ETDRK4 integrator for KS with fixed step. Owns its FFT workspace, so one
/// instance per thread.
class KsEtdrk4 {
public:
    KsEtdrk4(const Grid1D& grid, double dt, const KsParams& params = {})
        : spec_(grid), params_(params), coeffs_(spec_.linear_operator(params), dt)
    {
        if (!(dt > 0.0))
            throw ParameterError("ETDRK4: dt must be positive");
        // N(v) = -0.5 i k FFT((IFFT v)^2), dealiased.
        g_ = (std::complex<double>(0.0, -0.5) * spec_.k_odd.cast<std::complex<double>>())
                 .cwiseProduct(spec_.dealias.cast<std::complex<double>>());
    }

    const Etdrk4Coefficients& coefficients() const noexcept { return coeffs_; }

    ComplexVector nonlinear(const ComplexVector& v_hat)
    {
        if (!params_.nonlinear)
            return ComplexVector::Zero(v_hat.size());
        fft_.inv(work_, v_hat);
        work_ = work_.cwiseAbs2();
        ComplexVector out;
        fft_.fwd(out, work_);
        return g_.cwiseProduct(out);
    }

    void step(ComplexVector& v)
    {
        const ComplexVector nv = nonlinear(v);
        const ComplexVector a = coeffs_.e_half.cwiseProduct(v) + coeffs_.q.cwiseProduct(nv);
        const ComplexVector na = nonlinear(a);
        const ComplexVector b = coeffs_.e_half.cwiseProduct(v) + coeffs_.q.cwiseProduct(na);
        const ComplexVector nb = nonlinear(b);
        const ComplexVector c = coeffs_.e_half.cwiseProduct(a) + coeffs_.q.cwiseProduct(2.0 * nb - nv);
        const ComplexVector nc = nonlinear(c);
        v = coeffs_.e.cwiseProduct(v) + coeffs_.f1.cwiseProduct(nv) +
            2.0 * coeffs_.f2.cwiseProduct(na + nb) + coeffs_.f3.cwiseProduct(nc);
    }

    ComplexVector forward(const Vector& u)
    {
        ComplexVector out;
        fft_.fwd(out, u);
        return out;
    }

    Vector inverse(const ComplexVector& v)
    {
        Vector out;
        fft_.inv(out, v);
        return out;
    }

private:
    KsSpectrum spec_;
    KsParams params_;
    Etdrk4Coefficients coeffs_;
    ComplexVector g_;
    Eigen::FFT<double> fft_;
    Vector work_;
};

/// Returns (steps + 1) x n, one ETDRK4 step per recorded dt.
inline Matrix simulate_ks_etdrk4(const Vector& u0, const Grid1D& grid, double dt, std::size_t steps,
                                 const KsParams& params = {})
{
    require_shape(u0.size() == static_cast<Eigen::Index>(grid.n), "simulate_ks_etdrk4: initial state does not match grid");
    KsEtdrk4 solver(grid, dt, params);
    Matrix out(static_cast<Eigen::Index>(steps + 1), u0.size());
    out.row(0) = u0.transpose();
    ComplexVector v = solver.forward(u0);
    for (std::size_t s = 1; s <= steps; ++s) {
        solver.step(v);
        const Vector u = solver.inverse(v);
        if (!u.allFinite())
            throw DivergenceError("simulate_ks_etdrk4: state blew up", s);
        out.row(static_cast<Eigen::Index>(s)) = u.transpose();
    }
    return out;
}

} // namespace lhits::pde
