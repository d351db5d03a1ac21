#include "hyperzero/hypgeom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hyperzero/error.hpp"

namespace hyperzero {

DiskPoint::DiskPoint(double re, double im) : DiskPoint(Complex{re, im}) {}

DiskPoint::DiskPoint(Complex z) : z_(z)
{
    if (!(std::norm(z) < 1.0)) {
        std::ostringstream msg;
        msg << "point " << z << " is not inside the open unit disk";
        throw OutsideDisk(msg.str());
    }
}

namespace {

Complex mobius_raw(Complex u, Complex z)
{
    return (z - u) / (1.0 - std::conj(u) * z);
}

// Rounding can push |result| to exactly 1 for arguments within ~1e-16 of the
// circle; pull such values back inside.
DiskPoint clamp_inside(Complex w)
{
    double const r = std::abs(w);
    if (r >= 1.0) {
        w *= std::nextafter(1.0, 0.0) / r;
    }
    return DiskPoint{w};
}

}  // namespace

DiskPoint mobius(DiskPoint u, DiskPoint z)
{
    return clamp_inside(mobius_raw(u.value(), z.value()));
}

DiskPoint mobius_inverse(DiskPoint u, DiskPoint w)
{
    return clamp_inside(mobius_raw(-u.value(), w.value()));
}

Complex mobius_derivative(DiskPoint u, Complex z)
{
    Complex const s = 1.0 - std::conj(u.value()) * z;
    return (1.0 - std::norm(u.value())) / (s * s);
}

Complex delta(DiskPoint u, DiskPoint z)
{
    return (1.0 - std::conj(u.value()) * z.value()) / std::sqrt(1.0 - std::norm(u.value()));
}

EuclideanDisk mobius_image_disk(DiskPoint u, Complex center, double radius)
{
    if (!(radius >= 0.0) || !(std::abs(center) + radius < 1.0)) {
        throw PreconditionError("ball must lie inside the open unit disk");
    }
    Complex const uu = u.value();
    if (uu == Complex{}) {
        return {center, radius};
    }
    // The line through the center and the pole 1/conj(u) is orthogonal to the
    // circle, so its two crossings map to antipodal points of the image circle.
    Complex const pole = 1.0 / std::conj(uu);
    Complex const dir = (pole - center) / std::abs(pole - center);
    Complex const w_plus = mobius_raw(uu, center + radius * dir);
    Complex const w_minus = mobius_raw(uu, center - radius * dir);
    return {0.5 * (w_plus + w_minus), 0.5 * std::abs(w_plus - w_minus)};
}

Complex q_covariance(DiskPoint z1, DiskPoint z2)
{
    return 1.0 / (1.0 - z1.value() * std::conj(z2.value()));
}

Complex cross_covariance(DiskPoint u1, DiskPoint z1, DiskPoint u2, DiskPoint z2)
{
    Complex const phi1 = mobius_raw(u1.value(), z1.value());
    Complex const phi2 = mobius_raw(u2.value(), z2.value());
    return 1.0 / (delta(u1, z1) * std::conj(delta(u2, z2)) * (1.0 - phi1 * std::conj(phi2)));
}

Complex bergman_kernel(DiskPoint z, DiskPoint w, double c)
{
    if (!(c > 0.0)) {
        throw PreconditionError("kernel normalization must be positive");
    }
    Complex const s = 1.0 - z.value() * std::conj(w.value());
    return c / (s * s);
}

double pseudo_hyperbolic_distance(DiskPoint u1, DiskPoint u2)
{
    // |a - b| / |1 - conj(b) a| is symmetric; compute it in the symmetric form.
    Complex const a = u1.value();
    Complex const b = u2.value();
    return std::abs(a - b) / std::abs(1.0 - std::conj(b) * a);
}

double KernelMatrix::trace() const
{
    double t = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        t += (*this)(i, i).real();
    }
    return t;
}

namespace {

void check_kernel_points(std::span<DiskPoint const> points)
{
    if (points.empty() || points.size() > kMaxKernelPoints) {
        throw PreconditionError("kernel evaluation needs between 1 and 12 points");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (std::abs(points[i].value() - points[j].value()) < kDuplicatePointTolerance) {
                std::ostringstream msg;
                msg << "points " << i << " and " << j << " coincide";
                throw DuplicatePoints(msg.str());
            }
        }
    }
}

}  // namespace

KernelMatrix kernel_matrix(std::span<DiskPoint const> points, double c)
{
    check_kernel_points(points);
    KernelMatrix k;
    k.points.assign(points.begin(), points.end());
    k.normalization = c;
    std::size_t const n = points.size();
    k.entries.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            Complex const v = bergman_kernel(points[i], points[j], c);
            k.entries[i * n + j] = v;
            k.entries[j * n + i] = std::conj(v);
        }
        k.entries[i * n + i] = k.entries[i * n + i].real();
    }
    return k;
}

double hermitian_determinant(std::span<Complex const> entries, std::size_t n)
{
    if (entries.size() != n * n) {
        throw LengthMismatch("matrix storage does not match its dimension");
    }
    std::vector<Complex> a(entries.begin(), entries.end());
    auto at = [&](std::size_t i, std::size_t j) -> Complex& { return a[i * n + j]; };

    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (at(i, i).real() > at(pivot, pivot).real()) {
                pivot = i;
            }
        }
        if (pivot != k) {
            // Symmetric permutation: swap rows and columns, determinant unchanged.
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(at(k, j), at(pivot, j));
            }
            for (std::size_t i = 0; i < n; ++i) {
                std::swap(at(i, k), at(i, pivot));
            }
        }
        double const d = at(k, k).real();
        if (d <= 0.0) {
            // PSD with a non-positive largest remaining pivot: singular up to rounding.
            return d == 0.0 ? 0.0 : det * d;
        }
        det *= d;
        for (std::size_t i = k + 1; i < n; ++i) {
            Complex const l = at(i, k) / d;
            for (std::size_t j = k + 1; j < n; ++j) {
                at(i, j) -= l * at(k, j);
            }
        }
    }
    return det;
}

double kernel_determinant(std::span<DiskPoint const> points, double c)
{
    KernelMatrix const k = kernel_matrix(points, c);
    return hermitian_determinant(k.entries, k.size());
}

}  // namespace hyperzero
