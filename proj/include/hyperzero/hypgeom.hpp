#pragma once

// Hyperbolic geometry of the unit disk and the kernel arithmetic built on it.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hyperzero {

using Complex = std::complex<double>;

/// A point of the open unit disk. Construction throws OutsideDisk if |z| >= 1.
class DiskPoint {
public:
    DiskPoint() = default;
    DiskPoint(double re, double im);
    DiskPoint(Complex z);  // NOLINT(google-explicit-constructor)

    double re() const noexcept { return z_.real(); }
    double im() const noexcept { return z_.imag(); }
    Complex value() const noexcept { return z_; }
    double abs() const noexcept { return std::abs(z_); }

    friend bool operator==(DiskPoint const&, DiskPoint const&) = default;

private:
    Complex z_{0.0, 0.0};
};

/// Closed Euclidean disk {w : |w - center| <= radius}.
struct EuclideanDisk {
    Complex center;
    double radius = 0.0;

    double max_modulus() const noexcept { return std::abs(center) + radius; }
};

/// Disk automorphism z -> (z - u) / (1 - conj(u) z).
DiskPoint mobius(DiskPoint u, DiskPoint z);

/// Inverse map: the point xi with mobius(u, xi) == w.
DiskPoint mobius_inverse(DiskPoint u, DiskPoint w);

/// Derivative of z -> mobius(u, z): (1 - |u|^2) / (1 - conj(u) z)^2.
Complex mobius_derivative(DiskPoint u, Complex z);

/// Normalizer (1 - conj(u) z) / sqrt(1 - |u|^2). Never zero inside the disk.
Complex delta(DiskPoint u, DiskPoint z);

/// Image of the closed ball |z - center| <= radius under mobius(u, .).
/// The ball must lie inside the unit disk.
EuclideanDisk mobius_image_disk(DiskPoint u, Complex center, double radius);

/// 1 / (1 - z1 conj(z2)), the covariance of the pushed-forward normalized field.
Complex q_covariance(DiskPoint z1, DiskPoint z2);

/// Covariance of f(X, mobius(u1, z1)) / delta(u1, z1) and f(X, mobius(u2, z2)) / delta(u2, z2).
Complex cross_covariance(DiskPoint u1, DiskPoint z1, DiskPoint u2, DiskPoint z2);

/// c / (1 - z conj(w))^2.
Complex bergman_kernel(DiskPoint z, DiskPoint w, double c);

/// |mobius(u1, u2)|, in [0, 1).
double pseudo_hyperbolic_distance(DiskPoint u1, DiskPoint u2);

/// Hermitian n x n matrix K(z_i, z_j) with its defining points.
struct KernelMatrix {
    std::vector<DiskPoint> points;
    double normalization = 1.0;
    std::vector<Complex> entries;  // row-major

    std::size_t size() const noexcept { return points.size(); }
    Complex operator()(std::size_t i, std::size_t j) const { return entries[i * size() + j]; }
    double trace() const;
};

inline constexpr std::size_t kMaxKernelPoints = 12;
inline constexpr double kDuplicatePointTolerance = 1e-12;

KernelMatrix kernel_matrix(std::span<DiskPoint const> points, double c);

/// Determinant of an n x n Hermitian positive semidefinite matrix by symmetric
/// (diagonal) pivoting. Works on a copy.
double hermitian_determinant(std::span<Complex const> entries, std::size_t n);

/// det K(z_i, z_j) for pairwise distinct points, 1 <= n <= 12.
/// Throws DuplicatePoints if two points lie within 1e-12 of each other.
double kernel_determinant(std::span<DiskPoint const> points, double c);

}  // namespace hyperzero
