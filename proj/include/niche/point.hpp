#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace niche {

inline constexpr int kMaxDim = 4;

/// Fixed-capacity point/vector in R^n, n <= kMaxDim.
class Point {
public:
    Point() = default;
    explicit Point(int dim) : dim_(dim) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Point: unsupported dimension");
    }
    Point(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
        if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("Point: unsupported dimension");
        int i = 0;
        for (double x : xs) c_[i++] = x;
    }

    static Point zeros(int dim) { return Point(dim); }

    int dim() const { return dim_; }
    double& operator[](int i) { return c_[i]; }
    double operator[](int i) const { return c_[i]; }

    Point& operator+=(const Point& o) {
        for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Point& operator-=(const Point& o) {
        for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Point& operator*=(double a) {
        for (int i = 0; i < dim_; ++i) c_[i] *= a;
        return *this;
    }

    friend Point operator+(Point a, const Point& b) { return a += b; }
    friend Point operator-(Point a, const Point& b) { return a -= b; }
    friend Point operator*(Point a, double k) { return a *= k; }
    friend Point operator*(double k, Point a) { return a *= k; }

    friend bool operator==(const Point& a, const Point& b) {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (a.c_[i] != b.c_[i]) return false;
        return true;
    }

    double dot(const Point& o) const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += c_[i] * o.c_[i];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

private:
    std::array<double, kMaxDim> c_{};
    int dim_ = 0;
};

inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// Surface measure of the unit sphere in R^n (n * vol(B_1)).
double unit_sphere_area(int n);

}  // namespace niche
