#ifndef AKL_TYPES_HPP
#define AKL_TYPES_HPP

#include <cmath>
#include <limits>
#include <string>

#include "akl/common.hpp"

namespace akl {

/// Regression sample: m points in R^n with l-dimensional targets.
struct Dataset {
    Matrix points;   // m x n
    Matrix targets;  // m x l

    Index size() const { return points.rows(); }
    Index dim() const { return points.cols(); }
    Index target_dim() const { return targets.cols(); }

    void validate() const {
        if (points.rows() < 1) throw input_error("dataset: empty");
        if (points.cols() < 1) throw input_error("dataset: feature dimension must be >= 1");
        if (targets.rows() != points.rows())
            throw input_error("dataset: point/target row count mismatch");
        if (targets.cols() < 1) throw input_error("dataset: target dimension must be >= 1");
        if (!points.allFinite() || !targets.allFinite())
            throw input_error("dataset: non-finite entry");
    }
};

enum class WidthMode { Common, PerPoint, PerPointAnisotropic };

inline std::string to_string(WidthMode m) {
    switch (m) {
        case WidthMode::Common: return "common";
        case WidthMode::PerPoint: return "per_point";
        case WidthMode::PerPointAnisotropic: return "per_point_anisotropic";
    }
    return "?";
}

inline WidthMode width_mode_from_string(const std::string& s) {
    if (s == "common") return WidthMode::Common;
    if (s == "per_point") return WidthMode::PerPoint;
    if (s == "per_point_anisotropic") return WidthMode::PerPointAnisotropic;
    throw input_error("unknown width mode: " + s);
}

/// Gaussian kernel family descriptor. Width storage by mode:
///   Common               -> 1 x 1
///   PerPoint             -> m x 1
///   PerPointAnisotropic  -> m x n
struct KernelSpec {
    Index n = 1;
    WidthMode mode = WidthMode::Common;
    Matrix widths;  // see above
    double sigma_min = 1e-12;
    double sigma_max = 1e12;

    static KernelSpec common(Index n, double sigma, double lo = 1e-12, double hi = 1e12) {
        KernelSpec s;
        s.n = n;
        s.mode = WidthMode::Common;
        s.widths = Matrix::Constant(1, 1, sigma);
        s.sigma_min = lo;
        s.sigma_max = hi;
        return s;
    }

    static KernelSpec per_point(Index n, const Vector& sigmas, double lo, double hi) {
        KernelSpec s;
        s.n = n;
        s.mode = WidthMode::PerPoint;
        s.widths = sigmas;
        s.sigma_min = lo;
        s.sigma_max = hi;
        return s;
    }

    static KernelSpec anisotropic(Index n, const Matrix& sigmas, double lo, double hi) {
        KernelSpec s;
        s.n = n;
        s.mode = WidthMode::PerPointAnisotropic;
        s.widths = sigmas;
        s.sigma_min = lo;
        s.sigma_max = hi;
        return s;
    }

    /// Width of center i along dimension l.
    double width(Index i, Index l) const {
        switch (mode) {
            case WidthMode::Common: return widths(0, 0);
            case WidthMode::PerPoint: return widths(i, 0);
            case WidthMode::PerPointAnisotropic: return widths(i, l);
        }
        return 0.0;
    }

    /// Full per-dimension width vector for center i.
    Vector width_vector(Index i) const {
        Vector w(n);
        for (Index l = 0; l < n; ++l) w(l) = width(i, l);
        return w;
    }

    Index center_count_or_one() const {
        return mode == WidthMode::Common ? 1 : widths.rows();
    }

    /// Checks the width invariants against a center count m. Widths outside
    /// [sigma_min, sigma_max] are rejected here; clamping is the caller's job.
    void validate(Index m) const {
        if (n < 1) throw input_error("kernel spec: dimension must be >= 1");
        if (sigma_min <= 0 || sigma_min > sigma_max)
            throw input_error("kernel spec: invalid width bounds");
        Index want_rows = mode == WidthMode::Common ? 1 : m;
        Index want_cols = mode == WidthMode::PerPointAnisotropic ? n : 1;
        if (widths.rows() != want_rows || widths.cols() != want_cols)
            throw input_error("kernel spec: width shape does not match mode");
        for (Index i = 0; i < widths.rows(); ++i)
            for (Index j = 0; j < widths.cols(); ++j) {
                double w = widths(i, j);
                if (!(w > 0.0)) throw input_error("kernel spec: nonpositive width");
                if (w < sigma_min || w > sigma_max)
                    throw input_error("kernel spec: width outside [sigma_min, sigma_max]");
            }
    }
};

}  // namespace akl

#endif
