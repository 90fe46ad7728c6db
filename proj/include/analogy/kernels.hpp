#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace analogy {

// Degree of analogical proportion or similarity, always in [0, 1].
using Degree = double;

// Ordinal class index: 0 is the lowest rank of the class order.
using Label = int;

enum class KernelVariant { Boolean, Arithmetic, Geometric };

// Choice of the per-feature proportion. epsilon is the sign tolerance of the
// arithmetic kernel: differences with |x| <= epsilon count as sign 0.
struct KernelKind {
    KernelVariant variant = KernelVariant::Arithmetic;
    double epsilon = 0.0;

    static KernelKind arithmetic(double epsilon = 0.0) { return {KernelVariant::Arithmetic, epsilon}; }
    static KernelKind geometric() { return {KernelVariant::Geometric, 0.0}; }
    static KernelKind boolean() { return {KernelVariant::Boolean, 0.0}; }

    // Throws ConfigError unless 0 <= epsilon < 1.
    void validate() const;

    friend bool operator==(const KernelKind&, const KernelKind&) = default;
};

std::string_view to_string(KernelVariant variant);
// Accepts "boolean", "arithmetic", "geometric". Throws ConfigError otherwise.
KernelVariant parse_kernel_variant(std::string_view name);

/// 1 for the six valid Boolean patterns 0000, 0011, 0101, 1010, 1100, 1111,
/// 0 for the remaining ten.
Degree boolean_proportion(bool a, bool b, bool c, bool d) noexcept;

namespace detail {

inline int tolerant_sign(double x, double epsilon) noexcept {
    if (std::abs(x) <= epsilon) return 0;
    return x > 0.0 ? 1 : -1;
}

// Arithmetic degree given the two differences p = a - b and q = c - d.
// Shared by the kernel and the search so both produce bit-identical sums.
inline Degree arithmetic_from_differences(double p, double q, double epsilon) noexcept {
    if (tolerant_sign(p, epsilon) != tolerant_sign(q, epsilon)) return 0.0;
    const double v = 1.0 - std::abs(p - q);
    return v < 0.0 ? 0.0 : v;
}

}  // namespace detail

/// 1 - |(a-b) - (c-d)| when a-b and c-d have the same sign (sign 0 for
/// differences within epsilon), otherwise 0.
inline Degree arithmetic_proportion(double a, double b, double c, double d, double epsilon = 0.0) noexcept {
    return detail::arithmetic_from_differences(a - b, c - d, epsilon);
}

/// Ratio of the cross products min(ad, bc) / max(ad, bc); 1 when both are
/// zero, 0 when exactly one is.
Degree geometric_proportion(double a, double b, double c, double d) noexcept;

/// Per-feature degree under the given kernel. The Boolean kernel reads each
/// value as the bit (value >= 0.5).
Degree proportion(double a, double b, double c, double d, const KernelKind& kernel) noexcept;

/// The relation R(a, b) the kernel compares: a - b for Arithmetic and
/// Boolean, a / b for Geometric (1 for 0/0, +inf for x/0 with x > 0).
double relation(double a, double b, KernelVariant variant) noexcept;

/// Mean of the per-feature degrees. Throws DimensionError naming the first
/// vector whose length differs from a.
Degree vector_proportion(std::span<const double> a, std::span<const double> b,
                         std::span<const double> c, std::span<const double> d,
                         const KernelKind& kernel);

/// Completes y_a : y_b :: y_c : y_d on the ordinal scale, y_d = y_c - y_a + y_b.
/// Returns nullopt (abstention) when y_d falls outside [0, num_classes).
std::optional<Label> label_transfer(Label y_a, Label y_b, Label y_c, int num_classes) noexcept;

/// 1 - mean |x_i - y_i|. Throws DimensionError on length mismatch.
Degree similarity(std::span<const double> x, std::span<const double> y);

}  // namespace analogy
