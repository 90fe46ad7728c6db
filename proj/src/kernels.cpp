#include "analogy/kernels.hpp"

#include <algorithm>
#include <limits>

#include "analogy/error.hpp"

namespace analogy {

void KernelKind::validate() const {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw ConfigError("kernel epsilon must lie in [0, 1), got " + std::to_string(epsilon));
    }
}

std::string_view to_string(KernelVariant variant) {
    switch (variant) {
        case KernelVariant::Boolean: return "boolean";
        case KernelVariant::Arithmetic: return "arithmetic";
        case KernelVariant::Geometric: return "geometric";
    }
    return "unknown";
}

KernelVariant parse_kernel_variant(std::string_view name) {
    if (name == "boolean") return KernelVariant::Boolean;
    if (name == "arithmetic") return KernelVariant::Arithmetic;
    if (name == "geometric") return KernelVariant::Geometric;
    throw ConfigError("unknown kernel '" + std::string(name) + "' (expected boolean, arithmetic or geometric)");
}

Degree boolean_proportion(bool a, bool b, bool c, bool d) noexcept {
    // a differs from b exactly as c differs from d.
    return (int(a) - int(b)) == (int(c) - int(d)) ? 1.0 : 0.0;
}

Degree geometric_proportion(double a, double b, double c, double d) noexcept {
    const double ad = a * d;
    const double bc = b * c;
    if (ad <= 0.0 && bc <= 0.0) return 1.0;
    if (ad <= 0.0 || bc <= 0.0) return 0.0;
    return std::min(ad, bc) / std::max(ad, bc);
}

Degree proportion(double a, double b, double c, double d, const KernelKind& kernel) noexcept {
    switch (kernel.variant) {
        case KernelVariant::Arithmetic: return arithmetic_proportion(a, b, c, d, kernel.epsilon);
        case KernelVariant::Geometric: return geometric_proportion(a, b, c, d);
        case KernelVariant::Boolean: return boolean_proportion(a >= 0.5, b >= 0.5, c >= 0.5, d >= 0.5);
    }
    return 0.0;
}

double relation(double a, double b, KernelVariant variant) noexcept {
    switch (variant) {
        case KernelVariant::Geometric:
            if (b == 0.0) return a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
            return a / b;
        case KernelVariant::Boolean:
            return double(int(a >= 0.5) - int(b >= 0.5));
        case KernelVariant::Arithmetic:
            break;
    }
    return a - b;
}

Degree vector_proportion(std::span<const double> a, std::span<const double> b,
                         std::span<const double> c, std::span<const double> d,
                         const KernelKind& kernel) {
    const std::size_t dim = a.size();
    auto check = [dim](std::span<const double> v, const char* name) {
        if (v.size() != dim) {
            throw DimensionError(std::string("vector ") + name + " has length " + std::to_string(v.size()) +
                                 ", expected " + std::to_string(dim));
        }
    };
    check(b, "B");
    check(c, "C");
    check(d, "D");
    if (dim == 0) throw DimensionError("vector A is empty");

    double sum = 0.0;
    for (std::size_t i = 0; i < dim; ++i) sum += proportion(a[i], b[i], c[i], d[i], kernel);
    return sum / double(dim);
}

std::optional<Label> label_transfer(Label y_a, Label y_b, Label y_c, int num_classes) noexcept {
    const Label y_d = y_c - y_a + y_b;
    if (y_d < 0 || y_d >= num_classes) return std::nullopt;
    return y_d;
}

Degree similarity(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionError("similarity: lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()) +
                             " differ");
    }
    if (x.empty()) throw DimensionError("similarity: empty vectors");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += std::abs(x[i] - y[i]);
    return 1.0 - sum / double(x.size());
}

}  // namespace analogy
