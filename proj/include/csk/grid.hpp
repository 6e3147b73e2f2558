#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace csk {

/// Uniform samples on [t_min, t_max] with an exponential tail model outside:
/// v(t) = limit + (v_end - limit) exp(-decay * distance past the end).
struct GridFunction {
    double t_min = 0;
    double t_max = 1;
    std::vector<double> values;
    double decay_plus = std::numeric_limits<double>::quiet_NaN();
    double decay_minus = std::numeric_limits<double>::quiet_NaN();
    double limit_plus = 0;
    double limit_minus = 0;

    std::size_t n() const { return values.size(); }
    double h() const { return (t_max - t_min) / static_cast<double>(n() - 1); }
    double t(std::size_t i) const { return t_min + static_cast<double>(i) * h(); }
    bool tails_declared() const { return decay_plus == decay_plus && decay_minus == decay_minus; }

    /// Sample at grid index j, which may lie outside [0, n).
    double extended(long j) const;

    /// Throws DomainError if n < 16 or the interval is empty.
    void validate() const;
};

GridFunction make_grid(double t_min, double t_max, std::size_t n);

/// Two-column CSV, full round-trip precision. The first line is a comment
/// carrying the tail declaration.
void write_csv(std::ostream& os, const GridFunction& g, const std::string& header_extra = {});
GridFunction read_csv(std::istream& is);

/// FNV-1a over the text, printed as 16 hex digits.
std::string checksum(const std::string& text);

}  // namespace csk
