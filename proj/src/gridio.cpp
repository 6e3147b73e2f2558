#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "csk/errors.hpp"
#include "csk/grid.hpp"

namespace csk {

double GridFunction::extended(long j) const {
    const long last = static_cast<long>(n()) - 1;
    if (j >= 0 && j <= last) return values[j];
    if (j > last) return limit_plus + (values[last] - limit_plus) * std::exp(-decay_plus * (j - last) * h());
    return limit_minus + (values[0] - limit_minus) * std::exp(decay_minus * j * h());
}

void GridFunction::validate() const {
    if (n() < 16) throw DomainError("grid needs at least 16 samples");
    if (!(t_max > t_min)) throw DomainError("t_max must exceed t_min");
}

GridFunction make_grid(double t_min, double t_max, std::size_t n) {
    GridFunction g;
    g.t_min = t_min;
    g.t_max = t_max;
    g.values.assign(n, 0.0);
    g.validate();
    return g;
}

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void write_csv(std::ostream& os, const GridFunction& g, const std::string& header_extra) {
    os << "# decay_plus=" << fmt17(g.decay_plus) << " decay_minus=" << fmt17(g.decay_minus)
       << " limit_plus=" << fmt17(g.limit_plus) << " limit_minus=" << fmt17(g.limit_minus);
    if (!header_extra.empty()) os << ' ' << header_extra;
    os << "\nt,value\n";
    for (std::size_t i = 0; i < g.n(); ++i) os << fmt17(g.t(i)) << ',' << fmt17(g.values[i]) << '\n';
}

GridFunction read_csv(std::istream& is) {
    std::string line;
    std::map<std::string, double> tags;
    std::vector<double> ts, vs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                try {
                    tags[tok.substr(0, eq)] = std::stod(tok.substr(eq + 1));
                } catch (const std::exception&) {
                }
            }
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DomainError("CSV row without a comma: " + line);
        try {
            ts.push_back(std::stod(line.substr(0, comma)));
            vs.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::invalid_argument&) {
            if (ts.empty() && vs.empty()) continue;  // column header
            throw DomainError("unparsable CSV row: " + line);
        }
    }
    if (ts.size() < 16) throw DomainError("CSV needs at least 16 rows");
    const double h = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (std::abs(ts[i] - ts[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw DomainError("CSV grid is not uniformly spaced");
    GridFunction g;
    g.t_min = ts.front();
    g.t_max = ts.back();
    g.values = std::move(vs);
    auto tag = [&](const char* k, double def) {
        auto it = tags.find(k);
        return it == tags.end() ? def : it->second;
    };
    g.decay_plus = tag("decay_plus", g.decay_plus);
    g.decay_minus = tag("decay_minus", g.decay_minus);
    g.limit_plus = tag("limit_plus", 0.0);
    g.limit_minus = tag("limit_minus", 0.0);
    return g;
}

std::string checksum(const std::string& text) {
    std::uint64_t hsh = 1469598103934665603ull;
    for (unsigned char c : text) {
        hsh ^= c;
        hsh *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hsh));
    return buf;
}

}  // namespace csk
