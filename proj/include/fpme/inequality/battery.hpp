#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fpme/core/csv.hpp"
#include "fpme/core/random_fields.hpp"
#include "fpme/inequality/inequalities.hpp"

namespace fpme {

struct BatteryOptions {
    std::vector<double> alphas{0.25, 0.5, 0.75};
    std::vector<double> eps{0.1, 0.01};
    std::vector<double> q_values{0.5, 1.0, 2.0, 3.0};
    std::size_t cordoba_fields = 100;
    std::size_t sv_fields = 50;
    std::size_t n = 128;
    std::uint64_t seed = 0;
    FaultInjection fault{};

    double cordoba_tol = 1e-8;
    double sv_tol = 1e-6;
    double sv_equality_tol = 1e-10;
    double positivity_tol = 1e-10;
    double slope_tol = 0.05;
};

/// One line of the battery output.  `gap_min` is the worst normalized gap
/// (gap / scale) and the check passes when gap_min >= -tolerance, except for
/// the equality and slope rows where it is a deviation compared with
/// +tolerance.
struct CheckRow {
    std::string check_id;
    std::string params;
    double gap_min = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

namespace detail {

inline std::string fmt_params(std::initializer_list<std::pair<const char*, double>> kv)
{
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : kv) {
        os << (first ? "" : ";") << k << '=' << csv::number(v);
        first = false;
    }
    return os.str();
}

inline std::vector<GridField> random_ensemble(const SineBasis& basis, std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<GridField> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(basis.from_spectral(random_bandlimited(basis.domain(), rng)));
    }
    return out;
}

} // namespace detail

inline std::vector<CheckRow> run_inequality_battery(const BatteryOptions& opt)
{
    const SineBasis basis(DomainSpec::line(1.0, opt.n));
    const auto& fault = opt.fault;
    std::vector<CheckRow> rows;
    const auto cordoba_fields = detail::random_ensemble(basis, opt.cordoba_fields, opt.seed);
    const auto sv_fields = detail::random_ensemble(basis, opt.sv_fields, opt.seed + 1);

    for (const auto& profile : convex_registry()) {
        for (double alpha : opt.alphas) {
            for (double eps : opt.eps) {
                double worst = std::numeric_limits<double>::infinity();
                for (const auto& f : cordoba_fields) {
                    const GridField gap = cordoba_gap(basis, f, profile, alpha, eps, fault);
                    const double scale = std::max(cordoba_scale(basis, f, profile, alpha, eps), 1e-300);
                    for (double g : gap.values) {
                        worst = std::min(worst, g / scale);
                    }
                }
                rows.push_back({"cordoba/" + profile.name, detail::fmt_params({{"alpha", alpha}, {"eps", eps}}),
                                worst, opt.cordoba_tol, worst >= -opt.cordoba_tol});
            }
        }
    }

    for (double alpha : opt.alphas) {
        for (double q1 : opt.q_values) {
            for (double q2 : opt.q_values) {
                double worst = std::numeric_limits<double>::infinity();
                double dev = 0.0;
                for (const auto& u : sv_fields) {
                    const SVSides s = power_sv_sides(basis, u, q1, q2, alpha, fault);
                    const double r = s.gap() / std::max(s.scale(), 1e-300);
                    worst = std::min(worst, r);
                    dev = std::max(dev, std::abs(r));
                }
                const auto params = detail::fmt_params({{"alpha", alpha}, {"q1", q1}, {"q2", q2}});
                rows.push_back({"sv_power", params, worst, opt.sv_tol, worst >= -opt.sv_tol});
                if (q1 == q2) {
                    rows.push_back({"sv_power_equality", params, dev, opt.sv_equality_tol, dev <= opt.sv_equality_tol});
                }
            }
        }
        double worst = std::numeric_limits<double>::infinity();
        const SVProfile cubic = power_sv_profile(3.0);
        for (const auto& u : sv_fields) {
            const SVSides s = sv_sides(basis, u, cubic, alpha, fault);
            worst = std::min(worst, s.gap() / std::max(s.scale(), 1e-300));
        }
        rows.push_back({"sv_cubic", detail::fmt_params({{"alpha", alpha}}), worst, opt.sv_tol, worst >= -opt.sv_tol});
    }

    for (double alpha : opt.alphas) {
        for (double eps : opt.eps) {
            double worst = std::numeric_limits<double>::infinity();
            for (const auto& f : cordoba_fields) {
                const double norm2 = grid_inner(f, f);
                worst = std::min(worst, positivity_form(basis, f, alpha, eps, fault) / std::max(norm2, 1e-300));
            }
            rows.push_back({"positivity", detail::fmt_params({{"alpha", alpha}, {"eps", eps}}), worst,
                            opt.positivity_tol, worst >= -opt.positivity_tol});
        }
    }

    const GridField mode1 = basis.from_spectral(SpectralField::unit(basis.domain(), 0));
    const std::vector<double> eps_list{1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4};
    for (double alpha : opt.alphas) {
        const auto study = approx_convergence_study(basis, mode1, alpha, eps_list, fault);
        const double dev = std::abs(study.fit.slope - (1.0 - alpha));
        rows.push_back({"eps_convergence_slope", detail::fmt_params({{"alpha", alpha}, {"slope", study.fit.slope}}),
                        dev, opt.slope_tol, dev <= opt.slope_tol});
    }
    return rows;
}

inline bool all_pass(const std::vector<CheckRow>& rows)
{
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

inline void write_battery_csv(std::ostream& os, const std::vector<CheckRow>& rows)
{
    csv::write_row(os, {"check_id", "params", "gap_min", "tolerance", "pass"});
    for (const auto& r : rows) {
        csv::write_row(os, {r.check_id, r.params, csv::number(r.gap_min), csv::number(r.tolerance),
                            r.pass ? "true" : "false"});
    }
}

} // namespace fpme
