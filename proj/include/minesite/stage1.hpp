#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "economics.hpp"
#include "regions.hpp"

namespace minesite {

enum class SearchMode {
    Additive,  // top-k regions by standalone contribution
    Exhaustive // best k-subset of the prefiltered pool
};

struct Stage1Params {
    EconomicParams econ;
    SearchMode mode = SearchMode::Exhaustive;
    /// Exhaustive search only considers the top-M regions by annual surplus.
    std::size_t prefilter_m = 20;
};

/// One entry of the initial-optimisation table: Y_K, N_K and Pi_orig.
struct CandidateSet {
    std::int64_t k = 0;
    std::vector<std::string> regions; // sorted by code
    std::vector<RegionPlan> plans;    // parallel to regions
    double gross_profit_usd = 0.0;
    double total_mw = 0.0;
};

struct AdjustedProfit {
    double land_cost_usd = 0.0;
    double infra_cost_usd = 0.0;
    double pi_adj_usd = 0.0;
};

struct ProfitRow {
    std::int64_t k = 0;
    std::vector<std::string> regions;
    double pi_orig_usd = 0.0;
    double land_cost_usd = 0.0;
    double infra_cost_usd = 0.0;
    double pi_adj_usd = 0.0;
};

struct SelectionResult {
    std::int64_t k_star = 0;
    std::vector<std::string> regions_star;
    std::vector<RegionPlan> plans_star;
    double pi_max_usd = -std::numeric_limits<double>::infinity();
    std::vector<ProfitRow> per_k;
    /// Every region has zero surplus; the selection is a formality.
    bool no_surplus = false;
    std::vector<std::string> warnings;
};

namespace detail {

struct SetTotals {
    double gross_profit = 0.0;
    double land = 0.0;
    double mw = 0.0;
    double per_site_fee = 0.0;
};

inline SetTotals totals(std::span<const RegionPlan* const> plans, const CostParams& cost) {
    SetTotals t;
    for (const RegionPlan* p : plans) {
        t.gross_profit += p->gross_profit_usd();
        t.land += p->annual_land_cost_usd;
        t.mw += p->power_mw;
        t.per_site_fee += grid_fee(p->power_mw, cost);
    }
    return t;
}

inline double infra_for(const SetTotals& t, std::int64_t k, const CostParams& cost) {
    if (k < 1) fail(ErrorKind::Domain, "region set must contain at least one region");
    if (cost.grid_fee_mode == GridFeeMode::Pooled) return infra_cost_annual(t.mw, k, cost);
    return capex_total(t.mw, k, cost, t.per_site_fee) / cost.infra_lifetime_years +
           static_cast<double>(k) * cost.fixed_opex_per_site_usd;
}

inline double pi_adj(const SetTotals& t, std::int64_t k, const CostParams& cost) {
    return t.gross_profit - (t.land + infra_for(t, k, cost));
}

/// Standalone contribution used by additive mode.
inline double additive_score(const RegionPlan& p, const CostParams& cost) {
    return p.gross_profit_usd() - p.annual_land_cost_usd -
           p.power_mw * cost.variable_capex_per_mw_usd / cost.infra_lifetime_years;
}

inline CandidateSet make_set(std::vector<const RegionPlan*> chosen) {
    std::sort(chosen.begin(), chosen.end(),
              [](const RegionPlan* a, const RegionPlan* b) { return a->region_code < b->region_code; });
    CandidateSet s;
    s.k = static_cast<std::int64_t>(chosen.size());
    for (const RegionPlan* p : chosen) {
        s.regions.push_back(p->region_code);
        s.plans.push_back(*p);
        s.gross_profit_usd += p->gross_profit_usd();
        s.total_mw += p->power_mw;
    }
    return s;
}

/// Top-M regions by surplus (ties by code), returned in code order.
inline std::vector<std::size_t> prefilter(const std::vector<RegionRecord>& regions, std::size_t m) {
    std::vector<std::size_t> idx(regions.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (regions[a].annual_surplus_kwh != regions[b].annual_surplus_kwh)
            return regions[a].annual_surplus_kwh > regions[b].annual_surplus_kwh;
        return regions[a].region_code < regions[b].region_code;
    });
    idx.resize(std::min(m, idx.size()));
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return regions[a].region_code < regions[b].region_code; });
    return idx;
}

inline void check_unique_codes(const std::vector<RegionRecord>& regions) {
    std::vector<std::string> codes;
    for (const auto& r : regions) codes.push_back(r.region_code);
    std::sort(codes.begin(), codes.end());
    if (std::adjacent_find(codes.begin(), codes.end()) != codes.end())
        fail(ErrorKind::Validation, "duplicate region_code in region list");
}

} // namespace detail

/// L_K, I_K and Pi_adj = Pi_orig - (L_K + I_K) for a candidate set.
inline AdjustedProfit adjust_profit(const CandidateSet& cset, const std::map<std::string, double>& land_prices,
                                    const Stage1Params& params) {
    if (cset.k < 1 || cset.plans.empty()) fail(ErrorKind::Domain, "cannot adjust an empty region set");
    if (static_cast<std::size_t>(cset.k) != cset.plans.size())
        fail(ErrorKind::Invariant, "candidate set size does not match its plans");
    const auto& cost = params.econ.cost;
    detail::SetTotals t;
    for (const auto& plan : cset.plans) {
        const auto it = land_prices.find(plan.region_code);
        if (it == land_prices.end()) fail(ErrorKind::Data, "no land price for region " + plan.region_code);
        t.gross_profit += plan.gross_profit_usd();
        t.land += land_cost_annual(plan.gross_area_m2, it->second, cost);
        t.mw += plan.power_mw;
        t.per_site_fee += grid_fee(plan.power_mw, cost);
    }
    AdjustedProfit out;
    out.land_cost_usd = t.land;
    out.infra_cost_usd = detail::infra_for(t, cset.k, cost);
    out.pi_adj_usd = t.gross_profit - (out.land_cost_usd + out.infra_cost_usd);
    return out;
}

inline std::map<std::string, double> land_price_table(const std::vector<RegionRecord>& regions) {
    std::map<std::string, double> m;
    for (const auto& r : regions) m[r.region_code] = r.land_price_krw_m2;
    return m;
}

/**
 * Chooses Y_K for one K.
 *
 * Additive mode ranks regions by standalone contribution (gross profit minus
 * land cost minus annualised variable CAPEX). Exhaustive mode enumerates
 * every k-subset of the prefiltered pool and keeps the highest Pi_adj; ties
 * go to the lexicographically smallest code list.
 */
inline CandidateSet initial_optimize(const std::vector<RegionRecord>& regions, std::int64_t k,
                                     const Stage1Params& params, SearchMode mode) {
    if (k < 1 || static_cast<std::size_t>(k) > regions.size())
        fail(ErrorKind::Domain, "k=" + std::to_string(k) + " outside 1.." + std::to_string(regions.size()));
    detail::check_unique_codes(regions);
    const auto& cost = params.econ.cost;

    std::vector<RegionPlan> plans;
    plans.reserve(regions.size());
    for (const auto& r : regions) plans.push_back(build_region_plan(r, params.econ));

    if (mode == SearchMode::Additive) {
        std::vector<const RegionPlan*> order;
        for (const auto& p : plans) order.push_back(&p);
        std::sort(order.begin(), order.end(), [&](const RegionPlan* a, const RegionPlan* b) {
            const double sa = detail::additive_score(*a, cost), sb = detail::additive_score(*b, cost);
            if (sa != sb) return sa > sb;
            return a->region_code < b->region_code;
        });
        order.resize(static_cast<std::size_t>(k));
        return detail::make_set(order);
    }

    const auto pool = detail::prefilter(regions, std::max(params.prefilter_m, static_cast<std::size_t>(k)));
    const std::size_t n = pool.size();
    const auto kk = static_cast<std::size_t>(k);
    std::vector<std::size_t> comb(kk);
    std::iota(comb.begin(), comb.end(), 0);
    std::vector<const RegionPlan*> cur(kk);
    std::vector<std::size_t> best;
    double best_pi = -std::numeric_limits<double>::infinity();
    while (true) {
        for (std::size_t i = 0; i < kk; ++i) cur[i] = &plans[pool[comb[i]]];
        const double pi = detail::pi_adj(detail::totals(cur, cost), k, cost);
        if (best.empty() || pi > best_pi) {
            best_pi = pi;
            best = comb;
        }
        // next combination in lexicographic order
        std::size_t i = kk;
        while (i > 0 && comb[i - 1] == n - kk + (i - 1)) --i;
        if (i == 0) break;
        ++comb[i - 1];
        for (std::size_t j = i; j < kk; ++j) comb[j] = comb[j - 1] + 1;
    }
    std::vector<const RegionPlan*> chosen;
    for (std::size_t c : best) chosen.push_back(&plans[pool[c]]);
    return detail::make_set(chosen);
}

/// Evaluates K = 1..k_max and keeps the first strictly best adjusted profit.
inline SelectionResult select_optimal(const std::vector<RegionRecord>& regions, std::int64_t k_max,
                                      const Stage1Params& params) {
    if (k_max < 1) fail(ErrorKind::Domain, "k_max must be >= 1");
    if (regions.empty()) fail(ErrorKind::Domain, "no regions to select from");
    validate(params.econ);
    const auto prices = land_price_table(regions);

    SelectionResult res;
    const std::int64_t k_hi = std::min<std::int64_t>(k_max, static_cast<std::int64_t>(regions.size()));
    if (k_hi < k_max)
        res.warnings.push_back("k_max " + std::to_string(k_max) + " exceeds region count; searched K <= " +
                               std::to_string(k_hi));
    for (std::int64_t k = 1; k <= k_hi; ++k) {
        const CandidateSet cset = initial_optimize(regions, k, params, params.mode);
        const AdjustedProfit adj = adjust_profit(cset, prices, params);
        res.per_k.push_back({k, cset.regions, cset.gross_profit_usd, adj.land_cost_usd, adj.infra_cost_usd,
                             adj.pi_adj_usd});
        if (adj.pi_adj_usd > res.pi_max_usd) {
            res.pi_max_usd = adj.pi_adj_usd;
            res.k_star = k;
            res.regions_star = cset.regions;
            res.plans_star = cset.plans;
        }
    }
    res.no_surplus = std::all_of(regions.begin(), regions.end(),
                                 [](const RegionRecord& r) { return !(r.annual_surplus_kwh > 0.0); });
    if (res.no_surplus) res.warnings.push_back("no region has surplus energy");
    if (res.pi_max_usd < 0.0) res.warnings.push_back("best adjusted profit is negative");
    return res;
}

} // namespace minesite
