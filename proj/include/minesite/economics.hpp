#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "error.hpp"
#include "regions.hpp"

namespace minesite {

inline constexpr double kHoursPerYear = 8760.0;

struct MinerSpec {
    /// Electrical draw. The 4104.0 rating of an S21 XP Hydro is read as 4.104 kW.
    double power_kw = 4.104;
    double hashrate_ths = 473.0;
    double capex_per_unit_usd = 9490.0;
    double lifetime_years = 7.0;

    double annual_energy_kwh() const { return power_kw * kHoursPerYear; }
};

struct NetworkSnapshot {
    /// Default network hashrate puts one 473 TH/s machine at $8,944 per year.
    double network_hashrate_ths = 473.0 * 52560.0 * 3.125 * 60000.0 / 8944.0;
    double block_reward_btc = 3.125;
    double btc_price_usd = 60000.0;
    double blocks_per_year = 52560.0;
};

struct LayoutParams {
    std::int64_t miners_per_container = 210;
    double area_per_container_m2 = 51.7;
    double margin_ratio = 0.30;
    double gross_area_m2_per_mw = 2500.0;
};

enum class GridFeeMode {
    Pooled,  // ceil(total MW / block) blocks over the whole region set
    PerSite  // blocks counted per region, then summed
};

struct CostParams {
    double market_multiplier = 1.3;
    double land_amort_years = 20.0;
    double fixed_capex_per_site_usd = 5'000'000.0;
    double variable_capex_per_mw_usd = 400'000.0;
    double grid_fee_usd = 1'200'000.0;
    double grid_block_mw = 10.0;
    double infra_lifetime_years = 7.0;
    double fixed_opex_per_site_usd = 3'000'000.0;
    double energy_price_usd_per_kwh = 0.0;
    double fx_krw_per_usd = 1350.0;
    GridFeeMode grid_fee_mode = GridFeeMode::Pooled;
};

struct EconomicParams {
    MinerSpec miner;
    NetworkSnapshot network;
    LayoutParams layout;
    CostParams cost;
};

inline void validate(const EconomicParams& p) {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::Validation, std::string(what) + " must be > 0");
    };
    positive(p.miner.power_kw, "miner.power_kw");
    positive(p.miner.hashrate_ths, "miner.hashrate_ths");
    positive(p.miner.capex_per_unit_usd, "miner.capex_per_unit_usd");
    positive(p.miner.lifetime_years, "miner.lifetime_years");
    positive(p.network.network_hashrate_ths, "network.network_hashrate_ths");
    positive(p.network.block_reward_btc, "network.block_reward_btc");
    positive(p.network.btc_price_usd, "network.btc_price_usd");
    positive(p.network.blocks_per_year, "network.blocks_per_year");
    if (p.layout.miners_per_container < 1) fail(ErrorKind::Validation, "layout.miners_per_container must be >= 1");
    positive(p.layout.area_per_container_m2, "layout.area_per_container_m2");
    if (!(p.layout.margin_ratio >= 0.0 && p.layout.margin_ratio < 1.0))
        fail(ErrorKind::Validation, "layout.margin_ratio must be in [0, 1)");
    positive(p.layout.gross_area_m2_per_mw, "layout.gross_area_m2_per_mw");
    const auto& c = p.cost;
    if (!(c.market_multiplier >= 1.0)) fail(ErrorKind::Validation, "cost.market_multiplier must be >= 1");
    if (!(c.land_amort_years >= 1.0)) fail(ErrorKind::Validation, "cost.land_amort_years must be >= 1");
    if (!(c.infra_lifetime_years >= 1.0)) fail(ErrorKind::Validation, "cost.infra_lifetime_years must be >= 1");
    for (auto [v, name] : {std::pair{c.fixed_capex_per_site_usd, "cost.fixed_capex_per_site_usd"},
                           std::pair{c.variable_capex_per_mw_usd, "cost.variable_capex_per_mw_usd"},
                           std::pair{c.grid_fee_usd, "cost.grid_fee_usd"},
                           std::pair{c.fixed_opex_per_site_usd, "cost.fixed_opex_per_site_usd"},
                           std::pair{c.energy_price_usd_per_kwh, "cost.energy_price_usd_per_kwh"}})
        if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::Validation, std::string(name) + " must be >= 0");
    positive(c.grid_block_mw, "cost.grid_block_mw");
    positive(c.fx_krw_per_usd, "cost.fx_krw_per_usd");
}

struct RegionPlan {
    std::string region_code;
    std::int64_t n_miners = 0;
    double power_mw = 0.0;
    double annual_energy_kwh = 0.0;
    double annual_revenue_usd = 0.0;
    double annual_depreciation_usd = 0.0;
    double annual_energy_cost_usd = 0.0;
    double annual_land_cost_usd = 0.0;
    std::int64_t containers = 0;
    double net_area_m2 = 0.0;
    double gross_area_m2 = 0.0;

    /// Revenue net of depreciation and energy; the pre-adjustment profit.
    double gross_profit_usd() const {
        return annual_revenue_usd - annual_depreciation_usd - annual_energy_cost_usd;
    }
};

/// Machines that surplus energy can keep running all year.
inline std::int64_t miner_capacity(double annual_surplus_kwh, const MinerSpec& miner) {
    if (!(annual_surplus_kwh > 0.0)) return 0;
    const double x = annual_surplus_kwh / miner.annual_energy_kwh();
    double n = std::floor(x);
    if (x - n > 1.0 - 1e-9) n += 1.0; // absorb rounding at exact multiples
    return static_cast<std::int64_t>(n);
}

/// Expected proof-of-work share: N * (h / H_net) * blocks * reward * price.
inline double annual_revenue(std::int64_t n_miners, const MinerSpec& miner, const NetworkSnapshot& net) {
    if (!(net.network_hashrate_ths > 0.0)) fail(ErrorKind::Domain, "network hashrate must be > 0");
    const double per_machine =
        miner.hashrate_ths / net.network_hashrate_ths * net.blocks_per_year * net.block_reward_btc * net.btc_price_usd;
    return static_cast<double>(n_miners) * per_machine;
}

/// Straight-line over the machine lifetime.
inline double annual_depreciation(std::int64_t n_miners, const MinerSpec& miner) {
    return static_cast<double>(n_miners) * (miner.capex_per_unit_usd / miner.lifetime_years);
}

struct NetArea {
    std::int64_t containers = 0;
    double net_area_m2 = 0.0;
};

inline NetArea required_net_area(std::int64_t n_miners, const LayoutParams& layout) {
    if (n_miners <= 0) return {};
    const std::int64_t containers = (n_miners + layout.miners_per_container - 1) / layout.miners_per_container;
    return {containers,
            static_cast<double>(containers) * layout.area_per_container_m2 * (1.0 + layout.margin_ratio)};
}

inline double gross_area(double power_mw, const LayoutParams& layout) {
    return power_mw * layout.gross_area_m2_per_mw;
}

/// L = A * P * M / L_amort, converted from KRW to USD.
inline double land_cost_annual(double gross_area_m2, double land_price_krw_m2, const CostParams& cost) {
    if (!(cost.fx_krw_per_usd > 0.0)) fail(ErrorKind::Validation, "fx_krw_per_usd must be > 0");
    const double krw = gross_area_m2 * land_price_krw_m2 * cost.market_multiplier / cost.land_amort_years;
    return krw / cost.fx_krw_per_usd;
}

/// Number of grid blocks needed for `mw` of new capacity (0 for 0 MW).
inline double grid_blocks(double mw, const CostParams& cost) {
    if (!(mw > 0.0)) return 0.0;
    return std::ceil(mw / cost.grid_block_mw);
}

inline double grid_fee(double mw, const CostParams& cost) { return grid_blocks(mw, cost) * cost.grid_fee_usd; }

/// Total installation cost for `k_sites` sites sharing `total_mw`.
inline double capex_total(double total_mw, std::int64_t k_sites, const CostParams& cost, double fee_usd) {
    return static_cast<double>(k_sites) * cost.fixed_capex_per_site_usd + total_mw * cost.variable_capex_per_mw_usd +
           fee_usd;
}

/// I_K = C_capex(MW, K) / Y_infra + K * O_fixed, with a pooled grid fee.
inline double infra_cost_annual(double total_mw, std::int64_t k_sites, const CostParams& cost) {
    if (k_sites < 1) fail(ErrorKind::Domain, "infrastructure cost needs at least one site");
    if (!(total_mw >= 0.0)) fail(ErrorKind::Domain, "total MW must be >= 0");
    return capex_total(total_mw, k_sites, cost, grid_fee(total_mw, cost)) / cost.infra_lifetime_years +
           static_cast<double>(k_sites) * cost.fixed_opex_per_site_usd;
}

inline double energy_cost_annual(double annual_energy_kwh, const CostParams& cost) {
    return annual_energy_kwh * cost.energy_price_usd_per_kwh;
}

/// Plan for a fixed machine count. Exposed so calibration fixtures can pin N.
inline RegionPlan build_region_plan_for(const std::string& code, std::int64_t n_miners, double land_price_krw_m2,
                                        const EconomicParams& p) {
    RegionPlan plan;
    plan.region_code = code;
    plan.n_miners = n_miners;
    plan.power_mw = static_cast<double>(n_miners) * p.miner.power_kw / 1000.0;
    plan.annual_energy_kwh = static_cast<double>(n_miners) * p.miner.annual_energy_kwh();
    plan.annual_revenue_usd = annual_revenue(n_miners, p.miner, p.network);
    plan.annual_depreciation_usd = annual_depreciation(n_miners, p.miner);
    plan.annual_energy_cost_usd = energy_cost_annual(plan.annual_energy_kwh, p.cost);
    const NetArea net = required_net_area(n_miners, p.layout);
    plan.containers = net.containers;
    plan.net_area_m2 = net.net_area_m2;
    plan.gross_area_m2 = gross_area(plan.power_mw, p.layout);
    plan.annual_land_cost_usd = land_cost_annual(plan.gross_area_m2, land_price_krw_m2, p.cost);
    return plan;
}

inline RegionPlan build_region_plan(const RegionRecord& region, const EconomicParams& p) {
    return build_region_plan_for(region.region_code, miner_capacity(region.annual_surplus_kwh, p.miner),
                                 region.land_price_krw_m2, p);
}

} // namespace minesite
