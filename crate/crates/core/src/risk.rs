//! Per-leg invasion risk: a nonindigenous gate, an introduction term driven by
//! discharge volume and voyage time, and an establishment term driven by
//! environmental mismatch between source and recipient port.
//!
//! ```text
//! P(spread)    = P(nonindigenous) · P(intro) · P(establish)
//! P(intro)     = ρ (1 − e^{−λD}) e^{−μΔt}
//! P(establish) = α exp(−½[(ΔT/δT)² + (ΔS/δS)²])
//! ```

use crate::params::RiskParams;

/// Everything the kernel needs to score one source→sink ballast transfer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegContext {
    pub discharge_tonnes: f64,
    pub duration_days: f64,
    /// |T_source − T_sink|, °C.
    pub temp_diff: f64,
    /// |S_source − S_sink|, ppt.
    pub sal_diff: f64,
    pub same_or_neighbor_ecoregion: bool,
    pub params: RiskParams,
}

/// 0 when the two ports share an ecoregion or are neighbours, 1 otherwise.
pub fn nonindigenous_indicator(ctx: &LegContext) -> u8 {
    if ctx.same_or_neighbor_ecoregion {
        0
    } else {
        1
    }
}

/// `(1 − e^{−λD}) e^{−μΔt}`: introduction probability before treatment.
fn untreated_intro(ctx: &LegContext) -> f64 {
    let p = &ctx.params;
    // -expm1 keeps full precision when λD is tiny.
    let released = -(-p.lambda * ctx.discharge_tonnes).exp_m1();
    released * (-p.mu * ctx.duration_days).exp()
}

pub fn intro_probability(ctx: &LegContext) -> f64 {
    ctx.params.rho * untreated_intro(ctx)
}

pub fn establish_probability(ctx: &LegContext) -> f64 {
    let p = &ctx.params;
    let zt = ctx.temp_diff / p.delta_t;
    let zs = ctx.sal_diff / p.delta_s;
    p.alpha * (-0.5 * (zt * zt + zs * zs)).exp()
}

/// Product of the three factors. ρ is applied last so the result is exactly
/// linear in it.
pub fn spread_probability(ctx: &LegContext) -> f64 {
    if nonindigenous_indicator(ctx) == 0 {
        return 0.0;
    }
    ctx.params.rho * (untreated_intro(ctx) * establish_probability(ctx))
}
