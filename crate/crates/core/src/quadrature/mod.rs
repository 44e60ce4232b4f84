//! Integrals over one curvature half-period `[β, α]`.
//!
//! Every integrand here carries the factor `1/√f_{p,a}(κ)`, which has inverse
//! square-root singularities at both simple roots. The substitution
//! `κ = β + (α−β) sin²t`, `t ∈ [0, π/2]`, turns `dκ/√((κ−β)(α−κ))` into `2 dt`,
//! leaving `1/√g` with `g = f / ((κ−β)(α−κ))` smooth and positive on the
//! closed interval.
//!
//! `g` and the closure denominator `a + ε₂p²κ^{2(p−1)}` are both evaluated in a
//! form anchored on the nearest root (differences of powers go through
//! `expm1`/`ln_1p`), so neither loses digits to cancellation close to the
//! endpoints. Each half `[0, π/4]`, `[π/4, π/2]` is parameterised by the
//! distance to its outer endpoint, and the panels are graded geometrically
//! towards that endpoint.

mod legendre;

pub use legendre::GaussLegendre;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{ElasticaError, Result};
use crate::lorentz::SpaceForm;
use crate::scalar::{self, ElasticaParams, RootData};

/// Relative bracket width used when solving for `β`, `α` ahead of a quadrature.
pub(crate) const QUADRATURE_ROOT_TOL: f64 = 1e-15;

/// Window fraction below which results are flagged as reduced confidence.
pub const REDUCED_CONFIDENCE_FRACTION: f64 = 1e-8;

const MIN_LEVELS: u32 = 4;
const MAX_LEVELS: u32 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Gauss–Legendre nodes per panel on the first pass.
    pub base_nodes: usize,
    /// How many times the per-panel node count may double.
    pub max_doublings: u32,
    /// Stop once successive estimates agree to this relative tolerance.
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { base_nodes: 64, max_doublings: 6, rel_tol: 1e-11 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base_nodes < 16 {
            return Err(ElasticaError::domain(format!("base_nodes must be >= 16, got {}", self.base_nodes)));
        }
        if self.max_doublings == 0 {
            return Err(ElasticaError::domain("max_doublings must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(ElasticaError::domain(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        Ok(())
    }
}

/// A converged integral together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Estimated relative error (difference of the last two passes).
    pub rel_change: f64,
    /// Total integrand evaluations on the final pass.
    pub nodes: usize,
    /// `a` lies within `10⁻⁸|a_*|` of either end of the window.
    pub reduced_confidence: bool,
}

/// Which end of `[0, π/2]` a substitution coordinate is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `t = d`, anchored at `β`.
    Low,
    /// `t = π/2 − d`, anchored at `α`.
    High,
}

/// Quantities at one point of the substitution, all cancellation-free.
#[derive(Debug, Clone, Copy)]
pub struct MapPoint {
    pub t: f64,
    pub kappa: f64,
    /// `κ − β`
    pub above_beta: f64,
    /// `α − κ`
    pub below_alpha: f64,
    /// `f / ((κ−β)(α−κ))`
    pub g: f64,
    /// `a + ε₂p²κ^{2(p−1)}`
    pub denom: f64,
    /// `sin t · cos t`
    pub sin_cos: f64,
}

/// The `sin²` substitution for one `(p, a)` together with its roots.
#[derive(Debug, Clone, Copy)]
pub struct HalfPeriodMap {
    params: ElasticaParams,
    roots: RootData,
    width: f64,
    sqrt_neg_a: f64,
    g_at_beta: f64,
    g_at_alpha: f64,
    low_levels: u32,
}

impl HalfPeriodMap {
    pub fn new(params: ElasticaParams, roots: RootData) -> Self {
        let (p, beta, alpha) = (params.p(), roots.beta, roots.alpha);
        let width = alpha - beta;
        let g_at_beta = scalar::f_pa_derivative(beta, &params) / width;
        let g_at_alpha = -scalar::f_pa_derivative(alpha, &params) / width;
        // For ε = 0 the denominator has a zero just below β when a → 0⁻; grade
        // the low end finely enough to resolve the resulting near-pole.
        let low_levels = match params.space() {
            SpaceForm::Hyperbolic => {
                let d0 = (p - 1.0).powi(2) * beta.powf(2.0 * p);
                let d1 = p * p * (2.0 * p - 2.0) * beta.powf(2.0 * p - 3.0);
                let w = (d0 / (d1 * width)).sqrt();
                let levels = (2.0 * PI / w).log2().ceil();
                if levels.is_finite() {
                    (levels.max(0.0) as u32).clamp(MIN_LEVELS, MAX_LEVELS)
                } else {
                    MAX_LEVELS
                }
            }
            SpaceForm::DeSitter => MIN_LEVELS,
        };
        HalfPeriodMap {
            params,
            roots,
            width,
            sqrt_neg_a: (-params.a()).sqrt(),
            g_at_beta,
            g_at_alpha,
            low_levels,
        }
    }

    /// Solve for the roots and build the map.
    pub fn for_params(params: ElasticaParams) -> Result<Self> {
        let roots = scalar::solve_roots(&params, QUADRATURE_ROOT_TOL)?;
        Ok(HalfPeriodMap::new(params, roots))
    }

    pub fn params(&self) -> &ElasticaParams {
        &self.params
    }

    pub fn roots(&self) -> &RootData {
        &self.roots
    }

    /// Evaluate at distance `d ∈ [0, π/4]` from the given end.
    pub fn at(&self, side: Side, d: f64) -> MapPoint {
        let (p, e2) = (self.params.p(), self.params.eps2());
        let (beta, alpha) = (self.roots.beta, self.roots.alpha);
        let (sd, cd) = d.sin_cos();
        let (s2, c2) = (sd * sd, cd * cd);
        let (t, above_beta, below_alpha) = match side {
            Side::Low => (d, self.width * s2, self.width * c2),
            Side::High => (FRAC_PI_2 - d, self.width * c2, self.width * s2),
        };
        let kappa = match side {
            Side::Low => beta + above_beta,
            Side::High => alpha - below_alpha,
        };
        let (anchor, log_ratio, offset) = match side {
            Side::Low => (beta, (above_beta / beta).ln_1p(), above_beta),
            Side::High => (alpha, (-below_alpha / alpha).ln_1p(), -below_alpha),
        };
        // f(κ) − f(anchor), which equals f(κ) up to the root residual
        let g = if offset == 0.0 {
            match side {
                Side::Low => self.g_at_beta,
                Side::High => self.g_at_alpha,
            }
        } else {
            let lo_pow = anchor.powf(2.0 * p - 2.0);
            let hi_pow = anchor.powf(2.0 * p);
            let df = e2
                * (p * p * lo_pow * ((2.0 * p - 2.0) * log_ratio).exp_m1()
                    - (p - 1.0).powi(2) * hi_pow * (2.0 * p * log_ratio).exp_m1());
            df / (above_beta * below_alpha)
        };
        let denom = match self.params.space() {
            SpaceForm::Hyperbolic => {
                let lb = (above_beta / beta).ln_1p();
                (p - 1.0).powi(2) * beta.powf(2.0 * p)
                    + p * p * beta.powf(2.0 * p - 2.0) * ((2.0 * p - 2.0) * lb).exp_m1()
            }
            SpaceForm::DeSitter => self.params.a() - p * p * kappa.powf(2.0 * p - 2.0),
        };
        MapPoint { t, kappa, above_beta, below_alpha, g, denom, sin_cos: sd * cd }
    }

    /// `ds/dt = 2p(p−1)κ^{p−2}/√g`.
    pub fn ds_dt(&self, pt: &MapPoint) -> f64 {
        let p = self.params.p();
        2.0 * p * (p - 1.0) * pt.kappa.powf(p - 2.0) / pt.g.sqrt()
    }

    /// `dθ/ds = ε₂(p−1)√(−a) κ^p / (ε₂a + p²κ^{2(p−1)})`.
    pub fn dtheta_ds(&self, pt: &MapPoint) -> f64 {
        let p = self.params.p();
        (p - 1.0) * self.sqrt_neg_a * pt.kappa.powf(p) / pt.denom
    }

    /// `|dκ/ds|` from the first integral: `√f / (p(p−1)κ^{p−2})`.
    pub fn kappa_prime_abs(&self, pt: &MapPoint) -> f64 {
        let p = self.params.p();
        let sqrt_f = pt.g.sqrt() * self.width * pt.sin_cos.abs();
        sqrt_f / (p * (p - 1.0) * pt.kappa.powf(p - 2.0))
    }

    /// `⟨𝒥,𝒥⟩ = ε₂a + p²κ^{2(p−1)}`.
    pub fn killing_norm(&self, pt: &MapPoint) -> f64 {
        self.params.eps2() * pt.denom
    }

    /// Panel edges on `[0, π/4]`, graded geometrically towards 0.
    pub fn panel_edges(&self, side: Side) -> Vec<f64> {
        let levels = match side {
            Side::Low => self.low_levels,
            Side::High => MIN_LEVELS,
        };
        let mut edges = Vec::with_capacity(levels as usize + 2);
        edges.push(0.0);
        for k in (0..=levels).rev() {
            edges.push(FRAC_PI_4 * 0.5f64.powi(k as i32));
        }
        edges
    }

    fn panels(&self, side: Side) -> Vec<(f64, f64)> {
        self.panel_edges(side).windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// `∫_{d0}^{d1} h dd` on one side with an `n`-point rule per piece, split
    /// wherever the span crosses a panel edge (`edges` from [`Self::panel_edges`]).
    pub fn integrate_span(
        &self,
        side: Side,
        edges: &[f64],
        d0: f64,
        d1: f64,
        rule: &GaussLegendre,
        h: impl Fn(&MapPoint) -> f64,
    ) -> f64 {
        if d0 == d1 {
            return 0.0;
        }
        let (lo, hi, sign) = if d0 < d1 { (d0, d1, 1.0) } else { (d1, d0, -1.0) };
        // first edge strictly above lo
        let start = edges.partition_point(|&e| e <= lo);
        let mut total = 0.0;
        let mut left = lo;
        for &e in &edges[start..] {
            if e >= hi {
                break;
            }
            total += rule.integrate(left, e, |d| h(&self.at(side, d)));
            left = e;
        }
        total += rule.integrate(left, hi, |d| h(&self.at(side, d)));
        sign * total
    }

    /// `∫_0^{π/2} h(t) dt` for an integrand given in terms of [`MapPoint`],
    /// refining per-panel node counts until two passes agree.
    pub fn integrate(&self, cfg: &QuadratureConfig, h: impl Fn(&MapPoint) -> f64) -> Result<QuadratureResult> {
        cfg.validate()?;
        let low = self.panels(Side::Low);
        let high = self.panels(Side::High);
        let pass = |n: usize| -> (f64, usize) {
            let rule = GaussLegendre::cached(n);
            let mut total = 0.0;
            let mut count = 0;
            for (side, panels) in [(Side::Low, &low), (Side::High, &high)] {
                for &(lo, hi) in panels.iter() {
                    total += rule.integrate(lo, hi, |d| h(&self.at(side, d)));
                    count += n;
                }
            }
            (total, count)
        };
        let mut n = cfg.base_nodes;
        let (mut prev, _) = pass(n);
        let mut change = f64::INFINITY;
        for _ in 0..cfg.max_doublings {
            n *= 2;
            let (cur, count) = pass(n);
            change = (cur - prev).abs() / cur.abs().max(f64::MIN_POSITIVE);
            if !cur.is_finite() {
                return Err(ElasticaError::Guard(format!(
                    "non-finite quadrature value for p = {}, a = {}",
                    self.params.p(),
                    self.params.a()
                )));
            }
            if change <= cfg.rel_tol {
                return Ok(QuadratureResult {
                    value: cur,
                    rel_change: change,
                    nodes: count,
                    reduced_confidence: reduced_confidence(&self.params),
                });
            }
            prev = cur;
        }
        Err(ElasticaError::NoConvergence {
            what: "half-period quadrature",
            iterations: cfg.max_doublings as usize,
            last_change: change,
        })
    }
}

fn reduced_confidence(params: &ElasticaParams) -> bool {
    let frac = params.window_fraction();
    !(REDUCED_CONFIDENCE_FRACTION..=1.0 - REDUCED_CONFIDENCE_FRACTION).contains(&frac)
}

/// The angle advanced per curvature period, `Λ_p(a)`.
pub fn lambda_p(params: &ElasticaParams, cfg: &QuadratureConfig) -> Result<f64> {
    lambda_p_detailed(params, cfg).map(|r| r.value)
}

pub fn lambda_p_detailed(params: &ElasticaParams, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let map = HalfPeriodMap::for_params(*params)?;
    lambda_with_map(&map, cfg)
}

pub(crate) fn lambda_with_map(map: &HalfPeriodMap, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    // Λ = 2 ∫ θ' ds over [β, α]
    let mut r = map.integrate(cfg, |pt| map.dtheta_ds(pt) * map.ds_dt(pt))?;
    r.value *= 2.0;
    Ok(r)
}

/// The curvature period `ϱ(a)`.
pub fn period(params: &ElasticaParams, cfg: &QuadratureConfig) -> Result<f64> {
    period_detailed(params, cfg).map(|r| r.value)
}

pub fn period_detailed(params: &ElasticaParams, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let map = HalfPeriodMap::for_params(*params)?;
    let mut r = map.integrate(cfg, |pt| map.ds_dt(pt))?;
    r.value *= 2.0;
    Ok(r)
}

/// `Θ_p = ∫ κ^p ds` over `m` curvature periods.
///
/// On both space forms this reduces to `2mp(p−1) ∫_β^α κ^{2(p−1)}/√f dκ`.
pub fn energy(params: &ElasticaParams, m: u32, cfg: &QuadratureConfig) -> Result<f64> {
    energy_detailed(params, m, cfg).map(|r| r.value)
}

pub fn energy_detailed(params: &ElasticaParams, m: u32, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    if m == 0 {
        return Err(ElasticaError::domain("energy needs m >= 1"));
    }
    let map = HalfPeriodMap::for_params(*params)?;
    let p = params.p();
    let mut r = map.integrate(cfg, |pt| pt.kappa.powf(p) * map.ds_dt(pt))?;
    r.value *= 2.0 * m as f64;
    Ok(r)
}

/// Closed-form limit of the energy at the circle end of the window, `√(−2a_*) m π`.
pub fn energy_limit(p: f64, space: SpaceForm, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(ElasticaError::domain("energy_limit needs m >= 1"));
    }
    let s = scalar::a_star(p, space)?;
    Ok((-2.0 * s).sqrt() * m as f64 * PI)
}

/// The oscillation limit `√2 π` of `Λ_p` at `a_*`.
pub const LAMBDA_AT_A_STAR: f64 = SQRT_2 * PI;
/// The limit `π` of `Λ_p` as `a → 0⁻`.
pub const LAMBDA_AT_ZERO: f64 = PI;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::a_star;

    const H2: SpaceForm = SpaceForm::Hyperbolic;
    const H12: SpaceForm = SpaceForm::DeSitter;

    fn params(space: SpaceForm, p: f64, frac: f64) -> ElasticaParams {
        let s = a_star(p, space).unwrap();
        ElasticaParams::new(space, p, s + frac * s.abs()).unwrap()
    }

    /// Plain Gauss–Legendre on the sin² substitution with direct `f`, as a
    /// reference for moderate `a` where no cancellation arises.
    fn naive_lambda(pr: &ElasticaParams) -> f64 {
        let r = scalar::solve_roots(pr, 1e-15).unwrap();
        let (p, a, e2) = (pr.p(), pr.a(), pr.eps2());
        let rule = GaussLegendre::new(400);
        let w = r.alpha - r.beta;
        let v = rule.integrate(0.0, FRAC_PI_2, |t| {
            let k = r.beta + w * t.sin().powi(2);
            let f = scalar::f_pa(k, pr).unwrap();
            let g = f / ((k - r.beta) * (r.alpha - k));
            2.0 * k.powf(2.0 * p - 2.0) / ((a + e2 * p * p * k.powf(2.0 * p - 2.0)) * g.sqrt())
        });
        2.0 * p * (p - 1.0).powi(2) * (-a).sqrt() * v
    }

    #[test]
    fn anchored_g_matches_direct_evaluation_in_the_interior() {
        let pr = params(H2, 2.5, 0.4);
        let map = HalfPeriodMap::for_params(pr).unwrap();
        let r = map.roots();
        for side in [Side::Low, Side::High] {
            for i in 1..10 {
                let pt = map.at(side, FRAC_PI_4 * i as f64 / 10.0);
                let direct = scalar::f_pa(pt.kappa, &pr).unwrap() / ((pt.kappa - r.beta) * (r.alpha - pt.kappa));
                assert!((pt.g - direct).abs() < 1e-10 * direct, "{side:?} {i}: {} vs {direct}", pt.g);
                let d = pr.a() + p2(pr.p()) * pt.kappa.powf(2.0 * pr.p() - 2.0);
                assert!((pt.denom - d).abs() < 1e-12 * d.abs());
            }
        }
    }

    fn p2(p: f64) -> f64 {
        p * p
    }

    #[test]
    fn endpoint_limits_of_g_are_continuous() {
        for pr in [params(H2, 1.5, 0.3), params(H12, -2.0, 0.6)] {
            let map = HalfPeriodMap::for_params(pr).unwrap();
            for side in [Side::Low, Side::High] {
                let at0 = map.at(side, 0.0).g;
                let near = map.at(side, 1e-7).g;
                assert!((at0 - near).abs() < 1e-9 * at0, "{side:?}: {at0} vs {near}");
            }
        }
    }

    #[test]
    fn lambda_matches_naive_reference_for_moderate_a() {
        for pr in [params(H2, 2.0, 0.5), params(H2, 3.7, 0.2), params(H12, -1.0, 0.5), params(H12, -4.0, 0.7)] {
            let got = lambda_p(&pr, &QuadratureConfig::default()).unwrap();
            let want = naive_lambda(&pr);
            assert!((got - want).abs() < 1e-9 * want, "p={}: {got} vs {want}", pr.p());
        }
    }

    #[test]
    fn lambda_inside_open_range() {
        for (space, p) in [(H2, 1.2), (H2, 2.0), (H2, 5.0), (H12, -0.3), (H12, -1.0), (H12, -6.0)] {
            for frac in [1e-4, 0.1, 0.5, 0.9, 1.0 - 1e-4] {
                let l = lambda_p(&params(space, p, frac), &QuadratureConfig::default()).unwrap();
                assert!(l > PI && l < LAMBDA_AT_A_STAR, "p={p} frac={frac}: {l}");
            }
        }
    }

    #[test]
    fn energy_limit_examples() {
        let want = 6.0 * SQRT_2 * PI;
        assert!((energy_limit(-1.0, H12, 3).unwrap() - want).abs() < 1e-13);
        let want = (3.0 * 3f64.sqrt()).sqrt() * PI;
        assert!((energy_limit(1.5, H2, 1).unwrap() - want).abs() < 1e-13);
        let want = 2.0 * SQRT_2 * PI;
        assert!((energy_limit(2.0, H2, 1).unwrap() - want).abs() < 1e-13);
        assert!(energy_limit(0.5, H2, 1).is_err());
        assert!(energy_limit(2.0, H2, 0).is_err());
    }

    #[test]
    fn energy_near_a_star_approaches_limit() {
        for (space, p) in [(H2, 1.5), (H12, -1.0), (H2, 4.0)] {
            let pr = params(space, p, 1e-6);
            let e = energy(&pr, 2, &QuadratureConfig::default()).unwrap();
            let lim = energy_limit(p, space, 2).unwrap();
            assert!((e - lim).abs() < 1e-3 * lim, "p={p}: {e} vs {lim}");
        }
    }

    #[test]
    fn period_converges_near_a_star() {
        let mut vals = Vec::new();
        for k in 3..=9 {
            let pr = params(H2, 2.0, 10f64.powi(-k));
            vals.push(period(&pr, &QuadratureConfig::default()).unwrap());
        }
        for w in vals.windows(2) {
            assert!(w[1].is_finite() && w[1] > 0.0);
        }
        let last = vals.len() - 1;
        assert!((vals[last] - vals[last - 1]).abs() < 1e-5 * vals[last]);
    }

    #[test]
    fn reduced_confidence_is_flagged() {
        let cfg = QuadratureConfig::default();
        assert!(lambda_p_detailed(&params(H2, 2.0, 1e-9), &cfg).unwrap().reduced_confidence);
        assert!(!lambda_p_detailed(&params(H2, 2.0, 1e-3), &cfg).unwrap().reduced_confidence);
        assert!(lambda_p_detailed(&params(H12, -1.0, 1.0 - 1e-9), &cfg).unwrap().reduced_confidence);
    }

    #[test]
    fn rejects_bad_config() {
        let pr = params(H2, 2.0, 0.5);
        let cfg = QuadratureConfig { base_nodes: 8, ..Default::default() };
        assert!(lambda_p(&pr, &cfg).is_err());
        let cfg = QuadratureConfig { rel_tol: 0.0, ..Default::default() };
        assert!(lambda_p(&pr, &cfg).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let pr = params(H2, 2.0, 0.5);
        let cfg = QuadratureConfig { base_nodes: 16, max_doublings: 1, rel_tol: 1e-300 };
        assert!(matches!(lambda_p(&pr, &cfg), Err(ElasticaError::NoConvergence { .. })));
    }
}
