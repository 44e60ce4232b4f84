//! Curvature profile, angular progression and the explicit curve in 𝕃³,
//! together with circles, bounding parallels and the closure solver.
//!
//! One half-period `[β, α]` is tabulated on a Chebyshev grid in the
//! substitution angle; later half-periods follow from the reflection
//! `κ(ϱ−s) = κ(s)` and from rotating by `Λ_p(a)` per period.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ElasticaError, Result};
use crate::lorentz::{self, SpaceForm, Vec3L};
use crate::quadrature::{self, GaussLegendre, HalfPeriodMap, MapPoint, QuadratureConfig, Side};
use crate::scalar::{self, ElasticaParams, RootData};

/// Samples per half-period used when none is given.
pub const DEFAULT_SAMPLES: usize = 256;
/// Closure solver stops once `|Λ − 2πn/m|` is below this.
pub const CLOSURE_TOL: f64 = 1e-10;

const POINT_NODES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub s: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
    pub theta: f64,
    pub gamma: Vec3L,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub s: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleData {
    pub space: SpaceForm,
    pub p: f64,
    pub kappa: f64,
    pub radius_l3: f64,
    pub height_z: f64,
}

impl CircleData {
    /// Unit-speed point of the parallel at arc length `s`.
    pub fn point(&self, s: f64) -> Vec3L {
        if self.radius_l3 == 0.0 {
            return Vec3L::new(0.0, 0.0, self.height_z);
        }
        let (sn, cs) = (s / self.radius_l3).sin_cos();
        Vec3L::new(self.radius_l3 * cs, self.radius_l3 * sn, self.height_z)
    }

    pub fn length(&self) -> f64 {
        2.0 * PI * self.radius_l3
    }
}

/// The constant-curvature solution: a parallel of the quadric.
pub fn circle(p: f64, space: SpaceForm) -> Result<CircleData> {
    space.check_exponent(p)?;
    let e2 = space.eps2();
    let kappa = scalar::kappa_c(p)?;
    let radius_l3 = (e2 * (p - 1.0)).sqrt();
    let h = (e2 * p).sqrt();
    let height_z = match space {
        SpaceForm::Hyperbolic => h,
        SpaceForm::DeSitter => -h,
    };
    Ok(CircleData { space, p, kappa, radius_l3, height_z })
}

/// Heights `pκ^{p−1}/√(−a)` of the parallels touched at `κ = β` and `κ = α`, ordered.
pub fn bounding_parallels(params: &ElasticaParams, roots: &RootData) -> (f64, f64) {
    let p = params.p();
    let r = (-params.a()).sqrt();
    let h1 = p * roots.beta.powf(p - 1.0) / r;
    let h2 = p * roots.alpha.powf(p - 1.0) / r;
    (h1.min(h2), h1.max(h2))
}

/// Cumulative arc length and angle from one end of the half-period.
#[derive(Debug, Clone)]
struct SideTable {
    d: Vec<f64>,
    s: Vec<f64>,
    theta: Vec<f64>,
    edges: Vec<f64>,
}

/// A traced curve over `m` curvature periods, with `θ(0) = 0` and `κ(0) = β`.
#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub params: ElasticaParams,
    pub roots: RootData,
    pub period_rho: f64,
    /// `θ(ϱ) − θ(0)` from the tabulated half-period.
    pub lambda: f64,
    pub m: u32,
    pub samples_per_half: usize,
    pub samples: Vec<CurveSample>,
    #[serde(skip)]
    map: HalfPeriodMap,
    #[serde(skip)]
    low: SideTable,
    #[serde(skip)]
    high: SideTable,
    #[serde(skip)]
    rule: Arc<GaussLegendre>,
    #[serde(skip)]
    point_rule: Arc<GaussLegendre>,
}

fn chebyshev_side_nodes(n_half: usize) -> Vec<f64> {
    let n = n_half as f64;
    let mut d: Vec<f64> = (0..=n_half / 2).map(|j| FRAC_PI_4 * (1.0 - (j as f64 * PI / n).cos())).collect();
    if let Some(last) = d.last_mut() {
        *last = FRAC_PI_4;
    }
    d
}

impl Trace {
    /// Trace `m` periods with `n_half` Chebyshev samples per half-period.
    pub fn build(
        params: ElasticaParams,
        roots: RootData,
        m: u32,
        n_half: usize,
        cfg: &QuadratureConfig,
    ) -> Result<Trace> {
        cfg.validate()?;
        if m == 0 {
            return Err(ElasticaError::domain("trace needs m >= 1"));
        }
        if n_half < 8 || !n_half.is_multiple_of(2) {
            return Err(ElasticaError::domain(format!(
                "samples per half-period must be even and >= 8, got {n_half}"
            )));
        }
        let map = HalfPeriodMap::new(params, roots);
        let rule = GaussLegendre::cached(cfg.base_nodes);
        let point_rule = GaussLegendre::cached(POINT_NODES);
        let nodes = chebyshev_side_nodes(n_half);
        let table = |side: Side| -> Result<SideTable> {
            let edges = map.panel_edges(side);
            let mut s = vec![0.0; nodes.len()];
            let mut theta = vec![0.0; nodes.len()];
            for j in 0..nodes.len() {
                let pt = map.at(side, nodes[j]);
                guard_denominator(&map, &pt)?;
                if j + 1 < nodes.len() {
                    let (d0, d1) = (nodes[j], nodes[j + 1]);
                    let ds = map.integrate_span(side, &edges, d0, d1, &rule, |q| map.ds_dt(q));
                    let dth = map.integrate_span(side, &edges, d0, d1, &rule, |q| map.dtheta_ds(q) * map.ds_dt(q));
                    s[j + 1] = s[j] + ds;
                    theta[j + 1] = theta[j] + dth;
                }
            }
            Ok(SideTable { d: nodes.clone(), s, theta, edges })
        };
        let low = table(Side::Low)?;
        let high = table(Side::High)?;
        let s_half = low.s.last().unwrap() + high.s.last().unwrap();
        let theta_half = low.theta.last().unwrap() + high.theta.last().unwrap();
        if !(s_half.is_finite() && theta_half.is_finite() && s_half > 0.0) {
            return Err(ElasticaError::Guard(format!(
                "non-finite half-period table for p = {}, a = {}",
                params.p(),
                params.a()
            )));
        }
        let mut trace = Trace {
            params,
            roots,
            period_rho: 2.0 * s_half,
            lambda: 2.0 * theta_half,
            m,
            samples_per_half: n_half,
            samples: Vec::new(),
            map,
            low,
            high,
            rule,
            point_rule,
        };
        trace.samples = trace.assemble_samples();
        Ok(trace)
    }

    fn s_half(&self) -> f64 {
        0.5 * self.period_rho
    }

    /// Samples of the first half-period in increasing `s`: `(s, θ, point)`.
    fn half_nodes(&self) -> Vec<(f64, f64, MapPoint)> {
        let (sh, th) = (self.s_half(), 0.5 * self.lambda);
        let mut out = Vec::with_capacity(self.samples_per_half + 1);
        for j in 0..self.low.d.len() {
            out.push((self.low.s[j], self.low.theta[j], self.map.at(Side::Low, self.low.d[j])));
        }
        for j in (0..self.high.d.len() - 1).rev() {
            out.push((sh - self.high.s[j], th - self.high.theta[j], self.map.at(Side::High, self.high.d[j])));
        }
        out
    }

    fn assemble_samples(&self) -> Vec<CurveSample> {
        let half = self.half_nodes();
        let (rho, lam) = (self.period_rho, self.lambda);
        let n = half.len() - 1;
        let mut out = Vec::with_capacity(2 * n * self.m as usize + 1);
        for k in 0..self.m {
            let (s0, t0) = (k as f64 * rho, k as f64 * lam);
            for (s, th, pt) in &half {
                out.push(self.sample(pt, s0 + s, t0 + th, 1.0));
            }
            for (s, th, pt) in half[1..n].iter().rev() {
                out.push(self.sample(pt, s0 + rho - s, t0 + lam - th, -1.0));
            }
        }
        let (_, _, pt) = &half[0];
        out.push(self.sample(pt, self.m as f64 * rho, self.m as f64 * lam, 1.0));
        out
    }

    fn sample(&self, pt: &MapPoint, s: f64, theta: f64, sign: f64) -> CurveSample {
        CurveSample {
            s,
            kappa: pt.kappa,
            kappa_prime: sign * self.map.kappa_prime_abs(pt),
            theta,
            gamma: self.gamma_at(pt, theta),
        }
    }

    fn gamma_at(&self, pt: &MapPoint, theta: f64) -> Vec3L {
        let p = self.params.p();
        let r = (-self.params.a()).sqrt();
        let radius = self.map.killing_norm(pt).sqrt() / r;
        let z = p * pt.kappa.powf(p - 1.0) / r;
        let (sn, cs) = theta.sin_cos();
        Vec3L::new(radius * cs, radius * sn, z)
    }

    pub fn params(&self) -> &ElasticaParams {
        &self.params
    }

    pub fn map(&self) -> &HalfPeriodMap {
        &self.map
    }

    /// The curve at an arbitrary arc length, continued periodically beyond `[0, mϱ]`.
    pub fn point_at(&self, s: f64) -> CurveSample {
        let rho = self.period_rho;
        let k = (s / rho).floor();
        let mut u = s - k * rho;
        if u < 0.0 {
            u = 0.0;
        }
        let (v, second) = if u > self.s_half() { (rho - u, true) } else { (u, false) };
        let (pt, theta_v) = self.locate_half(v);
        let theta_u = if second { self.lambda - theta_v } else { theta_v };
        let sign = if second { -1.0 } else { 1.0 };
        self.sample(&pt, s, k * self.lambda + theta_u, sign)
    }

    /// Point and angle at arc length `v ∈ [0, ϱ/2]` from `β`.
    fn locate_half(&self, v: f64) -> (MapPoint, f64) {
        let low_end = *self.low.s.last().unwrap();
        if v <= low_end {
            let (pt, th) = self.locate_side(Side::Low, &self.low, v);
            (pt, th)
        } else {
            let sigma = (self.s_half() - v).max(0.0);
            let (pt, th) = self.locate_side(Side::High, &self.high, sigma);
            (pt, 0.5 * self.lambda - th)
        }
    }

    /// Invert the cumulative arc length on one side by safeguarded Newton.
    fn locate_side(&self, side: Side, tab: &SideTable, sigma: f64) -> (MapPoint, f64) {
        let last = tab.s.len() - 1;
        let j = tab.s.partition_point(|&x| x <= sigma).saturating_sub(1).min(last - 1);
        let (mut lo, mut hi) = (tab.d[j], tab.d[j + 1]);
        let (s_lo, s_hi) = (tab.s[j], tab.s[j + 1]);
        let rule = &self.point_rule;
        let ds = |q: &MapPoint| self.map.ds_dt(q);
        let mut d = if s_hi > s_lo { lo + (sigma - s_lo) / (s_hi - s_lo) * (hi - lo) } else { lo };
        let mut s_d = s_lo + self.map.integrate_span(side, &tab.edges, lo, d, rule, ds);
        let tol = 4.0 * f64::EPSILON * self.period_rho;
        for _ in 0..60 {
            let f = s_d - sigma;
            if f.abs() <= tol {
                break;
            }
            if f > 0.0 {
                hi = d;
            } else {
                lo = d;
            }
            let slope = self.map.ds_dt(&self.map.at(side, d));
            let mut next = d - f / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if next == d {
                break;
            }
            s_d += self.map.integrate_span(side, &tab.edges, d, next, rule, ds);
            d = next;
        }
        let theta = tab.theta[j]
            + self.map.integrate_span(side, &tab.edges, tab.d[j], d, &self.rule, |q| {
                self.map.dtheta_ds(q) * self.map.ds_dt(q)
            });
        (self.map.at(side, d), theta)
    }

    /// `(s, κ, κ′)` on a uniform grid of `n_per_period` steps per period over `periods` periods.
    pub fn uniform_profile(&self, n_per_period: usize, periods: u32) -> Vec<ProfilePoint> {
        let h = self.period_rho / n_per_period as f64;
        (0..=n_per_period * periods as usize)
            .map(|i| {
                let c = self.point_at(i as f64 * h);
                ProfilePoint { s: c.s, kappa: c.kappa, kappa_prime: c.kappa_prime }
            })
            .collect()
    }

    pub fn profile(&self) -> Vec<ProfilePoint> {
        self.samples.iter().map(|c| ProfilePoint { s: c.s, kappa: c.kappa, kappa_prime: c.kappa_prime }).collect()
    }

    /// Largest Euclidean distance of the trace from the rotation axis in 𝕃³.
    pub fn max_planar_radius(&self) -> f64 {
        self.samples.iter().map(|c| c.gamma.planar_radius()).fold(0.0, f64::max)
    }

    /// Largest radius in the disk model of the space form.
    pub fn max_model_radius(&self) -> Result<f64> {
        let mut best = 0.0f64;
        for c in &self.samples {
            let (u, w) = match self.params.space() {
                SpaceForm::Hyperbolic => lorentz::poincare_project(c.gamma)?,
                SpaceForm::DeSitter => lorentz::punctured_project(c.gamma)?,
            };
            best = best.max(u.hypot(w));
        }
        Ok(best)
    }

    /// `max |γ(mϱ) − γ(0)|` componentwise.
    pub fn closure_defect(&self) -> f64 {
        let first = self.samples.first().unwrap().gamma;
        let last = self.samples.last().unwrap().gamma;
        (last - first).max_abs()
    }
}

fn guard_denominator(map: &HalfPeriodMap, pt: &MapPoint) -> Result<()> {
    let j = map.killing_norm(pt);
    if !(j > 0.0) {
        return Err(ElasticaError::Guard(format!(
            "<J,J> = {j} is not positive at kappa = {} (p = {}, a = {})",
            pt.kappa,
            map.params().p(),
            map.params().a()
        )));
    }
    Ok(())
}

/// Trace `m` periods of the curve for `params`.
pub fn trace(params: &ElasticaParams, m: u32, n_half: usize, cfg: &QuadratureConfig) -> Result<Trace> {
    let roots = scalar::solve_roots(params, quadrature::QUADRATURE_ROOT_TOL)?;
    Trace::build(*params, roots, m, n_half, cfg)
}

/// `(s, κ, κ′)` at the Chebyshev samples over `periods` periods.
pub fn curvature_profile(
    params: &ElasticaParams,
    roots: &RootData,
    n_half: usize,
    periods: u32,
    cfg: &QuadratureConfig,
) -> Result<Vec<ProfilePoint>> {
    Ok(Trace::build(*params, *roots, periods, n_half, cfg)?.profile())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureResult {
    pub space: SpaceForm,
    pub p: f64,
    pub n: u32,
    pub m: u32,
    pub q: f64,
    pub a_q: f64,
    pub lambda_at_aq: f64,
    pub target: f64,
    pub closure_defect: f64,
    pub iterations: usize,
    /// Every `Λ` evaluated during bracketing and bisection decreased with `a`.
    pub monotone_samples: bool,
    pub reduced_confidence: bool,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `gcd(n, m) = 1` and `m < 2n < √2·m`.
pub fn check_closure_window(n: u32, m: u32) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(ElasticaError::ClosureWindow { n, m, reason: "n and m must be positive" });
    }
    if gcd(n, m) != 1 {
        return Err(ElasticaError::ClosureWindow { n, m, reason: "n and m must be relatively prime" });
    }
    if m >= 2 * n {
        return Err(ElasticaError::ClosureWindow { n, m, reason: "need m < 2n" });
    }
    let (n2, m2) = (n as u64 * n as u64, m as u64 * m as u64);
    if 2 * n2 >= m2 {
        return Err(ElasticaError::ClosureWindow { n, m, reason: "need 2n < sqrt(2) m" });
    }
    Ok(())
}

/// Solve `Λ_p(a) = 2πn/m` for `a` and trace the closed curve.
pub fn close_and_trace(
    p: f64,
    space: SpaceForm,
    n: u32,
    m: u32,
    n_half: usize,
    cfg: &QuadratureConfig,
) -> Result<(ClosureResult, Trace)> {
    check_closure_window(n, m)?;
    space.check_exponent(p)?;
    let s = scalar::a_star(p, space)?;
    let target = 2.0 * PI * n as f64 / m as f64;
    let mut seen: Vec<(f64, f64)> = Vec::new();
    let mut lam = |a: f64| -> Result<f64> {
        let v = quadrature::lambda_p(&ElasticaParams::new(space, p, a)?, cfg)?;
        seen.push((a, v));
        Ok(v)
    };

    let mut straddle = |from_star: bool| -> Result<(f64, f64)> {
        let mut delta = 1e-3;
        let mut last = (f64::NAN, f64::NAN);
        while delta >= 1e-12 {
            let a = if from_star { s + delta * s.abs() } else { -delta * s.abs() };
            let v = lam(a)?;
            last = (a, v);
            if (from_star && v > target) || (!from_star && v < target) {
                return Ok((a, v));
            }
            delta /= 10.0;
        }
        Err(ElasticaError::Bracket {
            what: "closure condition",
            detail: format!(
                "Lambda({:e}) = {} does not straddle target {} (from the {} end)",
                last.0,
                last.1,
                target,
                if from_star { "a_*" } else { "zero" }
            ),
        })
    };
    let (mut lo, _) = straddle(true)?;
    let (mut hi, _) = straddle(false)?;

    let mut best = (f64::NAN, f64::INFINITY);
    let mut iterations = 0;
    while iterations < 300 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = lam(mid)?;
        if (v - target).abs() < (best.1 - target).abs() {
            best = (mid, v);
        }
        if (v - target).abs() <= CLOSURE_TOL {
            break;
        }
        if v > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !((best.1 - target).abs() <= CLOSURE_TOL) {
        return Err(ElasticaError::NoConvergence {
            what: "closure bisection",
            iterations,
            last_change: (best.1 - target).abs(),
        });
    }
    seen.sort_by(|x, y| x.0.total_cmp(&y.0));
    let monotone_samples = seen.windows(2).all(|w| w[1].1 < w[0].1 || w[1].0 == w[0].0);

    let params = ElasticaParams::new(space, p, best.0)?;
    let tr = trace(&params, m, n_half, cfg)?;
    let frac = params.window_fraction();
    let result = ClosureResult {
        space,
        p,
        n,
        m,
        q: n as f64 / m as f64,
        a_q: best.0,
        lambda_at_aq: best.1,
        target,
        closure_defect: tr.closure_defect(),
        iterations,
        monotone_samples,
        reduced_confidence: !(quadrature::REDUCED_CONFIDENCE_FRACTION..=1.0 - quadrature::REDUCED_CONFIDENCE_FRACTION).contains(&frac),
    };
    Ok((result, tr))
}

/// [`close_and_trace`] at the default resolution, keeping only the summary.
pub fn solve_closure(p: f64, space: SpaceForm, n: u32, m: u32, cfg: &QuadratureConfig) -> Result<ClosureResult> {
    close_and_trace(p, space, n, m, DEFAULT_SAMPLES, cfg).map(|(r, _)| r)
}

/// One closed `(n, m)` curve per exponent, solved in parallel; order follows `p_list`.
pub fn family_evolution(
    space: SpaceForm,
    n: u32,
    m: u32,
    p_list: &[f64],
    n_half: usize,
    cfg: &QuadratureConfig,
) -> Vec<Result<(ClosureResult, Trace)>> {
    p_list.par_iter().map(|&p| close_and_trace(p, space, n, m, n_half, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::minkowski_inner;

    const H2: SpaceForm = SpaceForm::Hyperbolic;
    const H12: SpaceForm = SpaceForm::DeSitter;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn circle_examples() {
        let c = circle(2.0, H2).unwrap();
        assert!((c.kappa - 2f64.sqrt()).abs() < 1e-15);
        assert!((c.radius_l3 - 1.0).abs() < 1e-15);
        assert!((c.height_z - 2f64.sqrt()).abs() < 1e-15);
        let c = circle(-1.0, H12).unwrap();
        assert!((c.kappa - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((c.radius_l3 - 2f64.sqrt()).abs() < 1e-15);
        assert!((c.height_z + 1.0).abs() < 1e-15);
        let c = circle(1.0 + 1e-12, H2).unwrap();
        assert!(c.radius_l3 < 1e-5 && (c.height_z - 1.0).abs() < 1e-11);
        assert!(circle(0.5, H2).is_err());
        assert!(circle(0.5, H12).is_err());
        for (p, sp) in [(1.7, H2), (-3.0, H12)] {
            let c = circle(p, sp).unwrap();
            let g = c.point(0.3);
            assert!((minkowski_inner(g, g) + sp.eps2()).abs() < 1e-13);
        }
    }

    #[test]
    fn bounding_parallels_for_p2() {
        let pr = ElasticaParams::new(H2, 2.0, -1.0).unwrap();
        let r = scalar::solve_roots(&pr, 1e-15).unwrap();
        let (lo, hi) = bounding_parallels(&pr, &r);
        assert!((lo - 2.0 * (2.0 - 3f64.sqrt()).sqrt()).abs() < 1e-13);
        assert!((hi - 2.0 * (2.0 + 3f64.sqrt()).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn trace_turning_points_and_period() {
        let pr = ElasticaParams::new(H2, 2.0, -1.0).unwrap();
        let t = trace(&pr, 2, 64, &cfg()).unwrap();
        let first = t.samples[0];
        assert_eq!(first.kappa, t.roots.beta);
        assert_eq!(first.kappa_prime, 0.0);
        let mid = t.samples[64];
        assert!((mid.s - 0.5 * t.period_rho).abs() < 1e-14);
        assert!((mid.kappa - t.roots.alpha).abs() < 1e-14);
        assert!(mid.kappa_prime.abs() < 1e-12);
        assert_eq!(t.samples.len(), 2 * 2 * 64 + 1);
        let rho = quadrature::period(&pr, &cfg()).unwrap();
        assert!((t.period_rho - rho).abs() < 1e-11 * rho);
        let lam = quadrature::lambda_p(&pr, &cfg()).unwrap();
        assert!((t.lambda - lam).abs() < 1e-11);
        for w in t.samples.windows(2) {
            assert!(w[1].s > w[0].s && w[1].theta > w[0].theta);
        }
    }

    #[test]
    fn point_at_reproduces_samples() {
        for pr in [ElasticaParams::new(H2, 1.5, -1.0).unwrap(), ElasticaParams::new(H12, -1.0, -2.5).unwrap()] {
            let t = trace(&pr, 2, 32, &cfg()).unwrap();
            for c in t.samples.iter().step_by(5) {
                let q = t.point_at(c.s);
                assert!((q.kappa - c.kappa).abs() < 1e-12, "{} vs {}", q.kappa, c.kappa);
                assert!((q.theta - c.theta).abs() < 1e-12);
                assert!((q.gamma - c.gamma).max_abs() < 1e-11);
                assert!((q.kappa_prime - c.kappa_prime).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn quadric_and_sign_of_z() {
        let pr = ElasticaParams::new(H12, -2.0, -5.0).unwrap();
        let t = trace(&pr, 1, 32, &cfg()).unwrap();
        for c in &t.samples {
            assert!(c.gamma.z < 0.0);
            assert!((minkowski_inner(c.gamma, c.gamma) - 1.0).abs() < 1e-12 * (1.0 + c.gamma.z.powi(2)));
        }
        let (lo, hi) = bounding_parallels(&pr, &t.roots);
        let zmin = t.samples.iter().map(|c| c.gamma.z).fold(f64::INFINITY, f64::min);
        let zmax = t.samples.iter().map(|c| c.gamma.z).fold(f64::NEG_INFINITY, f64::max);
        assert!((zmin - lo).abs() < 1e-12 && (zmax - hi).abs() < 1e-12);
    }

    #[test]
    fn closure_window() {
        assert!(check_closure_window(2, 3).is_ok());
        assert!(check_closure_window(6, 11).is_ok());
        assert!(check_closure_window(1, 2).is_err());
        assert!(check_closure_window(1, 1).is_err());
        assert!(check_closure_window(4, 6).is_err());
        assert!(check_closure_window(0, 3).is_err());
        // 2n < √2 m fails for (5, 7): 10 > 9.899
        assert!(check_closure_window(5, 7).is_err());
    }

    #[test]
    fn closure_for_two_thirds() {
        let (r, t) = close_and_trace(1.5, H2, 2, 3, DEFAULT_SAMPLES, &cfg()).unwrap();
        assert!((r.lambda_at_aq - 4.0 * PI / 3.0).abs() <= CLOSURE_TOL);
        assert!(r.closure_defect < 1e-6, "{}", r.closure_defect);
        assert!(r.monotone_samples);
        assert!((t.lambda - r.target).abs() < 1e-9);
    }

    #[test]
    fn inadmissible_inputs() {
        assert!(solve_closure(0.5, H2, 2, 3, &cfg()).is_err());
        assert!(solve_closure(2.0, H2, 1, 2, &cfg()).is_err());
        let pr = ElasticaParams::new(H2, 2.0, -1.0).unwrap();
        assert!(trace(&pr, 0, 32, &cfg()).is_err());
        assert!(trace(&pr, 1, 7, &cfg()).is_err());
    }
}
