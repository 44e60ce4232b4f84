//! Pointwise functions of the curvature: the admissibility boundary `a_*`,
//! the radicand `f_{p,a}` of the first integral, its interior maximiser,
//! and the bracketing/bisection solver for the curvature extrema.

use serde::{Deserialize, Serialize};

use crate::error::{ElasticaError, Result};
use crate::lorentz::SpaceForm;

/// Default relative bracket width for [`solve_roots`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-13;

/// Below `CIRCLE_GAP · |a_*|` above `a_*` the two extrema are treated as merged.
pub const CIRCLE_GAP: f64 = 1e-14;

/// `(p, a)` for a given space form, with `a_*(p) < a < 0` enforced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticaParams {
    space: SpaceForm,
    p: f64,
    a: f64,
}

impl ElasticaParams {
    pub fn new(space: SpaceForm, p: f64, a: f64) -> Result<Self> {
        let a_star = a_star(p, space)?;
        if !(a > a_star && a < 0.0) {
            return Err(ElasticaError::OutsideWindow { a, a_star });
        }
        Ok(ElasticaParams { space, p, a })
    }

    pub fn space(&self) -> SpaceForm {
        self.space
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn eps2(&self) -> f64 {
        self.space.eps2()
    }

    pub fn a_star(&self) -> f64 {
        // validated at construction
        a_star(self.p, self.space).expect("validated exponent")
    }

    /// Same exponent and space, different integration constant.
    pub fn with_a(&self, a: f64) -> Result<Self> {
        ElasticaParams::new(self.space, self.p, a)
    }

    /// Offset of `a` above `a_*` relative to `|a_*|`.
    pub fn window_fraction(&self) -> f64 {
        let s = self.a_star();
        (self.a - s) / -s
    }
}

/// Curvature extrema `β < α` and the maximiser `κ_c` of `f_{p,a}` between them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootData {
    pub beta: f64,
    pub alpha: f64,
    pub kappa_c: f64,
}

/// Lower end of the admissible window, `a_* = −((−1)^ε p)^p ((−1)^ε (p−1))^(1−p)`.
pub fn a_star(p: f64, space: SpaceForm) -> Result<f64> {
    space.check_exponent(p)?;
    let sign = space.eps2();
    let (b0, b1) = (sign * p, sign * (p - 1.0));
    Ok(-(p * b0.ln() + (1.0 - p) * b1.ln()).exp())
}

/// `f_{p,a}(κ) = a − ε₂(p−1)²κ^{2p} + ε₂p²κ^{2(p−1)}`.
pub fn f_pa(kappa: f64, params: &ElasticaParams) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(ElasticaError::domain(format!("f_pa needs kappa > 0, got {kappa}")));
    }
    Ok(f_pa_unchecked(kappa, params))
}

pub(crate) fn f_pa_unchecked(kappa: f64, params: &ElasticaParams) -> f64 {
    let (p, e2) = (params.p, params.eps2());
    let ln_k = kappa.ln();
    let hi = (2.0 * p * ln_k).exp();
    let lo = (2.0 * (p - 1.0) * ln_k).exp();
    params.a - e2 * (p - 1.0).powi(2) * hi + e2 * p * p * lo
}

/// `d f_{p,a}/dκ = 2p(p−1)ε₂ κ^{2p−3} (p − (p−1)κ²)`.
pub fn f_pa_derivative(kappa: f64, params: &ElasticaParams) -> f64 {
    let p = params.p;
    2.0 * p * (p - 1.0) * params.eps2() * kappa.powf(2.0 * p - 3.0) * (p - (p - 1.0) * kappa * kappa)
}

/// The interior maximiser of `f_{p,a}`, `√(p/(p−1))`.
pub fn kappa_c(p: f64) -> Result<f64> {
    if !!(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(ElasticaError::domain(format!("kappa_c needs p > 1 or p < 0, got {p}")));
    }
    Ok((p / (p - 1.0)).sqrt())
}

/// Critical point of `Q_{p,a}` on de Sitter 2-space: `κ_* = ((1−p)/(−a))^(−1/(2p))`.
///
/// Not the same point as [`kappa_c`].
pub fn q_critical(params: &ElasticaParams) -> Result<f64> {
    let (p, a) = (params.p, params.a);
    if params.space != SpaceForm::DeSitter || !(p < 0.0) || !(a < 0.0) {
        return Err(ElasticaError::domain(format!(
            "q_critical needs de Sitter space, p < 0, a < 0 (got {}, p = {p}, a = {a})",
            params.space
        )));
    }
    Ok(((1.0 - p) / -a).powf(-1.0 / (2.0 * p)))
}

/// Bracket and bisect the two positive zeros of `f_{p,a}`.
///
/// `β` is bracketed by halving from `κ_c` until `f < 0`, `α` by doubling.
/// Both are bisected until the relative bracket width drops below `tol`
/// or the bracket cannot shrink further in floating point.
pub fn solve_roots(params: &ElasticaParams, tol: f64) -> Result<RootData> {
    if !(tol > 0.0) {
        return Err(ElasticaError::domain(format!("root tolerance must be positive, got {tol}")));
    }
    let a_star = params.a_star();
    let gap = params.a - a_star;
    if gap < CIRCLE_GAP * a_star.abs() {
        return Err(ElasticaError::CircleDegenerate { a: params.a, a_star, gap });
    }
    let kc = kappa_c(params.p)?;
    let f = |k: f64| f_pa_unchecked(k, params);

    let mut lo = kc;
    let mut steps = 0;
    while f(lo) >= 0.0 {
        lo *= 0.5;
        steps += 1;
        if steps > 2000 || lo == 0.0 {
            return Err(ElasticaError::Bracket {
                what: "beta",
                detail: format!("f stayed non-negative while halving from kappa_c = {kc}"),
            });
        }
    }
    let mut hi = kc;
    steps = 0;
    while f(hi) >= 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 2000 || !hi.is_finite() {
            return Err(ElasticaError::Bracket {
                what: "alpha",
                detail: format!("f stayed non-negative while doubling from kappa_c = {kc}"),
            });
        }
    }

    let beta = bisect(&f, lo, kc, tol, "beta")?;
    let alpha = bisect(&f, kc, hi, tol, "alpha")?;
    Ok(RootData { beta, alpha, kappa_c: kc })
}

/// Bisection for a sign change of `f` on `[lo, hi]`; `f(kc)` is the positive side.
fn bisect(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, what: &'static str) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let neg_at_lo = f(lo) < 0.0;
    const MAX_ITER: usize = 400;
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= tol * mid {
            return Ok(if f(lo).abs() <= f(hi).abs() { lo } else { hi });
        }
        if (f(mid) < 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(ElasticaError::NoConvergence {
        what,
        iterations: MAX_ITER,
        last_change: hi - lo,
    })
}
