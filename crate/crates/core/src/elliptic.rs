//! Carlson symmetric integrals, Legendre complete integrals, Heuman's Lambda,
//! and the closed forms available for `p = 3/2` and `p = −1`.
//!
//! Moduli `ζ` follow the convention `K(ζ) = ∫₀¹ du/√((1−u²)(1−ζ²u²))`, and the
//! characteristic of `Π(χ, ζ)` enters as `1 − χu²`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{ElasticaError, Result};
use crate::lorentz::SpaceForm;
use crate::scalar::a_star;

const R_TOL: f64 = f64::EPSILON;
const MAX_ITER: usize = 200;

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(ElasticaError::domain(format!("{name} must be a finite non-negative number, got {v}")));
    }
    Ok(())
}

fn zero_count(xs: &[f64]) -> usize {
    xs.iter().filter(|&&v| v == 0.0).count()
}

/// `R_C(x, y) = ½∫₀^∞ (t+x)^{−1/2}(t+y)^{−1} dt`, Cauchy principal value for `y < 0`.
pub fn carlson_rc(x: f64, y: f64) -> Result<f64> {
    check_nonneg("x", x)?;
    if y == 0.0 || !y.is_finite() {
        return Err(ElasticaError::domain(format!("carlson_rc needs finite y != 0, got {y}")));
    }
    if y < 0.0 {
        // R_C(x, y) = √(x/(x−y)) R_C(x−y, −y)
        return Ok((x / (x - y)).sqrt() * carlson_rc(x - y, -y)?);
    }
    Ok(rc_positive(x, y))
}

fn rc_positive(x: f64, y: f64) -> f64 {
    let rel = (x - y) / y;
    if rel.abs() < 1e-3 {
        // arcsin(√e)/√e with e = (y−x)/y
        let e = -rel;
        let s = 1.0
            + e * (1.0 / 6.0
                + e * (3.0 / 40.0 + e * (5.0 / 112.0 + e * (35.0 / 1152.0 + e * (63.0 / 2816.0)))));
        return s / y.sqrt();
    }
    if x < y {
        (x / y).sqrt().acos() / (y - x).sqrt()
    } else {
        (x / y).sqrt().acosh() / (x - y).sqrt()
    }
}

/// `R_F(x, y, z)`; at most one argument may vanish.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> Result<f64> {
    for (n, v) in [("x", x), ("y", y), ("z", z)] {
        check_nonneg(n, v)?;
    }
    if zero_count(&[x, y, z]) > 1 {
        return Err(ElasticaError::domain("carlson_rf: at most one argument may be zero"));
    }
    let a0 = (x + y + z) / 3.0;
    let q = (3.0 * R_TOL).powf(-1.0 / 6.0) * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let (mut x, mut y, mut z, mut a) = (x, y, z, a0);
    let (x0, y0) = (x, y);
    let mut scale = 1.0;
    for _ in 0..MAX_ITER {
        if scale * q < a.abs() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        a = 0.25 * (a + lam);
        scale *= 0.25;
    }
    let xx = (a0 - x0) * scale / a;
    let yy = (a0 - y0) * scale / a;
    let zz = -xx - yy;
    let e2 = xx * yy - zz * zz;
    let e3 = xx * yy * zz;
    Ok((1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt())
}

/// `R_D(x, y, z)`; `z > 0` and at most one of `x`, `y` zero.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> Result<f64> {
    for (n, v) in [("x", x), ("y", y), ("z", z)] {
        check_nonneg(n, v)?;
    }
    if z == 0.0 || zero_count(&[x, y]) > 1 {
        return Err(ElasticaError::domain("carlson_rd needs z > 0 and at most one of x, y zero"));
    }
    let a0 = (x + y + 3.0 * z) / 5.0;
    let q = (R_TOL / 4.0).powf(-1.0 / 6.0) * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let (mut x, mut y, mut z, mut a) = (x, y, z, a0);
    let (x0, y0) = (x, y);
    let mut scale = 1.0;
    let mut sum = 0.0;
    for _ in 0..MAX_ITER {
        if scale * q < a.abs() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        sum += scale / (sz * (z + lam));
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        a = 0.25 * (a + lam);
        scale *= 0.25;
    }
    let xx = (a0 - x0) * scale / a;
    let yy = (a0 - y0) * scale / a;
    let zz = -(xx + yy) / 3.0;
    let xy = xx * yy;
    let z2 = zz * zz;
    let e2 = xy - 6.0 * z2;
    let e3 = (3.0 * xy - 8.0 * z2) * zz;
    let e4 = 3.0 * (xy - z2) * z2;
    let e5 = xy * z2 * zz;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    Ok(scale * series / (a * a.sqrt()) + 3.0 * sum)
}

/// `R_J(x, y, z, w)`; principal value when `w < 0`.
pub fn carlson_rj(x: f64, y: f64, z: f64, w: f64) -> Result<f64> {
    for (n, v) in [("x", x), ("y", y), ("z", z)] {
        check_nonneg(n, v)?;
    }
    if w == 0.0 || !w.is_finite() {
        return Err(ElasticaError::domain(format!("carlson_rj needs finite w != 0, got {w}")));
    }
    if zero_count(&[x, y, z]) > 1 {
        return Err(ElasticaError::domain("carlson_rj: at most one of x, y, z may be zero"));
    }
    if w > 0.0 {
        return Ok(rj_positive(x, y, z, w));
    }
    let mut s = [x, y, z];
    s.sort_by(f64::total_cmp);
    let [x, y, z] = s;
    if y == 0.0 {
        return Err(ElasticaError::domain("carlson_rj principal value needs the middle argument positive"));
    }
    let q = y + (z - y) * (y - x) / (y - w);
    let value = ((q - y) * rj_positive(x, y, z, q) - 3.0 * carlson_rf(x, y, z)?
        + 3.0 * carlson_rc(x * z / y, w * q / y)?)
        / (y - w);
    Ok(value)
}

fn rj_positive(x: f64, y: f64, z: f64, w: f64) -> f64 {
    let a0 = (x + y + z + 2.0 * w) / 5.0;
    let delta = (w - x) * (w - y) * (w - z);
    let q = (R_TOL / 4.0).powf(-1.0 / 6.0)
        * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs()).max((a0 - w).abs());
    let (mut x, mut y, mut z, mut w, mut a) = (x, y, z, w, a0);
    let (x0, y0, z0) = (x, y, z);
    let mut scale = 1.0;
    let mut sum = 0.0;
    for _ in 0..MAX_ITER {
        if scale * q < a.abs() {
            break;
        }
        let (sx, sy, sz, sw) = (x.sqrt(), y.sqrt(), z.sqrt(), w.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        let d = (sw + sx) * (sw + sy) * (sw + sz);
        let e = scale * scale * scale * delta / (d * d);
        sum += scale * rc_one_plus(e) / d;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        w = 0.25 * (w + lam);
        a = 0.25 * (a + lam);
        scale *= 0.25;
    }
    let xx = (a0 - x0) * scale / a;
    let yy = (a0 - y0) * scale / a;
    let zz = (a0 - z0) * scale / a;
    let pp = -(xx + yy + zz) / 2.0;
    let p2 = pp * pp;
    let e2 = xx * yy + xx * zz + yy * zz - 3.0 * p2;
    let e3 = xx * yy * zz + 2.0 * e2 * pp + 4.0 * p2 * pp;
    let e4 = (2.0 * xx * yy * zz + e2 * pp + 3.0 * p2 * pp) * pp;
    let e5 = xx * yy * zz * p2;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    scale * series / (a * a.sqrt()) + 6.0 * sum
}

/// `R_C(1, 1 + e)` for `e > −1`.
fn rc_one_plus(e: f64) -> f64 {
    if e.abs() < 1e-4 {
        1.0 - e / 3.0 + e * e / 5.0 - e * e * e / 7.0
    } else if e > 0.0 {
        let r = e.sqrt();
        r.atan() / r
    } else {
        let r = (-e).sqrt();
        r.atanh() / r
    }
}

fn check_modulus(zeta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&zeta) {
        return Err(ElasticaError::domain(format!("modulus must satisfy 0 <= zeta < 1, got {zeta}")));
    }
    Ok(())
}

/// Complete integral of the first kind.
pub fn ellip_k(zeta: f64) -> Result<f64> {
    check_modulus(zeta)?;
    k_complement(1.0 - zeta * zeta)
}

/// `E(ζ) − K(ζ)`, without the cancellation of forming both separately.
pub fn ellip_e_minus_k(zeta: f64) -> Result<f64> {
    check_modulus(zeta)?;
    let m = zeta * zeta;
    e_minus_k_complement(m, 1.0 - m)
}

/// Complete integral of the second kind.
pub fn ellip_e(zeta: f64) -> Result<f64> {
    Ok(ellip_k(zeta)? + ellip_e_minus_k(zeta)?)
}

/// Complete integral of the third kind, `∫₀¹ du / ((1−χu²)√((1−u²)(1−ζ²u²)))`.
pub fn ellip_pi(chi: f64, zeta: f64) -> Result<f64> {
    check_modulus(zeta)?;
    if !(chi < 1.0) {
        return Err(ElasticaError::domain(format!("characteristic must satisfy chi < 1, got {chi}")));
    }
    pi_complement(chi, 1.0 - chi, 1.0 - zeta * zeta)
}

// The `_complement` forms take `1 − ζ²` (and `1 − χ`) directly, for callers
// that know them more accurately than `1 − ζ·ζ` would give.

fn k_complement(mc: f64) -> Result<f64> {
    carlson_rf(0.0, mc, 1.0)
}

fn e_minus_k_complement(m: f64, mc: f64) -> Result<f64> {
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok(-m / 3.0 * carlson_rd(0.0, mc, 1.0)?)
}

fn pi_complement(chi: f64, one_minus_chi: f64, mc: f64) -> Result<f64> {
    let k = k_complement(mc)?;
    if chi == 0.0 {
        return Ok(k);
    }
    Ok(k + chi / 3.0 * carlson_rj(0.0, mc, 1.0, one_minus_chi)?)
}

fn check_amplitude(phi: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(ElasticaError::domain(format!("amplitude must lie in [0, pi/2], got {phi}")));
    }
    Ok(())
}

/// Incomplete integral of the first kind, `0 ≤ φ ≤ π/2`, `0 ≤ ζ ≤ 1` (`ζ = 1` only for `φ < π/2`).
pub fn ellip_f_inc(phi: f64, zeta: f64) -> Result<f64> {
    check_amplitude(phi)?;
    if !(0.0..=1.0).contains(&zeta) {
        return Err(ElasticaError::domain(format!("modulus must satisfy 0 <= zeta <= 1, got {zeta}")));
    }
    let (s, c) = phi.sin_cos();
    if s == 0.0 {
        return Ok(0.0);
    }
    let c2 = if phi == FRAC_PI_2 { 0.0 } else { c * c };
    let y = 1.0 - zeta * zeta * s * s;
    Ok(s * carlson_rf(c2, y, 1.0)?)
}

/// Incomplete integral of the second kind, same domain as [`ellip_f_inc`].
pub fn ellip_e_inc(phi: f64, zeta: f64) -> Result<f64> {
    check_amplitude(phi)?;
    if !(0.0..=1.0).contains(&zeta) {
        return Err(ElasticaError::domain(format!("modulus must satisfy 0 <= zeta <= 1, got {zeta}")));
    }
    let (s, c) = phi.sin_cos();
    if s == 0.0 {
        return Ok(0.0);
    }
    let c2 = if phi == FRAC_PI_2 { 0.0 } else { c * c };
    let m = zeta * zeta;
    let y = 1.0 - m * s * s;
    if y == 0.0 {
        // ζ = 1, φ = π/2
        return Ok(1.0);
    }
    let f = carlson_rf(c2, y, 1.0)?;
    if m == 0.0 {
        return Ok(s * f);
    }
    Ok(s * f - m * s * s * s / 3.0 * carlson_rd(c2, y, 1.0)?)
}

/// Heuman's Lambda `Λ̂(φ, ζ) = (2/π)[K E(φ,ζ′) + (E − K) F(φ,ζ′)]`, `ζ′ = √(1−ζ²)`.
pub fn heuman_lambda(phi: f64, zeta: f64) -> Result<f64> {
    check_amplitude(phi)?;
    check_modulus(zeta)?;
    if phi == FRAC_PI_2 {
        return Ok(1.0);
    }
    if zeta == 0.0 {
        return Ok(phi.sin());
    }
    let zp = (1.0 - zeta * zeta).sqrt();
    let k = ellip_k(zeta)?;
    let ek = ellip_e_minus_k(zeta)?;
    Ok(2.0 / PI * (k * ellip_e_inc(phi, zp)? + ek * ellip_f_inc(phi, zp)?))
}

/// Positive roots `β < α` and the negative root `δ` of `−κ³ + 9κ + 4a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

fn check_window_32(a: f64) -> Result<f64> {
    let s = a_star(1.5, SpaceForm::Hyperbolic)?;
    if !(a > s && a < 0.0) {
        return Err(ElasticaError::OutsideWindow { a, a_star: s });
    }
    Ok(s)
}

/// Roots of `−κ³ + 9κ + 4a` for `−3√3/2 < a < 0`, found by bisection on
/// `a = α(α²−9)/4` over `α ∈ (√3, 3)`.
pub fn cubic_roots_32(a: f64) -> Result<CubicRoots> {
    check_window_32(a)?;
    let (mut lo, mut hi) = (3f64.sqrt(), 3.0);
    let h = |x: f64| x * (x * x - 9.0) / 4.0 - a;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = if h(lo).abs() <= h(hi).abs() { lo } else { hi };
    // β = (√(36−3α²) − α)/2, rewritten to avoid cancellation as a → 0⁻
    let beta = -8.0 * a / (alpha * alpha + (alpha.powi(4) - 16.0 * a * alpha).sqrt());
    let delta = -alpha - beta;
    Ok(CubicRoots { alpha, beta, delta })
}

/// `Λ_{3/2}(a)` in terms of `K` and Heuman's Lambda.
pub fn lambda_32_closed(a: f64) -> Result<f64> {
    let CubicRoots { alpha, beta, .. } = cubic_roots_32(a)?;
    let s = 2.0 * alpha + beta;
    let zeta2 = (alpha - beta) / s;
    let zeta = zeta2.sqrt();
    let a3 = alpha * alpha * alpha;
    // χ = 9(α−β)/α³, so 1−χ = β³/α³, using α² + αβ + β² = 9
    let one_minus_chi = (beta / alpha).powi(3);
    let chi_minus_zeta2 = (alpha - beta) * (alpha + beta) * (9.0 + alpha * beta) / (a3 * s);
    let phi = chi_minus_zeta2.sqrt().atan2(zeta * one_minus_chi.sqrt());
    let coeff = 2.0 * (alpha * beta * (alpha + beta)).sqrt() / (3.0 * s.sqrt());
    Ok(coeff * ellip_k(zeta)? + PI * heuman_lambda(phi, zeta)?)
}

fn check_m(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(ElasticaError::domain("m must be a positive integer"));
    }
    Ok(m as f64)
}

/// `Θ_{−1}` over `m` periods, `−4 < a < 0`.
pub fn theta_m1_closed(a: f64, m: u32) -> Result<f64> {
    let mf = check_m(m)?;
    let s = a_star(-1.0, SpaceForm::DeSitter)?;
    if !(a > s && a < 0.0) {
        return Err(ElasticaError::OutsideWindow { a, a_star: s });
    }
    let r = (4.0 + a).sqrt();
    let alpha2 = (2.0 + r) / (-a);
    let beta2 = 1.0 / (2.0 + r);
    // ζ² = 1 − β²/α²; keep the complement exact since ζ → 1 as a → 0⁻
    let mc = beta2 / alpha2;
    let m2 = (alpha2 - beta2) / alpha2;
    Ok(4.0 * mf * beta2.sqrt() / alpha2 * pi_complement(m2, mc, mc)?)
}

/// `Θ_{3/2}` over `m` periods, `−3√3/2 < a < 0`.
pub fn theta_32_closed(a: f64, m: u32) -> Result<f64> {
    let mf = check_m(m)?;
    let CubicRoots { alpha, beta, .. } = cubic_roots_32(a)?;
    let s = 2.0 * alpha + beta;
    let zeta = ((alpha - beta) / s).sqrt();
    Ok(6.0 * mf * (s.sqrt() * ellip_e(zeta)? - (alpha + beta) / s.sqrt() * ellip_k(zeta)?))
}
