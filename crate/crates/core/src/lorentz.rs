//! Lorentz–Minkowski 3-space primitives.
//!
//! The metric is `dx² + dy² − dz²`. The two quadrics used throughout the crate
//! are the upper sheet of `x² + y² − z² = −1` (the hyperbolic plane) and the
//! one-sheeted hyperboloid `x² + y² − z² = 1` (de Sitter 2-space).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{ElasticaError, Result};

/// A point or vector of ℝ³ carrying the Minkowski metric.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3L {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3L {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3L { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn planar_radius(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl Add for Vec3L {
    type Output = Vec3L;
    fn add(self, o: Vec3L) -> Vec3L {
        Vec3L::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3L {
    type Output = Vec3L;
    fn sub(self, o: Vec3L) -> Vec3L {
        Vec3L::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3L {
    type Output = Vec3L;
    fn neg(self) -> Vec3L {
        Vec3L::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<Vec3L> for f64 {
    type Output = Vec3L;
    fn mul(self, v: Vec3L) -> Vec3L {
        Vec3L::new(self * v.x, self * v.y, self * v.z)
    }
}

impl fmt::Display for Vec3L {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// `u·v` in the signature (+, +, −).
pub fn minkowski_inner(u: Vec3L, v: Vec3L) -> f64 {
    u.x * v.x + u.y * v.y - u.z * v.z
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossVariant {
    /// The standard ℝ³ cross product.
    Euclidean,
    /// The metric dual: `⟨u ×_L v, w⟩ = det(u, v, w)`.
    Lorentzian,
}

impl CrossVariant {
    pub const ALL: [CrossVariant; 2] = [CrossVariant::Euclidean, CrossVariant::Lorentzian];

    pub fn name(self) -> &'static str {
        match self {
            CrossVariant::Euclidean => "euclidean",
            CrossVariant::Lorentzian => "lorentzian",
        }
    }
}

pub fn cross(u: Vec3L, v: Vec3L, variant: CrossVariant) -> Vec3L {
    let e = Vec3L::new(
        u.y * v.z - u.z * v.y,
        u.z * v.x - u.x * v.z,
        u.x * v.y - u.y * v.x,
    );
    match variant {
        CrossVariant::Euclidean => e,
        CrossVariant::Lorentzian => Vec3L::new(e.x, e.y, -e.z),
    }
}

/// Which of the two quadrics a curve lives on, with the causal signs it forces
/// on space-like curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceForm {
    /// ℍ²: `⟨v,v⟩ = −1`, `z > 0`.
    #[serde(rename = "h2")]
    Hyperbolic,
    /// ℍ²₁: `⟨v,v⟩ = +1`.
    #[serde(rename = "h12")]
    DeSitter,
}

impl SpaceForm {
    pub fn from_epsilon(epsilon: u8) -> Result<Self> {
        match epsilon {
            0 => Ok(SpaceForm::Hyperbolic),
            1 => Ok(SpaceForm::DeSitter),
            _ => Err(ElasticaError::domain(format!("epsilon must be 0 or 1, got {epsilon}"))),
        }
    }

    pub fn epsilon(self) -> u8 {
        match self {
            SpaceForm::Hyperbolic => 0,
            SpaceForm::DeSitter => 1,
        }
    }

    /// Causal character of the tangent. Only space-like curves are handled.
    pub fn eps1(self) -> f64 {
        1.0
    }

    /// Causal character of the normal, `(−1)^ε`.
    pub fn eps2(self) -> f64 {
        match self {
            SpaceForm::Hyperbolic => 1.0,
            SpaceForm::DeSitter => -1.0,
        }
    }

    /// Sectional curvature `(−1)^(ε+1)`.
    pub fn rho(self) -> f64 {
        -self.eps2()
    }

    /// Value of `⟨v,v⟩` on the quadric.
    pub fn quadric_level(self) -> f64 {
        -self.eps2()
    }

    pub fn short_name(self) -> &'static str {
        match self {
            SpaceForm::Hyperbolic => "h2",
            SpaceForm::DeSitter => "h12",
        }
    }

    pub fn admissible_exponent(self, p: f64) -> bool {
        p.is_finite()
            && match self {
                SpaceForm::Hyperbolic => p > 1.0,
                SpaceForm::DeSitter => p < 0.0,
            }
    }

    pub fn check_exponent(self, p: f64) -> Result<()> {
        if self.admissible_exponent(p) {
            Ok(())
        } else {
            Err(ElasticaError::InadmissibleExponent {
                p,
                space: self.display_name(),
                requirement: match self {
                    SpaceForm::Hyperbolic => "p > 1",
                    SpaceForm::DeSitter => "p < 0",
                },
            })
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            SpaceForm::Hyperbolic => "the hyperbolic plane",
            SpaceForm::DeSitter => "de Sitter 2-space",
        }
    }
}

impl fmt::Display for SpaceForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

pub fn on_quadric(v: Vec3L, space: SpaceForm, tol: f64) -> bool {
    let level_ok = (minkowski_inner(v, v) - space.quadric_level()).abs() <= tol;
    match space {
        SpaceForm::Hyperbolic => level_ok && v.z > 0.0,
        SpaceForm::DeSitter => level_ok,
    }
}

const PROJECTION_TOL: f64 = 1e-9;

/// Poincaré disk model of ℍ²: `(x, y) / (1 + z)`.
pub fn poincare_project(v: Vec3L) -> Result<(f64, f64)> {
    if !(v.z > 0.0) {
        return Err(ElasticaError::domain(format!("poincare_project: z must be positive, got {v}")));
    }
    let level = minkowski_inner(v, v);
    if (level + 1.0).abs() > PROJECTION_TOL * (1.0 + v.z * v.z) {
        return Err(ElasticaError::domain(format!(
            "poincare_project: {v} is off the hyperboloid (<v,v> = {level})"
        )));
    }
    let s = 1.0 / (1.0 + v.z);
    Ok((v.x * s, v.y * s))
}

/// Inverse of [`poincare_project`] on the open unit disk.
pub fn poincare_lift(u: f64, w: f64) -> Result<Vec3L> {
    let r2 = u * u + w * w;
    if !(r2 < 1.0) {
        return Err(ElasticaError::domain(format!("poincare_lift: ({u}, {w}) outside the open unit disk")));
    }
    let d = 1.0 - r2;
    Ok(Vec3L::new(2.0 * u / d, 2.0 * w / d, (1.0 + r2) / d))
}

/// Once-punctured disk model of the lower half of ℍ²₁: `(x, y) / (x² + y²)`.
///
/// The equator `z = 0` is fixed pointwise.
pub fn punctured_project(v: Vec3L) -> Result<(f64, f64)> {
    if v.z > 0.0 {
        return Err(ElasticaError::domain(format!("punctured_project: z must be non-positive, got {v}")));
    }
    let level = minkowski_inner(v, v);
    if (level - 1.0).abs() > PROJECTION_TOL * (1.0 + v.z * v.z) {
        return Err(ElasticaError::domain(format!(
            "punctured_project: {v} is off the one-sheeted hyperboloid (<v,v> = {level})"
        )));
    }
    let r2 = v.x * v.x + v.y * v.y;
    Ok((v.x / r2, v.y / r2))
}

/// Inverse of [`punctured_project`] for `0 < u² + w² ≤ 1`.
pub fn punctured_lift(u: f64, w: f64) -> Result<Vec3L> {
    let r2 = u * u + w * w;
    if !(r2 > 0.0 && r2 <= 1.0) {
        return Err(ElasticaError::domain(format!(
            "punctured_lift: ({u}, {w}) outside the punctured closed unit disk"
        )));
    }
    let (x, y) = (u / r2, w / r2);
    // x² + y² − 1 = (1 − r²)/r²
    Ok(Vec3L::new(x, y, -((1.0 - r2) / r2).sqrt()))
}
