//! Deformation families and the deformed number sequence `[n]`.
//!
//! Every other module consumes a validated [`Deformation`]: it is the single
//! source of the brackets `[n] = |f(n)|² n` and of the commutator parameter `Q`
//! in `A A† - Q A† A`.
//!
//! Brackets are evaluated as finite sums of positive terms:
//!
//! | family      | `Q`  | `[n]`                                  |
//! |-------------|------|----------------------------------------|
//! | harmonic    | 1    | `n`                                    |
//! | math-type   | q²   | `Σ_{k<n} q^{2k}`                       |
//! | physics-type| q    | `Σ_{k<n} q^{n-1-2k}`                   |
//! | (p,q)       | p    | `Σ_{k<n} p^k q^{k-n+1}`                |
//!
//! These equal the familiar quotients `(1-q^{2n})/(1-q²)`, `q(q^{-n}-q^n)/(1-q²)`
//! and `q(q^{-n}-p^n)/(1-pq)` but do not cancel near `q = 1` or `pq = 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from `pq = 1` below which the (p,q) family is rejected.
const PQ_SINGULAR_TOL: f64 = 1e-12;

/// Raw, unvalidated description of a deformation family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DeformationSpec {
    Harmonic,
    #[serde(rename = "mathq")]
    MathQ {
        q: f64,
    },
    #[serde(rename = "physicsq")]
    PhysicsQ {
        q: f64,
    },
    #[serde(rename = "pq")]
    PQ {
        p: f64,
        q: f64,
    },
}

impl fmt::Display for DeformationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeformationSpec::Harmonic => write!(f, "harmonic"),
            DeformationSpec::MathQ { q } => write!(f, "mathq(q={q})"),
            DeformationSpec::PhysicsQ { q } => write!(f, "physicsq(q={q})"),
            DeformationSpec::PQ { p, q } => write!(f, "pq(p={p},q={q})"),
        }
    }
}

/// A deformation whose parameters have passed [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Deformation(DeformationSpec);

/// Checks the parameter ranges of each family.
pub fn validate(spec: DeformationSpec) -> Result<Deformation> {
    let positive = |name: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("{name} must be a finite positive number, got {name}={v}")))
        }
    };
    match spec {
        DeformationSpec::Harmonic => {}
        DeformationSpec::MathQ { q } => {
            if !(q.is_finite() && q > 0.0 && q < 1.0) {
                return Err(Error::Domain(format!("math-type deformation requires 0<q<1, got q={q}")));
            }
        }
        DeformationSpec::PhysicsQ { q } => {
            if !(q.is_finite() && q > 1.0) {
                return Err(Error::Domain(format!("physics-type deformation requires q>1, got q={q}")));
            }
        }
        DeformationSpec::PQ { p, q } => {
            positive("p", p)?;
            positive("q", q)?;
            if (p * q - 1.0).abs() <= PQ_SINGULAR_TOL {
                return Err(Error::Domain(format!(
                    "(p,q) deformation requires pq!=1 (1-pq is singular), got p={p}, q={q}"
                )));
            }
        }
    }
    Ok(Deformation(spec))
}

impl Deformation {
    pub const HARMONIC: Deformation = Deformation(DeformationSpec::Harmonic);

    pub fn new(spec: DeformationSpec) -> Result<Self> {
        validate(spec)
    }

    pub fn math_q(q: f64) -> Result<Self> {
        validate(DeformationSpec::MathQ { q })
    }

    pub fn physics_q(q: f64) -> Result<Self> {
        validate(DeformationSpec::PhysicsQ { q })
    }

    pub fn pq(p: f64, q: f64) -> Result<Self> {
        validate(DeformationSpec::PQ { p, q })
    }

    pub fn spec(&self) -> DeformationSpec {
        self.0
    }

    /// The commutator parameter `Q`.
    pub fn deformation_q(&self) -> f64 {
        match self.0 {
            DeformationSpec::Harmonic => 1.0,
            DeformationSpec::MathQ { q } => q * q,
            DeformationSpec::PhysicsQ { q } => q,
            DeformationSpec::PQ { p, .. } => p,
        }
    }

    /// Scale `√(1+Q)/2` shared by the quadrature operator and the recurrence
    /// off-diagonals.
    pub fn quadrature_scale(&self) -> f64 {
        (1.0 + self.deformation_q()).sqrt() / 2.0
    }

    /// Right-hand side of `A A† - Q A† A` on level `n`: 1 for the harmonic and
    /// math-type algebras, `q^{-n}` for physics-type and (p,q).
    pub fn commutator_rhs(&self, n: usize) -> f64 {
        match self.0 {
            DeformationSpec::Harmonic | DeformationSpec::MathQ { .. } => 1.0,
            DeformationSpec::PhysicsQ { q } | DeformationSpec::PQ { q, .. } => powi(q, -(n as i64)),
        }
    }

    /// The deformed number `[n]`.
    pub fn bracket(&self, n: usize) -> Result<f64> {
        let value = match self.0 {
            DeformationSpec::Harmonic => n as f64,
            DeformationSpec::MathQ { q } => {
                let q2 = q * q;
                let mut term = 1.0;
                let mut sum = 0.0;
                for _ in 0..n {
                    sum += term;
                    term *= q2;
                }
                sum
            }
            DeformationSpec::PhysicsQ { q } => {
                // smallest terms first
                let top = n as i64 - 1;
                let mut sum = 0.0;
                for k in 0..n as i64 {
                    let e = top - 2 * k;
                    if e < 0 {
                        sum += powi(q, e);
                    }
                }
                for k in 0..n as i64 {
                    let e = top - 2 * k;
                    if e >= 0 {
                        sum += powi(q, e);
                    }
                }
                sum
            }
            DeformationSpec::PQ { p, q } => {
                let mut sum = 0.0;
                for k in 0..n as i64 {
                    sum += powi(p, k) * powi(q, k - n as i64 + 1);
                }
                sum
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Overflow(format!("[{n}] exceeds the floating-point range for {}", self.0)))
        }
    }

    /// `[n]! = [n][n-1]...[1]`, with `[0]! = 1`.
    ///
    /// Fails with [`Error::Overflow`] when the product leaves the `f64` range;
    /// use [`Deformation::ln_bracket_factorial`] for large `n`.
    pub fn bracket_factorial(&self, n: usize) -> Result<f64> {
        let mut product = 1.0;
        for k in 1..=n {
            product *= self.bracket(k)?;
        }
        if product.is_finite() {
            Ok(product)
        } else {
            Err(Error::Overflow(format!("[{n}]! exceeds the floating-point range; use the log-scaled variant")))
        }
    }

    /// `ln([n]!)`.
    pub fn ln_bracket_factorial(&self, n: usize) -> Result<f64> {
        let mut acc = 0.0;
        for k in 1..=n {
            acc += self.bracket(k)?.ln();
        }
        Ok(acc)
    }

    /// Brackets `[0..=levels]` together with the recurrence off-diagonals.
    pub fn bracket_sequence(&self, levels: usize) -> Result<BracketSequence> {
        if levels < 1 {
            return Err(Error::InvalidInput("bracket sequence needs at least one level".into()));
        }
        let values = (0..=levels).map(|n| self.bracket(n)).collect::<Result<Vec<_>>>()?;
        if let Some(n) = (1..=levels).find(|&n| values[n] <= 0.0) {
            return Err(Error::Domain(format!(
                "[{n}] is not positive for {} (underflow); reduce the truncation",
                self.0
            )));
        }
        let scale = self.quadrature_scale();
        let offdiag = values[1..].iter().map(|v| scale * v.sqrt()).collect();
        Ok(BracketSequence { deformation: *self, values, offdiag })
    }
}

impl fmt::Display for Deformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn powi(base: f64, exp: i64) -> f64 {
    match i32::try_from(exp) {
        Ok(e) => base.powi(e),
        Err(_) => base.powf(exp as f64),
    }
}

/// Cached `[0], [1], ..., [N]` and `b_n = (√(1+Q)/2)·√[n]` for `n = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketSequence {
    pub deformation: Deformation,
    pub values: Vec<f64>,
    /// `offdiag[n - 1] = b_n`.
    pub offdiag: Vec<f64>,
}

impl BracketSequence {
    pub fn levels(&self) -> usize {
        self.values.len() - 1
    }

    /// `b_n` for `1 <= n <= N`.
    pub fn b(&self, n: usize) -> f64 {
        self.offdiag[n - 1]
    }
}
