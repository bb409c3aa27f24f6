//! The orthonormal polynomials `J_n` generated by
//!
//! ```text
//! J_{n+1}(x) = ( 2x/√(1+Q) · J_n(x) - √[n] · J_{n-1}(x) ) / √[n+1],
//! J_0 = 1,   J_1 = 2x / √([1](1+Q)),
//! ```
//!
//! evaluated in the equivalent Jacobi form `x J_n = b_{n+1} J_{n+1} + b_n J_{n-1}`
//! with `b_n = (√(1+Q)/2)·√[n]`.

use rayon::prelude::*;
use serde::Serialize;

use crate::deformation::{BracketSequence, Deformation};
use crate::error::{Error, Result};

/// Magnitude at which forward evaluation stops.
pub const OVERFLOW_THRESHOLD: f64 = 1e300;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialEvaluation {
    pub deformation: Deformation,
    pub x: f64,
    /// `J_0(x), ..., J_k(x)`; shorter than requested when `overflow_at` is set.
    pub values: Vec<f64>,
    /// First order whose magnitude exceeded [`OVERFLOW_THRESHOLD`].
    pub overflow_at: Option<usize>,
}

impl PolynomialEvaluation {
    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }
}

/// Runs the recurrence with precomputed off-diagonals (`seq` must reach level
/// `order`).
pub(crate) fn recurrence(seq: &BracketSequence, x: f64, order: usize) -> (Vec<f64>, Option<usize>) {
    let mut values = Vec::with_capacity(order + 1);
    values.push(1.0);
    if order == 0 {
        return (values, None);
    }
    let mut prev = 0.0;
    let mut cur = 1.0;
    for n in 0..order {
        let b_next = seq.b(n + 1);
        let back = if n == 0 { 0.0 } else { seq.b(n) * prev };
        let next = (x * cur - back) / b_next;
        if next.is_nan() || next.abs() > OVERFLOW_THRESHOLD {
            return (values, Some(n + 1));
        }
        values.push(next);
        prev = cur;
        cur = next;
    }
    (values, None)
}

/// `J_0(x) ..= J_order(x)` by forward recurrence.
pub fn eval_all(def: &Deformation, x: f64, order: usize) -> Result<PolynomialEvaluation> {
    if order == 0 {
        return Ok(PolynomialEvaluation { deformation: *def, x, values: vec![1.0], overflow_at: None });
    }
    let seq = def.bracket_sequence(order)?;
    let (values, overflow_at) = recurrence(&seq, x, order);
    Ok(PolynomialEvaluation { deformation: *def, x, values, overflow_at })
}

/// [`eval_all`] at every abscissa of a strictly increasing grid.
pub fn eval_grid(def: &Deformation, grid: &[f64], order: usize) -> Result<Vec<PolynomialEvaluation>> {
    check_grid(grid)?;
    let seq = def.bracket_sequence(order.max(1))?;
    Ok(grid
        .par_iter()
        .map(|&x| {
            let (values, overflow_at) = recurrence(&seq, x, order);
            PolynomialEvaluation { deformation: *def, x, values, overflow_at }
        })
        .collect())
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("grid must not be empty".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("grid values must be finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `J_2` and `J_3` written out in closed form:
///
/// ```text
/// J_2 = (4x² - (1+Q)[1]) / √([2]!(1+Q)²)
/// J_3 = (8x³ - 2(1+Q)([1]+[2])x) / √([3]!(1+Q)³)
/// ```
pub mod closed_form {
    use crate::deformation::Deformation;
    use crate::error::Result;

    pub fn j2(def: &Deformation, x: f64) -> Result<f64> {
        let q = def.deformation_q();
        let numerator = 4.0 * x * x - (1.0 + q) * def.bracket(1)?;
        Ok(numerator / (def.bracket_factorial(2)? * (1.0 + q).powi(2)).sqrt())
    }

    pub fn j3(def: &Deformation, x: f64) -> Result<f64> {
        let q = def.deformation_q();
        let numerator = 8.0 * x.powi(3) - 2.0 * (1.0 + q) * (def.bracket(1)? + def.bracket(2)?) * x;
        Ok(numerator / (def.bracket_factorial(3)? * (1.0 + q).powi(3)).sqrt())
    }
}

/// Physicists' Hermite polynomial `H_n(x)` from `H_{n+1} = 2x H_n - 2n H_{n-1}`.
pub fn hermite_oracle(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Chebyshev polynomial of the second kind, `U_{n+1} = 2x U_n - U_{n-1}`.
pub fn chebyshev_u_oracle(n: usize, x: f64) -> f64 {
    let (mut u0, mut u1) = (1.0, 2.0 * x);
    if n == 0 {
        return u0;
    }
    for _ in 1..n {
        let u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}

/// `H_n(x) / √(2ⁿ n!)`, the harmonic limit of `J_n`.
pub fn normalized_hermite(n: usize, x: f64) -> f64 {
    let ln_norm = 0.5 * (n as f64 * std::f64::consts::LN_2 + (1..=n).map(|k| (k as f64).ln()).sum::<f64>());
    hermite_oracle(n, x) * (-ln_norm).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_orders() {
        let d = Deformation::math_q(0.9).unwrap();
        assert_eq!(eval_all(&d, 0.7, 0).unwrap().values, vec![1.0]);
        let e = eval_all(&d, 1.0, 1).unwrap();
        assert_relative_eq!(e.values[1], 2.0 / 1.81f64.sqrt(), max_relative = 1e-15);

        let cheb = Deformation::math_q(1e-8).unwrap();
        assert!(eval_all(&cheb, 0.5, 2).unwrap().values[2].abs() < 1e-12);

        let h = eval_all(&Deformation::HARMONIC, 1.0, 2).unwrap();
        assert_relative_eq!(h.values[2], 0.5f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn grid_parity_and_consistency() {
        let rows = eval_grid(&Deformation::HARMONIC, &[-1.0, 0.0, 1.0], 1).unwrap();
        assert_eq!(rows[0].values[1], -rows[2].values[1]);
        assert_eq!(rows[1].values[1], 0.0);

        let d = Deformation::math_q(0.9).unwrap();
        let rows = eval_grid(&d, &[0.0], 5).unwrap();
        for n in [1, 3, 5] {
            assert_eq!(rows[0].values[n], 0.0);
        }
        assert_eq!(rows[0], eval_all(&d, 0.0, 5).unwrap());

        assert!(eval_grid(&d, &[], 3).is_err());
        assert!(eval_grid(&d, &[1.0, 1.0], 3).is_err());
    }

    #[test]
    fn oracles() {
        assert_eq!(hermite_oracle(2, 1.0), 2.0);
        assert_eq!(hermite_oracle(0, 3.3), 1.0);
        assert_eq!(hermite_oracle(3, 2.0), 8.0 * 8.0 - 12.0 * 2.0);
        assert_eq!(chebyshev_u_oracle(2, 0.5), 0.0);
        assert_eq!(chebyshev_u_oracle(0, 0.1), 1.0);
        assert_relative_eq!(normalized_hermite(2, 1.0), 2.0 / 8f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn overflow_is_reported_in_band() {
        let d = Deformation::math_q(0.5).unwrap();
        // far outside the support the polynomials grow geometrically
        let e = eval_all(&d, 1e30, 40).unwrap();
        let at = e.overflow_at.expect("should trip");
        assert_eq!(e.values.len(), at);
        assert!(e.values.iter().all(|v| v.abs() <= OVERFLOW_THRESHOLD));
    }

    #[test]
    fn closed_forms_match_recurrence() {
        let d = Deformation::pq(1.5, 0.5).unwrap();
        for x in [-2.0, -0.3, 0.4, 1.7] {
            let e = eval_all(&d, x, 3).unwrap();
            assert_relative_eq!(e.values[2], closed_form::j2(&d, x).unwrap(), max_relative = 1e-13);
            assert_relative_eq!(e.values[3], closed_form::j3(&d, x).unwrap(), max_relative = 1e-13);
        }
    }
}
