//! Truncated Fock-space matrices for the deformed ladder, number and
//! quadrature operators, and residual checks of the deformed commutation
//! relations.
//!
//! Level `n` is basis index `n`. Truncation to `dim` levels breaks the algebra
//! on the last level (and on the last two for products of two quadratures), so
//! the residual checks only look at the leading block.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::deformation::Deformation;
use crate::error::{Error, Result};

/// A square operator matrix on the first `dim` deformed Fock levels.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: String,
    pub entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix { label: format!("{}†", self.label), entries: self.entries.adjoint() }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn is_hermitian(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.entries[(i, j)] == self.entries[(j, i)].conj()))
    }
}

fn check_dim(dim: usize, min: usize, what: &str) -> Result<()> {
    if dim < min {
        Err(Error::InvalidInput(format!("{what} needs dim >= {min}, got {dim}")))
    } else {
        Ok(())
    }
}

/// `A|n> = √[n] |n-1>`: entry `(n-1, n) = √[n]`.
pub fn lowering_matrix(def: &Deformation, dim: usize) -> Result<OperatorMatrix> {
    check_dim(dim, 2, "lowering matrix")?;
    let seq = def.bracket_sequence(dim - 1)?;
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = Complex64::new(seq.values[n].sqrt(), 0.0);
    }
    Ok(OperatorMatrix { label: "A".into(), entries: m })
}

pub fn raising_matrix(def: &Deformation, dim: usize) -> Result<OperatorMatrix> {
    let mut a = lowering_matrix(def, dim)?.adjoint();
    a.label = "A†".into();
    Ok(a)
}

/// `N = A†A`, diagonal with entries `[0], ..., [dim-1]`.
pub fn number_matrix(def: &Deformation, dim: usize) -> Result<OperatorMatrix> {
    check_dim(dim, 2, "number matrix")?;
    let seq = def.bracket_sequence(dim - 1)?;
    let diag = nalgebra::DVector::from_iterator(dim, seq.values.iter().map(|&v| Complex64::new(v, 0.0)));
    Ok(OperatorMatrix { label: "N".into(), entries: DMatrix::from_diagonal(&diag) })
}

/// `X_θ = (√(1+Q)/2)(A e^{-iθ} + A† e^{iθ})`.
///
/// The lower triangle is written as the exact conjugate of the upper one, so
/// the result is Hermitian bit for bit.
pub fn quadrature_matrix(def: &Deformation, dim: usize, theta: f64) -> Result<OperatorMatrix> {
    check_dim(dim, 2, "quadrature matrix")?;
    if !theta.is_finite() {
        return Err(Error::InvalidInput(format!("theta must be finite, got {theta}")));
    }
    let seq = def.bracket_sequence(dim - 1)?;
    let theta = theta.rem_euclid(TAU);
    let phase = Complex64::new(theta.cos(), -theta.sin());
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        let upper = phase * seq.b(n);
        m[(n - 1, n)] = upper;
        m[(n, n - 1)] = upper.conj();
    }
    Ok(OperatorMatrix { label: format!("X_theta({theta})"), entries: m })
}

/// Deformed position `X = α(A† + A)`, `α = √(1+Q)/2`.
pub fn position_matrix(def: &Deformation, dim: usize) -> Result<OperatorMatrix> {
    let mut m = quadrature_matrix(def, dim, 0.0)?;
    m.label = "X".into();
    Ok(m)
}

/// Deformed momentum `P = iβ(A† - A)`, `β = √(1+Q)/2`.
pub fn momentum_matrix(def: &Deformation, dim: usize) -> Result<OperatorMatrix> {
    check_dim(dim, 2, "momentum matrix")?;
    let seq = def.bracket_sequence(dim - 1)?;
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        let upper = Complex64::new(0.0, -seq.b(n));
        m[(n - 1, n)] = upper;
        m[(n, n - 1)] = upper.conj();
    }
    Ok(OperatorMatrix { label: "P".into(), entries: m })
}

fn max_abs_block(m: &DMatrix<Complex64>, block: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..block {
        for j in 0..block {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

/// Max-abs entry of `A A† - Q A† A - rhs` on the leading `(dim-1)` block,
/// where `rhs` is the identity (harmonic, math-type) or `q^{-N}`
/// (physics-type, (p,q)).
pub fn q_commutator_residual(def: &Deformation, dim: usize) -> Result<f64> {
    check_dim(dim, 3, "Q-commutator residual")?;
    let a = lowering_matrix(def, dim)?.entries;
    let ad = a.adjoint();
    let q = def.deformation_q();
    let mut m = &a * &ad - (&ad * &a) * Complex64::new(q, 0.0);
    for n in 0..dim {
        m[(n, n)] -= def.commutator_rhs(n);
    }
    Ok(max_abs_block(&m, dim - 1))
}

/// Max-abs difference between `[X, P]` and
/// `i([N+1] - Q[N] - (1-Q)/(1+Q)(X² + P²))` on the leading `(dim-2)` block.
///
/// The diagonal terms `f(n+1)f†(n+1)(n+1) = [n+1]` and `f(n)f†(n)n = [n]`
/// come straight from the bracket sequence.
pub fn xp_commutator_residual(def: &Deformation, dim: usize) -> Result<f64> {
    check_dim(dim, 4, "X-P commutator residual")?;
    let x = position_matrix(def, dim)?.entries;
    let p = momentum_matrix(def, dim)?.entries;
    let seq = def.bracket_sequence(dim)?;
    let q = def.deformation_q();

    let lhs = &x * &p - &p * &x;
    let squares = &x * &x + &p * &p;
    let mut inner = squares * Complex64::new(-(1.0 - q) / (1.0 + q), 0.0);
    for n in 0..dim {
        inner[(n, n)] += seq.values[n + 1] - q * seq.values[n];
    }
    let rhs = inner * Complex64::i();
    Ok(max_abs_block(&(lhs - rhs), dim - 2))
}
