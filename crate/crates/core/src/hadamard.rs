//! Hadamard (entrywise) functions of matrices and closure checks.
//!
//! The checks return reports instead of asserting, so a harness can tell an
//! unmet precondition apart from a violated conclusion.

use std::fmt;

use crate::classes::{is_bipotential, is_m_matrix, is_potential, is_z_matrix, Verdict};
use crate::linalg::{equilibrium_potentials, LinalgError, Lu, Matrix, Tolerance, Vector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HadamardError {
    #[error("entry ({row}, {col}) = {value} is outside the domain [0, inf)")]
    DomainViolation { row: usize, col: usize, value: f64 },
    #[error("f({value}) at entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize, value: f64 },
    #[error("Hadamard exponent must be a finite real >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Built-in scalar functions `[0, ∞) → [0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFn {
    Identity,
    /// `x^α`, with `0^α = 0`.
    Power(f64),
    /// `x² − cos x + 1`
    SquareMinusCos,
    /// `eˣ − 1`
    ExpMinusOne,
    /// `x + x³`
    Cubic,
    /// `Σ_k h_k · [x > v_k]` for jumps `(v_k, h_k)`.
    Step(Vec<(f64, f64)>),
    /// `f(x) + a`.
    Shifted(Box<ScalarFn>, f64),
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Identity => write!(f, "x"),
            ScalarFn::Power(a) => write!(f, "x^{a}"),
            ScalarFn::SquareMinusCos => write!(f, "x^2 - cos(x) + 1"),
            ScalarFn::ExpMinusOne => write!(f, "exp(x) - 1"),
            ScalarFn::Cubic => write!(f, "x + x^3"),
            ScalarFn::Step(j) => {
                write!(f, "step[")?;
                for (k, (v, h)) in j.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{h}@{v}")?;
                }
                write!(f, "]")
            }
            ScalarFn::Shifted(g, a) => write!(f, "({g}) + {a}"),
        }
    }
}

impl ScalarFn {
    pub fn power(alpha: f64) -> Self {
        ScalarFn::Power(alpha)
    }

    pub fn shifted(self, a: f64) -> Self {
        ScalarFn::Shifted(Box::new(self), a)
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScalarFn::Identity => x,
            ScalarFn::Power(a) => {
                if x == 0.0 {
                    0.0
                } else {
                    x.powf(*a)
                }
            }
            ScalarFn::SquareMinusCos => x * x - x.cos() + 1.0,
            ScalarFn::ExpMinusOne => x.exp_m1(),
            ScalarFn::Cubic => x + x * x * x,
            ScalarFn::Step(jumps) => jumps
                .iter()
                .filter(|(v, _)| x > *v)
                .map(|(_, h)| h)
                .sum(),
            ScalarFn::Shifted(g, a) => g.eval(x) + a,
        }
    }

    pub fn is_increasing(&self) -> bool {
        match self {
            ScalarFn::Power(a) => *a >= 0.0,
            ScalarFn::Step(jumps) => jumps.iter().all(|(_, h)| *h >= 0.0),
            ScalarFn::Shifted(g, _) => g.is_increasing(),
            _ => true,
        }
    }

    pub fn is_strictly_increasing(&self) -> bool {
        match self {
            ScalarFn::Power(a) => *a > 0.0,
            ScalarFn::Step(_) => false,
            ScalarFn::Shifted(g, _) => g.is_strictly_increasing(),
            _ => true,
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            ScalarFn::Power(a) => *a >= 1.0 || *a == 0.0,
            ScalarFn::Step(jumps) => jumps.iter().all(|(v, h)| *h == 0.0 || *v < 0.0),
            ScalarFn::Shifted(g, _) => g.is_convex(),
            _ => true,
        }
    }

    pub fn value_at_zero(&self) -> f64 {
        self.eval(0.0)
    }

    /// Upper end of the interval on which `eval` is finite in `f64`.
    pub fn domain_max(&self) -> f64 {
        match self {
            ScalarFn::ExpMinusOne => 700.0,
            ScalarFn::Cubic => 5e102,
            ScalarFn::SquareMinusCos => 1e154,
            ScalarFn::Power(a) if *a > 1.0 => f64::MAX.powf(1.0 / a),
            ScalarFn::Shifted(g, _) => g.domain_max(),
            _ => f64::MAX,
        }
    }
}

/// Entrywise `f(U)`.
pub fn apply(f: &ScalarFn, u: &Matrix) -> Result<Matrix, HadamardError> {
    let n = u.n();
    let mut data = Vec::with_capacity(n * n);
    for (row, r) in u.rows().enumerate() {
        for (col, &x) in r.iter().enumerate() {
            if x < 0.0 {
                return Err(HadamardError::DomainViolation { row, col, value: x });
            }
            let y = f.eval(x);
            if !y.is_finite() {
                return Err(HadamardError::NonFinite { row, col, value: x });
            }
            data.push(y);
        }
    }
    Ok(Matrix::new(n, data)?)
}

/// Exponent `α ≥ 1` for `U^{(α)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HadamardPower(f64);

impl HadamardPower {
    pub fn new(alpha: f64) -> Result<Self, HadamardError> {
        if alpha.is_finite() && alpha >= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(HadamardError::InvalidExponent(alpha))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

pub fn hadamard_power(u: &Matrix, alpha: HadamardPower) -> Result<Matrix, HadamardError> {
    if alpha.0 == 1.0 {
        if let Some((row, col, value)) = u.first_negative(&Tolerance::new(0.0, 0.0).unwrap()) {
            return Err(HadamardError::DomainViolation { row, col, value });
        }
        return Ok(u.clone());
    }
    apply(&ScalarFn::Power(alpha.0), u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotencialFuReport {
    pub f_u: Matrix,
    pub det_f: f64,
    pub det_positive: bool,
    /// Right equilibrium potential of `f(U)`; absent when `f(U)` is singular.
    pub right_potential: Option<Vector>,
    pub right_nonnegative: bool,
    /// Present only when `U ∈ bi𝒫`, where the conclusion covers the left side.
    pub left_potential: Option<Vector>,
    pub left_nonnegative: Option<bool>,
    /// `U⁻¹ f(U)` is an M-matrix. Only claimed when `f(0) = 0`.
    pub m_matrix: Option<Verdict>,
    /// Whether `f(U)⁻¹` happens to be a Z-matrix. Reported as data.
    pub inverse_is_z: Option<Verdict>,
}

impl PotencialFuReport {
    /// All conclusions that the hypotheses guarantee.
    pub fn holds(&self) -> bool {
        self.det_positive
            && self.right_nonnegative
            && self.left_nonnegative.unwrap_or(true)
            && self.m_matrix.as_ref().is_none_or(|v| v.holds)
    }
}

/// Checks nonsingularity, `det f(U) > 0`, the sign of the equilibrium
/// potentials of `f(U)` and, when `f(0) = 0`, that `U⁻¹ f(U)` is an M-matrix.
pub fn check_potencial_fu(
    u: &Matrix,
    f: &ScalarFn,
    tol: &Tolerance,
) -> Result<PotencialFuReport, HadamardError> {
    if !(f.is_strictly_increasing() && f.is_convex()) {
        return Err(HadamardError::PreconditionFailed(format!(
            "{f} must be strictly increasing and convex"
        )));
    }
    if f.value_at_zero() < 0.0 {
        return Err(HadamardError::PreconditionFailed(format!(
            "{f} must be nonnegative"
        )));
    }
    let pot = is_potential(u, tol);
    if !pot.holds {
        return Err(HadamardError::PreconditionFailed(
            "U is not a potential".into(),
        ));
    }
    let bi = is_bipotential(u, tol).holds;
    let f_u = apply(f, u)?;

    let m_matrix = (f.value_at_zero() == 0.0).then(|| {
        let u_inv = Lu::factor(u).expect("potential is nonsingular").inverse();
        match u_inv.matmul(&f_u) {
            Ok(m) => is_m_matrix(&m, tol),
            Err(_) => unreachable!("dimensions agree"),
        }
    });

    let Ok(lu) = Lu::factor(&f_u) else {
        return Ok(PotencialFuReport {
            f_u,
            det_f: 0.0,
            det_positive: false,
            right_potential: None,
            right_nonnegative: false,
            left_potential: None,
            left_nonnegative: bi.then_some(false),
            m_matrix,
            inverse_is_z: None,
        });
    };
    let det_f = lu.det();
    let eq = equilibrium_potentials(&f_u)?;
    let right_nonnegative = eq.mu.iter().all(|&x| tol.nonneg(x));
    let (left_potential, left_nonnegative) = if bi {
        let ok = eq.nu.iter().all(|&x| tol.nonneg(x));
        (Some(eq.nu), Some(ok))
    } else {
        (None, None)
    };
    Ok(PotencialFuReport {
        det_positive: det_f > 0.0,
        det_f,
        right_potential: Some(eq.mu),
        right_nonnegative,
        left_potential,
        left_nonnegative,
        m_matrix,
        inverse_is_z: Some(is_z_matrix(&lu.inverse(), tol)),
        f_u,
    })
}

/// `(G + a·𝟏𝟏')⁻¹ = G⁻¹ − a/(1 + a·μ̄) μ ν'` where `μ, ν` are the
/// equilibrium potentials of `G` and `μ̄ = 𝟏'μ`.
pub fn shifted_inverse(g: &Matrix, a: f64) -> Result<Matrix, HadamardError> {
    let lu = Lu::factor(g)?;
    let eq = equilibrium_potentials(g)?;
    let denom = 1.0 + a * eq.total_mass;
    if denom == 0.0 {
        return Err(LinalgError::Singular {
            step: g.n(),
            pivot: 0.0,
        }
        .into());
    }
    let s = a / denom;
    let inv = lu.inverse();
    Ok(Matrix::from_fn(g.n(), |i, j| {
        inv.get(i, j) - s * eq.mu[i] * eq.nu[j]
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovReport {
    pub alpha: f64,
    pub p: Matrix,
    /// `Q(α) = I − (U^{(α)})⁻¹`
    pub q: Matrix,
    pub p_doubly: bool,
    pub q_nonnegative: bool,
    pub q_row_sums_ok: bool,
    /// Only checked when `P'𝟏 ≤ 𝟏`.
    pub q_col_sums_ok: Option<bool>,
    pub min_q_entry: f64,
    pub max_q_row_sum: f64,
    pub max_q_col_sum: f64,
}

impl MarkovReport {
    pub fn holds(&self) -> bool {
        self.q_nonnegative && self.q_row_sums_ok && self.q_col_sums_ok.unwrap_or(true)
    }

    /// How far the worst verdict is from failing; negative means violated.
    pub fn margin(&self) -> f64 {
        let mut m = self.min_q_entry.min(1.0 - self.max_q_row_sum);
        if self.q_col_sums_ok.is_some() {
            m = m.min(1.0 - self.max_q_col_sum);
        }
        m
    }
}

fn fold_max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// For `U⁻¹ = I − P` with `P` substochastic, checks that `Q(α) = I − (U^{(α)})⁻¹`
/// is substochastic too, and doubly so when `P` is.
pub fn check_markov_preservation(
    u: &Matrix,
    alpha: HadamardPower,
    tol: &Tolerance,
) -> Result<MarkovReport, HadamardError> {
    let inv = Lu::factor(u)
        .map_err(|_| HadamardError::PreconditionFailed("U is singular".into()))?
        .inverse();
    let p = inv.identity_minus();
    let substochastic =
        p.is_nonnegative(tol) && p.row_sums().iter().all(|&s| tol.le(s, 1.0));
    if !substochastic {
        return Err(HadamardError::PreconditionFailed(
            "U^-1 is not I - P with P substochastic".into(),
        ));
    }
    let p_doubly = p.col_sums().iter().all(|&s| tol.le(s, 1.0));

    let ua = hadamard_power(u, alpha)?;
    let q = Lu::factor(&ua)?.inverse().identity_minus();
    let min_q_entry = (0..q.n())
        .flat_map(|i| (0..q.n()).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| q.get(i, j))
        .chain(q.diag())
        .fold(f64::INFINITY, f64::min);
    let max_q_row_sum = fold_max(&q.row_sums());
    let max_q_col_sum = fold_max(&q.col_sums());
    Ok(MarkovReport {
        alpha: alpha.alpha(),
        q_nonnegative: tol.nonneg(min_q_entry),
        q_row_sums_ok: tol.le(max_q_row_sum, 1.0),
        q_col_sums_ok: p_doubly.then(|| tol.le(max_q_col_sum, 1.0)),
        min_q_entry,
        max_q_row_sum,
        max_q_col_sum,
        p_doubly,
        p,
        q,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralEquilibriumReport {
    pub eta: Vector,
    pub nonnegative: bool,
    pub min_eta: f64,
}

/// Splits `U = [[A, b], [c', d]]` at the last index and solves
/// `A^{(α)} η = b^{(α)}`.
pub fn check_general_equilibrium(
    u: &Matrix,
    alpha: HadamardPower,
    tol: &Tolerance,
) -> Result<GeneralEquilibriumReport, HadamardError> {
    let n = u.n();
    if n < 2 {
        return Err(HadamardError::PreconditionFailed(
            "need n >= 2 to split off the last index".into(),
        ));
    }
    if !is_bipotential(u, tol).holds {
        return Err(HadamardError::PreconditionFailed(
            "U is not a bi-potential".into(),
        ));
    }
    let head: Vec<usize> = (0..n - 1).collect();
    let a = hadamard_power(&u.select(&head), alpha)?;
    let b: Vector = head
        .iter()
        .map(|&i| ScalarFn::Power(alpha.alpha()).eval(u.get(i, n - 1)))
        .collect();
    let eta = Lu::factor(&a)?.solve(&b)?;
    let min_eta = eta.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(GeneralEquilibriumReport {
        nonnegative: tol.nonneg(min_eta),
        min_eta,
        eta,
    })
}
