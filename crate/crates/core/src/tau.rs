//! The threshold `τ(U) = inf{t ≥ 0 : I + tU ∉ bi𝒫}` and class 𝒯 checks.
//!
//! Membership in bi𝒫 is downward closed in `t`, so τ is found by bisection
//! on `[0, t_max]`. A matrix whose membership survives `t_max` gets `τ = ∞`.

use std::fmt;

use crate::classes::{is_bipotential, Witness};
use crate::hadamard::{apply, HadamardError, ScalarFn};
use crate::linalg::{equilibrium_potentials, is_nonsingular, Matrix, Tolerance};
use crate::structure::{is_increasing_cbf_permutation, CbfSearch};

pub const DEFAULT_T_MAX: f64 = 1e6;
pub const BISECTION_ITERS: usize = 60;

/// Cap on the sign slack inside τ bisections. A slack `ε` moves a crossing
/// by about `ε / |d(entry)/dt|`, so the default 1e-9 can shift τ by 1e-6.
pub const TAU_SIGN_EPS: f64 = 1e-12;

pub(crate) fn sign_tol(tol: &Tolerance) -> Tolerance {
    tol.with_abs(tol.abs_eps.min(TAU_SIGN_EPS))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauValue {
    Finite(f64),
    Infinite,
}

impl TauValue {
    pub fn is_finite(self) -> bool {
        matches!(self, TauValue::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            TauValue::Finite(x) => Some(x),
            TauValue::Infinite => None,
        }
    }

    /// Both infinite, or both finite and within `eps`.
    pub fn agrees_with(self, other: TauValue, eps: f64) -> bool {
        match (self, other) {
            (TauValue::Infinite, TauValue::Infinite) => true,
            (TauValue::Finite(a), TauValue::Finite(b)) => (a - b).abs() <= eps,
            _ => false,
        }
    }
}

impl fmt::Display for TauValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauValue::Finite(x) => write!(f, "{x:.8}"),
            TauValue::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauMethod {
    /// Bisection on bi𝒫 membership of `I + tU`.
    Bisection,
    /// Bisection on the sign of the equilibrium potentials.
    EquilibriumFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TauCertificate {
    /// Why `I + t·U` fails the class test at the witness `t`.
    Class(Witness),
    /// A potential went negative in the filtered recursion at this level.
    FilteredStop { level: isize, min_value: f64 },
    /// Left and right equilibrium potentials; at least one has a negative entry.
    Potentials { min_mu: f64, min_nu: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauResult {
    pub value: TauValue,
    pub method: TauMethod,
    /// A `t` slightly above τ where the predicate fails.
    pub witness_t: Option<f64>,
    pub certificate: Option<TauCertificate>,
}

/// Bisects a predicate that holds on `[0, τ)` and fails above τ.
///
/// Returns `None` when the predicate still holds at `t_max`, otherwise the
/// final bracket `(lo, hi)` with `ok(lo)` and `!ok(hi)`.
pub fn bisect_threshold(ok: impl Fn(f64) -> bool, t_max: f64) -> Option<(f64, f64)> {
    if ok(t_max) {
        return None;
    }
    Some(bisect_between(&ok, 0.0, t_max))
}

fn bisect_between(ok: &impl Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> (f64, f64) {
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// τ(U) by bisection on `t ↦ I + tU ∈ bi𝒫`; a singular `I + tU` counts as
/// outside the class. Sign tests use at most [`TAU_SIGN_EPS`] of slack.
pub fn tau_bisection(u: &Matrix, t_max: f64, tol: &Tolerance) -> TauResult {
    let tol = &sign_tol(tol);
    let ok = |t: f64| is_bipotential(&u.identity_plus(t), tol).holds;
    match bisect_threshold(ok, t_max) {
        None => TauResult {
            value: TauValue::Infinite,
            method: TauMethod::Bisection,
            witness_t: None,
            certificate: None,
        },
        Some((lo, hi)) => TauResult {
            value: TauValue::Finite(0.5 * (lo + hi)),
            method: TauMethod::Bisection,
            witness_t: Some(hi),
            certificate: is_bipotential(&u.identity_plus(hi), tol)
                .witness
                .map(TauCertificate::Class),
        },
    }
}

/// Both equilibrium potentials of `I + tU` exist and satisfy `x ≥ -abs_eps`
/// (or `x > abs_eps` when `strict`).
fn potentials_ok(u: &Matrix, t: f64, tol: &Tolerance, strict: bool) -> bool {
    match equilibrium_potentials(&u.identity_plus(t)) {
        Ok(eq) => eq.mu.iter().chain(&eq.nu).all(|&x| {
            if strict {
                tol.positive(x)
            } else {
                tol.nonneg(x)
            }
        }),
        Err(_) => false,
    }
}

/// First failure of a predicate that need not be monotone: scan a geometric
/// grid on `(0, t_max]`, then bisect between the last passing and the first
/// failing grid point.
fn first_failure(ok: impl Fn(f64) -> bool, t_max: f64, grid: usize) -> Option<(f64, f64)> {
    let grid = grid.max(2);
    let t_min = t_max * 1e-12;
    let ratio = (t_max / t_min).powf(1.0 / (grid - 1) as f64);
    let mut prev = 0.0;
    let mut t = t_min;
    for i in 0..grid {
        if i == grid - 1 {
            t = t_max;
        }
        if !ok(t) {
            return Some(bisect_between(&ok, prev, t));
        }
        prev = t;
        t *= ratio;
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassTReport {
    /// First `t` at which an equilibrium potential of `I + tU` goes negative.
    pub tau_a: TauValue,
    /// Same with strict positivity (`> abs_eps`). Reported as data only.
    pub tau_a_strict: TauValue,
    /// τ from bi𝒫 membership.
    pub tau_b: TauResult,
    pub agree: bool,
    /// `I + τU` nonsingular; `None` when τ is infinite.
    pub nonsingular_at_tau: Option<bool>,
    pub is_class_t: bool,
}

/// Default agreement slack between the two thresholds.
pub const CLASS_T_EPS: f64 = 1e-6;

pub fn is_class_t(u: &Matrix, t_max: f64, grid: usize, tol: &Tolerance) -> ClassTReport {
    let tol = &sign_tol(tol);
    let finish = |r: Option<(f64, f64)>| match r {
        None => TauValue::Infinite,
        Some((lo, hi)) => TauValue::Finite(0.5 * (lo + hi)),
    };
    let tau_a = finish(first_failure(|t| potentials_ok(u, t, tol, false), t_max, grid));
    let tau_a_strict = finish(first_failure(|t| potentials_ok(u, t, tol, true), t_max, grid));
    let tau_b = tau_bisection(u, t_max, tol);
    let agree = tau_a.agrees_with(tau_b.value, CLASS_T_EPS);
    let nonsingular_at_tau = tau_b
        .value
        .finite()
        .map(|t| is_nonsingular(&u.identity_plus(t)));
    ClassTReport {
        is_class_t: agree && nonsingular_at_tau.unwrap_or(true),
        tau_a,
        tau_a_strict,
        tau_b,
        agree,
        nonsingular_at_tau,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CbfConvexReport {
    pub f_u_bipotential: bool,
    pub tau_f_u: TauResult,
    pub class_t: ClassTReport,
}

/// For `U ∈ bi𝒫` that is a permutation of an increasing CBF and a strictly
/// increasing convex `f`, checks `f(U) ∈ bi𝒫` and records τ(f(U)).
pub fn check_cbf_convex(
    u: &Matrix,
    f: &ScalarFn,
    t_max: f64,
    tol: &Tolerance,
) -> Result<CbfConvexReport, HadamardError> {
    if !(f.is_strictly_increasing() && f.is_convex()) {
        return Err(HadamardError::PreconditionFailed(format!(
            "{f} must be strictly increasing and convex"
        )));
    }
    if !is_bipotential(u, tol).holds {
        return Err(HadamardError::PreconditionFailed(
            "U is not a bi-potential".into(),
        ));
    }
    if !matches!(is_increasing_cbf_permutation(u, tol), CbfSearch::Found(_)) {
        return Err(HadamardError::PreconditionFailed(
            "U is not a permutation of an increasing CBF".into(),
        ));
    }
    let f_u = apply(f, u)?;
    Ok(CbfConvexReport {
        f_u_bipotential: is_bipotential(&f_u, tol).holds,
        tau_f_u: tau_bisection(&f_u, t_max, tol),
        class_t: is_class_t(&f_u, t_max, 64, tol),
    })
}
