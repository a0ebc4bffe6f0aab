//! Sufficient conditions on an SFM for `I + U ∈ bi𝒫`, and τ via the recursion.

use crate::linalg::{Tolerance, Vector};
use crate::tau::{bisect_threshold, sign_tol, TauCertificate, TauMethod, TauResult, TauValue};

use super::algorithm::{invert_filtered, ExtReal};
use super::rep::{FilteredRep, SfmRep};

/// Outcome of a level-by-level inequality scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub holds: bool,
    /// First level `s` (scanning `k-1` down to `0`) and index where it fails.
    pub failure: Option<(usize, usize)>,
    /// `d_s` from the recursion, finest level first. Empty for pure scans.
    pub d: Vec<Vec<ExtReal>>,
}

impl ConditionReport {
    fn ok(d: Vec<Vec<ExtReal>>) -> Self {
        Self {
            holds: true,
            failure: None,
            d,
        }
    }

    fn fail(s: usize, i: usize, d: Vec<Vec<ExtReal>>) -> Self {
        Self {
            holds: false,
            failure: Some((s, i)),
            d,
        }
    }
}

fn rho_gamma(rep: &SfmRep, s: usize) -> Vector {
    let rho = rep.rho(s);
    rep.gamma_norm(s)
        .iter()
        .zip(&rho)
        .map(|(g, r)| g * r)
        .collect()
}

/// Runs `1/d_s = 𝔼_s(1/(c_{s+1}+d_{s+1})) − γ_s 𝔼_s(p_s/(c_{s+1}+d_{s+1})) 𝔼_s(q_s/(c_{s+1}+d_{s+1}))`
/// from `d_k = 1`, requiring `d_s ≥ 0` and `ρ_s γ_s ≤ c_{s+1} + d_{s+1}`.
pub fn check_invm_condition(rep: &SfmRep, tol: &Tolerance) -> ConditionReport {
    let n = rep.n();
    let k = rep.depth();
    let mut d_next: Vec<ExtReal> = vec![ExtReal::Finite(1.0); n];
    let mut history = vec![d_next.clone()];
    for s in (0..k).rev() {
        let c1 = rep.c_norm(s + 1);
        let denom: Vec<ExtReal> = (0..n).map(|i| d_next[i].add(c1[i])).collect();
        let rg = rho_gamma(rep, s);
        if let Some(i) = (0..n).find(|&i| !denom[i].ge(rg[i] - tol.abs_eps)) {
            return ConditionReport::fail(s, i, history);
        }
        let r = rep.filtration().get(s);
        let lay = &rep.layers()[s];
        let h: Vector = denom.iter().map(|x| x.divide(1.0)).collect();
        let ph: Vector = (0..n).map(|i| denom[i].divide(lay.p[i])).collect();
        let qh: Vector = (0..n).map(|i| denom[i].divide(lay.q[i])).collect();
        let (eh, eph, eqh) = (r.expect(&h), r.expect(&ph), r.expect(&qh));
        let g = rep.gamma_norm(s);
        let inv_d: Vector = (0..n).map(|i| eh[i] - g[i] * eph[i] * eqh[i]).collect();
        if let Some(i) = inv_d.iter().position(|&x| !tol.nonneg(x)) {
            return ConditionReport::fail(s, i, history);
        }
        d_next = inv_d
            .iter()
            .map(|&x| ExtReal::recip_of(x.max(0.0)))
            .collect();
        history.push(d_next.clone());
    }
    ConditionReport::ok(history)
}

fn scan(rep: &SfmRep, tol: &Tolerance, rhs: impl Fn(usize) -> Vector) -> ConditionReport {
    for s in (0..rep.depth()).rev() {
        let lhs = rho_gamma(rep, s);
        let r = rhs(s);
        if let Some(i) = (0..rep.n()).find(|&i| !tol.le(lhs[i], r[i])) {
            return ConditionReport::fail(s, i, Vec::new());
        }
    }
    ConditionReport::ok(Vec::new())
}

/// `ρ_s γ_s ≤ c_{s+1} + γ_{s+1}` for every level.
pub fn check_gum_condition(rep: &SfmRep, tol: &Tolerance) -> ConditionReport {
    scan(rep, tol, |s| {
        let c = rep.c_norm(s + 1);
        let g = rep.gamma_norm(s + 1);
        c.iter().zip(&g).map(|(x, y)| x + y).collect()
    })
}

/// `ρ_s γ_s ≤ Σ_{r>s} c_r` for every level.
pub fn check_frances_condition(rep: &SfmRep, tol: &Tolerance) -> ConditionReport {
    scan(rep, tol, |s| {
        let mut acc = vec![0.0; rep.n()];
        for r in s + 1..=rep.depth() {
            for (a, x) in acc.iter_mut().zip(rep.c_norm(r)) {
                *a += x;
            }
        }
        acc
    })
}

/// τ of a nonnegative filtered matrix: the first `t` at which the backward
/// recursion for `I + tU` produces a negative `λ` or `μ`.
pub fn tau_filtered(rep: &FilteredRep, t_max: f64, tol: &Tolerance) -> TauResult {
    let tol = &sign_tol(tol);
    let ok = |t: f64| invert_filtered(rep, t, tol).success;
    match bisect_threshold(ok, t_max) {
        None => TauResult {
            value: TauValue::Infinite,
            method: TauMethod::EquilibriumFailure,
            witness_t: None,
            certificate: None,
        },
        Some((lo, hi)) => {
            let tr = invert_filtered(rep, hi, tol);
            TauResult {
                value: TauValue::Finite(0.5 * (lo + hi)),
                method: TauMethod::EquilibriumFailure,
                witness_t: Some(hi),
                certificate: tr.stop_index.map(|level| TauCertificate::FilteredStop {
                    level,
                    min_value: tr.min_potential_entry(),
                }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtered::{Filtration, Partition, SfmLayer};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn u_beta_rep(beta: f64) -> SfmRep {
        let f = Filtration::new(vec![Partition::trivial(4), Partition::discrete(4)]).unwrap();
        SfmRep::new(
            f,
            vec![
                SfmLayer {
                    c: vec![0.0; 4],
                    gamma: vec![beta; 4],
                    p: vec![0.0, 0.0, 1.0, 1.0],
                    q: vec![1.0, 1.0, 0.0, 0.0],
                },
                SfmLayer::pure(vec![1.0; 4]),
            ],
        )
        .unwrap()
    }

    fn ultrametric_rep() -> SfmRep {
        let f = Filtration::new(vec![
            Partition::trivial(3),
            Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap(),
            Partition::discrete(3),
        ])
        .unwrap();
        SfmRep::new(
            f,
            vec![
                SfmLayer::pure(vec![1.0; 3]),
                SfmLayer::pure(vec![2.0, 2.0, 0.0]),
                SfmLayer::pure(vec![1.0, 3.0, 4.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn gamma_free_reps_pass_everything() {
        let rep = ultrametric_rep();
        assert!(check_invm_condition(&rep, &tol()).holds);
        assert!(check_gum_condition(&rep, &tol()).holds);
        assert!(check_frances_condition(&rep, &tol()).holds);
    }

    #[test]
    fn u_beta_thresholds() {
        for (beta, gum) in [(0.0, true), (0.4, true), (0.5, true), (0.6, false), (1.0, false)] {
            let rep = u_beta_rep(beta);
            assert_eq!(check_gum_condition(&rep, &tol()).holds, gum, "beta = {beta}");
            assert_eq!(check_frances_condition(&rep, &tol()).holds, gum, "beta = {beta}");
        }
        // the recursion certifies I + U_β, which stays in bi𝒫 up to β = 1
        for (beta, invm) in [(0.4, true), (0.6, true), (1.0, true), (1.1, false)] {
            assert_eq!(
                check_invm_condition(&u_beta_rep(beta), &tol()).holds,
                invm,
                "beta = {beta}"
            );
        }
    }

    #[test]
    fn u_beta_recursion_values() {
        let r = check_invm_condition(&u_beta_rep(0.6), &tol());
        // 1/d_0 = 1/2 − 4β/16
        let d0 = r.d[1][0].to_f64();
        assert!((1.0 / d0 - (0.5 - 0.6 / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn tau_of_u_beta() {
        let rep = u_beta_rep(0.8).to_filtered();
        let tau = tau_filtered(&rep, 1e6, &tol());
        let exact = 1.0 / (2.0 * 0.8 - 1.0);
        match tau.value {
            TauValue::Finite(x) => assert!((x - exact).abs() < 1e-6, "{x} vs {exact}"),
            TauValue::Infinite => panic!("expected finite tau"),
        }
        let tau = tau_filtered(&u_beta_rep(0.5).to_filtered(), 1e6, &tol());
        assert_eq!(tau.value, TauValue::Infinite);
        let zero = FilteredRep::zero(3);
        assert_eq!(tau_filtered(&zero, 1e6, &tol()).value, TauValue::Infinite);
    }
}
