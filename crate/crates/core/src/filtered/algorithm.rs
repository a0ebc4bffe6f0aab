//! Backward recursion computing `(I + tU)⁻¹ = I − N` for filtered `U`.

use std::fmt;

use crate::linalg::{Matrix, Tolerance, Vector};

use super::rep::{FilteredRep, SfmRep};

/// Nonnegative extended real used for `d_s = 1/κ_s`, which may be `+∞`.
///
/// Arithmetic follows the convention `0·∞ = 0/0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    /// `1/x` with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip_of(x: f64) -> Self {
        if x == 0.0 {
            ExtReal::Infinity
        } else {
            ExtReal::Finite(1.0 / x)
        }
    }

    pub fn recip(self) -> f64 {
        match self {
            ExtReal::Infinity => 0.0,
            ExtReal::Finite(x) if x == 0.0 => f64::INFINITY,
            ExtReal::Finite(x) => 1.0 / x,
        }
    }

    pub fn add(self, x: f64) -> Self {
        match self {
            ExtReal::Infinity => ExtReal::Infinity,
            ExtReal::Finite(y) => ExtReal::Finite(x + y),
        }
    }

    /// `num / self` under `0/0 = 0`, `x/∞ = 0`.
    pub fn divide(self, num: f64) -> f64 {
        if num == 0.0 {
            return 0.0;
        }
        match self {
            ExtReal::Infinity => 0.0,
            ExtReal::Finite(y) => num / y,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    /// `self ≥ x`.
    pub fn ge(self, x: f64) -> bool {
        match self {
            ExtReal::Infinity => true,
            ExtReal::Finite(y) => y >= x,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Infinity => f64::INFINITY,
            ExtReal::Finite(y) => y,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Infinity => write!(f, "inf"),
            ExtReal::Finite(x) => write!(f, "{x:.16e}"),
        }
    }
}

/// Values computed at level `s` of the general recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralStep {
    pub s: usize,
    pub lambda: Vector,
    pub mu: Vector,
    pub kappa: Vector,
    pub sigma: Vector,
}

/// Values computed at level `s` of the two-step SFM recursion. `lambda` and
/// `mu` are undefined at the finest level `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SfmStep {
    pub s: usize,
    pub lambda: Option<Vector>,
    pub mu: Option<Vector>,
    pub l: Vector,
    pub m: Vector,
    pub kappa: Vector,
    pub sigma: Vector,
    pub d: Vec<ExtReal>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Steps {
    General(Vec<GeneralStep>),
    Sfm(Vec<SfmStep>),
}

/// Why the recursion stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Some `λ` or `μ` went below `-abs_eps`.
    Negative,
    /// A `σ` denominator vanished or became negative.
    Breakdown,
}

/// Full history of one run. Steps are listed from the finest level down.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoTrace {
    pub t: f64,
    pub steps: Steps,
    /// `λ_{-1} = (I − N)𝟏`.
    pub lambda_final: Option<Vector>,
    /// `μ_{-1} = (I − N)'𝟏`.
    pub mu_final: Option<Vector>,
    pub n_matrix: Option<Matrix>,
    /// Level at which the run stopped; `-1` refers to the final vectors.
    pub stop_index: Option<isize>,
    pub stop_reason: Option<StopReason>,
    pub success: bool,
}

impl AlgoTrace {
    /// `I − N`, the computed inverse of `I + tU`.
    pub fn inverse(&self) -> Option<Matrix> {
        self.n_matrix.as_ref().map(Matrix::identity_minus)
    }

    /// Smallest entry among all `λ`, `μ` (and `l`, `m`) computed.
    pub fn min_potential_entry(&self) -> f64 {
        let mut m = f64::INFINITY;
        let mut see = |v: &[f64]| m = v.iter().copied().fold(m, f64::min);
        match &self.steps {
            Steps::General(st) => st.iter().for_each(|x| {
                see(&x.lambda);
                see(&x.mu)
            }),
            Steps::Sfm(st) => st.iter().for_each(|x| {
                see(&x.l);
                see(&x.m);
                if let Some(v) = &x.lambda {
                    see(v);
                }
                if let Some(v) = &x.mu {
                    see(v);
                }
            }),
        }
        if let Some(v) = &self.lambda_final {
            see(v);
        }
        if let Some(v) = &self.mu_final {
            see(v);
        }
        m
    }
}

fn mul(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn all_nonneg(v: &[f64], tol: &Tolerance) -> bool {
    v.iter().all(|&x| tol.nonneg(x))
}

/// `σ = 1/(1 + x)`, or `None` when `1 + x ≤ 0`.
fn sigma_of(x: &[f64]) -> Option<Vector> {
    x.iter()
        .map(|&y| {
            let d = 1.0 + y;
            (d > 0.0 && d.is_finite()).then(|| 1.0 / d)
        })
        .collect()
}

/// Accumulates `Σ D_x 𝔼 D_y` terms into `N`.
fn add_term(
    data: &mut [f64],
    n: usize,
    partition: &super::Partition,
    x: &[f64],
    y: &[f64],
) {
    let w = partition.sizes();
    for atom in partition.atoms() {
        for &i in atom {
            if x[i] == 0.0 {
                continue;
            }
            for &j in atom {
                data[i * n + j] += x[i] * y[j] / w[i];
            }
        }
    }
}

/// Runs the general backward recursion for `I + tU`, `U = Σ a_s 𝔼_s b_s`.
///
/// Starts from `λ_ℓ = μ_ℓ = κ_ℓ = 1`, `σ_ℓ = (1 + t a_ℓ b_ℓ)⁻¹` and descends
/// to `λ_{-1}`, `μ_{-1}`. The run stops at the first level where some `λ` or
/// `μ` drops below `-abs_eps`.
pub fn invert_filtered(rep: &FilteredRep, t: f64, tol: &Tolerance) -> AlgoTrace {
    let n = rep.n();
    let layers = rep.layers();
    let ell = layers.len() - 1;
    let ta: Vec<Vector> = layers
        .iter()
        .map(|l| l.a.iter().map(|x| t * x).collect())
        .collect();

    let mut steps: Vec<GeneralStep> = Vec::with_capacity(ell + 1);
    let fail = |steps: Vec<GeneralStep>, s: isize, reason: StopReason| AlgoTrace {
        t,
        steps: Steps::General(steps),
        lambda_final: None,
        mu_final: None,
        n_matrix: None,
        stop_index: Some(s),
        stop_reason: Some(reason),
        success: false,
    };

    let ones = vec![1.0; n];
    let sig = |s: usize, kappa: &[f64]| {
        let r = &layers[s].partition;
        let x = r.expect(&mul(&mul(kappa, &ta[s]), &layers[s].b));
        sigma_of(&x)
    };
    let Some(sigma_l) = sig(ell, &ones) else {
        return fail(steps, ell as isize, StopReason::Breakdown);
    };
    steps.push(GeneralStep {
        s: ell,
        lambda: ones.clone(),
        mu: ones.clone(),
        kappa: ones.clone(),
        sigma: sigma_l,
    });

    let mut lambda_final = None;
    let mut mu_final = None;
    for s in (-1..ell as isize).rev() {
        let prev = steps.last().expect("at least one step");
        let up = (s + 1) as usize;
        let r_up = &layers[up].partition;
        let e_kb = r_up.expect(&mul(&prev.kappa, &layers[up].b));
        let e_ka = r_up.expect(&mul(&prev.kappa, &ta[up]));
        let lambda: Vector = (0..n)
            .map(|i| prev.lambda[i] * (1.0 - prev.sigma[i] * ta[up][i] * e_kb[i]))
            .collect();
        let mu: Vector = (0..n)
            .map(|i| prev.mu[i] * (1.0 - prev.sigma[i] * layers[up].b[i] * e_ka[i]))
            .collect();
        let ok = all_nonneg(&lambda, tol) && all_nonneg(&mu, tol);
        if s < 0 {
            lambda_final = Some(lambda);
            mu_final = Some(mu);
            if !ok {
                let mut tr = fail(steps, -1, StopReason::Negative);
                tr.lambda_final = lambda_final;
                tr.mu_final = mu_final;
                return tr;
            }
            break;
        }
        let s = s as usize;
        let kappa = r_up.expect(&lambda);
        let sigma = sig(s, &kappa);
        steps.push(GeneralStep {
            s,
            lambda,
            mu,
            kappa,
            sigma: sigma.clone().unwrap_or_else(|| vec![f64::NAN; n]),
        });
        if !ok {
            return fail(steps, s as isize, StopReason::Negative);
        }
        if sigma.is_none() {
            return fail(steps, s as isize, StopReason::Breakdown);
        }
    }

    let mut data = vec![0.0; n * n];
    for st in &steps {
        let x: Vector = (0..n)
            .map(|i| st.sigma[i] * st.lambda[i] * ta[st.s][i])
            .collect();
        let y = mul(&layers[st.s].b, &st.mu);
        add_term(&mut data, n, &layers[st.s].partition, &x, &y);
    }
    AlgoTrace {
        t,
        steps: Steps::General(steps),
        lambda_final,
        mu_final,
        n_matrix: Some(Matrix::new(n, data).expect("finite recursion values")),
        stop_index: None,
        stop_reason: None,
        success: true,
    }
}

/// Two-step recursion for an SFM at parameter `t` (`c → t·c`, `γ → t·γ`).
///
/// Starts from `κ_k = l_k = m_k = 1`, `σ_k = (1 + c_k)⁻¹`; then for
/// `s = k-1, …, 0`:
/// `λ_s = σ_{s+1} l_{s+1}`,
/// `l_s = λ_s [1 − γ_s p_s 𝔼_s(q_s/(c_{s+1} + d_{s+1}))]`,
/// `κ_s = 𝔼_s(l_s)`, `d_s = 1/κ_s`, `σ_s = 1/(1 + κ_s c_s)`,
/// and symmetrically for `μ, m` with `p, q` swapped.
pub fn invert_sfm(rep: &SfmRep, t: f64, tol: &Tolerance) -> AlgoTrace {
    let n = rep.n();
    let k = rep.depth();
    let filt = rep.filtration();
    let c: Vec<Vector> = (0..=k)
        .map(|s| rep.c_norm(s).iter().map(|x| t * x).collect())
        .collect();
    let g: Vec<Vector> = (0..=k)
        .map(|s| rep.gamma_norm(s).iter().map(|x| t * x).collect())
        .collect();
    let layers = rep.layers();

    let fail = |steps: Vec<SfmStep>, s: isize, reason: StopReason| AlgoTrace {
        t,
        steps: Steps::Sfm(steps),
        lambda_final: None,
        mu_final: None,
        n_matrix: None,
        stop_index: Some(s),
        stop_reason: Some(reason),
        success: false,
    };

    let ones = vec![1.0; n];
    let mut steps: Vec<SfmStep> = Vec::with_capacity(k + 1);
    let Some(sigma_k) = sigma_of(&c[k]) else {
        return fail(steps, k as isize, StopReason::Breakdown);
    };
    steps.push(SfmStep {
        s: k,
        lambda: None,
        mu: None,
        l: ones.clone(),
        m: ones.clone(),
        kappa: ones.clone(),
        sigma: sigma_k,
        d: vec![ExtReal::Finite(1.0); n],
    });

    for s in (0..k).rev() {
        let prev = steps.last().expect("at least one step");
        let r = filt.get(s);
        let lay = &layers[s];
        // 1/(c_{s+1} + d_{s+1}) = κ_{s+1} σ_{s+1}
        let h: Vector = (0..n).map(|i| prev.kappa[i] * prev.sigma[i]).collect();
        let e_qh = r.expect(&mul(&lay.q, &h));
        let e_ph = r.expect(&mul(&lay.p, &h));
        let lambda: Vector = (0..n).map(|i| prev.sigma[i] * prev.l[i]).collect();
        let mu: Vector = (0..n).map(|i| prev.sigma[i] * prev.m[i]).collect();
        let l: Vector = (0..n)
            .map(|i| lambda[i] * (1.0 - g[s][i] * lay.p[i] * e_qh[i]))
            .collect();
        let m: Vector = (0..n)
            .map(|i| mu[i] * (1.0 - g[s][i] * lay.q[i] * e_ph[i]))
            .collect();
        let kappa = r.expect(&l);
        let d = kappa.iter().map(|&x| ExtReal::recip_of(x)).collect();
        let sigma = sigma_of(&mul(&kappa, &c[s]));
        let ok = [&lambda, &mu, &l, &m].iter().all(|v| all_nonneg(v, tol));
        steps.push(SfmStep {
            s,
            lambda: Some(lambda),
            mu: Some(mu),
            l,
            m,
            kappa,
            sigma: sigma.clone().unwrap_or_else(|| vec![f64::NAN; n]),
            d,
        });
        if !ok {
            return fail(steps, s as isize, StopReason::Negative);
        }
        if sigma.is_none() {
            return fail(steps, s as isize, StopReason::Breakdown);
        }
    }

    let last = steps.last().expect("at least one step");
    let lambda_final: Vector = (0..n).map(|i| last.sigma[i] * last.l[i]).collect();
    let mu_final: Vector = (0..n).map(|i| last.sigma[i] * last.m[i]).collect();
    if !(all_nonneg(&lambda_final, tol) && all_nonneg(&mu_final, tol)) {
        let mut tr = fail(steps, -1, StopReason::Negative);
        tr.lambda_final = Some(lambda_final);
        tr.mu_final = Some(mu_final);
        return tr;
    }

    // N = Σ c_s σ_s l_s 𝔼_s m_s + γ_s λ_s p_s 𝔼_s q_s μ_s
    let mut data = vec![0.0; n * n];
    for st in &steps {
        let s = st.s;
        let r = filt.get(s);
        let x: Vector = (0..n).map(|i| c[s][i] * st.sigma[i] * st.l[i]).collect();
        add_term(&mut data, n, r, &x, &st.m);
        if let (Some(lam), Some(mu)) = (&st.lambda, &st.mu) {
            let lay = &layers[s];
            let x: Vector = (0..n).map(|i| g[s][i] * lam[i] * lay.p[i]).collect();
            let y = mul(&lay.q, mu);
            add_term(&mut data, n, r, &x, &y);
        }
    }
    AlgoTrace {
        t,
        steps: Steps::Sfm(steps),
        lambda_final: Some(lambda_final),
        mu_final: Some(mu_final),
        n_matrix: Some(Matrix::new(n, data).expect("finite recursion values")),
        stop_index: None,
        stop_reason: None,
        success: true,
    }
}
