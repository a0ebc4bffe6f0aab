//! Randomized theorem suites behind `hadamat verify`.
//!
//! Trials run in parallel; trial `i` draws from `trial_rng(seed, i)` and the
//! outcomes are folded in trial order, so the summary does not depend on
//! scheduling.

use std::fmt;
use std::str::FromStr;

use hadamat::classes::{is_bipotential, is_inverse_m, is_potential, Verdict};
use hadamat::filtered::{cbf_to_sfm, check_gum_condition, invert_filtered, invert_sfm, tau_filtered};
use hadamat::hadamard::{
    apply, check_markov_preservation, check_potencial_fu, hadamard_power, HadamardPower, ScalarFn,
};
use hadamat::linalg::{is_nonsingular, lu_invert, Lu};
use hadamat::random::{
    bipotential, doubly_substochastic, increasing_cbf, inverse_m, permutation, potential, sfm_gum,
    substochastic, trial_rng,
};
use hadamat::structure::{
    contrapositive_search, generate_gum_instance, gum_nonsingular, gum_to_nbf_permutation, is_gum,
    is_nbf,
};
use hadamat::tau::{is_class_t, tau_bisection, DEFAULT_T_MAX};
use hadamat::{Matrix, Tolerance};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::io::fmt_real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Power,
    Markov,
    PotencialFu,
    GumStability,
    LemmaSubmatrix,
    LemmaMt,
    FilteredOracle,
    ClassT,
    Contrapositive,
}

impl Theorem {
    pub const ALL: [Theorem; 9] = [
        Theorem::Power,
        Theorem::Markov,
        Theorem::PotencialFu,
        Theorem::GumStability,
        Theorem::LemmaSubmatrix,
        Theorem::LemmaMt,
        Theorem::FilteredOracle,
        Theorem::ClassT,
        Theorem::Contrapositive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Power => "power",
            Theorem::Markov => "markov",
            Theorem::PotencialFu => "potencialfU",
            Theorem::GumStability => "gum_stability",
            Theorem::LemmaSubmatrix => "lemma_submatrix",
            Theorem::LemmaMt => "lemma_Mt",
            Theorem::FilteredOracle => "filtered_oracle",
            Theorem::ClassT => "class_T",
            Theorem::Contrapositive => "contrapositive",
        }
    }

    fn residual_label(self) -> &'static str {
        match self {
            Theorem::Power => "max sign defect (passes at <= tol)",
            Theorem::Markov => "max defect of Q >= 0 and sums <= 1",
            Theorem::PotencialFu => "max negativity of the potentials of f(U)",
            Theorem::GumStability => "max |U U^-1 - I| over nonsingular instances",
            Theorem::LemmaSubmatrix => "max negativity of submatrix potentials",
            Theorem::LemmaMt => "max of -min potential of I + tU (negative is strict)",
            Theorem::FilteredOracle => "max |(I - N) - (I + tU)^-1|",
            Theorem::ClassT => "max |tau_equilibrium - tau_bisection|",
            Theorem::Contrapositive => "max t of the witnesses found",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown theorem {0:?}; expected one of power, markov, potencialfU, gum_stability, lemma_submatrix, lemma_Mt, filtered_oracle, class_T, contrapositive")]
pub struct UnknownTheorem(pub String);

impl FromStr for Theorem {
    type Err = UnknownTheorem;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        let t = match key.as_str() {
            "power" => Theorem::Power,
            "markov" | "markovchain" => Theorem::Markov,
            "potencialfu" => Theorem::PotencialFu,
            "gum_stability" => Theorem::GumStability,
            "lemma_submatrix" | "lm2" => Theorem::LemmaSubmatrix,
            "lemma_mt" => Theorem::LemmaMt,
            "filtered_oracle" => Theorem::FilteredOracle,
            "class_t" => Theorem::ClassT,
            "contrapositive" => Theorem::Contrapositive,
            _ => return Err(UnknownTheorem(s.to_string())),
        };
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid harness config: {0}")]
pub struct ConfigError(String);

#[derive(Debug, Clone, PartialEq)]
pub struct HarnessConfig {
    pub seed: u64,
    pub trials: usize,
    pub n_max: usize,
    pub alpha_list: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub t_max: f64,
    pub tol: Tolerance,
}

impl HarnessConfig {
    /// Defaults sized to the acceptance runs of each suite.
    pub fn for_theorem(theorem: Theorem, seed: u64) -> Self {
        let (trials, n_max, t_grid) = match theorem {
            Theorem::Power | Theorem::Markov | Theorem::FilteredOracle => (200, 6, vec![0.5, 1.0, 10.0]),
            Theorem::ClassT | Theorem::Contrapositive => (50, 6, vec![0.1, 1.0, 10.0, 100.0, 1000.0]),
            _ => (100, 6, vec![0.0, 0.1, 1.0, 10.0, 100.0]),
        };
        let n_max = if theorem == Theorem::FilteredOracle { 8 } else { n_max };
        Self {
            seed,
            trials,
            n_max,
            alpha_list: vec![1.5, 2.0, 3.0, 7.0],
            t_grid,
            t_max: DEFAULT_T_MAX,
            tol: Tolerance::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials < 1 {
            return Err(ConfigError("trials must be at least 1".into()));
        }
        if self.n_max < 2 {
            return Err(ConfigError("n_max must be at least 2".into()));
        }
        if self.alpha_list.is_empty() || self.alpha_list.iter().any(|a| !(*a >= 1.0 && a.is_finite())) {
            return Err(ConfigError("alpha values must be finite and >= 1".into()));
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(ConfigError("t values must be finite and >= 0".into()));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(ConfigError("t_max must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
struct Outcome {
    checks: usize,
    violations: usize,
    skipped: usize,
    residual: f64,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { residual: f64::NEG_INFINITY, ..Self::default() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            self.failures.push(what());
        }
    }

    fn residual(&mut self, r: f64) {
        self.residual = self.residual.max(r);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub theorem: Theorem,
    pub seed: u64,
    pub trials: usize,
    pub checks: usize,
    pub violations: usize,
    /// Trials whose preconditions were not met; not counted as violations.
    pub skipped: usize,
    /// `-inf` when no trial produced one.
    pub max_residual: f64,
    pub residual_label: &'static str,
    /// First few violation descriptions, in trial order.
    pub failures: Vec<String>,
    /// Data reported without a pass/fail claim.
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut row = |k: &str, v: String| out.push_str(&format!("{k:<14}{v}\n"));
        row("theorem", self.theorem.to_string());
        row("seed", self.seed.to_string());
        row("trials", self.trials.to_string());
        row("checks", self.checks.to_string());
        row("violations", self.violations.to_string());
        row("skipped", self.skipped.to_string());
        row("max residual", format!("{}  ({})", fmt_real(self.max_residual), self.residual_label));
        for f in &self.failures {
            out.push_str(&format!("violation: {f}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

const MAX_LISTED_FAILURES: usize = 10;

pub fn run_suite(theorem: Theorem, cfg: &HarnessConfig) -> SuiteReport {
    let outcomes: Vec<Outcome> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            let mut o = Outcome::new();
            run_trial(theorem, cfg, trial, &mut rng, &mut o);
            for f in &mut o.failures {
                *f = format!("trial {trial}: {f}");
            }
            o
        })
        .collect();

    let mut report = SuiteReport {
        theorem,
        seed: cfg.seed,
        trials: cfg.trials,
        checks: 0,
        violations: 0,
        skipped: 0,
        max_residual: f64::NEG_INFINITY,
        residual_label: theorem.residual_label(),
        failures: Vec::new(),
        notes: Vec::new(),
    };
    for o in outcomes {
        report.checks += o.checks;
        report.violations += o.violations;
        report.skipped += o.skipped;
        report.max_residual = report.max_residual.max(o.residual);
        report.notes.extend(o.notes);
        let room = MAX_LISTED_FAILURES.saturating_sub(report.failures.len());
        report.failures.extend(o.failures.into_iter().take(room));
    }
    if theorem == Theorem::Contrapositive {
        report.notes.extend(ejemplo_notes(cfg));
    }
    report
}

fn size(cfg: &HarnessConfig, rng: &mut ChaCha8Rng, cap: usize) -> usize {
    rng.gen_range(2..=cfg.n_max.min(cap).max(2))
}

fn run_trial(theorem: Theorem, cfg: &HarnessConfig, trial: u64, rng: &mut ChaCha8Rng, o: &mut Outcome) {
    match theorem {
        Theorem::Power => power_trial(cfg, trial, rng, o),
        Theorem::Markov => markov_trial(cfg, trial, rng, o),
        Theorem::PotencialFu => potencial_fu_trial(cfg, trial, rng, o),
        Theorem::GumStability => gum_trial(cfg, trial, rng, o),
        Theorem::LemmaSubmatrix => submatrix_trial(cfg, rng, o),
        Theorem::LemmaMt => mt_trial(cfg, trial, rng, o),
        Theorem::FilteredOracle => filtered_trial(cfg, trial, rng, o),
        Theorem::ClassT => class_t_trial(cfg, rng, o),
        Theorem::Contrapositive => contrapositive_trial(cfg, rng, o),
    }
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Largest negativity among the potentials a verdict carries.
fn potential_defect(v: &Verdict) -> f64 {
    let mu = v.mu.as_deref().map_or(f64::NEG_INFINITY, |m| -min_of(m));
    let nu = v.nu.as_deref().map_or(f64::NEG_INFINITY, |m| -min_of(m));
    mu.max(nu)
}

fn power_trial(cfg: &HarnessConfig, trial: u64, rng: &mut ChaCha8Rng, o: &mut Outcome) {
    let n = size(cfg, rng, usize::MAX);
    let kind = trial % 3;
    let u = match kind {
        0 => inverse_m(n, rng),
        1 => potential(n, rng),
        _ => bipotential(n, rng),
    };
    for &alpha in &cfg.alpha_list {
        let ua = hadamard_power(&u, HadamardPower::new(alpha).expect("validated")).expect("nonnegative");
        let invm = is_inverse_m(&ua, &cfg.tol);
        o.check(invm.holds, || format!("U^({alpha}) not inverse M (n = {n})"));
        if let Ok(lu) = Lu::factor(&ua) {
            let inv = lu.inverse();
            let off = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| inv.get(i, j))
                .fold(f64::NEG_INFINITY, f64::max);
            o.residual(off);
        }
        if kind >= 1 {
            let pot = is_potential(&ua, &cfg.tol);
            o.residual(potential_defect(&pot));
            o.check(pot.holds, || format!("U^({alpha}) of a potential is not a potential (n = {n})"));
        }
        if kind == 2 {
            let bi = is_bipotential(&ua, &cfg.tol);
            o.residual(potential_defect(&bi));
            o.check(bi.holds, || format!("U^({alpha}) of a bi-potential is not one (n = {n})"));
        }
    }
}

fn markov_trial(cfg: &HarnessConfig, trial: u64, rng: &mut ChaCha8Rng, o: &mut Outcome) {
    let n = size(cfg, rng, usize::MAX);
    let doubly = trial % 2 == 1;
    let p = if doubly { doubly_substochastic(n, rng) } else { substochastic(n, rng) };
    let u = lu_invert(&p.identity_minus()).expect("I - P is strictly dominant");
    for &alpha in &cfg.alpha_list {
        match check_markov_preservation(&u, HadamardPower::new(alpha).expect("validated"), &cfg.tol) {
            Ok(r) => {
                o.residual(-r.margin());
                o.check(r.holds(), || format!("Q({alpha}) not substochastic (margin {})", fmt_real(r.margin())));
                if doubly {
                    o.check(r.q_col_sums_ok == Some(true), || format!("Q({alpha}) column sums exceed 1"));
                }
                if trial == 0 {
                    let rows: Vec<String> = r
                        .q
                        .rows()
                        .map(|row| row.iter().map(|&x| format!("{x:.4}")).collect::<Vec<_>>().join(" "))
                        .collect();
                    o.notes.push(format!("trial 0, alpha {alpha}: Q = [{}]", rows.join("; ")));
                }
            }
            Err(e) => {
                o.skipped += 1;
                o.notes.push(format!("precondition unmet: {e}"));
            }
        }
    }
}

fn potencial_fu_trial(cfg: &HarnessConfig, trial: u64, rng: &mut ChaCha8Rng, o: &mut Outcome) {
    let n = size(cfg, rng, usize::MAX);
    let u = if trial % 2 == 0 { potential(n, rng) } else { bipotential(n, rng) };
    let alpha = cfg.alpha_list[(trial as usize / 2) % cfg.alpha_list.len()];
    let fs = [
        ScalarFn::Power(alpha),
        ScalarFn::SquareMinusCos,
        ScalarFn::ExpMinusOne,
        ScalarFn::Cubic,
        ScalarFn::Identity.shifted(0.5),
    ];
    for f in &fs {
        match check_potencial_fu(&u, f, &cfg.tol) {
            Ok(r) => {
                let mut defect = f64::NEG_INFINITY;
                if let Some(mu) = &r.right_potential {
                    defect = defect.max(-min_of(mu));
                }
                if let Some(nu) = &r.left_potential {
                    defect = defect.max(-min_of(nu));
                }
                o.residual(defect);
                o.check(r.holds(), || format!("{f}: conclusions fail (det {})", fmt_real(r.det_f)));
            }
            Err(e) => {
                o.skipped += 1;
                o.notes.push(format!("precondition unmet for {f}: {e}"));
            }
        }
    }
}

fn gum_trial(cfg: &HarnessConfig, trial: u64, rng: &mut ChaCha8Rng, o: &mut Outcome) {
    let n = size(cfg, rng, usize::MAX);
    let inst = generate_gum_instance(n, rng.gen(), trial % 5 == 4);
    let u = &inst.matrix;
    let tol = &cfg.tol;
    o.check(is_gum(u, tol).holds, || "generated matrix is not a GUM".into());
    o.check(is_nbf(&u.permute(&inst.perm), tol), || "known permutation does not give an NBF".into());
    match gum_to_nbf_permutation(u, tol) {
        Ok(p) => o.check(is_nbf(&u.permute(&p), tol), || "constructed permutation is not NBF".into()),
        Err(e) => o.check(false, || format!("NBF construction failed: {e}")),
    }
    let lu_ok = is_nonsingular(u);
    match gum_nonsingular(u, tol) {
        Ok(comb) => o.check(comb == lu_ok, || format!("combinatorial nonsingularity {comb}, LU {lu_ok}")),
        Err(e) => o.check(false, || format!("nonsingularity test failed: {e}")),
    }
    if lu_ok {
        o.check(is_bipotential(u, tol).holds, || "nonsingular GUM is not a bi-potential".into());
        let inv = lu_invert(u).expect("nonsingular");
        let r = u.matmul(&inv).expect("square").max_abs_diff(&Matrix::identity(n)).expect("square");
        o.residual(r);
    }
    let entries = u.as_slice();
    let v1 = entries[rng.gen_range(0..entries.len())];
    let v2 = entries[rng.gen_range(0..entries.len())];
    let fs = [ScalarFn::Power(2.0), ScalarFn::Step(vec![(v1.min(v2), 1.0), (v1.max(v2), 2.0)])];
    for f in &fs {
        let fu = apply(f, u).expect("nonnegative");
        o.check(is_gum(&fu, tol).holds, || format!("{f}(U) is not a GUM"));
    }
}

/// Subsets are enumerated exhaustively up to this size.
const SUBMATRIX_MAX_N: usize = 10;

fn submatrix_trial(cfg: &HarnessConfig, rng: &mut ChaCha8Rng, o: &mut Outcome) {
    let n = size(cfg, rng, SUBMATRIX_MAX_N);
    let u = bipotential(n, rng);
    for mask in 1u32..(1 << n) {
        let keep: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let v = is_bipotential(&u.select(&keep), &cfg.tol);
        o.residual(potential_defect(&v));
        o.check(v.holds, || format!("submatrix {keep:?} of a bi-potential is not one"));
    }
}

fn mt_trial(cfg: &HarnessConfig, trial: u64, rng: &mut ChaCha8Rng, o: &mut Outcome) {
    let n = size(cfg, rng, usize::MAX);
    let u = bipotential(n, rng);
    for &t in &cfg.t_grid {
        let v = is_bipotential(&u.identity_plus(t), &cfg.tol);
        let defect = potential_defect(&v);
        o.residual(defect);
        o.check(v.holds && defect < 0.0, || format!("I + {t} U not a bi-potential with positive potentials (trial {trial})"));
    }
}

fn filtered_trial(cfg: &HarnessConfig, trial: u64, rng: &mut ChaCha8Rng, o: &mut Outcome) {
    // n = 1 is a single atom and still exercises the recursion
    let n = rng.gen_range(1..=cfg.n_max);
    let rep = sfm_gum(n, trial % 2 == 0, rng);
    let tol = &cfg.tol;
    o.check(check_gum_condition(&rep, tol).holds, || "generated SFM fails the GUM condition".into());
    let u = rep.materialize();
    let filtered = rep.to_filtered();
    for &t in &cfg.t_grid {
        let oracle = lu_invert(&u.identity_plus(t)).expect("oracle inverse");
        for (name, tr) in [("invert_sfm", invert_sfm(&rep, t, tol)), ("invert_filtered", invert_filtered(&filtered, t, tol))] {
            match tr.inverse() {
                Some(inv) if tr.success => {
                    let r = inv.max_abs_diff(&oracle).expect("same size");
                    o.residual(r);
                    o.check(r <= 1e-9, || format!("{name} at t = {t}: residual {}", fmt_real(r)));
                }
                _ => o.check(false, || format!("{name} failed at t = {t} (n = {n})")),
            }
        }
    }
}

fn class_t_trial(cfg: &HarnessConfig, rng: &mut ChaCha8Rng, o: &mut Outcome) {
    let n = size(cfg, rng, usize::MAX);
    let u = increasing_cbf(n, rng);
    let tol = &cfg.tol;
    let r = is_class_t(&u, cfg.t_max, 64, tol);
    match (r.tau_a.finite(), r.tau_b.value.finite()) {
        (Some(a), Some(b)) => o.residual((a - b).abs()),
        (None, None) => o.residual(0.0),
        _ => o.residual(f64::INFINITY),
    }
    o.check(r.agree, || format!("thresholds differ: {} vs {}", r.tau_a, r.tau_b.value));
    o.check(r.is_class_t, || "I + tau U is singular".into());

    let perm = permutation(n, rng);
    let tp = tau_bisection(&u.permute(&perm), cfg.t_max, tol);
    o.check(tp.value.agrees_with(r.tau_b.value, 1e-8), || {
        format!("tau not permutation invariant: {} vs {}", tp.value, r.tau_b.value)
    });

    match cbf_to_sfm(&u, tol) {
        Ok(rep) => {
            let tf = tau_filtered(&rep.to_filtered(), cfg.t_max, tol);
            o.check(tf.value.agrees_with(r.tau_b.value, 1e-6), || {
                format!("filtered tau {} vs {}", tf.value, r.tau_b.value)
            });
        }
        Err(e) => o.check(false, || format!("CBF decomposition failed: {e}")),
    }
}

/// Small nonnegative integer matrix that is not a GUM. Diagonals are kept
/// dominant half of the time, so both failure modes of the GUM test occur.
fn random_non_gum(cfg: &HarnessConfig, rng: &mut ChaCha8Rng) -> Matrix {
    let n = size(cfg, rng, 4);
    loop {
        let dominant = rng.gen_bool(0.5);
        let mut m = Matrix::from_fn(n, |_, _| f64::from(rng.gen_range(0..=3u8)));
        if dominant {
            m = Matrix::from_fn(n, |i, j| if i == j { 4.0 } else { m.get(i, j) });
        }
        if !is_gum(&m, &cfg.tol).holds {
            return m;
        }
    }
}

fn contrapositive_trial(cfg: &HarnessConfig, rng: &mut ChaCha8Rng, o: &mut Outcome) {
    let u = random_non_gum(cfg, rng);
    match contrapositive_search(&u, &cfg.t_grid, &cfg.tol) {
        Ok(Some(w)) => {
            let fu = apply(&w.f, &u).expect("nonnegative");
            let fails = !is_bipotential(&fu.identity_plus(w.t), &cfg.tol).holds;
            o.residual(w.t);
            o.check(fails, || format!("witness {} at t = {} does not fail", w.f, fmt_real(w.t)));
        }
        Ok(None) => o.check(false, || format!("no witness in the step family for {:?}", u.to_rows())),
        Err(e) => o.check(false, || format!("search rejected input: {e}")),
    }
}

/// The non-GUM example whose `I + t f(U)` stays inverse M. Reported only.
fn ejemplo_notes(cfg: &HarnessConfig) -> Vec<String> {
    let mut notes = Vec::new();
    for (a, b, c, d) in [(1.0, 2.0, 3.0, 4.0), (0.5, 0.25, 0.125, 2.0), (1.0, 1.0, 1.0, 1.0)] {
        let u = Matrix::from_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [a, b, 1.0, 0.0],
            [c, d, 0.0, 1.0],
        ])
        .expect("4x4");
        let outcome = match contrapositive_search(&u, &cfg.t_grid, &cfg.tol) {
            Ok(Some(w)) => format!("witness f = {}, t = {}", w.f, fmt_real(w.t)),
            Ok(None) => "no witness in the step family".into(),
            Err(e) => format!("not searched: {e}"),
        };
        notes.push(format!("example (a,b,c,d) = ({a},{b},{c},{d}): {outcome}"));
    }
    notes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(theorem: Theorem) -> HarnessConfig {
        HarnessConfig { trials: 6, ..HarnessConfig::for_theorem(theorem, 11) }
    }

    #[test]
    fn names_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.name().parse::<Theorem>(), Ok(t));
        }
        assert_eq!("markovchain".parse::<Theorem>(), Ok(Theorem::Markov));
        assert!("nope".parse::<Theorem>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = HarnessConfig::for_theorem(Theorem::Power, 0);
        assert!(c.validate().is_ok());
        c.trials = 0;
        assert!(c.validate().is_err());
        c.trials = 1;
        c.n_max = 1;
        assert!(c.validate().is_err());
        c.n_max = 3;
        c.alpha_list = vec![0.5];
        assert!(c.validate().is_err());
        c.alpha_list = vec![2.0];
        c.t_grid = vec![-1.0];
        assert!(c.validate().is_err());
    }

    #[test]
    fn every_suite_runs_clean_on_a_few_trials() {
        for t in Theorem::ALL {
            let r = run_suite(t, &small(t));
            assert!(r.passed(), "{}", r.render());
            assert!(r.checks > 0, "{t}");
        }
    }

    #[test]
    fn reports_are_schedule_independent() {
        let cfg = small(Theorem::Markov);
        let a = run_suite(Theorem::Markov, &cfg);
        let b = run_suite(Theorem::Markov, &cfg);
        assert_eq!(a, b);
        assert_eq!(a.render(), b.render());
    }
}
