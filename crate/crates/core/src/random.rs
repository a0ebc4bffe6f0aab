//! Seeded instance generators.
//!
//! Every generator takes an explicit RNG; [`trial_rng`] derives an
//! independent stream per `(seed, trial)` so parallel runs are reproducible.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::filtered::{Filtration, Partition, SfmLayer, SfmRep};
use crate::linalg::{lu_invert, Matrix};

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform entries, each row rescaled to a sum drawn from `[0.2, 0.9]`.
pub fn substochastic<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = row.iter().sum();
        let target = rng.gen_range(0.2..=0.9);
        if total > 0.0 {
            row.iter_mut().for_each(|x| *x *= target / total);
        }
        rows.push(row);
    }
    Matrix::from_rows(&rows).expect("square")
}

const SINKHORN_SWEEPS: usize = 50;

/// Row and column sums both at most a target drawn from `[0.2, 0.9]`.
///
/// Alternating row/column rescaling toward the target, then one capping pass
/// on rows and one on columns, which keeps both bounds exact.
pub fn doubly_substochastic<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    let target = rng.gen_range(0.2..=0.9);
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let scale_rows = |m: &mut Vec<Vec<f64>>, cap_only: bool| {
        for row in m.iter_mut() {
            let s: f64 = row.iter().sum();
            if s > 0.0 && (!cap_only || s > target) {
                row.iter_mut().for_each(|x| *x *= target / s);
            }
        }
    };
    let scale_cols = |m: &mut Vec<Vec<f64>>, cap_only: bool| {
        for j in 0..n {
            let s: f64 = m.iter().map(|r| r[j]).sum();
            if s > 0.0 && (!cap_only || s > target) {
                m.iter_mut().for_each(|r| r[j] *= target / s);
            }
        }
    };
    for _ in 0..SINKHORN_SWEEPS {
        scale_rows(&mut m, false);
        scale_cols(&mut m, false);
    }
    scale_rows(&mut m, true);
    scale_cols(&mut m, true);
    Matrix::from_rows(&m).expect("square")
}

fn clamp_inverse(m: &Matrix) -> Matrix {
    lu_invert(m)
        .expect("strictly diagonally dominant")
        .map(|x| x.max(0.0))
}

/// `U = (k(I − P))⁻¹` with `P` row substochastic and `k ∈ [0.5, 2]`.
pub fn potential<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    let k = rng.gen_range(0.5..=2.0);
    clamp_inverse(&substochastic(n, rng).identity_minus().scale(k))
}

/// Same with `P` doubly substochastic.
pub fn bipotential<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    let k = rng.gen_range(0.5..=2.0);
    clamp_inverse(&doubly_substochastic(n, rng).identity_minus().scale(k))
}

/// Inverse of `D_r (I − P) D_c` with positive diagonal scalings, so the
/// inverse M-matrix is generally not a potential.
pub fn inverse_m<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    let a = substochastic(n, rng).identity_minus();
    let dr: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..=2.0)).collect();
    let dc: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..=2.0)).collect();
    clamp_inverse(&Matrix::from_fn(n, |i, j| dr[i] * a.get(i, j) * dc[j]))
}

pub fn permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Splits every non-singleton atom until all atoms are singletons. Atoms are
/// cut in two, or in three with probability ½ unless `dyadic`.
fn random_filtration<R: Rng>(n: usize, dyadic: bool, rng: &mut R) -> Filtration {
    let mut levels = vec![Partition::trivial(n)];
    while !levels.last().unwrap().is_discrete() {
        let mut atoms = Vec::new();
        for atom in levels.last().unwrap().atoms() {
            if atom.len() == 1 {
                atoms.push(atom.clone());
                continue;
            }
            let mut a = atom.clone();
            a.shuffle(rng);
            let pieces = if !dyadic && a.len() >= 3 && rng.gen_bool(0.5) { 3 } else { 2 };
            let mut cuts: Vec<usize> = (1..a.len()).collect();
            cuts.shuffle(rng);
            let mut cuts: Vec<usize> = cuts.into_iter().take(pieces - 1).collect();
            cuts.sort_unstable();
            let mut start = 0;
            for c in cuts.into_iter().chain([a.len()]) {
                atoms.push(a[start..c].to_vec());
                start = c;
            }
        }
        levels.push(Partition::new(n, atoms).expect("valid split"));
    }
    Filtration::new(levels).expect("refining chain")
}

/// Random nonnegative SFM satisfying `ρ_s γ_s ≤ c_{s+1} + γ_{s+1}`.
///
/// `C_s ∈ [0, 1]` per atom (`[0.25, 2]` at the finest level) and
/// `Γ_s = u · bound` with `u` uniform in `[0, 1]`, filled from the finest
/// level up.
pub fn sfm_gum<R: Rng>(n: usize, dyadic: bool, rng: &mut R) -> SfmRep {
    let filtration = random_filtration(n, dyadic, rng);
    let k = filtration.len() - 1;
    let mut layers: Vec<SfmLayer> = (0..=k)
        .map(|_| SfmLayer {
            c: vec![0.0; n],
            gamma: vec![0.0; n],
            p: vec![1.0; n],
            q: vec![0.0; n],
        })
        .collect();

    for s in 0..=k {
        let atoms = filtration.get(s).atoms().to_vec();
        for atom in &atoms {
            let c = if s == k { rng.gen_range(0.25..=2.0) } else { rng.gen_range(0.0..=1.0) };
            for &i in atom {
                layers[s].c[i] = c;
            }
        }
        if s < k {
            let finer = filtration.get(s + 1);
            for atom in &atoms {
                if atom.len() == 1 {
                    continue;
                }
                let mut children: Vec<usize> = atom.iter().map(|&i| finer.atom_of(i)).collect();
                children.sort_unstable();
                children.dedup();
                // both sides nonempty, so a two-way split is exactly {p, q}
                let last = children.len() - 1;
                for (c, child) in children.into_iter().enumerate() {
                    let in_p = match c {
                        0 => false,
                        _ if c == last => true,
                        _ => rng.gen_bool(0.5),
                    };
                    for &i in &finer.atoms()[child] {
                        layers[s].p[i] = if in_p { 1.0 } else { 0.0 };
                        layers[s].q[i] = if in_p { 0.0 } else { 1.0 };
                    }
                }
            }
        }
    }

    for s in (0..k).rev() {
        let r = filtration.get(s);
        let w = r.sizes();
        let next = filtration.get(s + 1).sizes();
        let lay = &layers[s];
        let ep = r.expect(&lay.p);
        let eq = r.expect(&lay.q);
        let mut gamma = vec![0.0; n];
        for atom in filtration.get(s).atoms() {
            if atom.len() == 1 {
                continue;
            }
            let bound = atom
                .iter()
                .map(|&i| {
                    let rho = ep[i] * lay.p[i] + eq[i] * lay.q[i];
                    let rhs = (layers[s + 1].c[i] + layers[s + 1].gamma[i]) * next[i];
                    rhs / (rho * w[i])
                })
                .fold(f64::INFINITY, f64::min);
            let g = rng.gen_range(0.0..=1.0) * bound;
            for &i in atom {
                gamma[i] = g;
            }
        }
        layers[s].gamma = gamma;
    }
    SfmRep::new(filtration, layers).expect("generator respects the SFM constraints")
}

const GRID: f64 = 1.0 / 64.0;

fn ticks<R: Rng>(rng: &mut R, lo: u32, hi: u32) -> f64 {
    f64::from(rng.gen_range(lo..=hi)) * GRID
}

/// Random nonnegative increasing CBF (no permutation applied). The two
/// off-diagonal constants are ordered at random, so `α > β` occurs and the
/// result is usually not a GUM. Entries are multiples of 1/64.
pub fn increasing_cbf<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    fn fill<R: Rng>(m: &mut [f64], n: usize, lo: usize, hi: usize, floor: f64, rng: &mut R) {
        if hi - lo == 1 {
            m[lo * n + lo] = floor + ticks(rng, 16, 128);
            return;
        }
        let x = floor + ticks(rng, 0, 64);
        let y = floor + ticks(rng, 0, 192);
        let (alpha, beta) = if rng.gen_bool(0.5) { (x, y) } else { (y, x) };
        let mid = rng.gen_range(lo + 1..hi);
        for i in lo..mid {
            for j in mid..hi {
                m[i * n + j] = alpha;
                m[j * n + i] = beta;
            }
        }
        let floor = alpha.min(beta);
        fill(m, n, lo, mid, floor, rng);
        fill(m, n, mid, hi, floor, rng);
    }
    let mut m = vec![0.0; n * n];
    fill(&mut m, n, 0, n, 0.0, rng);
    Matrix::new(n, m).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{is_bipotential, is_inverse_m, is_potential};
    use crate::filtered::check_gum_condition;
    use crate::linalg::Tolerance;
    use crate::structure::is_increasing_cbf;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: f64 = trial_rng(7, 0).gen();
        let b: f64 = trial_rng(7, 1).gen();
        assert_ne!(a, b);
        assert_eq!(a, trial_rng(7, 0).gen::<f64>());
    }

    #[test]
    fn kernels_are_substochastic() {
        let mut rng = trial_rng(1, 0);
        for n in 1..7 {
            let p = substochastic(n, &mut rng);
            assert!(p.row_sums().iter().all(|&s| s <= 0.9 + 1e-12));
            let d = doubly_substochastic(n, &mut rng);
            assert!(d.row_sums().iter().chain(&d.col_sums()).all(|&s| s <= 0.9 + 1e-12));
            assert!(d.is_nonnegative(&Tolerance::default()));
        }
    }

    #[test]
    fn generated_classes() {
        let tol = Tolerance::default();
        let mut rng = trial_rng(3, 0);
        for n in 1..7 {
            assert!(is_potential(&potential(n, &mut rng), &tol).holds);
            assert!(is_bipotential(&bipotential(n, &mut rng), &tol).holds);
            assert!(is_inverse_m(&inverse_m(n, &mut rng), &tol).holds);
        }
    }

    #[test]
    fn sfm_generator_meets_condition() {
        let tol = Tolerance::default();
        let mut rng = trial_rng(5, 0);
        for n in 1..9 {
            let rep = sfm_gum(n, n % 2 == 0, &mut rng);
            assert!(check_gum_condition(&rep, &tol).holds);
            assert!(rep.is_nonnegative());
            if n % 2 == 0 {
                assert!(rep.filtration().is_dyadic());
            }
        }
    }

    #[test]
    fn increasing_cbf_shape() {
        let tol = Tolerance::default();
        let mut rng = trial_rng(9, 0);
        for n in 1..8 {
            assert!(is_increasing_cbf(&increasing_cbf(n, &mut rng), &tol));
        }
    }
}
