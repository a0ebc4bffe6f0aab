//! GUM, NBF and increasing-CBF recognition, NBF permutations, random GUMs.
//!
//! Throughout, entries within `abs_eps` of each other count as the same level.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classes::{is_bipotential, Verdict, Witness};
use crate::hadamard::{apply, ScalarFn};
use crate::linalg::{Matrix, Tolerance};
use crate::tau::{tau_bisection, DEFAULT_T_MAX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("matrix is not a GUM")]
    NotGum,
    #[error("constructed permutation does not yield an NBF")]
    ConstructionFailed,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

fn dominance_violation(u: &Matrix, tol: &Tolerance) -> Option<Witness> {
    let n = u.n();
    for i in 0..n {
        for j in 0..n {
            let v = u.get(i, j);
            if i != j && !(tol.le(v, u.get(i, i)) && tol.le(v, u.get(j, j))) {
                return Some(Witness::Entry {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    None
}

/// `U_ii ≥ max(U_ij, U_ji)` for all `i, j`.
pub fn is_entrywise_diag_dominant(u: &Matrix, tol: &Tolerance) -> bool {
    dominance_violation(u, tol).is_none()
}

fn prefers(u: &Matrix, i: usize, j: usize, k: usize, tol: &Tolerance) -> bool {
    let g = |a: usize, b: usize| u.get(a, b);
    tol.eq(g(i, j), g(i, k))
        && tol.eq(g(j, i), g(k, i))
        && tol.le(g(j, i).min(g(i, j)), g(j, k).min(g(k, j)))
        && tol.le(g(j, i).max(g(i, j)), g(j, k).max(g(k, j)))
}

/// The preferred element of `{i, j, k}`, if there is one.
pub fn preferred_element(u: &Matrix, i: usize, j: usize, k: usize, tol: &Tolerance) -> Option<usize> {
    [(i, j, k), (j, i, k), (k, i, j)]
        .into_iter()
        .find(|&(a, b, c)| prefers(u, a, b, c, tol))
        .map(|(a, _, _)| a)
}

/// Direct O(n³) GUM test. The witness is the first negative entry, the first
/// entry beating a diagonal, or the first triple with no preferred element.
pub fn is_gum(u: &Matrix, tol: &Tolerance) -> Verdict {
    if let Some((row, col, value)) = u.first_negative(tol) {
        return Verdict::no(Witness::Entry { row, col, value });
    }
    if let Some(w) = dominance_violation(u, tol) {
        return Verdict::no(w);
    }
    let n = u.n();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if preferred_element(u, i, j, k, tol).is_none() {
                    return Verdict::no(Witness::Triple { i, j, k });
                }
            }
        }
    }
    Verdict::yes()
}

pub fn is_symmetric(u: &Matrix, tol: &Tolerance) -> bool {
    let n = u.n();
    (0..n).all(|i| (i + 1..n).all(|j| tol.eq(u.get(i, j), u.get(j, i))))
}

/// Symmetric GUM.
pub fn is_ultrametric(u: &Matrix, tol: &Tolerance) -> bool {
    is_symmetric(u, tol) && is_gum(u, tol).holds
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Nbf,
    IncreasingCbf,
}

fn constant_on(u: &Matrix, rows: &[usize], cols: &[usize], tol: &Tolerance) -> Option<f64> {
    let v = u.get(rows[0], cols[0]);
    rows.iter()
        .all(|&i| cols.iter().all(|&j| tol.eq(u.get(i, j), v)))
        .then_some(v)
}

/// Conditions linking the constants `α` (upper right) and `β` (lower left)
/// of a split to the diagonal blocks `a` and `b`.
fn split_ok(kind: Kind, u: &Matrix, a: &[usize], b: &[usize], alpha: f64, beta: f64, tol: &Tolerance) -> bool {
    match kind {
        Kind::Nbf => {
            if !(tol.nonneg(alpha) && tol.le(alpha, beta)) {
                return false;
            }
            [a, b].iter().all(|blk| {
                blk.iter().all(|&i| {
                    blk.iter().all(|&j| {
                        let (x, y) = (u.get(i, j), u.get(j, i));
                        tol.le(alpha, x.min(y)) && tol.le(beta, x.max(y))
                    })
                })
            })
        }
        Kind::IncreasingCbf => {
            let m = alpha.min(beta);
            [a, b]
                .iter()
                .all(|blk| blk.iter().all(|&i| blk.iter().all(|&j| tol.le(m, u.get(i, j)))))
        }
    }
}

fn leaf_ok(kind: Kind, u: &Matrix, i: usize, tol: &Tolerance) -> bool {
    match kind {
        Kind::Nbf => tol.nonneg(u.get(i, i)),
        Kind::IncreasingCbf => true,
    }
}

/// Checks the block shape of `u[order[lo..hi]]` without reordering.
fn fixed_order_ok(
    kind: Kind,
    u: &Matrix,
    order: &[usize],
    lo: usize,
    hi: usize,
    tol: &Tolerance,
    memo: &mut HashMap<(usize, usize), bool>,
) -> bool {
    if hi - lo == 1 {
        return leaf_ok(kind, u, order[lo], tol);
    }
    if let Some(&r) = memo.get(&(lo, hi)) {
        return r;
    }
    let mut ok = false;
    for mid in lo + 1..hi {
        let (a, b) = (&order[lo..mid], &order[mid..hi]);
        let (Some(alpha), Some(beta)) = (constant_on(u, a, b, tol), constant_on(u, b, a, tol)) else {
            continue;
        };
        if split_ok(kind, u, a, b, alpha, beta, tol)
            && fixed_order_ok(kind, u, order, lo, mid, tol, memo)
            && fixed_order_ok(kind, u, order, mid, hi, tol, memo)
        {
            ok = true;
            break;
        }
    }
    memo.insert((lo, hi), ok);
    ok
}

fn check_order(kind: Kind, u: &Matrix, order: &[usize], tol: &Tolerance) -> bool {
    !order.is_empty() && fixed_order_ok(kind, u, order, 0, order.len(), tol, &mut HashMap::new())
}

/// `U` itself (no permutation) is a nested block form.
pub fn is_nbf(u: &Matrix, tol: &Tolerance) -> bool {
    check_order(Kind::Nbf, u, &(0..u.n()).collect::<Vec<_>>(), tol)
}

/// `U` itself is a CBF with `min{A, B} ≥ min{α, β}` at every level.
pub fn is_increasing_cbf(u: &Matrix, tol: &Tolerance) -> bool {
    check_order(Kind::IncreasingCbf, u, &(0..u.n()).collect::<Vec<_>>(), tol)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut x = x;
    while parent[x] != r {
        let next = parent[x];
        parent[x] = r;
        x = next;
    }
    r
}

/// Groups `idx` by the closure of `min(U_ij, U_ji) > m`; any valid split
/// keeps each group on one side.
fn components(u: &Matrix, idx: &[usize], m: f64, tol: &Tolerance) -> Vec<Vec<usize>> {
    let len = idx.len();
    let mut parent: Vec<usize> = (0..len).collect();
    for a in 0..len {
        for b in a + 1..len {
            let (i, j) = (idx[a], idx[b]);
            if u.get(i, j).min(u.get(j, i)) > m + tol.abs_eps {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for a in 0..len {
        let r = find(&mut parent, a);
        let g = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(idx[a]);
    }
    groups
}

/// Largest component count for which every bipartition is tried.
const EXHAUSTIVE_COMPONENTS: usize = 12;

struct Arranger<'a> {
    kind: Kind,
    u: &'a Matrix,
    tol: &'a Tolerance,
    memo: HashMap<Vec<usize>, Option<Vec<usize>>>,
}

impl Arranger<'_> {
    /// Candidate first blocks (as component masks) for splits where the block
    /// read through `entry` from first to second block is constant `m`.
    fn candidates(&self, groups: &[Vec<usize>], m: f64, flip: bool) -> Vec<Vec<bool>> {
        let g = groups.len();
        let entry = |i: usize, j: usize| if flip { self.u.get(j, i) } else { self.u.get(i, j) };
        let is_m = |p: usize, q: usize| {
            groups[p]
                .iter()
                .all(|&i| groups[q].iter().all(|&j| self.tol.eq(entry(i, j), m)))
        };
        let mut out: Vec<Vec<bool>> = Vec::new();
        let push = |mask: Vec<bool>, out: &mut Vec<Vec<bool>>| {
            let k = mask.iter().filter(|&&x| x).count();
            if k > 0 && k < g && !out.contains(&mask) {
                out.push(mask);
            }
        };
        for start in 0..g {
            // grow the first block: it must reach every outside group through m
            let mut a = vec![false; g];
            a[start] = true;
            loop {
                let add: Vec<usize> = (0..g)
                    .filter(|&p| !a[p] && (0..g).any(|q| a[q] && !is_m(q, p)))
                    .collect();
                if add.is_empty() {
                    break;
                }
                for p in add {
                    a[p] = true;
                }
            }
            push(a, &mut out);

            // grow the second block the same way from the other side
            let mut b = vec![false; g];
            b[start] = true;
            loop {
                let add: Vec<usize> = (0..g)
                    .filter(|&p| !b[p] && (0..g).any(|q| b[q] && !is_m(p, q)))
                    .collect();
                if add.is_empty() {
                    break;
                }
                for p in add {
                    b[p] = true;
                }
            }
            push(b.iter().map(|x| !x).collect(), &mut out);
        }
        if g <= EXHAUSTIVE_COMPONENTS {
            for bits in 1u32..(1 << g) - 1 {
                push((0..g).map(|p| bits >> p & 1 == 1).collect(), &mut out);
            }
        }
        out
    }

    fn arrange(&mut self, idx: &[usize]) -> Option<Vec<usize>> {
        if idx.len() == 1 {
            return leaf_ok(self.kind, self.u, idx[0], self.tol).then(|| idx.to_vec());
        }
        if let Some(r) = self.memo.get(idx) {
            return r.clone();
        }
        let m = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.u.get(i, j))
            .fold(f64::INFINITY, f64::min);
        let groups = components(self.u, idx, m, self.tol);
        let flips: &[bool] = match self.kind {
            Kind::Nbf => &[false],
            Kind::IncreasingCbf => &[false, true],
        };
        let mut found = None;
        'outer: for &flip in flips {
            for mask in self.candidates(&groups, m, flip) {
                let mut a: Vec<usize> = Vec::new();
                let mut b: Vec<usize> = Vec::new();
                for (p, grp) in groups.iter().enumerate() {
                    if mask[p] { a.extend(grp) } else { b.extend(grp) }
                }
                a.sort_unstable();
                b.sort_unstable();
                let (Some(alpha), Some(beta)) = (
                    constant_on(self.u, &a, &b, self.tol),
                    constant_on(self.u, &b, &a, self.tol),
                ) else {
                    continue;
                };
                if !split_ok(self.kind, self.u, &a, &b, alpha, beta, self.tol) {
                    continue;
                }
                let Some(ra) = self.arrange(&a) else { continue };
                let Some(rb) = self.arrange(&b) else { continue };
                found = Some([ra, rb].concat());
                break 'outer;
            }
        }
        self.memo.insert(idx.to_vec(), found.clone());
        found
    }
}

fn arrange(kind: Kind, u: &Matrix, tol: &Tolerance) -> Option<Vec<usize>> {
    let idx: Vec<usize> = (0..u.n()).collect();
    let mut arr = Arranger {
        kind,
        u,
        tol,
        memo: HashMap::new(),
    };
    arr.arrange(&idx)
}

/// A permutation `perm` with `is_nbf(U.permute(perm))`; position `k` of the
/// arranged matrix holds original index `perm[k]`.
pub fn gum_to_nbf_permutation(u: &Matrix, tol: &Tolerance) -> Result<Vec<usize>, StructureError> {
    if !is_gum(u, tol).holds {
        return Err(StructureError::NotGum);
    }
    let perm = arrange(Kind::Nbf, u, tol).ok_or(StructureError::ConstructionFailed)?;
    if is_nbf(&u.permute(&perm), tol) {
        Ok(perm)
    } else {
        Err(StructureError::ConstructionFailed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CbfSearch {
    Found(Vec<usize>),
    NotFound,
    /// Heuristic failed and `n` is too large for exhaustive search.
    Undecided,
}

/// Largest `n` for which all permutations are tried.
pub const EXHAUSTIVE_MAX_N: usize = 8;

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

pub fn is_increasing_cbf_permutation(u: &Matrix, tol: &Tolerance) -> CbfSearch {
    if let Some(perm) = arrange(Kind::IncreasingCbf, u, tol) {
        if is_increasing_cbf(&u.permute(&perm), tol) {
            return CbfSearch::Found(perm);
        }
    }
    let n = u.n();
    if n > EXHAUSTIVE_MAX_N {
        return CbfSearch::Undecided;
    }
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        if check_order(Kind::IncreasingCbf, u, &p, tol) {
            return CbfSearch::Found(p);
        }
        if !next_permutation(&mut p) {
            return CbfSearch::NotFound;
        }
    }
}

/// A GUM is nonsingular iff it has no zero row and no two equal rows.
pub fn gum_nonsingular(u: &Matrix, tol: &Tolerance) -> Result<bool, StructureError> {
    if !is_gum(u, tol).holds {
        return Err(StructureError::NotGum);
    }
    let n = u.n();
    let zero_row = (0..n).any(|i| u.row(i).iter().all(|&x| tol.eq(x, 0.0)));
    let same = |i: usize, j: usize| u.row(i).iter().zip(u.row(j)).all(|(&x, &y)| tol.eq(x, y));
    let duplicate = (0..n).any(|i| (i + 1..n).any(|j| same(i, j)));
    Ok(!zero_row && !duplicate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub is_entrywise_diag_dominant: bool,
    pub is_gum: bool,
    pub gum_witness: Option<Witness>,
    pub is_ultrametric: bool,
    pub is_nbf: bool,
    pub nbf_permutation: Option<Vec<usize>>,
    /// Only decided for GUMs.
    pub gum_nonsingular: Option<bool>,
}

pub fn structure_report(u: &Matrix, tol: &Tolerance) -> StructureReport {
    let gum = is_gum(u, tol);
    StructureReport {
        is_entrywise_diag_dominant: is_entrywise_diag_dominant(u, tol),
        is_ultrametric: gum.holds && is_symmetric(u, tol),
        is_nbf: is_nbf(u, tol),
        nbf_permutation: gum_to_nbf_permutation(u, tol).ok(),
        gum_nonsingular: gum_nonsingular(u, tol).ok(),
        is_gum: gum.holds,
        gum_witness: gum.witness,
    }
}

/// A random GUM together with the NBF it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct GumInstance {
    pub matrix: Matrix,
    pub nbf: Matrix,
    /// `matrix.permute(&perm) == nbf`.
    pub perm: Vec<usize>,
}

/// Values are multiples of this, so sums and differences are exact.
const GRID: f64 = 1.0 / 64.0;

struct NbfBuilder<'a> {
    rng: &'a mut ChaCha8Rng,
    m: Vec<f64>,
    n: usize,
    degenerate: bool,
}

impl NbfBuilder<'_> {
    fn ticks(&mut self, lo: u32, hi: u32) -> f64 {
        f64::from(self.rng.gen_range(lo..=hi)) * GRID
    }

    /// Fills `lo..hi` given the constants `(α, β)` of the enclosing split.
    fn fill(&mut self, lo: usize, hi: usize, alpha_p: f64, beta_p: f64) {
        if hi - lo == 1 {
            // strictly positive remainder above the enclosing β
            self.m[lo * self.n + lo] = beta_p + self.ticks(32, 128);
            return;
        }
        let (alpha, beta, twin) = if self.degenerate && hi - lo == 2 {
            self.degenerate = false;
            let v = alpha_p.max(beta_p);
            (v, v, true)
        } else {
            let alpha = alpha_p + self.ticks(0, 24);
            let beta = alpha.max(beta_p) + self.ticks(0, 32);
            (alpha, beta, false)
        };
        let mid = self.rng.gen_range(lo + 1..hi);
        for i in lo..mid {
            for j in mid..hi {
                self.m[i * self.n + j] = alpha;
                self.m[j * self.n + i] = beta;
            }
        }
        if twin {
            // equal diagonals make the two rows identical
            self.m[lo * self.n + lo] = beta;
            self.m[(lo + 1) * self.n + lo + 1] = beta;
        } else {
            self.fill(lo, mid, alpha, beta);
            self.fill(mid, hi, alpha, beta);
        }
    }
}

/// Random GUM of size `n`: an NBF over a random binary split tree, with
/// nondecreasing block constants and a positive diagonal remainder at each
/// leaf, conjugated by a random permutation. With `degenerate`, one sibling
/// pair gets identical rows so the result is singular (for `n ≥ 2`).
pub fn generate_gum_instance(n: usize, seed: u64, degenerate: bool) -> GumInstance {
    assert!(n >= 1, "n must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = f64::from(rng.gen_range(0..=32u32)) * GRID;
    let mut b = NbfBuilder {
        rng: &mut rng,
        m: vec![0.0; n * n],
        n,
        degenerate,
    };
    if n == 1 {
        b.fill(0, 1, 0.0, 0.0);
    } else {
        b.fill(0, n, root, root);
    }
    let nbf = Matrix::new(n, b.m).expect("finite entries");
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut inv = vec![0; n];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    let matrix = Matrix::from_fn(n, |i, j| nbf.get(inv[i], inv[j]));
    GumInstance { matrix, nbf, perm }
}

pub fn generate_gum(n: usize, seed: u64) -> Matrix {
    generate_gum_instance(n, seed, false).matrix
}

/// A pair `(f, t)` with `I + t·f(U) ∉ bi𝒫`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContraWitness {
    pub f: ScalarFn,
    pub t: f64,
    /// Index set on which the failure was first found.
    pub subset: Vec<usize>,
    /// Why `I + t·f(U)` fails, on the full matrix.
    pub certificate: Option<Witness>,
}

/// Distinct entry levels of `m`, as `(min, max)` of each tie cluster.
fn levels(m: &Matrix, tol: &Tolerance) -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = m.as_slice().to_vec();
    xs.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for x in xs {
        match out.last_mut() {
            Some(last) if x - last.1 <= tol.abs_eps => last.1 = x,
            _ => out.push((x, x)),
        }
    }
    out
}

/// Nondecreasing maps of `len` ordered levels into `{0, ¼, ½, ¾, 1}` with
/// the lowest level sent to 0.
fn level_maps(len: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; len];
    fn rec(pos: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if pos == cur.len() {
            if cur.last().is_some_and(|&x| x > 0) {
                out.push(cur.iter().map(|&x| x as f64 * 0.25).collect());
            }
            return;
        }
        for v in cur[pos - 1]..=4 {
            cur[pos] = v;
            rec(pos + 1, cur, out);
        }
    }
    if len >= 2 {
        rec(1, &mut cur, &mut out);
    }
    out
}

/// Step functions separating the levels of `sub`.
fn candidate_functions(sub: &Matrix, tol: &Tolerance) -> Vec<ScalarFn> {
    let lv = levels(sub, tol);
    let cuts: Vec<f64> = lv.windows(2).map(|w| 0.5 * (w[0].1 + w[1].0)).collect();
    let mut fs = vec![ScalarFn::Identity];
    for scale in [1.0, 10.0, 100.0, 1000.0] {
        for a in 0..cuts.len() {
            fs.push(ScalarFn::Step(cuts[a..].iter().map(|&c| (c, scale)).collect()));
        }
    }
    for scale in [10.0, 100.0, 1000.0, 1e4] {
        for g in level_maps(lv.len()) {
            let jumps: Vec<(f64, f64)> = cuts
                .iter()
                .zip(g.windows(2))
                .filter(|(_, w)| w[1] > w[0])
                .map(|(&c, w)| (c, scale * (w[1] - w[0])))
                .collect();
            fs.push(ScalarFn::Step(jumps));
        }
    }
    fs
}

/// Looks for an increasing `f` and `t ≥ 0` with `I + t·f(U) ∉ bi𝒫`.
///
/// Principal submatrices of bi𝒫 matrices are bi𝒫, so the search runs on the
/// pairs and triples that break the GUM conditions and then confirms each
/// hit on the full matrix. For each candidate `f` the grid is tried first,
/// then the bisection threshold of the submatrix.
pub fn contrapositive_search(
    u: &Matrix,
    t_grid: &[f64],
    tol: &Tolerance,
) -> Result<Option<ContraWitness>, StructureError> {
    if !u.is_nonnegative(tol) {
        return Err(StructureError::PreconditionFailed("U has a negative entry".into()));
    }
    if is_gum(u, tol).holds {
        return Err(StructureError::PreconditionFailed("U is a GUM".into()));
    }
    let n = u.n();
    let u = u.map(|x| x.max(0.0));
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (u.get(i, j), u.get(j, i));
            let (di, dj) = (u.get(i, i), u.get(j, j));
            if !(tol.le(a.max(b), di) && tol.le(a.max(b), dj)) {
                subsets.push(vec![i, j]);
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if preferred_element(&u, i, j, k, tol).is_none() {
                    subsets.push(vec![i, j, k]);
                }
            }
        }
    }

    let confirm = |f: &ScalarFn, t: f64, subset: &[usize]| -> Option<ContraWitness> {
        let fu = apply(f, &u).ok()?;
        let v = is_bipotential(&fu.identity_plus(t), tol);
        (!v.holds).then(|| ContraWitness {
            f: f.clone(),
            t,
            subset: subset.to_vec(),
            certificate: v.witness,
        })
    };

    for s in &subsets {
        let sub = u.select(s);
        for f in candidate_functions(&sub, tol) {
            let Ok(fs) = apply(&f, &sub) else { continue };
            for &t in t_grid {
                if !is_bipotential(&fs.identity_plus(t), tol).holds {
                    if let Some(w) = confirm(&f, t, s) {
                        return Ok(Some(w));
                    }
                }
            }
            if let Some(t) = tau_bisection(&fs, DEFAULT_T_MAX, tol).witness_t {
                if let Some(w) = confirm(&f, t, s) {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn m<const N: usize>(rows: [[f64; N]; N]) -> Matrix {
        Matrix::from_rows(&rows).unwrap()
    }

    fn ejemplo(a: f64, b: f64, c: f64, d: f64) -> Matrix {
        m([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [a, b, 1.0, 0.0],
            [c, d, 0.0, 1.0],
        ])
    }

    #[test]
    fn small_dominant_matrices_are_gum() {
        assert!(is_gum(&m([[3.0, 1.0], [2.0, 2.0]]), &tol()).holds);
        assert!(is_gum(&m([[0.0]]), &tol()).holds);
        assert!(!is_gum(&m([[1.0, 2.0], [0.0, 3.0]]), &tol()).holds);
    }

    #[test]
    fn ultrametric_example() {
        let u = m([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]);
        assert!(is_gum(&u, &tol()).holds);
        assert!(is_ultrametric(&u, &tol()));
    }

    #[test]
    fn ejemplo_is_not_gum() {
        let u = ejemplo(1.0, 1.0, 1.0, 1.0);
        let v = is_gum(&u, &tol());
        assert!(!v.holds);
        assert!(matches!(v.witness, Some(Witness::Triple { .. })));
        assert_eq!(preferred_element(&u, 0, 2, 3, &tol()), None);
        assert!(!is_nbf(&u, &tol()));
        assert_eq!(gum_to_nbf_permutation(&u, &tol()), Err(StructureError::NotGum));
    }

    #[test]
    fn negative_entry_witness() {
        let v = is_gum(&m([[1.0, -0.5], [0.0, 1.0]]), &tol());
        assert_eq!(
            v.witness,
            Some(Witness::Entry {
                row: 0,
                col: 1,
                value: -0.5
            })
        );
    }

    #[test]
    fn four_by_four_nbf() {
        let (a, b, c, d) = (9.0, 8.0, 7.0, 6.0);
        let u = m([
            [a, 3.0, 1.0, 1.0],
            [5.0, b, 1.0, 1.0],
            [2.0, 2.0, c, 2.5],
            [2.0, 2.0, 4.0, d],
        ]);
        assert!(is_nbf(&u, &tol()));
        assert!(is_gum(&u, &tol()).holds);
        // α₂ below α₁ breaks the nesting
        let bad = m([
            [a, 0.5, 1.0, 1.0],
            [5.0, b, 1.0, 1.0],
            [2.0, 2.0, c, 2.5],
            [2.0, 2.0, 4.0, d],
        ]);
        assert!(!is_nbf(&bad, &tol()));
    }

    #[test]
    fn swap_gives_nbf() {
        // [[d,α,α],[β,a,α],[β,c₂,e]] with c₂ > β needs 1 and 2 swapped
        let (d, a, e, alpha, beta, c2) = (5.0, 4.0, 4.0, 1.0, 2.0, 3.0);
        let u = m([[d, alpha, alpha], [beta, a, alpha], [beta, c2, e]]);
        assert!(is_gum(&u, &tol()).holds);
        let perm = gum_to_nbf_permutation(&u, &tol()).unwrap();
        assert!(is_nbf(&u.permute(&perm), &tol()));
    }

    #[test]
    fn identity_permutation_for_nbf_input() {
        let u = m([[3.0, 1.0], [2.0, 3.0]]);
        let perm = gum_to_nbf_permutation(&u, &tol()).unwrap();
        assert!(is_nbf(&u.permute(&perm), &tol()));
    }

    #[test]
    fn increasing_cbf_counterexample() {
        let u = m([[2.0, 2.0, 2.0], [2.0, 2.0, 1.0], [2.0, 1.0, 2.0]]);
        assert_eq!(is_increasing_cbf_permutation(&u, &tol()), CbfSearch::NotFound);
        assert!(matches!(
            is_increasing_cbf_permutation(&m([[4.0]]), &tol()),
            CbfSearch::Found(_)
        ));
    }

    #[test]
    fn increasing_cbf_allows_alpha_above_beta() {
        // α = 3 > β = 1, diagonal blocks above 1
        let u = m([[2.0, 3.0], [1.0, 5.0]]);
        assert!(is_increasing_cbf(&u, &tol()));
        assert!(!is_nbf(&u, &tol()));
    }

    #[test]
    fn nonsingularity_criterion() {
        assert_eq!(gum_nonsingular(&Matrix::identity(3), &tol()), Ok(true));
        let dup = m([[2.0, 2.0, 1.0], [2.0, 2.0, 1.0], [1.0, 1.0, 3.0]]);
        assert_eq!(gum_nonsingular(&dup, &tol()), Ok(false));
        let zero = m([[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(gum_nonsingular(&zero, &tol()), Ok(false));
    }

    #[test]
    fn generator_is_deterministic_and_gum() {
        let a = generate_gum_instance(6, 42, false);
        let b = generate_gum_instance(6, 42, false);
        assert_eq!(a, b);
        assert!(is_gum(&a.matrix, &tol()).holds);
        assert!(is_nbf(&a.nbf, &tol()));
        assert_eq!(a.matrix.permute(&a.perm), a.nbf);
        assert_eq!(gum_nonsingular(&a.matrix, &tol()), Ok(true));
        let one = generate_gum(1, 3);
        assert!(one.get(0, 0) >= 0.0);
    }

    #[test]
    fn degenerate_generator_is_singular() {
        for seed in 0..20 {
            let g = generate_gum_instance(5, seed, true);
            assert!(is_gum(&g.matrix, &tol()).holds);
            assert_eq!(gum_nonsingular(&g.matrix, &tol()), Ok(false), "seed {seed}");
        }
    }

    #[test]
    fn next_permutation_counts() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn contrapositive_on_non_dominant_pair() {
        let u = m([[1.0, 0.0], [2.0, 1.0]]);
        let w = contrapositive_search(&u, &[1.0, 10.0, 100.0], &tol())
            .unwrap()
            .expect("witness");
        assert_eq!(w.f, ScalarFn::Identity);
        assert!(w.t > 1.0);
    }

    #[test]
    fn contrapositive_on_three_by_three() {
        let u = m([[4.0, 2.0, 1.0], [2.0, 2.0, 1.0], [4.0, 2.0, 4.0]]);
        assert!(!is_gum(&u, &tol()).holds);
        let w = contrapositive_search(&u, &[1.0, 10.0, 100.0, 1000.0], &tol()).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn contrapositive_rejects_gum() {
        let u = Matrix::identity(3);
        assert!(matches!(
            contrapositive_search(&u, &[1.0], &tol()),
            Err(StructureError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn level_clustering() {
        let u = m([[1.0, 1.0 + 1e-12], [2.0, 3.0]]);
        assert_eq!(levels(&u, &tol()).len(), 3);
        assert_eq!(level_maps(2).len(), 4);
    }
}
