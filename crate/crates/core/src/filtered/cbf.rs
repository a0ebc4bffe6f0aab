//! Constant block form to SFM.

use std::collections::HashMap;

use crate::linalg::{Matrix, Tolerance};

use super::partition::{Filtration, Partition};
use super::rep::{SfmLayer, SfmRep};
use super::FilteredError;

/// Binary split tree of a CBF over the contiguous range `lo..hi`.
#[derive(Debug, Clone)]
enum Node {
    Leaf(usize),
    Split {
        lo: usize,
        mid: usize,
        hi: usize,
        /// Constant of the upper-right block.
        alpha: f64,
        /// Constant of the lower-left block.
        beta: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

fn constant_block(u: &Matrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>, tol: &Tolerance) -> Option<f64> {
    let v = u.get(rows.start, cols.start);
    rows.clone()
        .all(|i| cols.clone().all(|j| tol.eq(u.get(i, j), v)))
        .then_some(v)
}

/// Finds a CBF split tree for `u[lo..hi, lo..hi]`, trying split points in
/// increasing order and memoizing failures per range.
fn split_tree(
    u: &Matrix,
    lo: usize,
    hi: usize,
    tol: &Tolerance,
    memo: &mut HashMap<(usize, usize), Option<Node>>,
) -> Option<Node> {
    if hi - lo == 1 {
        return Some(Node::Leaf(lo));
    }
    if let Some(r) = memo.get(&(lo, hi)) {
        return r.clone();
    }
    let mut found = None;
    for mid in lo + 1..hi {
        let Some(alpha) = constant_block(u, lo..mid, mid..hi, tol) else {
            continue;
        };
        let Some(beta) = constant_block(u, mid..hi, lo..mid, tol) else {
            continue;
        };
        let Some(left) = split_tree(u, lo, mid, tol, memo) else {
            continue;
        };
        let Some(right) = split_tree(u, mid, hi, tol, memo) else {
            continue;
        };
        found = Some(Node::Split {
            lo,
            mid,
            hi,
            alpha,
            beta,
            left: Box::new(left),
            right: Box::new(right),
        });
        break;
    }
    memo.insert((lo, hi), found.clone());
    found
}

/// True when `U` itself (no permutation) is in constant block form.
pub fn is_cbf(u: &Matrix, tol: &Tolerance) -> bool {
    split_tree(u, 0, u.n(), tol, &mut HashMap::new()).is_some()
}

/// Decomposes a CBF matrix as an SFM over the dyadic filtration of its split
/// tree.
///
/// At a split with upper-right constant `α` and lower-left constant `β`,
/// the atom gets `C_s = min(α, β) − (ancestor offset)` and `Γ_s = |β − α|`.
/// When `α ≤ β`, `q_s` is the first block and `p_s` the second; otherwise
/// the roles swap so the excess lands on the upper-right block. Recursion
/// continues on `A − min(α, β)`, `B − min(α, β)`, which keeps every factor
/// nonnegative for nonnegative increasing CBFs. Singletons carry `Γ = 0`
/// and sit in `p`. A singleton's diagonal remainder
/// goes on the level where it first becomes an atom, so that the GUM
/// inequality `Γ_s ≤ C_{s+1} + Γ_{s+1}` sees it even on uneven trees.
pub fn cbf_to_sfm(u: &Matrix, tol: &Tolerance) -> Result<SfmRep, FilteredError> {
    let n = u.n();
    let tree = split_tree(u, 0, n, tol, &mut HashMap::new()).ok_or(FilteredError::NotCbf)?;
    let k = tree.depth();

    let mut layers: Vec<SfmLayer> = (0..=k)
        .map(|_| SfmLayer {
            c: vec![0.0; n],
            gamma: vec![0.0; n],
            p: vec![1.0; n],
            q: vec![0.0; n],
        })
        .collect();
    let mut labels: Vec<Vec<usize>> = vec![vec![0; n]; k + 1];

    // (node, level, accumulated C of ancestors)
    let mut stack = vec![(&tree, 0usize, 0.0f64)];
    while let Some((node, s, base)) = stack.pop() {
        match node {
            Node::Leaf(i) => {
                let i = *i;
                for lab in labels.iter_mut().skip(s) {
                    lab[i] = i;
                }
                layers[s].c[i] = u.get(i, i) - base;
            }
            Node::Split {
                lo,
                mid,
                hi,
                alpha,
                beta,
                left,
                right,
            } => {
                let floor = alpha.min(*beta);
                let lower_heavy = alpha <= beta;
                for i in *lo..*hi {
                    labels[s][i] = *lo;
                    layers[s].c[i] = floor - base;
                    layers[s].gamma[i] = (beta - alpha).abs();
                    let in_q = (i < *mid) == lower_heavy;
                    layers[s].q[i] = if in_q { 1.0 } else { 0.0 };
                    layers[s].p[i] = if in_q { 0.0 } else { 1.0 };
                }
                stack.push((left, s + 1, floor));
                stack.push((right, s + 1, floor));
            }
        }
    }

    let partitions = labels
        .iter()
        .map(|l| Partition::from_labels(l))
        .collect::<Result<Vec<_>, _>>()?;
    let filtration = Filtration::new(partitions)?;
    SfmRep::new(filtration, layers)
}
