//! Set partitions of `{0..n}` and refinement chains.

use crate::linalg::{Matrix, Vector};

use super::FilteredError;

/// A partition of `{0, …, n-1}` into nonempty atoms.
///
/// Stored canonically: each atom sorted ascending, atoms ordered by their
/// smallest element. Two partitions are equal iff they have the same atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    atoms: Vec<Vec<usize>>,
    label: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, atoms: Vec<Vec<usize>>) -> Result<Self, FilteredError> {
        if n == 0 {
            return Err(FilteredError::InvalidPartition("n must be positive".into()));
        }
        let mut label = vec![usize::MAX; n];
        for (k, atom) in atoms.iter().enumerate() {
            if atom.is_empty() {
                return Err(FilteredError::InvalidPartition(format!("atom {k} is empty")));
            }
            for &i in atom {
                if i >= n {
                    return Err(FilteredError::InvalidPartition(format!(
                        "index {i} out of range for n = {n}"
                    )));
                }
                if label[i] != usize::MAX {
                    return Err(FilteredError::InvalidPartition(format!(
                        "index {i} appears in two atoms"
                    )));
                }
                label[i] = k;
            }
        }
        if let Some(i) = label.iter().position(|&l| l == usize::MAX) {
            return Err(FilteredError::InvalidPartition(format!(
                "index {i} is not covered"
            )));
        }
        Ok(Self::canonical(n, atoms))
    }

    /// Builds from a label per index; equal labels share an atom.
    pub fn from_labels(labels: &[usize]) -> Result<Self, FilteredError> {
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (i, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(i);
        }
        Self::new(labels.len(), groups.into_values().collect())
    }

    fn canonical(n: usize, mut atoms: Vec<Vec<usize>>) -> Self {
        for a in atoms.iter_mut() {
            a.sort_unstable();
        }
        atoms.sort_unstable_by_key(|a| a[0]);
        let mut label = vec![0; n];
        for (k, a) in atoms.iter().enumerate() {
            for &i in a {
                label[i] = k;
            }
        }
        Self { n, atoms, label }
    }

    /// `𝒩 = {{0..n}}`.
    pub fn trivial(n: usize) -> Self {
        Self::canonical(n, vec![(0..n).collect()])
    }

    /// `ℱ`, all singletons.
    pub fn discrete(n: usize) -> Self {
        Self::canonical(n, (0..n).map(|i| vec![i]).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Vec<usize>] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_of(&self, i: usize) -> usize {
        self.label[i]
    }

    pub fn same_atom(&self, i: usize, j: usize) -> bool {
        self.label[i] == self.label[j]
    }

    pub fn is_trivial(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn is_discrete(&self) -> bool {
        self.atoms.len() == self.n
    }

    /// True when every atom of `self` sits inside an atom of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.n == coarser.n
            && self
                .atoms
                .iter()
                .all(|a| a.iter().all(|&i| coarser.label[i] == coarser.label[a[0]]))
    }

    /// `w = F(ℛ)𝟏`, the size of the atom containing each index.
    pub fn sizes(&self) -> Vector {
        (0..self.n)
            .map(|i| self.atoms[self.label[i]].len() as f64)
            .collect()
    }

    /// `F(ℛ)_{ij} = 1` iff `i ∼ j`.
    pub fn incidence_matrix(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| if self.same_atom(i, j) { 1.0 } else { 0.0 })
    }

    /// `𝔼_ℛ = D_w⁻¹ F(ℛ)`.
    pub fn conditional_expectation(&self) -> Matrix {
        let w = self.sizes();
        Matrix::from_fn(self.n, |i, j| {
            if self.same_atom(i, j) {
                1.0 / w[i]
            } else {
                0.0
            }
        })
    }

    /// `𝔼_ℛ v` without forming the matrix.
    pub fn expect(&self, v: &[f64]) -> Vector {
        let mut means = vec![0.0; self.atoms.len()];
        for (k, a) in self.atoms.iter().enumerate() {
            means[k] = a.iter().map(|&i| v[i]).sum::<f64>() / a.len() as f64;
        }
        (0..self.n).map(|i| means[self.label[i]]).collect()
    }

    /// Per-atom sums `F(ℛ) v`.
    pub fn atom_sums(&self, v: &[f64]) -> Vector {
        let mut sums = vec![0.0; self.atoms.len()];
        for (i, &x) in v.iter().enumerate() {
            sums[self.label[i]] += x;
        }
        (0..self.n).map(|i| sums[self.label[i]]).collect()
    }

    /// Constant on each atom, up to `eps`.
    pub fn is_measurable(&self, v: &[f64], eps: f64) -> bool {
        v.len() == self.n
            && self
                .atoms
                .iter()
                .all(|a| a.iter().all(|&i| (v[i] - v[a[0]]).abs() <= eps))
    }
}

/// Chain `ℛ_0 ≼ ℛ_1 ≼ … ≼ ℛ_k` where each partition refines the previous one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    partitions: Vec<Partition>,
}

impl Filtration {
    pub fn new(partitions: Vec<Partition>) -> Result<Self, FilteredError> {
        let Some(first) = partitions.first() else {
            return Err(FilteredError::InvalidFiltration("no partitions".into()));
        };
        let n = first.n;
        for (s, w) in partitions.windows(2).enumerate() {
            if w[1].n != n || !w[1].refines(&w[0]) {
                return Err(FilteredError::NotRefinement { level: s + 1 });
            }
        }
        Ok(Self { partitions })
    }

    /// Filtration obtained by successively splitting atoms of `𝒩` down to `ℱ`.
    pub fn is_normalized(&self) -> bool {
        self.partitions[0].is_trivial() && self.last().is_discrete()
    }

    pub fn n(&self) -> usize {
        self.partitions[0].n
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn get(&self, s: usize) -> &Partition {
        &self.partitions[s]
    }

    pub fn last(&self) -> &Partition {
        self.partitions.last().expect("nonempty")
    }

    /// Consecutive partitions differ.
    pub fn is_strict(&self) -> bool {
        self.partitions.windows(2).all(|w| w[0] != w[1])
    }

    /// Every nontrivial atom of `ℛ_s` splits into exactly two atoms of `ℛ_{s+1}`.
    pub fn is_dyadic(&self) -> bool {
        self.partitions.windows(2).all(|w| {
            w[0].atoms.iter().all(|a| {
                let mut children: Vec<usize> = a.iter().map(|&i| w[1].label[i]).collect();
                children.sort_unstable();
                children.dedup();
                if a.len() == 1 {
                    children.len() == 1
                } else {
                    children.len() == 2
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p12_3() -> Partition {
        Partition::new(3, vec![vec![1, 0], vec![2]]).unwrap()
    }

    #[test]
    fn incidence_examples() {
        assert_eq!(Partition::discrete(3).incidence_matrix(), Matrix::identity(3));
        assert_eq!(Partition::trivial(3).incidence_matrix(), Matrix::ones(3));
        assert_eq!(
            p12_3().incidence_matrix(),
            Matrix::from_rows(&[[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap()
        );
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(
            Partition::discrete(3).conditional_expectation(),
            Matrix::identity(3)
        );
        assert_eq!(
            Partition::trivial(4).conditional_expectation(),
            Matrix::ones(4).scale(0.25)
        );
        assert_eq!(
            p12_3().conditional_expectation(),
            Matrix::from_rows(&[[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 1.0]]).unwrap()
        );
        assert_eq!(p12_3().expect(&[1.0, 3.0, 5.0]), vec![2.0, 2.0, 5.0]);
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(2, vec![vec![0], vec![], vec![1]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 2], vec![1]]).is_err());
    }

    #[test]
    fn refinement_and_dyadic() {
        let f = Filtration::new(vec![
            Partition::trivial(3),
            p12_3(),
            Partition::discrete(3),
        ])
        .unwrap();
        assert!(f.is_strict() && f.is_dyadic() && f.is_normalized());

        let g = Filtration::new(vec![Partition::trivial(3), Partition::discrete(3)]).unwrap();
        assert!(g.is_strict() && !g.is_dyadic());

        let bad = Filtration::new(vec![p12_3(), Partition::trivial(3)]);
        assert_eq!(bad, Err(FilteredError::NotRefinement { level: 1 }));

        let wide = Filtration::new(vec![Partition::trivial(2), Partition::trivial(2)]).unwrap();
        assert!(!wide.is_strict());
    }

    #[test]
    fn labels_round_trip() {
        let p = Partition::from_labels(&[7, 7, 3]).unwrap();
        assert_eq!(p, p12_3());
        assert_eq!(p.sizes(), vec![2.0, 2.0, 1.0]);
        assert!(p.is_measurable(&[4.0, 4.0, 1.0], 0.0));
        assert!(!p.is_measurable(&[4.0, 4.5, 1.0], 0.1));
    }
}
