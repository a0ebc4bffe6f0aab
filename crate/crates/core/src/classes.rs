//! Membership tests for Z-, M-, inverse M-matrices, potentials and bi-potentials.
//!
//! Every test returns a [`Verdict`] carrying the first violation found in
//! row-major order. Singular input is a class failure, never an error.

use std::collections::BTreeMap;

use crate::linalg::{Lu, Matrix, Tolerance, Vector};

/// Which side an equilibrium potential lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `U μ = 1`
    Right,
    /// `ν' U = 1'`
    Left,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Offending entry of the matrix under test.
    Entry { row: usize, col: usize, value: f64 },
    /// Offending entry of the inverse.
    InverseEntry { row: usize, col: usize, value: f64 },
    Singular,
    /// Negative entry of an equilibrium potential.
    Potential { side: Side, index: usize, value: f64 },
    /// Index triple with no preferred element.
    Triple { i: usize, j: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Right equilibrium potential, when it was computed.
    pub mu: Option<Vector>,
    /// Left equilibrium potential, when it was computed.
    pub nu: Option<Vector>,
}

impl Verdict {
    pub fn yes() -> Self {
        Self {
            holds: true,
            witness: None,
            mu: None,
            nu: None,
        }
    }

    pub fn no(w: Witness) -> Self {
        Self {
            holds: false,
            witness: Some(w),
            mu: None,
            nu: None,
        }
    }

    fn with_potentials(mut self, mu: Option<Vector>, nu: Option<Vector>) -> Self {
        self.mu = mu;
        self.nu = nu;
        self
    }
}

impl From<Option<Witness>> for Verdict {
    fn from(w: Option<Witness>) -> Self {
        w.map_or_else(Verdict::yes, Verdict::no)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SelectionError {
    #[error("principal submatrix needs at least one index")]
    EmptySelection,
    #[error("index {index} out of range for dimension {n}")]
    OutOfRange { index: usize, n: usize },
    #[error("index {0} selected twice")]
    Duplicate(usize),
}

fn first_positive_offdiag(m: &Matrix, tol: &Tolerance) -> Option<(usize, usize, f64)> {
    let n = m.n();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && !tol.nonpos(m.get(i, j)))
        .map(|(i, j)| (i, j, m.get(i, j)))
}

pub fn is_z_matrix(m: &Matrix, tol: &Tolerance) -> Verdict {
    first_positive_offdiag(m, tol)
        .map(|(row, col, value)| Witness::Entry { row, col, value })
        .into()
}

pub fn is_nonnegative(m: &Matrix, tol: &Tolerance) -> Verdict {
    m.first_negative(tol)
        .map(|(row, col, value)| Witness::Entry { row, col, value })
        .into()
}

/// Nonsingular Z-matrix with entrywise nonnegative inverse.
pub fn is_m_matrix(m: &Matrix, tol: &Tolerance) -> Verdict {
    let z = is_z_matrix(m, tol);
    if !z.holds {
        return z;
    }
    let Ok(lu) = Lu::factor(m) else {
        return Verdict::no(Witness::Singular);
    };
    lu.inverse()
        .first_negative(tol)
        .map(|(row, col, value)| Witness::InverseEntry { row, col, value })
        .into()
}

/// `U` nonsingular and `U⁻¹` an M-matrix.
pub fn is_inverse_m(u: &Matrix, tol: &Tolerance) -> Verdict {
    let Ok(lu) = Lu::factor(u) else {
        return Verdict::no(Witness::Singular);
    };
    let inv = lu.inverse();
    let v = is_m_matrix(&inv, tol);
    // Translate: entries of inv are inverse entries, entries of inv⁻¹ are ours.
    match v.witness {
        None => v,
        Some(Witness::Entry { row, col, value }) => {
            Verdict::no(Witness::InverseEntry { row, col, value })
        }
        Some(Witness::InverseEntry { row, col, value }) => {
            Verdict::no(Witness::Entry { row, col, value })
        }
        Some(w) => Verdict::no(w),
    }
}

/// Shared part of the potential tests: `U ≥ 0`, nonsingular, and `U⁻¹` a
/// Z-matrix with positive diagonal. Returns the inverse on success.
fn potential_core(u: &Matrix, tol: &Tolerance) -> Result<Matrix, Witness> {
    if let Some((row, col, value)) = u.first_negative(tol) {
        return Err(Witness::Entry { row, col, value });
    }
    let inv = Lu::factor(u).map_err(|_| Witness::Singular)?.inverse();
    let n = inv.n();
    for i in 0..n {
        for j in 0..n {
            let x = inv.get(i, j);
            let bad = if i == j {
                !tol.positive(x)
            } else {
                !tol.nonpos(x)
            };
            if bad {
                return Err(Witness::InverseEntry {
                    row: i,
                    col: j,
                    value: x,
                });
            }
        }
    }
    Ok(inv)
}

fn first_negative_in(v: &[f64], tol: &Tolerance) -> Option<(usize, f64)> {
    v.iter()
        .position(|&x| !tol.nonneg(x))
        .map(|k| (k, v[k]))
}

/// Class 𝒫. The certificate `mu` is the right equilibrium potential.
pub fn is_potential(u: &Matrix, tol: &Tolerance) -> Verdict {
    let inv = match potential_core(u, tol) {
        Ok(inv) => inv,
        Err(w) => return Verdict::no(w),
    };
    let mu = inv.row_sums();
    let v: Verdict = first_negative_in(&mu, tol)
        .map(|(index, value)| Witness::Potential {
            side: Side::Right,
            index,
            value,
        })
        .into();
    v.with_potentials(Some(mu), None)
}

/// Class bi𝒫: `U` and `U'` are both potentials.
pub fn is_bipotential(u: &Matrix, tol: &Tolerance) -> Verdict {
    let inv = match potential_core(u, tol) {
        Ok(inv) => inv,
        Err(w) => return Verdict::no(w),
    };
    let mu = inv.row_sums();
    let nu = inv.col_sums();
    let witness = first_negative_in(&mu, tol)
        .map(|(index, value)| Witness::Potential {
            side: Side::Right,
            index,
            value,
        })
        .or_else(|| {
            first_negative_in(&nu, tol).map(|(index, value)| Witness::Potential {
                side: Side::Left,
                index,
                value,
            })
        });
    Verdict::from(witness).with_potentials(Some(mu), Some(nu))
}

/// `U_ii ≥ U_ji` for all `i, j`: each diagonal entry dominates its column.
pub fn is_row_diag_dominant_entrywise(u: &Matrix, tol: &Tolerance) -> Verdict {
    let n = u.n();
    (0..n)
        .flat_map(|j| (0..n).map(move |i| (j, i)))
        .find(|&(j, i)| !tol.le(u.get(j, i), u.get(i, i)))
        .map(|(row, col)| Witness::Entry {
            row,
            col,
            value: u.get(row, col),
        })
        .into()
}

/// `U_ii ≥ U_ij` for all `i, j`: each diagonal entry dominates its row.
pub fn is_col_diag_dominant_entrywise(u: &Matrix, tol: &Tolerance) -> Verdict {
    let n = u.n();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| !tol.le(u.get(i, j), u.get(i, i)))
        .map(|(row, col)| Witness::Entry {
            row,
            col,
            value: u.get(row, col),
        })
        .into()
}

/// Restriction of `U` to `keep × keep`, in the order given.
pub fn principal_submatrix(u: &Matrix, keep: &[usize]) -> Result<Matrix, SelectionError> {
    if keep.is_empty() {
        return Err(SelectionError::EmptySelection);
    }
    let mut seen = vec![false; u.n()];
    for &k in keep {
        if k >= u.n() {
            return Err(SelectionError::OutOfRange { index: k, n: u.n() });
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(SelectionError::Duplicate(k));
        }
    }
    Ok(u.select(keep))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Class {
    Nonnegative,
    ZMatrix,
    MMatrix,
    InverseM,
    Potential,
    Bipotential,
    RowDiagDominant,
    ColDiagDominant,
}

impl Class {
    pub fn label(self) -> &'static str {
        match self {
            Class::Nonnegative => "nonnegative",
            Class::ZMatrix => "Z-matrix",
            Class::MMatrix => "M-matrix",
            Class::InverseM => "inverse M-matrix",
            Class::Potential => "potential",
            Class::Bipotential => "bi-potential",
            Class::RowDiagDominant => "row diag dominant (U_ii >= U_ji)",
            Class::ColDiagDominant => "col diag dominant (U_ii >= U_ij)",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub is_nonnegative: bool,
    pub is_z_matrix: bool,
    pub is_m_matrix: bool,
    pub is_inverse_m: bool,
    pub is_potential: bool,
    pub is_bipotential: bool,
    pub is_row_diag_dominant_entrywise: bool,
    pub is_col_diag_dominant_entrywise: bool,
    /// First violation for every failed verdict.
    pub certificates: BTreeMap<Class, Witness>,
    pub mu: Option<Vector>,
    pub nu: Option<Vector>,
}

impl ClassReport {
    pub fn verdicts(&self) -> [(Class, bool); 8] {
        [
            (Class::Nonnegative, self.is_nonnegative),
            (Class::ZMatrix, self.is_z_matrix),
            (Class::MMatrix, self.is_m_matrix),
            (Class::InverseM, self.is_inverse_m),
            (Class::Potential, self.is_potential),
            (Class::Bipotential, self.is_bipotential),
            (Class::RowDiagDominant, self.is_row_diag_dominant_entrywise),
            (Class::ColDiagDominant, self.is_col_diag_dominant_entrywise),
        ]
    }
}

pub fn classify(u: &Matrix, tol: &Tolerance) -> ClassReport {
    let mut certificates = BTreeMap::new();
    let mut record = |c: Class, v: Verdict| {
        if let Some(w) = v.witness {
            certificates.insert(c, w);
        }
        v.holds
    };
    let pot = is_potential(u, tol);
    let bi = is_bipotential(u, tol);
    let (mu, nu) = (bi.mu.clone().or(pot.mu.clone()), bi.nu.clone());
    ClassReport {
        is_nonnegative: record(Class::Nonnegative, is_nonnegative(u, tol)),
        is_z_matrix: record(Class::ZMatrix, is_z_matrix(u, tol)),
        is_m_matrix: record(Class::MMatrix, is_m_matrix(u, tol)),
        is_inverse_m: record(Class::InverseM, is_inverse_m(u, tol)),
        is_potential: record(Class::Potential, pot),
        is_bipotential: record(Class::Bipotential, bi),
        is_row_diag_dominant_entrywise: record(
            Class::RowDiagDominant,
            is_row_diag_dominant_entrywise(u, tol),
        ),
        is_col_diag_dominant_entrywise: record(
            Class::ColDiagDominant,
            is_col_diag_dominant_entrywise(u, tol),
        ),
        certificates,
        mu,
        nu,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn i_minus_p() -> Matrix {
        Matrix::from_rows(&[[1.0, -0.5, 0.0], [-0.5, 1.0, -0.5], [0.0, -0.5, 1.0]]).unwrap()
    }

    fn u3() -> Matrix {
        Matrix::from_rows(&[[1.5, 1.0, 0.5], [1.0, 2.0, 1.0], [0.5, 1.0, 1.5]]).unwrap()
    }

    fn u_beta(beta: f64) -> Matrix {
        Matrix::from_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [beta, beta, 1.0, 0.0],
            [beta, beta, 0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn z_matrix() {
        assert!(is_z_matrix(&i_minus_p(), &tol()).holds);
        let v = is_z_matrix(&Matrix::ones(2), &tol());
        assert_eq!(
            v.witness,
            Some(Witness::Entry {
                row: 0,
                col: 1,
                value: 1.0
            })
        );
    }

    #[test]
    fn m_matrix() {
        assert!(is_m_matrix(&Matrix::identity(3), &tol()).holds);
        assert!(is_m_matrix(&i_minus_p(), &tol()).holds);
        let v = is_m_matrix(&Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap(), &tol());
        assert!(!v.holds);
        assert!(matches!(v.witness, Some(Witness::Entry { row: 0, col: 1, .. })));
        let singular = Matrix::from_rows(&[[1.0, -1.0], [-1.0, 1.0]]).unwrap();
        assert_eq!(is_m_matrix(&singular, &tol()).witness, Some(Witness::Singular));
    }

    #[test]
    fn potential() {
        let v = is_potential(&u3(), &tol());
        assert!(v.holds);
        let mu = v.mu.unwrap();
        for (a, b) in mu.iter().zip([0.5, 0.0, 0.5]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert!(is_potential(&Matrix::identity(3), &tol()).holds);
        let v = is_potential(&u_beta(0.6), &tol());
        assert!(matches!(
            v.witness,
            Some(Witness::Potential {
                side: Side::Right,
                index: 2,
                ..
            })
        ));
    }

    #[test]
    fn bipotential() {
        assert!(is_bipotential(&u3(), &tol()).holds);
        assert!(is_bipotential(&u_beta(0.4), &tol()).holds);
        assert!(is_bipotential(&u_beta(0.5), &tol()).holds);
        assert!(!is_bipotential(&u_beta(0.6), &tol()).holds);
        assert!(is_bipotential(&Matrix::identity(4), &tol()).holds);
        // I + P with P² = 0 is a potential; column 1 of I - P sums to -0.4
        let u = Matrix::from_rows(&[[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.9, 1.0]]).unwrap();
        assert!(is_potential(&u, &tol()).holds);
        let v = is_bipotential(&u, &tol());
        match v.witness {
            Some(Witness::Potential {
                side: Side::Left,
                index: 1,
                value,
            }) => assert_abs_diff_eq!(value, -0.4, epsilon = 1e-12),
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn inverse_m() {
        assert!(is_inverse_m(&u_beta(0.6), &tol()).holds);
        assert!(is_inverse_m(&Matrix::identity(2), &tol()).holds);
        let perm = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let v = is_inverse_m(&perm, &tol());
        assert!(matches!(
            v.witness,
            Some(Witness::InverseEntry { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn submatrix() {
        let u = u3();
        assert_eq!(principal_submatrix(&u, &[0, 1, 2]).unwrap(), u);
        assert_eq!(
            principal_submatrix(&u, &[0, 1]).unwrap(),
            Matrix::from_rows(&[[1.5, 1.0], [1.0, 2.0]]).unwrap()
        );
        assert_eq!(
            principal_submatrix(&u, &[]),
            Err(SelectionError::EmptySelection)
        );
        assert_eq!(
            principal_submatrix(&u, &[3]),
            Err(SelectionError::OutOfRange { index: 3, n: 3 })
        );
    }

    #[test]
    fn report_containment() {
        let r = classify(&u_beta(0.6), &tol());
        assert!(r.is_inverse_m && !r.is_potential && !r.is_bipotential);
        assert!(r.certificates.contains_key(&Class::Potential));
        let r = classify(&u3(), &tol());
        assert!(r.is_bipotential && r.is_potential && r.is_inverse_m);
        assert!(r.is_row_diag_dominant_entrywise && r.is_col_diag_dominant_entrywise);
    }
}
