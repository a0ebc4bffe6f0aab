use hadamat::classes::{is_bipotential, is_inverse_m, is_z_matrix, Witness};
use hadamat::filtered::{check_gum_condition, Filtration, Partition, SfmLayer, SfmRep};
use hadamat::hadamard::{apply, ScalarFn};
use hadamat::linalg::lu_invert;
use hadamat::structure::{is_gum, is_increasing_cbf_permutation, CbfSearch};
use hadamat::{Matrix, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
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

fn ejemplo(a: f64, b: f64, c: f64, d: f64) -> Matrix {
    Matrix::from_rows(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [a, b, 1.0, 0.0],
        [c, d, 0.0, 1.0],
    ])
    .unwrap()
}

#[test]
fn printed_inverse_of_square_minus_cos() {
    let p = Matrix::from_rows(&[[0.0, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.0]]).unwrap();
    let u = lu_invert(&p.identity_minus()).unwrap();
    assert!(is_bipotential(&u, &tol()).holds);
    let inv = lu_invert(&apply(&ScalarFn::SquareMinusCos, &u).unwrap()).unwrap();
    let printed = Matrix::from_rows(&[
        [0.3590, -0.0975, 0.0027],
        [-0.0975, 0.2372, -0.0975],
        [0.0027, -0.0975, 0.3590],
    ])
    .unwrap();
    assert!(inv.max_abs_diff(&printed).unwrap() <= 5e-4);
    let z = is_z_matrix(&inv, &tol());
    assert!(!z.holds);
    assert!(matches!(z.witness, Some(Witness::Entry { row: 0, col: 2, .. })));
}

#[test]
fn u_beta_family() {
    for k in 0..=10 {
        let beta = f64::from(k) / 10.0;
        let u = u_beta(beta);
        let d = lu_invert(&u).unwrap().max_abs_diff(&u_beta(-beta)).unwrap();
        assert!(d <= 1e-12, "beta {beta}");
        assert!(is_inverse_m(&u, &tol()).holds);
        assert_eq!(is_bipotential(&u, &tol()).holds, beta <= 0.5, "beta {beta}");
        assert_eq!(check_gum_condition(&u_beta_rep(beta), &tol()).holds, beta <= 0.5);
        assert_eq!(u_beta_rep(beta).materialize(), u);
    }
}

#[test]
fn u_beta_normalized_factors() {
    let beta = 0.7;
    let rep = u_beta_rep(beta);
    assert_eq!(rep.c_norm(0), vec![0.0; 4]);
    assert_eq!(rep.gamma_norm(0), vec![4.0 * beta; 4]);
    assert_eq!(rep.rho(0), vec![0.5; 4]);
    assert_eq!(rep.c_norm(1), vec![1.0; 4]);
    // the unnormalized inequality Γ_0 ≤ C_1 + Γ_1 holds here but I + U is not bi𝒫
    let l = rep.layers();
    assert!(l[0].gamma[0] <= l[1].c[0] + l[1].gamma[0]);
    assert!(!is_bipotential(&u_beta(beta), &tol()).holds);
}

#[test]
fn ejemplo_properties() {
    let u = ejemplo(1.0, 2.0, 3.0, 4.0);
    assert!(!is_gum(&u, &tol()).holds);
    assert_eq!(is_increasing_cbf_permutation(&u, &tol()), CbfSearch::NotFound);
    let fs = [
        ScalarFn::Identity,
        ScalarFn::Power(2.0),
        ScalarFn::ExpMinusOne,
        ScalarFn::Step(vec![(0.0, 1.0), (2.5, 10.0)]),
    ];
    for f in &fs {
        let fu = apply(f, &u).unwrap();
        for t in [0.1, 1.0, 10.0, 1000.0] {
            assert!(is_inverse_m(&fu.identity_plus(t), &tol()).holds, "{f} t={t}");
        }
    }
}

#[test]
fn non_increasing_cbf_example() {
    let u = Matrix::from_rows(&[[2.0, 2.0, 2.0], [2.0, 2.0, 1.0], [2.0, 1.0, 2.0]]).unwrap();
    assert_eq!(is_increasing_cbf_permutation(&u, &tol()), CbfSearch::NotFound);
}
