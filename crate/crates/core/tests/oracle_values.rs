//! Values frozen from `tools/oracle.py` (mpmath, 50 digits).

use hadamat::filtered::{cbf_to_sfm, invert_sfm};
use hadamat::hadamard::{apply, check_markov_preservation, HadamardPower, ScalarFn};
use hadamat::linalg::lu_invert;
use hadamat::tau::{is_class_t, tau_bisection, DEFAULT_T_MAX};
use hadamat::{Matrix, Tolerance};

const F_U_INV: [[f64; 3]; 3] = [
    [0.35897571166254951826, -0.097475723884087037929, 0.0027038577971591515448],
    [-0.097475723884087037929, 0.23717417890276404828, -0.097475723884087037929],
    [0.0027038577971591515448, -0.097475723884087037929, 0.35897571166254951826],
];
const Q_TWO: [[f64; 3]; 3] = [
    [0.5, 0.125, 0.0],
    [0.125, 0.6875, 0.125],
    [0.0, 0.125, 0.5],
];
const TAU_CBF2: f64 = 1.0;
const TAU_CBF3: f64 = 0.5;
const NBF4_INV_T1: [[f64; 4]; 4] = [
    [0.12166717744406987435, -0.03708243947287771989, -0.0055163959546429665952, -0.010113392583512105424],
    [-0.065277352129941771376, 0.13576463377260190009, -0.0045969966288691388293, -0.0084278271529267545204],
    [-0.01103279190928593319, -0.019307385841250383083, 0.15415262028807845541, -0.05072019613852283175],
    [-0.0098069261415874961692, -0.017162120747778118296, -0.08519767085504137297, 0.17713760343242414956],
];
const NBF4_INV_T10: [[f64; 4]; 4] = [
    [0.013993559418584909074, -0.0047223508214942111772, -0.00058449528831853694335, -0.0012803230125072713997],
    [-0.0083581188987846809406, 0.015811443457230143956, -0.00046988836904039244465, -0.0010292792845646691645],
    [-0.0012181078277562786719, -0.0023969218546171935156, 0.018540725377753956517, -0.0070060301249199047715],
    [-0.0010489261850123510785, -0.0020640160414759166384, -0.011812153146934092999, 0.021744807392430082002],
];

fn tol() -> Tolerance {
    Tolerance::default()
}

fn assert_close<const N: usize>(got: &Matrix, want: &[[f64; N]; N], eps: f64) {
    let want = Matrix::from_rows(want).unwrap();
    let d = got.max_abs_diff(&want).unwrap();
    assert!(d <= eps, "max diff {d:e} > {eps:e}\n{got:?}");
}

fn example_u() -> Matrix {
    let p = Matrix::from_rows(&[[0.0, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.0]]).unwrap();
    lu_invert(&p.identity_minus()).unwrap()
}

fn nbf4() -> Matrix {
    Matrix::from_rows(&[
        [9.0, 3.0, 1.0, 1.0],
        [5.0, 8.0, 1.0, 1.0],
        [2.0, 2.0, 7.0, 2.5],
        [2.0, 2.0, 4.0, 6.0],
    ])
    .unwrap()
}

#[test]
fn square_minus_cos_inverse() {
    let fu = apply(&ScalarFn::SquareMinusCos, &example_u()).unwrap();
    assert_close(&lu_invert(&fu).unwrap(), &F_U_INV, 1e-13);
}

#[test]
fn markov_q_for_squares() {
    let r = check_markov_preservation(&example_u(), HadamardPower::new(2.0).unwrap(), &tol()).unwrap();
    assert_close(&r.q, &Q_TWO, 1e-13);
    assert!(r.holds());
}

#[test]
fn thresholds_of_small_cbfs() {
    for (rows, want) in [
        (vec![vec![2.0, 3.0], vec![1.0, 5.0]], TAU_CBF2),
        (
            vec![vec![2.0, 3.0, 3.0], vec![1.0, 5.0, 1.5], vec![1.0, 4.0, 2.0]],
            TAU_CBF3,
        ),
    ] {
        let u = Matrix::from_rows(&rows).unwrap();
        let got = tau_bisection(&u, DEFAULT_T_MAX, &tol()).value.finite().unwrap();
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        let ct = is_class_t(&u, DEFAULT_T_MAX, 64, &tol());
        assert!(ct.is_class_t, "{ct:?}");
    }
}

#[test]
fn backward_algorithm_matches_oracle() {
    let rep = cbf_to_sfm(&nbf4(), &tol()).unwrap();
    for (t, want) in [(1.0, &NBF4_INV_T1), (10.0, &NBF4_INV_T10)] {
        let tr = invert_sfm(&rep, t, &tol());
        assert!(tr.success);
        assert_close(&tr.inverse().unwrap(), want, 1e-13);
    }
}
