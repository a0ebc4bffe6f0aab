//! Filtered and special filtered (SFM) representations.

use crate::linalg::{Matrix, Vector};

use super::partition::{Filtration, Partition};
use super::FilteredError;

/// Slack for measurability checks, scaled by the vector's magnitude.
fn meas_eps(v: &[f64]) -> f64 {
    1e-12 * v.iter().fold(1.0_f64, |m, x| m.max(x.abs()))
}

fn check_len(v: &[f64], n: usize, what: &str) -> Result<(), FilteredError> {
    if v.len() != n {
        return Err(FilteredError::InvalidRep(format!(
            "{what} has length {}, expected {n}",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(FilteredError::InvalidRep(format!("{what} has a non-finite entry")));
    }
    Ok(())
}

/// One term `D_a 𝔼_ℛ D_b` of a filtered representation, with `a` already
/// normalized (`a = 𝔞 ⊙ F(ℛ)𝟏`).
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredLayer {
    pub partition: Partition,
    pub a: Vector,
    pub b: Vector,
}

impl FilteredLayer {
    pub fn new(partition: Partition, a: Vector, b: Vector) -> Self {
        Self { partition, a, b }
    }

    /// From un-normalized factors of `D_𝔞 F(ℛ) D_𝔟`.
    pub fn from_incidence(partition: Partition, frak_a: &[f64], b: Vector) -> Self {
        let w = partition.sizes();
        let a = frak_a.iter().zip(&w).map(|(x, y)| x * y).collect();
        Self { partition, a, b }
    }

    fn zero(partition: Partition) -> Self {
        let n = partition.n();
        Self {
            partition,
            a: vec![0.0; n],
            b: vec![0.0; n],
        }
    }

    /// `D_a 𝔼 D_b = 0` iff on every atom `a` or `b` vanishes.
    fn is_zero(&self) -> bool {
        self.partition.atoms().iter().all(|atom| {
            atom.iter().all(|&i| self.a[i] == 0.0) || atom.iter().all(|&i| self.b[i] == 0.0)
        })
    }
}

/// `U = Σ_s a_s 𝔼_s b_s` over a wide-sense filtration `𝒬_0 ≼ … ≼ 𝒬_ℓ`, with
/// `a_s, b_s` measurable with respect to `𝒬_{s+1}`.
///
/// On construction the chain is padded to start at `𝒩` and end at `ℱ`, and
/// each run of layers sharing a partition is reduced to one pure `D_C 𝔼`
/// term followed by the run's last layer.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredRep {
    n: usize,
    layers: Vec<FilteredLayer>,
}

impl FilteredRep {
    pub fn new(layers: Vec<FilteredLayer>) -> Result<Self, FilteredError> {
        let Some(first) = layers.first() else {
            return Err(FilteredError::InvalidRep("no layers".into()));
        };
        let n = first.partition.n();
        for (s, l) in layers.iter().enumerate() {
            if l.partition.n() != n {
                return Err(FilteredError::InvalidRep(format!(
                    "layer {s} partition has n = {}, expected {n}",
                    l.partition.n()
                )));
            }
            check_len(&l.a, n, &format!("a_{s}"))?;
            check_len(&l.b, n, &format!("b_{s}"))?;
        }
        Filtration::new(layers.iter().map(|l| l.partition.clone()).collect())?;
        for s in 0..layers.len().saturating_sub(1) {
            let next = &layers[s + 1].partition;
            for (v, which) in [(&layers[s].a, 'a'), (&layers[s].b, 'b')] {
                if !next.is_measurable(v, meas_eps(v)) {
                    return Err(FilteredError::NotMeasurable { layer: s, which });
                }
            }
        }

        let mut padded = Vec::with_capacity(layers.len() + 2);
        if !first.partition.is_trivial() {
            padded.push(FilteredLayer::zero(Partition::trivial(n)));
        }
        let last_discrete = layers.last().expect("nonempty").partition.is_discrete();
        padded.extend(layers);
        if !last_discrete {
            padded.push(FilteredLayer::zero(Partition::discrete(n)));
        }
        Ok(Self {
            n,
            layers: reduce_runs(padded),
        })
    }

    /// `U = 0` on `n` indices.
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            layers: vec![
                FilteredLayer::zero(Partition::trivial(n)),
                FilteredLayer::zero(Partition::discrete(n)),
            ],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> &[FilteredLayer] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.a.iter().chain(&l.b).all(|&x| x >= 0.0))
    }

    /// `U(p) = Σ_{s ≥ p} a_s 𝔼_s b_s`.
    pub fn truncated(&self, p: usize) -> Result<Self, FilteredError> {
        if p >= self.layers.len() {
            return Ok(Self::zero(self.n));
        }
        Self::new(self.layers[p..].to_vec())
    }

    pub fn materialize(&self) -> Matrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for l in &self.layers {
            let w = l.partition.sizes();
            for atom in l.partition.atoms() {
                for &i in atom {
                    if l.a[i] == 0.0 {
                        continue;
                    }
                    for &j in atom {
                        data[i * n + j] += l.a[i] * l.b[j] / w[i];
                    }
                }
            }
        }
        Matrix::new(n, data).expect("finite layers give finite entries")
    }
}

/// Within runs of equal partitions, every layer but the last is measurable
/// for the run's partition, so those layers collapse to `D_{Σ a⊙b} 𝔼`.
fn reduce_runs(layers: Vec<FilteredLayer>) -> Vec<FilteredLayer> {
    let mut out: Vec<FilteredLayer> = Vec::with_capacity(layers.len());
    let mut i = 0;
    while i < layers.len() {
        let mut j = i;
        while j + 1 < layers.len() && layers[j + 1].partition == layers[i].partition {
            j += 1;
        }
        if j == i {
            out.push(layers[i].clone());
        } else {
            let n = layers[i].a.len();
            let mut c = vec![0.0; n];
            for l in &layers[i..j] {
                for (k, ck) in c.iter_mut().enumerate() {
                    *ck += l.a[k] * l.b[k];
                }
            }
            let pure = FilteredLayer::new(layers[i].partition.clone(), c, vec![1.0; n]);
            let last = layers[j].clone();
            let keep_pure = !pure.is_zero();
            if keep_pure {
                out.push(pure);
            }
            if !keep_pure || !last.is_zero() {
                out.push(last);
            }
        }
        i = j + 1;
    }
    out
}

/// One level `D_C F(ℛ_s) + D_Γ D_p F(ℛ_s) D_q` of an SFM.
///
/// `c` and `gamma` hold the un-normalized `C_s`, `Γ_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SfmLayer {
    pub c: Vector,
    pub gamma: Vector,
    pub p: Vector,
    pub q: Vector,
}

impl SfmLayer {
    /// Top-level layer of a pure `D_C F(ℛ)` term.
    pub fn pure(c: Vector) -> Self {
        let n = c.len();
        Self {
            c,
            gamma: vec![0.0; n],
            p: vec![1.0; n],
            q: vec![0.0; n],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfmRep {
    filtration: Filtration,
    layers: Vec<SfmLayer>,
}

impl SfmRep {
    pub fn new(filtration: Filtration, layers: Vec<SfmLayer>) -> Result<Self, FilteredError> {
        let n = filtration.n();
        if layers.len() != filtration.len() {
            return Err(FilteredError::InvalidRep(format!(
                "{} layers for {} partitions",
                layers.len(),
                filtration.len()
            )));
        }
        if !filtration.is_normalized() {
            return Err(FilteredError::InvalidFiltration(
                "SFM filtration must run from the trivial partition to singletons".into(),
            ));
        }
        let k = layers.len() - 1;
        for (s, l) in layers.iter().enumerate() {
            for (v, name) in [(&l.c, "C"), (&l.gamma, "Gamma"), (&l.p, "p"), (&l.q, "q")] {
                check_len(v, n, &format!("{name}_{s}"))?;
            }
            let rs = filtration.get(s);
            if !rs.is_measurable(&l.c, meas_eps(&l.c)) {
                return Err(FilteredError::NotMeasurable { layer: s, which: 'C' });
            }
            if !rs.is_measurable(&l.gamma, meas_eps(&l.gamma)) {
                return Err(FilteredError::NotMeasurable { layer: s, which: 'G' });
            }
            let indicator = l
                .p
                .iter()
                .zip(&l.q)
                .all(|(&p, &q)| (p == 0.0 || p == 1.0) && p + q == 1.0);
            if !indicator {
                return Err(FilteredError::InvalidRep(format!(
                    "p_{s}, q_{s} must be complementary 0/1 indicators"
                )));
            }
            if s < k {
                let next = filtration.get(s + 1);
                if !next.is_measurable(&l.p, 0.0) {
                    return Err(FilteredError::NotMeasurable { layer: s, which: 'p' });
                }
            }
        }
        if layers[k].gamma.iter().any(|&g| g != 0.0) {
            return Err(FilteredError::InvalidRep(
                "Gamma must vanish on the last level".into(),
            ));
        }
        Ok(Self { filtration, layers })
    }

    pub fn n(&self) -> usize {
        self.filtration.n()
    }

    /// Index `k` of the finest level.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn layers(&self) -> &[SfmLayer] {
        &self.layers
    }

    pub fn is_nonnegative(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.c.iter().chain(&l.gamma).all(|&x| x >= 0.0))
    }

    /// `c_s = C_s ⊙ F(ℛ_s)𝟏`.
    pub fn c_norm(&self, s: usize) -> Vector {
        let w = self.filtration.get(s).sizes();
        self.layers[s].c.iter().zip(&w).map(|(x, y)| x * y).collect()
    }

    /// `γ_s = Γ_s ⊙ F(ℛ_s)𝟏`.
    pub fn gamma_norm(&self, s: usize) -> Vector {
        let w = self.filtration.get(s).sizes();
        self.layers[s].gamma.iter().zip(&w).map(|(x, y)| x * y).collect()
    }

    /// `ρ_s = 𝔼_s(p_s) p_s + 𝔼_s(q_s) q_s`.
    pub fn rho(&self, s: usize) -> Vector {
        let r = self.filtration.get(s);
        let l = &self.layers[s];
        let ep = r.expect(&l.p);
        let eq = r.expect(&l.q);
        (0..self.n())
            .map(|i| ep[i] * l.p[i] + eq[i] * l.q[i])
            .collect()
    }

    pub fn materialize(&self) -> Matrix {
        let n = self.n();
        let mut data = vec![0.0; n * n];
        for (s, l) in self.layers.iter().enumerate() {
            for atom in self.filtration.get(s).atoms() {
                for &i in atom {
                    for &j in atom {
                        data[i * n + j] += l.c[i] + l.gamma[i] * l.p[i] * l.q[j];
                    }
                }
            }
        }
        Matrix::new(n, data).expect("finite layers give finite entries")
    }

    /// The same matrix as a filtered representation: each level contributes
    /// `(c_s, 𝟏)` followed by `(γ_s ⊙ p_s, q_s)`.
    pub fn to_filtered(&self) -> FilteredRep {
        let n = self.n();
        let k = self.depth();
        let mut layers = Vec::with_capacity(2 * k + 1);
        for s in 0..=k {
            let r = self.filtration.get(s).clone();
            layers.push(FilteredLayer::new(r.clone(), self.c_norm(s), vec![1.0; n]));
            if s < k {
                let g = self.gamma_norm(s);
                let l = &self.layers[s];
                let a = g.iter().zip(&l.p).map(|(x, y)| x * y).collect();
                layers.push(FilteredLayer::new(r, a, l.q.clone()));
            }
        }
        FilteredRep::new(layers).expect("SFM layers satisfy the filtered constraints")
    }
}
