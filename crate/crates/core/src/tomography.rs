// SPDX-License-Identifier: Apache-2.0

//! Simulated projective measurements and least-squares state reconstruction.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{spectral_decompose, Operator, ProjectiveState, C64, I, ZERO};
use crate::random::stream_rng;
use crate::tolerance::{TOL_HERM, TOL_SPEC};

/// Outcome counts of repeated projective measurements of one observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub observable_id: String,
    /// Distinct eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub counts: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
}

impl MeasurementRecord {
    pub fn validate(&self) -> Result<()> {
        if self.eigenvalues.len() != self.counts.len() {
            return Err(Error::Schema(format!(
                "{} eigenvalues but {} counts",
                self.eigenvalues.len(),
                self.counts.len()
            )));
        }
        if self.counts.iter().sum::<u64>() != self.shots {
            return Err(Error::Schema("counts do not sum to shots".into()));
        }
        if self.eigenvalues.iter().any(|l| !l.is_finite()) {
            return Err(Error::NonFinite("record eigenvalues"));
        }
        if self.eigenvalues.windows(2).any(|w| w[1] - w[0] <= TOL_SPEC) {
            return Err(Error::Schema(
                "eigenvalues not ascending and distinct".into(),
            ));
        }
        Ok(())
    }
}

/// Distinct eigenvalues of `a` with the Born weights of `psi` on each
/// eigenspace.
pub fn born_distribution(a: &Operator, psi: &ProjectiveState) -> Result<(Vec<f64>, Vec<f64>)> {
    crate::hilbert::same_dim(a.dim(), psi.dim())?;
    let spec = spectral_decompose(a)?;
    let mut values: Vec<f64> = Vec::new();
    let mut probs: Vec<f64> = Vec::new();
    for (k, &lambda) in spec.eigenvalues.iter().enumerate() {
        let p = spec
            .eigenvectors
            .column(k)
            .dotc(psi.amplitudes())
            .norm_sqr();
        match values.last() {
            Some(&last) if lambda - last <= TOL_SPEC => {
                *probs.last_mut().expect("nonempty") += p;
            }
            _ => {
                values.push(lambda);
                probs.push(p);
            }
        }
    }
    let total: f64 = probs.iter().sum();
    for p in probs.iter_mut() {
        *p /= total;
    }
    Ok((values, probs))
}

/// Samples `shots` outcomes of measuring `a` on `psi`, using ChaCha stream 0
/// of `seed`.
pub fn sample_measurement(
    a: &Operator,
    psi: &ProjectiveState,
    shots: u64,
    seed: u64,
) -> Result<MeasurementRecord> {
    sample_measurement_stream("A", a, psi, shots, seed, 0)
}

/// As [`sample_measurement`] with an explicit id and stream.
pub fn sample_measurement_stream(
    observable_id: &str,
    a: &Operator,
    psi: &ProjectiveState,
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let (eigenvalues, probs) = born_distribution(a, psi)?;
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cumulative.push(acc);
    }
    let mut rng = stream_rng(seed, stream);
    let mut counts = vec![0u64; eigenvalues.len()];
    let last = counts.len() - 1;
    for _ in 0..shots {
        let u: f64 = rng.random();
        let k = cumulative.iter().position(|&c| u < c).unwrap_or(last);
        counts[k] += 1;
    }
    Ok(MeasurementRecord {
        observable_id: observable_id.to_string(),
        eigenvalues,
        counts,
        shots,
        seed,
        stream,
    })
}

/// One record per observable, observable `k` drawn from stream `k`.
pub fn sample_observables(
    observables: &[(String, Operator)],
    psi: &ProjectiveState,
    shots: u64,
    seed: u64,
) -> Result<Vec<MeasurementRecord>> {
    observables
        .iter()
        .enumerate()
        .map(|(k, (id, a))| sample_measurement_stream(id, a, psi, shots, seed, k as u64))
        .collect()
}

/// Sample mean and its standard error.
pub fn estimate_expectation(rec: &MeasurementRecord) -> Result<(f64, f64)> {
    if rec.shots < 2 {
        return Err(Error::InvalidArgument("need at least 2 shots".into()));
    }
    let n = rec.shots as f64;
    let mean = rec
        .eigenvalues
        .iter()
        .zip(&rec.counts)
        .map(|(l, &c)| l * c as f64)
        .sum::<f64>()
        / n;
    let ss = rec
        .eigenvalues
        .iter()
        .zip(&rec.counts)
        .map(|(l, &c)| (l - mean).powi(2) * c as f64)
        .sum::<f64>();
    let var = ss / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Raw sample moments `k = 1..=k_max`.
pub fn empirical_moments(rec: &MeasurementRecord, k_max: u32) -> Vec<f64> {
    let n = rec.shots as f64;
    (1..=k_max)
        .map(|k| {
            rec.eigenvalues
                .iter()
                .zip(&rec.counts)
                .map(|(l, &c)| l.powi(k as i32) * c as f64)
                .sum::<f64>()
                / n
        })
        .collect()
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        let op = Operator::from_matrix(m)?;
        let deviation = op.hermiticity_deviation();
        if deviation > TOL_HERM {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!("trace {tr} is not 1")));
        }
        let min = spectral_decompose(&op)?
            .eigenvalues
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::InvalidArgument(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self {
            m: op.into_matrix(),
        })
    }

    pub fn pure(psi: &ProjectiveState) -> Self {
        Self {
            m: psi.projector().into_matrix(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn operator(&self) -> Operator {
        Operator::wrap(self.m.clone())
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        crate::hilbert::max_abs_diff(&self.m, &other.m)
    }

    /// `tr(ρA)`.
    pub fn expectation(&self, a: &Operator) -> Result<C64> {
        crate::hilbert::same_dim(self.dim(), a.dim())?;
        Ok((&self.m * a.matrix()).trace())
    }
}

pub fn purity(r: &DensityMatrix) -> f64 {
    (&r.m * &r.m).trace().re
}

/// `½ Σ |λ_i(ρ₁ - ρ₂)|`.
pub fn trace_distance(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    crate::hilbert::same_dim(r1.dim(), r2.dim())?;
    let diff = Operator::wrap(&r1.m - &r2.m);
    let spec = spectral_decompose(&diff)?;
    Ok(0.5 * spec.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// Generalized Gell-Mann matrices: `d²-1` traceless Hermitian matrices with
/// `tr(G_i G_j) = 2δ_ij`, ordered symmetric, antisymmetric, diagonal. For
/// `d = 2` these are `σx, σy, σz`.
pub fn gell_mann_basis(d: usize) -> Vec<(String, Operator)> {
    let mut out = Vec::with_capacity(d * d - 1);
    let unit = |entries: &[(usize, usize, C64)]| {
        let mut m = DMatrix::from_element(d, d, ZERO);
        for &(i, j, v) in entries {
            m[(i, j)] = v;
        }
        Operator::wrap(m)
    };
    let one = C64::new(1.0, 0.0);
    for j in 0..d {
        for k in (j + 1)..d {
            out.push((format!("sym_{j}{k}"), unit(&[(j, k, one), (k, j, one)])));
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            out.push((format!("asym_{j}{k}"), unit(&[(j, k, -I), (k, j, I)])));
        }
    }
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut entries: Vec<(usize, usize, C64)> =
            (0..l).map(|j| (j, j, C64::new(scale, 0.0))).collect();
        entries.push((l, l, C64::new(-(l as f64) * scale, 0.0)));
        out.push((format!("diag_{l}"), unit(&entries)));
    }
    out
}

/// Orthonormal Hermitian basis `I/√d, G_k/√2` used as the fit parameters.
fn hermitian_parameter_basis(d: usize) -> Vec<DMatrix<C64>> {
    let mut basis = vec![DMatrix::identity(d, d) / C64::new((d as f64).sqrt(), 0.0)];
    basis.extend(
        gell_mann_basis(d)
            .into_iter()
            .map(|(_, g)| g.into_matrix() / C64::new(2f64.sqrt(), 0.0)),
    );
    basis
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub rho: DensityMatrix,
    /// Least-squares estimate before the positivity projection.
    pub unprojected: DMatrix<C64>,
    pub condition_number: f64,
    pub residual: f64,
}

/// Least-squares fit of `ρ` to `tr(ρ O_k) = e_k` together with `tr ρ = 1`,
/// followed by clipping negative eigenvalues and renormalizing the trace.
pub fn reconstruct_density_from_expectations(
    observables: &[Operator],
    expectations: &[f64],
) -> Result<Reconstruction> {
    let Some(first) = observables.first() else {
        return Err(Error::InvalidArgument("no observables".into()));
    };
    if observables.len() != expectations.len() {
        return Err(Error::DimMismatch {
            expected: observables.len(),
            found: expectations.len(),
        });
    }
    let d = first.dim();
    for o in observables {
        crate::hilbert::same_dim(d, o.dim())?;
        if !o.is_hermitian() {
            return Err(Error::NotHermitian {
                deviation: o.hermiticity_deviation(),
            });
        }
    }
    let basis = hermitian_parameter_basis(d);
    let unknowns = basis.len();
    let rows = observables.len() + 1;
    let mut design = DMatrix::<f64>::zeros(rows, unknowns);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (r, (o, &e)) in observables.iter().zip(expectations).enumerate() {
        for (c, b) in basis.iter().enumerate() {
            design[(r, c)] = (o.matrix() * b).trace().re;
        }
        rhs[r] = e;
    }
    for (c, b) in basis.iter().enumerate() {
        design[(rows - 1, c)] = b.trace().re;
    }
    rhs[rows - 1] = 1.0;

    // rank and null directions from the Gram matrix; singular values are
    // the square roots of its eigenvalues
    let gram = design.transpose() * &design;
    let eig = gram.symmetric_eigen();
    let lmax = eig.eigenvalues.max();
    let cutoff = lmax * 1e-20;
    let null: Vec<usize> = (0..unknowns)
        .filter(|&k| eig.eigenvalues[k] <= cutoff)
        .collect();
    if !null.is_empty() {
        let deficient = null
            .iter()
            .map(|&k| {
                let mut m = DMatrix::from_element(d, d, ZERO);
                for (c, b) in basis.iter().enumerate() {
                    m += b * C64::new(eig.eigenvectors[(c, k)], 0.0);
                }
                Operator::wrap(m)
            })
            .collect();
        return Err(Error::IncompleteObservables {
            rank: unknowns - null.len(),
            needed: unknowns,
            deficient,
        });
    }
    let condition_number = (lmax / eig.eigenvalues.min()).sqrt();
    let svd = design.clone().svd(true, true);
    let theta = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let residual = (&design * &theta - &rhs).norm();
    let mut estimate = DMatrix::from_element(d, d, ZERO);
    for (c, b) in basis.iter().enumerate() {
        estimate += b * C64::new(theta[c], 0.0);
    }
    let rho = project_to_density(&estimate)?;
    Ok(Reconstruction {
        rho,
        unprojected: estimate,
        condition_number,
        residual,
    })
}

/// Reconstruction from sampled records, paired with observables by index.
pub fn reconstruct_density(
    observables: &[Operator],
    records: &[MeasurementRecord],
) -> Result<Reconstruction> {
    if observables.len() != records.len() {
        return Err(Error::DimMismatch {
            expected: observables.len(),
            found: records.len(),
        });
    }
    let means = records
        .iter()
        .map(|r| {
            if r.shots == 0 {
                return Err(Error::InvalidArgument(format!(
                    "record {} is empty",
                    r.observable_id
                )));
            }
            Ok(empirical_moments(r, 1)[0])
        })
        .collect::<Result<Vec<_>>>()?;
    reconstruct_density_from_expectations(observables, &means)
}

/// Clips negative eigenvalues of the Hermitian part at zero and rescales to
/// unit trace.
pub fn project_to_density(m: &DMatrix<C64>) -> Result<DensityMatrix> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let spec = spectral_decompose(&Operator::from_matrix(herm)?)?;
    let clipped: Vec<f64> = spec.eigenvalues.iter().map(|l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidArgument(
            "estimate has no positive part".into(),
        ));
    }
    let spectrum = crate::hilbert::Spectrum {
        eigenvalues: clipped.iter().map(|l| l / total).collect(),
        eigenvectors: spec.eigenvectors,
    };
    let rho = spectrum.reconstruct();
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    Ok(DensityMatrix { m: rho })
}
