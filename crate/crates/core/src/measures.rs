//! Closed-form two-qubit measures: concurrence, entanglement of formation,
//! negativity, PPT entanglement cost and the normalized CHSH nonlocality.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    general_eig4, hermitian_eig, kron, takagi4, ComplexMatrix4, LinalgError, NumericPolicy, Pauli,
    Subsystem, C64,
};
use crate::ree::{self, ReeError, ReeSolverConfig};
use crate::states::{BellDiagonalSpectrum, DensityMatrix, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("spin-flip spectrum has imaginary part {imag:.3e}")]
    ComplexSpectrum { imag: f64 },
    #[error("spin-flip spectrum has negative eigenvalue {value:.3e}")]
    NegativeSpectrum { value: f64 },
    #[error("{measure} evaluated to {value:.3e}, outside [0, 1]")]
    OutOfRange { measure: &'static str, value: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Ree(#[from] ReeError),
}

/// Clamps roundoff excursions of a measure that lives in `[0, 1]`.
fn clamp_unit(measure: &'static str, value: f64) -> Result<f64, MeasureError> {
    let tol = NumericPolicy::DEFAULT.measure_clamp;
    if !value.is_finite() || value < -tol || value > 1.0 + tol {
        return Err(MeasureError::OutOfRange { measure, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Binary entropy `h(y) = -y lg y - (1-y) lg(1-y)` with `h(0) = h(1) = 0`.
pub fn binary_entropy(y: f64) -> f64 {
    xlgx_neg(y) + xlgx_neg(1.0 - y)
}

fn xlgx_neg(y: f64) -> f64 {
    if y <= 0.0 || y >= 1.0 {
        0.0
    } else {
        -y * y.log2()
    }
}

/// `W(x) = h((1 + √(1 - x²))/2)`, the entanglement of formation as a
/// function of concurrence.
pub fn formation_from_concurrence(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - x * x).max(0.0).sqrt()))
}

/// Inverse of [`formation_from_concurrence`] on `[0, 1]`, by bisection.
pub fn concurrence_from_formation(e: f64) -> f64 {
    let e = e.clamp(0.0, 1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if formation_from_concurrence(mid) < e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn spin_flip() -> ComplexMatrix4 {
    let y = Pauli::Y.matrix();
    kron(&y, &y)
}

/// Square roots of the eigenvalues of `ρ (σ₂⊗σ₂) ρ* (σ₂⊗σ₂)`, descending.
///
/// Computed as the Takagi values of `τ = Xᵀ(σ₂⊗σ₂)X` with `X = V√D` from the
/// spectral decomposition of `ρ`, which avoids taking square roots of
/// roundoff-sized eigenvalues.
pub fn spin_flip_roots(rho: &DensityMatrix) -> Result<[f64; 4], MeasureError> {
    let eig = rho.eigen();
    let x: [[C64; 4]; 4] =
        [0, 1, 2, 3].map(|k| eig.vector(k).map(|z| z * eig.values[k].max(0.0).sqrt()));
    let yy = spin_flip();
    let mut tau = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        let fx = yy.apply(&x[i]);
        for j in i..4 {
            let t: C64 = (0..4).map(|k| x[j][k] * fx[k]).sum();
            tau[i][j] = t;
            tau[j][i] = t;
        }
    }
    let (_, values) = takagi4(&tau)?;
    Ok(values.map(|v| v.max(0.0)))
}

/// The same roots from the general eigenvalues of the non-Hermitian product;
/// kept as an independent route for cross-checks.
pub fn spin_flip_roots_spectral(rho: &DensityMatrix) -> Result<[f64; 4], MeasureError> {
    let policy = NumericPolicy::DEFAULT;
    let yy = spin_flip();
    let m = rho.matrix();
    let product = *m * yy * m.conj() * yy;
    let eig = general_eig4(&product)?;
    let mut roots = [0.0; 4];
    for (r, z) in roots.iter_mut().zip(eig) {
        if z.im.abs() > policy.spectral {
            return Err(MeasureError::ComplexSpectrum { imag: z.im });
        }
        if z.re < -policy.spectral {
            return Err(MeasureError::NegativeSpectrum { value: z.re });
        }
        *r = z.re.max(0.0).sqrt();
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(roots)
}

/// Wootters concurrence `max(0, 2 maxᵢλᵢ - Σᵢλᵢ)`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    let l = spin_flip_roots(rho)?;
    clamp_unit("concurrence", (l[0] - l[1] - l[2] - l[3]).max(0.0))
}

pub fn entanglement_of_formation(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    Ok(formation_from_concurrence(concurrence(rho)?))
}

/// `2 Σⱼ max(0, -μⱼ)` over the partial-transpose spectrum.
pub fn negativity(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    let pt = rho.matrix().partial_transpose(Subsystem::Second);
    let mu = hermitian_eig(&pt)?.values;
    let n = 2.0 * mu.iter().map(|&m| (-m).max(0.0)).sum::<f64>();
    clamp_unit("negativity", n)
}

/// Smallest eigenvalue of the partial transpose.
pub fn min_partial_transpose_eigenvalue(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    let pt = rho.matrix().partial_transpose(Subsystem::Second);
    Ok(hermitian_eig(&pt)?.values[0])
}

pub fn ppt_cost_from_negativity(n: f64) -> f64 {
    (n + 1.0).log2()
}

/// `lg(N + 1)`.
pub fn ppt_cost(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    Ok(ppt_cost_from_negativity(negativity(rho)?))
}

/// `T` with `t_nm = Tr[ρ(σₙ⊗σₘ)]` and the eigenvalues of `TᵀT`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix {
    pub t: [[f64; 3]; 3],
    /// Eigenvalues of `TᵀT`, descending.
    pub u: [f64; 3],
}

impl CorrelationMatrix {
    pub fn of(rho: &DensityMatrix) -> Result<Self, MeasureError> {
        let mut t = [[0.0; 3]; 3];
        for (n, pn) in Pauli::ALL.iter().enumerate() {
            for (m, pm) in Pauli::ALL.iter().enumerate() {
                let op = kron(&pn.matrix(), &pm.matrix());
                t[n][m] = rho.matrix().trace_product(&op).re;
            }
        }
        // TᵀT is real symmetric PSD; embedding it into a 4×4 block adds a
        // zero eigenvalue that never ranks among the top three.
        let mut u4 = ComplexMatrix4::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| t[k][i] * t[k][j]).sum();
                u4[(i, j)] = C64::new(v, 0.0);
            }
        }
        let vals = hermitian_eig(&u4)?.values;
        Ok(CorrelationMatrix {
            t,
            u: [vals[3], vals[2], vals[1]],
        })
    }
}

/// `√(max[0, max_{j<k}(uⱼ + uₖ) - 1])`; positive iff CHSH is violated.
pub fn nonlocality(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    let corr = CorrelationMatrix::of(rho)?;
    let arg = corr.u[0] + corr.u[1] - 1.0;
    clamp_unit("nonlocality", arg.max(0.0).sqrt())
}

/// Closed form for Bell-diagonal states using cyclic permutations of the
/// first three weights.
pub fn nonlocality_bell_diagonal(spec: &BellDiagonalSpectrum) -> f64 {
    let l = spec.lambdas();
    let best = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
        .iter()
        .map(|&(i, j, k)| (l[i] - l[j]).powi(2) + (l[k] - l[3]).powi(2))
        .fold(f64::NEG_INFINITY, f64::max);
    (2.0 * best - 1.0).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReeMethod {
    Analytic,
    Numeric,
    Absent,
}

impl ReeMethod {
    pub fn name(self) -> &'static str {
        match self {
            ReeMethod::Analytic => "analytic",
            ReeMethod::Numeric => "numeric",
            ReeMethod::Absent => "absent",
        }
    }
}

/// All measures of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub concurrence: f64,
    pub formation: f64,
    pub negativity: f64,
    pub ppt_cost: f64,
    pub nonlocality: f64,
    pub ree: Option<f64>,
    pub ree_method: ReeMethod,
    /// Solver convergence flag for numeric REE values.
    pub ree_converged: Option<bool>,
}

impl MeasureRecord {
    /// Every measure except the REE.
    pub fn closed_form(rho: &DensityMatrix) -> Result<Self, MeasureError> {
        let c = concurrence(rho)?;
        let n = negativity(rho)?;
        Ok(MeasureRecord {
            concurrence: c,
            formation: formation_from_concurrence(c),
            negativity: n,
            ppt_cost: ppt_cost_from_negativity(n),
            nonlocality: nonlocality(rho)?,
            ree: None,
            ree_method: ReeMethod::Absent,
            ree_converged: None,
        })
    }

    pub fn with_ree(mut self, value: f64, method: ReeMethod, converged: Option<bool>) -> Self {
        self.ree = Some(value);
        self.ree_method = method;
        self.ree_converged = converged;
        self
    }

    /// Range and internal-consistency checks.
    pub fn check(&self) -> Result<(), MeasureError> {
        let tol = NumericPolicy::DEFAULT.measure_clamp;
        let fields = [
            ("concurrence", Some(self.concurrence)),
            ("formation", Some(self.formation)),
            ("negativity", Some(self.negativity)),
            ("ppt_cost", Some(self.ppt_cost)),
            ("nonlocality", Some(self.nonlocality)),
            ("ree", self.ree),
        ];
        for (name, v) in fields {
            if let Some(v) = v {
                if !(v >= -tol && v <= 1.0 + tol) {
                    return Err(MeasureError::OutOfRange {
                        measure: name,
                        value: v,
                    });
                }
            }
        }
        let w = formation_from_concurrence(self.concurrence);
        if (self.formation - w).abs() > 1e-12 {
            return Err(MeasureError::OutOfRange {
                measure: "formation",
                value: self.formation,
            });
        }
        Ok(())
    }
}

/// Purity above which a state is treated as pure for the REE.
pub const PURE_THRESHOLD: f64 = 1.0 - 1e-10;

/// Bundles every measure. The REE is filled analytically for pure input,
/// numerically when a solver configuration is supplied, and left absent
/// otherwise.
pub fn all_measures(
    rho: &DensityMatrix,
    ree_solver: Option<&ReeSolverConfig>,
) -> Result<MeasureRecord, MeasureError> {
    let rec = MeasureRecord::closed_form(rho)?;
    if rho.purity() > PURE_THRESHOLD {
        return Ok(rec.with_ree(rec.formation, ReeMethod::Analytic, None));
    }
    match ree_solver {
        Some(cfg) => {
            let css = ree::ree_numeric(rho, cfg)?;
            let value = clamp_unit("ree", css.value)?;
            Ok(rec.with_ree(value, ReeMethod::Numeric, Some(css.converged)))
        }
        None => Ok(rec),
    }
}
