//! Relative entropy of entanglement.
//!
//! The numerical path minimizes `S(ρ‖σ)` over separable `σ` written as a
//! 16-term mixture of product projectors, with Nelder–Mead restarts run in
//! parallel. Closed forms for the analytic families live at the bottom.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{
    hermitian_eig, kron_vec, takagi4, ComplexMatrix4, LinalgError, NumericPolicy, Subsystem,
    C64,
};
use crate::measures::{binary_entropy, concurrence, formation_from_concurrence};
use crate::simplex::{self, SimplexOptions};
use crate::states::{
    horodecki_p_for_negativity, hprime_region, index_stream, schmidt_dephased, BellDiagonalSpectrum,
    DensityMatrix, PureState, StateError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReeError {
    #[error("invalid solver configuration: {0}")]
    BadConfig(String),
    #[error("evaluation budget exhausted before convergence (best value {best:.6})")]
    BudgetExhausted { best: f64 },
    #[error("{name} = {value} is outside its allowed range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("no sign change on the bracket")]
    NoRoot,
    #[error("state is entangled (concurrence {concurrence:.3e})")]
    NotSeparable { concurrence: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn lg_or_zero(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// `Tr ρ lg ρ`.
fn neg_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigen().values.iter().map(|&v| lg_or_zero(v)).sum()
}

/// Overlap above which a null direction of `σ` counts as touching `ρ`.
const SUPPORT_OVERLAP: f64 = 1e-8;
/// Eigenvalue floor inside the search objective.
const BARRIER_FLOOR: f64 = 1e-14;

/// Quantum relative entropy `S(ρ‖σ)` in bits, `+∞` when the support of `ρ`
/// is not contained in that of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    relative_entropy_given(rho, neg_entropy(rho), sigma)
}

fn relative_entropy_given(rho: &DensityMatrix, rho_lg_rho: f64, sigma: &DensityMatrix) -> f64 {
    let support = NumericPolicy::DEFAULT.support;
    let eig = sigma.eigen();
    let mut cross = 0.0;
    for k in 0..4 {
        let s = eig.values[k];
        let w = rho.matrix().expectation(&eig.vector(k)).re;
        if s < support {
            if w > SUPPORT_OVERLAP {
                return f64::INFINITY;
            }
            continue;
        }
        cross += w * s.log2();
    }
    (rho_lg_rho - cross).max(0.0)
}

/// Barrier-smoothed objective used during the search.
fn smoothed_relative_entropy(rho: &ComplexMatrix4, rho_lg_rho: f64, sigma: &ComplexMatrix4) -> f64 {
    let eig = match hermitian_eig(sigma) {
        Ok(e) => e,
        Err(_) => return f64::INFINITY,
    };
    let mut cross = 0.0;
    for k in 0..4 {
        let w = rho.expectation(&eig.vector(k)).re;
        cross += w * eig.values[k].max(BARRIER_FLOOR).log2();
    }
    rho_lg_rho - cross
}

// ---------------------------------------------------------------------------
// Parametrization
// ---------------------------------------------------------------------------

pub const TERMS: usize = 16;

/// A separable state as 16 product terms. Each term carries
/// `(α₁, η₁, α₂, η₂)` for the qubit vectors `cos α|0⟩ + e^{iη} sin α|1⟩`,
/// and the 15 mixing angles fix the amplitudes `pⱼ` with `Σ pⱼ² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CaratheodoryPoint {
    pub angles: [[f64; 4]; TERMS],
    pub mixing: [f64; TERMS - 1],
}

fn qubit(alpha: f64, eta: f64) -> [C64; 2] {
    [
        C64::new(alpha.cos(), 0.0),
        C64::from_polar(alpha.sin(), eta),
    ]
}

/// Inverse of [`qubit`] up to a global phase.
fn qubit_angles(v: &[C64; 2]) -> (f64, f64) {
    let alpha = v[1].norm().atan2(v[0].norm());
    let eta = if v[1].norm() > 0.0 && v[0].norm() > 0.0 {
        v[1].arg() - v[0].arg()
    } else {
        v[1].arg()
    };
    (alpha, eta)
}

impl CaratheodoryPoint {
    pub const PARAMETERS: usize = TERMS * 4 + TERMS - 1;

    pub fn from_flat(x: &[f64]) -> Self {
        assert_eq!(x.len(), Self::PARAMETERS);
        let mut angles = [[0.0; 4]; TERMS];
        for (j, a) in angles.iter_mut().enumerate() {
            a.copy_from_slice(&x[4 * j..4 * j + 4]);
        }
        let mut mixing = [0.0; TERMS - 1];
        mixing.copy_from_slice(&x[4 * TERMS..]);
        CaratheodoryPoint { angles, mixing }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut x: Vec<f64> = self.angles.iter().flatten().copied().collect();
        x.extend_from_slice(&self.mixing);
        x
    }

    /// Amplitudes `pⱼ = sin φ_{j-1} Π_{i≥j} cos φᵢ` with `φ₀ = π/2`.
    pub fn amplitudes(&self) -> [f64; TERMS] {
        let phi = |i: usize| if i == 0 { FRAC_PI_2 } else { self.mixing[i - 1] };
        let mut p = [0.0; TERMS];
        // tail[j] = Π_{i=j}^{15} cos φᵢ, built from the end.
        let mut tail = 1.0;
        for j in (1..=TERMS).rev() {
            p[j - 1] = phi(j - 1).sin() * tail;
            if j > 1 {
                tail *= phi(j - 1).cos();
            }
        }
        p
    }

    /// Mixture weights `pⱼ²`.
    pub fn weights(&self) -> [f64; TERMS] {
        self.amplitudes().map(|p| p * p)
    }

    pub fn products(&self) -> [([C64; 2], [C64; 2]); TERMS] {
        self.angles
            .map(|[a1, e1, a2, e2]| (qubit(a1, e1), qubit(a2, e2)))
    }

    /// Inverse map from probabilities and product vectors. Weights are
    /// normalized here; zero-weight slots keep their vectors.
    pub fn from_weights_and_products(
        weights: &[f64; TERMS],
        products: &[([C64; 2], [C64; 2]); TERMS],
    ) -> Self {
        let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
        let w = weights.map(|x| x.max(0.0) / total);
        let mut mixing = [0.0; TERMS - 1];
        // cumulative[j] = Σ_{k≤j} wₖ (1-based), cumulative[16] = 1.
        let mut cumulative = [0.0; TERMS + 1];
        for j in 1..=TERMS {
            cumulative[j] = cumulative[j - 1] + w[j - 1];
        }
        cumulative[TERMS] = 1.0;
        for j in 1..TERMS {
            let ratio = if cumulative[j + 1] > 0.0 {
                (cumulative[j] / cumulative[j + 1]).clamp(0.0, 1.0)
            } else {
                1.0
            };
            mixing[j - 1] = ratio.sqrt().acos();
        }
        let mut angles = [[0.0; 4]; TERMS];
        for (slot, (a, b)) in angles.iter_mut().zip(products) {
            let (a1, e1) = qubit_angles(a);
            let (a2, e2) = qubit_angles(b);
            *slot = [a1, e1, a2, e2];
        }
        CaratheodoryPoint { angles, mixing }
    }

    /// Sixteen uniformly weighted tetrahedral product pairs, which average to
    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        // α is half the Bloch polar angle acos(-1/3).
        let lower = (-1.0f64 / 3.0).acos() / 2.0;
        let tetra = [
            (0.0, 0.0),
            (lower, 0.0),
            (lower, 2.0 * PI / 3.0),
            (lower, 4.0 * PI / 3.0),
        ];
        let mut angles = [[0.0; 4]; TERMS];
        for (j, slot) in angles.iter_mut().enumerate() {
            let (a1, e1) = tetra[j / 4];
            let (a2, e2) = tetra[j % 4];
            *slot = [a1, e1, a2, e2];
        }
        let products = angles.map(|[a1, e1, a2, e2]| (qubit(a1, e1), qubit(a2, e2)));
        let mut p = Self::from_weights_and_products(&[1.0 / TERMS as f64; TERMS], &products);
        p.angles = angles;
        p
    }

    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let mut angles = [[0.0; 4]; TERMS];
        for slot in angles.iter_mut() {
            *slot = [
                rng.random::<f64>() * FRAC_PI_2,
                rng.random::<f64>() * 2.0 * PI,
                rng.random::<f64>() * FRAC_PI_2,
                rng.random::<f64>() * 2.0 * PI,
            ];
        }
        let weights = [0; TERMS].map(|_| rng.random::<f64>());
        let products = angles.map(|[a1, e1, a2, e2]| (qubit(a1, e1), qubit(a2, e2)));
        let mut p = Self::from_weights_and_products(&weights, &products);
        p.angles = angles;
        p
    }
}

fn assemble_matrix(point: &CaratheodoryPoint) -> ComplexMatrix4 {
    let w = point.weights();
    let mut m = ComplexMatrix4::zeros();
    for (wj, (a, b)) in w.iter().zip(point.products()) {
        if *wj == 0.0 {
            continue;
        }
        let v = kron_vec(&a, &b);
        for r in 0..4 {
            let vr = v[r] * *wj;
            for c in 0..4 {
                m.0[r][c] += vr * v[c].conj();
            }
        }
    }
    m
}

/// The separable state encoded by `point`.
pub fn caratheodory_assemble(point: &CaratheodoryPoint) -> DensityMatrix {
    DensityMatrix::from_trusted(assemble_matrix(point))
}

// ---------------------------------------------------------------------------
// Product decomposition of separable states
// ---------------------------------------------------------------------------

/// Factors a (numerically) rank-one 4-vector as `‖z‖² a⊗b` with unit `a`, `b`.
fn factor_product(z: &[C64; 4]) -> (f64, [C64; 2], [C64; 2]) {
    let cols = [[z[0], z[2]], [z[1], z[3]]];
    let n0 = cols[0][0].norm_sqr() + cols[0][1].norm_sqr();
    let n1 = cols[1][0].norm_sqr() + cols[1][1].norm_sqr();
    let pick = if n0 >= n1 { cols[0] } else { cols[1] };
    let np = (pick[0].norm_sqr() + pick[1].norm_sqr()).sqrt();
    if np == 0.0 {
        return (0.0, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    }
    let a = [pick[0] / np, pick[1] / np];
    let b = [
        a[0].conj() * cols[0][0] + a[1].conj() * cols[0][1],
        a[0].conj() * cols[1][0] + a[1].conj() * cols[1][1],
    ];
    let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
    if nb == 0.0 {
        return (0.0, a, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    }
    (nb * nb, a, [b[0] / nb, b[1] / nb])
}

/// One product term `weight · |a⟩⟨a| ⊗ |b⟩⟨b|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub first: [C64; 2],
    pub second: [C64; 2],
}

/// Writes a separable state as four product terms. Fails when the state is
/// entangled beyond `tol` in concurrence.
pub fn separable_decomposition(sigma: &DensityMatrix, tol: f64) -> Result<Vec<ProductTerm>, ReeError> {
    let c = concurrence(sigma).map_err(|_| ReeError::NotSeparable { concurrence: f64::NAN })?;
    if c > tol {
        return Err(ReeError::NotSeparable { concurrence: c });
    }
    let eig = sigma.eigen();
    let v: [[C64; 4]; 4] =
        [0, 1, 2, 3].map(|k| eig.vector(k).map(|z| z * eig.values[k].max(0.0).sqrt()));
    // τᵢⱼ = vᵢ† (σy⊗σy) vⱼ*; σy⊗σy maps |ab⟩ to ±|āb̄⟩.
    let flip = |x: &[C64; 4]| -> [C64; 4] { [-x[3].conj(), x[2].conj(), x[1].conj(), -x[0].conj()] };
    let mut tau = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let f = flip(&v[j]);
            tau[i][j] = (0..4).map(|k| v[i][k].conj() * f[k]).sum();
        }
    }
    // Symmetrize away roundoff.
    for i in 0..4 {
        for j in (i + 1)..4 {
            let s = (tau[i][j] + tau[j][i]) * 0.5;
            tau[i][j] = s;
            tau[j][i] = s;
        }
    }
    let (u, l) = takagi4(&tau)?;
    // xᵢ = Σⱼ Uⱼᵢ vⱼ satisfies ⟨xᵢ|x̃ⱼ⟩ = λᵢ δᵢⱼ.
    let x: [[C64; 4]; 4] = [0, 1, 2, 3].map(|i| {
        let mut out = [C64::new(0.0, 0.0); 4];
        for j in 0..4 {
            for k in 0..4 {
                out[k] += u[j][i] * v[j][k];
            }
        }
        out
    });
    // Phases with λ₁ + λ₂e^{iA} + (λ₃+λ₄)e^{iB} = 0.
    let (l1, l2) = (l[0], l[1]);
    let big_l = l[2] + l[3];
    let cos_a = if l1 * l2 > 0.0 {
        ((big_l * big_l - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)).clamp(-1.0, 1.0)
    } else {
        -1.0
    };
    let a = cos_a.acos();
    let b = if big_l > 0.0 {
        let z = -(C64::new(l1, 0.0) + C64::from_polar(l2, a)) / big_l;
        z.arg()
    } else {
        0.0
    };
    let phase = [
        C64::new(1.0, 0.0),
        C64::from_polar(1.0, a / 2.0),
        C64::from_polar(1.0, b / 2.0),
        C64::from_polar(1.0, b / 2.0),
    ];
    let signs = [[1.0, 1.0, 1.0, 1.0], [1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0], [1.0, -1.0, -1.0, 1.0]];
    let mut terms = Vec::with_capacity(4);
    for s in signs {
        let mut z = [C64::new(0.0, 0.0); 4];
        for j in 0..4 {
            for k in 0..4 {
                z[k] += x[j][k] * phase[j] * (0.5 * s[j]);
            }
        }
        let (weight, first, second) = factor_product(&z);
        terms.push(ProductTerm {
            weight,
            first,
            second,
        });
    }
    Ok(terms)
}

/// Closest point in the PPT cone by spectral clipping of the partial
/// transpose, mixed with `I/4` until positive.
fn ppt_projection(rho: &DensityMatrix) -> DensityMatrix {
    let pt = rho.matrix().partial_transpose(Subsystem::Second);
    let eig = match hermitian_eig(&pt) {
        Ok(e) => e,
        Err(_) => return DensityMatrix::maximally_mixed(),
    };
    let clipped = eig.map_values(|v| v.max(0.0));
    let tr = clipped.trace().re;
    if tr <= 0.0 {
        return DensityMatrix::maximally_mixed();
    }
    let back = clipped.scale(1.0 / tr).partial_transpose(Subsystem::Second).hermitian_part();
    let min = match hermitian_eig(&back) {
        Ok(e) => e.values[0],
        Err(_) => return DensityMatrix::maximally_mixed(),
    };
    // (1-t) back + t I/4 ≥ 0 needs t ≥ -min / (1/4 - min).
    let t = if min < 0.0 { (-min / (0.25 - min) * (1.0 + 1e-9)).min(1.0) } else { 0.0 };
    let m = back.scale(1.0 - t) + ComplexMatrix4::identity().scale(t / 4.0);
    DensityMatrix::new(m).unwrap_or_else(|_| DensityMatrix::maximally_mixed())
}

/// Seed point reproducing the PPT projection of `rho` in four slots, with the
/// remaining slots holding random products at small weight.
fn ppt_seed<R: Rng>(rho: &DensityMatrix, rng: &mut R) -> CaratheodoryPoint {
    let sigma = ppt_projection(rho);
    let terms = match separable_decomposition(&sigma, 1e-6) {
        Ok(t) => t,
        Err(_) => return CaratheodoryPoint::maximally_mixed(),
    };
    let filler = CaratheodoryPoint::random(rng);
    let mut products = filler.products();
    let mut weights = [PAD_WEIGHT; TERMS];
    for (k, t) in terms.iter().enumerate() {
        let slot = TERMS - 4 + k;
        weights[slot] = t.weight;
        products[slot] = (t.first, t.second);
    }
    CaratheodoryPoint::from_weights_and_products(&weights, &products)
}

const PAD_WEIGHT: f64 = 1e-4;

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReeSolverConfig {
    pub restarts: usize,
    /// Objective evaluations allowed per restart.
    pub max_evaluations: usize,
    /// Spread of simplex values that counts as converged.
    pub simplex_tolerance: f64,
    /// Initial simplex edge, in radians.
    pub initial_step: f64,
    pub seed: u64,
}

impl Default for ReeSolverConfig {
    fn default() -> Self {
        ReeSolverConfig {
            restarts: 8,
            max_evaluations: 40_000,
            simplex_tolerance: 1e-10,
            initial_step: 0.2,
            seed: 0x5eed,
        }
    }
}

impl ReeSolverConfig {
    pub fn validate(&self) -> Result<(), ReeError> {
        if self.restarts < 1 {
            return Err(ReeError::BadConfig("restarts must be at least 1".into()));
        }
        if self.max_evaluations < CaratheodoryPoint::PARAMETERS + 1 {
            return Err(ReeError::BadConfig(format!(
                "max_evaluations must be at least {}",
                CaratheodoryPoint::PARAMETERS + 1
            )));
        }
        if !(self.simplex_tolerance > 0.0 && self.simplex_tolerance.is_finite()) {
            return Err(ReeError::BadConfig("simplex_tolerance must be positive".into()));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(ReeError::BadConfig("initial_step must be positive".into()));
        }
        Ok(())
    }
}

/// How a restart was seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedKind {
    MaximallyMixed,
    PptProjection,
    Random,
}

impl SeedKind {
    pub fn name(self) -> &'static str {
        match self {
            SeedKind::MaximallyMixed => "maximally-mixed",
            SeedKind::PptProjection => "ppt-projection",
            SeedKind::Random => "random",
        }
    }
}

/// Per-restart outcome. `history` holds `(evaluations, best value)` each time
/// the incumbent improves by a visible amount.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartTrace {
    pub restart: usize,
    pub seed: SeedKind,
    pub evaluations: usize,
    pub best: f64,
    pub converged: bool,
    pub history: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CssCandidate {
    pub state: DensityMatrix,
    /// `S(ρ‖state)` in bits, evaluated with the strict support rule.
    pub value: f64,
    pub point: CaratheodoryPoint,
    pub converged: bool,
    pub evaluations: usize,
    pub restart: usize,
    pub trace: Vec<RestartTrace>,
}

impl CssCandidate {
    /// Turns an unconverged result into [`ReeError::BudgetExhausted`].
    pub fn require_converged(self) -> Result<CssCandidate, ReeError> {
        if self.converged {
            Ok(self)
        } else {
            Err(ReeError::BudgetExhausted { best: self.value })
        }
    }
}

fn seed_for_restart(rho: &DensityMatrix, cfg: &ReeSolverConfig, k: usize) -> (SeedKind, CaratheodoryPoint) {
    let mut g = index_stream(cfg.seed, k as u64);
    match k {
        0 => (SeedKind::MaximallyMixed, CaratheodoryPoint::maximally_mixed()),
        1 => (SeedKind::PptProjection, ppt_seed(rho, g.rng())),
        _ => (SeedKind::Random, CaratheodoryPoint::random(g.rng())),
    }
}

fn run_restart(rho: &DensityMatrix, rho_lg_rho: f64, cfg: &ReeSolverConfig, k: usize) -> (RestartTrace, CaratheodoryPoint) {
    let (seed, start) = seed_for_restart(rho, cfg, k);
    let m = *rho.matrix();
    let mut evals = 0usize;
    let mut best = f64::INFINITY;
    let mut history = Vec::new();
    let objective = |x: &[f64]| {
        let p = CaratheodoryPoint::from_flat(x);
        let v = smoothed_relative_entropy(&m, rho_lg_rho, &assemble_matrix(&p));
        evals += 1;
        if v < best - 1e-6 * best.abs().max(1e-3) || (best.is_infinite() && v.is_finite()) {
            best = v;
            history.push((evals, v));
        }
        v
    };
    let opts = SimplexOptions {
        max_evaluations: cfg.max_evaluations,
        f_tolerance: cfg.simplex_tolerance,
        initial_step: cfg.initial_step,
        ..SimplexOptions::default()
    };
    let r = simplex::minimize(objective, &start.to_flat(), &opts);
    let point = CaratheodoryPoint::from_flat(&r.x);
    if history.last().map(|h| h.1) != Some(r.f) {
        history.push((r.evaluations, r.f));
    }
    (
        RestartTrace {
            restart: k,
            seed,
            evaluations: r.evaluations,
            best: r.f,
            converged: r.converged,
            history,
        },
        point,
    )
}

/// Numerical REE: independent Nelder–Mead restarts over the 79-parameter
/// product mixture, merged by minimum value with the lowest restart index
/// winning ties. An unconverged winner is returned with `converged = false`.
pub fn ree_numeric(rho: &DensityMatrix, cfg: &ReeSolverConfig) -> Result<CssCandidate, ReeError> {
    cfg.validate()?;
    let rho_lg_rho = neg_entropy(rho);
    let runs: Vec<(RestartTrace, CaratheodoryPoint)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| run_restart(rho, rho_lg_rho, cfg, k))
        .collect();
    let mut best: Option<(usize, f64, DensityMatrix)> = None;
    for (i, (_, point)) in runs.iter().enumerate() {
        let state = caratheodory_assemble(point);
        let v = relative_entropy_given(rho, rho_lg_rho, &state);
        if best.as_ref().is_none_or(|b| v < b.1) {
            best = Some((i, v, state));
        }
    }
    let (winner, value, state) = best.expect("at least one restart");
    let evaluations = runs.iter().map(|r| r.0.evaluations).sum();
    let converged = runs[winner].0.converged;
    let point = runs[winner].1.clone();
    Ok(CssCandidate {
        state,
        value,
        point,
        converged,
        evaluations,
        restart: winner,
        trace: runs.into_iter().map(|r| r.0).collect(),
    })
}

/// Per-restart solver trace as CSV rows `restart,seed,evaluations,best`.
pub fn write_trace_csv<W: Write>(out: &mut W, trace: &[RestartTrace]) -> std::io::Result<()> {
    writeln!(out, "restart,seed,evaluations,best")?;
    for t in trace {
        for (e, v) in &t.history {
            writeln!(out, "{},{},{},{:.12e}", t.restart, t.seed.name(), e, v)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

fn check_unit(name: &'static str, v: f64) -> Result<(), ReeError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(ReeError::OutOfRange { name, value: v })
    }
}

/// For pure states the REE equals the entropy of entanglement, `W(C)`.
pub fn ree_pure(psi: &PureState) -> f64 {
    let c = (2.0 * psi.determinant_modulus()).min(1.0);
    formation_from_concurrence(c)
}

/// `2h(1 - p/2) - h(p) - p`.
pub fn ree_horodecki(p: f64) -> Result<f64, ReeError> {
    check_unit("p", p)?;
    Ok((2.0 * binary_entropy(1.0 - p / 2.0) - binary_entropy(p) - p).max(0.0))
}

/// REE of the `(p, N)` family built from a Horodecki state mixed with its own
/// closest separable state.
pub fn ree_hprime(p: f64, n: f64) -> Result<f64, ReeError> {
    let x = hprime_region(p, n)?;
    let q = p / 2.0;
    let y1 = 1.0 - q * x;
    let y2 = 1.0 - 2.0 * q + q * q * x;
    let t = |w: f64, num: f64, den: f64| if w == 0.0 || num <= 0.0 { 0.0 } else { w * (num / den).log2() };
    let v = q * q * lg_or_zero(x) + t(2.0 * q * y1, y1, 1.0 - q) + t(y2, y2, (1.0 - q) * (1.0 - q));
    Ok(v.max(0.0))
}

/// `1 - h(λ_max)` when the largest weight exceeds one half, else zero.
pub fn ree_bell_diagonal(spec: &BellDiagonalSpectrum) -> f64 {
    let m = spec.max();
    if m > 0.5 {
        (1.0 - binary_entropy(m)).max(0.0)
    } else {
        0.0
    }
}

/// REE of `(1-x)|ψₐ⟩⟨ψₐ| + x σₐ`, whose closest separable state is `σₐ`.
pub fn ree_pure_css(a: f64, x: f64) -> Result<f64, ReeError> {
    let rho = crate::states::pure_css_mixture(a, x)?;
    Ok(relative_entropy(&rho, &schmidt_dephased(a)?))
}

/// Negativity where the Horodecki REE curve crosses the pure-state curve,
/// with the common value.
pub fn ree_crossing() -> Result<(f64, f64), ReeError> {
    let gap = |n: f64| -> Result<f64, ReeError> {
        Ok(ree_horodecki(horodecki_p_for_negativity(n))? - formation_from_concurrence(n))
    };
    let (mut lo, mut hi) = (0.01, 0.99);
    let (g_lo, g_hi) = (gap(lo)?, gap(hi)?);
    if g_lo.signum() == g_hi.signum() {
        return Err(ReeError::NoRoot);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)?.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let n = 0.5 * (lo + hi);
    Ok((n, formation_from_concurrence(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::min_partial_transpose_eigenvalue;
    use crate::states::{bell_state, horodecki, horodecki_css, hprime, tilde_psi};

    fn quick() -> ReeSolverConfig {
        ReeSolverConfig {
            restarts: 3,
            max_evaluations: 20_000,
            ..ReeSolverConfig::default()
        }
    }

    #[test]
    fn relative_entropy_basics() {
        let rho = horodecki(0.4).unwrap();
        assert!(relative_entropy(&rho, &rho).abs() < 1e-12);
        let v = relative_entropy(&DensityMatrix::basis_projector(0), &DensityMatrix::maximally_mixed());
        assert!((v - 2.0).abs() < 1e-12);
        let inf = relative_entropy(&DensityMatrix::basis_projector(0), &DensityMatrix::basis_projector(3));
        assert!(inf.is_infinite());
    }

    #[test]
    fn horodecki_css_gives_closed_form() {
        for p in [0.3, 0.6, 0.9] {
            let direct = relative_entropy(&horodecki(p).unwrap(), &horodecki_css(p).unwrap());
            let oracle = 2.0 * binary_entropy(1.0 - p / 2.0) - binary_entropy(p) - p;
            assert!((direct - oracle).abs() < 1e-10, "p={p}: {direct} vs {oracle}");
        }
    }

    #[test]
    fn weights_telescope() {
        let mut g = index_stream(3, 0);
        for _ in 0..50 {
            let p = CaratheodoryPoint::random(g.rng());
            let s: f64 = p.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!((caratheodory_assemble(&p).matrix().trace().re - 1.0).abs() < 1e-12);
        }
        let p = CaratheodoryPoint {
            angles: [[0.0; 4]; TERMS],
            mixing: [0.0; TERMS - 1],
        };
        let w = p.weights();
        assert!((w[0] - 1.0).abs() < 1e-15);
        assert!(w[1..].iter().all(|&x| x.abs() < 1e-30));
    }

    #[test]
    fn inverse_weight_map_round_trips() {
        let mut g = index_stream(4, 0);
        for _ in 0..20 {
            let p = CaratheodoryPoint::random(g.rng());
            let q = CaratheodoryPoint::from_weights_and_products(&p.weights(), &p.products());
            let (a, b) = (p.weights(), q.weights());
            for k in 0..TERMS {
                assert!((a[k] - b[k]).abs() < 1e-12);
            }
            assert!(caratheodory_assemble(&p).matrix().max_abs_diff(caratheodory_assemble(&q).matrix()) < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_point() {
        let s = caratheodory_assemble(&CaratheodoryPoint::maximally_mixed());
        assert!(s.matrix().max_abs_diff(DensityMatrix::maximally_mixed().matrix()) < 1e-12);
    }

    #[test]
    fn diagonal_classical_mixture() {
        let z = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let o = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let mut products = [(z, z); TERMS];
        products[1] = (o, o);
        let mut w = [0.0; TERMS];
        w[0] = 0.5;
        w[1] = 0.5;
        let s = caratheodory_assemble(&CaratheodoryPoint::from_weights_and_products(&w, &products));
        let expected = ComplexMatrix4::from_real_diag([0.5, 0.0, 0.0, 0.5]);
        assert!(s.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn assembled_states_are_ppt() {
        let mut g = index_stream(5, 0);
        for _ in 0..100 {
            let s = caratheodory_assemble(&CaratheodoryPoint::random(g.rng()));
            assert!(min_partial_transpose_eigenvalue(&s).unwrap() > -1e-12);
        }
    }

    #[test]
    fn decomposition_reproduces_separable_states() {
        let mut g = index_stream(6, 0);
        let mut cases = vec![
            DensityMatrix::maximally_mixed(),
            horodecki_css(0.7).unwrap(),
            DensityMatrix::basis_projector(2),
            crate::states::werner(1, 1.0 / 3.0).unwrap(),
        ];
        for _ in 0..30 {
            cases.push(caratheodory_assemble(&CaratheodoryPoint::random(g.rng())));
        }
        for s in cases {
            let terms = separable_decomposition(&s, 1e-9).unwrap();
            let mut m = ComplexMatrix4::zeros();
            for t in &terms {
                let v = kron_vec(&t.first, &t.second);
                m = m + ComplexMatrix4::outer(&v).scale(t.weight);
            }
            assert!(m.max_abs_diff(s.matrix()) < 1e-8, "{:?}", s);
        }
        assert!(separable_decomposition(&bell_state(1).unwrap().density(), 1e-9).is_err());
    }

    #[test]
    fn ppt_projection_is_separable() {
        for p in [0.2, 0.7, 1.0] {
            let s = ppt_projection(&horodecki(p).unwrap());
            assert!(min_partial_transpose_eigenvalue(&s).unwrap() > -1e-9);
        }
    }

    #[test]
    fn closed_forms() {
        assert!((ree_horodecki(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(ree_horodecki(0.0).unwrap(), 0.0);
        assert!(ree_horodecki(1.2).is_err());
        let p = horodecki_p_for_negativity(0.2);
        assert!((ree_horodecki(p).unwrap() - 0.1185).abs() < 5e-4);
        assert!((ree_hprime(p, 0.2).unwrap() - ree_horodecki(p).unwrap()).abs() < 1e-9);
        assert!((ree_hprime(1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((ree_pure(&tilde_psi(0.9).unwrap()) - 0.468996).abs() < 1e-6);
        assert!((ree_pure(&bell_state(1).unwrap()) - 1.0).abs() < 1e-12);
        assert_eq!(ree_pure(&PureState::new([C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]).unwrap()), 0.0);
    }

    #[test]
    fn hprime_closed_form_matches_direct_relative_entropy() {
        for (p, n) in [(0.8, 0.2), (0.6, 0.3), (0.95, 0.5), (1.0, 0.4)] {
            let rho = hprime(p, n).unwrap();
            let direct = relative_entropy(&rho, &horodecki_css(p).unwrap());
            assert!((direct - ree_hprime(p, n).unwrap()).abs() < 1e-10, "({p},{n})");
        }
    }

    #[test]
    fn crossing_point() {
        let (n, e) = ree_crossing().unwrap();
        assert!((n - 0.3770).abs() < 5e-4 && (e - 0.2279).abs() < 5e-4, "{n} {e}");
        let above = ree_horodecki(horodecki_p_for_negativity(0.2)).unwrap();
        assert!(above > formation_from_concurrence(0.2));
        let below = ree_horodecki(horodecki_p_for_negativity(0.6)).unwrap();
        assert!(below < formation_from_concurrence(0.6));
    }

    #[test]
    fn numeric_matches_pure_and_horodecki() {
        let psi = tilde_psi(0.9).unwrap();
        let r = ree_numeric(&psi.density(), &quick()).unwrap();
        assert!((r.value - 0.468996).abs() < 1e-3, "{}", r.value);
        let r = ree_numeric(&horodecki(0.8).unwrap(), &quick()).unwrap();
        assert!((r.value - ree_horodecki(0.8).unwrap()).abs() < 1e-3, "{}", r.value);
        assert!((relative_entropy(&horodecki(0.8).unwrap(), &r.state) - r.value).abs() < 1e-12);
    }

    #[test]
    fn numeric_separable_is_zero() {
        let r = ree_numeric(&horodecki_css(0.5).unwrap(), &quick()).unwrap();
        assert!(r.value < 1e-4, "{}", r.value);
    }

    #[test]
    fn config_validation() {
        let mut c = ReeSolverConfig::default();
        c.restarts = 0;
        assert!(c.validate().is_err());
        let c = ReeSolverConfig {
            max_evaluations: 10,
            ..ReeSolverConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
