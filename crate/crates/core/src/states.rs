//! Two-qubit states: validated density matrices, pure states, the named
//! families (Bell, Werner, Horodecki and relatives) and the seeded sampler
//! that feeds the Monte Carlo survey.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    hermitian_eig, kron, ComplexMatrix4, HermitianEigen, LinalgError, Mat2, NumericPolicy, C64,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("matrix is not Hermitian (max |ρ - ρ†| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("trace is {trace:.12}, expected 1")]
    BadTrace { trace: f64 },
    #[error("matrix has negative eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("amplitude vector has squared norm {norm_sqr:.15}, expected 1")]
    NotNormalized { norm_sqr: f64 },
    #[error("Bell-state index {0} outside 1..=3")]
    BadIndex(usize),
    #[error("{name} = {value} is outside its allowed range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("invalid Bell-diagonal spectrum: {0}")]
    BadSpectrum(String),
    #[error("invalid sampler configuration: {0}")]
    BadConfig(String),
    #[error("state JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn check_probability(name: &'static str, value: f64) -> Result<(), StateError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(StateError::OutOfRange { name, value })
    }
}

/// A validated two-qubit density matrix: Hermitian, unit trace, PSD.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix4);

impl DensityMatrix {
    /// Validates without repairing anything.
    pub fn new(m: ComplexMatrix4) -> Result<Self, StateError> {
        let tol = NumericPolicy::DEFAULT.structural;
        let deviation = m.hermiticity_defect();
        if deviation > tol {
            return Err(StateError::NotHermitian { deviation });
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
            return Err(StateError::BadTrace { trace: trace.re });
        }
        let eig = hermitian_eig(&m)?;
        if eig.values[0] < -tol {
            return Err(StateError::NotPositive {
                min_eigenvalue: eig.values[0],
            });
        }
        Ok(DensityMatrix(m))
    }

    /// Wraps a matrix known to be a state by construction (convex mixtures
    /// of projectors, channel outputs). Hermiticity is enforced exactly.
    pub(crate) fn from_trusted(m: ComplexMatrix4) -> Self {
        debug_assert!(Self::new(m).is_ok(), "untrusted matrix {m:?}");
        DensityMatrix(m.hermitian_part())
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(ComplexMatrix4::identity().scale(0.25))
    }

    /// `|b₁b₂⟩⟨b₁b₂|` for basis bits.
    pub fn basis_projector(index: usize) -> Self {
        let mut d = [0.0; 4];
        d[index] = 1.0;
        DensityMatrix(ComplexMatrix4::from_real_diag(d))
    }

    pub fn matrix(&self) -> &ComplexMatrix4 {
        &self.0
    }

    pub fn eigen(&self) -> HermitianEigen {
        hermitian_eig(&self.0).expect("validated density matrix is Hermitian")
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0).re
    }

    /// `(1 - w) self + w other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> DensityMatrix {
        debug_assert!((0.0..=1.0).contains(&w));
        DensityMatrix::from_trusted(self.0.scale(1.0 - w) + other.0.scale(w))
    }

    /// `(U₁⊗U₂) ρ (U₁⊗U₂)†`.
    pub fn local_rotate(&self, u1: &Mat2, u2: &Mat2) -> DensityMatrix {
        let u = kron(u1, u2);
        DensityMatrix::from_trusted(self.0.conjugate_by(&u))
    }

    /// Serializes as `{"entries": [[re, im], ...]}` with 16 row-major pairs.
    pub fn to_json(&self) -> String {
        let doc = StateJson {
            entries: self.0 .0.iter().flatten().map(|z| [z.re, z.im]).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("state JSON serializes")
    }

    /// Parses the JSON exchange format and validates every invariant.
    pub fn from_json(text: &str) -> Result<Self, StateError> {
        let doc: StateJson =
            serde_json::from_str(text).map_err(|e| StateError::Json(e.to_string()))?;
        if doc.entries.len() != 16 {
            return Err(StateError::Json(format!(
                "expected 16 entries, found {}",
                doc.entries.len()
            )));
        }
        let mut m = ComplexMatrix4::zeros();
        for (k, [re, im]) in doc.entries.into_iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(StateError::Json(format!("entry {k} is not finite")));
            }
            m[(k / 4, k % 4)] = C64::new(re, im);
        }
        DensityMatrix::new(m)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    entries: Vec<[f64; 2]>,
}

/// Normalized amplitudes `(c₀₀, c₀₁, c₁₀, c₁₁)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState {
    amps: [C64; 4],
}

impl PureState {
    pub fn new(amps: [C64; 4]) -> Result<Self, StateError> {
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-12 {
            return Err(StateError::NotNormalized { norm_sqr });
        }
        Ok(PureState { amps })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalize(amps: [C64; 4]) -> Result<Self, StateError> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::NotNormalized { norm_sqr: norm * norm });
        }
        Ok(PureState {
            amps: amps.map(|z| z / norm),
        })
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.amps
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(ComplexMatrix4::outer(&self.amps))
    }

    /// `|c₀₀c₁₁ - c₀₁c₁₀|`, half the concurrence.
    pub fn determinant_modulus(&self) -> f64 {
        let [a, b, cc, d] = self.amps;
        (a * d - b * cc).norm()
    }
}

/// Weights of a Bell-diagonal state over the projectors onto
/// `Ψ₁ = (|01⟩-|10⟩)/√2, Ψ₂ = (|00⟩+|11⟩)/√2, (|00⟩-|11⟩)/√2, (|01⟩+|10⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalSpectrum {
    lambdas: [f64; 4],
}

impl BellDiagonalSpectrum {
    pub fn new(lambdas: [f64; 4]) -> Result<Self, StateError> {
        if lambdas.iter().any(|&l| !(l >= 0.0)) {
            return Err(StateError::BadSpectrum(format!(
                "negative or NaN weight in {lambdas:?}"
            )));
        }
        let sum: f64 = lambdas.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(StateError::BadSpectrum(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(BellDiagonalSpectrum { lambdas })
    }

    pub fn lambdas(&self) -> [f64; 4] {
        self.lambdas
    }

    pub fn max(&self) -> f64 {
        self.lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The four Bell vectors in the order used by [`bell_diagonal`].
pub fn bell_basis() -> [[C64; 4]; 4] {
    let h = FRAC_1_SQRT_2;
    [
        [c(0.0), c(h), c(-h), c(0.0)],
        [c(h), c(0.0), c(0.0), c(h)],
        [c(h), c(0.0), c(0.0), c(-h)],
        [c(0.0), c(h), c(h), c(0.0)],
    ]
}

/// The maximally entangled states `|Ψ₁⟩, |Ψ₂⟩, |Ψ₃⟩`.
pub fn bell_state(k: usize) -> Result<PureState, StateError> {
    let h = FRAC_1_SQRT_2;
    let amps = match k {
        1 => [c(0.0), c(h), c(-h), c(0.0)],
        2 => [c(h), c(0.0), c(0.0), c(h)],
        3 => [c(0.5), c(0.5), c(0.5), c(-0.5)],
        _ => return Err(StateError::BadIndex(k)),
    };
    Ok(PureState { amps })
}

/// `√p|01⟩ + √(1-p)|10⟩`.
pub fn tilde_psi(p: f64) -> Result<PureState, StateError> {
    check_probability("p", p)?;
    Ok(PureState {
        amps: [c(0.0), c(p.sqrt()), c((1.0 - p).sqrt()), c(0.0)],
    })
}

/// `√a|01⟩ - √(1-a)|10⟩`; the singlet at `a = 1/2`.
pub fn schmidt_singlet(a: f64) -> Result<PureState, StateError> {
    check_probability("a", a)?;
    Ok(PureState {
        amps: [c(0.0), c(a.sqrt()), c(-(1.0 - a).sqrt()), c(0.0)],
    })
}

/// Werner-type state `p|Ψₖ⟩⟨Ψₖ| + (1-p) I/4`.
pub fn werner(k: usize, p: f64) -> Result<DensityMatrix, StateError> {
    check_probability("p", p)?;
    let psi = bell_state(k)?;
    Ok(psi.density().mix(&DensityMatrix::maximally_mixed(), 1.0 - p))
}

/// Horodecki state `p|Ψ₁⟩⟨Ψ₁| + (1-p)|00⟩⟨00|`.
pub fn horodecki(p: f64) -> Result<DensityMatrix, StateError> {
    generalized_horodecki(p, 0.5)
}

/// `p|ψₐ⟩⟨ψₐ| + (1-p)|00⟩⟨00|` with `ψₐ` from [`schmidt_singlet`].
pub fn generalized_horodecki(p: f64, a: f64) -> Result<DensityMatrix, StateError> {
    check_probability("p", p)?;
    let psi = schmidt_singlet(a)?;
    Ok(psi.density().mix(&DensityMatrix::basis_projector(0), 1.0 - p))
}

/// Closed-form closest separable state of [`horodecki`]`(p)`, with `q = p/2`.
pub fn horodecki_css(p: f64) -> Result<DensityMatrix, StateError> {
    check_probability("p", p)?;
    let q = p / 2.0;
    let off = q * (1.0 - q);
    let mut m = ComplexMatrix4::zeros();
    m[(0, 0)] = c((1.0 - q) * (1.0 - q));
    m[(1, 1)] = c(off);
    m[(2, 2)] = c(off);
    m[(1, 2)] = c(-off);
    m[(2, 1)] = c(-off);
    m[(3, 3)] = c(q * q);
    Ok(DensityMatrix::from_trusted(m))
}

/// Smallest `p` compatible with negativity `n` in the Horodecki family.
pub fn horodecki_p_for_negativity(n: f64) -> f64 {
    (2.0 * n * (1.0 + n)).sqrt() - n
}

/// Weight of the closest separable state in [`hprime`].
pub fn hprime_weight(p: f64, n: f64) -> f64 {
    ((n + p).powi(2) - 2.0 * n * (1.0 + n)) / (p * p * (1.0 + n))
}

/// Validity region of the `(p, N)` family; returns the CSS weight `x`.
pub fn hprime_region(p: f64, n: f64) -> Result<f64, StateError> {
    check_probability("N", n)?;
    check_probability("p", p)?;
    let p_min = horodecki_p_for_negativity(n);
    if p < p_min - 1e-12 {
        return Err(StateError::OutOfRange { name: "p", value: p });
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let x = hprime_weight(p, n);
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(StateError::OutOfRange { name: "x", value: x });
    }
    Ok(x.clamp(0.0, 1.0))
}

/// `(1-x) ρ_H(p) + x ρ_css(p)`, whose negativity is exactly `n`.
pub fn hprime(p: f64, n: f64) -> Result<DensityMatrix, StateError> {
    let x = hprime_region(p, n)?;
    Ok(horodecki(p)?.mix(&horodecki_css(p)?, x))
}

/// Dephased Schmidt form `a|01⟩⟨01| + (1-a)|10⟩⟨10|`, the closest separable
/// state of [`schmidt_singlet`]`(a)`.
pub fn schmidt_dephased(a: f64) -> Result<DensityMatrix, StateError> {
    check_probability("a", a)?;
    Ok(DensityMatrix::from_trusted(ComplexMatrix4::from_real_diag([
        0.0,
        a,
        1.0 - a,
        0.0,
    ])))
}

/// `(1-x)|ψₐ⟩⟨ψₐ| + x σₐ`: a pure state mixed with its own closest
/// separable state, which therefore stays the closest separable state.
pub fn pure_css_mixture(a: f64, x: f64) -> Result<DensityMatrix, StateError> {
    check_probability("x", x)?;
    let psi = schmidt_singlet(a)?;
    Ok(psi.density().mix(&schmidt_dephased(a)?, x))
}

pub fn bell_diagonal(spec: &BellDiagonalSpectrum) -> DensityMatrix {
    let basis = bell_basis();
    let mut m = ComplexMatrix4::zeros();
    for (v, &l) in basis.iter().zip(spec.lambdas.iter()) {
        m = m + ComplexMatrix4::outer(v).scale(l);
    }
    DensityMatrix::from_trusted(m)
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Families a family-mix draw can come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Ginibre,
    HaarPure,
    Horodecki,
    Werner,
    Hprime,
    BellDiagonal,
    PureCss,
    GeneralizedHorodecki,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 8] = [
        FamilyKind::Ginibre,
        FamilyKind::HaarPure,
        FamilyKind::Horodecki,
        FamilyKind::Werner,
        FamilyKind::Hprime,
        FamilyKind::BellDiagonal,
        FamilyKind::PureCss,
        FamilyKind::GeneralizedHorodecki,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Ginibre => "ginibre",
            FamilyKind::HaarPure => "haar-pure",
            FamilyKind::Horodecki => "horodecki",
            FamilyKind::Werner => "werner",
            FamilyKind::Hprime => "hprime",
            FamilyKind::BellDiagonal => "bell-diagonal",
            FamilyKind::PureCss => "pure-css",
            FamilyKind::GeneralizedHorodecki => "gen-horodecki",
        }
    }
}

/// Relative quotas for family-mix sampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyQuotas {
    pub weights: Vec<(FamilyKind, f64)>,
}

impl Default for FamilyQuotas {
    fn default() -> Self {
        FamilyQuotas {
            weights: vec![
                (FamilyKind::Ginibre, 0.25),
                (FamilyKind::HaarPure, 0.10),
                (FamilyKind::Horodecki, 0.10),
                (FamilyKind::Werner, 0.05),
                (FamilyKind::Hprime, 0.20),
                (FamilyKind::BellDiagonal, 0.10),
                (FamilyKind::PureCss, 0.15),
                (FamilyKind::GeneralizedHorodecki, 0.05),
            ],
        }
    }
}

impl FamilyQuotas {
    fn validate(&self) -> Result<(), StateError> {
        if self.weights.iter().any(|(_, w)| !(*w >= 0.0) || !w.is_finite()) {
            return Err(StateError::BadConfig("quota weights must be finite and ≥ 0".into()));
        }
        if self.weights.iter().map(|(_, w)| w).sum::<f64>() <= 0.0 {
            return Err(StateError::BadConfig("quota weights sum to zero".into()));
        }
        Ok(())
    }

    fn pick(&self, u: f64) -> FamilyKind {
        let total: f64 = self.weights.iter().map(|(_, w)| w).sum();
        let mut acc = 0.0;
        for &(kind, w) in &self.weights {
            acc += w / total;
            if u < acc {
                return kind;
            }
        }
        self.weights
            .iter()
            .rev()
            .find(|(_, w)| *w > 0.0)
            .map(|(k, _)| *k)
            .expect("validated quotas")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SamplerMethod {
    /// Hilbert–Schmidt measure: `GG†/Tr(GG†)` with Gaussian 4×4 `G`.
    Ginibre,
    /// Induced measure with a `K`-dimensional ancilla (4×K Gaussian `G`).
    Induced { ancilla: usize },
    HaarPure,
    FamilyMix(FamilyQuotas),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub method: SamplerMethod,
    pub seed: u64,
    pub count: u64,
}

impl SamplerConfig {
    pub fn new(method: SamplerMethod, seed: u64, count: u64) -> Result<Self, StateError> {
        let cfg = SamplerConfig { method, seed, count };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        if self.count == 0 {
            return Err(StateError::BadConfig("count must be ≥ 1".into()));
        }
        match &self.method {
            SamplerMethod::Induced { ancilla } if !(1..=8).contains(ancilla) => Err(
                StateError::BadConfig(format!("induced ancilla dimension {ancilla} not in 1..=8")),
            ),
            SamplerMethod::FamilyMix(q) => q.validate(),
            _ => Ok(()),
        }
    }
}

/// Where a sampled state came from, with the parameters needed to evaluate
/// closed-form measures later.
#[derive(Clone, Debug, PartialEq)]
pub enum Origin {
    Ginibre,
    Induced { ancilla: usize },
    HaarPure(PureState),
    Horodecki { p: f64 },
    Werner { k: usize, p: f64 },
    Hprime { p: f64, n: f64 },
    BellDiagonal(BellDiagonalSpectrum),
    PureCss { a: f64, x: f64 },
    GeneralizedHorodecki { p: f64, a: f64 },
}

impl Origin {
    pub fn tag(&self) -> &'static str {
        match self {
            Origin::Ginibre => "ginibre",
            Origin::Induced { .. } => "induced",
            Origin::HaarPure(_) => "haar-pure",
            Origin::Horodecki { .. } => "horodecki",
            Origin::Werner { .. } => "werner",
            Origin::Hprime { .. } => "hprime",
            Origin::BellDiagonal(_) => "bell-diagonal",
            Origin::PureCss { .. } => "pure-css",
            Origin::GeneralizedHorodecki { .. } => "gen-horodecki",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub index: u64,
    pub state: DensityMatrix,
    pub origin: Origin,
}

/// Standard normal deviates by the Box–Muller transform.
pub struct Gaussian<R: Rng> {
    rng: R,
    spare: Option<f64>,
}

impl<R: Rng> Gaussian<R> {
    pub fn new(rng: R) -> Self {
        Gaussian { rng, spare: None }
    }

    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, co) = (2.0 * PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * co
    }

    /// Standard complex Gaussian: real and imaginary parts of variance 1/2.
    pub fn complex(&mut self) -> C64 {
        C64::new(self.next(), self.next()) * FRAC_1_SQRT_2
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn rng(&mut self) -> &mut R {
        &mut self.rng
    }
}

/// Independent random stream for one sample index.
pub fn index_stream(seed: u64, index: u64) -> Gaussian<ChaCha8Rng> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    Gaussian::new(rng)
}

/// `GG†/Tr(GG†)` for a 4×K complex Gaussian `G`.
pub fn induced_state<R: Rng>(g: &mut Gaussian<R>, ancilla: usize) -> DensityMatrix {
    loop {
        let cols: Vec<[C64; 4]> = (0..ancilla)
            .map(|_| [g.complex(), g.complex(), g.complex(), g.complex()])
            .collect();
        let mut m = ComplexMatrix4::zeros();
        for col in &cols {
            m = m + ComplexMatrix4::outer(col);
        }
        let tr = m.trace().re;
        if tr > 1e-300 {
            return DensityMatrix::from_trusted(m.scale(1.0 / tr));
        }
    }
}

pub fn haar_pure<R: Rng>(g: &mut Gaussian<R>) -> PureState {
    loop {
        let amps = [g.complex(), g.complex(), g.complex(), g.complex()];
        if let Ok(psi) = PureState::normalize(amps) {
            return psi;
        }
    }
}

/// Haar-random 2×2 unitary.
pub fn haar_unitary2<R: Rng>(g: &mut Gaussian<R>) -> Mat2 {
    let a = [g.complex(), g.complex()];
    let b0 = [g.complex(), g.complex()];
    let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
    let e1 = [a[0] / na, a[1] / na];
    let dot = e1[0].conj() * b0[0] + e1[1].conj() * b0[1];
    let b = [b0[0] - e1[0] * dot, b0[1] - e1[1] * dot];
    let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
    let e2 = [b[0] / nb, b[1] / nb];
    [[e1[0], e2[0]], [e1[1], e2[1]]]
}

fn uniform_simplex4<R: Rng>(g: &mut Gaussian<R>) -> [f64; 4] {
    let e = [0; 4].map(|_| -(1.0 - g.uniform()).ln());
    let s: f64 = e.iter().sum();
    let mut l = e.map(|x| x / s);
    // Absorb rounding so the spectrum sums to one.
    let rest: f64 = l[1..].iter().sum();
    l[0] = 1.0 - rest;
    l
}

fn draw_family<R: Rng>(kind: FamilyKind, g: &mut Gaussian<R>) -> (DensityMatrix, Origin) {
    match kind {
        FamilyKind::Ginibre => (induced_state(g, 4), Origin::Ginibre),
        FamilyKind::HaarPure => {
            let psi = haar_pure(g);
            (psi.density(), Origin::HaarPure(psi))
        }
        FamilyKind::Horodecki => {
            let p = g.uniform();
            (horodecki(p).expect("p in [0,1)"), Origin::Horodecki { p })
        }
        FamilyKind::Werner => {
            let k = 1 + (g.uniform() * 3.0) as usize;
            let p = g.uniform();
            (werner(k.min(3), p).expect("valid"), Origin::Werner { k: k.min(3), p })
        }
        FamilyKind::Hprime => {
            let n = g.uniform();
            let p_min = horodecki_p_for_negativity(n);
            let p = (p_min + g.uniform() * (1.0 - p_min)).clamp(p_min, 1.0);
            (hprime(p, n).expect("inside region"), Origin::Hprime { p, n })
        }
        FamilyKind::BellDiagonal => {
            let spec = BellDiagonalSpectrum::new(uniform_simplex4(g)).expect("simplex point");
            (bell_diagonal(&spec), Origin::BellDiagonal(spec))
        }
        FamilyKind::PureCss => {
            let a = g.uniform();
            let x = g.uniform();
            (pure_css_mixture(a, x).expect("valid"), Origin::PureCss { a, x })
        }
        FamilyKind::GeneralizedHorodecki => {
            let p = g.uniform();
            let a = g.uniform();
            (
                generalized_horodecki(p, a).expect("valid"),
                Origin::GeneralizedHorodecki { p, a },
            )
        }
    }
}

/// Draws the sample with the given index. Each index owns an independent
/// ChaCha stream, so any partition of the index range reproduces the same
/// states.
pub fn sample_at(cfg: &SamplerConfig, index: u64) -> Sample {
    let mut g = index_stream(cfg.seed, index);
    let (state, origin) = match &cfg.method {
        SamplerMethod::Ginibre => (induced_state(&mut g, 4), Origin::Ginibre),
        SamplerMethod::Induced { ancilla } => (
            induced_state(&mut g, *ancilla),
            Origin::Induced { ancilla: *ancilla },
        ),
        SamplerMethod::HaarPure => {
            let psi = haar_pure(&mut g);
            (psi.density(), Origin::HaarPure(psi))
        }
        SamplerMethod::FamilyMix(quotas) => {
            let kind = quotas.pick(g.uniform());
            draw_family(kind, &mut g)
        }
    };
    Sample {
        index,
        state,
        origin,
    }
}

pub fn sample_states(cfg: &SamplerConfig) -> impl Iterator<Item = Sample> + '_ {
    (0..cfg.count).map(move |i| sample_at(cfg, i))
}

/// Indices `≡ worker (mod workers)` of the full stream.
pub fn sample_partition(
    cfg: &SamplerConfig,
    worker: u64,
    workers: u64,
) -> impl Iterator<Item = Sample> + '_ {
    assert!(workers >= 1 && worker < workers);
    (worker..cfg.count)
        .step_by(workers as usize)
        .map(move |i| sample_at(cfg, i))
}
