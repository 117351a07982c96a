//! Zero-temperature photon loss on both qubits.
//!
//! Each qubit passes through the amplitude-damping channel with Kraus pair
//! `{diag(1, √η), √(1-η)|0⟩⟨1|}` and `η = e^{-γt}`. The channel is applied in
//! closed form from the initial state at every grid point.

use std::io::Write;

use thiserror::Error;

use crate::linalg::{kron, ComplexMatrix4, Mat2, C64};
use crate::measures::{all_measures, MeasureError, MeasureRecord};
use crate::ree::ReeSolverConfig;
use crate::states::{bell_state, werner, DensityMatrix, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecayError {
    #[error("{name} = {value} is outside its allowed range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("invalid time grid: {0}")]
    BadGrid(String),
    #[error("trajectories do not share gamma and time grid")]
    GridMismatch,
    #[error("initial state of trajectory {index} does not match the expected family")]
    InitialMismatch { index: usize },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Applies the damping channel with survival probability `eta` to both qubits.
pub fn amplitude_damping(rho: &DensityMatrix, eta: f64) -> Result<DensityMatrix, DecayError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(DecayError::OutOfRange {
            name: "eta",
            value: eta,
        });
    }
    let zero = C64::new(0.0, 0.0);
    let k0: Mat2 = [[C64::new(1.0, 0.0), zero], [zero, C64::new(eta.sqrt(), 0.0)]];
    let k1: Mat2 = [[zero, C64::new((1.0 - eta).sqrt(), 0.0)], [zero, zero]];
    let m = rho.matrix();
    let mut out = ComplexMatrix4::zeros();
    for a in [&k0, &k1] {
        for b in [&k0, &k1] {
            let k = kron(a, b);
            out = out + k * *m * k.adjoint();
        }
    }
    Ok(DensityMatrix::new(out.hermitian_part())?)
}

/// Where a trajectory starts.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Bell(usize),
    Werner { k: usize, p: f64 },
    Explicit(DensityMatrix),
}

impl InitialState {
    pub fn state(&self) -> Result<DensityMatrix, DecayError> {
        Ok(match self {
            InitialState::Bell(k) => bell_state(*k)?.density(),
            InitialState::Werner { k, p } => werner(*k, *p)?,
            InitialState::Explicit(rho) => *rho,
        })
    }

    pub fn label(&self) -> String {
        match self {
            InitialState::Bell(k) => format!("bell-{k}"),
            InitialState::Werner { k, p } => format!("werner-{k}-{p}"),
            InitialState::Explicit(_) => "explicit".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayConfig {
    pub gamma: f64,
    pub t_grid: Vec<f64>,
    pub initial: InitialState,
}

/// `points` equally spaced times on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.0];
    }
    (0..points)
        .map(|i| t_max * i as f64 / (points - 1) as f64)
        .collect()
}

impl DecayConfig {
    pub fn new(gamma: f64, t_grid: Vec<f64>, initial: InitialState) -> Result<Self, DecayError> {
        let cfg = DecayConfig {
            gamma,
            t_grid,
            initial,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), DecayError> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(DecayError::OutOfRange {
                name: "gamma",
                value: self.gamma,
            });
        }
        if self.t_grid.is_empty() {
            return Err(DecayError::BadGrid("empty".into()));
        }
        if !(self.t_grid[0] >= 0.0) || self.t_grid.iter().any(|t| !t.is_finite()) {
            return Err(DecayError::BadGrid("times must be finite and ≥ 0".into()));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DecayError::BadGrid("times must be strictly increasing".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub label: String,
    pub gamma: f64,
    pub times: Vec<f64>,
    pub gamma_t: Vec<f64>,
    pub eta: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub records: Vec<MeasureRecord>,
}

/// Measures along the decay of `cfg.initial`. The REE is included only when
/// a solver configuration is given (pure points are always analytic).
pub fn evolve(cfg: &DecayConfig, ree: Option<&ReeSolverConfig>) -> Result<Trajectory, DecayError> {
    cfg.validate()?;
    let rho0 = cfg.initial.state()?;
    let mut traj = Trajectory {
        label: cfg.initial.label(),
        gamma: cfg.gamma,
        times: cfg.t_grid.clone(),
        gamma_t: Vec::with_capacity(cfg.t_grid.len()),
        eta: Vec::with_capacity(cfg.t_grid.len()),
        states: Vec::with_capacity(cfg.t_grid.len()),
        records: Vec::with_capacity(cfg.t_grid.len()),
    };
    for &t in &cfg.t_grid {
        let gt = cfg.gamma * t;
        let eta = (-gt).exp();
        let rho = amplitude_damping(&rho0, eta)?;
        let rec = all_measures(&rho, ree)?;
        traj.gamma_t.push(gt);
        traj.eta.push(eta);
        traj.states.push(rho);
        traj.records.push(rec);
    }
    Ok(traj)
}

fn same_grid(trajs: &[Trajectory]) -> Result<(), DecayError> {
    let first = &trajs[0];
    if trajs
        .iter()
        .any(|t| t.gamma != first.gamma || t.times != first.times)
    {
        return Err(DecayError::GridMismatch);
    }
    Ok(())
}

/// One inequality chain checked over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub name: &'static str,
    /// Largest amount by which any link fails, zero if it always holds.
    pub max_violation: f64,
    pub violating_points: usize,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.violating_points == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    pub chains: [ChainReport; 3],
    /// For each of `C`, `N`, `B`: 1-based index of the trajectory with the
    /// smallest grid-averaged value, the one most fragile by that measure.
    pub most_fragile: [(&'static str, usize); 3],
}

impl OrderingReport {
    pub fn holds(&self) -> bool {
        self.chains.iter().all(ChainReport::holds)
    }
}

pub const ORDERING_SLACK: f64 = 1e-8;

/// Checks `N₂ ≥ N₃ ≥ N₁`, `B₁ = B₂ ≥ B₃` and `C₁ ≥ C₃ ≥ C₂` at every grid
/// point, taking the trajectories as `k = 1, 2, 3` in the given order.
pub fn check_mes_ordering(trajs: &[Trajectory; 3]) -> Result<OrderingReport, DecayError> {
    same_grid(trajs)?;
    let points = trajs[0].times.len();
    let get = |k: usize, i: usize, f: fn(&MeasureRecord) -> f64| f(&trajs[k].records[i]);
    let c = |r: &MeasureRecord| r.concurrence;
    let n = |r: &MeasureRecord| r.negativity;
    let b = |r: &MeasureRecord| r.nonlocality;

    let mut chains = [
        ChainReport { name: "N2>=N3>=N1", max_violation: 0.0, violating_points: 0 },
        ChainReport { name: "B1=B2>=B3", max_violation: 0.0, violating_points: 0 },
        ChainReport { name: "C1>=C3>=C2", max_violation: 0.0, violating_points: 0 },
    ];
    for i in 0..points {
        let gaps = [
            (get(2, i, n) - get(1, i, n)).max(get(0, i, n) - get(2, i, n)),
            (get(0, i, b) - get(1, i, b)).abs().max(get(2, i, b) - get(1, i, b)),
            (get(1, i, c) - get(2, i, c)).max(get(2, i, c) - get(0, i, c)),
        ];
        for (chain, gap) in chains.iter_mut().zip(gaps) {
            if gap > ORDERING_SLACK {
                chain.violating_points += 1;
            }
            chain.max_violation = chain.max_violation.max(gap.max(0.0));
        }
    }
    let fragile = |f: fn(&MeasureRecord) -> f64| -> usize {
        let mean = |k: usize| (0..points).map(|i| get(k, i, f)).sum::<f64>() / points as f64;
        let mut best = 0;
        for k in 1..3 {
            if mean(k) < mean(best) - ORDERING_SLACK {
                best = k;
            }
        }
        best + 1
    };
    Ok(OrderingReport {
        chains,
        most_fragile: [("C", fragile(c)), ("N", fragile(n)), ("B", fragile(b))],
    })
}

/// A sign change of `N_j - N_k` between consecutive grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub j: usize,
    pub k: usize,
    /// Grid index after the change.
    pub index: usize,
    pub gamma_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WernerReport {
    pub p: f64,
    pub gamma_t: Vec<f64>,
    /// `ΔN_k = N_k - N_1` for `k = 1, 2, 3` at every grid point.
    pub delta_n: Vec<[f64; 3]>,
    /// Largest pairwise negativity gap at the first grid point.
    pub initial_spread: f64,
    pub crossings: Vec<Crossing>,
}

/// Differences below this are treated as zero when looking for sign changes.
const SIGN_FLOOR: f64 = 1e-12;

/// Tracks how the negativities of the three Werner trajectories cross.
pub fn werner_robustness(trajs: &[Trajectory; 3], p: f64) -> Result<WernerReport, DecayError> {
    same_grid(trajs)?;
    for (idx, t) in trajs.iter().enumerate() {
        let expected = werner(idx + 1, p)?;
        let eta0 = t.eta[0];
        let start = amplitude_damping(&expected, eta0)?;
        if start.matrix().max_abs_diff(t.states[0].matrix()) > 1e-9 {
            return Err(DecayError::InitialMismatch { index: idx + 1 });
        }
    }
    let points = trajs[0].times.len();
    let n = |k: usize, i: usize| trajs[k].records[i].negativity;
    let delta_n: Vec<[f64; 3]> = (0..points)
        .map(|i| [0.0, n(1, i) - n(0, i), n(2, i) - n(0, i)])
        .collect();
    let initial_spread = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(j, k)| (n(j, 0) - n(k, 0)).abs())
        .fold(0.0, f64::max);
    let mut crossings = Vec::new();
    for (j, k) in [(0, 1), (0, 2), (1, 2)] {
        let mut last_sign = 0.0f64;
        for i in 0..points {
            if trajs[0].gamma_t[i] <= 0.0 {
                continue;
            }
            let d = n(j, i) - n(k, i);
            if d.abs() <= SIGN_FLOOR {
                continue;
            }
            let s = d.signum();
            if last_sign != 0.0 && s != last_sign {
                crossings.push(Crossing {
                    j: j + 1,
                    k: k + 1,
                    index: i,
                    gamma_t: trajs[0].gamma_t[i],
                });
            }
            last_sign = s;
        }
    }
    Ok(WernerReport {
        p,
        gamma_t: trajs[0].gamma_t.clone(),
        delta_n,
        initial_spread,
        crossings,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12}")).unwrap_or_default()
}

/// Rows `t,gamma_t,eta,C,N,E_PPT,B,E_R,label`; empty `E_R` when absent.
pub fn write_trajectory_csv<W: Write>(out: &mut W, trajs: &[Trajectory]) -> std::io::Result<()> {
    writeln!(out, "t,gamma_t,eta,C,N,E_PPT,B,E_R,label")?;
    for tr in trajs {
        for i in 0..tr.times.len() {
            let r = &tr.records[i];
            writeln!(
                out,
                "{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{},{}",
                tr.times[i],
                tr.gamma_t[i],
                tr.eta[i],
                r.concurrence,
                r.negativity,
                r.ppt_cost,
                r.nonlocality,
                opt(r.ree),
                tr.label
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::negativity;
    use crate::states::{haar_unitary2, horodecki, index_stream, induced_state};

    fn mes(gamma: f64) -> [Trajectory; 3] {
        let grid = uniform_grid(3.0 / gamma, 61);
        [1, 2, 3].map(|k| {
            evolve(
                &DecayConfig::new(gamma, grid.clone(), InitialState::Bell(k)).unwrap(),
                None,
            )
            .unwrap()
        })
    }

    #[test]
    fn channel_endpoints() {
        let mut g = index_stream(9, 0);
        let rho = induced_state(&mut g, 3);
        assert!(amplitude_damping(&rho, 1.0).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-14);
        let vac = amplitude_damping(&rho, 0.0).unwrap();
        assert!(vac.matrix().max_abs_diff(DensityMatrix::basis_projector(0).matrix()) < 1e-14);
        assert!(amplitude_damping(&rho, 1.5).is_err());
    }

    #[test]
    fn singlet_decays_into_horodecki() {
        let singlet = bell_state(1).unwrap().density();
        for eta in [0.0, 0.13, 0.5, 0.77, 1.0] {
            let out = amplitude_damping(&singlet, eta).unwrap();
            assert!(out.matrix().max_abs_diff(horodecki(eta).unwrap().matrix()) < 1e-12);
        }
    }

    #[test]
    fn semigroup() {
        let mut g = index_stream(10, 0);
        for _ in 0..20 {
            let rho = induced_state(&mut g, 2)
                .local_rotate(&haar_unitary2(&mut g), &haar_unitary2(&mut g));
            let (a, b) = (g.uniform(), g.uniform());
            let two = amplitude_damping(&amplitude_damping(&rho, a).unwrap(), b).unwrap();
            let one = amplitude_damping(&rho, a * b).unwrap();
            assert!(two.matrix().max_abs_diff(one.matrix()) < 1e-12);
        }
    }

    #[test]
    fn singlet_negativity_follows_horodecki() {
        let tr = &mes(0.1)[0];
        for (i, &eta) in tr.eta.iter().enumerate() {
            let closed = (eta * eta + (1.0 - eta).powi(2)).sqrt() - (1.0 - eta);
            assert!((tr.records[i].negativity - closed).abs() < 1e-10);
        }
        let r0 = &tr.records[0];
        assert!((r0.concurrence - 1.0).abs() < 1e-12 && (r0.nonlocality - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mes_orderings_hold() {
        let trajs = mes(0.1);
        let report = check_mes_ordering(&trajs).unwrap();
        assert!(report.holds(), "{report:?}");
        assert_eq!(report.most_fragile, [("C", 2), ("N", 1), ("B", 3)]);
    }

    #[test]
    fn shuffled_labels_are_flagged() {
        let [a, b, c] = mes(0.1);
        let report = check_mes_ordering(&[b, c, a]).unwrap();
        assert!(!report.holds());
    }

    #[test]
    fn grid_mismatch() {
        let [a, b, _] = mes(0.1);
        let c = evolve(
            &DecayConfig::new(0.2, uniform_grid(15.0, 61), InitialState::Bell(3)).unwrap(),
            None,
        )
        .unwrap();
        assert_eq!(check_mes_ordering(&[a, b, c]), Err(DecayError::GridMismatch));
    }

    #[test]
    fn werner_decay() {
        let grid = uniform_grid(30.0, 61);
        let trajs = [1, 2, 3].map(|k| {
            evolve(
                &DecayConfig::new(0.1, grid.clone(), InitialState::Werner { k, p: 0.8 }).unwrap(),
                None,
            )
            .unwrap()
        });
        assert!((trajs[0].records[0].negativity - 0.7).abs() < 1e-12);
        assert!((trajs[0].records[0].concurrence - 0.7).abs() < 1e-12);
        let report = werner_robustness(&trajs, 0.8).unwrap();
        assert!(report.initial_spread < 1e-9);
        assert!(report.delta_n.iter().all(|d| d[0] == 0.0));
        assert!(!report.crossings.is_empty(), "{report:?}");
        assert!(werner_robustness(&trajs, 0.5).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(DecayConfig::new(0.0, vec![0.0], InitialState::Bell(1)).is_err());
        assert!(DecayConfig::new(0.1, vec![0.0, 0.0], InitialState::Bell(1)).is_err());
        assert!(DecayConfig::new(0.1, vec![-1.0], InitialState::Bell(1)).is_err());
        assert!(DecayConfig::new(0.1, vec![], InitialState::Bell(1)).is_err());
    }

    #[test]
    fn monotone_under_damping() {
        let mut g = index_stream(11, 0);
        for _ in 0..20 {
            let ancilla = 1 + (g.uniform() * 3.0) as usize;
            let rho = induced_state(&mut g, ancilla);
            let mut last = f64::INFINITY;
            for i in 0..=20 {
                let eta = 1.0 - i as f64 / 20.0;
                let nv = negativity(&amplitude_damping(&rho, eta).unwrap()).unwrap();
                assert!(nv <= last + 1e-9);
                last = nv;
            }
        }
    }
}
