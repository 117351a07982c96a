//! Where a state comes from: a JSON file or a named family.

use std::fs;
use std::path::Path;

use entm_core::ree::{ree_bell_diagonal, ree_horodecki, ree_hprime, ree_pure};
use entm_core::states::{
    bell_diagonal, bell_state, horodecki, hprime, tilde_psi, werner, BellDiagonalSpectrum,
    DensityMatrix,
};

/// A parsed state plus its closed-form REE when the family has one.
pub struct Resolved {
    pub label: String,
    pub state: DensityMatrix,
    pub analytic_ree: Option<f64>,
}

fn numbers(args: &[String], want: usize, usage: &str) -> Result<Vec<f64>, String> {
    if args.len() != want {
        return Err(format!("expected `{usage}`"));
    }
    args.iter()
        .map(|a| a.parse::<f64>().map_err(|_| format!("`{a}` is not a number (expected `{usage}`)")))
        .collect()
}

fn index(arg: &str) -> Result<usize, String> {
    arg.parse::<usize>()
        .map_err(|_| format!("`{arg}` is not a Bell index"))
}

pub fn from_family(words: &[String]) -> Result<Resolved, String> {
    let (name, rest) = words
        .split_first()
        .ok_or_else(|| "empty --family".to_string())?;
    let label = words.join(" ");
    let err = |e: entm_core::states::StateError| e.to_string();
    let (state, analytic_ree) = match name.as_str() {
        "bell" => {
            if rest.len() != 1 {
                return Err("expected `bell k`".into());
            }
            let psi = bell_state(index(&rest[0])?).map_err(err)?;
            (psi.density(), Some(ree_pure(&psi)))
        }
        "werner" => {
            if rest.len() != 2 {
                return Err("expected `werner k p`".into());
            }
            let k = index(&rest[0])?;
            let p = numbers(&rest[1..], 1, "werner k p")?[0];
            let rho = werner(k, p).map_err(err)?;
            let q = (1.0 - p) / 4.0;
            let spec = BellDiagonalSpectrum::new([p + q, q, q, q]).map_err(err)?;
            (rho, Some(ree_bell_diagonal(&spec)))
        }
        "horodecki" => {
            let p = numbers(rest, 1, "horodecki p")?[0];
            (horodecki(p).map_err(err)?, ree_horodecki(p).ok())
        }
        "hprime" => {
            let v = numbers(rest, 2, "hprime p N")?;
            (hprime(v[0], v[1]).map_err(err)?, ree_hprime(v[0], v[1]).ok())
        }
        "belldiag" => {
            let v = numbers(rest, 4, "belldiag l1 l2 l3 l4")?;
            let spec = BellDiagonalSpectrum::new([v[0], v[1], v[2], v[3]]).map_err(err)?;
            (bell_diagonal(&spec), Some(ree_bell_diagonal(&spec)))
        }
        "tildepsi" => {
            let p = numbers(rest, 1, "tildepsi p")?[0];
            let psi = tilde_psi(p).map_err(err)?;
            (psi.density(), Some(ree_pure(&psi)))
        }
        other => {
            return Err(format!(
                "unknown family `{other}` (bell, werner, horodecki, hprime, belldiag, tildepsi)"
            ))
        }
    };
    Ok(Resolved {
        label,
        state,
        analytic_ree,
    })
}

pub fn from_file(path: &Path) -> Result<Resolved, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let state = DensityMatrix::from_json(&text).map_err(|e| e.to_string())?;
    Ok(Resolved {
        label: path.display().to_string(),
        state,
        analytic_ree: None,
    })
}
