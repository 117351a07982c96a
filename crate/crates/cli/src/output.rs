use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the canonical configuration string.
pub fn config_hash(config: &str) -> String {
    Sha256::digest(config.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub struct Meta {
    pub seed: Option<u64>,
    pub config: String,
}

impl Meta {
    pub fn new(seed: Option<u64>, config: String) -> Self {
        Meta { seed, config }
    }

    pub fn write_comments<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "#version: {VERSION}")?;
        match self.seed {
            Some(s) => writeln!(out, "#seed: {s}")?,
            None => writeln!(out, "#seed: none")?,
        }
        writeln!(out, "#config-hash: {}", config_hash(&self.config))
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::json!({
            "version": VERSION,
            "seed": self.seed,
            "config_hash": config_hash(&self.config),
        })
    }
}

/// Stdout or a file, buffered.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12}")).unwrap_or_default()
}
