//! Experiment configuration: a flat key-value text file with dotted section
//! names (`graph.kind = chain`, `scan.betas = 0.2, 1.0`, ...).
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Command-line flags override file values. A fixed seed makes every
//! subcommand's CSV output byte-identical across runs.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hamiltonian::{
    fermionic_hopping_chain, standard_model, FermionicSystem, LocalHamiltonian, ModelKind,
    Statistics,
};
use crate::lattice::{growth_constant_bound, GrowthFamily, InteractionGraph, Vertex};

/// Parsed experiment configuration.
#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(ExperimentConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets or overrides a key (used for command-line flag overrides).
    pub fn set(&mut self, key: &str, value: String) {
        self.values.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::Config(format!("{key}: expected a number, got {s:?}"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::Config(format!("{key}: expected an integer, got {s:?}"))),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::Config(format!("{key}: expected an integer, got {s:?}"))),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(s) => Err(Error::Config(format!("{key}: expected a boolean, got {s:?}"))),
        }
    }

    /// Comma-separated list of numbers.
    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(s) => s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("{key}: bad number {t:?}")))
                })
                .collect(),
        }
    }

    pub fn usize_list_or(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(s) => s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("{key}: bad integer {t:?}")))
                })
                .collect(),
        }
    }

    pub fn vertex_set(&self, key: &str) -> Result<Option<BTreeSet<Vertex>>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => {
                let set: Result<BTreeSet<Vertex>> = s
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| Error::Config(format!("{key}: bad vertex {t:?}")))
                    })
                    .collect();
                Ok(Some(set?))
            }
        }
    }

    /// Builds the interaction graph from the `graph.*` keys
    /// (kind = chain | square, with n / rows, cols and periodic).
    pub fn build_graph(&self) -> Result<InteractionGraph> {
        match self.str_or("graph.kind", "chain") {
            "chain" => {
                let n = self.usize_or("graph.n", 8)?;
                InteractionGraph::chain(n, self.bool_or("graph.periodic", false)?)
            }
            "square" => {
                let rows = self.usize_or("graph.rows", 3)?;
                let cols = self.usize_or("graph.cols", 3)?;
                InteractionGraph::square_lattice(rows, cols, self.bool_or("graph.periodic", false)?)
            }
            other => Err(Error::Config(format!("graph.kind: unknown kind {other:?}"))),
        }
    }

    /// Builds the spin model from `model.*` keys over the configured graph.
    /// The sign convention writes Hamiltonians with +coupling; the bounds
    /// depend only on the operator norm of the terms.
    pub fn build_spin_model(&self) -> Result<LocalHamiltonian> {
        let g = self.build_graph()?;
        let kind: ModelKind = self.str_or("model.kind", "ising").parse()?;
        let coupling = self.f64_or("model.coupling", 1.0)?;
        let field = self.f64_or("model.field", 0.0)?;
        standard_model(kind, &g, coupling, field)
    }

    /// Builds the fermionic chain from `fermion.*` keys.
    pub fn build_fermionic_model(&self) -> Result<(FermionicSystem, LocalHamiltonian)> {
        let modes = self.usize_or("fermion.modes", 4)?;
        let sys = FermionicSystem::new(modes)?;
        let t = self.f64_or("fermion.hopping", 1.0)?;
        let u = self.f64_or("fermion.interaction", 0.5)?;
        let h = fermionic_hopping_chain(&sys, t, u)?;
        Ok((sys, h))
    }

    /// Spin or fermionic system selection (`system.statistics`).
    pub fn statistics(&self) -> Result<Statistics> {
        match self.str_or("system.statistics", "spin") {
            "spin" => Ok(Statistics::Spin),
            "fermion" | "fermionic" => Ok(Statistics::Fermionic),
            other => Err(Error::Config(format!(
                "system.statistics: expected spin or fermion, got {other:?}"
            ))),
        }
    }

    /// Growth-constant bound from `alpha.*` keys
    /// (family = cubic | spread_out | explicit).
    pub fn build_alpha(&self) -> Result<f64> {
        let family = match self.str_or("alpha.family", "cubic") {
            "cubic" => GrowthFamily::Cubic {
                dimension: self.usize_or("alpha.dimension", 1)? as u32,
            },
            "spread_out" => GrowthFamily::SpreadOut {
                dimension: self.usize_or("alpha.dimension", 1)? as u32,
                range: self.usize_or("alpha.range", 1)? as u32,
            },
            "explicit" => GrowthFamily::Explicit {
                alpha: self.f64_or("alpha.value", 2.0 * std::f64::consts::E)?,
            },
            other => return Err(Error::Config(format!("alpha.family: unknown {other:?}"))),
        };
        growth_constant_bound(family)
    }

    /// Beta grid: either `scan.betas` (explicit list) or
    /// `scan.beta_star_fractions` (multiples of the critical beta for the
    /// configured alpha and J).
    pub fn beta_grid(&self, j: f64, default: &[f64]) -> Result<Vec<f64>> {
        let grid = if let Some(s) = self.get("scan.beta_star_fractions") {
            let alpha = self.build_alpha()?;
            let bs = crate::bounds::beta_star(alpha, j)?;
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map(|f| f * bs)
                        .map_err(|_| Error::Config(format!("scan.beta_star_fractions: bad {t:?}")))
                })
                .collect::<Result<Vec<f64>>>()?
        } else {
            self.f64_list_or("scan.betas", default)?
        };
        if grid.iter().any(|b| !b.is_finite()) {
            return Err(Error::Config("beta grid must be finite".into()));
        }
        Ok(grid)
    }
}
