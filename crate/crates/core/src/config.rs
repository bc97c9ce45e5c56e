//! Pipeline configuration and its flat `key = value` file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{MsdeError, Result};
use crate::shift::ShiftParams;

/// Everything that determines a run. `Default` is the fixed universal
/// setting: k = 50, t_nbd = 70, eta = 0.33, T = 8, tau = 0.01, 256 PCA
/// components, lambda = 1e-4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsdeConfig {
    pub shift: ShiftParams,
    pub pca_dim: usize,
    pub lambda: f64,
    pub standardize: bool,
    /// Fit the density model on the train rows of the joint shift instead of
    /// the train-only shift.
    pub fit_on_joint: bool,
    pub seed: u64,
}

impl Default for MsdeConfig {
    fn default() -> Self {
        MsdeConfig {
            shift: ShiftParams::default(),
            pca_dim: 256,
            lambda: 1e-4,
            standardize: true,
            fit_on_joint: false,
            seed: 0,
        }
    }
}

/// Optional overrides, as read from a config file or the command line.
/// Keys are the kebab-case field names.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigOverrides {
    pub k: Option<usize>,
    pub eta: Option<f64>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub t_nbd: Option<usize>,
    pub k_umap: Option<usize>,
    pub static_graph: Option<bool>,
    pub pca_dim: Option<usize>,
    pub lambda: Option<f64>,
    pub standardize: Option<bool>,
    pub fit_on_joint: Option<bool>,
    pub seed: Option<u64>,
}

impl ConfigOverrides {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| MsdeError::Config(e.to_string().trim().to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| MsdeError::io(path, e))?;
        Self::parse(&text)
    }

    /// Values set in `other` win.
    pub fn merge(self, other: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            k: other.k.or(self.k),
            eta: other.eta.or(self.eta),
            max_iters: other.max_iters.or(self.max_iters),
            tol: other.tol.or(self.tol),
            t_nbd: other.t_nbd.or(self.t_nbd),
            k_umap: other.k_umap.or(self.k_umap),
            static_graph: other.static_graph.or(self.static_graph),
            pca_dim: other.pca_dim.or(self.pca_dim),
            lambda: other.lambda.or(self.lambda),
            standardize: other.standardize.or(self.standardize),
            fit_on_joint: other.fit_on_joint.or(self.fit_on_joint),
            seed: other.seed.or(self.seed),
        }
    }

    pub fn apply(&self, mut c: MsdeConfig) -> MsdeConfig {
        let s = &mut c.shift;
        s.k = self.k.unwrap_or(s.k);
        s.eta = self.eta.unwrap_or(s.eta);
        s.max_iters = self.max_iters.unwrap_or(s.max_iters);
        s.tol = self.tol.unwrap_or(s.tol);
        s.t_nbd = self.t_nbd.unwrap_or(s.t_nbd);
        s.k_umap = self.k_umap.unwrap_or(s.k_umap);
        s.static_graph = self.static_graph.unwrap_or(s.static_graph);
        c.pca_dim = self.pca_dim.unwrap_or(c.pca_dim);
        c.lambda = self.lambda.unwrap_or(c.lambda);
        c.standardize = self.standardize.unwrap_or(c.standardize);
        c.fit_on_joint = self.fit_on_joint.unwrap_or(c.fit_on_joint);
        c.seed = self.seed.unwrap_or(c.seed);
        c
    }
}

impl MsdeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shift.max_iters > 0 {
            self.shift.validate()?;
        }
        if self.pca_dim == 0 {
            return Err(MsdeError::Config("pca-dim must be at least 1".into()));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(MsdeError::Config(format!("lambda must be positive, got {}", self.lambda)));
        }
        Ok(())
    }

    /// Fully resolved values in the same `key = value` format the config
    /// file accepts, so the echo can be fed back in.
    pub fn to_config_text(&self) -> String {
        let s = &self.shift;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        kv("k", s.k.to_string());
        kv("eta", fmt_float(s.eta));
        kv("max-iters", s.max_iters.to_string());
        kv("tol", fmt_float(s.tol));
        kv("t-nbd", s.t_nbd.to_string());
        kv("k-umap", s.k_umap.to_string());
        kv("static-graph", s.static_graph.to_string());
        kv("pca-dim", self.pca_dim.to_string());
        kv("lambda", fmt_float(self.lambda));
        kv("standardize", self.standardize.to_string());
        kv("fit-on-joint", self.fit_on_joint.to_string());
        kv("seed", self.seed.to_string());
        out
    }
}

/// Round-trippable float that is also a valid TOML float literal.
fn fmt_float(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains(['.', 'e', 'E']) {
        s
    } else {
        format!("{s}.0")
    }
}
