use std::fs;
use std::path::{Path, PathBuf};

use loopstar::disk::{DiskAlgebra, DiskQuadrature, DiskSettings};
use loopstar::jets::{BumpProfile, JetConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::real_f64;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config file {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Acceptance tolerances; every field can be overridden from a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    #[serde(with = "real_f64")]
    pub moyal: f64,
    #[serde(with = "real_f64")]
    pub associativity: f64,
    #[serde(with = "real_f64")]
    pub boundary: f64,
    #[serde(with = "real_f64")]
    pub trace_property: f64,
    #[serde(with = "real_f64")]
    pub trace_defect: f64,
    #[serde(with = "real_f64")]
    pub profile_invariance: f64,
    #[serde(with = "real_f64")]
    pub quadrature_doubling: f64,
    #[serde(with = "real_f64")]
    pub truncation_stability: f64,
    #[serde(with = "real_f64")]
    pub integer: f64,
    #[serde(with = "real_f64")]
    pub winding_agreement: f64,
    #[serde(with = "real_f64")]
    pub laurent: f64,
    #[serde(with = "real_f64")]
    pub lie_cocycle: f64,
    #[serde(with = "real_f64")]
    pub jacobi: f64,
    #[serde(with = "real_f64")]
    pub group_cocycle: f64,
    #[serde(with = "real_f64")]
    pub unipotent: f64,
    #[serde(with = "real_f64")]
    pub multiplicativity: f64,
    #[serde(with = "real_f64")]
    pub path_independence: f64,
    #[serde(with = "real_f64")]
    pub fuzzy_relations: f64,
    #[serde(with = "real_f64")]
    pub casimir: f64,
    #[serde(with = "real_f64")]
    pub fuzzy_cocycle: f64,
    #[serde(with = "real_f64")]
    pub lundberg: f64,
    #[serde(with = "real_f64")]
    pub closed_form: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            moyal: 1e-12,
            associativity: 1e-9,
            boundary: 1e-10,
            trace_property: 1e-9,
            trace_defect: 1e-6,
            profile_invariance: 1e-6,
            quadrature_doubling: 1e-6,
            truncation_stability: 1e-9,
            integer: 1e-3,
            winding_agreement: 2e-3,
            laurent: 1e-9,
            lie_cocycle: 1e-6,
            jacobi: 1e-7,
            group_cocycle: 1e-3,
            unipotent: 1e-10,
            multiplicativity: 1e-6,
            path_independence: 1e-6,
            fuzzy_relations: 1e-13,
            casimir: 1e-12,
            fuzzy_cocycle: 1e-6,
            lundberg: 1e-10,
            closed_form: 1e-12,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 22] {
        [
            ("moyal", self.moyal),
            ("associativity", self.associativity),
            ("boundary", self.boundary),
            ("trace_property", self.trace_property),
            ("trace_defect", self.trace_defect),
            ("profile_invariance", self.profile_invariance),
            ("quadrature_doubling", self.quadrature_doubling),
            ("truncation_stability", self.truncation_stability),
            ("integer", self.integer),
            ("winding_agreement", self.winding_agreement),
            ("laurent", self.laurent),
            ("lie_cocycle", self.lie_cocycle),
            ("jacobi", self.jacobi),
            ("group_cocycle", self.group_cocycle),
            ("unipotent", self.unipotent),
            ("multiplicativity", self.multiplicativity),
            ("path_independence", self.path_independence),
            ("fuzzy_relations", self.fuzzy_relations),
            ("casimir", self.casimir),
            ("fuzzy_cocycle", self.fuzzy_cocycle),
            ("lundberg", self.lundberg),
            ("closed_form", self.closed_form),
        ]
    }
}

/// Resolved run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Truncation order K of ν-series.
    pub order_k: usize,
    /// Jet order cap.
    pub jet_order_max: usize,
    pub nr: usize,
    pub ntheta: usize,
    pub nt: usize,
    /// Inner radius s₀ of the bump profile.
    #[serde(with = "real_f64")]
    pub bump_inner: f64,
    pub seed: u64,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            order_k: 2,
            jet_order_max: JetConfig::default().max_order,
            nr: 48,
            ntheta: 64,
            nt: 64,
            bump_inner: BumpProfile::default().inner(),
            seed: 7,
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            out: None,
            tolerances: Tolerances::default(),
        }
    }
}

/// Values given on the command line; they override the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub nr: Option<usize>,
    pub ntheta: Option<usize>,
    pub nt: Option<usize>,
    pub order_k: Option<usize>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })
    }

    /// Defaults, then the optional file, then the overrides.
    pub fn resolve(file: Option<&Path>, o: &Overrides) -> Result<Self, ConfigError> {
        let mut c = match file {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        if let Some(v) = o.jobs {
            c.jobs = v;
        }
        if let Some(v) = &o.out {
            c.out = Some(v.clone());
        }
        if let Some(v) = o.nr {
            c.nr = v;
        }
        if let Some(v) = o.ntheta {
            c.ntheta = v;
        }
        if let Some(v) = o.nt {
            c.nt = v;
        }
        if let Some(v) = o.order_k {
            c.order_k = v;
        }
        if let Some(v) = o.seed {
            c.seed = v;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let sizes = [("order_k", self.order_k), ("jet_order_max", self.jet_order_max), ("nr", self.nr), ("ntheta", self.ntheta), ("nt", self.nt), ("jobs", self.jobs)];
        if let Some((name, _)) = sizes.iter().find(|(_, v)| *v == 0) {
            return Err(ConfigError::Invalid(format!("{name} must be positive")));
        }
        if let Some((name, v)) = self.tolerances.entries().iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(ConfigError::Invalid(format!("tolerance {name} = {v} must be positive")));
        }
        BumpProfile::new(self.bump_inner).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let need = DiskSettings::default().j_check + self.order_k.max(4);
        if self.jet_order_max < need {
            return Err(ConfigError::Invalid(format!("jet_order_max {} is below {need}", self.jet_order_max)));
        }
        Ok(())
    }

    pub fn profile(&self) -> BumpProfile {
        BumpProfile::new(self.bump_inner).expect("validated")
    }

    pub fn algebra(&self) -> DiskAlgebra {
        self.algebra_with(self.nr, self.ntheta, self.order_k)
    }

    pub fn algebra_with(&self, nr: usize, ntheta: usize, order_k: usize) -> DiskAlgebra {
        let quad = DiskQuadrature::new(nr, ntheta, self.nt).expect("validated sizes");
        let jet = JetConfig { max_order: self.jet_order_max, ..JetConfig::default() };
        let settings = DiskSettings { truncation: order_k, ..DiskSettings::default() };
        DiskAlgebra::new(quad, jet, settings).expect("validated jet order")
    }
}
