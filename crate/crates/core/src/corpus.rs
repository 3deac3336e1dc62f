//! Built-in catalogue of example germs with expected verdicts, witness pairs
//! and sampling defaults. Entries are the JSON files under `corpus/v1`.

use serde::{Deserialize, Serialize};

use crate::cone::KxParams;
use crate::error::{Error, Result};
use crate::metric::{geometric_scales, parse_schedule, ProfileConfig};
use crate::variety::{Germ, SetDef, Slice};
use crate::witness::{CurveDef, WitnessConfig, WitnessCurve};

pub const VERSION: &str = "v1";

const ENTRIES: [(&str, &str); 7] = [
    ("cusp", include_str!("../corpus/v1/cusp.json")),
    ("parabola", include_str!("../corpus/v1/parabola.json")),
    ("double-spheres", include_str!("../corpus/v1/double-spheres.json")),
    ("ice-cream", include_str!("../corpus/v1/ice-cream.json")),
    ("complex-3.14", include_str!("../corpus/v1/complex-3.14.json")),
    ("pichon-neumann", include_str!("../corpus/v1/pichon-neumann.json")),
    ("circle-cone", include_str!("../corpus/v1/circle-cone.json")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub lne: Expectation,
    pub cone_lne: Expectation,
    pub reduced: Expectation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleWindow {
    pub t_max: f64,
    pub t_min: f64,
    pub count: usize,
    pub n: usize,
}

impl ScaleWindow {
    pub fn scales(&self) -> Result<Vec<f64>> {
        geometric_scales(self.t_max, self.t_min, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionDefaults {
    pub scales: Vec<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KxDefaults {
    pub eps: f64,
    pub delta: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Host {
    /// The curves lie on the set itself.
    Set,
    /// The curves lie on the tangent cone.
    Cone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDef {
    pub name: String,
    pub host: Host,
    pub alpha: CurveDef,
    pub beta: CurveDef,
    pub anchor: Vec<f64>,
    pub slice_axes: Vec<usize>,
    pub grid: String,
    pub samples: usize,
}

impl WitnessDef {
    pub fn curves(&self) -> Result<(WitnessCurve, WitnessCurve)> {
        Ok((
            WitnessCurve::new(self.alpha.clone())?,
            WitnessCurve::new(self.beta.clone())?,
        ))
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        parse_schedule(&self.grid)
    }

    pub fn config(&self, seed: u64) -> WitnessConfig {
        let mut config = WitnessConfig::new(self.anchor.clone(), self.samples, seed);
        config.slice = Some(Slice::coordinates(self.anchor.len(), &self.slice_axes));
        config
    }
}

/// Where and how to probe the tangent cone for LNE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeProbe {
    pub center: Vec<f64>,
    pub slice_axes: Vec<usize>,
    pub local_dim: usize,
    pub scales: String,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub description: String,
    pub set: SetDef,
    pub expected: Expected,
    pub simple_directions: Vec<Vec<f64>>,
    pub scale_window: ScaleWindow,
    pub local_dim: usize,
    pub directions: DirectionDefaults,
    pub kx: KxDefaults,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_probe: Option<ConeProbe>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CorpusEntry {
    pub fn germ(&self) -> Result<Germ> {
        self.set.build()
    }

    pub fn is_slow(&self) -> bool {
        self.tags.iter().any(|t| t == "slow")
    }

    /// Profile configuration from the entry's scale window.
    pub fn profile_config(&self, seed: u64) -> Result<ProfileConfig> {
        let mut c = ProfileConfig::new(self.scale_window.scales()?, self.scale_window.n, seed);
        c.local_dim = self.local_dim;
        Ok(c)
    }

    /// Profile configuration for the cone probe, if the entry has one.
    pub fn cone_probe_config(&self, seed: u64) -> Result<Option<ProfileConfig>> {
        let Some(p) = &self.cone_probe else {
            return Ok(None);
        };
        let mut c = ProfileConfig::new(parse_schedule(&p.scales)?, p.samples, seed);
        c.local_dim = p.local_dim;
        c.center = Some(p.center.clone());
        c.slice = Some(Slice::coordinates(p.center.len(), &p.slice_axes));
        Ok(Some(c))
    }

    pub fn kx_params(&self) -> KxParams {
        KxParams {
            eps: self.kx.eps,
            delta: self.kx.delta,
            samples: self.kx.samples,
            local_dim: self.local_dim,
        }
    }

    /// The entry's JSON file as shipped.
    pub fn source(&self) -> &'static str {
        ENTRIES
            .iter()
            .find(|(n, _)| *n == self.name)
            .map(|(_, text)| *text)
            .expect("entries come from the table")
    }
}

/// Entry names in catalogue order.
pub fn list() -> Vec<&'static str> {
    ENTRIES.iter().map(|(n, _)| *n).collect()
}

pub fn get(name: &str) -> Result<CorpusEntry> {
    let (_, text) = ENTRIES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))?;
    let entry: CorpusEntry = serde_json::from_str(text)?;
    debug_assert_eq!(entry.name, name);
    Ok(entry)
}

pub fn all() -> Result<Vec<CorpusEntry>> {
    list().into_iter().map(get).collect()
}
