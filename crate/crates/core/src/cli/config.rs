use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Every tunable of every subcommand. Unused fields stay `None`; unknown
/// fields are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_offset: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_far: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shadow_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub golden_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_panels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nevanlinna: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

fn bad(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

fn positive(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(bad(format!("{name} must be positive and finite, got {x}"))),
        _ => Ok(()),
    }
}

fn capped(name: &str, v: Option<usize>, lo: usize, hi: usize) -> Result<()> {
    match v {
        Some(x) if x < lo || x > hi => Err(bad(format!("{name} must lie in {lo}..={hi}, got {x}"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn new() -> Self {
        Self { schema_version: SCHEMA_VERSION, ..Default::default() }
    }

    /// Reads a config, or the `config` object of a run manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let value = match value.get("manifest_version") {
            Some(_) => value.get("config").cloned().ok_or_else(|| bad("manifest has no config"))?,
            None => value,
        };
        let cfg: RunConfig = serde_json::from_value(value).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fields set in `over` replace ours.
    pub fn overlay(&mut self, over: RunConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            threads,
            gen,
            shape,
            weight,
            measure,
            epsilon,
            n_range,
            j_offset,
            j_far,
            threshold,
            shadow_c,
            budget,
            candidates,
            golden_iters,
            base_panels,
            nevanlinna,
            grid_m,
            s_min,
            s_max,
            samples
        );
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        capped("threads", self.threads, 1, 1024)?;
        capped("budget", self.budget, 0, 100_000)?;
        capped("candidates", self.candidates, 1, 4096)?;
        capped("golden_iters", self.golden_iters, 1, 200)?;
        capped("base_panels", self.base_panels, 8, 1 << 16)?;
        capped("grid_m", self.grid_m, 1, 64)?;
        capped("samples", self.samples, 2, 1_000_000)?;
        positive("epsilon", self.epsilon)?;
        positive("shadow_c", self.shadow_c)?;
        positive("s_min", self.s_min)?;
        positive("s_max", self.s_max)?;
        if let Some(t) = self.threshold {
            if !(t > 0.0 && t < 1.0) {
                return Err(bad(format!("threshold must lie in (0,1), got {t}")));
            }
        }
        if let Some(j) = self.j_offset {
            if j > 34 {
                return Err(bad(format!("j_offset {j} exceeds the enumeration cap 34")));
            }
        }
        if let (Some(a), Some(b)) = (self.s_min, self.s_max) {
            if a >= b {
                return Err(bad("s_min must be below s_max"));
            }
        }
        Ok(())
    }
}

/// Written next to every output. Contains no timestamps or absolute paths,
/// so identical runs give identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub manifest_version: u32,
    pub library_version: String,
    pub command: String,
    pub config: RunConfig,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_rejected() {
        let r: std::result::Result<RunConfig, _> = serde_json::from_str(r#"{"schema_version":1,"bogus":3}"#);
        assert!(r.is_err());
        let ok: RunConfig = serde_json::from_str(r#"{"schema_version":1,"gen":"radial:0.5,4"}"#).unwrap();
        assert_eq!(ok.gen.as_deref(), Some("radial:0.5,4"));
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::new();
        assert!(c.validate().is_ok());
        c.threshold = Some(2.0);
        assert!(c.validate().is_err());
        let mut c = RunConfig::new();
        c.threads = Some(0);
        assert!(c.validate().is_err());
        let c = RunConfig { schema_version: 7, ..RunConfig::new() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn overlay_prefers_set_fields() {
        let mut a = RunConfig { gen: Some("radial:0.5,3".into()), budget: Some(4), ..RunConfig::new() };
        a.overlay(RunConfig { budget: Some(9), ..RunConfig::new() });
        assert_eq!(a.gen.as_deref(), Some("radial:0.5,3"));
        assert_eq!(a.budget, Some(9));
    }
}
