use std::path::Path;

use dofwave::kernel::KernelOptions;
use dofwave::{Measure, SymbolPair};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub sigma: Measure,
    pub epsilon: Measure,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub x_count: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        let d = KernelOptions::default();
        QuadratureSpec { rel_tol: d.rel_tol, abs_tol: d.abs_tol, max_subdivisions: d.max_subdivisions }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Option<String>,
    pub path: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub force: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), String> {
        if let Some(f) = &self.output.format {
            if f != "csv" {
                return Err(format!("unsupported output format {f:?} (only csv)"));
            }
        }
        let q = &self.quadrature;
        if !(q.rel_tol > 0.0 && q.rel_tol < 1.0) || !(q.abs_tol >= 0.0) || q.max_subdivisions == 0 {
            return Err("quadrature tolerances out of range".into());
        }
        if let Some(g) = &self.grid {
            g.check()?;
        }
        Ok(())
    }

    pub fn pair(&self) -> SymbolPair {
        SymbolPair::new(self.model.sigma.clone(), self.model.epsilon.clone())
    }

    pub fn kernel_options(&self) -> KernelOptions {
        let q = self.quadrature;
        KernelOptions { rel_tol: q.rel_tol, abs_tol: q.abs_tol, max_subdivisions: q.max_subdivisions }
    }

    pub fn grid(&self) -> Result<GridSpec, String> {
        self.grid.ok_or_else(|| "this command needs a \"grid\" section in the config".to_string())
    }
}

impl GridSpec {
    fn check(&self) -> Result<(), String> {
        let finite = [self.x_min, self.x_max, self.t_min, self.t_max].iter().all(|v| v.is_finite());
        if !finite {
            return Err("grid ranges must be finite".into());
        }
        if self.x_count < 2 || self.t_count < 2 {
            return Err("grid counts must be at least 2".into());
        }
        if self.x_max <= self.x_min || self.t_max <= self.t_min {
            return Err("grid ranges must be increasing".into());
        }
        if self.t_min <= 0.0 {
            return Err("t_min must be positive".into());
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.x_count)
    }

    pub fn ts(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.t_count)
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + h * i as f64 }).collect()
}
