//! Run configuration: defaults, overridden by a `key = value` file,
//! overridden by command-line flags.

use deformlab::{PipelineConfig, SsimParams};

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "DEFORMLAB_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub steps: usize,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub ssim: SsimParams,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let pipeline = PipelineConfig::default();
        RunConfig {
            alpha: pipeline.alpha,
            steps: pipeline.steps,
            solver_tol: pipeline.solver_tol,
            solver_max_iter: pipeline.solver_max_iter,
            ssim: SsimParams::default(),
            seed: 0,
        }
    }
}

/// Values that may be supplied on the command line; `None` keeps the
/// file or default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub steps: Option<usize>,
    pub solver_tol: Option<f64>,
    pub solver_max_iter: Option<usize>,
    pub ssim_window: Option<usize>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, lineno: usize) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("config line {lineno}: invalid value {value:?} for {key}"))
}

impl RunConfig {
    /// Applies a flat `key = value` file. `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        for (n, raw) in text.lines().enumerate() {
            let lineno = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {lineno}: expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "alpha" => self.alpha = parse(key, value, lineno)?,
                "steps" => self.steps = parse(key, value, lineno)?,
                "solver_tol" => self.solver_tol = parse(key, value, lineno)?,
                "solver_max_iter" => self.solver_max_iter = parse(key, value, lineno)?,
                "ssim_c1" => self.ssim.c1 = parse(key, value, lineno)?,
                "ssim_c2" => self.ssim.c2 = parse(key, value, lineno)?,
                "ssim_alpha" => self.ssim.alpha = parse(key, value, lineno)?,
                "ssim_beta" => self.ssim.beta = parse(key, value, lineno)?,
                "ssim_gamma" => self.ssim.gamma = parse(key, value, lineno)?,
                "ssim_window" => self.ssim.window = parse(key, value, lineno)?,
                "seed" => self.seed = parse(key, value, lineno)?,
                _ => return Err(format!("config line {lineno}: unknown key {key:?}")),
            }
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        if let Some(v) = o.alpha {
            self.alpha = v;
        }
        if let Some(v) = o.steps {
            self.steps = v;
        }
        if let Some(v) = o.solver_tol {
            self.solver_tol = v;
        }
        if let Some(v) = o.solver_max_iter {
            self.solver_max_iter = v;
        }
        if let Some(v) = o.ssim_window {
            self.ssim.window = v;
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.steps == 0 {
            return Err("steps must be positive".into());
        }
        if !(self.solver_tol.is_finite() && self.solver_tol > 0.0) {
            return Err(format!(
                "solver_tol must be positive, got {}",
                self.solver_tol
            ));
        }
        if self.solver_max_iter == 0 {
            return Err("solver_max_iter must be positive".into());
        }
        self.ssim.validate().map_err(|e| e.to_string())
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            alpha: self.alpha,
            steps: self.steps,
            solver_tol: self.solver_tol,
            solver_max_iter: self.solver_max_iter,
            ..PipelineConfig::default()
        }
    }

    /// Defaults, then `file_text` if any, then `overrides`.
    pub fn resolve(file_text: Option<&str>, overrides: &Overrides) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        if let Some(text) = file_text {
            cfg.apply_file(text)?;
        }
        cfg.apply_overrides(overrides);
        cfg.validate()?;
        Ok(cfg)
    }
}
