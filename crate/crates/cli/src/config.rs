use fhd::continua::ContinuumSchedule;
use fhd::{Error, Result, TrigPoly};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Parameters of one run. Every key is optional in the file; unknown keys
/// are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    /// Map file, relative to the config file.
    pub map: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    /// Rotation vector for `diophantine` and `approximants` when no map is
    /// given.
    pub alpha: Option<Vec<f64>>,
    /// Right-hand side for `cohom`; defaults to `log |c_1|` minus its mean.
    pub rhs: Option<TrigPoly>,

    pub tolerance: f64,
    pub divisor_floor: f64,
    /// Error target of the modulus rescaling.
    pub eps: f64,

    pub horizon: usize,
    pub theta: Vec<f64>,
    pub theta_res: usize,
    pub z_res: usize,
    pub radius: f64,
    pub max_iterations: usize,
    pub probe_radial: usize,
    pub probe_angular: usize,

    pub siegel_order: usize,
    pub siegel_cutoff: u64,

    pub beta: f64,
    pub cd_c: f64,
    pub cd_tau: f64,
    pub cd_range: u32,

    pub approximant_count: usize,
    pub degree_bound: u64,
    pub prime_cap: u64,

    pub omega: f64,
    pub furstenberg_levels: usize,
    pub furstenberg_exponent: f64,
    pub furstenberg_quality: f64,

    pub pixels: usize,
    pub levels: usize,
    pub fejer_degree: usize,
    pub stabilization: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let cs = ContinuumSchedule::default();
        RunConfig {
            command: None,
            map: None,
            out: PathBuf::from("fhd-out"),
            seed: 0,
            alpha: None,
            rhs: None,
            tolerance: 1e-10,
            divisor_floor: 1e-8,
            eps: 0.1,
            horizon: 10_000,
            theta: vec![0.0],
            theta_res: 64,
            z_res: 64,
            radius: 0.1,
            max_iterations: 4096,
            probe_radial: 4,
            probe_angular: 16,
            siegel_order: 10,
            siegel_cutoff: 256,
            beta: 0.0,
            cd_c: 1e-3,
            cd_tau: 1.0,
            cd_range: 200,
            approximant_count: 5,
            degree_bound: 8,
            prime_cap: fhd::arith::DEFAULT_PRIME_CAP,
            omega: 0.110001,
            furstenberg_levels: 6,
            furstenberg_exponent: 0.5,
            furstenberg_quality: 0.125,
            pixels: cs.pixels,
            levels: cs.levels,
            fejer_degree: cs.fejer_degree,
            stabilization: cs.stabilization,
        }
    }
}

impl RunConfig {
    /// Reads the config file, applies `key=value` overrides (values parsed as
    /// JSON, else taken as strings) and validates the result. Relative map
    /// paths are resolved against the config file's directory.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                serde_json::from_str::<serde_json::Value>(&text).map_err(|e| Error::Schema {
                    path: ".".into(),
                    message: e.to_string(),
                })?
            }
            None => serde_json::Value::Object(Default::default()),
        };
        let obj = value.as_object_mut().ok_or(Error::Schema {
            path: ".".into(),
            message: "config must be a JSON object".into(),
        })?;
        for o in overrides {
            let (key, raw) = o
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("override {o:?} is not key=value")))?;
            let v = serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
            obj.insert(key.to_string(), v);
        }
        let mut cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        if let (Some(map), Some(dir)) = (&cfg.map, path.and_then(Path::parent)) {
            if map.is_relative() {
                cfg.map = Some(dir.join(map));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tolerance", self.tolerance),
            ("divisor_floor", self.divisor_floor),
            ("eps", self.eps),
            ("radius", self.radius),
            ("cd_c", self.cd_c),
            ("furstenberg_exponent", self.furstenberg_exponent),
            ("furstenberg_quality", self.furstenberg_quality),
            ("stabilization", self.stabilization),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Schema {
                    path: name.into(),
                    message: format!("must be positive, got {v}"),
                });
            }
        }
        if !(self.cd_tau >= 0.0) {
            return Err(Error::Schema {
                path: "cd_tau".into(),
                message: "must be non-negative".into(),
            });
        }
        for (name, v) in [("theta_res", self.theta_res), ("z_res", self.z_res), ("pixels", self.pixels)] {
            if !v.is_power_of_two() {
                return Err(Error::Schema {
                    path: name.into(),
                    message: format!("must be a power of two, got {v}"),
                });
            }
        }
        Ok(())
    }

    pub fn continuum_schedule(&self) -> ContinuumSchedule {
        ContinuumSchedule {
            levels: self.levels,
            horizon: self.horizon,
            theta_res: self.theta_res,
            pixels: self.pixels,
            fejer_degree: self.fejer_degree,
            stabilization: self.stabilization,
            prime_cap: self.prime_cap,
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = fhd::io::to_json(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
