//! Flat `key=value` run configuration with command-line overrides.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::report::num;
use crate::Failure;

macro_rules! config_keys {
    ($($field:ident => $key:literal : $help:literal),* $(,)?) => {
        /// Every accepted key with a one-line description.
        pub const KEYS: &[(&str, &str)] = &[$(($key, $help)),*];

        /// One optional flag per configuration key; flags win over the file.
        #[derive(Debug, Default, clap::Args)]
        pub struct Overrides {
            $(
                #[arg(long = $key, help = $help, value_name = "VALUE", allow_hyphen_values = true, global = true)]
                pub $field: Option<String>,
            )*
        }

        impl Overrides {
            pub fn pairs(&self) -> Vec<(&'static str, &str)> {
                let mut out = Vec::new();
                $(if let Some(v) = &self.$field {
                    out.push(($key, v.as_str()));
                })*
                out
            }
        }
    };
}

config_keys! {
    model => "model": "canonical | multilayer | monolayer | haldane | constant",
    n => "n": "winding of the canonical model",
    band => "band": "band sign, + or -",
    m => "m": "dispersion power (canonical) or layer count (multilayer)",
    valley => "valley": "Dirac valley, K or K'",
    t1 => "t1": "Haldane nearest-neighbour hopping",
    t2 => "t2": "Haldane next-nearest-neighbour hopping",
    phi => "phi": "Haldane flux phase",
    mass => "M": "Haldane Semenoff mass",
    radius => "radius": "momentum radius of the enclosing surface or loop",
    mu_max => "mu_max": "deformation range of the enclosing surface",
    subdivisions => "subdivisions": "initial cube subdivisions per edge",
    max_refinements => "max_refinements": "maximum number of mesh doublings",
    samples => "samples": "loop samples",
    gauge_trials => "gauge_trials": "random unitary conjugations to test",
    seed => "seed": "seed for randomized sweeps",
    max_angle => "max_angle": "largest rotation angle of the random unitaries",
    tolerance => "tolerance": "absolute tolerance of curvature quadrature",
    p => "p": "Wannier weight exponent",
    rho => "rho": "inner radius of the momentum cutoff",
    r => "r": "outer radius of the momentum cutoff",
    cutoff_p => "cutoff_p": "smoothness order of the momentum cutoff",
    x_min => "x_min": "smallest distance of the Wannier profile",
    x_max => "x_max": "largest distance of the Wannier profile",
    points => "points": "number of log-spaced profile points",
    fit_min => "fit_min": "lower end of the fit window",
    fit_max => "fit_max": "upper end of the fit window",
    test_function => "test_function": "bump | annular",
    height => "height": "value of the test function at the origin",
    f_rho => "f_rho": "test function plateau radius",
    f_r => "f_r": "test function support radius",
    ring_rho => "ring_rho": "annular test function: inner step start",
    ring_r => "ring_r": "annular test function: inner step end",
    mu_sequence => "mu_sequence": "comma-separated decreasing deformation values",
    mu => "mu": "deformation value for dump-model",
    csv => "csv": "path of the CSV output",
    mesh_out => "mesh_out": "path of the mesh flux export",
    trace_out => "trace_out": "path of the loop trace CSV",
}

#[derive(Debug, Clone, PartialEq)]
enum Origin {
    File { path: String, line: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line } => write!(f, "{path}:{line}"),
            Origin::Flag => write!(f, "command line"),
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    raw: String,
    origin: Origin,
}

/// Raw values plus a record of every value the command resolved.
#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, Entry>,
    resolved: RefCell<BTreeMap<String, Value>>,
}

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

impl Settings {
    pub fn parse_file(path: &str, text: &str) -> Result<Self, Failure> {
        let mut s = Settings::default();
        for (i, line) in text.lines().enumerate() {
            let origin = Origin::File {
                path: path.to_string(),
                line: i + 1,
            };
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Failure::config(format!(
                    "{origin}: expected key=value, got `{content}`"
                )));
            };
            let key = key.trim();
            if !known(key) {
                return Err(Failure::config(format!("{origin}: unknown key `{key}`")));
            }
            if let Some(prev) = s.values.get(key) {
                return Err(Failure::config(format!(
                    "{origin}: `{key}` already set at {}",
                    prev.origin
                )));
            }
            s.values.insert(
                key.to_string(),
                Entry {
                    raw: value.trim().to_string(),
                    origin,
                },
            );
        }
        Ok(s)
    }

    pub fn set_flag(&mut self, key: &str, value: &str) -> Result<(), Failure> {
        if !known(key) {
            return Err(Failure::config(format!("unknown key `{key}`")));
        }
        self.values.insert(
            key.to_string(),
            Entry {
                raw: value.trim().to_string(),
                origin: Origin::Flag,
            },
        );
        Ok(())
    }

    fn record(&self, key: &str, v: Value) {
        self.resolved.borrow_mut().insert(key.to_string(), v);
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(e) => e.raw.parse::<T>().map(Some).map_err(|err| {
                Failure::config(format!(
                    "{}: invalid value `{}` for `{key}`: {err}",
                    e.origin, e.raw
                ))
            }),
        }
    }

    /// Error pointing at where `key` was set.
    pub fn invalid(&self, key: &str, why: impl fmt::Display) -> Failure {
        match self.values.get(key) {
            Some(e) => Failure::config(format!(
                "{}: invalid `{key}` = `{}`: {why}",
                e.origin, e.raw
            )),
            None => Failure::config(format!("invalid `{key}`: {why}")),
        }
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, Failure> {
        let v = self.parse::<f64>(key)?.unwrap_or(default);
        if !v.is_finite() {
            return Err(self.invalid(key, "must be finite"));
        }
        self.record(key, num(v));
        Ok(v)
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64, Failure> {
        let v = self.f64(key, default)?;
        if v <= 0.0 {
            return Err(self.invalid(key, "must be positive"));
        }
        Ok(v)
    }

    pub fn int<T>(&self, key: &str, default: T) -> Result<T, Failure>
    where
        T: FromStr + Copy + Into<i64>,
        T::Err: fmt::Display,
    {
        let v = self.parse::<T>(key)?.unwrap_or(default);
        self.record(key, Value::from(v.into()));
        Ok(v)
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize, Failure> {
        let v = self.parse::<usize>(key)?.unwrap_or(default);
        self.record(key, Value::from(v as u64));
        Ok(v)
    }

    pub fn parsed<T>(&self, key: &str, default: &str) -> Result<T, Failure>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        let raw = self
            .values
            .get(key)
            .map(|e| e.raw.clone())
            .unwrap_or_else(|| default.to_string());
        let v = raw.parse::<T>().map_err(|err| self.invalid(key, err))?;
        self.record(key, Value::from(raw));
        Ok(v)
    }

    pub fn choice(&self, key: &str, default: &str, allowed: &[&str]) -> Result<String, Failure> {
        let raw = self
            .values
            .get(key)
            .map(|e| e.raw.clone())
            .unwrap_or_else(|| default.to_string());
        if !allowed.contains(&raw.as_str()) {
            return Err(self.invalid(key, format!("expected one of {}", allowed.join(", "))));
        }
        self.record(key, Value::from(raw.clone()));
        Ok(raw)
    }

    pub fn path(&self, key: &str) -> Option<String> {
        let v = self.values.get(key).map(|e| e.raw.clone());
        if let Some(p) = &v {
            self.record(key, Value::from(p.clone()));
        }
        v
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, Failure> {
        let v = match self.values.get(key) {
            None => default.to_vec(),
            Some(e) => e
                .raw
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|err| self.invalid(key, err))?,
        };
        self.record(key, Value::Array(v.iter().map(|&x| num(x)).collect()));
        Ok(v)
    }

    /// Keys that were set but not read by the command.
    pub fn unused(&self) -> Vec<String> {
        let resolved = self.resolved.borrow();
        self.values
            .keys()
            .filter(|k| !resolved.contains_key(*k))
            .cloned()
            .collect()
    }

    pub fn resolved(&self) -> Value {
        let map: Map<String, Value> = self
            .resolved
            .borrow()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Value::Object(map)
    }
}
