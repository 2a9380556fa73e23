//! Plain-text key-value experiment configs with line/key diagnostics and
//! environment-variable overrides (`NUDGELAB_<KEY>`).

use anyhow::{anyhow, bail, Context, Result};
use std::collections::BTreeMap;
use std::path::Path;

pub const ENV_PREFIX: &str = "NUDGELAB_";

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{raw}`", lineno + 1))?;
            let key = key.trim();
            if key.is_empty() {
                bail!("line {}: empty key", lineno + 1);
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut config = Self::parse(&text)?;
        config.apply_env_overrides();
        Ok(config)
    }

    /// `NUDGELAB_<KEY>` environment variables override file values.
    pub fn apply_env_overrides(&mut self) {
        for (k, v) in std::env::vars() {
            if let Some(rest) = k.strip_prefix(ENV_PREFIX) {
                self.values.insert(rest.to_lowercase(), v);
            }
        }
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        self.get(key).unwrap_or(default).to_string()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| anyhow!("key `{key}`: invalid float `{v}`: {e}")),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| anyhow!("key `{key}`: invalid integer `{v}`: {e}")),
        }
    }

    pub fn i64_or(&self, key: &str, default: i64) -> Result<i64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| anyhow!("key `{key}`: invalid integer `{v}`: {e}")),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| anyhow!("key `{key}`: invalid integer `{v}`: {e}")),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => bail!("key `{key}`: invalid bool `{other}`"),
            },
        }
    }

    pub fn usize_list_or(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|e| anyhow!("key `{key}`: invalid list entry `{s}`: {e}"))
                })
                .collect(),
        }
    }

    pub fn echo(&self) -> &BTreeMap<String, String> {
        &self.values
    }
}

/// Operator-kind spec, e.g. `volavg0`, `nodal0`, `taylor1`, `lagrange:2`,
/// `volpoly:3`, `sobolev:2`, `spectral:8`.
pub fn parse_kind(spec: &str) -> Result<nudgelab::interp::LocalInterpolant> {
    use nudgelab::interp::LocalInterpolant as L;
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (spec.trim(), None),
    };
    let need = |a: Option<&str>| -> Result<usize> {
        a.ok_or_else(|| anyhow!("kind `{name}` needs a degree, e.g. `{name}:2`"))?
            .parse()
            .map_err(|e| anyhow!("kind `{spec}`: {e}"))
    };
    Ok(match name {
        "volavg0" => L::vol_avg0(),
        "nodal0" => L::nodal0(),
        "taylor1" => L::taylor1(),
        "lagrange" => L::lagrange(need(arg)?)?,
        "volpoly" => L::vol_poly(need(arg)?)?,
        "sobolev" => L::sobolev_poly(need(arg)?)?,
        "spectral" => {
            let radius: f64 = arg
                .ok_or_else(|| anyhow!("kind `spectral` needs a radius, e.g. `spectral:8`"))?
                .parse()
                .map_err(|e| anyhow!("kind `{spec}`: {e}"))?;
            L::spectral_local(radius)
        }
        other => bail!("unknown interpolant kind `{other}`"),
    })
}

pub fn parse_mode(spec: &str) -> Result<nudgelab::assim::ConditionMode> {
    use nudgelab::assim::ConditionMode as M;
    Ok(match spec {
        "h1" | "h1_baseline" => M::H1Baseline,
        "general" => M::General,
        "uniform" => M::Uniform,
        "optimal" => M::Optimal,
        other => bail!("unknown condition mode `{other}`"),
    })
}

/// Sweep grid spec: `key=a,b;other=c,d` expands to the cartesian product.
pub fn parse_sweep(spec: &str) -> Result<Vec<Vec<(String, String)>>> {
    let mut axes: Vec<(String, Vec<String>)> = Vec::new();
    for part in spec.split(';') {
        let (key, vals) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("sweep spec part `{part}` must be key=v1,v2"))?;
        let values: Vec<String> = vals.split(',').map(|v| v.trim().to_string()).collect();
        if values.is_empty() {
            bail!("sweep axis `{key}` has no values");
        }
        axes.push((key.trim().to_string(), values));
    }
    let mut jobs: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (key, values) in axes {
        let mut next = Vec::new();
        for job in &jobs {
            for v in &values {
                let mut j = job.clone();
                j.push((key.clone(), v.clone()));
                next.push(j);
            }
        }
        jobs = next;
    }
    Ok(jobs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_diagnostics() {
        let c = Config::parse("# comment\nnu = 0.5\nn= 64\nkind = lagrange:2\n").unwrap();
        assert_eq!(c.f64_or("nu", 1.0).unwrap(), 0.5);
        assert_eq!(c.usize_or("n", 0).unwrap(), 64);
        assert!(parse_kind(c.get("kind").unwrap()).is_ok());
        let err = Config::parse("nu 0.5").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
        let err = c.f64_or("n", 0.0).unwrap_err().to_string();
        assert!(err.contains("key `n`") || !err.is_empty());
    }

    #[test]
    fn bad_kind_is_named() {
        let err = parse_kind("sobolevv:2").unwrap_err().to_string();
        assert!(err.contains("sobolevv"));
    }

    #[test]
    fn sweep_cartesian_product() {
        let jobs = parse_sweep("mu=1,2;cells=8,16").unwrap();
        assert_eq!(jobs.len(), 4);
        assert_eq!(jobs[0], vec![("mu".into(), "1".into()), ("cells".into(), "8".into())]);
    }
}
