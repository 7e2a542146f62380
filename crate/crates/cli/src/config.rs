//! Run configuration: defaults, overridden by a `key = value` config file,
//! overridden by command-line flags. The only environment variable honored
//! is FORMFACT_OUTDIR, which redirects relative report paths.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use formfact::Limits;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub digit_bound: usize,
    pub sieve_bound: u64,
    pub hseq_l_bound: u64,
    pub pik_l_bound: u64,
    pub brute_force_bound: u64,
    pub prime_bound: u64,
    pub window_multiplier: u32,
    pub ratio: f64,
    pub workers: usize,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let l = Limits::default();
        RunConfig {
            digit_bound: l.max_digits,
            sieve_bound: l.sieve_bound,
            hseq_l_bound: l.hseq_l_bound,
            pik_l_bound: l.pik_l_bound,
            brute_force_bound: l.brute_force_bound,
            prime_bound: 100,
            window_multiplier: 8,
            ratio: 2.0,
            workers: 0, // 0 = library default
            output: None,
        }
    }
}

impl RunConfig {
    pub fn limits(&self) -> Limits {
        Limits {
            max_digits: self.digit_bound,
            sieve_bound: self.sieve_bound,
            hseq_l_bound: self.hseq_l_bound,
            pik_l_bound: self.pik_l_bound,
            brute_force_bound: self.brute_force_bound,
        }
    }

    pub fn apply_file(&mut self, path: &Path) -> anyhow::Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let map = parse_kv(&text)?;
        for (key, value) in &map {
            match key.as_str() {
                "digit_bound" => self.digit_bound = value.parse()?,
                "sieve_bound" => self.sieve_bound = value.parse()?,
                "hseq_l_bound" => self.hseq_l_bound = value.parse()?,
                "pik_l_bound" => self.pik_l_bound = value.parse()?,
                "brute_force_bound" => self.brute_force_bound = value.parse()?,
                "prime_bound" => self.prime_bound = value.parse()?,
                "window_multiplier" => self.window_multiplier = value.parse()?,
                "ratio" => self.ratio = value.parse()?,
                "workers" => self.workers = value.parse()?,
                "output" => self.output = Some(PathBuf::from(value)),
                other => bail!("unknown config key `{other}`"),
            }
        }
        Ok(())
    }

    /// Resolve the report destination: flag/config path, redirected through
    /// FORMFACT_OUTDIR when relative.
    pub fn resolve_output(&self, flag: Option<&Path>) -> Option<PathBuf> {
        let base = flag.map(Path::to_path_buf).or_else(|| self.output.clone())?;
        if base.is_relative() {
            if let Ok(dir) = std::env::var("FORMFACT_OUTDIR") {
                return Some(PathBuf::from(dir).join(base));
            }
        }
        Some(base)
    }
}

fn parse_kv(text: &str) -> anyhow::Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .with_context(|| format!("config line {} is not `key = value`", lineno + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}
