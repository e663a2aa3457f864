//! Run configuration: a sectioned `key = value` text format.
//!
//! ```text
//! [run]
//! command = separate
//! set = 3
//! m = 1
//!
//! [potential]
//! A0 = -1:0.5
//! ```
//!
//! Arrays are comma-separated; potential profiles are lists of `power:coeff`
//! terms. Every key has a default, and [`RunConfig::to_text`] writes the
//! fully resolved configuration back in the same format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::clifford::{Spinor, C64};
use crate::error::{Error, Result};
use crate::reduction::{DEFAULT_ATOL, DEFAULT_RTOL};
use crate::separation::{get_set, CompleteSet, Profile, SetId};
use crate::verification::{DEFAULT_GRID_N, DEFAULT_H, DEFAULT_TOL};

/// Which values of s a run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignChoice {
    Both,
    Only(i32),
}

impl SignChoice {
    pub fn values(&self) -> Vec<i32> {
        match self {
            SignChoice::Both => vec![1, -1],
            SignChoice::Only(s) => vec![*s],
        }
    }

    /// Single value used by commands that need one representation.
    pub fn primary(&self) -> i32 {
        match self {
            SignChoice::Both => 1,
            SignChoice::Only(s) => *s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub set: SetId,
    pub a: Option<f64>,
    pub s: SignChoice,
    pub m: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub seed: u64,
    pub potentials: usize,
    pub profiles: [Profile; 3],
    pub t_start: f64,
    pub t_end: f64,
    pub init: Spinor,
    pub rtol: f64,
    pub atol: f64,
    pub h: f64,
    pub tol: f64,
    pub grid_n: usize,
    pub region: [[f64; 2]; 3],
    pub out: PathBuf,
}

/// Parsed but not yet resolved key-value pairs, by section.
type Sections = BTreeMap<String, BTreeMap<String, String>>;

const KEYS: [(&str, &[&str]); 5] = [
    ("run", &["command", "set", "a", "s", "m", "lambda1", "lambda2", "seed", "potentials"]),
    ("potential", &["A0", "A1", "A2"]),
    ("ode", &["t_start", "t_end", "init", "rtol", "atol"]),
    ("verify", &["h", "tol", "grid_n", "region"]),
    ("output", &["dir"]),
];

fn parse_sections(text: &str) -> Result<Sections> {
    let mut out = Sections::new();
    let mut section: Option<String> = None;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Config(format!("line {}: {msg}", no + 1));
        if line.starts_with('[') {
            let name = line
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .ok_or_else(|| err("bad section header".into()))?;
            let name = name.trim().to_string();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(err(format!("unknown section [{name}]")));
            }
            out.entry(name.clone()).or_default();
            section = Some(name);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got '{line}'")))?;
        let sec = section.clone().ok_or_else(|| err("key outside of a section".into()))?;
        let key = key.trim();
        let allowed = KEYS.iter().find(|(s, _)| *s == sec).unwrap().1;
        if !allowed.contains(&key) {
            return Err(err(format!("unknown key '{key}' in [{sec}]")));
        }
        if out.get_mut(&sec).unwrap().insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(err(format!("duplicate key '{key}'")));
        }
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

fn list(key: &str, v: &str, n: usize) -> Result<Vec<f64>> {
    let vals: Vec<f64> = v.split(',').map(|p| num(key, p)).collect::<Result<_>>()?;
    if vals.len() != n {
        return Err(Error::Config(format!("{key}: expected {n} comma-separated numbers, got {}", vals.len())));
    }
    Ok(vals)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ")
}

/// Default (λ₁, λ₂) per set; set 1 uses the plane wave with k² = 3.
fn default_lambda(id: SetId) -> (f64, f64) {
    match id {
        SetId::S1 => (2.0, 0.0),
        _ => (0.8, 0.3),
    }
}

/// Reduced-variable interval covering `region` with room for FD stencils.
pub fn default_interval(set: &CompleteSet, region: &[[f64; 2]; 3]) -> (f64, f64) {
    let r = region[set.reduced];
    let pad = 0.02 * (r[1] - r[0]).max(1e-3);
    (r[0] - pad, r[1] + pad)
}

impl RunConfig {
    /// Defaults for a set with no overrides.
    pub fn defaults(set: SetId, a: Option<f64>) -> Result<RunConfig> {
        let cs = get_set(set, a)?;
        let region = cs.default_region();
        let (t_start, t_end) = default_interval(&cs, &region);
        let (lambda1, lambda2) = default_lambda(set);
        Ok(RunConfig {
            command: "separate".into(),
            set,
            a,
            s: SignChoice::Both,
            m: 1.0,
            lambda1,
            lambda2,
            seed: 1,
            potentials: 20,
            profiles: [Profile::zero(), Profile::zero(), Profile::zero()],
            t_start,
            t_end,
            init: Spinor::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
            h: DEFAULT_H,
            tol: DEFAULT_TOL,
            grid_n: DEFAULT_GRID_N,
            region,
            out: PathBuf::from("out"),
        })
    }

    /// Parses a config text; `set_override` (from the command line) wins over
    /// the file.
    pub fn parse(text: &str, set_override: Option<&str>) -> Result<RunConfig> {
        let sec = parse_sections(text)?;
        let get = |s: &str, k: &str| sec.get(s).and_then(|m| m.get(k)).map(|v| v.as_str());
        let set = match set_override.or(get("run", "set")) {
            Some(v) => SetId::parse(v)?,
            None => SetId::S1,
        };
        let a = get("run", "a").map(|v| num::<f64>("a", v)).transpose()?;
        if set == SetId::S6 {
            match a {
                None => return Err(Error::Config("set 6 requires 'a' in [run] (any nonzero real)".into())),
                Some(0.0) => return Err(Error::Config("set 6 requires a != 0".into())),
                _ => {}
            }
        }
        let mut c = RunConfig::defaults(set, if set == SetId::S6 { a } else { None })?;
        c.a = a;
        if let Some(v) = get("run", "command") {
            c.command = v.to_string();
        }
        if let Some(v) = get("run", "s") {
            c.s = match v {
                "both" => SignChoice::Both,
                "1" | "+1" => SignChoice::Only(1),
                "-1" => SignChoice::Only(-1),
                other => return Err(Error::Config(format!("s must be 1, -1 or both, got '{other}'"))),
            };
        }
        if let Some(v) = get("run", "m") {
            c.m = num("m", v)?;
        }
        if let Some(v) = get("run", "lambda1") {
            c.lambda1 = num("lambda1", v)?;
        }
        if let Some(v) = get("run", "lambda2") {
            c.lambda2 = num("lambda2", v)?;
        }
        if let Some(v) = get("run", "seed") {
            c.seed = num("seed", v)?;
        }
        if let Some(v) = get("run", "potentials") {
            c.potentials = num("potentials", v)?;
        }
        for (i, key) in ["A0", "A1", "A2"].iter().enumerate() {
            if let Some(v) = get("potential", key) {
                c.profiles[i] = Profile::parse(v).map_err(|e| Error::Config(format!("{key}: {e}")))?;
            }
        }
        if let Some(v) = get("verify", "region") {
            let r = list("region", v, 6)?;
            c.region = [[r[0], r[1]], [r[2], r[3]], [r[4], r[5]]];
            let cs = get_set(set, c.a)?;
            (c.t_start, c.t_end) = default_interval(&cs, &c.region);
        }
        if let Some(v) = get("ode", "t_start") {
            c.t_start = num("t_start", v)?;
        }
        if let Some(v) = get("ode", "t_end") {
            c.t_end = num("t_end", v)?;
        }
        if let Some(v) = get("ode", "init") {
            let r = list("init", v, 4)?;
            c.init = Spinor::new(C64::new(r[0], r[1]), C64::new(r[2], r[3]));
        }
        if let Some(v) = get("ode", "rtol") {
            c.rtol = num("rtol", v)?;
        }
        if let Some(v) = get("ode", "atol") {
            c.atol = num("atol", v)?;
        }
        if let Some(v) = get("verify", "h") {
            c.h = num("h", v)?;
        }
        if let Some(v) = get("verify", "tol") {
            c.tol = num("tol", v)?;
        }
        if let Some(v) = get("verify", "grid_n") {
            c.grid_n = num("grid_n", v)?;
        }
        if let Some(v) = get("output", "dir") {
            c.out = PathBuf::from(v);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.m.is_finite() || self.m <= 0.0 {
            return Err(Error::Config(format!("m must be positive (massive case), got {}", self.m)));
        }
        if self.set == SetId::S6 && self.a.is_none_or(|a| a == 0.0) {
            return Err(Error::Config("set 6 requires a != 0".into()));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.h > 0.0 && self.tol > 0.0) {
            return Err(Error::Config("tolerances and h must be positive".into()));
        }
        if self.grid_n == 0 {
            return Err(Error::Config("grid_n must be at least 1".into()));
        }
        if self.init.norm() == 0.0 {
            return Err(Error::Config("init must be a nonzero spinor".into()));
        }
        for r in &self.region {
            if r[0].is_nan() || r[1].is_nan() || r[0] > r[1] {
                return Err(Error::Config(format!("region interval {r:?} is empty")));
            }
        }
        Ok(())
    }

    pub fn complete_set(&self) -> Result<CompleteSet> {
        get_set(self.set, if self.set == SetId::S6 { self.a } else { None })
    }

    /// Fully resolved configuration in the input format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "set = {}", self.set);
        if let Some(a) = self.a {
            let _ = writeln!(s, "a = {a}");
        }
        let sv = match self.s {
            SignChoice::Both => "both".to_string(),
            SignChoice::Only(v) => v.to_string(),
        };
        let _ = writeln!(s, "s = {sv}");
        let _ = writeln!(s, "m = {}", self.m);
        let _ = writeln!(s, "lambda1 = {}", self.lambda1);
        let _ = writeln!(s, "lambda2 = {}", self.lambda2);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "potentials = {}", self.potentials);
        let _ = writeln!(s, "\n[potential]");
        for (i, p) in self.profiles.iter().enumerate() {
            let _ = writeln!(s, "A{i} = {p}");
        }
        let _ = writeln!(s, "\n[ode]");
        let _ = writeln!(s, "t_start = {}", self.t_start);
        let _ = writeln!(s, "t_end = {}", self.t_end);
        let i = &self.init.0;
        let _ = writeln!(s, "init = {}", fmt_list(&[i[0].re, i[0].im, i[1].re, i[1].im]));
        let _ = writeln!(s, "rtol = {:e}", self.rtol);
        let _ = writeln!(s, "atol = {:e}", self.atol);
        let _ = writeln!(s, "\n[verify]");
        let _ = writeln!(s, "h = {:e}", self.h);
        let _ = writeln!(s, "tol = {:e}", self.tol);
        let _ = writeln!(s, "grid_n = {}", self.grid_n);
        let r = &self.region;
        let _ = writeln!(s, "region = {}", fmt_list(&[r[0][0], r[0][1], r[1][0], r[1][1], r[2][0], r[2][1]]));
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "dir = {}", self.out.display());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let c = RunConfig::parse("", None).unwrap();
        assert_eq!(c, RunConfig::defaults(SetId::S1, None).unwrap());
        assert_eq!(c.lambda1, 2.0);
    }

    #[test]
    fn echo_roundtrips() {
        let text = "[run]\nset = 3\nm = 2.5\n[potential]\nA0 = -1:0.5\n[verify]\ngrid_n = 5\n";
        let c = RunConfig::parse(text, None).unwrap();
        assert_eq!(c.profiles[0], Profile::new(vec![(-1, 0.5)]));
        let again = RunConfig::parse(&c.to_text(), None).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn set6_needs_a() {
        assert!(matches!(RunConfig::parse("[run]\nset = 6\n", None), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("[run]\na = 0\n", Some("6")), Err(Error::Config(_))));
        assert!(RunConfig::parse("[run]\na = 0.5\n", Some("6")).is_ok());
    }

    #[test]
    fn rejects_massless_and_unknown_keys() {
        assert!(RunConfig::parse("[run]\nm = 0\n", None).is_err());
        assert!(RunConfig::parse("[run]\nmass = 1\n", None).is_err());
        assert!(RunConfig::parse("m = 1\n", None).is_err());
        assert!(RunConfig::parse("[run]\nm = 1\nm = 2\n", None).is_err());
    }

    #[test]
    fn region_moves_interval() {
        let c = RunConfig::parse("[run]\nset = 3\n[verify]\nregion = -1, 1, 2, 4, -1, 1\n", None).unwrap();
        assert!(c.t_start < 2.0 && c.t_start > 1.9);
        assert!(c.t_end > 4.0 && c.t_end < 4.1);
    }
}
