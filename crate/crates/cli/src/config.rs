//! Flat `key=value` configuration files, run manifests and strategy literals.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use bargainlab::Strategy;
use serde::Serialize;

/// Reads a `key=value` file. Blank lines and lines starting with `#` are
/// skipped.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (k, v) = l.split_once('=').ok_or_else(|| {
            anyhow!(
                "{}:{}: expected key=value, got {l:?}",
                path.display(),
                n + 1
            )
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Splices `--config FILE` entries into the argument list right after the
/// subcommand, so that flags given on the command line take precedence.
pub fn expand_config_args(args: Vec<String>) -> Result<Vec<String>> {
    let mut config = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().ok_or_else(|| anyhow!("--config needs a file"))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let sub = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|i| i + 2)
        .ok_or_else(|| anyhow!("--config needs a subcommand"))?;
    let mut injected = Vec::new();
    for (k, v) in read_config(Path::new(&path))? {
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => injected.push(format!("--{k}={v}")),
        }
    }
    rest.splice(sub..sub, injected);
    Ok(rest)
}

/// The resolved settings of a command, enough to reproduce its output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub settings: BTreeMap<String, String>,
    pub rounding: Vec<String>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, args: &impl Serialize) -> Result<Self> {
        let value = serde_json::to_value(args)?;
        let obj = value
            .as_object()
            .ok_or_else(|| anyhow!("settings must serialize to a map"))?;
        let mut settings = BTreeMap::new();
        for (k, v) in obj {
            let s = match v {
                serde_json::Value::Null => continue,
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            settings.insert(k.clone(), s);
        }
        Ok(RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            settings,
            rounding: Vec::new(),
            warnings: Vec::new(),
        })
    }

    /// The manifest as a config file accepted by `--config`.
    pub fn to_config(&self) -> String {
        let mut out = format!("# bargainlab {} {}\n", self.version, self.command);
        for r in &self.rounding {
            let _ = writeln!(out, "# rounding: {r}");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        for (k, v) in &self.settings {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_config())
            .with_context(|| format!("cannot write manifest {}", path.display()))
    }
}

/// Parses a scalar expression: numbers, `+ - * /` and parentheses.
fn eval(expr: &str) -> Result<f64> {
    struct P<'a> {
        s: &'a [u8],
        i: usize,
    }
    impl P<'_> {
        fn ws(&mut self) {
            while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
                self.i += 1;
            }
        }
        fn peek(&mut self) -> Option<u8> {
            self.ws();
            self.s.get(self.i).copied()
        }
        fn sum(&mut self) -> Result<f64> {
            let mut v = self.product()?;
            while let Some(c @ (b'+' | b'-')) = self.peek() {
                self.i += 1;
                let r = self.product()?;
                v = if c == b'+' { v + r } else { v - r };
            }
            Ok(v)
        }
        fn product(&mut self) -> Result<f64> {
            let mut v = self.atom()?;
            while let Some(c @ (b'*' | b'/')) = self.peek() {
                self.i += 1;
                let r = self.atom()?;
                v = if c == b'*' { v * r } else { v / r };
            }
            Ok(v)
        }
        fn atom(&mut self) -> Result<f64> {
            match self.peek() {
                Some(b'(') => {
                    self.i += 1;
                    let v = self.sum()?;
                    if self.peek() != Some(b')') {
                        bail!("missing ')'");
                    }
                    self.i += 1;
                    Ok(v)
                }
                Some(b'-') => {
                    self.i += 1;
                    Ok(-self.atom()?)
                }
                _ => {
                    let start = self.i;
                    while self.i < self.s.len()
                        && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.')
                    {
                        self.i += 1;
                    }
                    let tok = std::str::from_utf8(&self.s[start..self.i]).unwrap_or("");
                    tok.parse()
                        .map_err(|_| anyhow!("expected a number at position {start}"))
                }
            }
        }
    }
    let mut p = P {
        s: expr.as_bytes(),
        i: 0,
    };
    let v = p.sum()?;
    if p.peek().is_some() {
        bail!("unexpected trailing input at position {}", p.i);
    }
    if !v.is_finite() {
        bail!("value is not finite");
    }
    Ok(v)
}

/// One grid value from a literal such as `3/16`, `0.25`, `ceil(1/(16*0.9))`
/// or `floor(...)`. Rounded literals add a note to `rounding`.
pub fn parse_grid_value(
    lit: &str,
    grid: u32,
    label: &str,
    rounding: &mut Vec<String>,
) -> Result<u32> {
    let lit = lit.trim();
    let d = f64::from(grid);
    let (mode, inner) = if let Some(x) = lit.strip_prefix("ceil(").and_then(|r| r.strip_suffix(')'))
    {
        (Some("ceil"), x)
    } else if let Some(x) = lit.strip_prefix("floor(").and_then(|r| r.strip_suffix(')')) {
        (Some("floor"), x)
    } else {
        (None, lit)
    };
    let x = eval(inner).with_context(|| format!("{label}: cannot parse {lit:?}"))?;
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        bail!("{label}: value {x} lies outside [0, 1]");
    }
    let scaled = x * d;
    let idx = match mode {
        Some("ceil") => (scaled - 1e-9).ceil(),
        Some(_) => (scaled + 1e-9).floor(),
        None => {
            let near = scaled.round();
            if (scaled - near).abs() > 1e-9 {
                let lo = scaled.floor();
                bail!(
                    "{label}: {lit} = {x} is not a multiple of 1/{grid}; nearest grid points are {}/{grid} and {}/{grid}",
                    lo,
                    lo + 1.0
                );
            }
            near
        }
    };
    let idx = idx.clamp(0.0, d) as u32;
    if let Some(m) = mode {
        rounding.push(format!("{label}: {m}({inner}) = {x} -> {idx}/{grid}"));
    }
    Ok(idx)
}

/// A strategy literal: comma-separated grid values, one per round.
pub fn parse_strategy(
    lit: &str,
    rounds: usize,
    grid: u32,
    label: &str,
    rounding: &mut Vec<String>,
) -> Result<Strategy> {
    let parts = split_top_level(lit);
    if parts.len() != rounds {
        bail!(
            "{label}: {lit:?} has {} entries, the game has {rounds} rounds",
            parts.len()
        );
    }
    let entries = parts
        .iter()
        .enumerate()
        .map(|(k, p)| parse_grid_value(p, grid, &format!("{label} round {}", k + 1), rounding))
        .collect::<Result<Vec<_>>>()?;
    Ok(Strategy::new(entries))
}

/// A set of grid values separated by commas.
pub fn parse_value_set(lit: &str, grid: u32, label: &str) -> Result<Vec<u32>> {
    let mut notes = Vec::new();
    let v = split_top_level(lit)
        .iter()
        .map(|p| parse_grid_value(p, grid, label, &mut notes))
        .collect::<Result<Vec<_>>>()?;
    if !notes.is_empty() {
        bail!("{label}: rounding is not allowed in value sets");
    }
    Ok(v)
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}
