//! Flat `key = value` experiment configuration.
//!
//! A config file holds one assignment per line; `#` starts a comment. Command
//! line `--set key=value` overrides are applied after the file. Every key has
//! a default, so an empty config is valid for every command.
//!
//! Complex numbers are written `mag@phase` or `re+imi` (a bare real is also
//! accepted). Real values may be plain decimals or multiples of `pi` such as
//! `pi/7`, `-2pi/3` or `0.5*pi`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Spectrum,
    Asymptotic,
    Scattering,
    Equivalence,
    Average,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Spectrum => "spectrum",
            Command::Asymptotic => "asymptotic",
            Command::Scattering => "scattering",
            Command::Equivalence => "equivalence",
            Command::Average => "average",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingSize {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    None,
    Even,
    Odd,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    /// Directed edge `|tail, head>` in line coordinates.
    Edge(i64, i64),
    Uniform,
    /// Random normalized state drawn from `seed`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    Edge,
    Vertex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Cycle,
    TwoPeriodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierVertex {
    pub t: Complex64,
    pub r: Complex64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub n: RingSize,
    pub steps: usize,
    pub t: Complex64,
    pub r: Complex64,
    pub phi: f64,
    pub phi_placement: Placement,
    pub start: Start,
    pub seed: u64,
    pub distribution: DistributionKind,
    pub m: usize,
    pub window: usize,
    pub spectrum: SpectrumKind,
    pub barrier: Vec<BarrierVertex>,
    pub theta_points: usize,
    pub theta_min: f64,
    pub theta_max: f64,
}

/// Prefix of the config lines in CSV metadata.
pub const METADATA_PREFIX: &str = "# config ";

pub const KEYS: &[&str] = &[
    "n",
    "steps",
    "t",
    "r",
    "phi",
    "phi_placement",
    "start",
    "seed",
    "distribution",
    "m",
    "window",
    "spectrum",
    "barrier",
    "theta_points",
    "theta_min",
    "theta_max",
];

impl Default for Config {
    fn default() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Config {
            n: RingSize::Auto,
            steps: 50,
            t: h,
            r: h,
            phi: 0.0,
            phi_placement: Placement::None,
            start: Start::Edge(0, 1),
            seed: 0,
            distribution: DistributionKind::Edge,
            m: 50_000,
            window: 20,
            spectrum: SpectrumKind::Cycle,
            barrier: vec![BarrierVertex { t: h, r: h, phi: 0.0 }],
            theta_points: 256,
            theta_min: 0.0,
            theta_max: 2.0 * PI,
        }
    }
}

/// Raw assignments before typing; remembers where each value came from.
#[derive(Debug, Default, Clone)]
pub struct Assignments {
    values: BTreeMap<String, (String, String)>,
}

impl Assignments {
    /// Parses a config file, or the metadata block of a CSV written by this
    /// tool (so that any output can be re-run with `--config`).
    pub fn parse_file(text: &str, origin: &str) -> Result<Self, CliError> {
        if text.lines().any(|l| l.starts_with(METADATA_PREFIX)) {
            return Self::from_metadata(text, origin);
        }
        let mut out = Assignments::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            out.insert(line, &format!("{origin}:{}", i + 1))?;
        }
        Ok(out)
    }

    pub fn from_metadata(csv_text: &str, origin: &str) -> Result<Self, CliError> {
        let mut out = Assignments::default();
        for (i, line) in csv_text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix(METADATA_PREFIX) {
                out.insert(rest, &format!("{origin}:{}", i + 1))?;
            }
        }
        Ok(out)
    }

    /// `key=value` from the command line.
    pub fn insert(&mut self, assignment: &str, origin: &str) -> Result<(), CliError> {
        let Some((key, value)) = assignment.split_once('=') else {
            return Err(CliError::Config(format!("{origin}: expected key=value, got '{assignment}'")));
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!(
                "{origin}: unknown key '{key}' (known keys: {})",
                KEYS.join(", ")
            )));
        }
        self.values
            .insert(key.to_string(), (value.trim().to_string(), origin.to_string()));
        Ok(())
    }

    pub fn into_config(self) -> Result<Config, CliError> {
        let mut cfg = Config::default();
        let mut r_given = false;
        for (key, (value, origin)) in &self.values {
            let bad = |msg: String| CliError::Config(format!("{origin}: field '{key}': {msg}"));
            match key.as_str() {
                "n" => {
                    cfg.n = if value == "auto" {
                        RingSize::Auto
                    } else {
                        RingSize::Fixed(parse_int(value).map_err(bad)?)
                    }
                }
                "steps" => cfg.steps = parse_int(value).map_err(bad)?,
                "t" => cfg.t = parse_complex(value).map_err(bad)?,
                "r" => {
                    cfg.r = parse_complex(value).map_err(bad)?;
                    r_given = true;
                }
                "phi" => cfg.phi = parse_real(value).map_err(bad)?,
                "phi_placement" => cfg.phi_placement = value.parse().map_err(bad)?,
                "start" => cfg.start = value.parse().map_err(bad)?,
                "seed" => cfg.seed = value.parse().map_err(|e| bad(format!("{e}")))?,
                "distribution" => cfg.distribution = value.parse().map_err(bad)?,
                "m" => cfg.m = parse_int(value).map_err(bad)?,
                "window" => cfg.window = parse_int(value).map_err(bad)?,
                "spectrum" => cfg.spectrum = value.parse().map_err(bad)?,
                "barrier" => cfg.barrier = parse_barrier(value).map_err(bad)?,
                "theta_points" => cfg.theta_points = parse_int(value).map_err(bad)?,
                "theta_min" => cfg.theta_min = parse_real(value).map_err(bad)?,
                "theta_max" => cfg.theta_max = parse_real(value).map_err(bad)?,
                _ => unreachable!("keys are checked on insert"),
            }
        }
        if !r_given {
            cfg.r = Complex64::new((1.0 - cfg.t.norm_sqr()).max(0.0).sqrt(), 0.0);
        }
        if cfg.phi != 0.0 && cfg.phi_placement == Placement::None && !self.values.contains_key("phi_placement") {
            cfg.phi_placement = Placement::Even;
        }
        Ok(cfg)
    }
}

impl Config {
    /// Canonical `key=value` pairs; parsing them back yields an equal config.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            (
                "n",
                match self.n {
                    RingSize::Auto => "auto".into(),
                    RingSize::Fixed(n) => n.to_string(),
                },
            ),
            ("steps", self.steps.to_string()),
            ("t", format_complex(self.t)),
            ("r", format_complex(self.r)),
            ("phi", format_real(self.phi)),
            ("phi_placement", self.phi_placement.to_string()),
            ("start", self.start.to_string()),
            ("seed", self.seed.to_string()),
            ("distribution", self.distribution.to_string()),
            ("m", self.m.to_string()),
            ("window", self.window.to_string()),
            ("spectrum", self.spectrum.to_string()),
            (
                "barrier",
                self.barrier
                    .iter()
                    .map(|b| format!("{} {} {}", format_complex(b.t), format_complex(b.r), format_real(b.phi)))
                    .collect::<Vec<_>>()
                    .join("; "),
            ),
            ("theta_points", self.theta_points.to_string()),
            ("theta_min", format_real(self.theta_min)),
            ("theta_max", format_real(self.theta_max)),
        ]
    }
}

fn parse_int(s: &str) -> Result<usize, String> {
    s.replace('_', "")
        .parse()
        .map_err(|_| format!("expected a non-negative integer, got '{s}'"))
}

/// Plain decimal, or `[coef][*]pi[/den]`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = if let Some(idx) = s.find("pi") {
        let (head, tail) = (s[..idx].trim().trim_end_matches('*').trim(), &s[idx + 2..]);
        let coef = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| format!("bad coefficient in '{s}'"))?,
        };
        let den = match tail.trim() {
            "" => 1.0,
            d => d
                .strip_prefix('/')
                .and_then(|d| d.trim().parse::<f64>().ok())
                .ok_or_else(|| format!("bad denominator in '{s}'"))?,
        };
        coef * PI / den
    } else {
        s.parse::<f64>().map_err(|_| format!("expected a real number, got '{s}'"))?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

/// `mag@phase`, `re+imi`, `imi` or a bare real.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    if let Some((mag, phase)) = s.split_once('@') {
        let mag = parse_real(mag)?;
        if mag < 0.0 {
            return Err(format!("negative magnitude in '{s}'"));
        }
        return Ok(Complex64::from_polar(mag, parse_real(phase)?));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(s)?, 0.0));
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x.strip_prefix('+').unwrap_or(x),
    };
    let bad = || format!("expected mag@phase or re+imi, got '{s}'");
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err(bad())
    }
}

/// Shortest text that parses back to the same bits.
pub fn format_real(x: f64) -> String {
    format!("{x:?}")
}

pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { "-" } else { "+" };
    format!("{:?}{sign}{:?}i", z.re, z.im.abs())
}

/// `t r phi; t r phi; ...`
fn parse_barrier(s: &str) -> Result<Vec<BarrierVertex>, String> {
    let mut out = Vec::new();
    for (k, part) in s.split(';').enumerate() {
        let fields: Vec<_> = part.split_whitespace().collect();
        let (t, r, phi) = match fields.as_slice() {
            [t, r] => (*t, *r, "0"),
            [t, r, phi] => (*t, *r, *phi),
            _ => return Err(format!("vertex {k}: expected 't r [phi]', got '{}'", part.trim())),
        };
        out.push(BarrierVertex {
            t: parse_complex(t).map_err(|e| format!("vertex {k}: {e}"))?,
            r: parse_complex(r).map_err(|e| format!("vertex {k}: {e}"))?,
            phi: parse_real(phi).map_err(|e| format!("vertex {k}: {e}"))?,
        });
    }
    Ok(out)
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($ty::$variant),)+
                    _ => Err(format!(
                        "expected one of {}, got '{s}'",
                        [$($text),+].join("/")
                    )),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$variant => $text,)+ })
            }
        }
    };
}

keyword_enum!(Placement { None => "none", Even => "even", Odd => "odd", All => "all" });
keyword_enum!(DistributionKind { Edge => "edge", Vertex => "vertex" });
keyword_enum!(SpectrumKind { Cycle => "cycle", TwoPeriodic => "two-periodic" });

impl FromStr for Start {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(Start::Uniform),
            "random" => Ok(Start::Random),
            _ => {
                let parsed = s
                    .split_once(',')
                    .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
                match parsed {
                    Some((a, b)) => Ok(Start::Edge(a, b)),
                    None => Err(format!("expected 'tail,head', 'uniform' or 'random', got '{s}'")),
                }
            }
        }
    }
}

impl fmt::Display for Start {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Start::Edge(a, b) => write!(f, "{a},{b}"),
            Start::Uniform => f.write_str("uniform"),
            Start::Random => f.write_str("random"),
        }
    }
}
