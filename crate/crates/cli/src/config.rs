//! Flat key-value experiment configuration: one `key = value` per line,
//! lists comma-separated, `#` starts a comment.

use std::collections::BTreeMap;
use std::path::PathBuf;

use dnwr_core::{time_fn, ArrangementKind, Mode, SolverError, TimeFn};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("{0}")]
    Setup(#[from] SolverError),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

fn config_err(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Named interface initializer usable from config files.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Initializer {
    /// t^2
    T2,
    /// t
    T,
    /// sin(t)
    Sin,
    /// t on (0, 0.4], t^2 on (0.4, 0.8], sin(t) beyond 0.8 (the last
    /// branch extends past t = 1).
    Piecewise,
    /// 0
    Zero,
}

impl Initializer {
    pub const ALL: [Initializer; 5] = [
        Initializer::T2,
        Initializer::T,
        Initializer::Sin,
        Initializer::Piecewise,
        Initializer::Zero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Initializer::T2 => "t2",
            Initializer::T => "t",
            Initializer::Sin => "sin",
            Initializer::Piecewise => "piecewise",
            Initializer::Zero => "zero",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.name() == s)
    }

    pub fn to_fn(self) -> TimeFn {
        match self {
            Initializer::T2 => time_fn(|t| t * t),
            Initializer::T => time_fn(|t| t),
            Initializer::Sin => time_fn(f64::sin),
            Initializer::Piecewise => time_fn(|t| {
                if t <= 0.4 {
                    t
                } else if t <= 0.8 {
                    t * t
                } else {
                    t.sin()
                }
            }),
            Initializer::Zero => time_fn(|_| 0.0),
        }
    }
}

/// How the domain is split into strips.
#[derive(Clone, Debug, PartialEq)]
pub enum Strips {
    EqualCount(usize),
    Sizes(Vec<f64>),
}

/// One experiment: a problem, a decomposition, an arrangement, and the
/// list of relaxation weights to run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub arrangement: ArrangementKind,
    pub mode: Mode,
    pub domain: (f64, f64),
    pub strips: Strips,
    pub nu: f64,
    pub a1: f64,
    pub a2: f64,
    pub tau: f64,
    pub horizon: f64,
    pub dx: f64,
    pub dt: f64,
    pub thetas: Vec<f64>,
    pub initializers: Vec<Initializer>,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub output: Option<PathBuf>,
}

pub fn parse_arrangement(s: &str) -> Option<ArrangementKind> {
    match s {
        "sweep" => Some(ArrangementKind::Sweep),
        "red-black" | "redblack" => Some(ArrangementKind::RedBlack),
        "central-outward" | "central" => Some(ArrangementKind::CentralOutward),
        _ => None,
    }
}

/// Parse the flat key-value format. Unknown keys are rejected so typos
/// surface instead of silently falling back to defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(config_err(
                line,
                format!("line {} is not of the form `key = value`", lineno + 1),
            ));
        };
        let key = key.trim().to_string();
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(config_err(&key, "key given more than once"));
        }
    }

    let known = [
        "arrangement",
        "mode",
        "domain",
        "subdomains",
        "sizes",
        "nu",
        "a1",
        "a2",
        "tau",
        "horizon",
        "dx",
        "dt",
        "theta",
        "init",
        "tolerance",
        "max_iterations",
        "output",
    ];
    for key in map.keys() {
        if !known.contains(&key.as_str()) {
            return Err(config_err(key, "unknown key"));
        }
    }

    let require = |key: &str| -> Result<&String, CliError> {
        map.get(key).ok_or_else(|| config_err(key, "missing"))
    };
    let float = |key: &str, raw: &str| -> Result<f64, CliError> {
        raw.parse::<f64>()
            .map_err(|_| config_err(key, format!("`{raw}` is not a number")))
    };
    let float_list = |key: &str, raw: &str| -> Result<Vec<f64>, CliError> {
        raw.split(',').map(|part| float(key, part.trim())).collect()
    };

    let arrangement_raw = require("arrangement")?;
    let arrangement = parse_arrangement(arrangement_raw).ok_or_else(|| {
        config_err(
            "arrangement",
            format!("`{arrangement_raw}` is not one of sweep, red-black, central-outward"),
        )
    })?;

    let mode = match map.get("mode").map(String::as_str) {
        None | Some("error") => Mode::Error,
        Some("full") => Mode::Full,
        Some(other) => {
            return Err(config_err(
                "mode",
                format!("`{other}` is not one of error, full"),
            ))
        }
    };

    let domain_list = float_list("domain", require("domain")?)?;
    let domain = match domain_list.as_slice() {
        [a, b] => (*a, *b),
        _ => {
            return Err(config_err(
                "domain",
                "expected exactly two values: x_left, x_right",
            ))
        }
    };

    let strips = match (map.get("subdomains"), map.get("sizes")) {
        (Some(count), None) => {
            let n: usize = count
                .parse()
                .map_err(|_| config_err("subdomains", format!("`{count}` is not a count")))?;
            Strips::EqualCount(n)
        }
        (None, Some(sizes)) => Strips::Sizes(float_list("sizes", sizes)?),
        (Some(_), Some(_)) => {
            return Err(config_err(
                "subdomains",
                "give either `subdomains` or `sizes`, not both",
            ))
        }
        (None, None) => return Err(config_err("subdomains", "missing (or give `sizes`)")),
    };

    let nu = match map.get("nu") {
        Some(raw) => float("nu", raw)?,
        None => 1.0,
    };
    let a1 = match map.get("a1") {
        Some(raw) => float("a1", raw)?,
        None => 0.0,
    };
    let a2 = match map.get("a2") {
        Some(raw) => float("a2", raw)?,
        None => 0.0,
    };
    let tau = float("tau", require("tau")?)?;
    let horizon = float("horizon", require("horizon")?)?;
    let dx = float("dx", require("dx")?)?;
    let dt = float("dt", require("dt")?)?;

    let thetas = match map.get("theta") {
        Some(raw) => float_list("theta", raw)?,
        None => vec![0.5],
    };
    for &theta in &thetas {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(config_err("theta", format!("{theta} is outside (0, 1]")));
        }
    }

    let initializers = match map.get("init") {
        Some(raw) => raw
            .split(',')
            .map(|part| {
                let part = part.trim();
                Initializer::parse(part).ok_or_else(|| {
                    config_err(
                        "init",
                        format!(
                            "`{part}` is not one of {}",
                            Initializer::ALL.map(|i| i.name()).join(", ")
                        ),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![Initializer::T2],
    };

    let tolerance = match map.get("tolerance") {
        Some(raw) => float("tolerance", raw)?,
        None => 1e-6,
    };
    let max_iterations = match map.get("max_iterations") {
        Some(raw) => raw
            .parse::<usize>()
            .map_err(|_| config_err("max_iterations", format!("`{raw}` is not a count")))?,
        None => 100,
    };
    let output = map.get("output").map(PathBuf::from);

    Ok(ExperimentConfig {
        arrangement,
        mode,
        domain,
        strips,
        nu,
        a1,
        a2,
        tau,
        horizon,
        dx,
        dt,
        thetas,
        initializers,
        tolerance,
        max_iterations,
        output,
    })
}
