//! Resolved run configuration: command-line values layered over an optional TOML file.

use std::path::{Path, PathBuf};

use lattice_area::{Error, MemoryBudget, Result, Tolerances};
use serde::{Deserialize, Serialize};

use crate::args::{Command, Format, GlobalArgs, KernelCommand, PolyominoCommand, StepArgs};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memory_budget: Option<Budget>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hp_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hp: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub area_max: Option<usize>,
    /// overrides for the numeric thresholds, same layout as the embedded tolerance file
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<toml::Table>,
}

/// A byte count, written as an integer or as a string with an optional K/M/G suffix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Budget {
    Bytes(u64),
    Text(String),
}

impl Budget {
    pub fn bytes(&self) -> Result<u64> {
        match self {
            Budget::Bytes(b) => Ok(*b),
            Budget::Text(s) => parse_bytes(s),
        }
    }
}

fn parse_bytes(text: &str) -> Result<u64> {
    let t = text.trim();
    let (digits, mult) = match t.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&t[..t.len() - 1], 1u64 << 10),
        Some('M') => (&t[..t.len() - 1], 1 << 20),
        Some('G') => (&t[..t.len() - 1], 1 << 30),
        _ => (t, 1),
    };
    digits
        .trim()
        .parse::<u64>()
        .ok()
        .and_then(|v| v.checked_mul(mult))
        .ok_or_else(|| Error::Config(format!("invalid memory budget {text:?}")))
}

fn step_settings(s: &StepArgs, out: &mut Settings) {
    out.steps = s.steps.clone();
    out.steps_format = s.steps_format.clone();
}

/// Values given on the command line, as a sparse `Settings`.
pub fn from_command(global: &GlobalArgs, command: &Command) -> Settings {
    let mut s = Settings {
        format: global.format,
        output: global.output.clone(),
        memory_budget: global.memory_budget.clone().map(Budget::Text),
        threads: global.threads,
        ..Settings::default()
    };
    match command {
        Command::Analyze(a) => step_settings(a, &mut s),
        Command::Enumerate(a) => {
            step_settings(&a.steps, &mut s);
            s.class = a.class.clone();
            s.m = a.m.clone();
        }
        Command::Moments(a) => {
            step_settings(&a.steps, &mut s);
            s.class = a.class.clone();
            s.m = a.m.clone();
            s.n = a.n;
            s.t = a.t;
        }
        Command::Limits(a) => {
            s.kind = a.kind.clone();
            s.table = a.table.clone();
            s.n = a.n;
            s.t = a.t;
        }
        Command::Kernel(k) => match k {
            KernelCommand::Profile(a) => step_settings(a, &mut s),
            KernelCommand::Branches(a) | KernelCommand::Solve(a) => {
                step_settings(&a.steps, &mut s);
                s.z = a.z.clone();
                s.u = a.u.clone();
            }
            KernelCommand::Assumptions(a) | KernelCommand::Puiseux(a) => {
                step_settings(&a.steps, &mut s);
                s.grid = a.grid.clone();
            }
        },
        Command::Polyomino(p) => match p {
            PolyominoCommand::Enumerate(a) | PolyominoCommand::Moments(a) => {
                s.hp_max = a.hp_max;
                s.n = a.n;
            }
            PolyominoCommand::Converge(a) => s.hp = a.hp.clone(),
            PolyominoCommand::Profile => {}
            PolyominoCommand::Brute(a) => s.area_max = a.area_max,
        },
        Command::Converge(a) => {
            step_settings(&a.steps, &mut s);
            s.class = a.class.clone();
            s.m = a.m.clone();
            s.orders = a.orders.clone();
            s.signed = a.signed.then_some(true);
        }
        Command::Selftest => {}
    }
    s
}

/// Layers `cli` over the contents of the config file (if any); command-line values win.
pub fn resolve(cli: Settings, file: Option<&Path>) -> Result<Settings> {
    let Some(path) = file else { return Ok(cli) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
    let mut base: toml::Value =
        toml::from_str(&text).map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
    let over = toml::Value::try_from(&cli).map_err(|e| Error::Config(e.to_string()))?;
    lattice_area::tolerances::merge(&mut base, over);
    base.try_into().map_err(|e: toml::de::Error| Error::Config(format!("config file {}: {e}", path.display())))
}

impl Settings {
    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Table)
    }

    pub fn budget(&self) -> Result<MemoryBudget> {
        match &self.memory_budget {
            Some(b) => Ok(MemoryBudget(b.bytes()?)),
            None => Ok(MemoryBudget::DEFAULT),
        }
    }

    pub fn tolerances(&self) -> Result<Tolerances> {
        match &self.tolerances {
            None => Ok(Tolerances::embedded().clone()),
            Some(t) => Tolerances::with_overrides(&toml::to_string(t).map_err(|e| Error::Config(e.to_string()))?),
        }
    }

    pub fn require<'a, T>(value: &'a Option<T>, name: &str) -> Result<&'a T> {
        value.as_ref().ok_or_else(|| Error::Config(format!("missing required setting --{}", name.replace('_', "-"))))
    }

    /// `key = value` lines describing the run, in a fixed order.
    pub fn echo(&self, command: &str) -> Vec<(String, String)> {
        let mut lines = vec![
            ("command".to_string(), command.to_string()),
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("format".to_string(), format!("{:?}", self.format()).to_lowercase()),
            ("memory_budget".to_string(), self.budget().map(|b| b.0.to_string()).unwrap_or_default()),
            ("threads".to_string(), self.threads.map_or("auto".to_string(), |t| t.to_string())),
        ];
        let value = toml::Value::try_from(self).unwrap_or(toml::Value::Table(Default::default()));
        if let toml::Value::Table(t) = value {
            for (k, v) in t {
                if matches!(k.as_str(), "format" | "memory_budget" | "threads") {
                    continue;
                }
                let text = match v {
                    toml::Value::String(s) => s,
                    other => other.to_string(),
                };
                lines.push((k, text));
            }
        }
        lines
    }
}
