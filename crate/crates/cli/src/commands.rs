use lattice_area::converge::{limit_report, regime_dispatch, signed_report, Order};
use lattice_area::enumerate::{exact_distribution, moment_dp};
use lattice_area::exact::render as render_ratio;
use lattice_area::kernel::{
    assumption_report, branches_with, open_grid, solve_with_branches, structural_constants, verify_puiseux,
};
use lattice_area::limits::{cnt_table, dk_dpm_tables, kn_sequence, lpm_labs_tables, qn_sequence, qnt_table};
use lattice_area::polyomino::{cc_area_moments, cc_brute_oracle, cc_convergence, cc_enumerate, cc_structural_constants};
use lattice_area::selftest::run_selftest;
use lattice_area::steps::{characteristics, parse_step_set};
use lattice_area::{Error, LimitKind, LimitTables, PathClass, Result, SpecFormat, StepSet, TableKind};
use serde_json::json;

use crate::args::{Command, KernelCommand, PolyominoCommand};
use crate::config::Settings;
use crate::render::Report;

/// A finished command: the report plus whether the run itself counts as a failure
/// (only `selftest` with a failing check).
pub struct Outcome {
    pub report: Report,
    pub failed: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, failed: false }
    }
}

pub fn name(command: &Command) -> &'static str {
    match command {
        Command::Analyze(_) => "analyze",
        Command::Enumerate(_) => "enumerate",
        Command::Moments(_) => "moments",
        Command::Limits(_) => "limits",
        Command::Kernel(k) => match k {
            KernelCommand::Profile(_) => "kernel profile",
            KernelCommand::Branches(_) => "kernel branches",
            KernelCommand::Solve(_) => "kernel solve",
            KernelCommand::Assumptions(_) => "kernel assumptions",
            KernelCommand::Puiseux(_) => "kernel puiseux",
        },
        Command::Polyomino(p) => match p {
            PolyominoCommand::Enumerate(_) => "polyomino enumerate",
            PolyominoCommand::Moments(_) => "polyomino moments",
            PolyominoCommand::Converge(_) => "polyomino converge",
            PolyominoCommand::Profile => "polyomino profile",
            PolyominoCommand::Brute(_) => "polyomino brute",
        },
        Command::Converge(_) => "converge",
        Command::Selftest => "selftest",
    }
}

pub fn run(command: &Command, cfg: &Settings) -> Result<Outcome> {
    match command {
        Command::Analyze(_) => analyze(cfg).map(Into::into),
        Command::Enumerate(_) => enumerate(cfg).map(Into::into),
        Command::Moments(_) => moments(cfg).map(Into::into),
        Command::Limits(_) => limits(cfg).map(Into::into),
        Command::Kernel(k) => kernel(k, cfg).map(Into::into),
        Command::Polyomino(p) => polyomino(p, cfg).map(Into::into),
        Command::Converge(_) => converge(cfg).map(Into::into),
        Command::Selftest => Ok(selftest()),
    }
}

fn step_set(cfg: &Settings) -> Result<StepSet> {
    let spec = Settings::require(&cfg.steps, "steps")?;
    let format = match cfg.steps_format.as_deref() {
        None | Some("compact") => SpecFormat::Compact,
        Some("json") => SpecFormat::Json,
        Some(other) => return Err(Error::Config(format!("unknown step format {other:?}"))),
    };
    let s = parse_step_set(spec, format)?;
    let p = characteristics(&s).period;
    if p != 1 {
        eprintln!("warning: step set {} is periodic (period {p}); lengths not divisible by {p} may have no excursions or bridges", s.to_compact());
    }
    Ok(s)
}

fn class(cfg: &Settings) -> Result<PathClass> {
    Settings::require(&cfg.class, "class")?.parse()
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| Error::InternalInconsistency(format!("csv: {e}")))?;
    Ok(buf)
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn flat_pairs(v: &serde_json::Value) -> Vec<(String, String)> {
    match v {
        serde_json::Value::Object(m) => m
            .iter()
            .map(|(k, v)| {
                let text = match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k.clone(), text)
            })
            .collect(),
        _ => vec![],
    }
}

fn analyze(cfg: &Settings) -> Result<Report> {
    let s = step_set(cfg)?;
    let ch = characteristics(&s);
    let profile = structural_constants::<f64>(&s)?;
    let info = regime_dispatch(&s)?;
    let json = json!({
        "step_set": s.to_compact(),
        "c": s.c(),
        "d": s.d(),
        "drift": render_ratio(&ch.drift),
        "variance": render_ratio(&ch.variance),
        "period": ch.period,
        "aperiodic": ch.aperiodic,
        "tau": profile.tau,
        "rho": profile.rho,
        "beta": profile.beta,
        "regime": info.regime,
        "area_scale": info.area_scale,
        "meander_limit": info.meander_limit,
        "excursion_limit": info.excursion_limit,
    });
    let keys = [
        "step_set", "c", "d", "drift", "variance", "period", "aperiodic", "tau", "rho", "beta", "regime",
        "area_scale", "meander_limit", "excursion_limit",
    ];
    let pairs = keys
        .iter()
        .map(|&k| {
            let v = match &json[k] {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            (k.to_string(), v)
        })
        .collect();
    Ok(Report::key_values(pairs, json))
}

fn enumerate(cfg: &Settings) -> Result<Report> {
    let s = step_set(cfg)?;
    let class = class(cfg)?;
    let ms = Settings::require(&cfg.m, "m")?;
    let budget = cfg.budget()?;
    let mut buf = Vec::new();
    for (i, &m) in ms.iter().enumerate() {
        let d = exact_distribution(&s, class, m, budget)?;
        buf.extend(csv_bytes(|b| d.write_csv(b, i == 0))?);
    }
    if buf.is_empty() {
        return Err(Error::Config("--m needs at least one length".into()));
    }
    Report::from_csv(&buf, serde_json::Value::Null)
}

fn single(values: &[usize], name: &str) -> Result<usize> {
    match values {
        [v] => Ok(*v),
        _ => Err(Error::Config(format!("--{name} takes a single value here"))),
    }
}

fn moments(cfg: &Settings) -> Result<Report> {
    let s = step_set(cfg)?;
    let class = class(cfg)?;
    let m = single(Settings::require(&cfg.m, "m")?, "m")?;
    let table = moment_dp(&s, class, m, cfg.n.unwrap_or(2), cfg.t.unwrap_or(0), cfg.budget()?)?;
    Report::from_csv(&csv_bytes(|b| table.write_csv(b, true))?, serde_json::Value::Null)
}

fn limits(cfg: &Settings) -> Result<Report> {
    let n = cfg.n.unwrap_or(4);
    let t = cfg.t.unwrap_or(0);
    match (&cfg.kind, &cfg.table) {
        (Some(_), Some(_)) => Err(Error::Config("give either --kind or --table, not both".into())),
        (None, None) => Err(Error::Config("missing required setting --kind (or --table)".into())),
        (None, Some(name)) => {
            let table = match name.parse::<TableKind>()? {
                TableKind::K => kn_sequence(n),
                TableKind::Q => qn_sequence(n),
                TableKind::C => cnt_table(n, t),
                TableKind::Qnt => qnt_table(n, t),
                TableKind::Dk => dk_dpm_tables(n).0,
                TableKind::Dpm => dk_dpm_tables(n).1,
                TableKind::Lpm => lpm_labs_tables(n, t)?.0,
                TableKind::Labs => lpm_labs_tables(n, t)?.1,
            };
            Report::from_csv(&csv_bytes(|b| table.write_csv(b))?, table.to_json())
        }
        (Some(kind), None) => {
            let kind: LimitKind = kind.parse()?;
            let tables = LimitTables::new(n, t)?;
            let orders: Vec<Vec<usize>> = match kind {
                LimitKind::Bea | LimitKind::Bma => (0..=n).map(|i| vec![i]).collect(),
                LimitKind::Rayleigh => (0..=cfg.t.unwrap_or(n)).map(|i| vec![i]).collect(),
                LimitKind::MeanderJoint | LimitKind::WalkAbs => {
                    (0..=n).flat_map(|i| (0..=t).map(move |j| vec![i, j])).collect()
                }
                LimitKind::WalkSigned => (0..=n)
                    .flat_map(|k| (0..=n - k).flat_map(move |l| (0..=t).map(move |j| vec![k, l, j])))
                    .collect(),
            };
            let mut r = Report::new(&["kind", "order", "exact", "float"]);
            let mut rows = Vec::new();
            for o in orders {
                let v = match kind {
                    LimitKind::Rayleigh => lattice_area::limits::limiting_moment(kind, &o)?,
                    _ => tables.moment(kind, &o)?,
                };
                let order = o.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":");
                r.push(vec![format!("{kind:?}"), order.clone(), v.to_string(), format!("{:.15e}", v.to_f64())]);
                rows.push(json!({ "kind": kind, "order": o, "exact": v.to_string(), "float": v.to_f64() }));
            }
            r.json = serde_json::Value::Array(rows);
            Ok(r)
        }
    }
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Config(format!("grid must be a:b:n, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(a < b) || n == 0 {
        return Err(bad());
    }
    Ok(open_grid(a, b, n))
}

fn kernel(k: &KernelCommand, cfg: &Settings) -> Result<Report> {
    let s = step_set(cfg)?;
    let tol = cfg.tolerances()?.kernel;
    let profile = structural_constants::<f64>(&s)?;
    match k {
        KernelCommand::Profile(_) => {
            let json = to_json(&profile);
            Ok(Report::key_values(flat_pairs(&json), json))
        }
        KernelCommand::Branches(_) => {
            let zs = Settings::require(&cfg.z, "z")?;
            let mut r = Report::new(&["z", "branch", "index", "re", "im", "modulus"]);
            let mut all = Vec::new();
            for &z in zs {
                let b = branches_with(&s, z, profile.rho, &tol)?;
                for (kind, list) in [("small", &b.small), ("large", &b.large)] {
                    for (i, u) in list.iter().enumerate() {
                        r.push(vec![z.to_string(), kind.into(), i.to_string(), u.re.to_string(), u.im.to_string(), u.norm().to_string()]);
                    }
                }
                all.push(b.to_json());
            }
            r.json = serde_json::Value::Array(all);
            Ok(r)
        }
        KernelCommand::Solve(_) => {
            let zs = Settings::require(&cfg.z, "z")?;
            let us = cfg.u.clone().unwrap_or_default();
            let mut r = Report::new(&["z", "quantity", "value"]);
            let mut all = Vec::new();
            for &z in zs {
                let b = branches_with(&s, z, profile.rho, &tol)?;
                let sol = solve_with_branches(&s, &b, &us, &tol)?;
                let zt = z.to_string();
                for (i, g) in sol.g_values.iter().enumerate() {
                    r.push(vec![zt.clone(), format!("G_{i}"), g.to_string()]);
                }
                for (u, f) in &sol.f_at {
                    r.push(vec![zt.clone(), format!("F(u={u})"), f.to_string()]);
                }
                r.push(vec![zt.clone(), "condition".into(), sol.condition.to_string()]);
                r.push(vec![zt.clone(), "cramer_deviation".into(), sol.cramer_deviation.to_string()]);
                r.push(vec![zt.clone(), "laplace_deviation".into(), sol.laplace_deviation.to_string()]);
                r.push(vec![zt.clone(), "vandermonde_deviation".into(), sol.vandermonde_deviation.to_string()]);
                r.push(vec![zt, "cross_check_ok".into(), sol.cross_check_ok.to_string()]);
                all.push(to_json(&sol));
            }
            r.json = serde_json::Value::Array(all);
            Ok(r)
        }
        KernelCommand::Assumptions(_) => {
            let grid = match &cfg.grid {
                Some(g) => parse_grid(g)?,
                None => open_grid(0.0, profile.rho, 20),
            };
            let rep = assumption_report(&s, &grid)?;
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            let mut r = Report::new(&["z", "small_distinct", "modulus_gap", "det_proxy", "conjugate_pairs", "passed", "error"]);
            let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
            for c in &rep.checks {
                r.push(vec![
                    c.z.to_string(),
                    opt(c.small_distinct),
                    opt(c.modulus_gap),
                    opt(c.det_proxy),
                    c.conjugate_pairs.map_or(String::new(), |b| b.to_string()),
                    c.passed.to_string(),
                    c.error.clone().unwrap_or_default(),
                ]);
            }
            r.json = to_json(&rep);
            Ok(r)
        }
        KernelCommand::Puiseux(_) => {
            let grid = match &cfg.grid {
                Some(g) => parse_grid(g)?,
                None => open_grid(0.8 * profile.rho, profile.rho, 10),
            };
            let rep = verify_puiseux(&s, &grid)?;
            let mut r = Report::new(&["z", "u1", "amplitude", "deviation"]);
            for row in &rep.rows {
                r.push(vec![row.z.to_string(), row.u1.to_string(), row.amplitude.to_string(), row.deviation.to_string()]);
            }
            if !rep.success {
                eprintln!("warning: u_1 does not approach the square-root law within tolerance on this grid");
            }
            r.json = to_json(&rep);
            Ok(r)
        }
    }
}

fn polyomino(p: &PolyominoCommand, cfg: &Settings) -> Result<Report> {
    let budget = cfg.budget()?;
    match p {
        PolyominoCommand::Enumerate(_) => {
            let c = cc_enumerate(*Settings::require(&cfg.hp_max, "hp_max")?, budget)?;
            Report::from_csv(&csv_bytes(|b| c.write_csv(b))?, serde_json::Value::Null)
        }
        PolyominoCommand::Moments(_) => {
            let t = cc_area_moments(*Settings::require(&cfg.hp_max, "hp_max")?, cfg.n.unwrap_or(2), budget)?;
            Report::from_csv(&csv_bytes(|b| t.write_csv(b))?, serde_json::Value::Null)
        }
        PolyominoCommand::Converge(_) => {
            let hp = Settings::require(&cfg.hp, "hp")?;
            let rep = cc_convergence(hp, budget)?;
            let mut r = Report::new(&["hp", "mean_area", "rescaled", "limit", "rel_error", "trend"]);
            for row in &rep.rows {
                r.push(vec![
                    row.hp.to_string(),
                    row.mean_area.clone(),
                    format!("{:.12e}", row.rescaled),
                    format!("{:.12e}", row.limit),
                    format!("{:.6e}", row.rel_error),
                    rep.decreasing.to_string(),
                ]);
            }
            r.json = to_json(&rep);
            Ok(r)
        }
        PolyominoCommand::Profile => {
            let json = to_json(&cc_structural_constants()?);
            Ok(Report::key_values(flat_pairs(&json), json))
        }
        PolyominoCommand::Brute(_) => {
            let b = cc_brute_oracle(*Settings::require(&cfg.area_max, "area_max")?);
            let valid = b.valid_hp_max();
            let mut r = Report::new(&["hp", "area", "count"]);
            for (&(hp, area), &v) in &b.column_convex {
                if hp <= valid {
                    r.push(vec![hp.to_string(), area.to_string(), v.to_string()]);
                }
            }
            Ok(r)
        }
    }
}

fn parse_orders(list: &[String], arity: &[usize]) -> Result<Vec<Vec<usize>>> {
    list.iter()
        .map(|o| {
            let parts: Result<Vec<usize>> = o
                .split(':')
                .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad order {o:?}"))))
                .collect();
            let parts = parts?;
            if arity.contains(&parts.len()) {
                Ok(parts)
            } else {
                Err(Error::Config(format!("order {o:?} must have {arity:?} components")))
            }
        })
        .collect()
}

fn converge(cfg: &Settings) -> Result<Report> {
    let ms = Settings::require(&cfg.m, "m")?;
    let orders = Settings::require(&cfg.orders, "orders")?;
    let budget = cfg.budget()?;
    let report = if cfg.signed.unwrap_or(false) {
        if let Some(spec) = &cfg.steps {
            let s = step_set(cfg)?;
            if s != StepSet::bernoulli() {
                return Err(Error::Config(format!("signed areas are only available for -1:1,1:1, got {spec}")));
            }
        }
        let orders: Vec<Order> = parse_orders(orders, &[2, 3])?
            .into_iter()
            .map(|o| if o.len() == 3 { Order::Signed(o[0], o[1], o[2]) } else { Order::Joint(o[0], o[1]) })
            .collect();
        signed_report(ms, &orders, budget)?
    } else {
        let s = step_set(cfg)?;
        let orders: Vec<(usize, usize)> = parse_orders(orders, &[1, 2])?
            .into_iter()
            .map(|o| (o[0], o.get(1).copied().unwrap_or(0)))
            .collect();
        limit_report(&s, class(cfg)?, ms, &orders, budget)?
    };
    let buf = csv_bytes(|b| report.write_csv(b, true))?;
    Report::from_csv(&buf, to_json(&report))
}

fn selftest() -> Outcome {
    let rows = run_selftest();
    let mut r = Report::new(&["module", "check", "result", "detail"]);
    for row in &rows {
        r.push(vec![
            row.module.into(),
            row.check.into(),
            if row.passed { "PASS" } else { "FAIL" }.into(),
            row.detail.clone(),
        ]);
    }
    r.json = to_json(&rows);
    Outcome { failed: rows.iter().any(|r| !r.passed), report: r }
}
