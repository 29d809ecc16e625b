//! The ten acceptance criteria as one runnable suite, over the configs
//! shipped in `configs/`.

use super::commands::run_command;
use super::config::{Overrides, RunConfig};
use crate::error::Result;
use crate::logresidue::{contour_suite, radial_suite};
use crate::report::{Check, Report};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

pub const CONFIGS: [(&str, &str); 11] = [
    ("c1_t2_shifted_laplace.toml", include_str!("../../../../configs/c1_t2_shifted_laplace.toml")),
    ("c2_t1_laplace.toml", include_str!("../../../../configs/c2_t1_laplace.toml")),
    ("c3_t1_variable.toml", include_str!("../../../../configs/c3_t1_variable.toml")),
    ("c4_t1_fourth_order_pair.toml", include_str!("../../../../configs/c4_t1_fourth_order_pair.toml")),
    ("c5_t1_commutator.toml", include_str!("../../../../configs/c5_t1_commutator.toml")),
    ("c5_t1_commutator_extended.toml", include_str!("../../../../configs/c5_t1_commutator_extended.toml")),
    ("c5_t1_commuting_control.toml", include_str!("../../../../configs/c5_t1_commuting_control.toml")),
    ("c8_cylinder_identity.toml", include_str!("../../../../configs/c8_cylinder_identity.toml")),
    ("c8_cylinder_sgo.toml", include_str!("../../../../configs/c8_cylinder_sgo.toml")),
    ("c9_cylinder_dirichlet.toml", include_str!("../../../../configs/c9_cylinder_dirichlet.toml")),
    ("c10_cylinder_iterated.toml", include_str!("../../../../configs/c10_cylinder_iterated.toml")),
];

/// Source of a shipped config by file name.
pub fn embedded_config(name: &str) -> Option<&'static str> {
    CONFIGS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// One acceptance criterion: a runner and its wall-clock budget.
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub limit_s: f64,
    pub run: fn() -> Result<Report>,
}

#[derive(Debug)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub seconds: f64,
    pub limit_s: f64,
    pub report: Option<Report>,
    pub error: Option<String>,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        let detail = match (&self.error, &self.report) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(r)) => {
                let failed = r.checks.iter().filter(|c| !c.pass).count();
                format!("{} checks, {failed} failed", r.checks.len())
            }
            _ => String::new(),
        };
        format!(
            "criterion {:>2} {}  {}  ({:.2} s of {:.0} s; {detail})",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.seconds,
            self.limit_s
        )
    }
}

/// Runs a shipped config through a command with no overrides.
pub fn run_embedded(name: &str, command: &str) -> Result<Report> {
    let src = embedded_config(name).ok_or_else(|| crate::Error::usage(format!("no shipped config `{name}`")))?;
    let mut cfg = RunConfig::parse(src)?;
    cfg.resolve(command, &Overrides::default());
    let mut report = run_command(command, &cfg)?;
    report.config = json!({ "file": name, "resolved": cfg.to_json() });
    Ok(report)
}

fn side(report: &Report, key: &str) -> Complex64 {
    let v = &report.data[key];
    Complex64::new(v[0].as_f64().unwrap_or(f64::NAN), v[1].as_f64().unwrap_or(f64::NAN))
}

fn pin(report: &mut Report, key: &str, label: &str, want: f64, tol: f64) {
    let got = side(report, key);
    report.push(Check::abs(&format!("{key} = {label}"), got, Complex64::new(want, 0.0), tol));
}

fn combine(command: &str, parts: Vec<Report>) -> Report {
    let mut out = Report::new(command);
    let mut configs = Vec::new();
    for p in parts {
        configs.push(p.config.clone());
        out.absorb(p);
    }
    out.config = Value::Array(configs);
    out
}

fn c1() -> Result<Report> {
    let mut r = run_embedded("c1_t2_shifted_laplace.toml", "verify-t14")?;
    pin(&mut r, "lhs", "-pi", -PI, 1e-8);
    pin(&mut r, "rhs", "-pi", -PI, 1e-8);
    Ok(r)
}

fn c2() -> Result<Report> {
    let mut r = run_embedded("c2_t1_laplace.toml", "verify-t14")?;
    pin(&mut r, "lhs", "0 exactly", 0.0, 0.0);
    pin(&mut r, "rhs", "0 exactly", 0.0, 0.0);
    Ok(r)
}

fn c3() -> Result<Report> {
    let mut r = run_embedded("c3_t1_variable.toml", "verify-t14")?;
    pin(&mut r, "lhs", "0", 0.0, 1e-8);
    pin(&mut r, "rhs", "0", 0.0, 1e-8);
    Ok(r)
}

fn c4() -> Result<Report> {
    let mut r = run_embedded("c4_t1_fourth_order_pair.toml", "verify-t22")?;
    pin(&mut r, "lhs", "-1", -1.0, 1e-6);
    pin(&mut r, "rhs", "-1", -1.0, 1e-6);
    Ok(r)
}

fn c5() -> Result<Report> {
    let stated = run_embedded("c5_t1_commutator.toml", "verify-t23")?;
    let extended = run_embedded("c5_t1_commutator_extended.toml", "verify-t23")?;
    let mut control = run_embedded("c5_t1_commuting_control.toml", "verify-t23")?;
    pin(&mut control, "lhs", "0 exactly (commuting control)", 0.0, 0.0);
    pin(&mut control, "rhs", "0 exactly (commuting control)", 0.0, 0.0);
    Ok(combine("verify-t23", vec![stated, extended, control]))
}

fn c6() -> Result<Report> {
    contour_suite(1e-8)
}

fn c7() -> Result<Report> {
    radial_suite(1e-8, 1e-6)
}

fn c8() -> Result<Report> {
    let mut id = run_embedded("c8_cylinder_identity.toml", "verify-t310")?;
    pin(&mut id, "lhs", "-1/2", -0.5, 1e-4);
    pin(&mut id, "rhs", "-1/2", -0.5, 1e-10);
    let sgo = run_embedded("c8_cylinder_sgo.toml", "verify-t310")?;
    Ok(combine("verify-t310", vec![id, sgo]))
}

fn c9() -> Result<Report> {
    let mut r = run_embedded("c9_cylinder_dirichlet.toml", "verify-ex53")?;
    pin(&mut r, "rhs", "-pi/2", -PI / 2.0, 1e-10);
    pin(&mut r, "lhs", "-pi/2", -PI / 2.0, 1e-3);
    Ok(r)
}

fn c10() -> Result<Report> {
    run_embedded("c10_cylinder_iterated.toml", "verify-t310")
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, title: "T2 -Lap + 1: C0 = -res(log P)/2 = -pi", limit_s: 60.0, run: c1 },
        Criterion { id: 2, title: "T1 -Lap: both sides 0, zeta anchor", limit_s: 10.0, run: c2 },
        Criterion { id: 3, title: "T1 -d^2 + 2 + cos x: both sides 0", limit_s: 120.0, run: c3 },
        Criterion { id: 4, title: "fourth-order pair on T1: difference defect -1", limit_s: 180.0, run: c4 },
        Criterion { id: 5, title: "commutator defect on T1", limit_s: 300.0, run: c5 },
        Criterion { id: 6, title: "contour identity over a rational family", limit_s: 5.0, run: c6 },
        Criterion { id: 7, title: "radial reduction of homogeneous terms", limit_s: 30.0, run: c7 },
        Criterion { id: 8, title: "half-cylinder model: trace defect -1/2", limit_s: 60.0, run: c8 },
        Criterion { id: 9, title: "Dirichlet cylinder: C0 = -pi/2, boundary term 0", limit_s: 120.0, run: c9 },
        Criterion { id: 10, title: "iterated resolvent matches the first power", limit_s: 60.0, run: c10 },
    ]
}

pub fn run_criterion(c: &Criterion) -> CriterionOutcome {
    let start = Instant::now();
    let res = (c.run)();
    let seconds = start.elapsed().as_secs_f64();
    let (report, error) = match res {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let pass = report.as_ref().is_some_and(|r| r.pass) && seconds < c.limit_s;
    CriterionOutcome {
        id: c.id,
        title: c.title,
        pass,
        seconds,
        limit_s: c.limit_s,
        report,
        error,
    }
}

/// Runs every criterion, writing one line per criterion to `out`.
///
/// Timings go to `out` only, so the returned report is reproducible.
pub fn verify_all(out: &mut dyn Write) -> Result<Report> {
    let mut all = Report::new("verify-all");
    let mut configs = Vec::new();
    let mut verdicts = Vec::new();
    for c in criteria() {
        let o = run_criterion(&c);
        writeln!(out, "{}", o.line())?;
        verdicts.push(json!({ "criterion": o.id, "title": o.title, "error": o.error }));
        match o.report {
            Some(mut r) => {
                r.command = format!("criterion {}", o.id);
                configs.push(json!({ "criterion": o.id, "config": r.config.clone() }));
                all.absorb(r);
            }
            None => {
                let mut f = Check::abs_re(&format!("criterion {} ran to completion", o.id), 1.0, 0.0, 0.0);
                f.abs_err = f64::INFINITY;
                all.push(f);
            }
        }
        if o.seconds >= o.limit_s {
            all.warn(format!("criterion {} exceeded its {:.0} s budget", o.id, o.limit_s));
            all.pass = false;
        }
    }
    all.config = Value::Array(configs);
    all.data = json!({ "criteria": verdicts });
    Ok(all)
}
