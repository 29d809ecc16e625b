use super::config::{GeometryConfig, RunConfig};
use crate::boundary::{verify_dirichlet_cylinder, verify_iterated, verify_t310_model, Ex53Options};
use crate::error::{Error, Result};
use crate::logresidue::{
    commutator_log_symbol, log_difference_symbol, log_symbol, log_transform_frozen, log_transform_term,
    noncommutative_residue, verify_t14, verify_t22, verify_t23, VerifyOptions, XDomain,
};
use crate::oracle::{
    fit_expansion, ray_samples, zeta_at_zero, ExpansionFit, FitBasis, FitOptions, OperatorSpec, SpectrumSpec,
    TraceOracle, ZetaReport,
};
use crate::parametrix::{parametrix_defect, resolvent_expansion, DifferentialOperator, PolyhomSymbol};
use crate::report::{Check, CsvRow, Report};
use crate::symexpr::Point;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::json;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn flag(identity: &str, ok: bool) -> Check {
    let mut c = Check::abs(identity, cx(0.0), cx(0.0), 0.0);
    if !ok {
        c.pass = false;
        c.abs_err = f64::INFINITY;
    }
    c
}

fn sym_opts(cfg: &RunConfig) -> VerifyOptions {
    let q = &cfg.quadrature;
    VerifyOptions {
        grid: q.grid.unwrap_or(16),
        pointwise: q.pointwise.unwrap_or(8),
        tol: cfg.tolerances.symbolic.unwrap_or(1e-8),
        rays: q.rays.unwrap_or(false),
    }
}

fn symbol_or_identity(cfg: &RunConfig, which: &str, n: usize) -> Result<(PolyhomSymbol, OperatorSpec)> {
    let s = match which {
        "a" => cfg.a.clone(),
        _ => cfg.a_prime.clone(),
    }
    .unwrap_or_default();
    Ok((s.symbol(n)?, s.spec(n)?))
}

pub fn run_command(command: &str, cfg: &RunConfig) -> Result<Report> {
    match command {
        "expand-resolvent" => expand_resolvent(cfg),
        "log-symbol" => log_symbol_cmd(cfg),
        "residue" => residue_cmd(cfg),
        "verify-t14" => t14(cfg),
        "verify-t22" => t22(cfg),
        "verify-t23" => t23(cfg),
        "verify-t310" => t310(cfg),
        "verify-ex53" => ex53(cfg),
        "fit" => fit_cmd(cfg),
        "oracle-zeta0" => zeta0(cfg),
        other => Err(Error::usage(format!("unknown command `{other}`"))),
    }
}

fn expand_resolvent(cfg: &RunConfig) -> Result<Report> {
    let cmd = "expand-resolvent";
    let n = cfg.torus_dim(cmd)?;
    let p = cfg.operator("p", cmd)?.build(n)?;
    let depth = cfg.depth.unwrap_or(n);
    let q = resolvent_expansion(&p, depth)?;
    let mut report = Report::new(cmd);
    report.push(flag("every term is quasi-homogeneous of its degree", q.check_homogeneity()?));

    // (p − λ) # q − 1 along ξ = t·ω, λ = −(t/2)^m
    let m = p.order() as i32;
    let x: Vec<f64> = (0..n).map(|i| 0.4 + 0.7 * i as f64).collect();
    let dir: Vec<f64> = (0..n).map(|i| if i == 0 { 0.8 } else { 0.6 / (n as f64 - 1.0).sqrt() }).collect();
    let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
    let pts: Vec<Point> = [8.0, 16.0, 32.0, 64.0]
        .iter()
        .map(|t: &f64| {
            let xi: Vec<f64> = dir.iter().map(|d| d / norm * t).collect();
            Point::new(&x, &xi).with_real_lambda(-(t / 2.0).powi(m))
        })
        .collect();
    let defect = parametrix_defect(&p, &q, &pts)?;
    for (jb, e) in &defect {
        report.rows.push(CsvRow::new("parametrix-defect", *jb, 0.0, cx(*e)));
    }
    let (first, last) = (defect[0], defect[defect.len() - 1]);
    let worst = defect.iter().map(|d| d.1).fold(0.0, f64::max);
    let want = -(depth as f64 + 1.0);
    if worst < 1e-12 {
        report.push(Check::abs_re("parametrix defect vanishes to rounding", worst, 0.0, 1e-12));
    } else {
        let slope = (last.1.ln() - first.1.ln()) / (last.0.ln() - first.0.ln());
        let mut c = Check::abs_re("parametrix defect decays like <xi>^-(J+1)", slope.max(want), want, 0.1)
            .with("observed_slope", slope);
        c.lhs = slope;
        report.push(c);
    }
    report.data = json!({
        "text": q.to_text(),
        "terms": q.terms.iter().enumerate().map(|(j, t)| json!({
            "index": j,
            "degree": t.degree.to_string(),
            "expr": t.to_expr(&q.factors).to_string(),
            "certificates": t.certificates(q.m),
        })).collect::<Vec<_>>(),
    });
    Ok(report)
}

fn log_symbol_cmd(cfg: &RunConfig) -> Result<Report> {
    let cmd = "log-symbol";
    let n = cfg.torus_dim(cmd)?;
    let p = cfg.operator("p", cmd)?.build(n)?;
    let depth = cfg.depth.unwrap_or(n);
    let tol = cfg.tolerances.symbolic.unwrap_or(1e-8);
    let q = resolvent_expansion(&p, depth)?;
    let ls = log_symbol(&p, depth)?;
    let mut report = Report::new(cmd);
    // closed-form T against adaptive quadrature of −∫_{−∞}^0 q dλ
    for j in 1..=depth {
        let term = &q.terms[j];
        if term.is_zero() {
            continue;
        }
        let closed = log_transform_term(term, &q.factors)?;
        let mut worst = (0.0, cx(0.0), cx(0.0));
        for (x0, xi0) in [(0.3, 1.7), (2.2, -0.9), (4.9, 3.1)] {
            let x = vec![x0; n];
            let mut xi = vec![xi0; n];
            if n > 1 {
                xi[1] = 0.5 * xi0;
            }
            let c = closed.evaluate(&Point::new(&x, &xi))?;
            let num = log_transform_frozen(&term.freeze(&q.factors, &x, &xi)?)?.value;
            let d = (c - num).norm() / (1.0 + c.norm());
            if d >= worst.0 {
                worst = (d, c, num);
            }
        }
        report.push(Check::rel(&format!("b_{j}: closed-form transform = quadrature"), worst.1, worst.2, tol, 1.0));
    }
    report.data = json!({
        "log_part": ls.log_part().to_string(),
        "terms": ls.b.terms().iter().enumerate().map(|(j, t)| json!({
            "index": j,
            "degree": ls.b.degree_of(j).to_string(),
            "expr": t.to_string(),
        })).collect::<Vec<_>>(),
    });
    Ok(report)
}

fn residue_cmd(cfg: &RunConfig) -> Result<Report> {
    let cmd = "residue";
    let n = cfg.torus_dim(cmd)?;
    let grid = cfg.quadrature.grid.unwrap_or(16);
    let tol = cfg.tolerances.symbolic.unwrap_or(1e-8);
    let (symbol, label) = if cfg.p1.is_some() || cfg.p2.is_some() {
        let p1 = cfg.operator("p1", cmd)?.build(n)?;
        let p2 = cfg.operator("p2", cmd)?.build(n)?;
        let (a, _) = symbol_or_identity(cfg, "a", n)?;
        let j = (a.order + num_rational::Rational64::from_integer(n as i64)).ceil().to_integer().max(0) as usize;
        let l = log_difference_symbol(&p1, &p2, j)?;
        (a.compose(&l, j)?, "res(A(log P1 - log P2))")
    } else if cfg.a_prime.is_some() {
        let p = cfg.operator("p", cmd)?.build(n)?;
        let (a, _) = symbol_or_identity(cfg, "a", n)?;
        let (ap, _) = symbol_or_identity(cfg, "a_prime", n)?;
        (commutator_log_symbol(&a, &ap, &p)?, "res(A[A', log P])")
    } else {
        let p = cfg.operator("p", cmd)?.build(n)?;
        (log_symbol(&p, cfg.depth.unwrap_or(n).max(n))?.b, "res(log P)")
    };
    let coarse = noncommutative_residue(&symbol, &XDomain::torus(n, grid))?;
    let fine = noncommutative_residue(&symbol, &XDomain::torus(n, 2 * grid))?;
    let mut report = Report::new(cmd);
    for (x, s) in &fine.samples {
        report.rows.push(CsvRow::new("residue-density", x[0], *x.get(1).unwrap_or(&0.0), *s));
    }
    report.push(
        Check::abs(&format!("{label}: grid {grid} = grid {}", 2 * grid), coarse.value, fine.value, tol)
            .with("note", &fine.note)
            .with("sphere_normalization", fine.sphere_normalization),
    );
    report.data = json!({ "residue": [fine.value.re, fine.value.im], "symbol": label });
    Ok(report)
}

/// Heat-trace spectrum for P on the torus when one is available.
fn t14_spectrum(cfg: &RunConfig, n: usize, p: &DifferentialOperator) -> Result<Option<(SpectrumSpec, String)>> {
    let op = cfg.operator("p", "verify-t14")?;
    if let Some((mass2, 1)) = op.constant_laplace() {
        return Ok(Some((SpectrumSpec::Torus { dim: n, mass2 }, "closed-form lattice".into())));
    }
    if n == 1 && p.order() == 2 && op.potential.is_some() {
        let k = cfg.oracle.cutoff.unwrap_or(128);
        let o = TraceOracle::single(&OperatorSpec::Identity, &OperatorSpec::Differential(p.clone()), 1, k, None)?;
        let shift = op.potential.as_ref().map(|v| v.constant).unwrap_or(0.0);
        return Ok(Some((
            SpectrumSpec::Listed {
                eigenvalues: o.eigenvalues(),
                dim: 1,
                order: 2,
                cutoff: Some(k),
                tail_shift: shift,
            },
            format!("eigenvalues of the K = {k} truncation, tail k^2 + {shift}"),
        )));
    }
    Ok(None)
}

fn zeta_check(report: &mut Report, z: &ZetaReport, rhs: Complex64, tol: f64, source: &str) {
    report.push(
        Check::abs("C0 = zeta(0) + nullity from the heat trace", cx(z.c0), rhs, tol)
            .with("zeta0", z.zeta0)
            .with("nullity", z.nullity)
            .with("drift", z.drift)
            .with("t_range", z.t_range)
            .with("relative_residual", z.relative_residual)
            .with("spectrum", source),
    );
}

fn t14(cfg: &RunConfig) -> Result<Report> {
    let cmd = "verify-t14";
    let n = cfg.torus_dim(cmd)?;
    let p = cfg.operator("p", cmd)?.build(n)?;
    let v = verify_t14(&p, &sym_opts(cfg))?;
    let mut report = v.report;
    if cfg.oracle.enabled.unwrap_or(true) {
        match t14_spectrum(cfg, n, &p)? {
            Some((spec, source)) => {
                let z = zeta_at_zero(&spec, &cfg.oracle.heat.options())?;
                zeta_check(&mut report, &z, v.rhs, cfg.tolerances.oracle.unwrap_or(1e-4), &source);
            }
            None => report.warn("no heat-trace oracle for this operator; symbolic routes only"),
        }
    }
    report.data = json!({ "lhs": [v.lhs.re, v.lhs.im], "rhs": [v.rhs.re, v.rhs.im] });
    Ok(report)
}

fn lambda_samples(cfg: &RunConfig) -> Result<(Vec<Complex64>, usize)> {
    let l = &cfg.lambda;
    let f = l.fit().ok_or_else(|| Error::usage("incomplete [lambda] section"))?;
    if f.ray_angle.cos() > -1e-12 && f.ray_angle.sin().abs() < 1e-12 {
        return Err(Error::domain(
            format!("ray angle {}", f.ray_angle),
            "lambda on the positive real axis meets the spectrum",
        ));
    }
    Ok((ray_samples(f.ray_angle, f.mu_min, f.mu_max, f.samples), f.terms))
}

fn oracle_fit(report: &mut Report, o: &TraceOracle, lams: &[Complex64], basis: &FitBasis) -> Result<ExpansionFit> {
    let samples: Vec<(Complex64, Complex64)> = lams.iter().map(|l| Ok((*l, o.at(*l)?))).collect::<Result<_>>()?;
    let fit = fit_expansion(&samples, basis, &FitOptions::default())?;
    for (l, v) in &samples {
        report.rows.push(CsvRow::new("trace-sample", l.norm(), l.arg(), *v));
        report.rows.push(CsvRow::new("trace-fit", l.norm(), l.arg(), fit.evaluate(*l)));
    }
    Ok(fit)
}

fn fit_json(f: &ExpansionFit) -> serde_json::Value {
    json!({
        "exponents": f.exponents,
        "coefficients": f.coefficients.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        "condition_number": f.condition_number,
        "relative_residual": f.relative_residual,
        "drift": f.drift,
        "lambda_range": f.lambda_range,
        "ray_angle": f.ray_angle,
    })
}

fn tail(cfg: &RunConfig, n: usize) -> Option<i64> {
    cfg.oracle.tail_cutoff.filter(|t| *t > 0 && n == 1)
}

fn t22(cfg: &RunConfig) -> Result<Report> {
    let cmd = "verify-t22";
    let n = cfg.torus_dim(cmd)?;
    let p1 = cfg.operator("p1", cmd)?.build(n)?;
    let p2 = cfg.operator("p2", cmd)?.build(n)?;
    let (a, a_spec) = symbol_or_identity(cfg, "a", n)?;
    let v = verify_t22(&a, &p1, &p2, &sym_opts(cfg))?;
    let mut report = v.report;
    report.data = json!({ "lhs": [v.lhs.re, v.lhs.im], "rhs": [v.rhs.re, v.rhs.im] });
    if cfg.oracle.enabled.unwrap_or(true) && n == 1 {
        let k = cfg.oracle.cutoff.unwrap_or(128);
        let o = TraceOracle::difference(
            &a_spec,
            &OperatorSpec::Differential(p1.clone()),
            &OperatorSpec::Differential(p2.clone()),
            1,
            k,
            tail(cfg, n),
        )?;
        let (lams, terms) = lambda_samples(cfg)?;
        let (m, sigma) = (p1.order(), a.order.to_f64().unwrap_or(0.0));
        // A(Q₁ − Q₂) has degree σ − 2m + ord(P₁ − P₂)
        let d = p1.sub(&p2).order() as f64;
        let top = (n as f64 + sigma - m as f64 + d) / m as f64 - 1.0;
        let basis = FitBasis::trace_expansion(n, sigma, m, terms + 8).capped(top.max(-1.0));
        let basis = FitBasis {
            exponents: basis.exponents.into_iter().take(terms).collect(),
            log_term: false,
        };
        let fit = oracle_fit(&mut report, &o, &lams, &basis)?;
        report.push(
            Check::abs(
                "fitted (-lambda)^-1 coefficient of Tr(A(Q1-Q2)) = -res/m",
                fit.target,
                v.rhs,
                cfg.tolerances.fit.unwrap_or(1e-3),
            )
            .with("drift", fit.drift)
            .with("condition_number", fit.condition_number)
            .with("cutoff", k),
        );
        report.data["fit"] = fit_json(&fit);
    } else if n != 1 {
        report.warn("matrix oracle runs on T1 only; symbolic routes only");
    }
    Ok(report)
}

fn t23(cfg: &RunConfig) -> Result<Report> {
    let cmd = "verify-t23";
    let n = cfg.torus_dim(cmd)?;
    let p = cfg.operator("p", cmd)?.build(n)?;
    let (a, a_spec) = symbol_or_identity(cfg, "a", n)?;
    let (ap, ap_spec) = symbol_or_identity(cfg, "a_prime", n)?;
    let v = verify_t23(&a, &ap, &p, &sym_opts(cfg))?;
    let mut report = v.report;
    report.data = json!({ "lhs": [v.lhs.re, v.lhs.im], "rhs": [v.rhs.re, v.rhs.im] });
    if cfg.oracle.enabled.unwrap_or(true) && n == 1 {
        let k = cfg.oracle.cutoff.unwrap_or(128);
        let com = OperatorSpec::commutator(a_spec, ap_spec);
        let o = TraceOracle::single(&com, &OperatorSpec::Differential(p.clone()), 1, k, tail(cfg, n))?;
        let (lams, terms) = lambda_samples(cfg)?;
        let sigma = (a.order + ap.order).to_f64().unwrap_or(0.0);
        let basis = FitBasis::trace_expansion(n, sigma, p.order(), terms);
        let fit = oracle_fit(&mut report, &o, &lams, &basis)?;
        report.push(
            Check::rel(
                "fitted (-lambda)^-1 coefficient of Tr([A,A']Q) = -res/m",
                fit.target,
                v.rhs,
                cfg.tolerances.fit.unwrap_or(1e-3),
                1e-2,
            )
            .with("drift", fit.drift)
            .with("condition_number", fit.condition_number)
            .with("cutoff", k),
        );
        report.data["fit"] = fit_json(&fit);
    } else if n != 1 {
        report.warn("matrix oracle runs on T1 only; symbolic routes only");
    }
    Ok(report)
}

fn t310(cfg: &RunConfig) -> Result<Report> {
    let model = cfg.t310_model("verify-t310")?;
    let v = verify_t310_model(&model)?;
    let mut report = v.report;
    if cfg.model.as_ref().is_some_and(|m| m.iterated) {
        let it = verify_iterated(&model, cfg.tolerances.iterated.unwrap_or(1e-3))?;
        report.absorb(it.report);
    }
    report.data = json!({ "lhs": [v.lhs.re, v.lhs.im], "rhs": [v.rhs.re, v.rhs.im] });
    Ok(report)
}

fn ex53(cfg: &RunConfig) -> Result<Report> {
    let cmd = "verify-ex53";
    match &cfg.geometry {
        Some(GeometryConfig::Interval { .. }) => {
            return Err(Error::Hypothesis(
                "the boundary term needs a boundary of dimension n - 1 >= 1; the interval has n = 1".into(),
            ))
        }
        Some(GeometryConfig::Torus { .. }) => {
            return Err(Error::Hypothesis(format!("{cmd} needs a manifold with boundary")))
        }
        _ => {}
    }
    let cyl = cfg.cylinder().ok_or_else(|| super::config::missing_section("geometry", cmd))??;
    let opts = Ex53Options {
        tol: cfg.tolerances.oracle.unwrap_or(1e-3),
        heat: cfg.oracle.heat.options(),
        grid: cfg.quadrature.grid.unwrap_or(4),
    };
    let v = verify_dirichlet_cylinder(&cyl, &opts)?;
    let mut report = v.report;
    report.data = json!({ "lhs": [v.lhs.re, v.lhs.im], "rhs": [v.rhs.re, v.rhs.im] });
    Ok(report)
}

fn fit_cmd(cfg: &RunConfig) -> Result<Report> {
    let cmd = "fit";
    let n = cfg.torus_dim(cmd)?;
    let (a, a_spec) = symbol_or_identity(cfg, "a", n)?;
    let k = cfg.oracle.cutoff.unwrap_or(128);
    let (o, m, label) = if cfg.p1.is_some() || cfg.p2.is_some() {
        let p1 = cfg.operator("p1", cmd)?.build(n)?;
        let p2 = cfg.operator("p2", cmd)?.build(n)?;
        let o = TraceOracle::difference(
            &a_spec,
            &OperatorSpec::Differential(p1.clone()),
            &OperatorSpec::Differential(p2),
            n,
            k,
            tail(cfg, n),
        )?;
        (o, p1.order(), "Tr(A(Q1-Q2))")
    } else {
        let p = cfg.operator("p", cmd)?.build(n)?;
        let o = TraceOracle::single(&a_spec, &OperatorSpec::Differential(p.clone()), n, k, tail(cfg, n))?;
        (o, p.order(), "Tr(AQ)")
    };
    let (lams, terms) = lambda_samples(cfg)?;
    let sigma = a.order.to_f64().unwrap_or(0.0);
    let mut basis = FitBasis::trace_expansion(n, sigma, m, terms);
    if label == "Tr(AQ)" && (n as f64 + sigma).fract() == 0.0 {
        basis = basis.with_log();
    }
    let mut report = Report::new(cmd);
    let fit = oracle_fit(&mut report, &o, &lams, &basis)?;
    let tol = cfg.tolerances.fit.unwrap_or(1e-3);
    for (i, s) in fit.subrange_targets.iter().enumerate() {
        let half = if i == 0 { "lower" } else { "upper" };
        report.push(
            Check::abs(&format!("{label}: (-lambda)^-1 coefficient on the {half} half of the range"), *s, fit.target, tol)
                .with("condition_number", fit.condition_number),
        );
    }
    report.data = json!({ "fit": fit_json(&fit), "log_coefficient": fit.log_coefficient.map(|c| [c.re, c.im]) });
    Ok(report)
}

fn zeta0(cfg: &RunConfig) -> Result<Report> {
    let cmd = "oracle-zeta0";
    let (spec, source) = match &cfg.geometry {
        Some(GeometryConfig::Interval { length, mass2 }) => (
            SpectrumSpec::DirichletInterval {
                length: *length,
                mass2: *mass2,
            },
            "Dirichlet interval".to_string(),
        ),
        Some(GeometryConfig::Cylinder { .. }) => {
            let c = cfg.cylinder().expect("cylinder geometry")?;
            (crate::oracle::dirichlet_product_spectrum(&c), "Dirichlet cylinder".to_string())
        }
        Some(GeometryConfig::Torus { .. }) => {
            let n = cfg.torus_dim(cmd)?;
            let p = cfg.operator("p", cmd)?.build(n)?;
            t14_spectrum(cfg, n, &p)?.ok_or_else(|| {
                Error::usage("heat-trace oracle on the torus needs -Lap + c, or a second-order operator on T1")
            })?
        }
        None => return Err(super::config::missing_section("geometry", cmd)),
    };
    let mut opts = cfg.oracle.heat.options();
    opts.drift_tol = f64::INFINITY;
    let z = zeta_at_zero(&spec, &opts)?;
    let mut report = Report::new(cmd);
    report.push(
        Check::abs_re("heat constant c0 is stable under a change of t grid", z.drift, 0.0, cfg.tolerances.oracle.unwrap_or(1e-4))
            .with("spectrum", &source),
    );
    report.data = json!({
        "zeta0": z.zeta0,
        "c0": z.c0,
        "nullity": z.nullity,
        "t_range": z.t_range,
        "exponents": z.exponents,
        "coefficients": z.coefficients,
        "spectrum_head": spec.to_text(12),
    });
    Ok(report)
}
