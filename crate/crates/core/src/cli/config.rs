//! Run configuration: a TOML document with fixed sections. Unknown keys are
//! rejected; defaults are filled in per command before the run so that the
//! embedded copy in each report reproduces it.

use crate::boundary::{CylinderSpec, LambdaFit, ModelOperator, T310Model};
use crate::error::{Error, Result};
use crate::oracle::{HeatFitOptions, OperatorSpec};
use crate::parametrix::{DifferentialOperator, PolyhomSymbol};
use crate::symexpr::ScalarField;
use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::PathBuf;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Option<GeometryConfig>,
    pub p: Option<OperatorConfig>,
    pub p1: Option<OperatorConfig>,
    pub p2: Option<OperatorConfig>,
    pub a: Option<SymbolConfig>,
    pub a_prime: Option<SymbolConfig>,
    /// Depth J of the resolvent and log expansions.
    pub depth: Option<usize>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub lambda: LambdaConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeometryConfig {
    /// (ℝ/2πℤ)^dim
    Torus { dim: usize },
    /// S¹_C × [0, L], Dirichlet at both ends.
    Cylinder {
        length: f64,
        #[serde(default = "two_pi")]
        circumference: f64,
        #[serde(default)]
        mass2: f64,
    },
    /// [0, L], Dirichlet.
    Interval {
        length: f64,
        #[serde(default)]
        mass2: f64,
    },
}

fn two_pi() -> f64 {
    2.0 * PI
}

/// Trigonometric coefficient c + Σ amp cos(k x_axis) + Σ amp sin(k x_axis)
/// + Σ (re + i im) e^{ik·x}.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldConfig {
    pub constant: f64,
    pub cos: Vec<TrigConfig>,
    pub sin: Vec<TrigConfig>,
    pub modes: Vec<ModeConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigConfig {
    #[serde(default)]
    pub axis: usize,
    pub k: i64,
    pub amp: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub k: Vec<i64>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl FieldConfig {
    pub fn constant(c: f64) -> Self {
        FieldConfig {
            constant: c,
            ..Default::default()
        }
    }

    pub fn build(&self, dim: usize) -> Result<ScalarField> {
        let mut f = ScalarField::constant(dim, self.constant);
        for (t, is_cos) in self.cos.iter().map(|t| (t, true)).chain(self.sin.iter().map(|t| (t, false))) {
            if t.axis >= dim {
                return Err(Error::usage(format!("axis {} out of range for dimension {dim}", t.axis)));
            }
            let g = if is_cos {
                ScalarField::cos(dim, t.axis, t.k, t.amp)
            } else {
                ScalarField::sin(dim, t.axis, t.k, t.amp)
            };
            f = f.add(&g);
        }
        let modes: Vec<(Vec<i64>, Complex64)> =
            self.modes.iter().map(|m| (m.k.clone(), Complex64::new(m.re, m.im))).collect();
        Ok(f.add(&ScalarField::from_modes(dim, &modes)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DTermConfig {
    /// Multi-index α of D^α, D = −i∂.
    pub d: Vec<u32>,
    pub coeff: FieldConfig,
}

/// (−Δ + potential)^power, or (Σ c_α D^α)^power from a coefficient table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub potential: Option<FieldConfig>,
    pub terms: Option<Vec<DTermConfig>>,
    #[serde(default = "one")]
    pub power: u32,
}

fn one() -> u32 {
    1
}

impl OperatorConfig {
    pub fn laplace_plus(potential: FieldConfig, power: u32) -> Self {
        OperatorConfig {
            potential: Some(potential),
            terms: None,
            power,
        }
    }

    pub fn build(&self, dim: usize) -> Result<DifferentialOperator> {
        if self.power == 0 {
            return Err(Error::usage("operator power must be at least 1"));
        }
        let base = match (&self.potential, &self.terms) {
            (Some(v), None) => DifferentialOperator::laplace_plus(dim, v.build(dim)?),
            (None, Some(t)) => DifferentialOperator::from_d_terms(
                dim,
                t.iter().map(|t| Ok((t.d.clone(), t.coeff.build(dim)?))).collect::<Result<Vec<_>>>()?,
            )?,
            _ => return Err(Error::usage("an operator needs exactly one of `potential` and `terms`")),
        };
        Ok(base.pow(self.power))
    }

    /// (−Δ + c)^power with constant c, when the operator has that form.
    pub fn constant_laplace(&self) -> Option<(f64, u32)> {
        let v = self.potential.as_ref()?;
        (v.cos.is_empty() && v.sin.is_empty() && v.modes.is_empty()).then_some((v.constant, self.power))
    }
}

/// multiply(x) · |D|^radial_power; the identity when both are absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolConfig {
    pub multiply: Option<FieldConfig>,
    /// Rational exponent as a string, e.g. "1" or "-1/2".
    pub radial_power: Option<String>,
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || Error::usage(format!("`{s}` is not a rational number"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?);
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(n, d))
        }
        None => Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl SymbolConfig {
    pub fn radial(&self) -> Result<Option<Rational64>> {
        self.radial_power.as_deref().map(parse_rational).transpose()
    }

    pub fn symbol(&self, dim: usize) -> Result<PolyhomSymbol> {
        let base = match self.radial()? {
            Some(s) => PolyhomSymbol::radial_power(dim, s),
            None => PolyhomSymbol::constant(dim, Complex64::new(1.0, 0.0)),
        };
        Ok(match &self.multiply {
            Some(f) => base.left_multiply(&f.build(dim)?),
            None => base,
        })
    }

    pub fn spec(&self, dim: usize) -> Result<OperatorSpec> {
        let mut factors = Vec::new();
        if let Some(f) = &self.multiply {
            factors.push(OperatorSpec::Multiplication(f.build(dim)?));
        }
        if let Some(s) = self.radial()? {
            factors.push(OperatorSpec::RadialMultiplier(s));
        }
        Ok(match factors.len() {
            0 => OperatorSpec::Identity,
            1 => factors.remove(0),
            _ => OperatorSpec::Product(factors),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    /// x-quadrature points per axis.
    pub grid: Option<usize>,
    /// Points per axis for pointwise density comparisons.
    pub pointwise: Option<usize>,
    /// Also compare along fixed cosphere rays.
    pub rays: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaConfig {
    pub mu_min: Option<f64>,
    pub mu_max: Option<f64>,
    pub samples: Option<usize>,
    /// Fit basis members.
    pub terms: Option<usize>,
    pub ray_angle: Option<f64>,
}

impl LambdaConfig {
    pub fn fit(&self) -> Option<LambdaFit> {
        Some(LambdaFit {
            mu_min: self.mu_min?,
            mu_max: self.mu_max?,
            samples: self.samples?,
            terms: self.terms?,
            ray_angle: self.ray_angle.unwrap_or(PI),
        })
    }

    fn fill(&mut self, d: &LambdaFit) {
        self.mu_min.get_or_insert(d.mu_min);
        self.mu_max.get_or_insert(d.mu_max);
        self.samples.get_or_insert(d.samples);
        self.terms.get_or_insert(d.terms);
        self.ray_angle.get_or_insert(d.ray_angle);
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatConfig {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub terms: Option<usize>,
}

impl HeatConfig {
    pub fn options(&self) -> HeatFitOptions {
        let d = HeatFitOptions::default();
        HeatFitOptions {
            t_min: self.t_min.unwrap_or(d.t_min),
            t_max: self.t_max.unwrap_or(d.t_max),
            points: self.points.unwrap_or(d.points),
            terms: self.terms.unwrap_or(d.terms),
            ..d
        }
    }

    fn fill(&mut self) {
        let o = self.options();
        *self = HeatConfig {
            t_min: Some(o.t_min),
            t_max: Some(o.t_max),
            points: Some(o.points),
            terms: Some(o.terms),
        };
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub enabled: Option<bool>,
    /// Fourier cutoff K of the matrix truncations.
    pub cutoff: Option<i64>,
    /// Neumann tail cutoff on T¹; 0 disables the tail correction.
    pub tail_cutoff: Option<i64>,
    #[serde(default)]
    pub heat: HeatConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Symbolic two-route comparisons.
    pub symbolic: Option<f64>,
    /// Heat-trace oracle against the symbolic value.
    pub oracle: Option<f64>,
    /// Fitted trace coefficients.
    pub fit: Option<f64>,
    /// Residue route against closed forms.
    pub residue: Option<f64>,
    /// Iterated-resolvent coefficient against the first-order one.
    pub iterated: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub mass2: [f64; 2],
    #[serde(default)]
    pub operator: ModelOperator,
    pub lattice_cutoff: Option<i64>,
    /// Also run the second-power resolvent comparison.
    #[serde(default)]
    pub iterated: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub depth: Option<usize>,
    pub json_out: Option<PathBuf>,
    pub csv_out: Option<PathBuf>,
    pub ray_angle: Option<f64>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, col)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
            Error::Config {
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            line: 0,
            column: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// JSON form with unset fields dropped, so it converts back to TOML.
    pub fn to_json(&self) -> serde_json::Value {
        fn strip(v: serde_json::Value) -> serde_json::Value {
            match v {
                serde_json::Value::Object(m) => {
                    serde_json::Value::Object(m.into_iter().filter(|(_, v)| !v.is_null()).map(|(k, v)| (k, strip(v))).collect())
                }
                serde_json::Value::Array(a) => serde_json::Value::Array(a.into_iter().map(strip).collect()),
                other => other,
            }
        }
        strip(serde_json::to_value(self).expect("config serializes"))
    }

    pub fn dim(&self) -> usize {
        match &self.geometry {
            Some(GeometryConfig::Torus { dim }) => *dim,
            Some(GeometryConfig::Interval { .. }) => 1,
            Some(GeometryConfig::Cylinder { .. }) => 2,
            None => 1,
        }
    }

    pub fn torus_dim(&self, command: &str) -> Result<usize> {
        match &self.geometry {
            Some(GeometryConfig::Torus { dim }) if (1..=3).contains(dim) => Ok(*dim),
            Some(GeometryConfig::Torus { dim }) => Err(Error::usage(format!("torus dimension {dim} outside 1..=3"))),
            Some(_) => Err(Error::Hypothesis(format!("{command} runs on a flat torus"))),
            None => Err(missing_section("geometry", command)),
        }
    }

    pub fn cylinder(&self) -> Option<Result<CylinderSpec>> {
        match &self.geometry {
            Some(GeometryConfig::Cylinder {
                length,
                circumference,
                mass2,
            }) => {
                let c = CylinderSpec {
                    circumference: *circumference,
                    length: *length,
                    mass2: *mass2,
                };
                Some(c.validate().map(|_| c))
            }
            _ => None,
        }
    }

    pub fn operator(&self, name: &str, command: &str) -> Result<&OperatorConfig> {
        match name {
            "p" => self.p.as_ref(),
            "p1" => self.p1.as_ref(),
            _ => self.p2.as_ref(),
        }
        .ok_or_else(|| missing_section(name, command))
    }

    /// Applies overrides and fills every default the command reads.
    pub fn resolve(&mut self, command: &str, o: &Overrides) {
        if let Some(d) = o.depth {
            self.depth = Some(d);
        }
        if o.json_out.is_some() {
            self.output.json = o.json_out.clone();
        }
        if o.csv_out.is_some() {
            self.output.csv = o.csv_out.clone();
        }
        if let Some(a) = o.ray_angle {
            self.lambda.ray_angle = Some(a);
        }
        let n = self.dim();
        let t = &mut self.tolerances;
        let primary = match command {
            "fit" | "verify-t310" => &mut t.fit,
            "oracle-zeta0" | "verify-ex53" => &mut t.oracle,
            _ => &mut t.symbolic,
        };
        if let Some(v) = o.tol {
            *primary = Some(v);
        }
        let model = command == "verify-t310";
        let sgo = matches!(self.model.as_ref().map(|m| &m.operator), Some(ModelOperator::Sgo { .. }));
        t.symbolic.get_or_insert(1e-8);
        t.oracle.get_or_insert(if command == "verify-ex53" { 1e-3 } else { 1e-4 });
        t.fit.get_or_insert(if model && !sgo { 1e-4 } else { 1e-3 });
        t.residue.get_or_insert(1e-10);
        t.iterated.get_or_insert(1e-3);
        self.depth.get_or_insert(n);
        let q = &mut self.quadrature;
        let cyl = matches!(self.geometry, Some(GeometryConfig::Cylinder { .. }));
        q.grid.get_or_insert(if cyl { 4 } else { 16 });
        q.pointwise.get_or_insert(if cyl { 2 } else { 8 });
        q.rays.get_or_insert(false);
        let or = &mut self.oracle;
        or.enabled.get_or_insert(true);
        or.cutoff.get_or_insert(128);
        or.tail_cutoff.get_or_insert(if n == 1 { 2048 } else { 0 });
        or.heat.fill();
        match command {
            "verify-t310" => {
                if let (Some(m), Some(Ok(c))) = (&self.model, self.cylinder()) {
                    let d = self.model_spec(m, c).lambda_fit();
                    self.lambda.fill(&d);
                }
            }
            "fit" | "verify-t22" | "verify-t23" => self.lambda.fill(&LambdaFit {
                mu_min: 1e3,
                mu_max: 1e6,
                samples: 48,
                terms: if command == "verify-t22" { 8 } else { 10 },
                ray_angle: PI,
            }),
            _ => {}
        }
    }

    fn model_spec(&self, m: &ModelConfig, cylinder: CylinderSpec) -> T310Model {
        let mut t = match m.operator {
            ModelOperator::Identity => T310Model::identity(cylinder, m.mass2[0], m.mass2[1]),
            ModelOperator::Sgo { power, rate } => T310Model::sgo(cylinder, m.mass2[0], m.mass2[1], power, rate),
        };
        t.lattice_cutoff = m.lattice_cutoff;
        t.fit = self.lambda.fit();
        if let Some(f) = self.tolerances.fit {
            t.fit_tol = f;
        }
        if let Some(r) = self.tolerances.residue {
            t.residue_tol = r;
        }
        t
    }

    pub fn t310_model(&self, command: &str) -> Result<T310Model> {
        let m = self.model.as_ref().ok_or_else(|| missing_section("model", command))?;
        let c = self
            .cylinder()
            .ok_or_else(|| Error::Hypothesis(format!("{command} runs on the cylinder model")))??;
        Ok(self.model_spec(m, c))
    }
}

pub(crate) fn missing_section(section: &str, command: &str) -> Error {
    Error::Config {
        line: 1,
        column: 1,
        message: format!("missing [{section}], required by {command}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_operator_tables() {
        let c = RunConfig::parse(
            r#"
depth = 2
[geometry]
kind = "torus"
dim = 1
[p]
terms = [{ d = [2], coeff = { constant = 1.0 } }, { d = [0], coeff = { constant = 2.0, cos = [{ k = 1, amp = 1.0 }] } }]
[a]
radial_power = "1/2"
"#,
        )
        .unwrap();
        let p = c.p.as_ref().unwrap().build(1).unwrap();
        let v = ScalarField::constant(1, 2.0).add(&ScalarField::cos(1, 0, 1, 1.0));
        assert_eq!(p, DifferentialOperator::laplace_plus(1, v));
        assert_eq!(c.a.unwrap().radial().unwrap(), Some(Rational64::new(1, 2)));
    }

    #[test]
    fn unknown_key_has_location() {
        let e = RunConfig::parse("[geometry]\nkind = \"torus\"\ndim = 2\n\n[p]\npotental = { constant = 1.0 }\n").unwrap_err();
        let Error::Config { line, column, message } = e else { panic!() };
        assert_eq!(line, 6, "{message}");
        assert_eq!(column, 1);
        assert!(message.contains("potental"));
    }

    #[test]
    fn resolved_config_round_trips() {
        let mut c = RunConfig::parse("[geometry]\nkind = \"torus\"\ndim = 2\n[p]\npotential = { constant = 1.0 }\n").unwrap();
        c.resolve("verify-t14", &Overrides { tol: Some(1e-9), ..Default::default() });
        assert_eq!(c.tolerances.symbolic, Some(1e-9));
        let back = RunConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational(" -3/4").unwrap(), Rational64::new(-3, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
