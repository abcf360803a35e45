//! Built-in metrics and user metrics parsed from the expression language.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsl::{self, Program};
use crate::error::{Error, Result};
use crate::jet::{JetContext, Var, WJet};
use crate::point::Point;

type Predicate = Arc<dyn Fn(&Point) -> bool + Send + Sync>;

/// A named predicate on `(z, η)`.
#[derive(Clone)]
pub struct DomainConstraint {
    pub description: String,
    predicate: Predicate,
}

impl DomainConstraint {
    pub fn new(description: &str, f: impl Fn(&Point) -> bool + Send + Sync + 'static) -> Self {
        DomainConstraint {
            description: description.to_string(),
            predicate: Arc::new(f),
        }
    }

    pub fn admits(&self, p: &Point) -> bool {
        (self.predicate)(p)
    }
}

impl fmt::Debug for DomainConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DomainConstraint({:?})", self.description)
    }
}

/// Where random sample points are drawn: a box for each base coordinate plus an
/// optional margin that keeps samples away from the domain boundary.
#[derive(Clone)]
pub struct SamplingRegion {
    /// `[re_min, re_max, im_min, im_max]` for z1 and z2.
    pub z_box: [[f64; 4]; 2],
    /// Lower bound on `|η^i|` for each component.
    pub eta_floor: f64,
    /// Largest admitted condition number of `g_{ij̄}`; beyond it roundoff in `g⁻¹`
    /// swamps the derived quantities.
    pub max_condition: f64,
    margin: Option<Predicate>,
}

impl SamplingRegion {
    pub fn boxed(half: f64) -> SamplingRegion {
        SamplingRegion {
            z_box: [[-half, half, -half, half]; 2],
            eta_floor: 0.0,
            max_condition: 1e4,
            margin: None,
        }
    }

    pub fn with_margin(mut self, f: impl Fn(&Point) -> bool + Send + Sync + 'static) -> Self {
        self.margin = Some(Arc::new(f));
        self
    }

    pub fn with_eta_floor(mut self, floor: f64) -> Self {
        self.eta_floor = floor;
        self
    }

    pub fn with_max_condition(mut self, c: f64) -> Self {
        self.max_condition = c;
        self
    }

    pub fn inside_margin(&self, p: &Point) -> bool {
        self.margin.as_ref().is_none_or(|m| m(p))
    }
}

impl fmt::Debug for SamplingRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SamplingRegion({:?}, eta_floor {}, max_condition {})",
            self.z_box, self.eta_floor, self.max_condition
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MetricSource {
    Builtin {
        name: String,
        params: BTreeMap<String, String>,
    },
    Dsl {
        text: String,
    },
}

/// A metric ready for evaluation.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    pub name: String,
    pub source: MetricSource,
    pub program: Program,
    pub program_text: String,
    pub domain: Vec<DomainConstraint>,
    pub region: SamplingRegion,
}

/// Listing entry for a built-in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuiltinInfo {
    pub name: &'static str,
    pub lagrangian: &'static str,
    pub params: &'static str,
    pub domain: &'static str,
}

pub const BUILTINS: [BuiltinInfo; 5] = [
    BuiltinInfo {
        name: "euclidean",
        lagrangian: "L = |e1|^2 + |e2|^2",
        params: "-",
        domain: "eta != 0",
    },
    BuiltinInfo {
        name: "antonelli-shimada",
        lagrangian: "L = exp(2 sigma) (|e1|^4 + |e2|^4)^(1/2)",
        params: "sigma = constant | hartogs-log | disk-log | harmonic | <expression in z1, z2, conj> (default hartogs-log)",
        domain: "e1 != 0 and e2 != 0, plus the domain of sigma",
    },
    BuiltinInfo {
        name: "hartogs-randers",
        lagrangian: "F = alpha + |beta|",
        params: "-",
        domain: "|z2| < |z1| < 1, beta(z,eta) != 0",
    },
    BuiltinInfo {
        name: "hartogs-kropina",
        lagrangian: "F = alpha^2 / |beta|",
        params: "-",
        domain: "|z2| < |z1| < 1, beta(z,eta) != 0",
    },
    BuiltinInfo {
        name: "hartogs-hermitian",
        lagrangian: "L = alpha^2",
        params: "-",
        domain: "|z2| < |z1| < 1",
    },
];

const HARTOGS_ALPHA: &str = "\
let D = abs2(z1) - abs2(z2)
let beta = (z2*e1 - z1*e2)/D
let a2 = abs2(e1)/(1 - abs2(z1))^2 + abs2(beta)
";

const HARTOGS_DOMAIN: &str = "|z2| < |z1| < 1";

fn hartogs_admits(p: &Point) -> bool {
    let (a, b) = (p.z[0].norm(), p.z[1].norm());
    b < a && a < 1.0
}

fn hartogs_alpha_beta(p: &Point) -> (f64, f64) {
    let [z, w] = p.z;
    let [e, t] = p.eta;
    let d = z.norm_sqr() - w.norm_sqr();
    let beta = (w * e - z * t) / d;
    let a2 = e.norm_sqr() / (1.0 - z.norm_sqr()).powi(2) + beta.norm_sqr();
    (a2.sqrt(), beta.norm())
}

fn hartogs_margin(p: &Point) -> bool {
    let (a, b) = (p.z[0].norm(), p.z[1].norm());
    a > 0.2 && a < 0.85 && b < 0.8 * a
}

fn hartogs_region() -> SamplingRegion {
    SamplingRegion::boxed(0.85).with_margin(hartogs_margin)
}

struct SigmaPreset {
    expr: &'static str,
    domain: Option<(&'static str, fn(&Point) -> bool)>,
    margin: Option<fn(&Point) -> bool>,
}

fn disk_admits(p: &Point) -> bool {
    p.z[0].norm_sqr() + p.z[1].norm_sqr() < 1.0
}

fn sigma_preset(name: &str) -> Option<SigmaPreset> {
    Some(match name {
        "constant" | "const" => SigmaPreset {
            expr: "0",
            domain: None,
            margin: None,
        },
        "hartogs-log" => SigmaPreset {
            expr: "log(1/((1 - abs2(z1))*(abs2(z1) - abs2(z2))))",
            domain: Some((HARTOGS_DOMAIN, hartogs_admits)),
            margin: Some(hartogs_margin),
        },
        "disk-log" => SigmaPreset {
            expr: "log(1 - abs2(z1) - abs2(z2))",
            domain: Some(("|z1|^2 + |z2|^2 < 1", disk_admits)),
            margin: Some(|p| p.z[0].norm_sqr() + p.z[1].norm_sqr() < 0.7),
        },
        "harmonic" => SigmaPreset {
            expr: "re(z1*z2)",
            domain: None,
            margin: None,
        },
        _ => return None,
    })
}

impl MetricSpec {
    /// Parses a user metric file.
    pub fn from_dsl(name: &str, text: &str) -> Result<MetricSpec> {
        let program = dsl::parse_program(text)?;
        Ok(MetricSpec {
            name: name.to_string(),
            source: MetricSource::Dsl {
                text: text.to_string(),
            },
            program,
            program_text: text.to_string(),
            domain: Vec::new(),
            region: SamplingRegion::boxed(0.5),
        })
    }

    /// Looks up a built-in by name, applying `key=value` parameters.
    pub fn builtin(name: &str, params: &[(String, String)]) -> Result<MetricSpec> {
        let mut given: BTreeMap<String, String> = params.iter().cloned().collect();
        let allowed: &[&str] = if name == "antonelli-shimada" {
            &["sigma"]
        } else {
            &[]
        };
        if let Some(k) = given.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::BadParam(format!("'{name}' has no parameter '{k}'")));
        }
        let mut domain = Vec::new();
        let (text, region) = match name {
            "euclidean" => (
                "L = abs2(e1) + abs2(e2)".to_string(),
                SamplingRegion::boxed(1.0),
            ),
            "hartogs-hermitian" => {
                domain.push(DomainConstraint::new(HARTOGS_DOMAIN, hartogs_admits));
                (
                    "let D = abs2(z1) - abs2(z2)\nL = abs2(e1)/(1 - abs2(z1))^2 + abs2((z2*e1 - z1*e2)/D)"
                        .to_string(),
                    hartogs_region(),
                )
            }
            "hartogs-randers" | "hartogs-kropina" => {
                domain.push(DomainConstraint::new(HARTOGS_DOMAIN, hartogs_admits));
                domain.push(DomainConstraint::new("beta(z,eta) != 0", |p| {
                    hartogs_admits(p) && {
                        let (a, b) = hartogs_alpha_beta(p);
                        b > 1e-8 * a
                    }
                }));
                let body = if name == "hartogs-randers" {
                    "L = (sqrt(a2) + sqrt(abs2(beta)))^2"
                } else {
                    "L = a2^2/abs2(beta)"
                };
                let region = hartogs_region().with_margin(|p| {
                    hartogs_margin(p) && {
                        let (a, b) = hartogs_alpha_beta(p);
                        b > 0.05 * a
                    }
                });
                (format!("{HARTOGS_ALPHA}{body}"), region)
            }
            "antonelli-shimada" => {
                let sigma = given
                    .entry("sigma".into())
                    .or_insert_with(|| "hartogs-log".into())
                    .clone();
                domain.push(DomainConstraint::new("e1 != 0 and e2 != 0", |p| {
                    p.eta[0].norm() > 0.0 && p.eta[1].norm() > 0.0
                }));
                let mut region = SamplingRegion::boxed(0.5).with_eta_floor(1e-3);
                let expr = match sigma_preset(&sigma) {
                    Some(pre) => {
                        if let Some((desc, f)) = pre.domain {
                            domain.push(DomainConstraint::new(desc, f));
                        }
                        if let Some(m) = pre.margin {
                            region = SamplingRegion::boxed(0.85)
                                .with_eta_floor(1e-3)
                                .with_margin(m);
                        }
                        pre.expr.to_string()
                    }
                    None => {
                        dsl::parse_expression(&sigma, true)?;
                        sigma
                    }
                };
                (
                    format!("let s = {expr}\nL = exp(2*s)*sqrt(abs2(e1)^2 + abs2(e2)^2)"),
                    region,
                )
            }
            _ => return Err(Error::UnknownMetric(name.to_string())),
        };
        let program = dsl::parse_program(&text)?;
        Ok(MetricSpec {
            name: name.to_string(),
            source: MetricSource::Builtin {
                name: name.to_string(),
                params: given,
            },
            program,
            program_text: text,
            domain,
            region,
        })
    }

    pub fn check_domain(&self, p: &Point) -> Result<()> {
        for c in &self.domain {
            if !c.admits(p) {
                return Err(Error::Domain(c.description.clone()));
            }
        }
        Ok(())
    }

    /// Evaluates `L` on arbitrary jets for `z1, z2, e1, e2`.
    pub fn eval_with(&self, vars: &[WJet; 4]) -> Result<WJet> {
        let l = self.program.eval(vars)?;
        check_real_positive(l.value())?;
        Ok(l)
    }

    /// Jet of `L` at the context's base point.
    pub fn eval_l_jet(&self, ctx: &JetContext) -> Result<WJet> {
        self.check_domain(&ctx.point)?;
        let s = ctx.seeds();
        let vars = [
            s[Var::Z(0).index()].clone(),
            s[Var::Z(1).index()].clone(),
            s[Var::Eta(0).index()].clone(),
            s[Var::Eta(1).index()].clone(),
        ];
        self.eval_with(&vars)
    }

    /// Value of `L` by plain complex arithmetic, independent of the jet engine.
    pub fn eval_plain(&self, p: &Point) -> Result<Complex64> {
        let v = self.program.eval(&[p.z[0], p.z[1], p.eta[0], p.eta[1]])?;
        check_real_positive(v)?;
        Ok(v)
    }
}

fn check_real_positive(v: Complex64) -> Result<()> {
    if v.re > 0.0 && v.im.abs() <= 1e-9 * (1.0 + v.re.abs()) && v.re.is_finite() {
        Ok(())
    } else {
        Err(Error::NonReal(v))
    }
}

/// Residuals of the homogeneity consequences at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneityReport {
    pub euler_l: f64,
    pub euler_g: f64,
    pub quadratic_form: f64,
    pub scaling: f64,
}

impl HomogeneityReport {
    pub fn max(&self) -> f64 {
        self.euler_l
            .max(self.euler_g)
            .max(self.quadratic_form)
            .max(self.scaling)
    }
}

fn rel(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / scale.max(1.0)
}

/// `∂L/∂η^k η^k = L`, `∂g/∂η^k η^k = 0`, `L = g η η̄`, and `F(z, λη) = |λ| F(z, η)`
/// for `trials` pseudo-random `λ`.
pub fn validate_homogeneity(
    spec: &MetricSpec,
    point: &Point,
    trials: usize,
    seed: u64,
) -> Result<HomogeneityReport> {
    use rand::{Rng, SeedableRng};
    let ctx = JetContext::new(3, *point)?;
    let l = spec.eval_l_jet(&ctx)?;
    let l0 = l.value();
    let eta = point.eta;
    let mut euler_l: f64 = 0.0;
    let d = [l.diff(Var::Eta(0))?, l.diff(Var::Eta(1))?];
    let db = [l.diff(Var::EtaBar(0))?, l.diff(Var::EtaBar(1))?];
    let s1 = d[0].value() * eta[0] + d[1].value() * eta[1];
    let s2 = db[0].value() * eta[0].conj() + db[1].value() * eta[1].conj();
    euler_l = euler_l
        .max(rel(s1, l0, l0.norm()))
        .max(rel(s2, l0, l0.norm()));
    let mut euler_g: f64 = 0.0;
    let mut form = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            let g = d[i].diff(Var::EtaBar(j))?;
            form += g.value() * eta[i] * eta[j].conj();
            let scale = g.value().norm();
            let e1 = g.diff(Var::Eta(0))?.value() * eta[0] + g.diff(Var::Eta(1))?.value() * eta[1];
            let e2 = g.diff(Var::EtaBar(0))?.value() * eta[0].conj()
                + g.diff(Var::EtaBar(1))?.value() * eta[1].conj();
            euler_g = euler_g
                .max(e1.norm() / scale.max(1.0))
                .max(e2.norm() / scale.max(1.0));
        }
    }
    let quadratic_form = rel(form, l0, l0.norm());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let f0 = l0.re.sqrt();
    let mut scaling: f64 = 0.0;
    for _ in 0..trials {
        let lam = Complex64::from_polar(
            rng.random_range(0.3..3.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        let f = spec.eval_plain(&point.scale_eta(lam))?.re.sqrt();
        scaling = scaling.max((f - lam.norm() * f0).abs() / (lam.norm() * f0).max(1.0));
    }
    Ok(HomogeneityReport {
        euler_l,
        euler_g,
        quadratic_form,
        scaling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(z1: f64, z2: f64, e1: f64, e2: f64) -> Point {
        Point::from_parts((z1, 0.0), (z2, 0.0), (e1, 0.0), (e2, 0.0))
    }

    #[test]
    fn builtins_parse() {
        for b in BUILTINS {
            MetricSpec::builtin(b.name, &[]).unwrap();
        }
        assert!(matches!(
            MetricSpec::builtin("nope", &[]),
            Err(Error::UnknownMetric(_))
        ));
        assert!(matches!(
            MetricSpec::builtin("euclidean", &[("sigma".into(), "0".into())]),
            Err(Error::BadParam(_))
        ));
        assert!(matches!(
            MetricSpec::builtin("antonelli-shimada", &[("sigma".into(), "abs2(e1)".into())]),
            Err(Error::Dsl(_))
        ));
    }

    #[test]
    fn antonelli_shimada_value() {
        let m = MetricSpec::builtin("antonelli-shimada", &[("sigma".into(), "0".into())]).unwrap();
        let v = m.eval_plain(&pt(0.0, 0.0, 1.0, 1.0)).unwrap();
        assert!((v.re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hartogs_domain() {
        let m = MetricSpec::builtin("hartogs-randers", &[]).unwrap();
        let ctx = JetContext::new(2, pt(0.3, 0.5, 1.0, 0.2)).unwrap();
        assert!(matches!(m.eval_l_jet(&ctx), Err(Error::Domain(_))));
        let ctx = JetContext::new(2, pt(0.5, 0.1, 1.0, 0.5)).unwrap();
        assert!(m.eval_l_jet(&ctx).is_ok());
    }

    #[test]
    fn beta_guard() {
        let m = MetricSpec::builtin("hartogs-kropina", &[]).unwrap();
        // beta = (w e - z t)/D vanishes when t = w e / z
        let p = Point::from_parts((0.5, 0.0), (0.1, 0.0), (1.0, 0.0), (0.2, 0.0));
        assert!(matches!(m.check_domain(&p), Err(Error::Domain(_))));
    }

    #[test]
    fn homogeneity_negative_control() {
        let m = MetricSpec::from_dsl("bad", "L = abs2(e1) + sqrt(abs2(e1)) + abs2(e2)").unwrap();
        let r = validate_homogeneity(&m, &pt(0.1, 0.2, 0.7, 0.4), 4, 1).unwrap();
        assert!(r.max() > 1e-3);
        let m = MetricSpec::builtin("euclidean", &[]).unwrap();
        let r = validate_homogeneity(&m, &pt(0.1, 0.2, 0.7, 0.4), 4, 1).unwrap();
        assert!(r.max() < 1e-12);
    }
}
