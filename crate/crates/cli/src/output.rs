//! Output formatting: every JSON shape here deserializes back into itself.

use serde::{Deserialize, Serialize};

use weylcalc::functional_calculus::{JetSeries, JetSeriesJson, Materialized};
use weylcalc::graphs::{GraphInvariants, GraphJson, UnlabeledGraph};
use weylcalc::phase::{HbarSeries, PolynomialJson, ResolventSymbol, SeriesJson};
use weylcalc::quadratic::TimeSeries;
use weylcalc::scalar::Coefficient;
use weylcalc::verify::CheckReport;
use weylcalc::{GaussianRational, Poly};

use crate::{Failure, Format};

type G = GaussianRational;

pub fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    out!("{text}");
    Ok(())
}

/// 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        format!("{:.*}", (11 - mag).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

fn csv_unsupported() -> Failure {
    Failure::Usage("csv output is only available for tabular commands".into())
}

pub trait Emit {
    fn emit(&self, fmt: Format) -> Result<(), Failure>;
}

impl Emit for Poly {
    fn emit(&self, fmt: Format) -> Result<(), Failure> {
        match fmt {
            Format::Json => print_json(&self.to_json()),
            Format::Text => {
                out!("{self}");
                Ok(())
            }
            Format::Csv => Err(csv_unsupported()),
        }
    }
}

impl Emit for HbarSeries<Poly> {
    fn emit(&self, fmt: Format) -> Result<(), Failure> {
        match fmt {
            Format::Json => print_json(&self.to_json()),
            Format::Text => {
                for (k, c) in self.coeffs().iter().enumerate() {
                    out!("hbar^{k}: {c}");
                }
                Ok(())
            }
            Format::Csv => Err(csv_unsupported()),
        }
    }
}

impl Emit for JetSeries<G> {
    fn emit(&self, fmt: Format) -> Result<(), Failure> {
        match fmt {
            Format::Json => print_json::<JetSeriesJson>(&self.to_json()),
            Format::Text => {
                for ((e, alpha), q) in self.terms() {
                    let d: Vec<String> = alpha.iter().map(|a| a.to_string()).collect();
                    out!("hbar^{e} f^({}): {q}", d.join(","));
                }
                Ok(())
            }
            Format::Csv => Err(csv_unsupported()),
        }
    }
}

/// `N(z, a)/(a − A)^m` with `N = Σ_j numer[j]·a^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventJson {
    pub numer: Vec<PolynomialJson>,
    pub power: usize,
}

impl ResolventJson {
    fn new(r: &ResolventSymbol<G>) -> Self {
        ResolventJson { numer: r.numerator().iter().map(|p| p.to_json()).collect(), power: r.denominator_power() }
    }
}

/// Wire form of [`Materialized`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MaterializedJson {
    Polynomial(SeriesJson),
    Exponential { rate_re: String, rate_im: String, cofactor: SeriesJson },
    Resolvent { base: PolynomialJson, order: usize, coeffs: Vec<ResolventJson> },
}

impl Emit for Materialized<G> {
    fn emit(&self, fmt: Format) -> Result<(), Failure> {
        match (self, fmt) {
            // a concrete polynomial f gives an ordinary series, same shape as `star`
            (Materialized::Polynomial(s), f) => s.emit(f),
            (_, Format::Csv) => Err(csv_unsupported()),
            (Materialized::ExponentialCofactor { rate, cofactor }, Format::Json) => {
                let (re, im) = rate.exact_parts();
                print_json(&MaterializedJson::Exponential {
                    rate_re: weylcalc::scalar::format_rational(&re),
                    rate_im: weylcalc::scalar::format_rational(&im),
                    cofactor: cofactor.to_json(),
                })
            }
            (Materialized::ExponentialCofactor { rate, cofactor }, _) => {
                out!("exp({} A) times", rate.to_text());
                cofactor.emit(Format::Text)
            }
            (Materialized::Resolvent(s), Format::Json) => print_json(&MaterializedJson::Resolvent {
                base: s.coeff(0).base().to_json(),
                order: s.order(),
                coeffs: s.coeffs().iter().map(ResolventJson::new).collect(),
            }),
            (Materialized::Resolvent(s), _) => {
                for (k, r) in s.coeffs().iter().enumerate() {
                    let n: Vec<String> = r
                        .numerator()
                        .iter()
                        .enumerate()
                        .filter(|(_, p)| !p.is_zero())
                        .map(|(j, p)| if j == 0 { format!("({p})") } else { format!("({p})*a^{j}") })
                        .collect();
                    let num = if n.is_empty() { "0".to_string() } else { n.join(" + ") };
                    out!("hbar^{k}: [{num}] / (a - A)^{}", r.denominator_power());
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeTermJson {
    pub t: usize,
    pub hbar: i32,
    pub poly: PolynomialJson,
}

/// Cofactor of `e^{−itA/ℏ}` as `Σ t^a ℏ^b Q_{a,b}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesJson {
    pub t_order: usize,
    pub terms: Vec<TimeTermJson>,
}

impl Emit for TimeSeries<G> {
    fn emit(&self, fmt: Format) -> Result<(), Failure> {
        match fmt {
            Format::Json => print_json(&TimeSeriesJson {
                t_order: self.t_order,
                terms: self
                    .terms
                    .iter()
                    .map(|(&(t, hbar), p)| TimeTermJson { t, hbar, poly: p.to_json() })
                    .collect(),
            }),
            Format::Text => {
                for ((t, h), p) in &self.terms {
                    out!("t^{t} hbar^{h}: {p}");
                }
                Ok(())
            }
            Format::Csv => Err(csv_unsupported()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphRow {
    pub graph: GraphJson,
    #[serde(flatten)]
    pub invariants: GraphInvariants,
}

impl GraphRow {
    pub fn new(g: &UnlabeledGraph, i: &GraphInvariants) -> Self {
        GraphRow { graph: g.to_labeled().to_json(), invariants: i.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BsRow {
    pub n: usize,
    pub e_bs0: Option<f64>,
    pub e_bs2: Option<f64>,
    pub e_bs4: Option<f64>,
    pub e_oracle: Option<f64>,
    pub abs_err: Option<f64>,
    pub blowup: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub seconds: f64,
    pub budget_seconds: u64,
    pub detail: String,
}

impl CheckRow {
    pub fn new(r: &CheckReport) -> Self {
        CheckRow {
            id: r.id,
            name: r.name.to_string(),
            passed: r.passed,
            seconds: r.elapsed.as_secs_f64(),
            budget_seconds: r.budget.as_secs(),
            detail: r.detail.clone(),
        }
    }
}
