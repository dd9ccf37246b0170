//! The `berkline` command-line front end.
//!
//! [`run`] parses arguments, reads the input document, calls into
//! `berkline-core` and renders the result. It never touches the process
//! state, so tests drive it directly; `main` only forwards its output.

pub mod doc;

use std::fmt;
use std::path::PathBuf;

use berkline_core::curves::{self, ChainBudget, Dist};
use berkline_core::fsderiv::{self, SeriesMap};
use berkline_core::points::{diam_affine, diam_proj, diam_proj_point, eval_seminorm};
use berkline_core::tropic::{self, Interval, TropicalPolygon};
use berkline_core::{metrics, rational, zalcman};
use berkline_core::{AbsValue, Backend, FieldSpec, Poly, ProjPoint, Rational};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use doc::{Document, PointDoc, ScalarDoc};

/// Why a command failed.
#[derive(Debug)]
pub enum CliError {
    /// The input is not well-formed JSON for the schema.
    Parse(serde_json::Error),
    /// The input parsed but is missing something the command needs.
    Schema(String),
    Io(String),
    /// The library rejected the input.
    Domain(berkline_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(e) => write!(f, "error: parse: {e}"),
            CliError::Schema(m) => write!(f, "error: schema: {m}"),
            CliError::Io(m) => write!(f, "error: io: {m}"),
            CliError::Domain(e) => write!(f, "error: {}: {e}", e.name()),
        }
    }
}

impl From<berkline_core::Error> for CliError {
    fn from(e: berkline_core::Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "berkline", version, about = "Exact computations on the Berkovich line")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Input document (JSON)
    pub file: PathBuf,
    /// Field, `puiseux` or `padic:p`; overrides the document
    #[arg(long)]
    pub field: Option<String>,
    /// Emit a JSON result instead of text
    #[arg(long)]
    pub json: bool,
    /// Print magnitudes as powers of the base instead of exponents
    #[arg(long)]
    pub multiplicative: bool,
}

fn point_flag(s: &str) -> Result<PointDoc, String> {
    PointDoc::parse_flag(s)
}

fn rational_flag(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Seminorm |f|(x) of a series at points
    Eval {
        #[command(flatten)]
        common: Common,
        /// `a,r` (center, log-radius or -inf) or `inf`; repeatable
        #[arg(long = "point", value_parser = point_flag, allow_hyphen_values = true)]
        points: Vec<PointDoc>,
    },
    /// Affine and projective diameter of a tuple of points
    Diam {
        #[command(flatten)]
        common: Common,
        #[arg(long = "point", value_parser = point_flag, allow_hyphen_values = true)]
        points: Vec<PointDoc>,
    },
    /// Fubini-Study derivative of a map at points
    Fsderiv {
        #[command(flatten)]
        common: Common,
        #[arg(long = "point", value_parser = point_flag, allow_hyphen_values = true)]
        points: Vec<PointDoc>,
    },
    /// Projective distance between two rigid points
    Dproj {
        #[command(flatten)]
        common: Common,
        #[arg(long = "point", value_parser = point_flag, allow_hyphen_values = true)]
        points: Vec<PointDoc>,
    },
    /// Tropical envelope values, or plot data with --plot
    Theta {
        #[command(flatten)]
        common: Common,
        /// Log-radius to evaluate at; repeatable
        #[arg(long, value_parser = rational_flag, allow_hyphen_values = true)]
        at: Vec<Rational>,
        /// Emit segments and breakpoints for piecewise-linear plotting
        #[arg(long)]
        plot: bool,
    },
    /// Linear pieces of the tropical envelope
    Segments {
        #[command(flatten)]
        common: Common,
    },
    /// Number of zeros in the annulus log ρ < log|T| < log R
    Zeros {
        #[command(flatten)]
        common: Common,
        /// log ρ
        #[arg(long, value_parser = rational_flag, allow_hyphen_values = true)]
        from: Rational,
        /// log R
        #[arg(long, value_parser = rational_flag, allow_hyphen_values = true)]
        to: Rational,
    },
    /// Monomial pieces of a series over an interval of log-radii
    Pieces {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = rational_flag, allow_hyphen_values = true)]
        from: Option<Rational>,
        #[arg(long, value_parser = rational_flag, allow_hyphen_values = true)]
        to: Option<Rational>,
    },
    /// Kobayashi semi-distance between two named points
    Dck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Chain semi-distance on a tree of disks
    Dtree {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Classify a curve model
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Total genus of a curve model
    Genus {
        #[command(flatten)]
        common: Common,
    },
    /// Euler characteristic 2 - 2g - punctures
    Chi {
        #[arg(long)]
        genus: u64,
        #[arg(long)]
        punctures: u64,
        #[arg(long)]
        json: bool,
    },
    /// Gromov selection on a sampled function
    Gromov {
        #[command(flatten)]
        common: Common,
    },
    /// Zalcman rescaling of a family of maps
    Zalcman {
        #[command(flatten)]
        common: Common,
    },
}

/// Everything a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command line. `args` includes the program name.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if e.use_stderr() {
                Output { code, stdout: String::new(), stderr: text }
            } else {
                Output { code, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli.command) {
        Ok(stdout) => Output { code: 0, stdout, stderr: String::new() },
        Err(e) => Output {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("{e}\n"),
        },
    }
}

/// A loaded document with its resolved field.
struct Input {
    doc: Document,
    common: Common,
}

impl Input {
    fn load(common: &Common) -> CliResult<Self> {
        let text = std::fs::read_to_string(&common.file)
            .map_err(|e| CliError::Io(format!("{}: {e}", common.file.display())))?;
        let doc = Document::parse(&text).map_err(CliError::Parse)?;
        doc.validate()?;
        Ok(Input {
            doc,
            common: common.clone(),
        })
    }

    fn field(&self) -> CliResult<FieldSpec> {
        self.doc.field(self.common.field.as_deref())
    }

    fn backend(&self) -> CliResult<Backend> {
        Ok(self.field()?.backend())
    }

    fn points(&self, flags: &[PointDoc]) -> CliResult<Vec<ProjPoint>> {
        let b = self.backend()?;
        let docs = if flags.is_empty() { &self.doc.points } else { flags };
        if docs.is_empty() {
            return Err(CliError::Schema("no points given (use \"points\" or --point)".into()));
        }
        docs.iter().map(|p| p.to_point(b)).collect()
    }

    fn series(&self) -> CliResult<(Poly, Interval)> {
        let s = self.doc.series.as_ref().ok_or_else(|| missing("series"))?;
        Ok((s.to_poly(self.backend()?)?, s.interval()?))
    }

    fn map(&self) -> CliResult<SeriesMap> {
        let m = self.doc.map.as_ref().ok_or_else(|| missing("map"))?;
        m.to_map(self.backend()?)
    }

    /// The tropical polygon of a `tropical` block, or of a `series` block.
    fn polygon(&self) -> CliResult<TropicalPolygon> {
        if let Some(t) = &self.doc.tropical {
            return t.to_polygon();
        }
        if self.doc.series.is_some() {
            let (f, domain) = self.series()?;
            return Ok(tropic::from_series(&f, domain)?);
        }
        Err(CliError::Schema("expected a \"tropical\" or \"series\" block".into()))
    }

    fn render(&self, text: String, value: Value) -> String {
        render(self.common.json, text, value)
    }

    fn mag(&self, v: &AbsValue) -> CliResult<String> {
        if !self.common.multiplicative {
            return Ok(v.to_string());
        }
        let base = match self.backend()? {
            Backend::Puiseux => "β".to_string(),
            Backend::Padic(p) => p.to_string(),
        };
        Ok(v.format_multiplicative(&base))
    }

    fn mags(&self, vs: &[AbsValue]) -> CliResult<String> {
        let lines = vs.iter().map(|v| self.mag(v)).collect::<CliResult<Vec<_>>>()?;
        Ok(lines.join("\n"))
    }
}

fn missing(block: &str) -> CliError {
    CliError::Schema(format!("expected a \"{block}\" block"))
}

fn render(json: bool, text: String, value: Value) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
        s.push('\n');
        s
    } else if text.is_empty() {
        text
    } else {
        text + "\n"
    }
}

fn q(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

fn logval(v: &AbsValue) -> Value {
    Value::String(v.to_string())
}

fn opt_q(r: &Option<Rational>) -> Value {
    r.as_ref().map_or(Value::Null, q)
}

fn dist(d: &Dist) -> Value {
    Value::String(d.to_string())
}

fn scalar(x: &berkline_core::ValuedScalar) -> Value {
    serde_json::to_value(ScalarDoc::from_scalar(x)).expect("scalars serialize")
}

/// `f(1/w)` as a Laurent polynomial in `w`.
fn in_infinity_chart(f: &Poly) -> CliResult<Poly> {
    Ok(Poly::from_terms(
        f.backend(),
        f.terms().iter().map(|(n, c)| (-n, c.clone())),
    )?)
}

fn execute(cmd: &Command) -> CliResult<String> {
    match cmd {
        Command::Eval { common, points } => {
            let input = Input::load(common)?;
            let (f, _) = input.series()?;
            let values = input
                .points(points)?
                .iter()
                .map(|p| match p {
                    ProjPoint::Affine(d) => Ok(eval_seminorm(&f, d)?),
                    ProjPoint::Infinity(d) => match eval_seminorm(&in_infinity_chart(&f)?, d) {
                        Err(berkline_core::Error::PoleAtPoint(_)) => {
                            Err(berkline_core::Error::PoleAtPoint("inf".into()).into())
                        }
                        r => Ok(r?),
                    },
                })
                .collect::<CliResult<Vec<_>>>()?;
            let json = json!({"values": values.iter().map(logval).collect::<Vec<_>>()});
            Ok(input.render(input.mags(&values)?, json))
        }
        Command::Diam { common, points } => {
            let input = Input::load(common)?;
            let pts = input.points(points)?;
            let affine: Option<Vec<_>> = pts
                .iter()
                .map(|p| match p {
                    ProjPoint::Affine(d) => Some(d.clone()),
                    ProjPoint::Infinity(_) => None,
                })
                .collect();
            match affine {
                Some(xs) => {
                    let (a, p) = (diam_affine(&xs), diam_proj(&xs));
                    let text = format!("diam_A {}\ndiam_P {}", input.mag(&a)?, input.mag(&p)?);
                    Ok(input.render(text, json!({"diam_affine": logval(&a), "diam_proj": logval(&p)})))
                }
                None if pts.len() == 1 => {
                    let p = diam_proj_point(&pts[0]);
                    let text = format!("diam_P {}", input.mag(&p)?);
                    Ok(input.render(text, json!({"diam_proj": logval(&p)})))
                }
                None => Err(CliError::Schema(
                    "a tuple of several points must lie in the affine chart".into(),
                )),
            }
        }
        Command::Fsderiv { common, points } => {
            let input = Input::load(common)?;
            let f = input.map()?;
            let values = input
                .points(points)?
                .iter()
                .map(|p| fsderiv::fs_derivative_at(&f, p))
                .collect::<Result<Vec<_>, _>>()?;
            let json = json!({"values": values.iter().map(logval).collect::<Vec<_>>()});
            Ok(input.render(input.mags(&values)?, json))
        }
        Command::Dproj { common, points } => {
            let input = Input::load(common)?;
            let pts = input.points(points)?;
            let [x, y] = pts.as_slice() else {
                return Err(CliError::Schema(format!("dproj takes two points, got {}", pts.len())));
            };
            let d = metrics::d_proj_line(x, y)?;
            Ok(input.render(input.mag(&d)?, json!({"distance": logval(&d)})))
        }
        Command::Theta { common, at, plot } => {
            let input = Input::load(common)?;
            let p = input.polygon()?;
            if at.is_empty() && !plot {
                return Err(CliError::Schema("theta needs --at or --plot".into()));
            }
            let values = at
                .iter()
                .map(|r| tropic::theta_eval(&p, r))
                .collect::<Result<Vec<_>, _>>()?;
            let mut lines: Vec<String> = values.iter().map(rational::format).collect();
            let mut json = json!({"values": values.iter().map(q).collect::<Vec<_>>()});
            if *plot {
                let (text, value) = plot_data(&p)?;
                lines.extend(text);
                json["plot"] = value;
            }
            Ok(input.render(lines.join("\n"), json))
        }
        Command::Segments { common } => {
            let input = Input::load(common)?;
            let segs = tropic::segments(&input.polygon()?);
            let text = segs
                .iter()
                .map(|s| {
                    format!(
                        "{} slope {} intercept {}",
                        s.interval,
                        s.slope,
                        rational::format(&s.intercept)
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            let json = json!({"segments": segs.iter().map(|s| json!({
                "lo": opt_q(&s.interval.lo),
                "hi": opt_q(&s.interval.hi),
                "slope": s.slope,
                "intercept": q(&s.intercept),
            })).collect::<Vec<_>>()});
            Ok(input.render(text, json))
        }
        Command::Zeros { common, from, to } => {
            let input = Input::load(common)?;
            let (f, _) = input.series()?;
            let n = tropic::count_zeros_annulus(&f, from, to)?;
            Ok(input.render(n.to_string(), json!({"zeros": n})))
        }
        Command::Pieces { common, from, to } => {
            let input = Input::load(common)?;
            let (f, domain) = input.series()?;
            let interval = match (from, to) {
                (None, None) => domain,
                _ => Interval::new(
                    from.clone().or(domain.lo),
                    to.clone().or(domain.hi),
                )?,
            };
            let pieces = tropic::monomial_pieces(&f, &interval)?;
            let coef = |c: &Option<Rational>| c.as_ref().map_or("-inf".to_string(), rational::format);
            let text = pieces
                .iter()
                .map(|p| {
                    format!(
                        "{} log_coefficient {} exponent {}",
                        p.interval,
                        coef(&p.log_coefficient),
                        p.exponent
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            let json = json!({"pieces": pieces.iter().map(|p| json!({
                "lo": opt_q(&p.interval.lo),
                "hi": opt_q(&p.interval.hi),
                "log_coefficient": coef(&p.log_coefficient),
                "exponent": p.exponent,
            })).collect::<Vec<_>>()});
            Ok(input.render(text, json))
        }
        Command::Dck { common, from, to } => {
            let input = Input::load(common)?;
            let d = if let Some(t) = &input.doc.tree_of_disks {
                curves::dck_tree(&t.to_tree()?, from, to, ChainBudget::from_env()?)?
            } else if let Some(c) = &input.doc.curve_model {
                let m = c.to_model()?;
                curves::dck_curve(&m, &c.point(from)?, &c.point(to)?)?
            } else {
                return Err(CliError::Schema(
                    "expected a \"tree-of-disks\" or \"curve-model\" block".into(),
                ));
            };
            Ok(input.render(d.to_string(), json!({"distance": dist(&d)})))
        }
        Command::Dtree { common, from, to } => {
            let input = Input::load(common)?;
            let t = input.doc.tree_of_disks.as_ref().ok_or_else(|| missing("tree-of-disks"))?;
            let d = curves::d_tree(&t.to_tree()?, from, to, ChainBudget::from_env()?)?;
            Ok(input.render(d.to_string(), json!({"distance": dist(&d)})))
        }
        Command::Classify { common } => {
            let input = Input::load(common)?;
            let m = input.doc.curve_model.as_ref().ok_or_else(|| missing("curve-model"))?.to_model()?;
            let c = curves::classify(&m)?.to_string();
            Ok(input.render(c.clone(), json!({"classification": c})))
        }
        Command::Genus { common } => {
            let input = Input::load(common)?;
            let m = input.doc.curve_model.as_ref().ok_or_else(|| missing("curve-model"))?.to_model()?;
            let g = curves::total_genus(&m)?;
            Ok(input.render(g.to_string(), json!({"genus": g})))
        }
        Command::Chi { genus, punctures, json } => {
            let chi = curves::euler_characteristic(*genus, *punctures);
            Ok(render(*json, chi.to_string(), json!({"chi": chi})))
        }
        Command::Gromov { common } => {
            let input = Input::load(common)?;
            let s = input.doc.sample_function.as_ref().ok_or_else(|| missing("sample-function"))?;
            let sample = s.to_sample(input.backend()?)?;
            if s.start >= sample.points().len() {
                return Err(CliError::Schema(format!("start index {} out of range", s.start)));
            }
            let b = zalcman::gromov_select(&sample, s.start, &s.epsilon.0, &s.tau.0)?;
            let (point, value) = (&sample.points()[b], &sample.values()[b]);
            let json = json!({"index": b, "point": scalar(point), "value": q(value)});
            Ok(input.render(format!("{point}"), json))
        }
        Command::Zalcman { common } => {
            let input = Input::load(common)?;
            let b = input.backend()?;
            let fam = input.doc.family.as_ref().ok_or_else(|| missing("family"))?;
            let rescaled =
                zalcman::zalcman_rescale(&fam.to_family(b)?, &fam.witnesses(b)?, &fam.samples(b)?)?;
            let text = rescaled
                .iter()
                .map(|r| format!("n {} z {} rho {} g {}", r.n, r.z, r.rho, r.g))
                .collect::<Vec<_>>()
                .join("\n");
            let json = json!({"rescaled": rescaled.iter().map(|r| json!({
                "n": r.n,
                "witness": scalar(&r.witness),
                "z": scalar(&r.z),
                "rho": scalar(&r.rho),
                "g": r.g.to_string(),
            })).collect::<Vec<_>>()});
            Ok(input.render(text, json))
        }
    }
}

/// Plot lines `segment lo hi slope intercept` followed by
/// `point r theta` at every breakpoint.
fn plot_data(p: &TropicalPolygon) -> CliResult<(Vec<String>, Value)> {
    let segs = tropic::segments(p);
    let end = |e: &Option<Rational>, inf: &str| e.as_ref().map_or(inf.to_string(), rational::format);
    let mut lines = Vec::new();
    for s in &segs {
        lines.push(format!(
            "segment {} {} {} {}",
            end(&s.interval.lo, "-inf"),
            end(&s.interval.hi, "inf"),
            s.slope,
            rational::format(&s.intercept)
        ));
    }
    let mut breaks = Vec::new();
    for w in segs.windows(2) {
        if let Some(r) = &w[0].interval.hi {
            let theta = tropic::theta_eval(p, r)?;
            lines.push(format!("point {} {}", rational::format(r), rational::format(&theta)));
            breaks.push(json!({"r": q(r), "theta": q(&theta)}));
        }
    }
    let value = json!({
        "segments": segs.iter().map(|s| json!({
            "lo": opt_q(&s.interval.lo),
            "hi": opt_q(&s.interval.hi),
            "slope": s.slope,
            "intercept": q(&s.intercept),
        })).collect::<Vec<_>>(),
        "breakpoints": breaks,
    });
    Ok((lines, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let parse = serde_json::from_str::<Document>("{").unwrap_err();
        assert_eq!(CliError::Parse(parse).exit_code(), 2);
        assert_eq!(CliError::Schema("x".into()).exit_code(), 2);
        assert_eq!(CliError::Domain(berkline_core::Error::NoNodes).exit_code(), 3);
    }

    #[test]
    fn domain_errors_name_the_variant() {
        let e = CliError::Domain(berkline_core::Error::UnknownMark("w".into()));
        assert_eq!(e.to_string(), "error: UnknownMark: unknown name: w");
    }

    #[test]
    fn chi_needs_no_file() {
        let out = run(["berkline", "chi", "--genus", "1", "--punctures", "0"]);
        assert_eq!(out, Output { code: 0, stdout: "0\n".into(), stderr: String::new() });
    }

    #[test]
    fn bad_flags_are_usage_errors() {
        let out = run(["berkline", "eval", "f.json", "--point", "1"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("--point"));
    }

    #[test]
    fn laurent_inversion() {
        let b = Backend::Padic(7);
        let f = Poly::from_terms(b, [(-2, b.from_int(3)), (1, b.one())]).unwrap();
        let g = in_infinity_chart(&f).unwrap();
        assert_eq!(g.coefficient(2), Some(&b.from_int(3)));
        assert_eq!(g.coefficient(-1), Some(&b.one()));
    }
}
