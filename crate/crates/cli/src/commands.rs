use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use g2gauge::cliffordspin::{gamma_matrices, invariant_spinor, psi_form, resolve_frame, G2Basis, REFERENCE_FRAME};
use g2gauge::coeffring::{Poly, Rational, Ring, Var};
use g2gauge::exterior::KForm;
use g2gauge::g2core::FundamentalForm;
use g2gauge::instanton::{classify, example_connection, worked_example, Connection1Form, Verdict};
use g2gauge::regdet::{assemble_zsc, normalize};
use serde_json::json;

use crate::dbio::{self, InputError};
use crate::detexpr::parse_det;
use crate::error::ParseError;
use crate::formexpr::parse_form;
use crate::report::SCHEMA_VERSION;
use crate::verify::{run_verify, VerifyOptions};

/// Errors that map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{file}:{err}")]
    Parse { file: String, err: ParseError },
    #[error("{0}")]
    Input(#[from] InputError),
    #[error("{path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

/// Text to print and the exit code.
pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|err| CliError::Io { path: path.into(), err })
}

fn parse_rat(s: &str) -> Result<Rational, CliError> {
    Rational::from_str(s.trim()).map_err(|_| CliError::Usage(format!("`{s}` is not a rational number")))
}

/// `--param name` declares a parameter; `--param name=value` also fixes its value.
pub fn declare_params(params: &[String]) -> Result<(Ring, BTreeMap<Var, Rational>), CliError> {
    let mut ring = Ring::default();
    let mut values = BTreeMap::new();
    for p in params {
        let (name, value) = match p.split_once('=') {
            Some((n, v)) => (n.trim(), Some(parse_rat(v)?)),
            None => (p.trim(), None),
        };
        let var = ring.declare(name).map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(v) = value {
            values.insert(var, v);
        }
    }
    Ok((ring, values))
}

fn read_form(path: &str, ring: &Ring) -> Result<KForm, CliError> {
    parse_form(read(path)?.trim_end(), ring).map_err(|err| CliError::Parse { file: path.into(), err })
}

pub fn verify(opts: &VerifyOptions, as_json: bool) -> Output {
    let report = run_verify(opts);
    let text = if as_json { report.to_json() } else { report.to_string() };
    Output { text, code: report.exit_code() }
}

pub fn classify_cmd(form: &str, params: &[String], as_json: bool) -> Result<Output, CliError> {
    let (ring, values) = declare_params(params)?;
    let b = read_form(form, &ring)?;
    if b.degree() != 1 {
        return Err(CliError::Usage(format!("a connection is a 1-form, got degree {}", b.degree())));
    }
    let rep = classify(&Connection1Form::new(b.clone()), &FundamentalForm::build());
    let assigned = !values.is_empty();
    if as_json {
        let conds: Vec<_> = rep
            .verdicts
            .iter()
            .map(|(c, v)| {
                let mut o = match v {
                    Verdict::Holds(h) => json!({ "name": c.name(), "holds": h }),
                    Verdict::Conditions(ps) => json!({
                        "name": c.name(),
                        "conditions": ps.iter().map(|p| p.display(&ring).to_string()).collect::<Vec<_>>(),
                    }),
                };
                if assigned {
                    o["at_assignment"] = json!(v.at(&values));
                }
                o
            })
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "connection": b.display(&ring).to_string(),
            "parameters": ring.params(),
            "verdicts": conds,
        });
        return Ok(Output::ok(serde_json::to_string_pretty(&doc).expect("serializes")));
    }
    let mut text = format!("B = {}\n{}", b.display(&ring), rep.display(&ring));
    if assigned {
        let shown: Vec<String> = values.iter().map(|(v, x)| format!("{}={x}", ring.name(*v))).collect();
        writeln!(text, "at {}:", shown.join(", ")).unwrap();
        for (c, v) in &rep.verdicts {
            writeln!(text, "  {:<18} {}", c.name(), v.at(&values)).unwrap();
        }
    }
    Ok(Output::ok(text.trim_end().into()))
}

pub fn decompose(degree: u8, form: &str, params: &[String]) -> Result<Output, CliError> {
    let (ring, _) = declare_params(params)?;
    let w = read_form(form, &ring)?;
    if w.degree() != degree {
        return Err(CliError::Usage(format!("--degree {degree} but the form has degree {}", w.degree())));
    }
    let f = FundamentalForm::build();
    let parts: Vec<(&str, KForm)> = match degree {
        2 => {
            let (a, b) = f.lambda2_split(&w);
            vec![("7", a), ("14", b)]
        }
        3 => {
            let (a, b, c) = f.lambda3_split(&w);
            vec![("1", a), ("7", b), ("27", c)]
        }
        4 => {
            let (a, b, c) = f.lambda4_split(&w);
            vec![("1", a), ("7", b), ("27", c)]
        }
        _ => return Err(CliError::Usage("degree must be 2, 3 or 4".into())),
    };
    let mut text = String::new();
    for (name, p) in parts {
        writeln!(text, "[{name}] {}", p.display(&ring)).unwrap();
    }
    Ok(Output::ok(text.trim_end().into()))
}

pub fn example(a: Option<&str>, b: Option<&str>) -> Result<Output, CliError> {
    let mut ring = Ring::default();
    let mut coeff = |name: &str, given: Option<&str>| -> Result<Poly, CliError> {
        Ok(match given {
            Some(s) => Poly::constant(parse_rat(s)?),
            None => Poly::var(ring.declare(name).expect("fresh name")),
        })
    };
    let (pa, pb) = (coeff("a", a)?, coeff("b", b)?);
    let f = FundamentalForm::build();
    let c = example_connection(&pa, &pb);
    let mut text = format!("B = {}\ndB = {}\n", c.b.display(&ring), c.f.display(&ring));
    for r in worked_example(&pa, &pb, &f) {
        let mark = if r.matches() { "ok" } else { "MISMATCH" };
        writeln!(text, "{:<12} {mark:<8} {}", r.name, r.computed.display(&ring)).unwrap();
        if !r.matches() {
            writeln!(text, "{:<12} {:<8} {}", "", "expected", r.expected.display(&ring)).unwrap();
        }
    }
    write!(text, "{}", classify(&c, &f).display(&ring)).unwrap();
    Ok(Output::ok(text.trim_end().into()))
}

pub fn spinor() -> Output {
    let g = gamma_matrices().expect("built-in gamma matrices");
    let eta = invariant_spinor(&G2Basis::new(&g)).expect("one-dimensional nullspace");
    let psi = psi_form(&eta, &g).expect("real coefficients");
    let f = FundamentalForm::build();
    let res = resolve_frame(&psi, &REFERENCE_FRAME, &f.phi0);
    Output::ok(format!(
        "eta = {eta}\n|eta|^2 = {}\npsi = {psi}\nphi0 = {}\nframe {REFERENCE_FRAME:?} relabeling psi -> phi0: {res:?}",
        eta.norm_sq, f.phi0
    ))
}

pub fn zeta_det(expr: &str, b0: u32, b1: u32) -> Result<Output, CliError> {
    let d = parse_det(expr).map_err(|err| CliError::Parse { file: "<expr>".into(), err })?;
    let (out, steps) = normalize(&d, b0, b1);
    let mut text = format!("input: {d}\n");
    for s in &steps {
        writeln!(text, "  [{}] {}", s.rule, s.result).unwrap();
    }
    write!(text, "result: {out}").unwrap();
    Ok(Output::ok(text))
}

pub fn assemble(b0: u32, b1: u32) -> Result<Output, CliError> {
    let d = assemble_zsc(b0, b1).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut text = String::new();
    for s in &d.steps {
        writeln!(text, "[{}] {}", s.rule, s.result).unwrap();
    }
    write!(text, "Z_sc = {}", d.result).unwrap();
    Ok(Output::ok(text))
}

pub fn db_verify(complex: &str, cocycles: &str, gauge: Option<&str>, as_json: bool) -> Result<Output, CliError> {
    let cx: dbio::ComplexFile = dbio::read_json(complex, &read(complex)?)?;
    let cc: dbio::CocycleFile = dbio::read_json(cocycles, &read(cocycles)?)?;
    let g: Option<dbio::GaugeFile> = match gauge {
        Some(p) => Some(dbio::read_json(p, &read(p)?)?),
        None => None,
    };
    let input = dbio::build(&cx, &cc, g.as_ref())?;
    let report = dbio::run_db_verify(&input);
    let text = if as_json { report.to_json() } else { report.to_string() };
    Ok(Output { text, code: report.exit_code() })
}
