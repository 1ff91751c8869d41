//! JSON inputs and the report for `db-verify`.
//!
//! Complex: `{"tops": [[v, ...], ...]}`, each top simplex listed in positive
//! vertex order.
//!
//! Cocycles:
//!
//! ```json
//! {
//!   "classes": [
//!     {
//!       "upsilon": [{"tuple": [0, 1, 2], "value": 1}],
//!       "connection": [{"tuple": [0], "flag": [[0], [0, 1]], "value": "1/2"}],
//!       "gamma": [{"tuple": [0, 1], "flag": [[0]], "value": "-1/3"}],
//!       "global_connection": [{"flag": [[0], [0, 1]], "value": "1/4"}]
//!     }
//!   ],
//!   "background": {"degree": 0, "values": [{"tuple": [0], "value": 1}]}
//! }
//! ```
//!
//! A flag is a chain of simplices of the complex, each given by its sorted
//! vertices. Without `connection` and `gamma` a class is built from `upsilon`
//! through the partition of unity. Values are integers or rational strings.
//!
//! Gauge: `{"kind": "local" | "large", "class": 0, "values": [...]}`, with
//! `(tuple, flag)` entries for local data and `tuple` entries for large data.

use std::collections::BTreeMap;
use std::str::FromStr;

use g2gauge::coeffring::Rational;
use g2gauge::dbcech::{
    action_terms, gauge_variation, BackgroundCocycle, CechCochain, Cover, DBClass, Flag, GaugeData, PolyDecomp,
    Residual,
};
use num_traits::Zero;
use serde::Deserialize;
use serde_json::json;

use crate::report::{Check, Report};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{file}: {msg}")]
    Json { file: String, msg: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Text(String),
}

impl Value {
    fn rational(&self) -> Result<Rational, InputError> {
        match self {
            Value::Int(n) => Ok(Rational::from_integer((*n).into())),
            Value::Text(s) => Rational::from_str(s.trim()).map_err(|_| InputError::Invalid(format!("bad rational `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    #[serde(default)]
    pub tuple: Vec<u32>,
    #[serde(default)]
    pub flag: Option<Vec<Vec<u32>>>,
    pub value: Value,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub tops: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFile {
    #[serde(default)]
    pub upsilon: Vec<Entry>,
    pub connection: Option<Vec<Entry>>,
    pub gamma: Option<Vec<Entry>>,
    #[serde(default)]
    pub global_connection: Vec<Entry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundFile {
    pub degree: usize,
    pub values: Vec<Entry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleFile {
    pub classes: Vec<ClassFile>,
    pub background: BackgroundFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeKind {
    Local,
    Large,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeFile {
    pub kind: GaugeKind,
    pub class: usize,
    pub values: Vec<Entry>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(file: &str, text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Json { file: file.into(), msg: e.to_string() })
}

fn sorted_tuple(cover: &Cover, t: &[u32], q: usize) -> Result<Vec<u32>, InputError> {
    if t.len() != q + 1 || !t.windows(2).all(|w| w[0] < w[1]) || !cover.in_nerve(t) {
        return Err(InputError::Invalid(format!("{t:?} is not an increasing nerve tuple of length {}", q + 1)));
    }
    Ok(t.to_vec())
}

/// Simplex ids of a chain `s_0 < s_1 < ...` of faces.
fn chain_ids(cover: &Cover, flag: &[Vec<u32>]) -> Result<Flag, InputError> {
    let ids = flag
        .iter()
        .map(|s| cover.id(s).ok_or_else(|| InputError::Invalid(format!("{s:?} is not a simplex of the complex"))))
        .collect::<Result<Vec<u32>, _>>()?;
    if !ids.windows(2).all(|w| cover.star(w[0]).contains(&w[1])) {
        return Err(InputError::Invalid(format!("{flag:?} is not a chain of faces")));
    }
    Ok(ids)
}

fn flag_ids(cover: &Cover, tuple: &[u32], flag: &[Vec<u32>], k: usize) -> Result<Flag, InputError> {
    let ids = chain_ids(cover, flag)?;
    if ids.len() != k + 1 || !cover.flag_in(&ids, tuple) {
        return Err(InputError::Invalid(format!("{flag:?} is not a {k}-flag inside the region of {tuple:?}")));
    }
    Ok(ids)
}

fn integral(cover: &Cover, q: usize, entries: &[Entry]) -> Result<CechCochain, InputError> {
    let mut c = CechCochain::integral(q);
    for e in entries {
        let v = e.value.rational()?;
        if !v.is_integer() || e.flag.is_some() {
            return Err(InputError::Invalid(format!("integral entry on {:?} must be a plain integer", e.tuple)));
        }
        c.set_constant(sorted_tuple(cover, &e.tuple, q)?, v);
    }
    Ok(c)
}

fn forms(cover: &Cover, q: usize, k: usize, entries: &[Entry]) -> Result<CechCochain, InputError> {
    let mut c = CechCochain::forms(q, k);
    for e in entries {
        let tuple = sorted_tuple(cover, &e.tuple, q)?;
        let flag = e.flag.as_ref().ok_or_else(|| InputError::Invalid(format!("entry on {tuple:?} needs a flag")))?;
        let ids = flag_ids(cover, &tuple, flag, k)?;
        c.set_value(tuple, ids, e.value.rational()?);
    }
    Ok(c)
}

pub struct DbInput {
    pub cover: Cover,
    pub classes: Vec<DBClass>,
    pub background: BackgroundCocycle,
    pub gauge: Option<GaugeData>,
}

pub fn build(complex: &ComplexFile, cocycles: &CocycleFile, gauge: Option<&GaugeFile>) -> Result<DbInput, InputError> {
    let cover = Cover::from_oriented_tops(&complex.tops).map_err(|e| InputError::Invalid(e.to_string()))?;
    let mut classes = Vec::new();
    for c in &cocycles.classes {
        let upsilon = integral(&cover, 2, &c.upsilon)?;
        let mut class = match (&c.connection, &c.gamma) {
            (Some(a), Some(g)) => DBClass::new(forms(&cover, 0, 1, a)?, forms(&cover, 1, 0, g)?, upsilon)
                .map_err(|e| InputError::Invalid(e.to_string()))?,
            (None, None) => DBClass::from_integral_cocycle(&cover, &upsilon),
            _ => return Err(InputError::Invalid("give both `connection` and `gamma` or neither".into())),
        };
        if !c.global_connection.is_empty() {
            let mut g = BTreeMap::new();
            for e in &c.global_connection {
                let flag = e.flag.as_ref().ok_or_else(|| InputError::Invalid("global entries need a flag".into()))?;
                if flag.len() != 2 {
                    return Err(InputError::Invalid("global connection entries are 1-flags".into()));
                }
                g.insert(chain_ids(&cover, flag)?, e.value.rational()?);
            }
            class = class.with_global_connection(&cover, &g);
        }
        classes.push(class);
    }
    let theta = integral(&cover, cocycles.background.degree, &cocycles.background.values)?;
    let background = BackgroundCocycle::new(&cover, theta).map_err(|e| InputError::Invalid(e.to_string()))?;
    let gauge = match gauge {
        None => None,
        Some(g) if g.kind == GaugeKind::Local => {
            Some(GaugeData::Local { class: g.class, f: forms(&cover, 0, 0, &g.values)? })
        }
        Some(g) => Some(GaugeData::Large { class: g.class, z: integral(&cover, 1, &g.values)? }),
    };
    Ok(DbInput { cover, classes, background, gauge })
}

fn residual_json(cover: &Cover, rs: &[Residual]) -> serde_json::Value {
    let shown: Vec<_> = rs
        .iter()
        .take(10)
        .map(|r| {
            let flag: Option<Vec<Vec<u32>>> = r.flag.as_ref().map(|f| f.iter().map(|&s| cover.simplex(s).to_vec()).collect());
            json!({ "tuple": r.tuple, "flag": flag, "value": r.value.to_string() })
        })
        .collect();
    json!({ "count": rs.len(), "first": shown })
}

pub fn run_db_verify(input: &DbInput) -> Report {
    let cover = &input.cover;
    let decomp = PolyDecomp::build(cover);
    let mut checks = Vec::new();
    let (dd, ins) = (decomp.dd_failures(), decomp.insertion_failures(cover));
    checks.push(Check::from_bool(
        "complex",
        dd.is_empty() && ins.is_empty(),
        format!("dimension {}, {} charts, {} nerve simplices", cover.dim(), cover.num_charts(), cover.num_simplices()),
        json!({ "boundary_failures": dd, "insertion_failures": ins }),
    ));
    for (k, c) in input.classes.iter().enumerate() {
        let r = c.cocycle_check(cover);
        checks.push(Check::from_bool(
            &format!("class-{k}-cocycle"),
            r.is_cocycle(),
            format!(
                "residuals: connection {}, transition {}, integral {}",
                r.connection.len(),
                r.transition.len(),
                r.integral.len()
            ),
            json!({
                "connection": residual_json(cover, &r.connection),
                "transition": residual_json(cover, &r.transition),
                "integral": residual_json(cover, &r.integral),
                "upsilon_integral": r.upsilon_integral,
                "transition_cocycle": r.transition_cocycle,
            }),
        ));
    }
    let (chi, tau) = input.background.relation_residuals(cover);
    checks.push(Check::from_bool(
        "background",
        chi.is_empty() && tau.is_empty(),
        format!("Cech degree {}; relation residuals chi {}, tau {}", input.background.degree(), chi.len(), tau.len()),
        json!({ "chi": residual_json(cover, &chi), "tau": residual_json(cover, &tau) }),
    ));
    match action_terms(cover, &decomp, &input.classes, &input.background) {
        Ok(t) => {
            let ladder: Vec<String> = t.ladder.iter().map(|x| x.to_string()).collect();
            checks.push(Check::pass(
                "action",
                format!(
                    "ladder [{}], chi {}, tau {}; total {} = {} mod Z",
                    ladder.join(", "),
                    t.chi_term,
                    t.tau_term,
                    t.total(),
                    t.total_mod_lattice()
                ),
            ));
        }
        Err(e) => checks.push(Check::fail("action", e.to_string(), json!({ "error": e.to_string() }))),
    }
    if let Some(g) = &input.gauge {
        let local = matches!(g, GaugeData::Local { .. });
        let check = match gauge_variation(cover, &decomp, &input.classes, &input.background, g) {
            Ok(v) => {
                let ok = if local { v.is_zero() } else { v.is_integer() };
                let want = if local { "zero" } else { "an integer" };
                Check::from_bool(
                    "gauge-variation",
                    ok,
                    format!("{} gauge variation {v} (must be {want})", if local { "local" } else { "large" }),
                    json!({ "variation": v.to_string() }),
                )
            }
            Err(e) => Check::fail("gauge-variation", e.to_string(), json!({ "error": e.to_string() })),
        };
        checks.push(check);
    }
    Report::new("db-verify", None, checks)
}
