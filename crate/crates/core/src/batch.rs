//! Scenario batteries: config loading, parallel evaluation and reports.
//!
//! A config is one JSON document
//! `{"defaults": {...}, "scenarios": [{...}, ...]}`; each scenario is merged
//! over the defaults (key by key, and one level deep for `grid` and
//! `budget`) before it is parsed.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::Hasher;
use std::sync::Arc;
use std::time::Instant;

use fnv::FnvHasher;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::{Map, Value};

use crate::criteria::{evaluate, Form, Options};
use crate::error::Error;
use crate::exponents::Exponents;
use crate::gridfn::{make_log_grid, Cone, Grid, DEFAULT_EPS, DEFAULT_M, DEFAULT_N};
use crate::oracle::{best_constant_lower, equivalence_report, Budget, Verdict};
use crate::spec::{InequalitySpec, OperatorKind};
use crate::weights::{Weight, WeightLiteral};
use crate::Ext;

/// Fewest knots a scenario grid may have.
pub const MIN_GRID_N: usize = 16;
pub const DEFAULT_BAND: f64 = 64.0;

/// Command-line settings applied on top of every scenario.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub seed: u64,
    pub band: Option<f64>,
    pub grid_eps: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_n: Option<usize>,
    pub jobs: Option<usize>,
    pub verbatim_paper: bool,
    pub timings: bool,
}

/// A config problem, anchored to a line of the config text when known.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document<'a> {
    #[serde(borrow, default)]
    defaults: Option<&'a RawValue>,
    #[serde(borrow)]
    scenarios: Vec<&'a RawValue>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridLiteral {
    eps: Option<f64>,
    max: Option<f64>,
    n: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BudgetLiteral {
    n_char: Option<usize>,
    n_random: Option<usize>,
    n_ascent: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioLiteral {
    id: String,
    kind: OperatorKind,
    cone: Cone,
    u: WeightLiteral,
    #[serde(default)]
    b: Option<WeightLiteral>,
    v: WeightLiteral,
    w: WeightLiteral,
    p: f64,
    q: f64,
    #[serde(default)]
    grid: GridLiteral,
    #[serde(default)]
    budget: BudgetLiteral,
    #[serde(default)]
    band: Option<f64>,
    #[serde(default)]
    verbatim_paper: bool,
}

/// One validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub spec: InequalitySpec,
    pub grid: Arc<Grid>,
    pub budget: Budget,
    pub band: f64,
    pub verbatim_paper: bool,
    pub seed: u64,
}

fn line_of(text: &str, raw: &RawValue) -> usize {
    let offset = raw.get().as_ptr() as usize - text.as_ptr() as usize;
    text[..offset].matches('\n').count() + 1
}

/// Merges `defaults` under `scenario`.
fn merge(defaults: &Map<String, Value>, scenario: &mut Map<String, Value>) {
    for (k, dv) in defaults {
        match (scenario.get_mut(k), dv) {
            (None, _) => {
                scenario.insert(k.clone(), dv.clone());
            }
            (Some(Value::Object(sv)), Value::Object(d)) if k == "grid" || k == "budget" => {
                for (kk, vv) in d {
                    sv.entry(kk.clone()).or_insert_with(|| vv.clone());
                }
            }
            _ => {}
        }
    }
}

/// FNV-1a of the id mixed with the global seed.
pub fn scenario_seed(id: &str, seed: u64) -> u64 {
    let mut h = FnvHasher::default();
    h.write(id.as_bytes());
    h.finish() ^ seed
}

/// Parses and validates a config document.
pub fn load_config(text: &str, flags: &Flags) -> Result<Vec<Scenario>, ConfigError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| ConfigError { line: Some(e.line()), message: e.to_string() })?;
    let defaults = match doc.defaults {
        None => Map::new(),
        Some(raw) => match serde_json::from_str::<Value>(raw.get()) {
            Ok(Value::Object(m)) => m,
            _ => return Err(ConfigError { line: Some(line_of(text, raw)), message: "`defaults` must be an object".into() }),
        },
    };
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(doc.scenarios.len());
    for (i, raw) in doc.scenarios.iter().enumerate() {
        let line = line_of(text, raw);
        let err = |message: String| ConfigError { line: Some(line), message };
        let mut obj = match serde_json::from_str::<Value>(raw.get()) {
            Ok(Value::Object(m)) => m,
            _ => return Err(err(format!("scenario {i} must be an object"))),
        };
        merge(&defaults, &mut obj);
        let lit: ScenarioLiteral = serde_json::from_value(Value::Object(obj)).map_err(|e| err(format!("scenario {i}: {e}")))?;
        if !seen.insert(lit.id.clone()) {
            return Err(err(format!("duplicate scenario id `{}`", lit.id)));
        }
        let scenario = build(lit, flags).map_err(|e| err(e))?;
        out.push(scenario);
    }
    Ok(out)
}

fn build(lit: ScenarioLiteral, flags: &Flags) -> Result<Scenario, String> {
    let id = lit.id;
    let ctx = |e: Error| format!("scenario `{id}`: {e}");
    let weight = |w: &WeightLiteral| w.to_weight().map_err(ctx);
    let exponents = Exponents::new(lit.p, lit.q).map_err(ctx)?;
    let spec = InequalitySpec {
        kind: lit.kind,
        cone: lit.cone,
        u: weight(&lit.u)?,
        b: match &lit.b {
            Some(b) => weight(b)?,
            None => Weight::one(),
        },
        v: weight(&lit.v)?,
        w: weight(&lit.w)?,
        exponents,
    };
    spec.validate().map_err(ctx)?;
    let eps = flags.grid_eps.or(lit.grid.eps).unwrap_or(DEFAULT_EPS);
    let max = flags.grid_max.or(lit.grid.max).unwrap_or(DEFAULT_M);
    let n = flags.grid_n.or(lit.grid.n).unwrap_or(DEFAULT_N);
    if n < MIN_GRID_N {
        return Err(format!("scenario `{id}`: grid needs at least {MIN_GRID_N} knots, got {n}"));
    }
    let grid = Arc::new(make_log_grid(eps, max, n).map_err(ctx)?);
    let base = Budget::for_grid(&grid);
    let budget = Budget {
        n_char: lit.budget.n_char.unwrap_or(base.n_char),
        n_random: lit.budget.n_random.unwrap_or(base.n_random),
        n_ascent: lit.budget.n_ascent.unwrap_or(base.n_ascent),
    };
    if budget.n_char == 0 {
        return Err(format!("scenario `{id}`: budget.n_char must be at least 1"));
    }
    let band = flags.band.or(lit.band).unwrap_or(DEFAULT_BAND);
    if !(band > 1.0 && band.is_finite()) {
        return Err(format!("scenario `{id}`: band must be a finite number above 1, got {band}"));
    }
    Ok(Scenario {
        seed: scenario_seed(&id, flags.seed),
        id,
        spec,
        grid,
        budget,
        band,
        verbatim_paper: lit.verbatim_paper || flags.verbatim_paper,
    })
}

/// Outcome of one scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Consistent,
    InconsistentFiniteness,
    RatioOutOfBand,
    /// A hypothesis of the governing theorem fails, or no theorem applies.
    Inapplicable,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Consistent => "consistent",
            Status::InconsistentFiniteness => "inconsistent_finiteness",
            Status::RatioOutOfBand => "ratio_out_of_band",
            Status::Inapplicable => "inapplicable",
        }
    }
}

/// Where the witness lives on the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessSummary {
    /// First and last knot with a nonzero value.
    pub support: Option<(f64, f64)>,
    pub nonzero_knots: usize,
    pub max_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub id: String,
    pub kind: String,
    pub cone: Cone,
    pub p: f64,
    pub q: f64,
    pub theorem_id: Option<String>,
    pub regime: String,
    pub form: Option<Form>,
    pub terms: BTreeMap<String, Ext>,
    pub total: Option<Ext>,
    /// Total of the other form when it differs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternate_total: Option<Ext>,
    pub oracle_lower: Ext,
    pub divergence_flag: bool,
    pub ratio: Option<Ext>,
    pub verdict: Status,
    pub witness: WitnessSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

/// Criterion, oracle and verdict for one scenario.
pub fn run_scenario(s: &Scenario, timings: bool) -> Result<Row, Error> {
    let start = Instant::now();
    let oracle = best_constant_lower(&s.spec, s.grid.clone(), s.budget, s.seed)?;
    let w = &oracle.witness;
    let nz: Vec<usize> = (0..w.values().len()).filter(|&i| w.values()[i] > 0.0).collect();
    let knots = s.grid.knots();
    let witness = WitnessSummary {
        support: nz.first().map(|&a| (knots[a], knots[*nz.last().expect("nonempty")])),
        nonzero_knots: nz.len(),
        max_value: w.max_value(),
    };
    let e = s.spec.exponents;
    let mut row = Row {
        id: s.id.clone(),
        kind: s.spec.kind.name(),
        cone: s.spec.cone,
        p: e.p,
        q: e.q,
        theorem_id: None,
        regime: e.regime().label().to_string(),
        form: None,
        terms: BTreeMap::new(),
        total: None,
        alternate_total: None,
        oracle_lower: oracle.lower_bound,
        divergence_flag: oracle.divergence_flag,
        ratio: None,
        verdict: Status::Inapplicable,
        witness,
        note: None,
        runtime_ms: None,
    };
    match evaluate(&s.spec, Options { verbatim_paper: s.verbatim_paper }) {
        Ok(crit) => {
            row.theorem_id = Some(crit.theorem_id.clone());
            row.form = Some(crit.form);
            row.terms = crit.terms.clone();
            row.total = Some(crit.total);
            row.alternate_total = crit.alternate.as_ref().map(|a| a.total);
            let rep = equivalence_report(&s.id, crit, oracle, s.band)?;
            row.ratio = Some(rep.ratio);
            row.verdict = match rep.verdict {
                Verdict::Consistent => Status::Consistent,
                Verdict::InconsistentFiniteness => Status::InconsistentFiniteness,
                Verdict::RatioOutOfBand => Status::RatioOutOfBand,
            };
        }
        Err(err @ (Error::Inapplicable { .. } | Error::Usage(_))) => row.note = Some(err.to_string()),
        Err(err) => return Err(err),
    }
    if timings {
        row.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(row)
}

/// Runs every scenario, in parallel up to `flags.jobs`, rows in config order.
pub fn run_batch(scenarios: &[Scenario], flags: &Flags) -> Result<Vec<Row>, Error> {
    let run = || scenarios.par_iter().map(|s| run_scenario(s, flags.timings)).collect::<Result<Vec<_>, _>>();
    match flags.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// 0 when every row is consistent, 1 otherwise.
pub fn exit_code(rows: &[Row]) -> i32 {
    if rows.iter().all(|r| r.verdict == Status::Consistent) {
        0
    } else {
        1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Serialize)]
struct Summary {
    scenarios: usize,
    consistent: usize,
    not_consistent: usize,
    /// Largest finite criterion/oracle ratio.
    max_ratio: Option<f64>,
    min_ratio: Option<f64>,
}

fn summary(rows: &[Row]) -> Summary {
    let finite: Vec<f64> = rows.iter().filter_map(|r| r.ratio).filter(|r| r.is_finite() && !r.is_zero()).map(|r| r.get()).collect();
    let consistent = rows.iter().filter(|r| r.verdict == Status::Consistent).count();
    Summary {
        scenarios: rows.len(),
        consistent,
        not_consistent: rows.len() - consistent,
        max_ratio: finite.iter().copied().reduce(f64::max),
        min_ratio: finite.iter().copied().reduce(f64::min),
    }
}

/// Renders rows as a JSON document or an aligned table; the table lists
/// rows that are not consistent first, then by ratio, largest first.
pub fn emit_report(rows: &[Row], format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                scenarios: &'a [Row],
                summary: Summary,
            }
            let mut out = serde_json::to_vec_pretty(&Doc { scenarios: rows, summary: summary(rows) }).expect("rows serialize");
            out.push(b'\n');
            out
        }
        Format::Text => text_table(rows).into_bytes(),
    }
}

fn fmt_ext(x: Option<Ext>) -> String {
    match x {
        None => "-".into(),
        Some(x) if x.is_infinite() => "inf".into(),
        Some(x) => format!("{:.4e}", x.get()),
    }
}

fn text_table(rows: &[Row]) -> String {
    let mut order: Vec<&Row> = rows.iter().collect();
    order.sort_by_key(|r| (r.verdict == Status::Consistent, Reverse(r.ratio.unwrap_or(Ext::zero()))));
    let header = ["id", "kind", "cone", "p", "q", "theorem", "regime", "total", "oracle", "flag", "ratio", "verdict"];
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in order {
        table.push(vec![
            r.id.clone(),
            r.kind.clone(),
            r.cone.symbol().into(),
            format!("{}", r.p),
            format!("{}", r.q),
            r.theorem_id.clone().unwrap_or_else(|| "-".into()),
            r.regime.clone(),
            fmt_ext(r.total),
            fmt_ext(Some(r.oracle_lower)),
            if r.divergence_flag { "div".into() } else { "-".into() },
            fmt_ext(r.ratio),
            r.verdict.label().into(),
        ]);
    }
    let widths: Vec<usize> = (0..header.len()).map(|c| table.iter().map(|row| row[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    let s = summary(rows);
    let ratio = |x: Option<f64>| x.map(|v| format!("{v:.4e}")).unwrap_or_else(|| "-".into());
    out.push_str(&format!(
        "\n{} scenarios, {} consistent, {} not consistent; finite ratios in [{}, {}]\n",
        s.scenarios,
        s.consistent,
        s.not_consistent,
        ratio(s.min_ratio),
        ratio(s.max_ratio)
    ));
    out
}
