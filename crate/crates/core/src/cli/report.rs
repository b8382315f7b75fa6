//! Running scenarios and rendering their reports.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use super::scenario::{Computation, Resolved, Scenario, ScenarioError};
use crate::capacity::{
    coding_capacity, coding_decoding_capacity, cqc_capacity, cqc_mutual, holevo_bound, pseudo_capacity,
    quantum_capacity, verify_chains, CapacityReport, ChainScenario,
};
use crate::cqc::{trace_pipeline, MessageEnsemble};
use crate::entropy::{umegaki_relative_detailed, von_neumann, EntropyValue};
use crate::mutual::{
    classical_input_mutual, cross_check_forms, mutual_entropy, pseudo_mutual_entropy, shannon_form, SearchOutcome,
};
use crate::states::{schatten_with_zero_tol, spectral_decomposition};

/// Display units for entropy values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn convert(self, v: EntropyValue) -> f64 {
        match self {
            Self::Nats => v.nats(),
            Self::Bits => v.bits(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Nats => "nats",
            Self::Bits => "bits",
        }
    }
}

/// One computation's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub name: String,
    pub value: Option<EntropyValue>,
    pub is_exact: bool,
    pub lower_bound: bool,
    pub evaluations: usize,
    pub witness: Value,
    pub details: Value,
    pub error: Option<String>,
    pub wall_time_ms: f64,
}

/// One invariant evaluated during a run.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantResult {
    pub name: String,
    pub passed: bool,
    /// Values involved, for inspection when the check fails.
    pub dump: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub records: Vec<Record>,
    pub invariants: Vec<InvariantResult>,
}

impl RunReport {
    pub fn error_count(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn failure_count(&self) -> usize {
        self.invariants.iter().filter(|i| !i.passed).count()
    }

    pub fn success(&self) -> bool {
        self.error_count() == 0 && self.failure_count() == 0
    }
}

impl Record {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            value: None,
            is_exact: true,
            lower_bound: false,
            evaluations: 0,
            witness: Value::Null,
            details: Value::Null,
            error: None,
            wall_time_ms: 0.0,
        }
    }

    fn value(mut self, v: EntropyValue) -> Self {
        self.value = Some(v);
        self.evaluations = self.evaluations.max(1);
        self
    }

    fn from_search(name: &str, o: SearchOutcome) -> Self {
        let mut r = Self::new(name).value(o.value);
        r.is_exact = o.is_exact;
        r.lower_bound = o.lower_bound;
        r.evaluations = o.evaluations;
        r.witness = serde_json::to_value(&o.witness).unwrap_or(Value::Null);
        if let Some(k) = o.infinite_term {
            r.details = json!({ "infinite_term": k });
        }
        r
    }

    fn from_capacity(name: &str, c: CapacityReport) -> Self {
        let mut r = Self::new(name).value(c.value);
        r.is_exact = c.is_exact;
        r.lower_bound = c.lower_bound;
        r.evaluations = c.evaluations;
        r.witness = serde_json::to_value(&c.witness).unwrap_or(Value::Null);
        r.details = serde_json::to_value(&c.components).unwrap_or(Value::Null);
        r
    }
}

fn compute(comp: Computation, s: &Resolved, id: &str) -> crate::Result<(Record, Vec<InvariantResult>)> {
    use Computation::*;
    let name = comp.name();
    let search = &s.search;
    // presence was checked when the scenario was resolved
    let state = || s.state.as_ref().expect("resolved");
    let channel = || s.channel.as_ref().expect("resolved");
    let pipe = || s.pipeline.as_ref().expect("resolved");
    let coding = || s.coding.as_ref().expect("resolved");
    let lambda = || s.lambda.as_deref().expect("resolved");
    let inputs = || s.inputs.as_ref().expect("resolved");
    let mut invariants = Vec::new();

    let record = match comp {
        Entropy => Record::new(name).value(von_neumann(state())),
        RelativeEntropy => {
            let sigma = s.reference.as_ref().expect("resolved");
            let r = umegaki_relative_detailed(state(), sigma, search.support_tol)?;
            let mut rec = Record::new(name).value(r.value);
            rec.details = json!({ "kernel_weight": r.kernel_weight, "borderline": r.borderline });
            rec
        }
        MutualEntropy => {
            let o = mutual_entropy(state(), channel(), search)?;
            let s_rho = von_neumann(state()).nats();
            let v = o.value.nats();
            invariants.push(InvariantResult {
                name: "0 <= I <= S(rho)".into(),
                passed: v >= -1e-10 && v <= s_rho + 1e-8,
                dump: json!({ "mutual_entropy": v, "entropy": s_rho }),
            });
            Record::from_search(name, o)
        }
        FormCheck => {
            let spec = spectral_decomposition(state(), search.gap_tol);
            let e = schatten_with_zero_tol(&spec, None, search.zero_tol)?;
            let fc = cross_check_forms(state(), channel(), &e)?;
            invariants.push(InvariantResult {
                name: "decomposition form = compound form".into(),
                passed: fc.agrees(1e-8),
                dump: json!({
                    "decomposition_form": fc.decomposition_form,
                    "compound_form": fc.compound_form,
                }),
            });
            let mut rec = Record::new(name).value(fc.decomposition_form);
            rec.details = json!({ "compound_form": fc.compound_form, "difference": fc.difference() });
            rec
        }
        PseudoMutualEntropy => Record::from_search(name, pseudo_mutual_entropy(state(), channel(), search)?),
        ClassicalInputMutual => Record::new(name).value(classical_input_mutual(lambda(), coding(), channel())?),
        ShannonForm => Record::new(name).value(shannon_form(lambda(), coding(), channel())?),
        HolevoBound => Record::new(name).value(holevo_bound(lambda(), coding(), channel())?),
        QuantumCapacity => Record::from_capacity(
            name,
            quantum_capacity(channel(), s.states.as_ref().expect("resolved"), search)?,
        ),
        PseudoCapacity => Record::from_capacity(
            name,
            pseudo_capacity(channel(), s.states.as_ref().expect("resolved"), search)?,
        ),
        CqcMutual => {
            let v = cqc_mutual(pipe(), lambda())?;
            let h = holevo_bound(lambda(), coding(), channel())?;
            invariants.push(InvariantResult {
                name: "cqc_mutual <= holevo_bound".into(),
                passed: v.nats() <= h.nats() + 1e-8,
                dump: json!({ "cqc_mutual": v, "holevo_bound": h }),
            });
            Record::new(name).value(v)
        }
        CqcCapacity => Record::from_capacity(name, cqc_capacity(pipe(), inputs(), search)?),
        CodingCapacity => Record::from_capacity(
            name,
            coding_capacity(
                channel(),
                s.decoding.as_ref().expect("resolved"),
                inputs(),
                &s.coding_family,
                search,
            )?,
        ),
        CodingDecodingCapacity => Record::from_capacity(
            name,
            coding_decoding_capacity(channel(), inputs(), &s.coding_family, &s.decoding_family, search)?,
        ),
        TracePipeline => {
            let t = trace_pipeline(pipe(), &MessageEnsemble::new(lambda().to_vec())?)?;
            let mut rec = Record::new(name);
            rec.details = serde_json::to_value(&t).unwrap_or(Value::Null);
            rec
        }
        VerifyChains => {
            let scenario = ChainScenario {
                id: id.into(),
                channel: channel().clone(),
                states: s.states.clone().expect("resolved"),
                coding: coding().clone(),
                decoding: s.decoding.clone().expect("resolved"),
                inputs: inputs().clone(),
                coding_family: s.coding_family.clone(),
                decoding_family: s.decoding_family.clone(),
                search: *search,
            };
            let report = verify_chains(&[scenario]);
            for c in &report.checks {
                invariants.push(InvariantResult {
                    name: c.relation.clone(),
                    passed: c.holds,
                    dump: json!({ "lhs": c.lhs, "rhs": c.rhs }),
                });
            }
            let mut rec = Record::new(name);
            if let Some((_, e)) = report.errors.first() {
                rec.error = Some(e.clone());
            }
            rec.details = json!({ "checks": report.checks.len(), "passed": report.passed() });
            rec
        }
    };
    Ok((record, invariants))
}

/// Executes every requested computation. Errors are recorded per entry and
/// the run continues.
pub fn run(scenario: &Scenario) -> Result<RunReport, ScenarioError> {
    let resolved = scenario.resolve()?;
    let mut report = RunReport {
        scenario: scenario.id.clone(),
        seed: scenario.seed,
        records: Vec::new(),
        invariants: Vec::new(),
    };
    for &comp in &scenario.computations {
        let start = Instant::now();
        let (mut record, invariants) = match compute(comp, &resolved, &scenario.id) {
            Ok(x) => x,
            Err(e) => {
                let mut r = Record::new(comp.name());
                r.error = Some(e.to_string());
                (r, vec![])
            }
        };
        record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        report.records.push(record);
        report.invariants.extend(invariants);
    }
    Ok(report)
}

/// Field carrying wall-clock time; excluded from determinism comparisons.
pub const TIMING_FIELD: &str = "wall_time_ms";

/// Shortest decimal with at most 12 significant digits.
pub fn fixed12(x: f64) -> String {
    if x.is_nan() {
        return "\"nan\"".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "\"+inf\"" } else { "\"-inf\"" }.into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    format!("{rounded}")
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => write!(out, "{i}").unwrap(),
            (_, Some(u)) => write!(out, "{u}").unwrap(),
            _ => out.push_str(&fixed12(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, x);
            }
            out.push(']');
        }
        Value::Object(m) => {
            // sorted keys, with the timing field last
            let mut keys: Vec<&String> = m.keys().filter(|k| *k != TIMING_FIELD).collect();
            keys.sort();
            if m.contains_key(TIMING_FIELD) {
                keys.push(m.get_key_value(TIMING_FIELD).expect("present").0);
            }
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push(':');
                write_value(out, &m[k]);
            }
            out.push('}');
        }
    }
}

/// Infinite values are written as the string "+inf".
fn record_value(r: &Record) -> Value {
    let (nats, bits) = match r.value {
        Some(v) if v.is_infinite() => (json!("+inf"), json!("+inf")),
        Some(v) => (json!(v.nats()), json!(v.bits())),
        None => (Value::Null, Value::Null),
    };
    json!({
        "kind": "record",
        "name": r.name,
        "value_nats": nats,
        "value_bits": bits,
        "is_exact": r.is_exact,
        "lower_bound": r.lower_bound,
        "evaluations": r.evaluations,
        "witness": r.witness,
        "details": r.details,
        "error": r.error,
        TIMING_FIELD: r.wall_time_ms,
    })
}

/// JSON-lines machine report: a header, one line per record, one per
/// invariant and a summary.
pub fn machine_report(report: &RunReport) -> String {
    let mut lines = vec![json!({ "kind": "scenario", "id": report.scenario, "seed": report.seed })];
    lines.extend(report.records.iter().map(record_value));
    lines.extend(report.invariants.iter().map(|i| {
        json!({ "kind": "invariant", "name": i.name, "passed": i.passed, "dump": i.dump })
    }));
    lines.push(json!({
        "kind": "summary",
        "records": report.records.len(),
        "errors": report.error_count(),
        "invariant_failures": report.failure_count(),
    }));
    let mut out = String::new();
    for l in &lines {
        write_value(&mut out, l);
        out.push('\n');
    }
    out
}

/// Removes the timing field from every line of a machine report.
pub fn strip_timing(report: &str) -> String {
    report
        .lines()
        .map(|l| match l.find(&format!(",\"{TIMING_FIELD}\":")) {
            Some(i) => format!("{}}}", &l[..i]),
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Human-readable table.
pub fn render_table(report: &RunReport, units: Units) -> String {
    let mut out = String::new();
    writeln!(out, "scenario {} (seed {})", report.scenario, report.seed).unwrap();
    writeln!(out, "{:<28} {:>18}  {:<6} {:>10}  notes", "computation", "value", "units", "evals").unwrap();
    for r in &report.records {
        let value = match (&r.error, r.value) {
            (Some(_), _) => "error".to_string(),
            (None, Some(v)) if v.is_infinite() => "+inf".to_string(),
            (None, Some(v)) => format!("{:.12}", units.convert(v)),
            (None, None) => "-".to_string(),
        };
        let note = match (&r.error, r.is_exact, r.lower_bound) {
            (Some(e), _, _) => e.clone(),
            (None, true, _) => "exact".into(),
            (None, false, true) => "lower bound".into(),
            _ => String::new(),
        };
        writeln!(
            out,
            "{:<28} {:>18}  {:<6} {:>10}  {}",
            r.name,
            value,
            units.label(),
            r.evaluations,
            note
        )
        .unwrap();
    }
    if !report.invariants.is_empty() {
        writeln!(out, "invariants:").unwrap();
        for i in &report.invariants {
            let mark = if i.passed { "pass" } else { "FAIL" };
            writeln!(out, "  [{mark}] {}", i.name).unwrap();
            if !i.passed {
                writeln!(out, "         {}", i.dump).unwrap();
            }
        }
    }
    writeln!(
        out,
        "{} record(s), {} error(s), {} invariant failure(s)",
        report.records.len(),
        report.error_count(),
        report.failure_count()
    )
    .unwrap();
    out
}
