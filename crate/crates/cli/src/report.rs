//! Reports and their human, JSON and CSV renderings.

use std::collections::BTreeMap;

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use signaling_power::ratio::Convention;
use signaling_power::scenarios::{
    BoundCheck, BuiltScenario, Evaluation, Params, ScenarioSpec, ValueMethod,
};
use signaling_power::signaling::SchemeClass;
use signaling_power::Sense;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub enum Target {
    Scenario(ScenarioSpec),
    File(String),
}

/// Rounds to 12 significant digits and prints the shortest decimal form.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{}", round12(x))
}

fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Rounds every number in a JSON tree to 12 significant digits.
fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| !n.is_i64() && !n.is_u64()) {
                if let Some(r) = serde_json::Number::from_f64(round12(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

pub fn to_json(value: &impl Serialize) -> Result<String> {
    let mut tree = serde_json::to_value(value)?;
    round_json(&mut tree);
    Ok(serde_json::to_string_pretty(&tree)? + "\n")
}

/// `PoS(B:A)` for classes `a` inside `b`.
pub fn pos_label(a: SchemeClass, b: SchemeClass) -> String {
    format!("PoS({}:{})", b.display_name(), a.display_name())
}

#[derive(Serialize)]
struct ValueRow {
    class: SchemeClass,
    value: f64,
    method: ValueMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<f64>,
}

#[derive(Serialize)]
struct PosRow {
    label: String,
    a: SchemeClass,
    b: SchemeClass,
    /// `null` when infinite; see `convention`.
    ratio: f64,
    convention: Convention,
}

#[derive(Serialize)]
pub struct RunReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<String>,
    params: Params,
    boundary: bool,
    sense: Sense,
    values: Vec<ValueRow>,
    pos: Vec<PosRow>,
    poa_max: f64,
    poa_convention: Convention,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<Vec<BoundCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    passes: Option<bool>,
}

impl RunReport {
    pub fn new(target: Target, built: Option<&BuiltScenario>, eval: Evaluation, verify: bool) -> Self {
        let expected: BTreeMap<&str, f64> = built.map(|b| b.expected.clone()).unwrap_or_default();
        let (scenario, instance, params) = match target {
            Target::Scenario(spec) => (Some(spec.id.as_str().to_string()), None, spec.params),
            Target::File(path) => (None, Some(path), Params::default()),
        };
        let bound = verify.then(|| eval.bound_checks());
        RunReport {
            scenario,
            instance,
            params,
            boundary: built.is_some_and(|b| b.boundary),
            sense: eval.sense,
            values: eval
                .values
                .iter()
                .map(|v| ValueRow {
                    class: v.class,
                    value: v.value,
                    method: v.method.clone(),
                    expected: expected.get(v.class.as_str()).copied(),
                })
                .collect(),
            pos: eval
                .pos
                .iter()
                .map(|p| PosRow {
                    label: pos_label(p.a, p.b),
                    a: p.a,
                    b: p.b,
                    ratio: p.ratio,
                    convention: p.convention,
                })
                .collect(),
            poa_max: eval.poa_max,
            poa_convention: eval.poa_convention,
            passes: bound.as_ref().map(|b| b.iter().all(|c| c.holds)),
            bound,
        }
    }

    pub fn passes(&self) -> bool {
        self.passes.unwrap_or(true)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let (header, row) = self.csv_row();
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&header)?;
                w.write_record(&row)?;
                Ok(String::from_utf8(w.into_inner()?)?)
            }
            Format::Human => Ok(self.human()),
        }
    }

    /// Header and values of one CSV row: parameters, class values, PoS pairs, poa_max.
    pub fn csv_row(&self) -> (Vec<String>, Vec<String>) {
        let mut header = Vec::new();
        let mut row = Vec::new();
        if let Some(s) = &self.scenario {
            header.push("scenario".to_string());
            row.push(s.clone());
        }
        for (name, value) in param_pairs(&self.params) {
            header.push(name.to_string());
            row.push(value);
        }
        header.push("boundary".into());
        row.push(self.boundary.to_string());
        for v in &self.values {
            header.push(v.class.as_str().to_string());
            row.push(sig12(v.value));
        }
        for p in &self.pos {
            header.push(p.label.clone());
            row.push(sig12(p.ratio));
        }
        header.push("poa_max".into());
        row.push(sig12(self.poa_max));
        if let Some(passes) = self.passes {
            header.push("passes".into());
            row.push(passes.to_string());
        }
        (header, row)
    }

    fn human(&self) -> String {
        let mut out = String::new();
        let what = match (&self.scenario, &self.instance) {
            (Some(s), _) => s.clone(),
            (None, Some(path)) => path.clone(),
            _ => String::new(),
        };
        let params: Vec<String> = param_pairs(&self.params)
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect();
        out.push_str(&what);
        if !params.is_empty() {
            out.push_str(&format!(" ({})", params.join(", ")));
        }
        if self.boundary {
            out.push_str(" [boundary]");
        }
        out.push_str(&format!("\n{} game\n\n", self.sense.as_str()));
        out.push_str(&format!("{:<14} {:>16} {:>16}  {}\n", "class", "value", "expected", "method"));
        for v in &self.values {
            let expected = v.expected.map(sig12).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<14} {:>16} {:>16}  {}\n",
                v.class.display_name(),
                sig12(v.value),
                expected,
                method_name(&v.method)
            ));
        }
        if !self.pos.is_empty() {
            out.push('\n');
            for p in &self.pos {
                out.push_str(&format!("{:<14} {:>16}{}\n", p.label, sig12(p.ratio), convention_note(p.convention)));
            }
        }
        out.push_str(&format!(
            "\n{:<14} {:>16}{}\n",
            "poa_max",
            sig12(self.poa_max),
            convention_note(self.poa_convention)
        ));
        if let Some(bound) = &self.bound {
            out.push('\n');
            for c in bound {
                let op = match self.sense {
                    Sense::Cost => "<=",
                    Sense::Payoff => ">=",
                };
                out.push_str(&format!(
                    "{:<14} {} poa_max  {}\n",
                    pos_label(c.a, c.b),
                    op,
                    if c.holds { "ok" } else { "VIOLATED" }
                ));
            }
            out.push_str(if self.passes() { "bound holds\n" } else { "bound violated\n" });
        }
        out
    }
}

fn method_name(method: &ValueMethod) -> String {
    match method {
        ValueMethod::Direct => "direct".into(),
        ValueMethod::Certified => "certified optimal".into(),
        ValueMethod::Grid { resolution } => format!("posterior grid 1/{resolution}"),
        ValueMethod::LinearProgram => "linear program".into(),
        ValueMethod::Scheme { optimal: true } => "explicit scheme, optimal".into(),
        ValueMethod::Scheme { optimal: false } => "explicit scheme".into(),
    }
}

fn convention_note(c: Convention) -> &'static str {
    match c {
        Convention::Finite => "",
        Convention::OneByConvention => "  (0/0 read as 1)",
        Convention::Infinite => "  (x/0)",
    }
}

pub fn param_pairs(p: &Params) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    if let Some(a) = p.alpha {
        out.push(("alpha", sig12(a)));
    }
    if let Some(e) = p.eps {
        out.push(("eps", sig12(e)));
    }
    if let Some(n) = p.n {
        out.push(("n", n.to_string()));
    }
    out
}
