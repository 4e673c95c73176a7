//! Parameter sweeps.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use signaling_power::scenarios::{build, evaluate_instance, Params, ScenarioId, ScenarioSpec};

use crate::report::{to_json, RunReport, Target};
use crate::{default_classes, emit, Outcome, SweepArgs};

/// Parses `value` or `start:end:step` into ascending points, end inclusive.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().with_context(|| format!("invalid number {s:?}"))?;
        if !v.is_finite() {
            bail!("invalid number {s:?}");
        }
        Ok(v)
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, end, step] => {
            let (start, end, step) = (num(start)?, num(end)?, num(step)?);
            if step <= 0.0 {
                bail!("range {text:?}: step must be positive");
            }
            if end < start {
                bail!("range {text:?} is empty");
            }
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                bail!("range {text:?} has more than a million points");
            }
            // Multiply rather than accumulate so points carry no drift.
            Ok((0..count).map(|k| start + k as f64 * step).collect())
        }
        _ => bail!("range {text:?}: expected a value or start:end:step"),
    }
}

fn parse_count_range(text: &str) -> Result<Vec<usize>> {
    let points = parse_range(text)?;
    points
        .into_iter()
        .map(|v| {
            if v < 0.0 || v.fract() != 0.0 {
                bail!("n must be a non-negative integer, got {v}");
            }
            Ok(v as usize)
        })
        .collect()
}

fn axis<T: Copy>(values: Option<Vec<T>>) -> Vec<Option<T>> {
    match values {
        Some(v) => v.into_iter().map(Some).collect(),
        None => vec![None],
    }
}

pub fn sweep(args: SweepArgs) -> Result<Outcome> {
    let id: ScenarioId = args.scenario.parse()?;
    let alphas = axis(args.alpha.as_deref().map(parse_range).transpose()?);
    let epss = axis(args.eps.as_deref().map(parse_range).transpose()?);
    let ns = axis(args.n.as_deref().map(parse_count_range).transpose()?);
    let mut specs = Vec::new();
    for &alpha in &alphas {
        for &eps in &epss {
            for &n in &ns {
                specs.push(ScenarioSpec::new(id, Params { alpha, eps, n }));
            }
        }
    }
    // Validate every point up front so a bad range fails before any work.
    for spec in &specs {
        build(spec).with_context(|| format!("sweep point {:?}", spec.params))?;
    }
    let options = args.solver.options();
    let reports: Vec<RunReport> = specs
        .par_iter()
        .map(|spec| -> Result<RunReport> {
            let built = build(spec)?;
            let classes = args
                .classes
                .clone()
                .unwrap_or_else(|| default_classes(&built.instance, Some(&built)));
            let eval = evaluate_instance(&built.instance, &classes, &options, Some(spec))
                .with_context(|| format!("sweep point {:?}", spec.params))?;
            Ok(RunReport::new(Target::Scenario(*spec), Some(&built), eval, false))
        })
        .collect::<Result<_>>()?;

    let text = if args.json {
        let mut out = String::new();
        for r in &reports {
            out.push_str(&serde_json::to_string(&serde_json::from_str::<serde_json::Value>(&to_json(r)?)?)?);
            out.push('\n');
        }
        out
    } else {
        let mut w = csv::Writer::from_writer(Vec::new());
        for (k, r) in reports.iter().enumerate() {
            let (header, row) = r.csv_row();
            if k == 0 {
                w.write_record(&header)?;
            }
            w.write_record(&row)?;
        }
        String::from_utf8(w.into_inner()?)?
    };
    emit(args.output.as_ref(), &text)?;
    Ok(Outcome::Ok)
}
