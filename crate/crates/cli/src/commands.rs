use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};

use svcalc_core::approximant::{
    alpha_probe, approximant_eval, error_curve, fit_order, CurveSide, LocalLinearApproximant,
};
use svcalc_core::calculus::{anchored_dds, derivative_field, full_dd, DerivativeField, Side};
use svcalc_core::set_core::{hausdorff_via_pairs, metric_difference, metric_pairs};
use svcalc_core::svf::{eval, AnchorSampler, GalleryInfo};
use svcalc_core::{CompactSet, Error};

use crate::config::{usage, Analysis, Format};

pub const EXIT_UNCONVERGED: u8 = 3;

/// Anchors listed on stderr when a derivative fails to converge.
const MAX_REPORTED_ANCHORS: usize = 10;

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string(value)?;
    s.push('\n');
    Ok(s)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(out: &mut String, groups: &[(&str, usize)], extra: &[&str]) {
    let mut cols: Vec<String> = Vec::new();
    for &(name, dim) in groups {
        cols.extend((1..=dim).map(|k| format!("{name}_{k}")));
    }
    cols.extend(extra.iter().map(|s| s.to_string()));
    out.push_str(&cols.join(","));
    out.push('\n');
}

fn row<'a>(out: &mut String, parts: impl IntoIterator<Item = &'a [f64]>, extra: &[String]) {
    let mut cells: Vec<String> = parts.into_iter().flatten().map(|&x| num(x)).collect();
    cells.extend(extra.iter().cloned());
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn parse_set(flag: &str, text: &str) -> anyhow::Result<CompactSet> {
    let value: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return usage(format!("{flag}: not a JSON set literal: {e}")),
    };
    let parsed = match &value {
        Value::Array(items) if items.iter().all(Value::is_number) => {
            serde_json::from_value::<Vec<f64>>(value.clone())
                .map_err(|e| e.to_string())
                .and_then(|v| CompactSet::from_scalars(&v).map_err(|e| e.to_string()))
        }
        _ => serde_json::from_value::<CompactSet>(value).map_err(|e| e.to_string()),
    };
    match parsed {
        Ok(s) => Ok(s),
        Err(e) => usage(format!("{flag}: {e}")),
    }
}

pub fn pairs(a: Option<&str>, b: Option<&str>, an: &Analysis) -> anyhow::Result<ExitCode> {
    let (a, b) = match (a, b) {
        (Some(a), Some(b)) => (parse_set("--a", a)?, parse_set("--b", b)?),
        (None, None) => {
            let f = an.svf()?;
            (
                eval(f, an.x0()?, an.resolution)?,
                eval(f, an.x()?, an.resolution)?,
            )
        }
        _ => return usage("give both --a and --b, or a function with --x0 and --x"),
    };
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        }
        .into());
    }
    let pairs = metric_pairs(&a, &b, &an.tol)?;
    let haus = hausdorff_via_pairs(&a, &b, &an.tol)?;
    let text = match an.format {
        Format::Json => {
            let rows: Vec<Vec<f64>> = pairs
                .iter()
                .map(|(p, q)| p.iter().chain(q.iter()).copied().collect())
                .collect();
            to_json(&json!({
                "a": a,
                "b": b,
                "pairs": rows,
                "hausdorff": haus,
                "metric_difference": metric_difference(&a, &b, &an.tol)?,
            }))?
        }
        Format::Csv => {
            let dim = a.dim();
            let mut out = String::new();
            header(&mut out, &[("a", dim), ("b", dim), ("d", dim)], &["length"]);
            for (p, q) in pairs.iter() {
                let d: Vec<f64> = p.iter().zip(q.iter()).map(|(x, y)| x - y).collect();
                row(
                    &mut out,
                    [p.coords(), q.coords(), &d[..]],
                    &[num(p.distance(q))],
                );
            }
            out
        }
    };
    emit(&text, an.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

pub fn dd(an: &Analysis) -> anyhow::Result<ExitCode> {
    let f = an.svf()?;
    let (x0, x) = (an.x0()?, an.x()?);
    let parts = anchored_dds(f, x0, x, an.resolution, &an.tol)?;
    let text = match an.format {
        Format::Json => {
            let anchored: Vec<Value> = parts
                .iter()
                .map(|d| json!({"anchor": d.anchor, "value": d.value}))
                .collect();
            to_json(&json!({
                "x0": x0,
                "x": x,
                "anchored": anchored,
                "full": full_dd(f, x0, x, an.resolution, &an.tol)?,
            }))?
        }
        Format::Csv => {
            let dim = f.dim();
            let mut out = String::new();
            header(&mut out, &[("anchor", dim), ("dd", dim)], &[]);
            for d in &parts {
                for p in d.value.iter() {
                    row(&mut out, [d.anchor.coords(), p], &[]);
                }
            }
            out
        }
    };
    emit(&text, an.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn fields(an: &Analysis, side: CurveSide) -> anyhow::Result<Vec<DerivativeField>> {
    let f = an.svf()?;
    let sampler = AnchorSampler::new(f, an.x0()?, an.resolution, &an.tol)?;
    let mut out = Vec::new();
    for &s in side.sides() {
        out.push(derivative_field(&sampler, s, &an.ladder, an.conv_tol)?);
    }
    Ok(out)
}

/// Lists unconverged anchors on stderr; true if every field converged.
fn report_convergence(fields: &[DerivativeField]) -> bool {
    let mut ok = true;
    for field in fields.iter().filter(|f| !f.converged) {
        ok = false;
        let bad: Vec<_> = field.unconverged().collect();
        eprintln!(
            "{} derivative at x0 = {} did not converge at {} of {} anchors (conv_tol {:e})",
            field.side,
            field.x0,
            bad.len(),
            field.anchors.len(),
            field.conv_tol
        );
        for a in bad.iter().take(MAX_REPORTED_ANCHORS) {
            eprintln!(
                "  anchor {:?}: residuals {:?}",
                a.y.coords(),
                &a.residuals[a.residuals.len().saturating_sub(3)..]
            );
        }
        if bad.len() > MAX_REPORTED_ANCHORS {
            eprintln!("  ... {} more", bad.len() - MAX_REPORTED_ANCHORS);
        }
    }
    ok
}

fn diagnose(an: &Analysis, side: CurveSide) -> anyhow::Result<ExitCode> {
    report_convergence(&fields(an, side)?);
    Ok(ExitCode::from(EXIT_UNCONVERGED))
}

pub fn derivative(an: &Analysis) -> anyhow::Result<ExitCode> {
    let side = an.sides(CurveSide::Both)?;
    let fields = fields(an, side)?;
    let text = match an.format {
        Format::Json => to_json(&json!({ "fields": fields }))?,
        Format::Csv => {
            let dim = an.svf()?.dim();
            let mut out = String::new();
            header(
                &mut out,
                &[("anchor", dim), ("d", dim)],
                &["side", "residual", "converged"],
            );
            for field in &fields {
                for a in &field.anchors {
                    let residual = a.residuals.last().copied().unwrap_or(f64::NAN);
                    let extra = [
                        field.side.to_string(),
                        num(residual),
                        a.converged.to_string(),
                    ];
                    for p in a.derivative_points.iter() {
                        row(&mut out, [a.y.coords(), p], &extra);
                    }
                }
            }
            out
        }
    };
    emit(&text, an.out.as_deref())?;
    if report_convergence(&fields) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_UNCONVERGED))
    }
}

fn approximant(an: &Analysis, side: CurveSide) -> anyhow::Result<Option<LocalLinearApproximant>> {
    let f = an.svf()?;
    match LocalLinearApproximant::build(
        f,
        an.x0()?,
        side.sides(),
        &an.ladder,
        an.conv_tol,
        an.resolution,
        &an.tol,
    ) {
        Ok(l) => Ok(Some(l)),
        Err(Error::Unconverged { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn approx(an: &Analysis) -> anyhow::Result<ExitCode> {
    let f = an.svf()?;
    let (x0, x) = (an.x0()?, an.x()?);
    f.domain().check(x)?;
    let side = if x == x0 {
        an.side.unwrap_or(CurveSide::Both)
    } else {
        Side::of(x, x0).into()
    };
    an.check_sides(side)?;
    let Some(l) = approximant(an, side)? else {
        return diagnose(an, side);
    };
    let value = approximant_eval(&l, x)?;
    let sampled = AnchorSampler::new(f, x0, an.resolution, &an.tol)?.sample(x)?;
    let err = hausdorff_via_pairs(&sampled, &value, &an.tol)?;
    let text = match an.format {
        Format::Json => to_json(&json!({
            "x0": x0,
            "x": x,
            "approximant": value,
            "sampled": sampled,
            "hausdorff": err,
        }))?,
        Format::Csv => {
            let mut out = String::new();
            header(&mut out, &[("y", f.dim())], &[]);
            for p in value.iter() {
                row(&mut out, [p], &[]);
            }
            out
        }
    };
    emit(&text, an.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

pub fn order(an: &Analysis, fit_out: Option<&Path>) -> anyhow::Result<ExitCode> {
    let side = an.sides(CurveSide::Both)?;
    let Some(l) = approximant(an, side)? else {
        return diagnose(an, side);
    };
    let curve = error_curve(an.svf()?, &l, &an.ladder, side, an.resolution, &an.tol)?;
    let floor = an.noise_floor.unwrap_or(curve.default_noise_floor());
    let fit = fit_order(&curve, &floor)?;
    match an.format {
        Format::Json => {
            let text = to_json(&json!({"curve": curve, "noise_floor": floor, "fit": fit}))?;
            emit(&text, an.out.as_deref())?;
        }
        Format::Csv => {
            emit(&curve.to_csv(), an.out.as_deref())?;
            let fit = to_json(&fit)?;
            match fit_out {
                Some(p) => emit(&fit, Some(p))?,
                None => eprint!("{fit}"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn alpha(an: &Analysis) -> anyhow::Result<ExitCode> {
    let side = match an.sides(CurveSide::Right)? {
        CurveSide::Right => Side::Right,
        CurveSide::Left => Side::Left,
        CurveSide::Both => return usage("alpha probes one side: use --side right or --side left"),
    };
    let probe = match alpha_probe(
        an.svf()?,
        an.x0()?,
        side,
        &an.ladder,
        an.conv_tol,
        an.resolution,
        &an.tol,
        an.noise_floor,
    ) {
        Ok(p) => p,
        Err(Error::Unconverged { .. }) => return diagnose(an, side.into()),
        Err(e) => return Err(e.into()),
    };
    let text = match an.format {
        Format::Json => to_json(&probe)?,
        Format::Csv => probe.deviations.to_csv(),
    };
    emit(&text, an.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

pub fn gallery_list(format: Option<Format>) -> anyhow::Result<ExitCode> {
    let all = GalleryInfo::all();
    let text = match format {
        Some(Format::Json) => to_json(&all)?,
        Some(Format::Csv) => {
            let mut out = String::from("name,a,b,formula,params\n");
            for g in &all {
                let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    g.name,
                    g.domain.0,
                    g.domain.1,
                    quote(g.formula),
                    quote(g.params)
                )?;
            }
            out
        }
        None => {
            let mut out = String::new();
            for g in &all {
                writeln!(
                    out,
                    "{:<18} ({}, {})  {}",
                    g.name, g.domain.0, g.domain.1, g.formula
                )?;
                writeln!(out, "{:<18} params: {}", "", g.params)?;
            }
            out
        }
    };
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}
