use std::collections::BTreeMap;
use std::fs;

use anyhow::{bail, Context, Result};
use clap::Args;
use clusterhom::fox_neuwirth::{fn_cells, twisted_homology, ColourCount, ColouredInput};
use clusterhom::geometry::ClusterConfiguration;
use clusterhom::graded::{bar_formula_graded, Field, Grading, LabelSystem};
use clusterhom::homology::{build_bar_complex, DiscreteMonoidD};
use clusterhom::partitions::{
    count_types_by_inversion, enumerate_types, enumerate_types_uniform, EntanglementType,
};
use clusterhom::selftest::run_selftest;
use clusterhom::stable::{associated_graded, predicted_unstable, stable_homology, AssembledSum};
use clusterhom::{AbelianGroup, Error, GradedAbelianGroup, Limits, Partition};
use serde_json::{json, Value};

use crate::output::Report;
use crate::{Command, GlobalArgs};

#[derive(Debug, Args)]
pub struct TypesEnumArgs {
    /// Size of the ground set.
    #[arg(long, required_unless_present = "k")]
    pub n: Option<usize>,
    /// Block size; lists the types of the given --weight whose blocks all have this size.
    #[arg(long, requires = "weight", conflicts_with = "n")]
    pub k: Option<usize>,
    #[arg(long)]
    pub weight: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TypesCountArgs {
    /// Largest size (or weight with --k) to count.
    #[arg(long)]
    pub n: usize,
    /// Count only types whose blocks all have this size, by weight.
    #[arg(long)]
    pub k: Option<usize>,
    /// Also count by exhaustive enumeration and compare.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    /// Partition as blocks separated by `|`, e.g. `1,3|2`.
    #[arg(long)]
    pub partition: Partition,
}

#[derive(Debug, Args)]
pub struct ChiArgs {
    /// Configuration as JSON, or `@path` to read it from a file.
    #[arg(long)]
    pub config: String,
}

#[derive(Debug, Args)]
pub struct BarHomologyArgs {
    /// Non-basepoint label counts per cluster size, e.g. `1:2,2:1`.
    #[arg(long)]
    pub labels: String,
    /// Weight (number of particles) of the graded piece.
    #[arg(long)]
    pub n: usize,
    /// Highest bar degree to build; defaults to all.
    #[arg(long)]
    pub max_degree: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ColoredHomologyArgs {
    /// Colour counts, e.g. `a:2,b:1`.
    #[arg(long, required_unless_present = "input", conflicts_with = "input")]
    pub alpha: Option<String>,
    /// Ambient dimension.
    #[arg(long, required_unless_present = "input")]
    pub d: Option<usize>,
    /// Odd colours, e.g. `a:1`; unlisted colours are even.
    #[arg(long)]
    pub parity: Option<String>,
    /// JSON input `{"alpha":[...],"d":..,"parity":{..}}`, or `@path`.
    #[arg(long)]
    pub input: Option<String>,
    /// Highest homological degree to report; defaults to all.
    #[arg(long)]
    pub max_degree: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StableArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub max_degree: usize,
}

#[derive(Debug, Args)]
pub struct AssocGradedArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub max_degree: usize,
}

#[derive(Debug, Args)]
pub struct PredictUnstableArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub max_degree: usize,
}

pub fn run(command: &Command, global: &GlobalArgs, limits: &Limits) -> Result<Report> {
    match command {
        Command::TypesEnum(a) => types_enum(a, limits),
        Command::TypesCount(a) => types_count(a, limits),
        Command::Factorize(a) => factorize(a),
        Command::Chi(a) => chi(a),
        Command::BarHomology(a) => bar_homology(a, limits),
        Command::ColoredHomology(a) => colored_homology(a, limits),
        Command::Stable(a) => stable(a, limits),
        Command::AssocGraded(a) => {
            let sum = associated_graded(a.r, a.s, a.k, a.p, a.max_degree, limits)?;
            Ok(assembled(&sum))
        }
        Command::PredictUnstable(a) => {
            let sum = predicted_unstable(a.r, a.k, a.p, a.max_degree, limits)?;
            Ok(assembled(&sum))
        }
        Command::Selftest => selftest(global.seed, limits),
    }
}

/// Exceeded bounds and uncertifiable truncations are infeasibility (2);
/// everything else is a usage or input error (1).
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BoundExceeded { .. } | Error::NonCertifiable(_)) => 2,
        _ => 1,
    }
}

fn read_json(arg: &str) -> Result<Value> {
    let text = match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).context("malformed JSON input")
}

/// Parses `key:value,key:value`.
fn parse_pairs(text: &str) -> Result<Vec<(String, usize)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (key, value) = item
                .split_once(':')
                .with_context(|| format!("expected key:value, got {item:?}"))?;
            let value = value.trim().parse().with_context(|| format!("bad count in {item:?}"))?;
            Ok((key.trim().to_string(), value))
        })
        .collect()
}

fn torsion_text(g: &AbelianGroup) -> String {
    g.torsion.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn group_rows(h: &GradedAbelianGroup, top: usize) -> Vec<Vec<String>> {
    (0..=top)
        .map(|i| {
            let g = h.degree(i);
            vec![i.to_string(), g.to_string(), g.betti.to_string(), torsion_text(&g)]
        })
        .collect()
}

fn type_row(e: &EntanglementType) -> Vec<String> {
    let profile: Vec<String> = e.profile().iter().map(ToString::to_string).collect();
    vec![e.to_string(), e.size().to_string(), e.weight().to_string(), profile.join(" ")]
}

fn type_json(e: &EntanglementType) -> Value {
    json!({"partition": e.to_string(), "size": e.size(), "weight": e.weight(), "profile": e.profile()})
}

fn types_enum(a: &TypesEnumArgs, limits: &Limits) -> Result<Report> {
    let types = match (a.n, a.k, a.weight) {
        (Some(n), None, _) => enumerate_types(n, limits)?,
        (None, Some(k), Some(w)) => enumerate_types_uniform(k, w, limits)?,
        _ => bail!("give --n, or --k with --weight"),
    };
    let json = Value::Array(types.iter().map(type_json).collect());
    let rows = types.iter().map(type_row).collect();
    Ok(Report::new(json, vec!["partition", "size", "weight", "profile"], rows))
}

fn types_count(a: &TypesCountArgs, limits: &Limits) -> Result<Report> {
    if a.n == 0 {
        bail!("--n must be positive");
    }
    let counts: Vec<String> = count_types_by_inversion(a.n, a.k).iter().map(ToString::to_string).collect();
    let mut report_failed = None;
    if a.verify {
        let enumerated: Vec<String> = (1..=a.n)
            .map(|i| {
                let list = match a.k {
                    None => enumerate_types(i, limits)?,
                    Some(k) => enumerate_types_uniform(k, i, limits)?,
                };
                Ok(list.len().to_string())
            })
            .collect::<std::result::Result<_, Error>>()?;
        if enumerated != counts {
            report_failed = Some(format!("enumeration gives {}", enumerated.join(",")));
        }
    }
    let key = if a.k.is_some() { "weight" } else { "n" };
    let json = json!({"k": a.k, "graded_by": key, "counts": counts});
    let rows = counts
        .iter()
        .enumerate()
        .map(|(i, c)| vec![(i + 1).to_string(), c.clone()])
        .collect();
    let mut report = Report::new(json, vec![key, "count"], rows).with_table(counts.join(","));
    report.failed = report_failed;
    Ok(report)
}

fn factorize(a: &FactorizeArgs) -> Result<Report> {
    let factors = a.partition.factorize();
    let json = json!({
        "partition": a.partition.to_string(),
        "filtration_level": a.partition.filtration_level(),
        "factors": factors.iter().map(type_json).collect::<Vec<_>>(),
    });
    let rows = factors
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut row = vec![(i + 1).to_string()];
            row.extend(type_row(e));
            row
        })
        .collect();
    Ok(Report::new(json, vec!["factor", "partition", "size", "weight", "profile"], rows))
}

fn chi(a: &ChiArgs) -> Result<Report> {
    let config: ClusterConfiguration =
        serde_json::from_value(read_json(&a.config)?).context("malformed configuration")?;
    let partition = config.chi()?;
    let mut faces = Vec::new();
    for i in 0..config.clusters().len() {
        let block = config.block_index(i)?;
        let face = config.remove_cluster(i)?.chi()?;
        faces.push((i + 1, block, face));
    }
    let json = json!({
        "chi": partition.to_string(),
        "faces": faces
            .iter()
            .map(|(c, b, f)| json!({"cluster": c, "block": b, "chi": f.to_string()}))
            .collect::<Vec<_>>(),
    });
    let mut rows = vec![vec!["-".to_string(), "-".to_string(), partition.to_string()]];
    rows.extend(faces.iter().map(|(c, b, f)| vec![c.to_string(), b.to_string(), f.to_string()]));
    Ok(Report::new(json, vec!["removed_cluster", "block", "chi"], rows))
}

fn bar_homology(a: &BarHomologyArgs, limits: &Limits) -> Result<Report> {
    let counts: BTreeMap<usize, usize> = parse_pairs(&a.labels)?
        .into_iter()
        .map(|(k, m)| Ok((k.parse::<usize>().with_context(|| format!("bad cluster size {k:?}"))?, m)))
        .collect::<Result<_>>()?;
    let monoid = DiscreteMonoidD::new(counts.clone(), a.n)?;
    let max_degree = a.max_degree.unwrap_or(a.n);
    let complex = build_bar_complex(&monoid, a.n, max_degree, limits)?;
    let h = complex.homology();
    let top = complex.top_degree().unwrap_or(0);
    let predicted = if a.n == 0 {
        0
    } else {
        let nonzero: BTreeMap<usize, usize> = counts.into_iter().filter(|&(_, m)| m > 0).collect();
        let labels = LabelSystem::discrete(Field::Rational, &nonzero);
        bar_formula_graded(&labels, None, Grading::Size, a.n, 2, limits)?
            .get(&a.n)
            .map_or(0, |m| m.rank(1))
    };
    let mut rows = group_rows(&h, top);
    for (i, row) in rows.iter_mut().enumerate() {
        row.insert(1, complex.rank(i).to_string());
    }
    let json = json!({
        "n": a.n,
        "chain_ranks": complex.ranks(),
        "homology": h,
        "formula_degree_one_rank": predicted,
    });
    let mut report = Report::new(json, vec!["degree", "chains", "group", "betti", "torsion"], rows);
    if a.n > 0 && max_degree >= 2 && h.betti(1) != predicted {
        report.failed = Some(format!("degree 1 rank {} but the formula predicts {predicted}", h.betti(1)));
    }
    Ok(report)
}

fn colored_homology(a: &ColoredHomologyArgs, limits: &Limits) -> Result<Report> {
    let input: ColouredInput = match &a.input {
        Some(text) => serde_json::from_value(read_json(text)?).context("malformed coloured input")?,
        None => {
            let alpha = parse_pairs(a.alpha.as_deref().unwrap_or_default())?
                .into_iter()
                .map(|(colour, count)| ColourCount { colour, count })
                .collect();
            let mut parity = BTreeMap::new();
            for (colour, bit) in parse_pairs(a.parity.as_deref().unwrap_or_default())? {
                if bit > 1 {
                    bail!("parity of {colour:?} must be 0 or 1");
                }
                parity.insert(colour, bit as u8);
            }
            ColouredInput {
                alpha,
                d: a.d.context("--d is required")?,
                parity,
            }
        }
    };
    let (alpha, parity) = input.resolve()?;
    let d = input.d;
    let top_possible = alpha.total().saturating_sub(1) * d.saturating_sub(1);
    let top = a.max_degree.unwrap_or(top_possible).min(top_possible);
    let h = twisted_homology(&alpha, d, &parity, 0..=top, limits)?;
    let cells: Vec<usize> = fn_cells(&alpha, d, limits)?.iter().map(Vec::len).collect();
    let mut rows = group_rows(&h, top);
    for (i, row) in rows.iter_mut().enumerate() {
        row.insert(1, cells.get(i).copied().unwrap_or(0).to_string());
    }
    let json = json!({"d": d, "cells": cells, "homology": h});
    Ok(Report::new(json, vec!["degree", "cells", "group", "betti", "torsion"], rows))
}

fn stable(a: &StableArgs, limits: &Limits) -> Result<Report> {
    let h = stable_homology(a.k, a.p, a.max_degree, limits)?;
    let reports = h.degree_reports();
    let rows = reports
        .iter()
        .map(|r| {
            let group = AbelianGroup::new(r.betti, r.torsion.clone());
            let sources: Vec<String> = r
                .contributions
                .iter()
                .map(|c| format!("{} (shift {}, n = {})", c.lambda, c.shift, c.stable_at_n))
                .collect();
            vec![
                r.degree.to_string(),
                group.to_string(),
                r.betti.to_string(),
                torsion_text(&group),
                sources.join("; "),
            ]
        })
        .collect();
    let json = json!({
        "k": a.k,
        "p": a.p,
        "requested_max_degree": a.max_degree,
        "certified_max_degree": h.certified_max_degree,
        "degrees": reports,
        "modules": h.modules,
    });
    let mut report = Report::new(json, vec!["degree", "group", "betti", "torsion", "contributions"], rows);
    if !h.is_complete() {
        let reached = h
            .certified_max_degree
            .map_or("no degree".to_string(), |g| format!("degrees up to {g}"));
        report.incomplete = Some(format!(
            "certified {reached} of {}; raise --max-points to go further",
            a.max_degree
        ));
    }
    Ok(report)
}

fn assembled(sum: &AssembledSum) -> Report {
    let mut rows: Vec<Vec<String>> = sum
        .terms
        .iter()
        .flat_map(|t| {
            (0..=sum.max_degree).filter_map(move |g| {
                let part = t.group.degree(g);
                (!part.is_zero()).then(|| {
                    vec![
                        g.to_string(),
                        t.lambda.to_string(),
                        t.n.to_string(),
                        t.shift.to_string(),
                        part.to_string(),
                    ]
                })
            })
        })
        .collect();
    rows.sort_by_key(|r| r[0].parse::<usize>().unwrap_or(0));
    for g in 0..=sum.max_degree {
        rows.push(vec![g.to_string(), "total".into(), "-".into(), "-".into(), sum.group.degree(g).to_string()]);
    }
    let json = serde_json::to_value(sum).expect("assembled sums serialize");
    Report::new(json, vec!["degree", "lambda", "n", "shift", "group"], rows)
}

fn selftest(seed: u64, limits: &Limits) -> Result<Report> {
    let report = run_selftest(seed, limits);
    let rows = report
        .checks
        .iter()
        .map(|c| vec![c.name.to_string(), if c.passed { "PASS" } else { "FAIL" }.to_string(), c.detail.clone()])
        .collect();
    let json = serde_json::to_value(&report)?;
    let failures = report.checks.iter().filter(|c| !c.passed).count();
    let mut out = Report::new(json, vec!["check", "status", "detail"], rows).with_table(report.render().trim_end().to_string());
    if failures > 0 {
        out.failed = Some(format!("{failures} checks failed"));
    }
    Ok(out)
}
