use std::path::Path;

use clap::ValueEnum;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use nonclassical::geometry::{band_extrema_sampled, no_circle_check, BandResult, NoCircleReport};
use nonclassical::io::{parse_state, state_to_json};
use nonclassical::linalg::Vec3;
use nonclassical::samplers::{sample_state, stream_rng, Family, FamilySpec};
use nonclassical::{extremize_closed, measure_report, Mode, SetLabel};

use crate::error::{CliError, CliResult};
use crate::manifest::{finish, num, RunManifest};
use crate::suites::{generic_state, run_suite, Suite, SuiteConfig, BAND_REL_TOL};
use crate::Format;

pub fn measure(input: &Path, d: Option<usize>, format: Format) -> CliResult<String> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let report = measure_report(&parse_state(&text, d)?)?;
    Ok(match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["d", "gd", "min", "gmin", "lambda1", "lambda2", "lambda3"];
            let mut row = vec![
                report.d.to_string(),
                num(report.gd),
                num(report.min_),
                num(report.gmin),
                num(report.lambda[0]),
                num(report.lambda[1]),
                num(report.lambda[2]),
            ];
            if let Some(s) = report.scaled {
                header.extend(["gd_scaled", "min_scaled", "gmin_scaled"]);
                row.extend([num(s.gd_scaled), num(s.min_scaled), num(s.gmin_scaled)]);
            }
            w.write_record(&header)
                .and_then(|_| w.write_record(&row))
                .map_err(csv_err)?;
            finish(w).map_err(csv_err)?
        }
    })
}

pub fn verify(suite: Suite, cfg: SuiteConfig, format: Format) -> CliResult<(String, usize, usize)> {
    let outcome = run_suite(suite, &cfg)?;
    let params = json!({ "suite": suite, "states": cfg.states, "budget": cfg.budget });
    let manifest = RunManifest::new(
        "verify",
        params,
        cfg.seed,
        outcome.tolerances,
        outcome.cases,
    );
    let (failed, total) = (manifest.failed, manifest.cases.len());
    let text = match format {
        Format::Json => to_json(&manifest),
        Format::Csv => manifest.to_csv().map_err(csv_err)?,
    };
    Ok((text, failed, total))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    NoCircle,
    Band,
}

#[derive(Serialize)]
struct BandRecord {
    state: usize,
    band: BandResult,
    cyclic_max: f64,
    traceless_min: f64,
    pass: bool,
}

#[derive(Serialize)]
struct GeometryOutput<T> {
    command: &'static str,
    check: Check,
    seed: u64,
    version: &'static str,
    parameters: serde_json::Value,
    passed: usize,
    failed: usize,
    states: Vec<T>,
}

pub fn geometry(
    check: Check,
    states: usize,
    planes: usize,
    budget: usize,
    seed: u64,
    format: Format,
) -> CliResult<(String, usize, usize)> {
    match check {
        Check::NoCircle => {
            let reports: Vec<NoCircleReport> = (0..states)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream_rng(seed, i as u64);
                    no_circle_check(&generic_state(&mut rng)?, planes, &mut rng)
                })
                .collect::<nonclassical::Result<_>>()?;
            let passed = reports.iter().filter(|r| r.verdict).count();
            let text = match format {
                Format::Json => to_json(&GeometryOutput {
                    command: "geometry",
                    check,
                    seed,
                    version: nonclassical::VERSION,
                    parameters: json!({ "states": states, "planes": planes }),
                    passed,
                    failed: states - passed,
                    states: reports,
                }),
                Format::Csv if states == 1 => reports[0].scan_csv(),
                Format::Csv => {
                    let mut out =
                        String::from("state,phi,max_value,max_gap_to_P,min_value,min_gap_to_G\n");
                    for (i, r) in reports.iter().enumerate() {
                        for line in r.scan_csv().lines().skip(1) {
                            out.push_str(&format!("{i},{line}\n"));
                        }
                    }
                    out
                }
            };
            Ok((text, states - passed, states))
        }
        Check::Band => {
            let records: Vec<BandRecord> = (0..states)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream_rng(seed, i as u64);
                    let st = generic_state(&mut rng)?;
                    let band = band_extrema_sampled(&st, budget, &mut rng)?;
                    let cyclic_max = extremize_closed(&st, SetLabel::Cyclic, Mode::Max)?.value;
                    let traceless_min =
                        extremize_closed(&st, SetLabel::Traceless, Mode::Min)?.value;
                    let pass = (band.max - cyclic_max).abs() <= BAND_REL_TOL * cyclic_max
                        && (band.min - traceless_min).abs() <= BAND_REL_TOL * traceless_min
                        && band.disagreements == 0;
                    Ok(BandRecord {
                        state: i,
                        band,
                        cyclic_max,
                        traceless_min,
                        pass,
                    })
                })
                .collect::<nonclassical::Result<_>>()?;
            let passed = records.iter().filter(|r| r.pass).count();
            let text = match format {
                Format::Json => to_json(&GeometryOutput {
                    command: "geometry",
                    check,
                    seed,
                    version: nonclassical::VERSION,
                    parameters: json!({ "states": states, "budget": budget }),
                    passed,
                    failed: states - passed,
                    states: records,
                }),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record([
                        "state",
                        "band_max",
                        "cyclic_max",
                        "band_min",
                        "traceless_min",
                        "accepted",
                        "rejected",
                        "disagreements",
                        "pass",
                    ])
                    .map_err(csv_err)?;
                    for r in &records {
                        w.write_record([
                            r.state.to_string(),
                            num(r.band.max),
                            num(r.cyclic_max),
                            num(r.band.min),
                            num(r.traceless_min),
                            r.band.accepted.to_string(),
                            r.band.rejected.to_string(),
                            r.band.disagreements.to_string(),
                            r.pass.to_string(),
                        ])
                        .map_err(csv_err)?;
                    }
                    finish(w).map_err(csv_err)?
                }
            };
            Ok((text, states - passed, states))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SweepFamily {
    /// Werner states, parameter `p`.
    Werner,
    /// `cos t|00⟩ + sin t|11⟩`, parameter `t`.
    PureSchmidt,
}

#[derive(Serialize)]
struct SweepRow {
    param: f64,
    gd: f64,
    min: f64,
    gmin: f64,
}

pub fn sweep(
    family: SweepFamily,
    from: f64,
    to: f64,
    steps: usize,
    format: Format,
) -> CliResult<String> {
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let rows = (0..steps)
        .map(|i| {
            let x = if steps == 1 {
                from
            } else {
                from + (to - from) * i as f64 / (steps - 1) as f64
            };
            let fam = match family {
                SweepFamily::Werner => Family::Werner { p: x },
                SweepFamily::PureSchmidt => Family::PureSchmidt { t: Some(x) },
            };
            let r = measure_report(&FamilySpec::new(fam, 0).sample()?)?;
            Ok(SweepRow {
                param: x,
                gd: r.gd,
                min: r.min_,
                gmin: r.gmin,
            })
        })
        .collect::<nonclassical::Result<Vec<_>>>()?;
    let name = match family {
        SweepFamily::Werner => "p",
        SweepFamily::PureSchmidt => "t",
    };
    Ok(match format {
        Format::Json => to_json(&json!({ "family": family, "parameter": name, "rows": rows })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([name, "gd", "min", "gmin"])
                .map_err(csv_err)?;
            for r in &rows {
                w.write_record([num(r.param), num(r.gd), num(r.min), num(r.gmin)])
                    .map_err(csv_err)?;
            }
            finish(w).map_err(csv_err)?
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SampleKind {
    PureSchmidt,
    HaarPure,
    Mixed,
    Werner,
    BellDiagonal,
    Product,
    QuditMixed,
}

/// Bell-diagonal correlations of a random mixture of the four Bell states.
fn bell_mixture<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    const VERTICES: [Vec3; 4] = [
        [-1.0, -1.0, -1.0],
        [-1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0],
        [1.0, 1.0, -1.0],
    ];
    let w: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln());
    let total: f64 = w.iter().sum();
    std::array::from_fn(|k| (0..4).map(|v| w[v] * VERTICES[v][k]).sum::<f64>() / total)
}

pub fn sample(
    kind: SampleKind,
    count: usize,
    d: usize,
    seed: u64,
    dir: &Path,
) -> CliResult<String> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = stream_rng(seed, i as u64);
        let family = match kind {
            SampleKind::PureSchmidt => Family::PureSchmidt { t: None },
            SampleKind::HaarPure => Family::HaarPure { d },
            SampleKind::Mixed => Family::Mixed { d, env: None },
            SampleKind::QuditMixed => Family::QuditMixed { d },
            SampleKind::Werner => Family::Werner { p: rng.random() },
            SampleKind::BellDiagonal => Family::BellDiagonal {
                c: bell_mixture(&mut rng),
            },
            SampleKind::Product => Family::Product { x: None, y: None },
        };
        let state = sample_state(&FamilySpec::new(family, seed), &mut rng)?;
        let name = format!("state_{i:04}.json");
        let path = dir.join(&name);
        std::fs::write(&path, state_to_json(&state)? + "\n").map_err(|e| CliError::io(&path, e))?;
        files.push(name);
    }
    let manifest = json!({
        "command": "sample",
        "kind": kind,
        "count": count,
        "d": d,
        "seed": seed,
        "version": nonclassical::VERSION,
        "files": files,
    });
    let text = to_json(&manifest);
    let path = dir.join("manifest.json");
    std::fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
    Ok(text)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serialises") + "\n"
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Usage(format!("csv output: {e}"))
}
