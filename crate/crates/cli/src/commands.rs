//! Subcommand bodies. Each reads what it needs from the configuration,
//! stores back every default it applied and returns the output bytes.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use msdim::asymptotics::{
    emit_curves, emit_curves_exact, figure_grid, figure_grid_exact, regime, Exponent,
};
use msdim::census::typicality_census;
use msdim::construction::{
    construct_resolving, default_initial_r, estimate_failure_rate, CandidateSpec, DEFAULT_GROWTH,
    DEFAULT_MAX_ROUNDS,
};
use msdim::exact::{beta_ms_exact, dimension_report, MsValue, DEFAULT_BUDGET};
use msdim::expansion::{audit_expansion_with, DEFAULT_MULTIPLIER};
use msdim::localization::Localizer;
use msdim::seed::{child_seed, substream, Domain};
use msdim::signature::multiset_signatures;
use msdim::{
    generate_gnp, predicted_diameter, verify_resolving, Density, Graph, RandomGraphSpec,
    ResolvingKind,
};
use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Format};
use crate::format::{
    csv_string, fmt_float, fmt_ratio, parse_exponent, CampaignRecord, CAMPAIGN_HEADER,
};
use crate::{write_file, CliError};

type Body = (Vec<u8>, Option<CliError>);

pub fn dispatch(cfg: &mut ExperimentConfig) -> Result<Body, CliError> {
    let command = cfg
        .command
        .clone()
        .ok_or_else(|| CliError::Input("no command given".into()))?;
    match command.as_str() {
        "gen" => gen(cfg).map(done),
        "exact" => exact(cfg).map(done),
        "curves" => curves(cfg).map(done),
        "randomized" => randomized(cfg),
        "localize" => localize(cfg).map(done),
        "expansion" => expansion(cfg).map(done),
        "census" => census(cfg),
        "campaign" => campaign(cfg).map(done),
        "verify" => verify(cfg),
        "signatures" => signatures(cfg).map(done),
        other => Err(CliError::Input(format!("unknown command `{other}`"))),
    }
}

fn done(body: Vec<u8>) -> Body {
    (body, None)
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Input(format!("missing --{flag}")))
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s.into_bytes()
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Graph::read_edge_list(BufReader::new(file))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn density(cfg: &ExperimentConfig) -> Result<Option<Density>, CliError> {
    match (&cfg.x, cfg.p) {
        (Some(x), _) => Ok(Some(Density::Exponent(parse_exponent(x)?.0))),
        (None, Some(p)) => Ok(Some(Density::Probability(p))),
        (None, None) => Ok(None),
    }
}

/// The graph file, or a generated G(n, p) seeded by the master seed.
fn load_graph(cfg: &mut ExperimentConfig) -> Result<Graph, CliError> {
    if let Some(path) = cfg.graph.clone() {
        return read_graph(&path);
    }
    let n = require(cfg.n, "n (or --graph)")?;
    let density = density(cfg)?
        .ok_or_else(|| CliError::Input("a generated graph needs --x or --p".into()))?;
    let seed = cfg.seed();
    Ok(generate_gnp(&RandomGraphSpec { n, density, seed })?)
}

/// Density exponent from `x`, or implied by `p` as `log_n((n - 1) p)`.
fn exponent_of(cfg: &ExperimentConfig, n: usize) -> Result<Option<f64>, CliError> {
    match (&cfg.x, cfg.p) {
        (Some(x), _) => Ok(Some(parse_exponent(x)?.0)),
        (None, Some(p)) if n > 2 && p > 0.0 => {
            Ok(Some(((n - 1) as f64 * p).ln() / (n as f64).ln()))
        }
        _ => Ok(None),
    }
}

enum SensorSpec {
    List(Vec<usize>),
    Auto,
    Random(usize),
}

fn parse_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(|c: char| c == ',' || c.is_whitespace() || c == '[' || c == ']')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad vertex `{s}` in sensor list")))
        })
        .collect()
}

fn parse_sensors(text: &str, n: usize) -> Result<SensorSpec, CliError> {
    let text = text.trim();
    if text == "auto" {
        return Ok(SensorSpec::Auto);
    }
    if text == "sqrt" {
        return Ok(SensorSpec::Random((n as f64).sqrt().ceil() as usize));
    }
    if let Some(size) = text.strip_prefix("random:") {
        let size = size
            .parse()
            .map_err(|_| CliError::Input(format!("bad sensor count `{size}`")))?;
        return Ok(SensorSpec::Random(size));
    }
    if let Some(path) = text.strip_prefix('@') {
        let body =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
        return Ok(SensorSpec::List(parse_list(&body)?));
    }
    Ok(SensorSpec::List(parse_list(text)?))
}

/// Uniform sensor set of exactly `size` vertices, sorted.
pub fn random_sensors(n: usize, size: usize, seed: u64) -> Result<Vec<usize>, CliError> {
    if size == 0 || size > n {
        return Err(CliError::Input(format!(
            "cannot pick {size} sensors from {n} vertices"
        )));
    }
    let mut rng = substream(seed, Domain::CensusSensors, 0);
    let mut set = index::sample(&mut rng, n, size).into_vec();
    set.sort_unstable();
    Ok(set)
}

fn sensor_list(
    cfg: &mut ExperimentConfig,
    g: &Graph,
    default: &str,
) -> Result<Vec<usize>, CliError> {
    let text = cfg
        .sensors
        .get_or_insert_with(|| default.to_string())
        .clone();
    match parse_sensors(&text, g.vertex_count())? {
        SensorSpec::List(list) => Ok(list),
        SensorSpec::Random(size) => random_sensors(g.vertex_count(), size, cfg.seed()),
        SensorSpec::Auto => Err(CliError::Input(
            "`auto` sensors are only available to localize".into(),
        )),
    }
}

fn gen(cfg: &mut ExperimentConfig) -> Result<Vec<u8>, CliError> {
    if cfg.graph.is_some() {
        return Err(CliError::Input("gen does not read a graph".into()));
    }
    let g = load_graph(cfg)?;
    Ok(g.to_edge_list_string().into_bytes())
}

fn exact(cfg: &mut ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let g = load_graph(cfg)?;
    let budget = *cfg.budget.get_or_insert(DEFAULT_BUDGET);
    let report = dimension_report(&g, budget)?;
    Ok(json_bytes(&report))
}

#[derive(Serialize)]
struct RationalCurve {
    level: String,
    points: Vec<(String, String)>,
}

fn curves(cfg: &mut ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let levels = cfg.levels.get_or_insert_with(|| vec![1, 4]).clone();
    let points = *cfg.points.get_or_insert(1000);
    let upper_text = cfg.upper.get_or_insert_with(|| "1/2".into()).clone();
    let max_k = *cfg.max_k.get_or_insert(8);
    let format = cfg.format_or(Format::Csv);
    let (upper, upper_exact) = parse_exponent(&upper_text)?;
    if !(upper > 0.0 && upper <= 1.0) || points == 0 {
        return Err(CliError::Input(
            "curves need --points >= 1 and --upper in (0, 1]".into(),
        ));
    }

    if cfg.rational() {
        let upper = upper_exact
            .ok_or_else(|| CliError::Input(format!("--upper `{upper_text}` has no exact value")))?;
        let grid = figure_grid_exact(points, upper, max_k);
        let lv: Vec<Exponent> = levels
            .iter()
            .map(|&l| Exponent::from_integer(i64::from(l)))
            .collect();
        let curves = emit_curves_exact(&grid, &lv)?;
        let curves: Vec<RationalCurve> = curves
            .into_iter()
            .map(|c| RationalCurve {
                level: fmt_ratio(c.level),
                points: c
                    .points
                    .into_iter()
                    .map(|(x, y)| (fmt_ratio(x), fmt_ratio(y)))
                    .collect(),
            })
            .collect();
        return Ok(match format {
            Format::Json => json_bytes(&curves),
            Format::Csv => {
                let rows: Vec<Vec<String>> = curves
                    .iter()
                    .flat_map(|c| {
                        c.points
                            .iter()
                            .map(|(x, y)| vec![x.clone(), y.clone(), c.level.clone()])
                    })
                    .collect();
                csv_string(&["x", "y", "level"], &rows).into_bytes()
            }
        });
    }

    let tol = *cfg.tol.get_or_insert(msdim::asymptotics::DEFAULT_TOL);
    let grid = figure_grid(points, upper, max_k);
    let lv: Vec<f64> = levels.iter().map(|&l| f64::from(l)).collect();
    let curves = emit_curves(&grid, &lv, tol)?;
    Ok(match format {
        Format::Json => json_bytes(&curves),
        Format::Csv => {
            let rows: Vec<Vec<String>> = curves
                .iter()
                .flat_map(|c| {
                    c.points
                        .iter()
                        .map(|&(x, y)| vec![fmt_float(x), fmt_float(y), fmt_float(c.level)])
                })
                .collect();
            csv_string(&["x", "y", "level"], &rows).into_bytes()
        }
    })
}

fn candidate_spec(cfg: &mut ExperimentConfig, n: usize) -> Result<CandidateSpec, CliError> {
    let x = exponent_of(cfg, n)?;
    let r = *cfg.r.get_or_insert_with(|| default_initial_r(n, x));
    Ok(CandidateSpec {
        r,
        growth: *cfg.growth.get_or_insert(DEFAULT_GROWTH),
        max_rounds: *cfg.max_rounds.get_or_insert(DEFAULT_MAX_ROUNDS),
        seed: cfg.seed(),
    })
}

fn randomized(cfg: &mut ExperimentConfig) -> Result<Body, CliError> {
    let g = load_graph(cfg)?;
    let spec = candidate_spec(cfg, g.vertex_count())?;
    let format = cfg.format_or(Format::Json);
    let report = construct_resolving(&g, &spec)?;
    let body = match format {
        Format::Json => json_bytes(&report.rounds),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .rounds
                .iter()
                .map(|r| {
                    let (v, w) = r.witness.map_or((String::new(), String::new()), |(v, w)| {
                        (v.to_string(), w.to_string())
                    });
                    vec![
                        r.round.to_string(),
                        fmt_float(r.r),
                        r.sample_size.to_string(),
                        r.verdict.to_string(),
                        v,
                        w,
                    ]
                })
                .collect();
            csv_string(
                &[
                    "round",
                    "r",
                    "sample_size",
                    "verdict",
                    "witness_v",
                    "witness_w",
                ],
                &rows,
            )
            .into_bytes()
        }
    };
    let failure = match &report.resolving_set {
        Some(set) => {
            if let Some(path) = &cfg.sensors_out {
                write_file(path, &json_bytes(set))?;
            }
            None
        }
        None => Some(CliError::Verification(format!(
            "no multiset resolving set after {} rounds; last collision {:?}",
            report.rounds_used, report.last_witness
        ))),
    };
    Ok((body, failure))
}

#[derive(Serialize)]
struct Transcript<'a> {
    sensors: &'a [usize],
    source: usize,
    observation: Vec<u32>,
    recovered: Vec<usize>,
}

fn localize(cfg: &mut ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let g = load_graph(cfg)?;
    let n = g.vertex_count();
    let text = cfg.sensors.get_or_insert_with(|| "auto".into()).clone();
    let sensors = match parse_sensors(&text, n)? {
        SensorSpec::List(list) => list,
        SensorSpec::Random(size) => random_sensors(n, size, cfg.seed())?,
        SensorSpec::Auto if n <= DEFAULT_BUDGET => match beta_ms_exact(&g, DEFAULT_BUDGET)? {
            (MsValue::Finite(_), Some(opt)) => opt.witness,
            _ => {
                return Err(CliError::Verification(
                    "graph has no multiset resolving set".into(),
                ))
            }
        },
        SensorSpec::Auto => {
            let spec = candidate_spec(cfg, n)?;
            construct_resolving(&g, &spec)?
                .resolving_set
                .ok_or_else(|| {
                    CliError::Verification("randomized construction found no resolving set".into())
                })?
        }
    };
    let loc = Localizer::new(&g, &sensors)?;
    let source = cfg.source.get_or_insert_with(|| "sweep".into()).clone();
    let sources: Vec<usize> = if source == "sweep" {
        (0..n).collect()
    } else {
        vec![source
            .parse()
            .map_err(|_| CliError::Input(format!("bad source `{source}`")))?]
    };
    let mut out = Vec::new();
    for v in sources {
        let obs = loc.observe(v)?;
        let line = Transcript {
            sensors: &sensors,
            source: v,
            recovered: loc.identify(&obs),
            observation: obs.counts,
        };
        out.extend(serde_json::to_vec(&line).expect("serializable"));
        out.push(b'\n');
    }
    Ok(out)
}

fn expansion(cfg: &mut ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let g = load_graph(cfg)?;
    let n = g.vertex_count();
    let x =
        exponent_of(cfg, n)?.ok_or_else(|| CliError::Input("expansion needs --x or --p".into()))?;
    let params = regime(n, x)?;
    let samples = *cfg.samples.get_or_insert(100);
    let multiplier = *cfg.multiplier.get_or_insert(DEFAULT_MULTIPLIER);
    let seed = cfg.seed();
    let report = audit_expansion_with(&g, &params, samples, seed, multiplier)?;
    Ok(match cfg.format_or(Format::Csv) {
        Format::Json => json_bytes(&report),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .levels
                .iter()
                .map(|l| {
                    vec![
                        l.level.to_string(),
                        l.set_size.to_string(),
                        l.ratios.len().to_string(),
                        fmt_float(l.predicted),
                        fmt_float(l.tolerance),
                        fmt_float(l.mean_ratio),
                        fmt_float(l.min_ratio),
                        fmt_float(l.max_ratio),
                        fmt_float(l.max_abs_deviation),
                        fmt_float(l.within_fraction),
                        l.partial.to_string(),
                    ]
                })
                .collect();
            csv_string(
                &[
                    "level",
                    "set_size",
                    "samples",
                    "predicted",
                    "tolerance",
                    "mean_ratio",
                    "min_ratio",
                    "max_ratio",
                    "max_abs_deviation",
                    "within_fraction",
                    "partial",
                ],
                &rows,
            )
            .into_bytes()
        }
    })
}

/// `predicted_diameter - 1` from the measured average degree.
fn default_level(g: &Graph) -> Result<u32, CliError> {
    let d = predicted_diameter(g.vertex_count(), g.average_degree(), 0.0)?;
    Ok(d.saturating_sub(1))
}

fn census(cfg: &mut ExperimentConfig) -> Result<Body, CliError> {
    let g = load_graph(cfg)?;
    let sensors = sensor_list(cfg, &g, "sqrt")?;
    let k = match cfg.k {
        Some(k) => k,
        None => *cfg.k.insert(default_level(&g)?),
    };
    let report = typicality_census(&g, &sensors, k)?;
    let body = match cfg.format_or(Format::Csv) {
        Format::Json => json_bytes(&report),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .levels
                .iter()
                .map(|l| {
                    vec![
                        l.level.to_string(),
                        l.atypical.to_string(),
                        report.typical.to_string(),
                        l.allowed_coords.to_string(),
                    ]
                })
                .collect();
            csv_string(&["level", "atypical", "typical", "allowed_coords"], &rows).into_bytes()
        }
    };
    let failure = (!report.double_count_holds())
        .then(|| CliError::Verification("census double count does not balance".into()));
    Ok((body, failure))
}

fn verify(cfg: &mut ExperimentConfig) -> Result<Body, CliError> {
    let g = load_graph(cfg)?;
    let text = require(cfg.sensors.clone(), "sensors")?;
    let sensors = match parse_sensors(&text, g.vertex_count())? {
        SensorSpec::List(list) => list,
        _ => {
            return Err(CliError::Input(
                "verify needs an explicit sensor list".into(),
            ))
        }
    };
    let kind: ResolvingKind = cfg
        .kind
        .get_or_insert_with(|| "multiset".into())
        .parse()
        .map_err(CliError::Input)?;
    let verdict = verify_resolving(&g, &sensors, kind)?;
    let json = serde_json::json!({
        "kind": kind.to_string(),
        "resolving": verdict.resolving,
        "witness": verdict.witness.as_ref().map(|c| [c.v, c.w]),
    });
    let failure = (!verdict.resolving)
        .then(|| CliError::Verification(format!("sensor set is not {kind} resolving")));
    Ok((json_bytes(&json), failure))
}

fn signatures(cfg: &mut ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let g = load_graph(cfg)?;
    let sensors = sensor_list(cfg, &g, "sqrt")?;
    let sigs = multiset_signatures(&g, &sensors)?;
    let width = sigs.first().map_or(0, |s| s.counts.len());
    let disconnected = sigs.first().is_some_and(|s| s.unreachable.is_some());
    let mut header: Vec<String> = std::iter::once("vertex".to_string())
        .chain((0..width).map(|k| format!("k{k}")))
        .collect();
    if disconnected {
        header.push("kinf".into());
    }
    let rows: Vec<Vec<String>> = sigs
        .iter()
        .enumerate()
        .map(|(v, s)| {
            std::iter::once(v.to_string())
                .chain(s.coordinates().iter().map(u32::to_string))
                .collect()
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(csv_string(&header, &rows).into_bytes())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Experiment {
    Randomized,
    FailureRate,
    Census,
    Expansion,
}

fn campaign(cfg: &mut ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let name = require(cfg.experiment.clone(), "experiment")?;
    let experiment = match name.as_str() {
        "randomized" => Experiment::Randomized,
        "failure_rate" => Experiment::FailureRate,
        "census" => Experiment::Census,
        "expansion" => Experiment::Expansion,
        other => return Err(CliError::Input(format!("unknown experiment `{other}`"))),
    };
    let trials = *cfg.trials.get_or_insert(10);
    let n = require(cfg.n, "n")?;
    let x_text = require(cfg.x.clone(), "x")?;
    let (x, _) = parse_exponent(&x_text)?;
    let master = cfg.seed();
    let timings = *cfg.timings.get_or_insert(false);
    let format = cfg.format_or(Format::Csv);

    let spec = match experiment {
        Experiment::Randomized | Experiment::FailureRate => Some(candidate_spec(cfg, n)?),
        _ => None,
    };
    let samples = match experiment {
        Experiment::FailureRate | Experiment::Expansion => *cfg.samples.get_or_insert(100),
        _ => 0,
    };
    let multiplier = match experiment {
        Experiment::Expansion => *cfg.multiplier.get_or_insert(DEFAULT_MULTIPLIER),
        _ => DEFAULT_MULTIPLIER,
    };
    let params = match experiment {
        Experiment::Expansion => Some(regime(n, x)?),
        _ => None,
    };

    let records: Vec<CampaignRecord> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<CampaignRecord, CliError> {
            let seed = child_seed(master, Domain::Campaign, t);
            let g = generate_gnp(&RandomGraphSpec::with_exponent(n, x, seed))?;
            let start = Instant::now();
            let outcome = match experiment {
                Experiment::Randomized => {
                    let spec = CandidateSpec {
                        seed,
                        ..spec.expect("set above")
                    };
                    construct_resolving(&g, &spec).map(|rep| {
                        let size = rep.resolving_set.as_ref().map_or(0.0, |s| s.len() as f64);
                        (rep.succeeded(), size, f64::from(rep.rounds_used))
                    })
                }
                Experiment::FailureRate => {
                    let r = spec.expect("set above").r;
                    estimate_failure_rate(&g, r, samples as u64, seed).map(|e| (true, e.rate, r))
                }
                Experiment::Census => {
                    let size = (n as f64).sqrt().ceil() as usize;
                    let sensors = random_sensors(n, size, seed)?;
                    let k = default_level(&g)?;
                    typicality_census(&g, &sensors, k).map(|rep| {
                        let worst = (0..=rep.k)
                            .map(|i| rep.atypical_fraction(i))
                            .fold(0.0, f64::max);
                        (rep.double_count_holds(), worst, rep.typical as f64)
                    })
                }
                Experiment::Expansion => {
                    let params = params.as_ref().expect("set above");
                    audit_expansion_with(&g, params, samples, seed, multiplier).map(|rep| {
                        let within = rep.level(1, 1).map_or(0.0, |l| l.within_fraction);
                        (!rep.partial, within, rep.gamma)
                    })
                }
            };
            let (success, value, extra) = match outcome {
                Ok(v) => v,
                Err(msdim::Error::Disconnected) => {
                    log::warn!("trial {t}: sampled graph is disconnected");
                    (false, 0.0, 0.0)
                }
                Err(e) => return Err(e.into()),
            };
            Ok(CampaignRecord {
                trial: t,
                seed,
                n,
                x: x_text.clone(),
                experiment: name.clone(),
                success,
                value,
                extra,
                wall_ms: timings.then(|| start.elapsed().as_secs_f64() * 1e3),
            })
        })
        .collect::<Result<_, _>>()?;

    Ok(match format {
        Format::Json => json_bytes(&records),
        Format::Csv => {
            let mut header: Vec<&str> = CAMPAIGN_HEADER.to_vec();
            if timings {
                header.push("wall_ms");
            }
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    let mut row = vec![
                        r.trial.to_string(),
                        r.seed.to_string(),
                        r.n.to_string(),
                        r.x.clone(),
                        r.experiment.clone(),
                        r.success.to_string(),
                        fmt_float(r.value),
                        fmt_float(r.extra),
                    ];
                    if let Some(ms) = r.wall_ms {
                        row.push(fmt_float(ms));
                    }
                    row
                })
                .collect();
            csv_string(&header, &rows).into_bytes()
        }
    })
}
