use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};

use lmcf_core::diagnostics::{gaussian_density, DensityQuery, Report};
use lmcf_core::flow::{Component, EndCondition, Ends, Event, SampleKind, Trajectory};
use lmcf_core::geometry::PlanarCurve;
use lmcf_core::io::{read_curve_csv, read_snapshot_csv, read_trajectory, write_curve_csv, Manifest};
use lmcf_core::render::{emit_svg, SvgStyle};
use lmcf_core::scenario::{
    build_profile, bundled, check_from_pairs, parse_scenario, profile_from_pairs, run_check, run_scenarios, RunContext,
    Scenario, BUNDLED,
};

const OUT_ENV: &str = "LMCF_LAB_OUT";
const DEFAULT_OUT: &str = "lmcf-out";

#[derive(Parser)]
#[command(name = "lmcf-lab", version, about = "Equivariant Lagrangian mean curvature flow scenarios")]
struct Cli {
    /// Output root; falls back to $LMCF_LAB_OUT, then the scenario's own
    /// `output`, then ./lmcf-out.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Runs are deterministic and use no random seeds. Accepted for
    /// scripting; `false` is refused.
    #[arg(long, global = true, default_value_t = true, action = ArgAction::Set)]
    seedless_deterministic: bool,
    /// Scenarios run in parallel on this many threads.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files and bundled scenarios.
    Simulate {
        configs: Vec<PathBuf>,
        /// Bundled scenario id; repeatable.
        #[arg(long)]
        bundled: Vec<String>,
        /// Every bundled scenario.
        #[arg(long)]
        all_bundled: bool,
        /// List bundled scenario ids and exit.
        #[arg(long)]
        list: bool,
        /// Print the canonical form of each scenario and exit.
        #[arg(long)]
        emit_canonical: bool,
    },
    /// Build one profile and write its curve CSV and validation JSON.
    Profile {
        /// ray, lawlor, expander, sigma, whitney or circle
        kind: String,
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 0.05)]
        spacing: f64,
    },
    /// Gaussian density of a curve at one point and scale.
    Density {
        curve: PathBuf,
        /// Centre in R^4 as x1,y1,x2,y2.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
        /// Scale l of the kernel.
        #[arg(long)]
        l: f64,
        #[arg(long)]
        closed: bool,
        #[arg(long, default_value_t = 64)]
        alpha_nodes: usize,
    },
    /// Run one check on a saved run directory.
    Diagnose {
        /// A scenario output directory or its snapshots/ directory.
        dir: PathBuf,
        #[arg(long)]
        check: String,
        #[command(flatten)]
        params: Params,
        /// Sampling stride; inferred from the snapshots when absent.
        #[arg(long)]
        stride: Option<f64>,
        /// End time of the run; the last sample when absent.
        #[arg(long)]
        max_time: Option<f64>,
        /// Flow spacing; the median segment length when absent.
        #[arg(long)]
        spacing: Option<f64>,
    },
    /// Draw a snapshot CSV as SVG.
    Render {
        snapshot: PathBuf,
        /// Defaults to <out>/render/<name>.svg.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Treat every component as closed when there is no manifest.
        #[arg(long)]
        closed: bool,
    },
}

#[derive(Args)]
struct Params {
    /// key=value parameter, TOML literal or bare string; repeatable.
    #[arg(long = "set", value_parser = parse_pair)]
    set: Vec<(String, String)>,
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn out_root(flag: &Option<PathBuf>, scenario: Option<&Scenario>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .or_else(|| scenario.and_then(|s| s.output.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// True when every verdict passes or does not apply.
fn dispatch(cli: &Cli) -> Result<bool> {
    if !cli.seedless_deterministic {
        bail!("only deterministic runs are supported");
    }
    match &cli.command {
        Command::Simulate {
            configs,
            bundled: names,
            all_bundled,
            list,
            emit_canonical,
        } => {
            if *list {
                for (id, _) in BUNDLED {
                    println!("{id}");
                }
                return Ok(true);
            }
            let mut scenarios = Vec::new();
            for path in configs {
                scenarios.push(parse_scenario(path)?);
            }
            let names: Vec<&str> = if *all_bundled {
                BUNDLED.iter().map(|(id, _)| *id).collect()
            } else {
                names.iter().map(String::as_str).collect()
            };
            for id in names {
                scenarios.push(bundled(id).ok_or_else(|| anyhow!("no bundled scenario {id:?}"))?);
            }
            if scenarios.is_empty() {
                bail!("nothing to run: give scenario files, --bundled ID or --all-bundled");
            }
            if *emit_canonical {
                for s in &scenarios {
                    print!("{}", s.to_toml());
                }
                return Ok(true);
            }
            simulate(cli, &scenarios)
        }
        Command::Profile { kind, params, spacing } => profile(cli, kind, &params.set, *spacing),
        Command::Density {
            curve,
            y,
            l,
            closed,
            alpha_nodes,
        } => {
            let &[y1, y2, y3, y4] = y.as_slice() else {
                bail!("--y needs four coordinates, got {}", y.len());
            };
            let c = read_curve_csv(open(curve)?, *closed)?;
            let mut q = DensityQuery::new([y1, y2, y3, y4], *l);
            q.alpha_nodes = *alpha_nodes;
            let d = gaussian_density(&[&c], &q).map_err(|e| anyhow!(e))?;
            println!("{}", serde_json::to_string_pretty(&d)?);
            Ok(true)
        }
        Command::Diagnose {
            dir,
            check,
            params,
            stride,
            max_time,
            spacing,
        } => diagnose(dir, check, &params.set, *stride, *max_time, *spacing),
        Command::Render {
            snapshot,
            output,
            closed,
        } => {
            let components = snapshot_components(snapshot, *closed)?;
            let svg = emit_svg(&components, &SvgStyle::default())?;
            let path = match output {
                Some(p) => p.clone(),
                None => {
                    let stem = snapshot.file_stem().and_then(|s| s.to_str()).unwrap_or("snapshot");
                    out_root(&cli.out, None).join("render").join(format!("{stem}.svg"))
                }
            };
            create_parent(&path)?;
            fs::write(&path, svg).with_context(|| path.display().to_string())?;
            println!("{}", path.display());
            Ok(true)
        }
    }
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).with_context(|| path.display().to_string())
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| parent.display().to_string())?;
    }
    Ok(())
}

fn simulate(cli: &Cli, scenarios: &[Scenario]) -> Result<bool> {
    // scenarios with the same root run together
    let mut groups: Vec<(PathBuf, Vec<Scenario>)> = Vec::new();
    for s in scenarios {
        let root = out_root(&cli.out, Some(s));
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, g)) => g.push(s.clone()),
            None => groups.push((root, vec![s.clone()])),
        }
    }
    let mut ok = true;
    for (root, group) in groups {
        for r in run_scenarios(&group, &root, cli.workers)? {
            ok &= r.ok;
            let verdicts: Vec<String> = r
                .checks
                .iter()
                .map(|c| format!("{}={}", c.check, serde_json::to_value(c.verdict).unwrap().as_str().unwrap_or("?")))
                .collect();
            println!(
                "{} {} {} [{}]",
                if r.ok { "PASS" } else { "FAIL" },
                r.id,
                r.dir.display(),
                verdicts.join(" ")
            );
            if let Some(e) = &r.error {
                println!("  error: {e}");
            }
        }
    }
    Ok(ok)
}

fn profile(cli: &Cli, kind: &str, pairs: &[(String, String)], spacing: f64) -> Result<bool> {
    let spec = profile_from_pairs(kind, pairs, spacing)?;
    let (components, report) = build_profile(&spec, 0)?;
    let dir = out_root(&cli.out, None).join(format!("profile_{kind}"));
    fs::create_dir_all(&dir).with_context(|| dir.display().to_string())?;
    for (k, c) in components.iter().enumerate() {
        let path = dir.join(format!("curve_{k}.csv"));
        write_curve_csv(&c.curve, fs::File::create(&path).with_context(|| path.display().to_string())?)?;
        println!("{}", path.display());
    }
    let passed = report.as_ref().is_none_or(|r| r.passed());
    let path = dir.join("validation.json");
    let body = serde_json::json!({"spec": spec, "passed": passed, "report": report});
    fs::write(&path, serde_json::to_string_pretty(&body)? + "\n").with_context(|| path.display().to_string())?;
    println!("{}", path.display());
    Ok(passed)
}

fn snapshots_dir(dir: &Path) -> PathBuf {
    let inner = dir.join("snapshots");
    if inner.join("manifest.json").exists() {
        inner
    } else {
        dir.to_path_buf()
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    v.retain(|x| x.is_finite() && *x > 0.0);
    v.sort_by(f64::total_cmp);
    v.get(v.len() / 2).copied()
}

fn diagnose(
    dir: &Path,
    check: &str,
    pairs: &[(String, String)],
    stride: Option<f64>,
    max_time: Option<f64>,
    spacing: Option<f64>,
) -> Result<bool> {
    let snaps = snapshots_dir(dir);
    let traj: Trajectory = read_trajectory(&snaps)?;
    let first = traj.snapshots.first().ok_or_else(|| anyhow!("no snapshots in {}", snaps.display()))?;
    let spacing = match spacing {
        Some(h) => h,
        None => first
            .components
            .first()
            .and_then(|c| median(c.curve.segment_lengths()))
            .ok_or_else(|| anyhow!("cannot infer the flow spacing; pass --spacing"))?,
    };
    let stride = match stride {
        Some(s) => s,
        None => {
            let t: Vec<f64> = traj
                .snapshots
                .iter()
                .filter(|s| s.kind == SampleKind::Stride)
                .map(|s| s.t)
                .collect();
            median(t.windows(2).map(|w| w[1] - w[0]).collect()).ok_or_else(|| anyhow!("cannot infer the stride; pass --stride"))?
        }
    };
    let final_time = traj.snapshots.last().map(|s| s.t).unwrap_or(first.t);
    let events_path = snaps.parent().map(|p| p.join("events.jsonl"));
    let events: Vec<Event> = match events_path.filter(|p| p.exists()) {
        Some(p) => fs::read_to_string(&p)
            .with_context(|| p.display().to_string())?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let spec = check_from_pairs(check, pairs, spacing)?;
    let context = RunContext {
        stride,
        max_time: max_time.unwrap_or(final_time),
        target_spacing: spacing,
    };
    let report: Report = run_check(&spec, &traj, &events, final_time, context)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.verdict.is_ok())
}

/// Components of a snapshot CSV, with ends from a `manifest.json` beside it
/// when one lists the file.
fn snapshot_components(path: &Path, closed: bool) -> Result<Vec<Component>> {
    let nodes = read_snapshot_csv(open(path)?)?;
    let manifest: Option<Manifest> = path
        .parent()
        .map(|p| p.join("manifest.json"))
        .filter(|p| p.exists())
        .map(|p| -> Result<Manifest> { Ok(serde_json::from_str(&fs::read_to_string(&p)?)?) })
        .transpose()?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or_default();
    let meta = manifest.and_then(|m| m.snapshots.into_iter().find(|e| e.file == name));
    nodes
        .into_iter()
        .enumerate()
        .map(|(k, z)| {
            let (label, ends) = match meta.as_ref().and_then(|m| m.components.get(k)) {
                Some(c) => (c.label.clone(), c.ends),
                None if closed => (format!("c{k}"), Ends::Closed),
                None => {
                    let free = EndCondition::Clamped { asymptote: None };
                    (format!("c{k}"), Ends::Open { start: free, end: free })
                }
            };
            let curve = PlanarCurve::new(z, matches!(ends, Ends::Closed))?;
            Ok(Component { label, curve, ends })
        })
        .collect()
}
