use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};
use sierpile::growth::{
    divisible_sandpile, idla, idla_ensemble, rotor_router, sandpile_growth, Arithmetic,
    GrowthOutcome,
};
use sierpile::radial::{bounds_series, g_samples, jump_table, table_csv, RadiusOracle};
use sierpile::render::{plot_series, render_png, render_svg, Frame, Palette, Series};
use sierpile::sandpile::{tile, verify_toppling_identities};
use sierpile::{Engine, GasketGraph, Mechanism, Sided};

use crate::error::CliError;
use crate::run::{ArithmeticName, EngineName, Format, MechanismName, RunConfig, Suite};

/// Artifacts written by one command and its machine-readable result.
pub struct Report {
    pub dir: PathBuf,
    pub outputs: Vec<String>,
    pub result: Value,
    pub failure: Option<String>,
}

impl Report {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir)?;
        fs::write(self.dir.join(name), bytes)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    /// Writes `summary.json` and returns the same JSON as one line.
    pub fn finish(&mut self, cfg: &RunConfig) -> Result<String, CliError> {
        let summary = json!({
            "command": cfg.command,
            "config": cfg,
            "hash": cfg.hash(),
            "dir": self.dir.display().to_string(),
            "outputs": self.outputs.iter().cloned().chain(["summary.json".to_string()]).collect::<Vec<_>>(),
            "status": if self.failure.is_some() { "failed" } else { "ok" },
            "result": self.result,
        });
        let line = summary.to_string();
        self.write("summary.json", format!("{line}\n").as_bytes())?;
        self.outputs.pop();
        Ok(line)
    }
}

fn need<T: Copy>(value: Option<T>, flag: &str, command: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("`{command}` needs --{flag}")))
}

/// Fills in the formats a command writes when none are requested.
pub fn default_formats(cfg: &mut RunConfig) {
    if cfg.formats.is_empty() {
        cfg.formats = match cfg.command.as_str() {
            "render" => vec![Format::Png],
            _ => vec![Format::Csv],
        };
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report {
        dir: cfg.run_dir(),
        outputs: Vec::new(),
        result: Value::Null,
        failure: None,
    };
    match cfg.command.as_str() {
        "build" => build(cfg, &mut report)?,
        "sandpile" | "rotor" | "divisible" => growth(cfg, &mut report)?,
        "idla" => idla_cmd(cfg, &mut report)?,
        "table" => table(cfg, &mut report)?,
        "gfunc" => gfunc(cfg, &mut report)?,
        "bounds" => bounds(cfg, &mut report)?,
        "verify" => verify(cfg, &mut report)?,
        "render" => render(cfg, &mut report)?,
        other => return Err(CliError::Usage(format!("unknown command `{other}`"))),
    }
    Ok(report)
}

fn build(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let level = need(cfg.level, "level", "build")?;
    let g = GasketGraph::build(level, Sided::One)?;
    if cfg.wants(Format::Csv) {
        report.write("edges.csv", g.edge_csv().as_bytes())?;
    }
    report.result = json!({ "level": level, "vertices": g.num_vertices(), "edges": g.num_edges() });
    Ok(())
}

fn write_outcome(cfg: &RunConfig, report: &mut Report, o: &GrowthOutcome) -> Result<(), CliError> {
    let frame = Frame::from_outcome(o);
    let scale = cfg.scale.unwrap_or(6);
    if cfg.wants(Format::Csv) {
        let mut csv = String::from("i,j,value\n");
        for (v, value) in frame.values.iter().enumerate() {
            if let Some(x) = value {
                let (i, j) = o.graph.vertex(v as u32).lattice();
                csv.push_str(&format!("{i},{j},{x}\n"));
            }
        }
        report.write("config.csv", csv.as_bytes())?;
    }
    if cfg.wants(Format::Png) {
        report.write(
            "cluster.png",
            &render_png(&frame, &Palette::default(), scale)?,
        )?;
    }
    if cfg.wants(Format::Svg) {
        report.write(
            "cluster.svg",
            render_svg(&frame, &Palette::default(), scale).as_bytes(),
        )?;
    }
    if cfg.wants(Format::Json) {
        report.write(
            "record.json",
            serde_json::to_string(&o.record()).unwrap().as_bytes(),
        )?;
    }
    Ok(())
}

fn growth(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let command = cfg.command.as_str();
    let m = need(cfg.m, "m", command)?;
    let outcome = match command {
        "sandpile" => {
            let engine = match cfg.engine.unwrap_or(EngineName::Hier) {
                EngineName::Naive => Engine::Naive,
                EngineName::Hier => Engine::Hierarchical,
            };
            sandpile_growth(m, engine)?
        }
        "rotor" => {
            let mechanism = match cfg.mechanism.unwrap_or(MechanismName::Ccw) {
                MechanismName::Cw => Mechanism::Clockwise,
                MechanismName::Ccw => Mechanism::CounterClockwise,
                MechanismName::Random => Mechanism::Random(cfg.seed.unwrap_or(0)),
            };
            rotor_router(m, mechanism, cfg.seed)?
        }
        _ => {
            let arithmetic = match cfg.arithmetic.unwrap_or(ArithmeticName::Float) {
                ArithmeticName::Exact => Arithmetic::Exact,
                ArithmeticName::Float => Arithmetic::default(),
            };
            divisible_sandpile(m, arithmetic)?
        }
    };
    write_outcome(cfg, report, &outcome)?;
    report.result = json!({
        "model": outcome.model,
        "m": m,
        "r": outcome.radius,
        "in_radius": outcome.in_radius,
        "out_radius": outcome.out_radius,
        "cluster_size": outcome.cluster.len(),
        "sink_trace": outcome.sink_trace,
    });
    Ok(())
}

fn idla_cmd(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let seed = cfg.seed.unwrap_or(0);
    if let Some(n) = cfg.radius {
        let ens = idla_ensemble(n, cfg.runs.unwrap_or(100), seed)?;
        if cfg.wants(Format::Csv) {
            report.write("stats.csv", ens.stats_csv().as_bytes())?;
        }
        if cfg.wants(Format::Png) {
            report.write(
                "fluctuations.png",
                &plot_series(Series::Fluctuations(&ens))?.png,
            )?;
        }
        let out = ens.runs.iter().map(|r| r.out_radius);
        let inn = ens.runs.iter().map(|r| r.in_radius);
        report.result = json!({
            "n": n,
            "m": ens.m,
            "runs": ens.runs.len(),
            "max_out_radius": out.max(),
            "min_in_radius": inn.min(),
            "min_covariance": ens.min_covariance(),
        });
        return Ok(());
    }
    let m = need(cfg.m, "m", "idla (or --radius for an ensemble)")?;
    let outcome = idla(m, seed)?;
    write_outcome(cfg, report, &outcome)?;
    report.result = json!({
        "m": m,
        "seed": seed,
        "in_radius": outcome.in_radius,
        "out_radius": outcome.out_radius,
    });
    Ok(())
}

fn table(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let nmax = cfg.nmax.unwrap_or(6);
    let rows = jump_table(nmax)?;
    if cfg.wants(Format::Csv) {
        report.write("table.csv", table_csv(&rows).as_bytes())?;
    }
    if cfg.wants(Format::Json) {
        report.write(
            "table.json",
            serde_json::to_string(&rows).unwrap().as_bytes(),
        )?;
    }
    let mismatches: Vec<u64> = rows.iter().filter(|r| r.mismatch()).map(|r| r.m).collect();
    report.result = json!({ "nmax": nmax, "rows": rows.len(), "mismatches": mismatches });
    Ok(())
}

fn gfunc(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let points = cfg.points.unwrap_or(1000);
    let depth = cfg.depth.unwrap_or(40);
    let oracle = RadiusOracle::new()?;
    let vals = g_samples(&oracle, 1.0, 3.0, points, depth)?;
    let plot = plot_series(Series::GFunction(&vals))?;
    if cfg.wants(Format::Csv) {
        report.write("gfunc.csv", plot.csv.as_bytes())?;
    }
    if cfg.wants(Format::Png) {
        report.write("gfunc.png", &plot.png)?;
    }
    let lo = vals.iter().map(|v| v.value).fold(f64::INFINITY, f64::min);
    let hi = vals
        .iter()
        .map(|v| v.value)
        .fold(f64::NEG_INFINITY, f64::max);
    report.result = json!({ "points": points, "depth": depth, "min": lo, "max": hi, "trunc_bound": vals[0].trunc_bound });
    Ok(())
}

fn bounds(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let mmax = cfg.mmax.unwrap_or(10_000);
    let rows = bounds_series(mmax)?;
    if cfg.wants(Format::Csv) {
        let mut csv = String::from("m,r,lower_ratio,upper_ratio,rossin_in,rossin_cut\n");
        for b in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                b.m, b.r, b.lower_ratio, b.upper_ratio, b.rossin_in, b.rossin_cut
            ));
        }
        report.write("bounds.csv", csv.as_bytes())?;
    }
    if cfg.wants(Format::Png) {
        let pts: Vec<(u64, u64)> = rows.iter().map(|b| (b.m, b.r)).collect();
        report.write("radius.png", &plot_series(Series::Radius(&pts))?.png)?;
    }
    let lower = rows.iter().filter(|b| !b.lower_holds()).count();
    let upper = rows.iter().filter(|b| !b.upper_holds()).count();
    let rossin = rows.iter().filter(|b| !b.rossin_holds()).count();
    if lower + upper + rossin > 0 {
        report.failure = Some(format!(
            "{lower} lower, {upper} upper, {rossin} Rossin violations"
        ));
    }
    report.result = json!({ "mmax": mmax, "lower_violations": lower, "upper_violations": upper, "rossin_violations": rossin });
    Ok(())
}

fn verify(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let suite = cfg.suite.unwrap_or(Suite::Identities);
    let nmax = cfg.nmax.unwrap_or(5);
    let mut checks: Vec<(String, bool)> = Vec::new();
    match suite {
        Suite::Identities => {
            for n in 1..=nmax {
                let r = verify_toppling_identities(n, 10, cfg.seed.unwrap_or(0))?;
                for c in r.checks {
                    checks.push((format!("n={n} {} {}", c.identity, c.sample), c.passed));
                }
            }
        }
        Suite::Table => {
            for r in jump_table(nmax)? {
                checks.push((format!("m={} prediction", r.m), !r.mismatch()));
                if r.m >= 12 {
                    checks.push((format!("m={} m' < m/2", r.m), 2 * r.m_prime < r.m));
                }
                checks.push((
                    format!("m={} conservation", r.m),
                    r.retained + 2 * r.m_prime == r.m,
                ));
            }
        }
        Suite::Recursion => {
            let top = 4 * 3u64.pow(nmax + 1);
            let oracle = RadiusOracle::new()?;
            let sim = sierpile::growth::asm::radius_series(top - 1)?;
            let bad = (0..top)
                .filter(|&m| oracle.radius(m as u128) != sim[m as usize] as u64)
                .count();
            checks.push((format!("recursion = simulation for m < {top}"), bad == 0));
        }
        Suite::Remainder => {
            let mmax = cfg.mmax.unwrap_or(10_000);
            let oracle = RadiusOracle::new()?;
            let bad = (0..=mmax as u128)
                .filter(|&m| (oracle.radius(3 * m) as i64 - 2 * oracle.radius(m) as i64).abs() > 1)
                .count();
            checks.push((format!("|r(3m) - 2r(m)| <= 1 for m <= {mmax}"), bad == 0));
        }
    }
    let mut csv = String::from("check,passed\n");
    for (name, ok) in &checks {
        csv.push_str(&format!("{name},{ok}\n"));
    }
    if cfg.wants(Format::Csv) {
        report.write("report.csv", csv.as_bytes())?;
    }
    let failed = checks.iter().filter(|c| !c.1).count();
    if failed > 0 {
        report.failure = Some(format!("{failed} of {} checks failed", checks.len()));
    }
    report.result = json!({ "suite": suite, "checks": checks.len(), "failed": failed });
    Ok(())
}

fn render(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let scale = cfg.scale.unwrap_or(4);
    let palette = Palette::default();
    if let Some(name) = &cfg.tile {
        let c = tile(name.parse()?)?;
        let frame = Frame::from_config(&c);
        if cfg.wants(Format::Png) {
            report.write("tile.png", &render_png(&frame, &palette, scale)?)?;
        }
        if cfg.wants(Format::Svg) {
            report.write("tile.svg", render_svg(&frame, &palette, scale).as_bytes())?;
        }
        if cfg.wants(Format::Csv) {
            report.write("tile.csv", c.to_csv().as_bytes())?;
        }
        report.result = json!({ "tile": name, "chips": c.total() });
        return Ok(());
    }
    let m = need(cfg.m, "m", "render (or --tile)")?;
    let outcome = sandpile_growth(m, Engine::Hierarchical)?;
    write_outcome(cfg, report, &outcome)?;
    report.result = json!({ "m": m, "r": outcome.radius });
    Ok(())
}
