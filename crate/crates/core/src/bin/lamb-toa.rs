//! `lamb-toa`: dispersion curves, synthetic signals, arrival picks and sweeps.
//!
//! Exit codes: 0 success, 1 when every pick came back NotFound, 2 on
//! configuration, I/O or computation errors.

use std::fmt;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use lamb_toa::config::{ConfigError, RunConfig};
use lamb_toa::dispersion::{fastest_group_speed, fd_grid, trace_mode, DispersionCurve, TraceOptions};
use lamb_toa::estimators::{
    aic_pick, common_threshold, mer_pick, round_half_up, sla_pick, tc_pick, AicVariant, Method,
    SlaParams, ToaEstimate,
};
use lamb_toa::harness::{
    aic_window_sweep, contaminate, cutoff_sweep, default_reference, estimate_group_speed, flags,
    mer_sweep, relative_times, sla_grid, synthesize, tc_sweep, trace_fundamentals, SweepResult,
};
use lamb_toa::plot::{Band, Heatmap, LinePlot, RefLine, Series};
use lamb_toa::signal::{lowpass, reference_markers, Channels, Markers};
use lamb_toa::tfa::{cwt, cwt_tc_pick, freq_grid, Scalogram};

#[derive(Parser)]
#[command(name = "lamb-toa", version, about = "Lamb-wave dispersion and time-of-arrival estimation")]
struct Cli {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `outputs.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Noise seed (overrides `noise.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Table format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Trace the configured modes and write phase/group speed curves.
    Dispersion,
    /// Synthesize per-sensor waveforms for the configured impact.
    Generate,
    /// Run one estimator on every channel.
    Pick {
        #[arg(long, value_enum)]
        method: PickMethod,
        /// Waveform CSV (`time_s,<channel>...`); overrides `input` in the config.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Sweep an estimator parameter.
    Sweep {
        #[arg(long, value_enum)]
        kind: SweepKind,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Arrival markers for every impact/sensor pair.
    Markers,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PickMethod {
    Tc,
    Sla,
    Mer,
    AicGm,
    AicLm,
    CwtTc,
}

impl PickMethod {
    fn slug(self) -> &'static str {
        match self {
            PickMethod::Tc => "tc",
            PickMethod::Sla => "sla",
            PickMethod::Mer => "mer",
            PickMethod::AicGm => "aic_gm",
            PickMethod::AicLm => "aic_lm",
            PickMethod::CwtTc => "cwt_tc",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    Tc,
    Sla,
    Mer,
    Aic,
    Cutoff,
    Cwt,
}

impl SweepKind {
    fn slug(self) -> &'static str {
        match self {
            SweepKind::Tc => "tc",
            SweepKind::Sla => "sla",
            SweepKind::Mer => "mer",
            SweepKind::Aic => "aic",
            SweepKind::Cutoff => "cutoff",
            SweepKind::Cwt => "cwt",
        }
    }
}

struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure(e.to_string())
    }
}

impl From<lamb_toa::Error> for Failure {
    fn from(e: lamb_toa::Error) -> Self {
        Failure(e.to_string())
    }
}

enum Outcome {
    Done,
    NothingFound,
}

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
    format: Format,
}

impl Ctx {
    fn write(&self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.out.join(name);
        fs::write(&path, bytes).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
        log::info!("wrote {}", path.display());
        Ok(())
    }

    fn write_with(&self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<(), Failure> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| Failure(e.to_string()))?;
        self.write(name, &buf)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn plot(&self, name: &str, svg: impl FnOnce() -> String) -> Result<(), Failure> {
        if self.cfg.outputs.plots {
            self.write(name, svg().as_bytes())?;
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("LAMB_TOA_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("LAMB_TOA_THREADS ignored: {e}");
                }
            }
            _ => log::warn!("LAMB_TOA_THREADS=`{v}` is not a positive integer; ignored"),
        }
    }
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NothingFound) => {
            eprintln!("no estimator produced a pick");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let (Some(seed), Some(noise)) = (cli.seed, cfg.noise.as_mut()) {
        noise.seed = seed;
    }
    let out = cli.out.clone().unwrap_or_else(|| cfg.outputs.dir.clone());
    fs::create_dir_all(&out).map_err(|e| Failure(format!("{}: {e}", out.display())))?;
    let ctx = Ctx { cfg, out, format: cli.format };
    match cli.cmd {
        Cmd::Dispersion => cmd_dispersion(&ctx),
        Cmd::Generate => cmd_generate(&ctx),
        Cmd::Pick { method, input } => cmd_pick(&ctx, method, input.as_deref()),
        Cmd::Sweep { kind, input } => cmd_sweep(&ctx, kind, input.as_deref()),
        Cmd::Markers => cmd_markers(&ctx),
    }
}

fn cmd_dispersion(ctx: &Ctx) -> Result<Outcome, Failure> {
    let block = &ctx.cfg.dispersion;
    if block.modes.is_empty() {
        log::warn!("dispersion.modes is empty; nothing to do");
        return Ok(Outcome::Done);
    }
    let grid = fd_grid(block.fd_step, block.fd_max);
    let opts = TraceOptions::default();
    let curves = block
        .modes
        .par_iter()
        .map(|&m| trace_mode(&ctx.cfg.material, m, &grid, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    match ctx.format {
        Format::Csv => ctx.write_with("dispersion.csv", |buf| {
            for (i, c) in curves.iter().enumerate() {
                c.write_csv(buf, i == 0)?;
            }
            Ok(())
        })?,
        Format::Json => ctx.write_json("dispersion.json", &curves)?,
    }
    ctx.plot("dispersion.svg", || {
        let mut series = Vec::new();
        for c in &curves {
            let xs: Vec<f64> = c.samples.iter().map(|s| s.fd).collect();
            series.push(Series { name: format!("{} phase", c.mode), xs: xs.clone(), ys: c.samples.iter().map(|s| s.c_phase).collect() });
            series.push(Series { name: format!("{} group", c.mode), xs, ys: c.samples.iter().map(|s| s.c_group).collect() });
        }
        LinePlot {
            title: "Dispersion".into(),
            x_label: "fd (Hz m)".into(),
            y_label: "speed (m/s)".into(),
            series,
            ..Default::default()
        }
        .render()
    })?;
    Ok(Outcome::Done)
}

/// Fastest S0 and A0 group speeds, used for the arrival markers.
fn marker_speeds(s0: &DispersionCurve, a0: &DispersionCurve) -> Result<(f64, f64), Failure> {
    let (c_s0, _) = fastest_group_speed(s0, 0.0, f64::INFINITY)?;
    let (c_a0, _) = fastest_group_speed(a0, 0.0, f64::INFINITY)?;
    Ok((c_s0, c_a0))
}

struct Signals {
    channels: Channels,
    markers: Option<Vec<Markers>>,
}

fn generated(cfg: &RunConfig) -> Result<Signals, Failure> {
    let g = &cfg.generation;
    let curves = trace_fundamentals(&cfg.material, g.fd_step, g.fd_max)?;
    let clean = synthesize(&cfg.layout, cfg.impact, g, &curves)?;
    let channels = match &cfg.noise {
        Some(n) => contaminate(&clean, n.snr_db, n.floor_sigma, n.seed)?,
        None => clean,
    };
    let (c_s0, c_a0) = marker_speeds(&curves.s0, &curves.a0)?;
    let markers = reference_markers(&cfg.layout, cfg.impact, c_s0, c_a0)?;
    Ok(Signals { channels, markers: Some(markers) })
}

fn load_signals(ctx: &Ctx, input: Option<&Path>) -> Result<Signals, Failure> {
    let cfg = &ctx.cfg;
    let mut sig = match input.or(cfg.input.as_deref()) {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            let channels = Channels::read_csv(BufReader::new(file))
                .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            let dt = channels.waveforms[0].dt();
            if (dt - cfg.generation.dt).abs() > 1e-6 * cfg.generation.dt {
                return Err(Failure(format!(
                    "config field `generation.dt`: {} s does not match the sampling of {} ({dt} s)",
                    cfg.generation.dt,
                    path.display()
                )));
            }
            let markers = if channels.len() == cfg.layout.sensors.len() {
                let curves = trace_fundamentals(&cfg.material, cfg.generation.fd_step, cfg.generation.fd_max)?;
                let (c_s0, c_a0) = marker_speeds(&curves.s0, &curves.a0)?;
                Some(reference_markers(&cfg.layout, cfg.impact, c_s0, c_a0)?)
            } else {
                None
            };
            Signals { channels, markers }
        }
        None => generated(cfg)?,
    };
    if let Some(fc) = cfg.methods.lowpass {
        let waves = sig
            .channels
            .waveforms
            .iter()
            .map(|w| lowpass(w, fc))
            .collect::<Result<Vec<_>, _>>()?;
        sig.channels = Channels::new(sig.channels.names.clone(), waves)?;
    }
    Ok(sig)
}

fn marker_lines(markers: Option<&Vec<Markers>>, channel: usize, vertical: bool) -> Vec<RefLine> {
    match markers.and_then(|m| m.get(channel)) {
        Some(m) => vec![
            RefLine { label: "t_S0".into(), at: m.t_s0, vertical, colour: 2 },
            RefLine { label: "t_A0".into(), at: m.t_a0, vertical, colour: 3 },
        ],
        None => Vec::new(),
    }
}

fn trace_plot(sig: &Signals, c: usize, title: String, mut lines: Vec<RefLine>) -> String {
    let w = &sig.channels.waveforms[c];
    lines.extend(marker_lines(sig.markers.as_ref(), c, true));
    LinePlot {
        title,
        x_label: "time (s)".into(),
        y_label: "amplitude".into(),
        series: vec![Series {
            name: sig.channels.names[c].clone(),
            xs: (0..w.len()).map(|i| w.time(i)).collect(),
            ys: w.samples().to_vec(),
        }],
        lines,
        ..Default::default()
    }
    .render()
}

#[derive(Serialize)]
struct WaveformsJson<'a> {
    names: &'a [String],
    dt: f64,
    t0: f64,
    samples: Vec<&'a [f64]>,
}

fn cmd_generate(ctx: &Ctx) -> Result<Outcome, Failure> {
    let sig = generated(&ctx.cfg)?;
    let ch = &sig.channels;
    match ctx.format {
        Format::Csv => ctx.write_with("waveforms.csv", |buf| ch.write_csv(buf))?,
        Format::Json => ctx.write_json(
            "waveforms.json",
            &WaveformsJson {
                names: &ch.names,
                dt: ch.waveforms[0].dt(),
                t0: ch.waveforms[0].t0(),
                samples: ch.waveforms.iter().map(|w| w.samples()).collect(),
            },
        )?,
    }
    if let Some(m) = &sig.markers {
        write_markers_table(ctx, "generate_markers", &[(ctx.cfg.impact, m.clone())])?;
    }
    for (c, name) in ch.names.iter().enumerate() {
        ctx.plot(&format!("waveform_{name}.svg"), || trace_plot(&sig, c, format!("Synthetic signal {name}"), Vec::new()))?;
    }
    Ok(Outcome::Done)
}

fn write_markers_table(ctx: &Ctx, stem: &str, rows: &[(usize, Vec<Markers>)]) -> Result<(), Failure> {
    #[derive(Serialize)]
    struct Row<'a> {
        impact: usize,
        sensor: &'a str,
        t_s0: f64,
        t_a0: f64,
    }
    let names = ctx.cfg.layout.sensor_names();
    let flat: Vec<Row> = rows
        .iter()
        .flat_map(|(imp, ms)| {
            ms.iter()
                .zip(&names)
                .map(move |(m, n)| Row { impact: *imp, sensor: n, t_s0: m.t_s0, t_a0: m.t_a0 })
        })
        .collect();
    match ctx.format {
        Format::Csv => ctx.write_with(&format!("{stem}.csv"), |buf| {
            writeln!(buf, "impact,sensor,t_s0_s,t_a0_s")?;
            for r in &flat {
                writeln!(buf, "I{},{},{:e},{:e}", r.impact + 1, r.sensor, r.t_s0, r.t_a0)?;
            }
            Ok(())
        }),
        Format::Json => ctx.write_json(&format!("{stem}.json"), &flat),
    }
}

fn cmd_markers(ctx: &Ctx) -> Result<Outcome, Failure> {
    let cfg = &ctx.cfg;
    let curves = trace_fundamentals(&cfg.material, cfg.dispersion.fd_step, cfg.dispersion.fd_max)?;
    let (c_s0, c_a0) = marker_speeds(&curves.s0, &curves.a0)?;
    log::info!("marker speeds: S0 {c_s0} m/s, A0 {c_a0} m/s");
    let rows = (0..cfg.layout.impacts.len())
        .map(|i| Ok((i, reference_markers(&cfg.layout, i, c_s0, c_a0)?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    write_markers_table(ctx, "markers", &rows)?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct PickRow<'a> {
    channel: &'a str,
    estimate: &'a ToaEstimate,
}

#[derive(Serialize)]
struct PickSummary {
    method: String,
    channels: Vec<String>,
    found: usize,
    total: usize,
    /// Per-channel earliest pick time (s), if any.
    times: Vec<Option<f64>>,
    group_speeds: Option<Vec<f64>>,
    relative_times: Option<Vec<Vec<Option<f64>>>>,
    reference: Option<usize>,
}

fn failed(method: Method, err: lamb_toa::Error, channel: &str) -> ToaEstimate {
    log::warn!("{method} on {channel}: {err}");
    ToaEstimate::not_found(method).with_note(err.to_string())
}

fn write_picks(ctx: &Ctx, stem: &str, names: &[String], rows: &[Vec<ToaEstimate>]) -> Result<(), Failure> {
    match ctx.format {
        Format::Csv => ctx.write_with(&format!("{stem}.csv"), |buf| {
            writeln!(buf, "channel,method,frequency_hz,index,time_s,flags")?;
            for (name, row) in names.iter().zip(rows) {
                for e in row {
                    let freq = e.frequency.map(|f| f.to_string()).unwrap_or_default();
                    let idx = e.index.map(|i| i.to_string()).unwrap_or_default();
                    let t = e.time.map(|t| format!("{t:e}")).unwrap_or_default();
                    writeln!(buf, "{name},{},{freq},{idx},{t},{}", e.method, flags(e))?;
                }
            }
            Ok(())
        }),
        Format::Json => {
            let flat: Vec<PickRow> = names
                .iter()
                .zip(rows)
                .flat_map(|(n, row)| row.iter().map(move |e| PickRow { channel: n, estimate: e }))
                .collect();
            ctx.write_json(&format!("{stem}.json"), &flat)
        }
    }
}

fn scalograms(ctx: &Ctx, channels: &Channels) -> Result<Vec<Scalogram>, Failure> {
    let b = &ctx.cfg.methods.cwt;
    let freqs = freq_grid(b.f_lo, b.f_hi, b.f_step)?;
    Ok(channels
        .waveforms
        .iter()
        .map(|w| cwt(w, &freqs, &b.options))
        .collect::<Result<Vec<_>, _>>()?)
}

fn heatmap(s: &Scalogram, title: String) -> String {
    let nf = s.freqs.len();
    let norm = if s.normalizer > 0.0 { s.normalizer } else { 1.0 };
    Heatmap {
        title,
        times: (0..s.n_times).map(|i| s.time(i)).collect(),
        freqs: s.freqs.clone(),
        values: s.values.iter().map(|v| v / norm).collect(),
        boundary: Some(s.coi.clone()),
        max_cells: (400, nf.min(100)),
    }
    .render()
}

fn cmd_pick(ctx: &Ctx, method: PickMethod, input: Option<&Path>) -> Result<Outcome, Failure> {
    let sig = load_signals(ctx, input)?;
    let ch = &sig.channels;
    let m = &ctx.cfg.methods;
    let f_s = ch.waveforms[0].sample_rate();
    let mut reference = None;
    let mut rel = None;
    let rows: Vec<Vec<ToaEstimate>> = match method {
        PickMethod::Tc => {
            let thr = common_threshold(&ch.waveforms, m.tc.p)?;
            ch.waveforms
                .iter()
                .zip(&ch.names)
                .map(|(w, n)| vec![tc_pick(w, thr).map(|e| e.with_param("p", m.tc.p)).unwrap_or_else(|e| failed(Method::Tc, e, n))])
                .collect()
        }
        PickMethod::Sla => {
            let params = SlaParams { alpha: m.sla.alpha, beta: m.sla.beta, t_dom: m.sla.t_dom, f_s };
            ch.waveforms
                .par_iter()
                .zip(&ch.names)
                .map(|(w, n)| vec![sla_pick(w, &params).map(|r| r.0).unwrap_or_else(|e| failed(Method::Sla, e, n))])
                .collect()
        }
        PickMethod::Mer => {
            let n_e = round_half_up(m.mer.alpha * f_s * m.mer.t_dom);
            ch.waveforms
                .par_iter()
                .zip(&ch.names)
                .map(|(w, n)| vec![mer_pick(w, n_e).map(|r| r.0).unwrap_or_else(|e| failed(Method::Mer, e, n))])
                .collect()
        }
        PickMethod::AicGm | PickMethod::AicLm => {
            let variant = if method == PickMethod::AicGm { AicVariant::Gm } else { AicVariant::Lm };
            ch.waveforms
                .par_iter()
                .zip(&ch.names)
                .map(|(w, n)| vec![aic_pick(w, &m.aic, variant, None).unwrap_or_else(|e| failed(variant.method(), e, n))])
                .collect()
        }
        PickMethod::CwtTc => {
            let scs = scalograms(ctx, ch)?;
            let picks = cwt_tc_pick(&scs, m.cwt.threshold, None)?;
            for (c, s) in scs.iter().enumerate() {
                let name = &ch.names[c];
                if ctx.cfg.outputs.scalogram_csv {
                    ctx.write_with(&format!("scalogram_{name}.csv"), |buf| s.write_csv(buf))?;
                }
                ctx.plot(&format!("scalogram_{name}.svg"), || heatmap(s, format!("Scalogram {name}")))?;
            }
            let r = match m.cwt.reference {
                Some(r) => r,
                None => default_reference(ch)?,
            };
            reference = Some(r);
            rel = Some(relative_times(&picks.picks, r)?);
            picks.picks
        }
    };
    let found = rows.iter().flatten().filter(|e| e.is_found()).count();
    let total = rows.iter().map(Vec::len).sum();
    let times: Vec<Option<f64>> = rows
        .iter()
        .map(|row| row.iter().filter_map(|e| e.time).min_by(f64::total_cmp))
        .collect();
    let group_speeds = if method != PickMethod::CwtTc && ch.len() == ctx.cfg.layout.sensors.len() {
        let firsts: Vec<ToaEstimate> = rows.iter().map(|r| r[0].clone()).collect();
        estimate_group_speed(&ctx.cfg.layout, ctx.cfg.impact, &firsts)
            .map_err(|e| log::warn!("group speeds unavailable: {e}"))
            .ok()
    } else {
        None
    };
    let stem = format!("pick_{}", method.slug());
    write_picks(ctx, &stem, &ch.names, &rows)?;
    ctx.write_json(
        &format!("{stem}_summary.json"),
        &PickSummary {
            method: method.slug().into(),
            channels: ch.names.clone(),
            found,
            total,
            times: times.clone(),
            group_speeds,
            relative_times: rel,
            reference,
        },
    )?;
    for (c, name) in ch.names.iter().enumerate() {
        let lines = times[c]
            .map(|t| vec![RefLine { label: "pick".into(), at: t, vertical: true, colour: 0 }])
            .unwrap_or_default();
        ctx.plot(&format!("{stem}_{name}.svg"), || trace_plot(&sig, c, format!("{} pick {name}", method.slug()), lines))?;
    }
    Ok(if found == 0 { Outcome::NothingFound } else { Outcome::Done })
}

/// Joins single-channel sweeps sharing one grid into a multi-channel result.
fn merge(parts: Vec<SweepResult>) -> SweepResult {
    let mut it = parts.into_iter();
    let mut acc = it.next().expect("at least one channel");
    for (c, part) in it.enumerate() {
        let c = c + 1;
        acc.channels.extend(part.channels);
        for (row, extra) in acc.estimates.iter_mut().zip(part.estimates) {
            row.extend(extra);
        }
        acc.buckets.extend(part.buckets.into_iter().map(|mut b| {
            b.channel = c;
            b
        }));
    }
    acc
}

fn cmd_sweep(ctx: &Ctx, kind: SweepKind, input: Option<&Path>) -> Result<Outcome, Failure> {
    let sig = load_signals(ctx, input)?;
    if kind == SweepKind::Cwt {
        return cwt_sweep(ctx, &sig);
    }
    let ch = &sig.channels;
    let (m, s) = (&ctx.cfg.methods, &ctx.cfg.sweeps);
    let f_s = ch.waveforms[0].sample_rate();
    let per_channel = |f: &dyn Fn(usize) -> lamb_toa::Result<SweepResult>| -> Result<SweepResult, Failure> {
        Ok(merge((0..ch.len()).map(f).collect::<Result<Vec<_>, _>>()?))
    };
    let result = match kind {
        SweepKind::Tc => tc_sweep(ch, &s.p_values)?,
        SweepKind::Sla => per_channel(&|c| sla_grid(&ch.waveforms[c], &ch.names[c], &s.alphas, &s.betas, m.sla.t_dom, f_s))?,
        SweepKind::Mer => per_channel(&|c| mer_sweep(&ch.waveforms[c], &ch.names[c], &s.alphas, m.mer.t_dom, f_s))?,
        SweepKind::Aic => per_channel(&|c| aic_window_sweep(&ch.waveforms[c], &ch.names[c], &m.aic, &s.ub_values, s.aic_variant))?,
        SweepKind::Cutoff => cutoff_sweep(ch, &s.cutoffs, &s.cutoff_picker)?,
        SweepKind::Cwt => unreachable!(),
    };
    let stem = format!("sweep_{}", kind.slug());
    match ctx.format {
        Format::Csv => {
            ctx.write_with(&format!("{stem}.csv"), |buf| result.write_csv(buf))?;
            if !result.buckets.is_empty() {
                ctx.write_with(&format!("{stem}_buckets.csv"), |buf| result.write_buckets_csv(buf))?;
            }
        }
        Format::Json => ctx.write_json(&format!("{stem}.json"), &result)?,
    }
    let found = result.estimates.iter().flatten().filter(|e| e.is_found()).count();
    ctx.write_json(
        &format!("{stem}_summary.json"),
        &serde_json::json!({
            "kind": kind.slug(),
            "axis": result.axis,
            "points": result.points.len(),
            "channels": result.channels,
            "found": found,
            "total": result.estimate_count(),
        }),
    )?;
    for (c, name) in result.channels.iter().enumerate() {
        ctx.plot(&format!("{stem}_{name}.svg"), || sweep_plot(&result, &sig, c, kind))?;
    }
    Ok(if found == 0 { Outcome::NothingFound } else { Outcome::Done })
}

fn sweep_plot(result: &SweepResult, sig: &Signals, c: usize, kind: SweepKind) -> String {
    let name = &result.channels[c];
    let lines = marker_lines(sig.markers.as_ref(), c, false);
    let (x_label, series, bands) = if !result.buckets.is_empty() {
        let bs: Vec<_> = result.buckets.iter().filter(|b| b.channel == c && b.mean.is_some()).collect();
        let xs: Vec<f64> = bs.iter().map(|b| b.key).collect();
        let mean: Vec<f64> = bs.iter().map(|b| b.mean.unwrap_or(f64::NAN)).collect();
        let sd: Vec<f64> = bs.iter().map(|b| b.std.unwrap_or(0.0)).collect();
        let band = Band {
            name: "mean ± std".into(),
            xs: xs.clone(),
            lo: mean.iter().zip(&sd).map(|(m, s)| m - s).collect(),
            hi: mean.iter().zip(&sd).map(|(m, s)| m + s).collect(),
        };
        ("alpha*beta".to_string(), vec![Series { name: "mean".into(), xs, ys: mean }], vec![band])
    } else {
        let (xs, ys): (Vec<f64>, Vec<f64>) = result
            .points
            .iter()
            .zip(result.channel_series(c))
            .map(|(p, e)| (p[0], e.time.unwrap_or(f64::NAN)))
            .unzip();
        (result.axis[0].clone(), vec![Series { name: name.clone(), xs, ys }], Vec::new())
    };
    LinePlot {
        title: format!("{} sweep {name}", kind.slug()),
        x_label,
        y_label: "arrival time (s)".into(),
        series,
        bands,
        lines,
        log_x: matches!(kind, SweepKind::Tc | SweepKind::Cutoff),
    }
    .render()
}

fn cwt_sweep(ctx: &Ctx, sig: &Signals) -> Result<Outcome, Failure> {
    let ch = &sig.channels;
    let b = &ctx.cfg.methods.cwt;
    let scs = scalograms(ctx, ch)?;
    let picks = cwt_tc_pick(&scs, b.threshold, None)?;
    let r = match b.reference {
        Some(r) => r,
        None => default_reference(ch)?,
    };
    let rel = relative_times(&picks.picks, r)?;
    let dt = ch.waveforms[0].dt();
    match ctx.format {
        Format::Csv => ctx.write_with("sweep_cwt.csv", |buf| {
            write!(buf, "freq_hz")?;
            for n in &ch.names {
                write!(buf, ",{n}_time_s,{n}_relative_s")?;
            }
            writeln!(buf)?;
            for (j, f) in picks.freqs.iter().enumerate() {
                write!(buf, "{f}")?;
                for c in 0..ch.len() {
                    let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
                    write!(buf, ",{},{}", opt(picks.picks[c][j].time), opt(rel[c][j]))?;
                }
                writeln!(buf)?;
            }
            Ok(())
        })?,
        Format::Json => ctx.write_json(
            "sweep_cwt.json",
            &serde_json::json!({ "freqs": picks.freqs, "picks": picks.picks, "relative_times": rel }),
        )?,
    }
    // Spread of each channel's relative time over frequency, in samples.
    let spans: Vec<Option<f64>> = rel
        .iter()
        .map(|row| {
            let v: Vec<f64> = row.iter().flatten().copied().collect();
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (!v.is_empty()).then(|| (hi - lo) / dt)
        })
        .collect();
    let found = picks.picks.iter().flatten().filter(|e| e.is_found()).count();
    ctx.write_json(
        "sweep_cwt_summary.json",
        &serde_json::json!({
            "kind": "cwt",
            "channels": ch.names,
            "reference": r,
            "normalizer": picks.normalizer,
            "span_samples": spans,
            "found": found,
            "total": picks.picks.iter().map(Vec::len).sum::<usize>(),
        }),
    )?;
    ctx.plot("sweep_cwt.svg", || {
        LinePlot {
            title: format!("Relative times to {}", ch.names[r]),
            x_label: "frequency (Hz)".into(),
            y_label: "relative time (s)".into(),
            series: ch
                .names
                .iter()
                .zip(&rel)
                .map(|(n, row)| Series {
                    name: n.clone(),
                    xs: picks.freqs.clone(),
                    ys: row.iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
                })
                .collect(),
            ..Default::default()
        }
        .render()
    })?;
    Ok(if found == 0 { Outcome::NothingFound } else { Outcome::Done })
}
