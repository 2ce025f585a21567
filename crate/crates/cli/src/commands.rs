use std::path::Path;

use hhscaling::emd::{decompose, EmdConfig, SiftCriterion, StopReason};
use hhscaling::hilbert::spectral_track;
use hhscaling::intraday::{bm_reference_band, measure_track, panelize, Measure, MeasureConfig};
use hhscaling::scaling::{
    complexity, generalized_hurst_q1, rolling_scaling_exponent, scaling_exponent, AmplitudeWeight,
};
use hhscaling::sim::{monte_carlo_ensemble, EnsembleOptions, EnsembleStats, Process, SimConfig, SLM_DEFAULT_LENGTH};
use rayon::prelude::*;

use crate::args::{
    ComplexityArgs, DecomposeArgs, EmdArgs, IntradayArgs, MeasureKind, ProcessKind, ScalingArgs, SimulateArgs,
    SpectralArgs, TableArgs, WeightKind,
};
use crate::error::CliError;
use crate::io::{num, numbered, read_input, read_prices, resolve_path, CsvOut, Input, Run};

pub struct Globals<'a> {
    pub seed: u64,
    pub out_dir: &'a Path,
}

fn emd_config(a: &EmdArgs) -> Result<EmdConfig, CliError> {
    let mut cfg = EmdConfig {
        max_sift_iterations: a.max_sift_iterations,
        max_imfs: a.max_imfs,
        mirror_extrema: a.mirror_extrema,
        ..EmdConfig::default()
    };
    if let Some(threshold) = a.sd_threshold {
        cfg.criterion = SiftCriterion::Sd { threshold };
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn weight(w: WeightKind) -> AmplitudeWeight {
    match w {
        WeightKind::Squared => AmplitudeWeight::Squared,
        WeightKind::Linear => AmplitudeWeight::Linear,
    }
}

fn core(input: &Input) -> impl Fn(hhscaling::Error) -> CliError + '_ {
    move |e| CliError::from_core(&input.path.display().to_string(), e)
}

fn generated(e: hhscaling::Error) -> CliError {
    CliError::from_core("simulation", e)
}

fn process(kind: ProcessKind, h: Option<f64>, alpha: Option<f64>, d: Option<f64>) -> Result<Process, CliError> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("--process needs --{flag}")));
    Ok(match kind {
        ProcessKind::Bm => Process::Bm,
        ProcessKind::Fbm => Process::Fbm { h: need(h, "h")? },
        ProcessKind::Slm => Process::Slm {
            alpha: need(alpha, "alpha")?,
        },
        ProcessKind::Arfima => Process::Arfima { d: need(d, "d")? },
    })
}

fn default_length(kind: ProcessKind, length: Option<usize>) -> usize {
    length.unwrap_or(match kind {
        ProcessKind::Slm => SLM_DEFAULT_LENGTH,
        _ => 10_000,
    })
}

const TABLE_HEADER: [&str; 6] = ["H", "mean_Hstar", "std_Hstar", "mean_R2", "mean_HG", "std_HG"];

fn table_out(rows: &[(f64, EnsembleStats)], paths: usize, length: usize) -> CsvOut {
    let header: Vec<String> = TABLE_HEADER.iter().map(|s| s.to_string()).collect();
    let mut out = CsvOut::new(
        "ensemble",
        &[("paths", paths.to_string()), ("length", length.to_string())],
        &header,
    );
    for (h, s) in rows {
        out.row(vec![
            num(*h),
            num(s.grand_mean_h),
            num(s.std_h),
            num(s.grand_mean_r2),
            num(s.ghe_mean),
            num(s.ghe_std),
        ]);
    }
    out
}

pub fn simulate(a: &SimulateArgs, g: &Globals) -> Result<(), CliError> {
    let run = Run::new("simulate", g.seed, g.out_dir, a)?;
    let length = default_length(a.process, a.length);
    let mut cfg = SimConfig::new(process(a.process, a.h, a.alpha, a.d)?, length, g.seed);
    cfg.slm_params = (a.slm_m, a.slm_big_m);
    if a.paths == 0 {
        return Err(CliError::Usage("--paths must be at least 1".into()));
    }
    if a.ensemble {
        let opts = EnsembleOptions {
            emd: emd_config(&a.emd)?,
            trim_fraction: a.trim_fraction,
            tau_max: a.tau_max,
        };
        let stats = monte_carlo_ensemble(&cfg, a.paths, &opts).map_err(generated)?;
        run.write(
            "ensemble.csv",
            table_out(&[(cfg.process.nominal_h(), stats)], a.paths, length),
        )?;
        return Ok(());
    }
    let sampler = cfg.sampler().map_err(generated)?;
    let paths: Vec<Vec<f64>> = (0..a.paths as u64)
        .into_par_iter()
        .map(|i| sampler.path(i).map(|p| p.into_values()))
        .collect::<Result<_, _>>()
        .map_err(generated)?;
    let mut header = vec!["t".to_string()];
    header.extend((0..a.paths).map(|i| format!("path_{i}")));
    let mut out = CsvOut::new("paths", &[("process", cfg.process.name().to_string())], &header);
    for t in 0..length {
        let mut row = vec![t.to_string()];
        row.extend(paths.iter().map(|p| num(p[t])));
        out.row(row);
    }
    run.write("simulate.csv", out)?;
    Ok(())
}

fn stop_label(r: StopReason) -> &'static str {
    match r {
        StopReason::Converged => "converged",
        StopReason::MaxIterations => "max-iterations",
        StopReason::InsufficientExtrema => "insufficient-extrema",
    }
}

pub fn decompose_cmd(a: &DecomposeArgs, g: &Globals) -> Result<(), CliError> {
    let mut run = Run::new("decompose", g.seed, g.out_dir, a)?;
    let input = read_input(&a.input)?;
    run.set_input(&input);
    let d = decompose(&input.series, &emd_config(&a.emd)?).map_err(core(&input))?;
    let join = |v: Vec<String>| v.join(" ");
    let notes = [
        ("n_imfs", d.n_imfs().to_string()),
        (
            "sift_counts",
            join(d.sift_counts.iter().map(|c| c.to_string()).collect()),
        ),
        (
            "stop_reasons",
            join(d.stop_reasons.iter().map(|r| stop_label(*r).to_string()).collect()),
        ),
    ];
    let mut header = vec!["t".to_string()];
    header.extend(numbered("imf", d.n_imfs()));
    header.push("residue".into());
    let mut out = CsvOut::new("imfs", &notes, &header);
    for t in 0..d.len() {
        let mut row = vec![t.to_string()];
        row.extend(d.imfs.iter().map(|c| num(c[t])));
        row.push(num(d.residue[t]));
        out.row(row);
    }
    run.write("decompose.csv", out)?;
    Ok(())
}

pub fn spectral(a: &SpectralArgs, g: &Globals) -> Result<(), CliError> {
    let mut run = Run::new("spectral", g.seed, g.out_dir, a)?;
    let input = read_input(&a.input)?;
    run.set_input(&input);
    let d = decompose(&input.series, &emd_config(&a.emd)?).map_err(core(&input))?;
    let track = spectral_track(&d, a.trim_fraction).map_err(core(&input))?;
    let n = track.n_imfs();
    let mut header = vec!["t".to_string()];
    header.extend(numbered("a", n));
    header.extend(numbered("omega", n));
    header.extend(numbered("tau", n));
    let dt = input.series.dt();
    let mut out = CsvOut::new(
        "spectral",
        &[("period_unit", "samples".into()), ("dt", num(dt))],
        &header,
    );
    for t in 0..track.len() {
        let mut row = vec![t.to_string()];
        row.extend(track.amplitudes.iter().map(|r| num(r[t])));
        row.extend(track.frequencies.iter().map(|r| num(r[t])));
        row.extend(track.periods.iter().map(|r| num(r[t])));
        out.row(row);
    }
    run.write("spectral.csv", out)?;
    Ok(())
}

pub fn scaling(a: &ScalingArgs, g: &Globals) -> Result<(), CliError> {
    let mut run = Run::new("scaling", g.seed, g.out_dir, a)?;
    let input = read_input(&a.input)?;
    run.set_input(&input);
    let d = decompose(&input.series, &emd_config(&a.emd)?).map_err(core(&input))?;
    let track = spectral_track(&d, a.trim_fraction).map_err(core(&input))?;
    let s = match a.rolling_window {
        Some(w) => rolling_scaling_exponent(&track, w),
        None => scaling_exponent(&track),
    }
    .map_err(core(&input))?;
    let header = ["t", "h_star", "r2", "points_used"].map(String::from);
    let mut out = CsvOut::new("scaling", &[], &header);
    for t in 0..s.len() {
        out.row(vec![
            t.to_string(),
            num(s.h_star[t]),
            num(s.r_squared[t]),
            s.points_used[t].to_string(),
        ]);
    }
    run.write("scaling.csv", out)?;

    let ghe = generalized_hurst_q1(&input.series, a.tau_max).map_err(core(&input))?;
    let header = ["n_imfs", "grand_mean", "grand_std", "mean_r2", "h_g", "h_g_r2"].map(String::from);
    let mut summary = CsvOut::new("scaling-summary", &[], &header);
    summary.row(vec![
        track.n_imfs().to_string(),
        num(s.grand_mean),
        num(s.grand_std),
        num(s.mean_r_squared()),
        num(ghe.h),
        num(ghe.r_squared),
    ]);
    run.write("scaling_summary.csv", summary)?;
    Ok(())
}

pub fn complexity_cmd(a: &ComplexityArgs, g: &Globals) -> Result<(), CliError> {
    let mut run = Run::new("complexity", g.seed, g.out_dir, a)?;
    let input = read_input(&a.input)?;
    run.set_input(&input);
    let d = decompose(&input.series, &emd_config(&a.emd)?).map_err(core(&input))?;
    let track = spectral_track(&d, a.trim_fraction).map_err(core(&input))?;
    let c = complexity(&track, weight(a.weight)).map_err(core(&input))?;
    let header = ["t", "c_star"].map(String::from);
    let mut out = CsvOut::new("complexity", &[("n_imfs", c.n_imfs.to_string())], &header);
    for (t, v) in c.c_star.iter().enumerate() {
        out.row(vec![t.to_string(), num(*v)]);
    }
    run.write("complexity.csv", out)?;
    Ok(())
}

pub fn intraday(a: &IntradayArgs, g: &Globals) -> Result<(), CliError> {
    let mut run = Run::new("intraday", g.seed, g.out_dir, a)?;
    let path = resolve_path(&a.file, &a.input)?;
    let input = read_prices(&path, &a.schema)?;
    run.set_input(&input);
    let calendar = input.calendar.as_ref().expect("price input has a calendar");
    let cfg = MeasureConfig {
        measure: match a.measure {
            MeasureKind::Hstar => Measure::HStar,
            MeasureKind::Cstar => Measure::CStar,
        },
        emd: emd_config(&a.emd)?,
        trim_fraction: a.trim_fraction,
        weight: weight(a.weight),
        rolling_window: a.rolling_window,
    };
    let track = measure_track(&input.series, &cfg).map_err(core(&input))?;
    let mut panel = panelize(&track, calendar).map_err(core(&input))?;
    if cfg.measure == Measure::HStar || a.cstar_band {
        let band = bm_reference_band(calendar.max_day_len(), calendar.days.len(), a.band_sims, g.seed, &cfg)
            .map_err(generated)?;
        panel = panel.with_band(&band).map_err(core(&input))?;
    }

    let notes: Vec<(&str, String)> = panel
        .lunch_break
        .map(|c| ("lunch_break_column", c.to_string()))
        .into_iter()
        .collect();
    let mut header = vec!["day".to_string()];
    header.extend((0..panel.n_columns()).map(|i| format!("i_{i}")));
    let mut out = CsvOut::new("intraday-panel", &notes, &header);
    for (row, day) in panel.matrix.iter().zip(&calendar.days) {
        let mut cells = vec![day.id.clone()];
        cells.extend(row.iter().map(|v| num(*v)));
        out.row(cells);
    }
    run.write("intraday_panel.csv", out)?;

    let header = ["index", "day_mean", "band_lo", "band_hi", "likelihood"].map(String::from);
    let mut profile = CsvOut::new("intraday-profile", &notes, &header);
    for i in 0..panel.n_columns() {
        profile.row(vec![
            i.to_string(),
            num(panel.day_mean[i]),
            num(panel.band_lo[i]),
            num(panel.band_hi[i]),
            num(panel.likelihood[i]),
        ]);
    }
    run.write("intraday_profile.csv", profile)?;
    Ok(())
}

/// Parses `start:stop:step` into an inclusive grid.
pub fn parse_grid(grid: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--h-grid expects start:stop:step, got '{grid}'"));
    let parts: Vec<f64> = grid
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if step.is_nan() || step <= 0.0 || stop < start || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

fn grid_process(kind: ProcessKind, h: f64) -> Result<Process, CliError> {
    Ok(match kind {
        ProcessKind::Bm => {
            if h != 0.5 {
                return Err(CliError::Usage(format!("bm has H = 0.5 only, grid contains {h}")));
            }
            Process::Bm
        }
        ProcessKind::Fbm => Process::Fbm { h },
        ProcessKind::Slm => Process::Slm { alpha: 1.0 / h },
        ProcessKind::Arfima => Process::Arfima { d: h - 0.5 },
    })
}

pub fn table(a: &TableArgs, g: &Globals) -> Result<(), CliError> {
    let run = Run::new("table", g.seed, g.out_dir, a)?;
    if a.paths == 0 {
        return Err(CliError::Usage("--paths must be at least 1".into()));
    }
    let length = default_length(a.process, a.length);
    let opts = EnsembleOptions {
        emd: emd_config(&a.emd)?,
        trim_fraction: a.trim_fraction,
        tau_max: a.tau_max,
    };
    let mut rows = Vec::new();
    for h in parse_grid(&a.h_grid)? {
        let mut cfg = SimConfig::new(grid_process(a.process, h)?, length, g.seed);
        cfg.slm_params = (a.slm_m, a.slm_big_m);
        rows.push((h, monte_carlo_ensemble(&cfg, a.paths, &opts).map_err(generated)?));
    }
    run.write("table.csv", table_out(&rows, a.paths, length))?;
    Ok(())
}
