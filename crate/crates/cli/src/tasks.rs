//! One function per task. Each returns the CSV table and a JSON summary for the sidecar.

use rayon::prelude::*;
use serde_json::{json, Value};

use kitaev_de::analysis::{comparative_scan, evaluate_point, ScanRow};
use kitaev_de::entropy::{block_de_series, global_entanglement_with_n};
use kitaev_de::majorana::{build_coupling, relative_singular_values};
use kitaev_de::table::{format_f64, Table};
use kitaev_de::topology::signed_crossings;
use kitaev_de::{
    fit_block_law, fit_volume_law, pure_state_de, trajectory, uniform_grid, winding_number, zero_modes, Channel,
    FitKind, Result, ScanSettings,
};

use crate::config::{Grid, RunConfig, Task};

pub struct Output {
    pub table: Table,
    pub result: Value,
}

pub fn run(cfg: &RunConfig) -> Result<Output> {
    match cfg.task {
        Task::Winding => winding(cfg),
        Task::Trajectory => trajectory_task(cfg),
        Task::Mzm => mzm(cfg),
        Task::DePure => de_pure(cfg),
        Task::DeBlock => de_block(cfg),
        Task::Ge => ge(cfg),
        Task::FitVolume => fit_volume(cfg),
        Task::FitBlock => fit_block(cfg),
        Task::Sweep => sweep(cfg),
        Task::CriticalScan | Task::Compare => scan(cfg),
    }
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn settings(cfg: &RunConfig) -> ScanSettings {
    ScanSettings {
        n_volume: cfg.n,
        block_sizes: cfg.block_sizes(),
        basis: cfg.basis,
        kernel_n: cfg.kernel_n,
        samples: cfg.samples,
        kappa: cfg.kappa,
    }
}

fn points(g: &Grid) -> Result<Vec<f64>> {
    uniform_grid(g.start, g.stop, g.step)
}

fn winding(cfg: &RunConfig) -> Result<Output> {
    let w = winding_number(&cfg.spec, cfg.samples)?;
    let mut table = Table::new(["nu", "nu_raw", "min_gap", "quantized"]);
    table.push(vec![format_f64(w.nu), format_f64(w.nu_raw), format_f64(w.min_gap), flag(w.quantized)]);
    Ok(Output { table, result: json!(w) })
}

fn trajectory_task(cfg: &RunConfig) -> Result<Output> {
    let points = trajectory(&cfg.spec, cfg.samples)?;
    let mut table = Table::new(["k", "hy", "hz", "gapless"]);
    for p in &points {
        table.push(vec![format_f64(p.k), format_f64(p.hy), format_f64(p.hz), flag(p.gapless)]);
    }
    Ok(Output { table, result: json!({ "points": points.len(), "signed_crossings": signed_crossings(&points) }) })
}

fn mzm(cfg: &RunConfig) -> Result<Output> {
    let nu = winding_number(&cfg.spec, cfg.samples)?;
    let pairs = zero_modes(&cfg.spec, cfg.n, cfg.tol)?;
    let rel = relative_singular_values(&build_coupling(&cfg.spec, cfg.n)?);
    let mut header = vec!["site".to_string()];
    for i in 1..=pairs.len() {
        header.push(format!("p_left_{i}"));
        header.push(format!("p_right_{i}"));
    }
    let mut table = Table::new(header);
    let probs: Vec<(Vec<f64>, Vec<f64>)> =
        pairs.iter().map(|p| (p.left.probability(), p.right.probability())).collect();
    for site in 0..cfg.n {
        let mut row = vec![(site + 1).to_string()];
        for (l, r) in &probs {
            row.push(format_f64(l[site]));
            row.push(format_f64(r[site]));
        }
        table.push(row);
    }
    let shown = (2 * pairs.len() + 2).min(rel.len());
    let modes: Vec<Value> = pairs
        .iter()
        .map(|p| {
            json!({
                "left_center": p.left.center() + 1.0,
                "right_center": p.right.center() + 1.0,
                "left_residual": p.left.singular_value,
                "right_residual": p.right.singular_value,
            })
        })
        .collect();
    Ok(Output {
        table,
        result: json!({
            "pairs": pairs.len(),
            "nu": nu.nu,
            "smallest_relative_singular_values": &rel[..shown],
            "modes": modes,
        }),
    })
}

fn de_pure(cfg: &RunConfig) -> Result<Output> {
    let s = pure_state_de(&cfg.spec, cfg.n)?.value;
    let mut table = Table::new(["N", "S", "s"]);
    table.push(vec![cfg.n.to_string(), format_f64(s), format_f64(s / cfg.n as f64)]);
    Ok(Output { table, result: json!({ "S": s, "s": s / cfg.n as f64 }) })
}

fn de_block(cfg: &RunConfig) -> Result<Output> {
    let series = block_de_series(&cfg.spec, &cfg.block_sizes(), cfg.basis, cfg.kernel_n)?;
    let mut table = Table::new(["L", "S"]);
    for &(l, s) in &series {
        table.push(vec![l.to_string(), format_f64(s)]);
    }
    Ok(Output { table, result: json!({ "basis": cfg.basis }) })
}

fn ge(cfg: &RunConfig) -> Result<Output> {
    let e = global_entanglement_with_n(&cfg.spec, cfg.kernel_n)?;
    let mut table = Table::new(["E"]);
    table.push_f64(&[e]);
    Ok(Output { table, result: json!({ "E": e }) })
}

fn fit_volume(cfg: &RunConfig) -> Result<Output> {
    let pts = cfg
        .sizes
        .par_iter()
        .map(|&n| Ok((n as f64, pure_state_de(&cfg.spec, n)?.value)))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_volume_law(&pts)?;
    let FitKind::Volume { s } = fit.kind else { unreachable!("volume fit") };
    let mut table = Table::new(["N", "S", "S_fit"]);
    for &(n, v) in &pts {
        table.push(vec![(n as usize).to_string(), format_f64(v), format_f64(fit.predict(n))]);
    }
    Ok(Output {
        table,
        result: json!({ "s": s, "residual_rms": fit.residual_rms, "relative_residual": fit.relative_residual() }),
    })
}

fn fit_block(cfg: &RunConfig) -> Result<Output> {
    let series = block_de_series(&cfg.spec, &cfg.block_sizes(), cfg.basis, cfg.kernel_n)?;
    let pts: Vec<(f64, f64)> = series.iter().map(|&(l, v)| (l as f64, v)).collect();
    let fit = fit_block_law(&pts)?;
    let FitKind::Block { a, b, c } = fit.kind else { unreachable!("block fit") };
    let mut table = Table::new(["L", "S", "S_fit"]);
    for &(l, v) in &series {
        table.push(vec![l.to_string(), format_f64(v), format_f64(fit.predict(l as f64))]);
    }
    Ok(Output {
        table,
        result: json!({ "a": a, "b": b, "c": c, "residual_rms": fit.residual_rms, "basis": cfg.basis }),
    })
}

fn channel_cell(row: &ScanRow, ch: Channel) -> String {
    match ch {
        Channel::Nu => row.nu.map(format_f64).unwrap_or_default(),
        _ => format_f64(row.get(ch)),
    }
}

fn sweep(cfg: &RunConfig) -> Result<Output> {
    let gx = cfg.grid.as_ref().expect("validated");
    let xs = points(gx)?;
    let ys = match &cfg.y_grid {
        Some(g) => points(g)?,
        None => vec![f64::NAN],
    };
    let channels = cfg.channel_list();
    let settings = settings(cfg);
    let cells: Vec<(f64, f64)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    // rows come back in grid order whatever the scheduling
    let rows: Vec<ScanRow> = cells
        .par_iter()
        .map(|&(x, y)| {
            let mut spec = cfg.spec.with_param(gx.param, x);
            if let Some(g) = &cfg.y_grid {
                spec = spec.with_param(g.param, y);
            }
            evaluate_point(&spec, x, &channels, &settings)
        })
        .collect();
    let mut header = vec![gx.param.name().to_string()];
    if let Some(g) = &cfg.y_grid {
        header.push(g.param.name().to_string());
    }
    header.extend(channels.iter().map(|c| c.name().to_string()));
    let mut table = Table::new(header);
    let mut failed = 0usize;
    for (row, &(_, y)) in rows.iter().zip(&cells) {
        let mut out = vec![format_f64(row.x)];
        if cfg.y_grid.is_some() {
            out.push(format_f64(y));
        }
        for &ch in &channels {
            let cell = channel_cell(row, ch);
            failed += cell.is_empty() as usize;
            out.push(cell);
        }
        table.push(out);
    }
    Ok(Output { table, result: json!({ "cells": rows.len(), "empty_cells": failed }) })
}

fn scan(cfg: &RunConfig) -> Result<Output> {
    let g = cfg.grid.as_ref().expect("validated");
    let grid = points(g)?;
    let channels = cfg.channel_list();
    let t = comparative_scan(&cfg.spec, g.param, &grid, &channels, &settings(cfg))?;
    let mut header = vec![g.param.name().to_string()];
    let single = cfg.task == Task::CriticalScan;
    for &ch in &channels {
        header.push(ch.name().to_string());
        if ch != Channel::Nu {
            header.push(format!("chi_{}", ch.name()));
            header.push(if single { "flagged".to_string() } else { format!("flagged_{}", ch.name()) });
        }
    }
    let mut table = Table::new(header);
    let chis: Vec<Vec<Option<f64>>> = t.curves.iter().map(|(_, c)| c.aligned()).collect();
    for (i, row) in t.rows.iter().enumerate() {
        let mut out = vec![format_f64(row.x)];
        let mut k = 0;
        for &ch in &channels {
            out.push(channel_cell(row, ch));
            if ch != Channel::Nu {
                out.push(chis[k][i].map(format_f64).unwrap_or_default());
                out.push(flag(t.reports[k].1.is_flagged(row.x)));
                k += 1;
            }
        }
        table.push(out);
    }
    let reports: Vec<Value> = t
        .reports
        .iter()
        .map(|(ch, r)| {
            json!({
                "channel": ch.name(),
                "threshold": r.threshold,
                "flags": r.flags,
                "clusters": r.clusters(),
            })
        })
        .collect();
    Ok(Output { table, result: json!({ "reports": reports, "nu_changes": t.nu_changes }) })
}
