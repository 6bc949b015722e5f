//! Parameter sweeps: one scenario per grid point, flattened into a long table.

use dcesim::par::{map_points, Execution};

use crate::config::{axis_name, resolve, Axis, Config, Method, SweepMode, Temperature, TimeGrid};
use crate::error::CliError;
use crate::methods::{detuning_row, run_method, GROWTH_FLOOR};
use crate::table::{Cell, Table};

const AXES: [Axis; 6] = [Axis::Epsilon, Axis::Gamma, Axis::T, Axis::Beta, Axis::Delta, Axis::DeltaBig];

pub fn columns() -> Vec<&'static str> {
    let mut c = vec!["point"];
    c.extend(AXES.iter().map(|&a| axis_name(a)));
    c.extend([
        "xi",
        "chi",
        "eta",
        "method",
        "n_l",
        "n_r",
        "growth_rate",
        "grows",
        "valid",
        "error",
    ]);
    c
}

/// Grid points as `(axis, value)` lists in axis order.
pub fn points(cfg: &Config) -> Result<Vec<Vec<(Axis, f64)>>, CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Validation("sweep: section required".into()))?;
    let axes: Vec<(Axis, Vec<f64>)> = sweep.axes.iter().map(|(a, r)| (*a, r.values())).collect();
    let count = match sweep.mode {
        SweepMode::Cartesian => axes
            .iter()
            .try_fold(1usize, |n, (_, v)| n.checked_mul(v.len()))
            .unwrap_or(usize::MAX),
        SweepMode::Zip => {
            let n = axes[0].1.len();
            if let Some((a, _)) = axes.iter().find(|(_, v)| v.len() != n) {
                return Err(CliError::Validation(format!(
                    "sweep.axes.{}: zip mode needs equal lengths, expected {n}",
                    axis_name(*a)
                )));
            }
            n
        }
    };
    if count > sweep.cap {
        return Err(CliError::Validation(format!(
            "sweep.cap: {count} points exceed the cap of {}",
            sweep.cap
        )));
    }
    let pts = match sweep.mode {
        SweepMode::Zip => (0..count)
            .map(|i| axes.iter().map(|(a, v)| (*a, v[i])).collect())
            .collect(),
        SweepMode::Cartesian => {
            let mut pts: Vec<Vec<(Axis, f64)>> = vec![vec![]];
            for (a, vals) in &axes {
                pts = pts
                    .into_iter()
                    .flat_map(|p| {
                        vals.iter().map(move |&v| {
                            let mut q = p.clone();
                            q.push((*a, v));
                            q
                        })
                    })
                    .collect();
            }
            pts
        }
    };
    Ok(pts)
}

/// The scenario at one grid point.
pub fn apply(cfg: &Config, point: &[(Axis, f64)]) -> Config {
    let mut c = cfg.clone();
    c.sweep = None;
    c.threshold = None;
    for &(axis, v) in point {
        match axis {
            Axis::Epsilon => c.drive.as_mut().expect("validated").epsilon = v,
            Axis::Gamma => c.geometry.as_mut().expect("validated").gamma = v,
            Axis::T => {
                c.time = TimeGrid {
                    start: v,
                    end: v,
                    samples: 1,
                }
            }
            Axis::Beta => {
                c.temperature = Temperature {
                    beta: Some(v),
                    ..Temperature::default()
                }
            }
            Axis::Delta => match c.drive.as_mut() {
                Some(d) => d.delta = v,
                None => c.detuning.get_or_insert_with(Default::default).delta = Some(v),
            },
            Axis::DeltaBig => c.detuning.get_or_insert_with(Default::default).delta_big = Some(v),
        }
    }
    c
}

fn point_rows(cfg: &Config, index: usize, point: &[(Axis, f64)]) -> Vec<Vec<Cell>> {
    let mut head = vec![Cell::Int(index as u64)];
    for a in AXES {
        let v = point.iter().find(|(b, _)| *b == a).map(|p| p.1);
        head.push(v.into());
    }
    let c = apply(cfg, point);
    let resolved = c.validate().and_then(|_| resolve(&c));
    let r = match resolved {
        Ok(r) => r,
        Err(e) => {
            let mut row = head;
            row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
            row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
            row.push(false.into());
            row.push(Cell::Text(e.to_string()));
            return vec![row];
        }
    };
    head.extend([Cell::Num(r.xi), Cell::Num(r.chi_eff()), r.eta.into()]);
    let mut rows = Vec::new();
    for &m in &c.methods {
        if m == Method::Detuning {
            let d = detuning_row(r.xi, r.chi_eff(), r.omega_l.expect("validated"), r.delta, r.delta_big);
            let rate = d[10].clone();
            let grows = match rate {
                Cell::Num(g) => Cell::Bool(g > GROWTH_FLOOR * r.xi),
                _ => Cell::Empty,
            };
            let mut row = head.clone();
            row.extend([Cell::from(m.name()), Cell::Empty, Cell::Empty, rate, grows]);
            row.push(d[15].clone());
            row.push(Cell::Text(String::new()));
            rows.push(row);
            continue;
        }
        // Sweeps already run in parallel over points.
        let res = run_method(m, &r, &c.numerics, Execution::Sequential);
        let (kl, kv) = (res.table.column("n_l").unwrap(), res.table.column("valid").unwrap());
        let kr = res.table.column("n_r");
        for trow in &res.table.rows {
            let mut row = head.clone();
            row[3] = trow[0].clone();
            row.push(Cell::from(m.name()));
            row.push(trow[kl].clone());
            row.push(kr.map_or(Cell::Empty, |k| trow[k].clone()));
            row.extend([Cell::Empty, Cell::Empty]);
            row.push(trow[kv].clone());
            row.push(Cell::Text(res.error.clone().unwrap_or_default()));
            rows.push(row);
        }
    }
    rows
}

pub fn run(cfg: &Config, exec: Execution) -> Result<Table, CliError> {
    let pts = points(cfg)?;
    let indexed: Vec<(usize, Vec<(Axis, f64)>)> = pts.into_iter().enumerate().collect();
    let chunks = map_points(&indexed, exec, |(i, p)| point_rows(cfg, *i, p));
    let mut table = Table::new(columns());
    for row in chunks.into_iter().flatten() {
        table.push(row);
    }
    Ok(table)
}
