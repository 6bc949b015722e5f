//! One table per analysis route, evaluated on the scenario's time grid.

use dcesim::detuning::{growth_threshold, numeric_eigenvalues, DetuningParams};
use dcesim::fock::{build_heff, FockPropagator, TwoModeState};
use dcesim::lindblad::{
    propagate_master_numeric, rho_l_approx, select_cutoff, squeezed_number_expectation,
    MasterCoefficients, MasterOptions, TruncatedDensity, DEFAULT_TAIL, POSITIVITY_FLOOR,
};
use dcesim::par::{map_points, Execution};
use dcesim::propagator::{multi_mode_response, n_left_full, n_right_full};
use dcesim::response::{n_left_quadratic, n_right_quadratic};

use crate::config::{Method, Numerics, Resolved};
use crate::table::{Cell, Table};

/// Imaginary residue above which an exact occupation is flagged.
pub const RESIDUE_LIMIT: f64 = 1e-10;
/// Growth rates below `GROWTH_FLOOR·ξ` count as no growth.
pub const GROWTH_FLOOR: f64 = 1e-9;
/// Population allowed in the two highest retained Fock levels.
const LEAK_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct MethodResult {
    pub method: Method,
    pub table: Table,
    /// Failure that invalidated every row.
    pub error: Option<String>,
}

impl MethodResult {
    pub fn invalid_rows(&self) -> usize {
        let Some(k) = self.table.column("valid") else {
            return 0;
        };
        self.table.rows.iter().filter(|r| r[k] != Cell::Bool(true)).count()
    }
}

/// `(n_L, n_R, valid)` at one natural-units time.
type Sample = (Option<f64>, Option<f64>, bool);

fn pair_table(r: &Resolved, samples: Vec<Sample>, with_right: bool) -> Table {
    let mut t = if with_right {
        Table::new(vec!["t", "n_l", "n_r", "valid"])
    } else {
        Table::new(vec!["t", "n_l", "valid"])
    };
    for (&(t_file, _), (nl, nr, ok)) in r.times.iter().zip(samples) {
        let mut row = vec![Cell::Num(t_file), nl.into()];
        if with_right {
            row.push(nr.into());
        }
        row.push(ok.into());
        t.push(row);
    }
    t
}

fn failed(r: &Resolved, method: Method, with_right: bool, msg: String) -> MethodResult {
    let samples = r.times.iter().map(|_| (None, None, false)).collect();
    MethodResult {
        method,
        table: pair_table(r, samples, with_right),
        error: Some(msg),
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn quadratic(r: &Resolved, exec: Execution) -> MethodResult {
    let chi = r.chi_eff();
    let samples = map_points(&r.times, exec, |&(_, t)| {
        match (
            n_left_quadratic(r.xi, chi, t, r.n_l0, r.n_r0),
            n_right_quadratic(r.xi, chi, t, r.n_l0, r.n_r0),
        ) {
            (Ok(l), Ok(rr)) => (finite(l.value), finite(rr.value), l.valid && rr.valid),
            _ => (None, None, false),
        }
    });
    let error = (r.xi <= 0.0).then(|| "the quadratic response needs xi > 0".to_owned());
    MethodResult {
        method: Method::Quadratic,
        table: pair_table(r, samples, true),
        error,
    }
}

fn propagator(r: &Resolved, exec: Execution) -> MethodResult {
    let samples = if r.chis.len() == 1 {
        let chi = r.chis[0];
        map_points(&r.times, exec, |&(_, t)| {
            match (
                n_left_full(r.xi, chi, t, r.n_l0, r.n_r0),
                n_right_full(r.xi, chi, t, r.n_l0, r.n_r0),
            ) {
                (Ok(l), Ok(rr)) => {
                    let ok = l.value.is_finite() && rr.value.is_finite() && l.imag_residue < RESIDUE_LIMIT;
                    (finite(l.value), finite(rr.value), ok)
                }
                _ => (None, None, false),
            }
        })
    } else {
        let mut occ = vec![r.n_l0];
        occ.extend(r.chis.iter().map(|_| r.n_r0));
        map_points(&r.times, exec, |&(_, t)| match multi_mode_response(r.xi, &r.chis, t, &occ) {
            Ok(v) => {
                let right: f64 = v[1..].iter().sum();
                let ok = v.iter().all(|x| x.is_finite());
                (finite(v[0]), finite(right), ok)
            }
            Err(_) => (None, None, false),
        })
    };
    MethodResult {
        method: Method::Propagator,
        table: pair_table(r, samples, true),
        error: None,
    }
}

fn master_setup(r: &Resolved, num: &Numerics) -> Result<(TruncatedDensity, MasterCoefficients), String> {
    let t_end = r.times.last().map_or(0.0, |p| p.1);
    let cutoff = match num.master_cutoff {
        Some(c) => c,
        None => {
            let c = select_cutoff(r.n_l0, r.xi, t_end, DEFAULT_TAIL);
            if c > num.master_cutoff_cap {
                return Err(format!(
                    "needs a Fock cutoff of {c}, above numerics.master_cutoff_cap = {}",
                    num.master_cutoff_cap
                ));
            }
            c
        }
    };
    let rho0 = TruncatedDensity::thermal_with_tail(r.n_l0, cutoff, DEFAULT_TAIL).map_err(|e| e.to_string())?;
    let mc = MasterCoefficients::new(r.xi, r.chi_eff(), r.n_r0).map_err(|e| e.to_string())?;
    Ok((rho0, mc))
}

fn master_analytic(r: &Resolved, num: &Numerics, exec: Execution) -> MethodResult {
    let (rho0, mc) = match master_setup(r, num) {
        Ok(s) => s,
        Err(msg) => return failed(r, Method::MasterAnalytic, false, msg),
    };
    let samples = map_points(&r.times, exec, |&(_, t)| {
        let rho = rho_l_approx(&rho0, &mc, t);
        let n = squeezed_number_expectation(&rho, r.xi, t);
        let ok = rho.min_eigenvalue() >= POSITIVITY_FLOOR && rho.top_population() <= LEAK_LIMIT;
        (finite(n), None, ok && n.is_finite())
    });
    MethodResult {
        method: Method::MasterAnalytic,
        table: pair_table(r, samples, false),
        error: None,
    }
}

fn master_numeric(r: &Resolved, num: &Numerics, exec: Execution) -> MethodResult {
    let (rho0, mc) = match master_setup(r, num) {
        Ok(s) => s,
        Err(msg) => return failed(r, Method::MasterNumeric, false, msg),
    };
    let opts = MasterOptions::default();
    let samples = map_points(&r.times, exec, |&(_, t)| {
        match propagate_master_numeric(&rho0, &mc, t, &opts) {
            Ok(run) => {
                let n = squeezed_number_expectation(&run.rho, r.xi, t);
                let ok = run.valid() && run.rho.top_population() <= LEAK_LIMIT && n.is_finite();
                (finite(n), None, ok)
            }
            Err(_) => (None, None, false),
        }
    });
    MethodResult {
        method: Method::MasterNumeric,
        table: pair_table(r, samples, false),
        error: None,
    }
}

fn fock_oracle(r: &Resolved, num: &Numerics, exec: Execution) -> MethodResult {
    let [cl, cr] = num.fock_cutoffs;
    let setup = build_heff(r.xi, r.chi_eff(), cl, cr)
        .and_then(|h| Ok((FockPropagator::new(&h), TwoModeState::thermal(r.n_l0, r.n_r0, cl, cr)?)));
    let (prop, rho0) = match setup {
        Ok(s) => s,
        Err(e) => return failed(r, Method::FockOracle, true, e.to_string()),
    };
    let samples = map_points(&r.times, exec, |&(_, t)| match prop.expectations(&rho0, t) {
        Ok((nl, nr)) => (Some(nl), Some(nr), true),
        Err(_) => (None, None, false),
    });
    MethodResult {
        method: Method::FockOracle,
        table: pair_table(r, samples, true),
        error: None,
    }
}

pub fn detuning_columns() -> Vec<&'static str> {
    vec![
        "delta",
        "delta_big",
        "lambda1_re",
        "lambda1_im",
        "lambda2_re",
        "lambda2_im",
        "lambda3_re",
        "lambda3_im",
        "lambda4_re",
        "lambda4_im",
        "max_growth_rate",
        "grows",
        "delta_c",
        "analytic_bound",
        "ideal",
        "valid",
        "note",
    ]
}

/// One row of spectral and threshold data for the given detunings.
pub fn detuning_row(xi: f64, chi: f64, omega_l: f64, delta: f64, delta_big: f64) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![delta.into(), delta_big.into()];
    let p = match DetuningParams::new(delta, delta_big, omega_l) {
        Ok(p) => p,
        Err(e) => {
            row.extend(std::iter::repeat_n(Cell::Empty, 13));
            row.push(false.into());
            row.push(Cell::Text(e.to_string()));
            return row;
        }
    };
    // The closed-form roots cancel badly once ξ ≪ Ω_L·Δ, so report the Schur ones.
    let (rate, rate_ok) = match numeric_eigenvalues(xi, chi, &p) {
        Ok(ev) => {
            for z in &ev {
                row.push(z.re.into());
                row.push(z.im.into());
            }
            (ev.iter().map(|z| z.re).reduce(f64::max), true)
        }
        Err(_) => {
            row.extend(std::iter::repeat_n(Cell::Empty, 8));
            (None, false)
        }
    };
    row.push(rate.into());
    row.push(rate.map_or(Cell::Empty, |g| Cell::Bool(g > GROWTH_FLOOR * xi)));
    let mut note = String::new();
    match growth_threshold(xi, chi, omega_l, delta_big) {
        Ok(th) => {
            row.push(th.delta_c.into());
            row.push(th.analytic_bound.into());
            row.push(th.ideal.into());
        }
        Err(e) => {
            row.extend([Cell::Empty, Cell::Empty, Cell::Empty]);
            note = e.to_string();
        }
    }
    row.push(rate_ok.into());
    row.push(Cell::Text(note));
    row
}

fn detuning(r: &Resolved) -> MethodResult {
    let mut table = Table::new(detuning_columns());
    let Some(omega_l) = r.omega_l else {
        return MethodResult {
            method: Method::Detuning,
            table,
            error: Some("omega_l is unknown".into()),
        };
    };
    table.push(detuning_row(r.xi, r.chi_eff(), omega_l, r.delta, r.delta_big));
    MethodResult {
        method: Method::Detuning,
        table,
        error: None,
    }
}

pub fn run_method(method: Method, r: &Resolved, num: &Numerics, exec: Execution) -> MethodResult {
    match method {
        Method::Quadratic => quadratic(r, exec),
        Method::MasterAnalytic => master_analytic(r, num, exec),
        Method::MasterNumeric => master_numeric(r, num, exec),
        Method::Propagator => propagator(r, exec),
        Method::FockOracle => fock_oracle(r, num, exec),
        Method::Detuning => detuning(r),
    }
}
