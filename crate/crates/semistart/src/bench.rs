//! Parallel drivers for the difficulty and exact-MISE tables.

use rayon::prelude::*;
use semistart_core::exact_mise::mise_report;
use semistart_core::{marron_wand, MiseReport};

use crate::io::Table;
use crate::{CliError, Result};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "SEMISTART_THREADS";

pub const AMISE_HEADER: [&str; 5] = ["case", "rho_trad", "rho_new", "rho1_trad", "rho1_new"];
pub const MISE_HEADER: [&str; 7] = ["case", "n", "h_new", "mise_new", "h_trad", "mise_trad", "ratio"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmiseRow {
    pub case: usize,
    pub rho_trad: f64,
    pub rho_new: f64,
    pub rho1_trad: f64,
    pub rho1_new: f64,
}

fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs `f` on a pool sized by `SEMISTART_THREADS` (all cores when unset).
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(pool.install(f))
}

fn check_cases(cases: &[usize]) -> Result<()> {
    for &c in cases {
        marron_wand(c)?;
    }
    Ok(())
}

pub fn amise_rows(cases: &[usize]) -> Result<Vec<AmiseRow>> {
    check_cases(cases)?;
    let rows = with_pool(|| {
        cases
            .par_iter()
            .map(|&case| {
                let m = marron_wand(case)?;
                let r = m.roughness();
                let l = m.l1_measures()?;
                Ok(AmiseRow {
                    case,
                    rho_trad: r.rho_trad,
                    rho_new: r.rho_new,
                    rho1_trad: l.rho1_trad,
                    rho1_new: l.rho1_new,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(rows)
}

/// One report per (case, n), cases outermost, in the order given.
pub fn mise_rows(cases: &[usize], ns: &[usize]) -> Result<Vec<MiseReport>> {
    check_cases(cases)?;
    if let Some(&n) = ns.iter().find(|&&n| n < 2) {
        return Err(CliError::Usage(format!("sample sizes must be at least 2, got {n}")));
    }
    let jobs: Vec<(usize, usize)> = cases.iter().flat_map(|&c| ns.iter().map(move |&n| (c, n))).collect();
    let rows = with_pool(|| {
        jobs.par_iter()
            .map(|&(case, n)| Ok(mise_report(&marron_wand(case)?, case, n)?))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(rows)
}

pub fn amise_table(rows: &[AmiseRow]) -> Table {
    let mut t = Table::new(&AMISE_HEADER);
    for r in rows {
        t.push(vec![Some(r.case as f64), Some(r.rho_trad), Some(r.rho_new), Some(r.rho1_trad), Some(r.rho1_new)]);
    }
    t
}

pub fn mise_table(rows: &[MiseReport]) -> Table {
    let mut t = Table::new(&MISE_HEADER);
    for r in rows {
        t.push(vec![
            Some(r.case_id as f64),
            Some(r.n as f64),
            Some(r.h_star_new),
            Some(r.mise_star_new),
            Some(r.h_star_trad),
            Some(r.mise_star_trad),
            Some(r.ratio),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_follow_request_order() {
        let rows = mise_rows(&[2, 1], &[100, 25]).unwrap();
        let order: Vec<(usize, usize)> = rows.iter().map(|r| (r.case_id, r.n)).collect();
        assert_eq!(order, vec![(2, 100), (2, 25), (1, 100), (1, 25)]);
        assert!(matches!(mise_rows(&[16], &[10]), Err(CliError::Core(_))));
    }

    #[test]
    fn normal_case_has_zero_new_roughness() {
        let rows = amise_rows(&[1]).unwrap();
        assert_eq!(rows[0].rho_new, 0.0);
        assert!((rows[0].rho_trad - 0.7330).abs() < 5e-5);
    }
}
