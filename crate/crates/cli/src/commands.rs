use std::io::Write;
use std::time::Instant;

use gpress::sft::{fits, safe_symbol_check, ssf_check, SsfOutcome};
use gpress::transfer::{box_log_partition, strip_sequence};
use gpress::{gk_pressure, Budget, Interaction, Symbol};

use crate::output::*;
use crate::{select, Cli, CliError, Command, OracleMode};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let budget = Budget::new(cli.budget.unwrap_or(Budget::DEFAULT_LIMIT));
    let text = match &cli.command {
        Command::Check { model } => json(&check(&select::interaction(model)?))?,
        Command::Pressure { model, nu, n } => {
            let phi = select::interaction(model)?;
            let z = select::point(nu, &phi)?;
            let est = gk_pressure(&z, *n, &phi, budget)?;
            json(&PressureDoc {
                model: est.model,
                nu: nu.clone(),
                n: est.n,
                per_site: est
                    .per_site
                    .iter()
                    .map(|s| SiteDoc {
                        site: [s.site.x, s.site.y],
                        p_lower: F17(s.p.lower),
                        p_upper: F17(s.p.upper),
                        edge_term: F17(s.edge_term),
                    })
                    .collect(),
                pressure_lower: F17(est.lower),
                pressure_upper: F17(est.upper),
                canopy_count: est.canopy_count,
                skipped_count: est.skipped_count,
                wall_time_ms: F17(est.wall_time_ms),
                convention: convention(&model.model),
            })?
        }
        Command::Oracle { model, mode, width } => {
            let phi = select::interaction(model)?;
            json(&oracle(&phi, *mode, *width as usize, budget, convention(&model.model))?)?
        }
        Command::Study {
            model,
            nu,
            n_min,
            n_max,
        } => {
            if n_min > n_max {
                return Err(CliError::Usage(format!("empty radius range {n_min}..={n_max}")));
            }
            let phi = select::interaction(model)?;
            let z = select::point(nu, &phi)?;
            study(&z, &phi, *n_min..=*n_max, budget)?
        }
    };
    emit(cli, &text)
}

fn json<T: serde::Serialize>(doc: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(doc).map_err(gpress::Error::from)?;
    s.push('\n');
    Ok(s)
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn convention(model: &str) -> Option<String> {
    (model == "hardsquare").then(|| {
        "activity folded into edges: each edge endpoint carrying 1 adds -ln(lambda)/4 to the edge energy".to_string()
    })
}

fn check(phi: &Interaction) -> CheckDoc {
    let q = phi.q();
    let mut witness_count = 0;
    for code in 0..q.pow(4) {
        let mut eta = [0 as Symbol; 4];
        let mut c = code;
        for slot in eta.iter_mut().rev() {
            *slot = (c % q) as Symbol;
            c /= q;
        }
        if phi.symbols().any(|a| fits(phi, eta, a)) {
            witness_count += 1;
        }
    }
    let (ssf, counterexample) = match ssf_check(phi) {
        SsfOutcome::Fillable(_) => (true, None),
        SsfOutcome::Counterexample(eta) => (false, Some(eta)),
    };
    CheckDoc {
        model: phi.name().to_string(),
        ssf,
        safe_symbol: safe_symbol_check(phi),
        witness_count,
        counterexample,
    }
}

fn oracle(
    phi: &Interaction,
    mode: OracleMode,
    width: usize,
    budget: Budget,
    convention: Option<String>,
) -> Result<OracleDoc, CliError> {
    Ok(match mode {
        OracleMode::Strip => {
            let seq = strip_sequence(width, phi, budget)?;
            let per_site: Vec<f64> = seq.estimates.iter().map(|e| e.per_site()).collect();
            OracleDoc::Strip {
                model: phi.name().to_string(),
                width,
                estimates: seq
                    .estimates
                    .iter()
                    .map(|e| StripEntry {
                        width: e.width,
                        per_site_lower: F17(e.per_site_lower),
                        per_site_upper: F17(e.per_site_upper),
                        log_lambda_lower: F17(e.log_lambda_lower),
                        log_lambda_upper: F17(e.log_lambda_upper),
                        states: e.states,
                        iterations: e.iterations,
                        converged: e.converged,
                    })
                    .collect(),
                increments: seq
                    .increments
                    .iter()
                    .map(|&(w, lo, hi)| IncrementEntry {
                        width: w,
                        lower: F17(lo),
                        upper: F17(hi),
                    })
                    .collect(),
                extrapolated: seq.extrapolated().map(F17),
                trend: trend(&per_site),
                convention,
            }
        }
        OracleMode::Box => OracleDoc::Box {
            model: phi.name().to_string(),
            size: width,
            values: (1..=width)
                .map(|m| {
                    Ok(BoxEntry {
                        size: m,
                        per_site: F17(box_log_partition(m, phi, budget)?),
                    })
                })
                .collect::<Result<_, CliError>>()?,
            convention,
        },
    })
}

/// CSV rows `n,status,lower,upper,width,time_ms`. Fails only when no radius
/// succeeded, with the first radius's error.
fn study(
    z: &gpress::PeriodicPoint,
    phi: &Interaction,
    radii: std::ops::RangeInclusive<u32>,
    budget: Budget,
) -> Result<String, CliError> {
    let rows: Vec<(u32, Result<gpress::Interval, gpress::Error>, f64)> = radii
        .map(|n| {
            let start = Instant::now();
            let result = gk_pressure(z, n, phi, budget).map(|e| e.interval());
            (n, result, start.elapsed().as_secs_f64() * 1e3)
        })
        .collect();
    if rows.iter().all(|(_, r, _)| r.is_err()) {
        let (_, first, _) = rows.into_iter().next().expect("nonempty range");
        return Err(first.unwrap_err().into());
    }
    let io = |e: csv::Error| CliError::Core(gpress::Error::Io(e.into()));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "status", "lower", "upper", "width", "time_ms"]).map_err(io)?;
    for (n, result, time_ms) in &rows {
        let record = match result {
            Ok(i) => [n.to_string(), "ok".into(), f17(i.lower), f17(i.upper), f17(i.width()), f17(*time_ms)],
            Err(e) => [n.to_string(), e.to_string(), String::new(), String::new(), String::new(), f17(*time_ms)],
        };
        w.write_record(&record).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Core(gpress::Error::Io(e.into_error())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
