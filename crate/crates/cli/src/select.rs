//! Model and periodic-point selectors.

use std::path::PathBuf;

use gpress::sft::{diagonal_3coloring_point, periodic_point_from_ssf};
use gpress::{Interaction, PeriodicPoint};

use crate::{CliError, ModelArgs};

fn reject(model: &str, given: &[(&str, bool)], allowed: &str) -> Result<(), CliError> {
    for (flag, present) in given {
        if *present && *flag != allowed {
            return Err(CliError::Usage(format!("{flag} does not apply to model {model}")));
        }
    }
    Ok(())
}

pub fn interaction(args: &ModelArgs) -> Result<Interaction, CliError> {
    let given = [
        ("--lambda", args.lambda.is_some()),
        ("-k", args.k.is_some()),
        ("--beta", args.beta.is_some()),
        ("-q", args.q.is_some()),
    ];
    let name = args.model.as_str();
    let phi = match name {
        "hardsquare" => {
            reject(name, &given, "--lambda")?;
            Interaction::hard_square(args.lambda.unwrap_or(1.0))?
        }
        "checkerboard" => {
            reject(name, &given, "-k")?;
            Interaction::checkerboard(args.k.unwrap_or(3))?
        }
        "ising" => {
            reject(name, &given, "--beta")?;
            Interaction::ising(args.beta.unwrap_or(0.0))?
        }
        "fullshift" => {
            reject(name, &given, "-q")?;
            Interaction::full_shift(args.q.unwrap_or(2))?
        }
        other => match other.strip_prefix("file:") {
            Some(path) => {
                reject(name, &given, "")?;
                Interaction::from_json_file(PathBuf::from(path)).map_err(file_error)?
            }
            None => {
                return Err(CliError::Usage(format!(
                    "unknown model {other:?}; expected hardsquare, checkerboard, ising, fullshift or file:PATH"
                )))
            }
        },
    };
    Ok(phi)
}

/// Unreadable or malformed input files are usage errors.
fn file_error(e: gpress::Error) -> CliError {
    match e {
        gpress::Error::Io(_) | gpress::Error::Json(_) | gpress::Error::InvalidInteraction(_) => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Core(other),
    }
}

pub fn point(nu: &str, phi: &Interaction) -> Result<PeriodicPoint, CliError> {
    match nu {
        "zeros" => Ok(PeriodicPoint::constant(phi, 0)?),
        "parity" => Ok(periodic_point_from_ssf(phi, 1)?),
        "diag3" => {
            if phi.q() < 3 {
                return Err(CliError::Usage("diag3 needs at least 3 symbols".into()));
            }
            let z = diagonal_3coloring_point();
            let cell = z.orbit_sites().iter().map(|s| z.at(*s)).collect();
            Ok(PeriodicPoint::new(z.periods(), cell, phi)?)
        }
        other => match other.strip_prefix("file:") {
            Some(path) => PeriodicPoint::from_json_file(path, phi).map_err(|e| match e {
                gpress::Error::InvalidPoint(_) => CliError::Usage(e.to_string()),
                other => file_error(other),
            }),
            None => Err(CliError::Usage(format!(
                "unknown point {other:?}; expected zeros, parity, diag3 or file:PATH"
            ))),
        },
    }
}
