//! Parsing of state and splitter arguments.
//!
//! States are either named (`cat:odd:1.2`, `fockdq:3:0.05`, `sv:1.1276`,
//! `coherent:1:0`, `random:4:17`) or a path to a JSON state file. Splitters
//! are `bs`, `dft:N` or `file:PATH`.

use std::fs;

use cohrank_core::spec_files::{parse_state, parse_unitary};
use cohrank_core::states::{
    cat_state, fock_difference_quotient, random_state, Parity, RandomBounds, SqueezedVacuumParams,
};
use cohrank_core::{CoherentPoint, Complex64, SplitterUnitary, SuperpositionState, Tolerances};

use crate::CliError;

/// A parsed state argument.
#[derive(Debug, Clone)]
pub enum StateSource {
    /// Finite coherent superposition.
    Superposition(SuperpositionState),
    /// Squeezed vacuum; handled in the Fock basis because it has no finite
    /// coherent expansion.
    Squeezed(SqueezedVacuumParams),
    /// `cat:odd` / `cat:even` without an amplitude, for amplitude sweeps.
    CatFamily(Parity),
}

fn number<T: std::str::FromStr>(field: &str, what: &str, spec: &str) -> Result<T, CliError> {
    field
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid {what} '{field}' in state '{spec}'")))
}

fn parity(word: &str, spec: &str) -> Result<Parity, CliError> {
    match word {
        "odd" => Ok(Parity::Odd),
        "even" => Ok(Parity::Even),
        _ => Err(CliError::Usage(format!(
            "cat parity must be 'odd' or 'even' in '{spec}'"
        ))),
    }
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_string(),
        source,
    })
}

const NAMED: [&str; 5] = ["cat", "fockdq", "sv", "coherent", "random"];

/// Parses a state argument. Named forms take precedence over file paths.
pub fn parse_state_source(spec: &str, tol: &Tolerances) -> Result<StateSource, CliError> {
    let fields: Vec<&str> = spec.split(':').collect();
    if fields.len() < 2 || !NAMED.contains(&fields[0]) {
        let text = read(spec)?;
        return Ok(StateSource::Superposition(parse_state(&text)?));
    }
    let bad_arity = || CliError::Usage(format!("wrong number of fields in state '{spec}'"));
    let source = match fields[0] {
        "cat" => match fields.len() {
            2 => StateSource::CatFamily(parity(fields[1], spec)?),
            3 => {
                let alpha: f64 = number(fields[2], "amplitude", spec)?;
                StateSource::Superposition(cat_state(
                    Complex64::new(alpha, 0.0),
                    parity(fields[1], spec)?,
                    tol,
                )?)
            }
            _ => return Err(bad_arity()),
        },
        "fockdq" => {
            if fields.len() != 3 {
                return Err(bad_arity());
            }
            let n: usize = number(fields[1], "photon number", spec)?;
            let h: f64 = number(fields[2], "step", spec)?;
            StateSource::Superposition(fock_difference_quotient(n, h, tol)?)
        }
        "sv" => {
            let mu: f64 = number(fields[1], "mu", spec)?;
            let phase: f64 = match fields.len() {
                2 => 0.0,
                3 => number(fields[2], "phase", spec)?,
                _ => return Err(bad_arity()),
            };
            StateSource::Squeezed(SqueezedVacuumParams::from_mu(mu, phase)?)
        }
        "coherent" => {
            if fields.len() != 3 {
                return Err(bad_arity());
            }
            let re: f64 = number(fields[1], "real part", spec)?;
            let im: f64 = number(fields[2], "imaginary part", spec)?;
            let point = CoherentPoint::single(Complex64::new(re, im));
            if !point.is_finite() {
                return Err(CliError::Usage(format!("non-finite amplitude in '{spec}'")));
            }
            StateSource::Superposition(SuperpositionState::coherent(point))
        }
        "random" => {
            if fields.len() != 3 {
                return Err(bad_arity());
            }
            let r: usize = number(fields[1], "rank", spec)?;
            let seed: u64 = number(fields[2], "seed", spec)?;
            StateSource::Superposition(random_state(r, seed, RandomBounds::default())?)
        }
        _ => unreachable!("prefix checked against NAMED"),
    };
    Ok(source)
}

/// Parses `bs`, `dft:N` or `file:PATH`.
pub fn parse_splitter(spec: &str) -> Result<SplitterUnitary, CliError> {
    if spec == "bs" {
        return Ok(SplitterUnitary::balanced_bs());
    }
    if let Some(n) = spec.strip_prefix("dft:") {
        let n: usize = n
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid splitter size in '{spec}'")))?;
        return Ok(SplitterUnitary::dft(n)?);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok(parse_unitary(&read(path)?)?);
    }
    Err(CliError::Usage(format!(
        "unknown splitter '{spec}' (expected bs, dft:N or file:PATH)"
    )))
}

/// `--truncation K` (every mode) or `--truncation K1,K2,...`.
pub fn parse_truncation(spec: &str) -> Result<Vec<usize>, CliError> {
    let cutoffs = spec
        .split(',')
        .map(|f| f.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("invalid truncation '{spec}'")))?;
    if cutoffs.iter().any(|&k| k == 0) {
        return Err(CliError::Usage("truncation cutoffs must be >= 1".into()));
    }
    Ok(cutoffs)
}

/// Expands a truncation override to `modes` cutoffs.
pub fn truncation_for(cutoffs: &[usize], modes: usize) -> Result<Vec<usize>, CliError> {
    match cutoffs.len() {
        1 => Ok(vec![cutoffs[0]; modes]),
        n if n == modes => Ok(cutoffs.to_vec()),
        n => Err(CliError::Usage(format!(
            "truncation lists {n} cutoffs but the state has {modes} modes"
        ))),
    }
}

/// Inclusive integer range `A..B`.
pub fn parse_int_range(spec: &str) -> Result<Vec<usize>, CliError> {
    let err = || CliError::Usage(format!("invalid range '{spec}' (expected A..B)"));
    let (a, b) = spec.split_once("..").ok_or_else(err)?;
    let (a, b): (usize, usize) = (a.parse().map_err(|_| err())?, b.parse().map_err(|_| err())?);
    if a == 0 || a > b {
        return Err(err());
    }
    Ok((a..=b).collect())
}

/// `steps` evenly spaced values from `A` to `B` inclusive.
pub fn parse_float_range(spec: &str, steps: usize) -> Result<Vec<f64>, CliError> {
    let err = || CliError::Usage(format!("invalid range '{spec}' (expected A..B)"));
    let (a, b) = spec.split_once("..").ok_or_else(err)?;
    let (a, b): (f64, f64) = (a.parse().map_err(|_| err())?, b.parse().map_err(|_| err())?);
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(err());
    }
    match steps {
        0 => Err(CliError::Usage("--steps must be >= 1".into())),
        1 => Ok(vec![a]),
        _ => Ok((0..steps)
            .map(|i| {
                let t = i as f64 / (steps - 1) as f64;
                a * (1.0 - t) + b * t
            })
            .collect()),
    }
}
