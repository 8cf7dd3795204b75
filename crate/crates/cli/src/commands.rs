//! The four subcommands. Each returns structured results (used directly by
//! tests) and an [`Outcome`] with the rendered report.

use std::collections::BTreeMap;
use std::fmt::Write;

use cohrank_core::fock::FockArray;
use cohrank_core::quantifiers::{
    analyze as analyze_state, bipartitions, effective_schmidt_spectrum, rank_from_spectrum,
};
use cohrank_core::states::{
    cat_state, random_state, squeezed_vacuum_fock, squeezed_vacuum_split, Parity, RandomBounds,
    SqueezedVacuumParams,
};
use cohrank_core::tolerance::CONDITIONING_SEPARATION;
use cohrank_core::{
    extend_with_vacuum, Bipartition, Complex64, Error, RankReport, SplitterUnitary,
    SuperpositionState, Tolerances,
};
use rayon::prelude::*;

use crate::format::{self, num};
use crate::source::{parse_splitter, parse_state_source, truncation_for, StateSource};
use crate::{CliError, ExitStatus, Outcome, RunConfig};

/// Largest Fock cutoff tried when choosing one automatically for a squeezed
/// vacuum.
pub const MAX_AUTO_CUTOFF: usize = 4096;
/// Largest per-mode output cutoff tried for a split squeezed vacuum.
pub const MAX_AUTO_SPLIT_CUTOFF: usize = 200;

fn splitter_line(out: &mut String, spec: &str, t: &SplitterUnitary) {
    writeln!(
        out,
        "splitter: {spec} size={} unitarity_defect={}",
        t.size(),
        num(t.unitarity_defect())
    )
    .unwrap();
}

fn single_cutoff(cutoffs: &[usize], modes: usize) -> Result<usize, CliError> {
    let all = truncation_for(cutoffs, modes)?;
    if all.iter().any(|&k| k != all[0]) {
        return Err(CliError::Usage(
            "squeezed-vacuum splits use one cutoff for every output mode".into(),
        ));
    }
    Ok(all[0])
}

// ---------------------------------------------------------------- analyze

/// Single-mode squeezed vacuum expanded until the tail is within tolerance.
fn squeezed_fock(
    p: &SqueezedVacuumParams,
    tol: &Tolerances,
    cutoff: Option<usize>,
) -> Result<FockArray, CliError> {
    if let Some(k) = cutoff {
        return Ok(squeezed_vacuum_fock(p, k)?);
    }
    let mut k = 16;
    loop {
        let f = squeezed_vacuum_fock(p, k)?;
        if f.is_adequate(tol.truncation_tol) {
            return Ok(f);
        }
        if k >= MAX_AUTO_CUTOFF {
            return Err(Error::TruncationInadequate {
                tail_bound: f.tail_bound(),
                tolerance: tol.truncation_tol,
            }
            .into());
        }
        k *= 2;
    }
}

pub fn analyze(state_spec: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tol = &cfg.tolerances;
    let mut out = String::new();
    writeln!(out, "command: analyze").unwrap();
    writeln!(out, "state: {state_spec}").unwrap();
    format::tolerances(&mut out, tol);
    match parse_state_source(state_spec, tol)? {
        StateSource::Superposition(s) => {
            let truncation = cfg
                .truncation
                .as_deref()
                .map(|t| truncation_for(t, s.modes()))
                .transpose()?;
            let r = analyze_state(&s, tol, truncation.as_deref())?;
            format::rank_report(&mut out, &r, "");
            let certified = r.gram_rank == r.nonclassicality_rank
                && r.vandermonde_certificate.as_ref().map_or(true, |c| c.passed);
            write!(out, "NCL_RANK={} GRAM_RANK={}", r.nonclassicality_rank, r.gram_rank).unwrap();
            if let Some(k) = r.min_schmidt_rank() {
                write!(out, " SCHMIDT_RANK={k}").unwrap();
            }
            writeln!(out, " CERTIFICATE={}", format::pass(certified)).unwrap();
            Ok(Outcome {
                csv: Some(format::spectra_csv(&r.schmidt_spectra)),
                status: ExitStatus::resolve(true, r.is_ill_conditioned(), cfg.strict),
                report: out,
            })
        }
        StateSource::Squeezed(p) => {
            let cutoff = cfg.truncation.as_deref().map(|t| single_cutoff(t, 1)).transpose()?;
            let f = squeezed_fock(&p, tol, cutoff)?;
            let warnings = tail_warnings(f.tail_bound(), tol);
            writeln!(out, "modes: 1").unwrap();
            writeln!(out, "mu: {}", num(p.mu())).unwrap();
            writeln!(out, "nu: {}", format::complex(p.nu())).unwrap();
            writeln!(out, "truncation: {}", f.truncation()[0]).unwrap();
            writeln!(out, "tail_bound: {}", num(f.tail_bound())).unwrap();
            for (n, c) in f.coefficients().iter().enumerate() {
                if n % 2 == 0 {
                    writeln!(out, "fock {n}: {}", format::complex(*c)).unwrap();
                }
            }
            format::warnings(&mut out, &warnings, "");
            writeln!(out, "NCL_RANK=unbounded CERTIFICATE=n/a").unwrap();
            Ok(Outcome {
                csv: Some(format::spectra_csv(&BTreeMap::new())),
                status: ExitStatus::resolve(true, !warnings.is_empty(), cfg.strict),
                report: out,
            })
        }
        StateSource::CatFamily(_) => Err(CliError::Usage(
            "cat states need an amplitude, e.g. cat:odd:1.0".into(),
        )),
    }
}

fn tail_warnings(tail: f64, tol: &Tolerances) -> Vec<String> {
    if tail > tol.truncation_tol {
        vec![format!(
            "tail bound {tail:e} exceeds truncation_tol {:e}; ranks refer to the truncated state",
            tol.truncation_tol
        )]
    } else {
        Vec::new()
    }
}

// ------------------------------------------------------------------ split

/// Input and output analyses of one split.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub input: RankReport,
    pub output: RankReport,
    /// Every output Schmidt rank equals the input nonclassicality rank.
    pub ranks_agree: bool,
    pub ill_conditioned: bool,
}

impl SplitResult {
    pub fn output_state_rank(&self) -> Option<usize> {
        self.output.min_schmidt_rank()
    }
}

/// Sends single-mode `s` through `splitter` with vacuum in the other ports.
pub fn split_superposition(
    s: &SuperpositionState,
    splitter: &SplitterUnitary,
    tol: &Tolerances,
    truncation: Option<&[usize]>,
) -> Result<SplitResult, CliError> {
    if s.modes() != 1 {
        return Err(CliError::Usage(format!(
            "split expects a single-mode input, got {} modes",
            s.modes()
        )));
    }
    if splitter.size() < 2 {
        return Err(CliError::Usage("splitter must have at least 2 modes".into()));
    }
    let input = analyze_state(s, tol, None)?;
    let out_state = splitter.apply(&extend_with_vacuum(s, splitter.size())?, tol)?;
    let truncation = truncation
        .map(|t| truncation_for(t, splitter.size()))
        .transpose()?;
    let output = analyze_state(&out_state, tol, truncation.as_deref())?;
    let ranks_agree = !output.schmidt_ranks.is_empty()
        && output
            .schmidt_ranks
            .values()
            .all(|&k| k == input.nonclassicality_rank);
    let ill_conditioned = input.is_ill_conditioned() || output.is_ill_conditioned();
    Ok(SplitResult {
        input,
        output,
        ranks_agree,
        ill_conditioned,
    })
}

/// Fock-basis split of a squeezed vacuum at one output cutoff.
#[derive(Debug, Clone)]
pub struct FockSplitResult {
    pub cutoff: usize,
    pub tail_bound: f64,
    pub spectra: BTreeMap<Bipartition, Vec<f64>>,
    pub ranks: BTreeMap<Bipartition, usize>,
    pub warnings: Vec<String>,
}

fn fock_spectra(
    f: &FockArray,
    tol: &Tolerances,
) -> Result<(BTreeMap<Bipartition, Vec<f64>>, BTreeMap<Bipartition, usize>), CliError> {
    let cuts = bipartitions(f.modes());
    let results: Vec<_> = cuts
        .par_iter()
        .map(|cut| effective_schmidt_spectrum(f, cut))
        .collect();
    let mut spectra = BTreeMap::new();
    let mut ranks = BTreeMap::new();
    for (cut, spec) in cuts.into_iter().zip(results) {
        let spec = spec?;
        ranks.insert(cut.clone(), rank_from_spectrum(&spec, tol.rank_rel_tol));
        spectra.insert(cut, spec);
    }
    Ok((spectra, ranks))
}

/// Squeezed vacuum through `splitter`. Without an explicit cutoff the output
/// cutoff grows in steps of 10 until the tail is within `truncation_tol`.
pub fn split_squeezed(
    p: &SqueezedVacuumParams,
    splitter: &SplitterUnitary,
    tol: &Tolerances,
    cutoff: Option<usize>,
) -> Result<FockSplitResult, CliError> {
    if splitter.size() < 2 {
        return Err(CliError::Usage("splitter must have at least 2 modes".into()));
    }
    let f = match cutoff {
        Some(k) => squeezed_vacuum_split(p, splitter, k)?,
        None => {
            let mut k = 10;
            loop {
                let f = squeezed_vacuum_split(p, splitter, k)?;
                if f.is_adequate(tol.truncation_tol) {
                    break f;
                }
                if k >= MAX_AUTO_SPLIT_CUTOFF {
                    return Err(Error::TruncationInadequate {
                        tail_bound: f.tail_bound(),
                        tolerance: tol.truncation_tol,
                    }
                    .into());
                }
                k += 10;
            }
        }
    };
    let (spectra, ranks) = fock_spectra(&f, tol)?;
    Ok(FockSplitResult {
        cutoff: f.truncation()[0],
        tail_bound: f.tail_bound(),
        warnings: tail_warnings(f.tail_bound(), tol),
        spectra,
        ranks,
    })
}

pub fn split(state_spec: &str, splitter_spec: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tol = &cfg.tolerances;
    let splitter = parse_splitter(splitter_spec)?;
    let mut out = String::new();
    writeln!(out, "command: split").unwrap();
    writeln!(out, "state: {state_spec}").unwrap();
    splitter_line(&mut out, splitter_spec, &splitter);
    format::tolerances(&mut out, tol);
    match parse_state_source(state_spec, tol)? {
        StateSource::Superposition(s) => {
            let r = split_superposition(&s, &splitter, tol, cfg.truncation.as_deref())?;
            writeln!(out, "input:").unwrap();
            format::rank_report(&mut out, &r.input, "  ");
            writeln!(out, "output:").unwrap();
            format::rank_report(&mut out, &r.output, "  ");
            if r.output.modes > 2 {
                writeln!(out, "GHZ={}", format::pass(r.output.ghz_certified())).unwrap();
            }
            if !r.ranks_agree && r.ill_conditioned {
                writeln!(
                    out,
                    "note: rank mismatch on an ill-conditioned input is not counted as a violation"
                )
                .unwrap();
            }
            writeln!(
                out,
                "NCL_RANK={} SCHMIDT_RANK={} CERTIFICATE={}",
                r.input.nonclassicality_rank,
                r.output_state_rank().unwrap_or(0),
                format::pass(r.ranks_agree)
            )
            .unwrap();
            Ok(Outcome {
                csv: Some(format::spectra_csv(&r.output.schmidt_spectra)),
                status: ExitStatus::resolve(r.ranks_agree, r.ill_conditioned, cfg.strict),
                report: out,
            })
        }
        StateSource::Squeezed(p) => {
            let cutoff = cfg
                .truncation
                .as_deref()
                .map(|t| single_cutoff(t, splitter.size()))
                .transpose()?;
            let r = split_squeezed(&p, &splitter, tol, cutoff)?;
            writeln!(out, "input:").unwrap();
            writeln!(out, "  mu: {}", num(p.mu())).unwrap();
            writeln!(out, "  nu: {}", format::complex(p.nu())).unwrap();
            writeln!(out, "  nonclassicality_rank: unbounded").unwrap();
            writeln!(out, "output:").unwrap();
            writeln!(out, "  modes: {}", splitter.size()).unwrap();
            writeln!(out, "  truncation: {} per mode", r.cutoff).unwrap();
            writeln!(out, "  tail_bound: {}", num(r.tail_bound)).unwrap();
            format::spectra(&mut out, &r.spectra, &r.ranks, "  ");
            format::warnings(&mut out, &r.warnings, "  ");
            let k = r.ranks.values().copied().min().unwrap_or(0);
            writeln!(out, "NCL_RANK=unbounded SCHMIDT_RANK={k} CERTIFICATE=n/a").unwrap();
            Ok(Outcome {
                csv: Some(format::spectra_csv(&r.spectra)),
                status: ExitStatus::resolve(true, !r.warnings.is_empty(), cfg.strict),
                report: out,
            })
        }
        StateSource::CatFamily(_) => Err(CliError::Usage(
            "cat states need an amplitude, e.g. cat:odd:1.0".into(),
        )),
    }
}

// --------------------------------------------------------- verify-theorem

/// Parameters of a randomized rank-equality campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCampaign {
    pub trials: usize,
    /// Trial `i` uses seed `seed + i`.
    pub seed: u64,
    /// Trial `i` draws `1 + i % max_rank` components.
    pub max_rank: usize,
    pub bounds: RandomBounds,
    pub splitter: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialResult {
    pub index: usize,
    pub seed: u64,
    pub r: usize,
    pub nonclassicality_rank: usize,
    pub gram_rank: usize,
    pub schmidt_ranks: Vec<usize>,
    pub ill_conditioned: bool,
    pub ranks_agree: bool,
}

impl TrialResult {
    /// A mismatch not explained by a conditioning warning.
    pub fn is_failure(&self) -> bool {
        !self.ranks_agree && !self.ill_conditioned
    }
}

/// Runs every trial (in parallel); results are in trial order.
pub fn run_campaign(c: &TheoremCampaign, cfg: &RunConfig) -> Result<Vec<TrialResult>, CliError> {
    if c.trials == 0 {
        return Err(CliError::Usage("--trials must be >= 1".into()));
    }
    if c.max_rank == 0 {
        return Err(CliError::Usage("--max-rank must be >= 1".into()));
    }
    let splitter = parse_splitter(&c.splitter)?;
    let tol = &cfg.tolerances;
    (0..c.trials)
        .into_par_iter()
        .map(|i| {
            let seed = c.seed.wrapping_add(i as u64);
            let r = 1 + i % c.max_rank;
            let s = random_state(r, seed, c.bounds)?;
            let res = split_superposition(&s, &splitter, tol, cfg.truncation.as_deref())?;
            Ok(TrialResult {
                index: i,
                seed,
                r,
                nonclassicality_rank: res.input.nonclassicality_rank,
                gram_rank: res.input.gram_rank,
                schmidt_ranks: res.output.schmidt_ranks.values().copied().collect(),
                ill_conditioned: res.ill_conditioned,
                ranks_agree: res.ranks_agree
                    && res.input.nonclassicality_rank == r
                    && res.input.gram_rank == r,
            })
        })
        .collect()
}

pub fn verify_theorem(c: &TheoremCampaign, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let results = run_campaign(c, cfg)?;
    let splitter = parse_splitter(&c.splitter)?;
    let mut out = String::new();
    writeln!(out, "command: verify-theorem").unwrap();
    splitter_line(&mut out, &c.splitter, &splitter);
    writeln!(
        out,
        "trials: {} seed: {} max_rank: {} radius: {} min_sep: {}",
        c.trials,
        c.seed,
        c.max_rank,
        num(c.bounds.radius),
        num(c.bounds.min_sep)
    )
    .unwrap();
    format::tolerances(&mut out, &cfg.tolerances);
    let mut csv = String::from(
        "trial,seed,r,nonclassicality_rank,gram_rank,min_schmidt_rank,max_schmidt_rank,status\n",
    );
    for t in &results {
        let status = match (t.ranks_agree, t.ill_conditioned) {
            (true, false) => "pass",
            (true, true) => "pass-conditioning-warning",
            (false, true) => "mismatch-conditioning-warning",
            (false, false) => "fail",
        };
        let min = t.schmidt_ranks.iter().min().copied().unwrap_or(0);
        let max = t.schmidt_ranks.iter().max().copied().unwrap_or(0);
        writeln!(
            out,
            "trial {} seed {} r {}: ncl={} gram={} schmidt={}..{} {status}",
            t.index, t.seed, t.r, t.nonclassicality_rank, t.gram_rank, min, max
        )
        .unwrap();
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{status}",
            t.index, t.seed, t.r, t.nonclassicality_rank, t.gram_rank, min, max
        )
        .unwrap();
    }
    let failures: Vec<&TrialResult> = results.iter().filter(|t| t.is_failure()).collect();
    let conditioning = results.iter().filter(|t| t.ill_conditioned).count();
    let passed = results.iter().filter(|t| t.ranks_agree).count();
    if failures.is_empty() {
        writeln!(out, "failures: none").unwrap();
    }
    for t in &failures {
        writeln!(
            out,
            "failure: trial {} (reproduce with --seed {} --trials 1 --max-rank {} or random:{}:{})",
            t.index,
            t.seed,
            t.r,
            t.r,
            t.seed
        )
        .unwrap();
    }
    writeln!(
        out,
        "TRIALS={} PASSED={} FAILED={} CONDITIONING={}",
        results.len(),
        passed,
        failures.len(),
        conditioning
    )
    .unwrap();
    let status = if cfg.strict && conditioning > 0 {
        ExitStatus::ConditioningFailure
    } else if !failures.is_empty() {
        ExitStatus::TheoremViolation
    } else {
        ExitStatus::Success
    };
    Ok(Outcome {
        report: out,
        csv: Some(csv),
        status,
    })
}

// ------------------------------------------------------------------ sweep

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    /// Per-mode output Fock cutoffs.
    Truncations(Vec<usize>),
    /// Cat amplitudes.
    Alphas(Vec<f64>),
}

/// Effective Schmidt rank across `0 | rest` at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: f64,
    pub rank: usize,
    pub tail_bound: f64,
    pub spectrum: Vec<f64>,
    pub ill_conditioned: bool,
}

fn first_cut(modes: usize) -> Result<Bipartition, CliError> {
    Ok(Bipartition::new(vec![0], modes)?)
}

fn row_from_fock(parameter: f64, f: &FockArray, tol: &Tolerances) -> Result<SweepRow, CliError> {
    let spectrum = effective_schmidt_spectrum(f, &first_cut(f.modes())?)?;
    Ok(SweepRow {
        parameter,
        rank: rank_from_spectrum(&spectrum, tol.rank_rel_tol),
        tail_bound: f.tail_bound(),
        spectrum,
        ill_conditioned: false,
    })
}

/// Computes the sweep rows (in parallel, returned in axis order).
pub fn sweep_rows(
    source: &StateSource,
    splitter: &SplitterUnitary,
    axis: &SweepAxis,
    cfg: &RunConfig,
) -> Result<Vec<SweepRow>, CliError> {
    let tol = &cfg.tolerances;
    let n = splitter.size();
    if n < 2 {
        return Err(CliError::Usage("splitter must have at least 2 modes".into()));
    }
    match (source, axis) {
        (StateSource::Superposition(s), SweepAxis::Truncations(ks)) => {
            if s.modes() != 1 {
                return Err(CliError::Usage("sweep expects a single-mode input".into()));
            }
            let out = splitter
                .apply(&extend_with_vacuum(s, n)?, tol)?
                .normalized()?;
            let ill = s
                .min_separation()
                .is_some_and(|d| d < CONDITIONING_SEPARATION);
            ks.par_iter()
                .map(|&k| {
                    let f = cohrank_core::fock::to_fock(&out, &vec![k; n])?;
                    let mut row = row_from_fock(k as f64, &f, tol)?;
                    row.ill_conditioned = ill;
                    Ok(row)
                })
                .collect()
        }
        (StateSource::Squeezed(p), SweepAxis::Truncations(ks)) => ks
            .par_iter()
            .map(|&k| row_from_fock(k as f64, &squeezed_vacuum_split(p, splitter, k)?, tol))
            .collect(),
        (StateSource::CatFamily(parity), SweepAxis::Alphas(alphas)) => alphas
            .par_iter()
            .map(|&a| cat_row(a, *parity, splitter, cfg))
            .collect(),
        (StateSource::CatFamily(_), SweepAxis::Truncations(_)) => Err(CliError::Usage(
            "truncation sweeps need a fixed state, e.g. cat:odd:1.0".into(),
        )),
        (_, SweepAxis::Alphas(_)) => Err(CliError::Usage(
            "amplitude sweeps need a cat family, e.g. cat:odd".into(),
        )),
    }
}

fn cat_row(
    alpha: f64,
    parity: Parity,
    splitter: &SplitterUnitary,
    cfg: &RunConfig,
) -> Result<SweepRow, CliError> {
    let tol = &cfg.tolerances;
    let s = cat_state(Complex64::new(alpha, 0.0), parity, tol)?;
    let r = split_superposition(&s, splitter, tol, cfg.truncation.as_deref())?;
    let cut = first_cut(splitter.size())?;
    Ok(SweepRow {
        parameter: alpha,
        rank: r.output.schmidt_ranks[&cut],
        tail_bound: r.output.tail_bound,
        spectrum: r.output.schmidt_spectra[&cut].clone(),
        ill_conditioned: r.ill_conditioned,
    })
}

/// True when the rank column never decreases.
pub fn is_non_decreasing(rows: &[SweepRow]) -> bool {
    rows.windows(2).all(|w| w[0].rank <= w[1].rank)
}

pub fn sweep(
    state_spec: &str,
    splitter_spec: &str,
    axis: &SweepAxis,
    leading: usize,
    cfg: &RunConfig,
) -> Result<Outcome, CliError> {
    let splitter = parse_splitter(splitter_spec)?;
    let source = parse_state_source(state_spec, &cfg.tolerances)?;
    let rows = sweep_rows(&source, &splitter, axis, cfg)?;

    let mut csv = String::from("parameter,rank,tail_bound");
    for k in 0..leading {
        write!(csv, ",sigma_{k}").unwrap();
    }
    csv.push('\n');
    for row in &rows {
        let parameter = match axis {
            SweepAxis::Truncations(_) => format!("{}", row.parameter as usize),
            SweepAxis::Alphas(_) => num(row.parameter),
        };
        write!(csv, "{parameter},{},{}", row.rank, num(row.tail_bound)).unwrap();
        for k in 0..leading {
            write!(csv, ",{}", num(row.spectrum.get(k).copied().unwrap_or(0.0))).unwrap();
        }
        csv.push('\n');
    }

    let mut out = String::new();
    writeln!(out, "# command: sweep").unwrap();
    writeln!(out, "# state: {state_spec}").unwrap();
    let mut header = String::new();
    splitter_line(&mut header, splitter_spec, &splitter);
    format::tolerances(&mut header, &cfg.tolerances);
    for line in header.lines() {
        writeln!(out, "# {line}").unwrap();
    }
    out.push_str(&csv);
    let ranks: Vec<String> = rows.iter().map(|r| r.rank.to_string()).collect();
    writeln!(out, "# RANKS={}", ranks.join(",")).unwrap();
    writeln!(
        out,
        "# NON_DECREASING={}",
        if is_non_decreasing(&rows) { "yes" } else { "no" }
    )
    .unwrap();
    let ill = rows.iter().any(|r| r.ill_conditioned);
    Ok(Outcome {
        report: out,
        csv: Some(csv),
        status: ExitStatus::resolve(true, ill, cfg.strict),
    })
}
