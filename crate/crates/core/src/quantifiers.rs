//! Rank-based quantifiers.
//!
//! The nonclassicality rank of a pure state is the number of distinct coherent
//! points in its canonical expansion; the Schmidt rank across a bipartition is
//! the numerical rank of the reshaped Fock coefficient tensor. For coherent
//! superpositions sent through a splitter the two agree, which is what the
//! reports here are built to check.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{auto_truncation, to_fock, FockArray};
use crate::state::{PureEnsemble, SuperpositionState};
pub use crate::tolerance::Tolerances;
use crate::tolerance::CONDITIONING_SEPARATION;

/// Beyond this many modes only single-mode-versus-rest cuts are enumerated.
pub const FULL_BIPARTITION_LIMIT: usize = 10;

/// Vandermonde determinants are cross-checked against LU up to this size.
pub const DIRECT_DETERMINANT_LIMIT: usize = 6;

pub fn nonclassicality_rank(s: &SuperpositionState, tol: &Tolerances) -> Result<usize> {
    Ok(s.canonicalize(tol.merge_tol, tol.drop_tol)?.len())
}

/// Gram eigenvalues in descending order.
pub fn gram_eigenvalues(s: &SuperpositionState) -> Vec<f64> {
    let g = s.gram_matrix();
    let mut ev: Vec<f64> = g.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Number of values `v_k` with `v_k / v_0 > rel_tol`; `values` must be
/// sorted descending.
pub fn rank_from_spectrum(values: &[f64], rel_tol: f64) -> usize {
    match values.first() {
        Some(&lead) if lead > 0.0 => values.iter().filter(|&&v| v / lead > rel_tol).count(),
        _ => 0,
    }
}

pub fn gram_rank(s: &SuperpositionState, tol: &Tolerances) -> usize {
    rank_from_spectrum(&gram_eigenvalues(s), tol.rank_rel_tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VandermondeCertificate {
    /// `prod_{i<j} (a_j - a_i)` over the lexicographically sorted points.
    pub value: Complex64,
    pub passed: bool,
    /// LU determinant of `V[j][n] = a_j^n`, for up to
    /// [`DIRECT_DETERMINANT_LIMIT`] points.
    pub direct: Option<Complex64>,
}

impl VandermondeCertificate {
    /// Relative deviation between closed form and direct determinant.
    pub fn relative_mismatch(&self) -> Option<f64> {
        self.direct.map(|d| {
            let scale = self.value.norm().max(d.norm());
            if scale == 0.0 {
                0.0
            } else {
                (self.value - d).norm() / scale
            }
        })
    }
}

fn sort_points(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts
}

/// `prod_{i<j} (a_j - a_i)`, which is `det V` for `V[j][n] = a_j^n`.
pub fn vandermonde_product(points: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            acc *= b - a;
        }
    }
    acc
}

pub fn vandermonde_matrix(points: &[Complex64]) -> DMatrix<Complex64> {
    let r = points.len();
    DMatrix::from_fn(r, r, |j, n| points[j].powu(n as u32))
}

/// Linear-independence certificate for distinct single-mode coherent
/// amplitudes. Passes when `|prod|` exceeds `merge_tol^{r(r-1)/2}`, i.e. when
/// the points are on average farther apart than the merge resolution.
pub fn vandermonde_certificate(points: &[Complex64], merge_tol: f64) -> VandermondeCertificate {
    let pts = sort_points(points);
    let r = pts.len();
    let value = vandermonde_product(&pts);
    let pairs = (r * r.saturating_sub(1) / 2) as i32;
    let passed = pairs == 0 || value.norm() > merge_tol.powi(pairs);
    let direct = (r <= DIRECT_DETERMINANT_LIMIT).then(|| vandermonde_matrix(&pts).determinant());
    VandermondeCertificate {
        value,
        passed,
        direct,
    }
}

/// One side of a cut through an `N`-mode system; the other side is the
/// complement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bipartition {
    side: Vec<usize>,
    modes: usize,
}

impl Bipartition {
    pub fn new(mut side: Vec<usize>, modes: usize) -> Result<Self> {
        side.sort_unstable();
        side.dedup();
        if side.is_empty() || side.len() >= modes || side.iter().any(|&m| m >= modes) {
            return Err(Error::InvalidBipartition { subset: side, modes });
        }
        Ok(Self { side, modes })
    }

    pub fn side(&self) -> &[usize] {
        &self.side
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.modes).filter(|m| !self.side.contains(m)).collect()
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}|{}", join(&self.side), join(&self.complement()))
    }
}

/// Nontrivial cuts of `modes` modes: every subset containing mode 0 (except
/// the full set) up to [`FULL_BIPARTITION_LIMIT`] modes, single modes beyond.
pub fn bipartitions(modes: usize) -> Vec<Bipartition> {
    if modes < 2 {
        return Vec::new();
    }
    if modes > FULL_BIPARTITION_LIMIT {
        return (0..modes)
            .map(|m| Bipartition { side: vec![m], modes })
            .collect();
    }
    let mut out: Vec<Bipartition> = (0u64..(1 << (modes - 1)) - 1)
        .map(|mask| {
            let side = std::iter::once(0)
                .chain((1..modes).filter(|m| mask & (1 << (m - 1)) != 0))
                .collect();
            Bipartition { side, modes }
        })
        .collect();
    out.sort_by(|a, b| a.side.len().cmp(&b.side.len()).then(a.side.cmp(&b.side)));
    out
}

/// Normalized singular values of the reshaped coefficient tensor, descending,
/// without checking the truncation. Use for sweeps where the cutoff is the
/// independent variable.
pub fn effective_schmidt_spectrum(f: &FockArray, cut: &Bipartition) -> Result<Vec<f64>> {
    let m = f.reshape_bipartite(cut.side())?;
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = sv.iter().map(|s| s * s).sum::<f64>().sqrt();
    if total > 0.0 {
        for s in &mut sv {
            *s /= total;
        }
    }
    Ok(sv)
}

/// Schmidt coefficients across `cut`, normalized so their squares sum to 1.
pub fn schmidt_spectrum(f: &FockArray, cut: &Bipartition, tol: &Tolerances) -> Result<Vec<f64>> {
    if !f.is_adequate(tol.truncation_tol) {
        return Err(Error::TruncationInadequate {
            tail_bound: f.tail_bound(),
            tolerance: tol.truncation_tol,
        });
    }
    effective_schmidt_spectrum(f, cut)
}

pub fn schmidt_rank(f: &FockArray, cut: &Bipartition, tol: &Tolerances) -> Result<usize> {
    Ok(rank_from_spectrum(&schmidt_spectrum(f, cut, tol)?, tol.rank_rel_tol))
}

/// Full rank analysis of one pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub modes: usize,
    pub nonclassicality_rank: usize,
    pub gram_eigenvalues: Vec<f64>,
    pub gram_rank: usize,
    pub min_separation: Option<f64>,
    /// Single-mode states only.
    pub vandermonde_certificate: Option<VandermondeCertificate>,
    /// Multimode states: certificate of the points projected onto each mode.
    pub mode_certificates: Vec<VandermondeCertificate>,
    pub schmidt_spectra: BTreeMap<Bipartition, Vec<f64>>,
    pub schmidt_ranks: BTreeMap<Bipartition, usize>,
    pub tolerances: Tolerances,
    pub truncation_used: Vec<usize>,
    pub tail_bound: f64,
    pub warnings: Vec<String>,
}

impl RankReport {
    /// Every computed cut has Schmidt rank equal to the nonclassicality rank.
    /// Vacuously false for single-mode reports.
    pub fn ghz_certified(&self) -> bool {
        !self.schmidt_ranks.is_empty()
            && self
                .schmidt_ranks
                .values()
                .all(|&r| r == self.nonclassicality_rank)
    }

    pub fn min_schmidt_rank(&self) -> Option<usize> {
        self.schmidt_ranks.values().copied().min()
    }

    pub fn is_ill_conditioned(&self) -> bool {
        !self.warnings.is_empty()
    }
}

fn conditioning_warnings(s: &SuperpositionState, gram_rank: usize) -> Vec<String> {
    let mut warnings = Vec::new();
    if let Some(d) = s.min_separation() {
        if d < CONDITIONING_SEPARATION {
            warnings.push(format!(
                "ill-conditioned: minimum point separation {d:e} is below {CONDITIONING_SEPARATION:e}; ranks may be under-reported"
            ));
        }
    }
    if gram_rank < s.len() {
        warnings.push(format!(
            "ill-conditioned: Gram matrix has numerical rank {gram_rank} for {} distinct points",
            s.len()
        ));
    }
    warnings
}

/// Analyzes `s`: nonclassicality and Gram ranks, Vandermonde certificates, and
/// for `modes >= 2` the Schmidt spectrum of every cut from [`bipartitions`].
/// The state is canonicalized and normalized first. `truncation` overrides the
/// automatic cutoff; the tail bound must still be within tolerance.
pub fn analyze(
    s: &SuperpositionState,
    tol: &Tolerances,
    truncation: Option<&[usize]>,
) -> Result<RankReport> {
    tol.validate()?;
    let canonical = s.canonicalize(tol.merge_tol, tol.drop_tol)?;
    let normalized = canonical.normalized()?;
    let gram = gram_eigenvalues(&canonical);
    let gram_rank = rank_from_spectrum(&gram, tol.rank_rel_tol);
    let modes = canonical.modes();

    let project = |m: usize| -> Vec<Complex64> {
        canonical.points().map(|p| p.amplitudes()[m]).collect()
    };
    let (vandermonde, mode_certificates) = if modes == 1 {
        (Some(vandermonde_certificate(&project(0), tol.merge_tol)), Vec::new())
    } else {
        let certs = (0..modes)
            .map(|m| vandermonde_certificate(&project(m), tol.merge_tol))
            .collect();
        (None, certs)
    };

    let cutoffs = match truncation {
        Some(t) => t.to_vec(),
        None => auto_truncation(&normalized, tol.truncation_tol),
    };

    let mut spectra = BTreeMap::new();
    let mut ranks = BTreeMap::new();
    let tail_bound;
    if modes >= 2 {
        let fock = to_fock(&normalized, &cutoffs)?;
        tail_bound = fock.tail_bound();
        let cuts = bipartitions(modes);
        let results: Vec<Result<Vec<f64>>> = cuts
            .par_iter()
            .map(|cut| schmidt_spectrum(&fock, cut, tol))
            .collect();
        for (cut, spec) in cuts.into_iter().zip(results) {
            let spec = spec?;
            ranks.insert(cut.clone(), rank_from_spectrum(&spec, tol.rank_rel_tol));
            spectra.insert(cut, spec);
        }
    } else {
        tail_bound = crate::fock::truncation_tail_bound(&normalized, &cutoffs);
    }

    Ok(RankReport {
        modes,
        nonclassicality_rank: canonical.len(),
        gram_eigenvalues: gram,
        gram_rank,
        min_separation: canonical.min_separation(),
        vandermonde_certificate: vandermonde,
        mode_certificates,
        schmidt_spectra: spectra,
        schmidt_ranks: ranks,
        tolerances: *tol,
        truncation_used: cutoffs,
        tail_bound,
        warnings: conditioning_warnings(&canonical, gram_rank),
    })
}

/// [`analyze`] for states with at least two modes.
pub fn multipartite_report(s: &SuperpositionState, tol: &Tolerances) -> Result<RankReport> {
    if s.modes() < 2 {
        return Err(Error::InvalidParameter(format!(
            "multipartite report needs >= 2 modes, got {}",
            s.modes()
        )));
    }
    analyze(s, tol, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundCheck {
    /// Number of product coherent terms (two-mode nonclassicality rank).
    pub nonclassicality: usize,
    pub schmidt: usize,
    pub holds: bool,
}

/// Two-mode nonclassicality rank against the Schmidt rank across `0|1`.
pub fn bound_check(s: &SuperpositionState, tol: &Tolerances) -> Result<BoundCheck> {
    if s.modes() != 2 {
        return Err(Error::InvalidParameter(format!(
            "bound check is implemented for two-mode states, got {} modes",
            s.modes()
        )));
    }
    let report = analyze(s, tol, None)?;
    let schmidt = report.schmidt_ranks.values().next().copied().unwrap_or(0);
    let nonclassicality = report.nonclassicality_rank;
    Ok(BoundCheck {
        nonclassicality,
        schmidt,
        holds: nonclassicality >= schmidt,
    })
}

/// Schmidt rank across `{0} | rest` of every ensemble member.
pub fn ensemble_schmidt_ranks(e: &PureEnsemble, tol: &Tolerances) -> Result<Vec<usize>> {
    let cut = Bipartition::new(vec![0], e.modes())?;
    e.members()
        .iter()
        .map(|(_, s)| {
            let report = analyze(s, tol, None)?;
            Ok(report.schmidt_ranks[&cut])
        })
        .collect()
}
