//! Passive linear-optical splitters acting on coherent superpositions.
//!
//! A splitter `T` maps a multimode coherent state `|alpha>` to `|T alpha>`, so
//! on a superposition it only moves the points and leaves every coefficient
//! alone.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockArray;
use crate::state::{CoherentPoint, SuperpositionState};
use crate::tolerance::{Tolerances, UNITARITY_TOL};

/// Validated `N x N` unitary together with its measured defect
/// `max |T^dagger T - I|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitterUnitary {
    entries: DMatrix<Complex64>,
    unitarity_defect: f64,
}

fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let prod = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

impl SplitterUnitary {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        Self::from_matrix_with_tol(entries, UNITARITY_TOL)
    }

    pub fn from_matrix_with_tol(entries: DMatrix<Complex64>, tolerance: f64) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let defect = unitarity_defect(&entries);
        if !(defect <= tolerance) {
            return Err(Error::NonUnitary { defect, tolerance });
        }
        Ok(Self {
            entries,
            unitarity_defect: defect,
        })
    }

    /// 50:50 beam splitter with columns `(1, 1)/sqrt2` and `(-1, 1)/sqrt2`,
    /// so `(alpha, 0) -> (alpha, alpha)/sqrt2`.
    pub fn balanced_bs() -> Self {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let entries = DMatrix::from_row_slice(2, 2, &[s, -s, s, s]);
        Self::from_matrix(entries).expect("balanced beam splitter is unitary")
    }

    /// `T[j][k] = exp(2 pi i j k / n) / sqrt(n)`.
    pub fn dft(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("DFT splitter needs n >= 2, got {n}")));
        }
        let scale = 1.0 / (n as f64).sqrt();
        let entries = DMatrix::from_fn(n, n, |j, k| {
            // reduce j*k mod n first to keep the phase argument small
            let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
            Complex64::from_polar(scale, phase)
        });
        Self::from_matrix(entries)
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.unitarity_defect
    }

    /// `self * first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        if self.size() != first.size() {
            return Err(Error::DimensionMismatch {
                splitter: self.size(),
                modes: first.size(),
            });
        }
        Self::from_matrix(&self.entries * &first.entries)
    }

    /// `T alpha` for a single multimode point.
    pub fn apply_point(&self, point: &CoherentPoint) -> CoherentPoint {
        let n = self.size();
        let amps = point.amplitudes();
        CoherentPoint::new(
            (0..n)
                .map(|j| (0..n).map(|k| self.entries[(j, k)] * amps[k]).sum())
                .collect(),
        )
    }

    /// Maps every point through `T`, keeps coefficients, re-canonicalizes.
    pub fn apply(&self, s: &SuperpositionState, tol: &Tolerances) -> Result<SuperpositionState> {
        if s.modes() != self.size() {
            return Err(Error::DimensionMismatch {
                splitter: self.size(),
                modes: s.modes(),
            });
        }
        s.map_points(s.modes(), |p| self.apply_point(p))
            .canonicalize(tol.merge_tol, tol.drop_tol)
    }

    /// Sends a single-mode Fock state into input port 0 with vacuum in the
    /// other ports. Each `|n>` becomes
    /// `sum_{|k| = n} sqrt(n! / prod k_j!) prod_j t_{j0}^{k_j} |k>`,
    /// which stays inside the input cutoff on every output mode. The tail
    /// bound carries over unchanged since the map is unitary.
    pub fn apply_to_fock_input(&self, input: &FockArray) -> Result<FockArray> {
        self.apply_to_fock_input_restricted(input, input.truncation().first().copied().unwrap_or(0))
    }

    /// Like [`Self::apply_to_fock_input`] but keeps only occupations below
    /// `out_cutoff` in every output mode. Block entries are exact whenever
    /// the input cutoff exceeds `N (out_cutoff - 1)`; weight falling outside
    /// the block is added to the tail bound.
    pub fn apply_to_fock_input_restricted(
        &self,
        input: &FockArray,
        out_cutoff: usize,
    ) -> Result<FockArray> {
        if input.modes() != 1 {
            return Err(Error::ModeMismatch {
                expected: 1,
                found: input.modes(),
            });
        }
        if out_cutoff == 0 {
            return Err(Error::InvalidParameter("output cutoff must be >= 1".into()));
        }
        let n_modes = self.size();
        let in_cutoff = input.truncation()[0];
        let max_n = in_cutoff.max(out_cutoff * n_modes);
        let column: Vec<Complex64> = (0..n_modes).map(|j| self.entries[(j, 0)]).collect();
        let ln_fact: Vec<f64> = std::iter::once(0.0)
            .chain((1..max_n).scan(0.0, |acc, k| {
                *acc += (k as f64).ln();
                Some(*acc)
            }))
            .collect();
        // powers[j][k] = t_{j0}^k
        let powers: Vec<Vec<Complex64>> = column
            .iter()
            .map(|t| {
                let mut p = Vec::with_capacity(out_cutoff);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..out_cutoff {
                    p.push(acc);
                    acc *= t;
                }
                p
            })
            .collect();

        let total = out_cutoff.pow(n_modes as u32);
        let mut coeffs = Vec::with_capacity(total);
        let mut occ = vec![0usize; n_modes];
        for _ in 0..total {
            let n: usize = occ.iter().sum();
            let value = if n < in_cutoff && input.coefficients()[n] != Complex64::new(0.0, 0.0) {
                let ln_multinomial = ln_fact[n] - occ.iter().map(|&k| ln_fact[k]).sum::<f64>();
                let mut v = input.coefficients()[n] * (0.5 * ln_multinomial).exp();
                for (j, &k) in occ.iter().enumerate() {
                    v *= powers[j][k];
                }
                v
            } else {
                Complex64::new(0.0, 0.0)
            };
            coeffs.push(value);
            for m in (0..n_modes).rev() {
                occ[m] += 1;
                if occ[m] < out_cutoff {
                    break;
                }
                occ[m] = 0;
            }
        }
        let kept: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let dropped = (input.norm_sqr() - kept).max(0.0);
        FockArray::from_parts(vec![out_cutoff; n_modes], coeffs, input.tail_bound() + dropped)
    }
}

/// Pads every point with vacuum amplitudes up to `total_modes`.
pub fn extend_with_vacuum(s: &SuperpositionState, total_modes: usize) -> Result<SuperpositionState> {
    if total_modes < s.modes() {
        return Err(Error::InvalidParameter(format!(
            "cannot shrink a {}-mode state to {total_modes} modes",
            s.modes()
        )));
    }
    let pad = total_modes - s.modes();
    Ok(s.map_points(total_modes, |p| {
        let mut amps = p.amplitudes().to_vec();
        amps.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(pad));
        CoherentPoint::new(amps)
    }))
}
