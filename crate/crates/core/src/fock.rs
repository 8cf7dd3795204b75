//! Truncated Fock-basis arrays and the expansion of coherent superpositions
//! into them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::SuperpositionState;

/// `|alpha|^2` beyond which `exp(-|alpha|^2 / 2)` and the Fock amplitudes leave
/// the comfortable range of `f64`.
const MAX_ABS_SQ: f64 = 600.0;

/// Dense coefficient tensor of an `M`-mode state in the Fock basis, with mode
/// 0 as the slowest-varying index. `truncation[m]` is the exclusive photon
/// cutoff of mode `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockArray {
    truncation: Vec<usize>,
    coefficients: Vec<Complex64>,
    tail_bound: f64,
}

impl FockArray {
    pub fn zeros(truncation: Vec<usize>) -> Result<Self> {
        if truncation.is_empty() || truncation.iter().any(|&n| n == 0) {
            return Err(Error::InvalidParameter(format!(
                "every mode needs a cutoff >= 1, got {truncation:?}"
            )));
        }
        let len = truncation.iter().product();
        Ok(Self {
            truncation,
            coefficients: vec![Complex64::new(0.0, 0.0); len],
            tail_bound: 0.0,
        })
    }

    pub fn from_parts(
        truncation: Vec<usize>,
        coefficients: Vec<Complex64>,
        tail_bound: f64,
    ) -> Result<Self> {
        let mut out = Self::zeros(truncation)?;
        if coefficients.len() != out.coefficients.len() {
            return Err(Error::ShapeMismatch(
                out.truncation.clone(),
                vec![coefficients.len()],
            ));
        }
        if !(tail_bound >= 0.0) {
            return Err(Error::InvalidParameter(format!("tail bound {tail_bound} < 0")));
        }
        out.coefficients = coefficients;
        out.tail_bound = tail_bound;
        Ok(out)
    }

    pub fn modes(&self) -> usize {
        self.truncation.len()
    }

    pub fn truncation(&self) -> &[usize] {
        &self.truncation
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn is_adequate(&self, truncation_tol: f64) -> bool {
        self.tail_bound <= truncation_tol
    }

    pub fn flat_index(&self, occupation: &[usize]) -> usize {
        debug_assert_eq!(occupation.len(), self.modes());
        occupation
            .iter()
            .zip(&self.truncation)
            .fold(0, |acc, (&n, &cut)| acc * cut + n)
    }

    pub fn get(&self, occupation: &[usize]) -> Complex64 {
        self.coefficients[self.flat_index(occupation)]
    }

    pub fn set(&mut self, occupation: &[usize], value: Complex64) {
        let i = self.flat_index(occupation);
        self.coefficients[i] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Hermitian inner product `<self|other>` of the coefficient tensors.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.truncation != other.truncation {
            return Err(Error::ShapeMismatch(
                self.truncation.clone(),
                other.truncation.clone(),
            ));
        }
        Ok(self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Coefficient tensor flattened to a matrix whose rows run over the modes
    /// in `rows` and columns over the remaining modes, each in ascending mode
    /// order.
    pub fn reshape_bipartite(&self, rows: &[usize]) -> Result<DMatrix<Complex64>> {
        let modes = self.modes();
        let mut in_rows = vec![false; modes];
        for &m in rows {
            if m >= modes || in_rows[m] {
                return Err(Error::InvalidBipartition {
                    subset: rows.to_vec(),
                    modes,
                });
            }
            in_rows[m] = true;
        }
        if rows.is_empty() || rows.len() == modes {
            return Err(Error::InvalidBipartition {
                subset: rows.to_vec(),
                modes,
            });
        }
        let row_modes: Vec<usize> = (0..modes).filter(|&m| in_rows[m]).collect();
        let col_modes: Vec<usize> = (0..modes).filter(|&m| !in_rows[m]).collect();
        let nrows: usize = row_modes.iter().map(|&m| self.truncation[m]).product();
        let ncols: usize = col_modes.iter().map(|&m| self.truncation[m]).product();

        let mut out = DMatrix::from_element(nrows, ncols, Complex64::new(0.0, 0.0));
        let mut occ = vec![0usize; modes];
        for &c in &self.coefficients {
            let (mut r, mut col) = (0usize, 0usize);
            for &m in &row_modes {
                r = r * self.truncation[m] + occ[m];
            }
            for &m in &col_modes {
                col = col * self.truncation[m] + occ[m];
            }
            out[(r, col)] = c;
            // odometer over occupations, last mode fastest
            for m in (0..modes).rev() {
                occ[m] += 1;
                if occ[m] < self.truncation[m] {
                    break;
                }
                occ[m] = 0;
            }
        }
        Ok(out)
    }
}

/// `sum_{n >= cutoff} e^{-x} x^n / n!` for `x = |alpha|^2`, summed directly so
/// that tiny tails keep full relative precision.
pub fn poisson_tail(x: f64, cutoff: usize) -> f64 {
    if cutoff == 0 {
        return 1.0;
    }
    if x == 0.0 {
        return 0.0;
    }
    let ln_fact: f64 = (2..=cutoff).map(|k| (k as f64).ln()).sum();
    let mut term = (-x + cutoff as f64 * x.ln() - ln_fact).exp();
    let mut sum = 0.0;
    let mut n = cutoff;
    loop {
        sum += term;
        n += 1;
        term *= x / n as f64;
        if (n as f64 > x && term <= sum * 1e-18) || term == 0.0 || n > cutoff + 100_000 {
            break;
        }
    }
    sum.min(1.0)
}

/// Default per-mode cutoff `ceil(a^2 + 6 a + 12)` for largest amplitude `a`.
pub fn default_cutoff(max_abs: f64) -> usize {
    (max_abs * max_abs + 6.0 * max_abs + 12.0).ceil() as usize
}

/// Bound on the squared norm discarded by truncating `s` to `truncation`:
/// `(sum_i |kappa_i| sqrt(sum_m tail_m))^2`.
pub fn truncation_tail_bound(s: &SuperpositionState, truncation: &[usize]) -> f64 {
    let amp: f64 = s
        .terms()
        .iter()
        .map(|t| {
            let tails: f64 = t
                .point
                .amplitudes()
                .iter()
                .zip(truncation)
                .map(|(a, &cut)| poisson_tail(a.norm_sqr(), cut))
                .sum();
            t.kappa.norm() * tails.sqrt()
        })
        .sum();
    amp * amp
}

/// Per-mode cutoffs from the default policy, grown until the tail bound
/// drops below `truncation_tol` (or a hard cap is reached).
pub fn auto_truncation(s: &SuperpositionState, truncation_tol: f64) -> Vec<usize> {
    let mut cut: Vec<usize> = s
        .max_amplitude_per_mode()
        .into_iter()
        .map(default_cutoff)
        .collect();
    let cap = cut.iter().map(|c| c * 4).collect::<Vec<_>>();
    while truncation_tail_bound(s, &cut) > truncation_tol {
        let mut grew = false;
        for (c, &limit) in cut.iter_mut().zip(&cap) {
            if *c < limit {
                *c += 1 + *c / 8;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    cut
}

/// Single-mode Fock amplitudes `exp(-|a|^2/2) a^n / sqrt(n!)` for `n < cutoff`.
pub fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> Result<Vec<Complex64>> {
    let abs_sq = alpha.norm_sqr();
    if abs_sq > MAX_ABS_SQ {
        return Err(Error::FockOverflow { abs_sq, cutoff });
    }
    let mut out = Vec::with_capacity(cutoff);
    let mut c = Complex64::new((-0.5 * abs_sq).exp(), 0.0);
    for n in 0..cutoff {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        out.push(c);
    }
    Ok(out)
}

/// Fock expansion `sum_i kappa_i prod_m exp(-|a_im|^2/2) a_im^{n_m} / sqrt(n_m!)`.
pub fn to_fock(s: &SuperpositionState, truncation: &[usize]) -> Result<FockArray> {
    if truncation.len() != s.modes() {
        return Err(Error::ModeMismatch {
            expected: s.modes(),
            found: truncation.len(),
        });
    }
    let mut out = FockArray::zeros(truncation.to_vec())?;
    let modes = s.modes();
    for term in s.terms() {
        let per_mode = term
            .point
            .amplitudes()
            .iter()
            .zip(truncation)
            .map(|(a, &cut)| coherent_amplitudes(*a, cut))
            .collect::<Result<Vec<_>>>()?;
        // outer product built incrementally: prefix products per mode
        let mut occ = vec![0usize; modes];
        for slot in out.coefficients.iter_mut() {
            let mut v = term.kappa;
            for m in 0..modes {
                v *= per_mode[m][occ[m]];
            }
            *slot += v;
            for m in (0..modes).rev() {
                occ[m] += 1;
                if occ[m] < truncation[m] {
                    break;
                }
                occ[m] = 0;
            }
        }
    }
    out.tail_bound = truncation_tail_bound(s, truncation);
    Ok(out)
}

/// [`to_fock`] with [`auto_truncation`].
pub fn to_fock_auto(s: &SuperpositionState, truncation_tol: f64) -> Result<FockArray> {
    let cut = auto_truncation(s, truncation_tol);
    to_fock(s, &cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{CoherentPoint, Term};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Brute-force Poisson tail as `1 - head` in extended steps; only valid for
    /// tails well above double-precision cancellation.
    fn tail_by_complement(x: f64, cutoff: usize) -> f64 {
        let mut p = (-x).exp();
        let mut head = 0.0;
        for n in 0..cutoff {
            if n > 0 {
                p *= x / n as f64;
            }
            head += p;
        }
        1.0 - head
    }

    #[test]
    fn poisson_tail_matches_complement() {
        for &(x, cut) in &[(1.0, 3), (4.0, 5), (9.0, 12), (0.5, 1), (2.25, 4)] {
            let got = poisson_tail(x, cut);
            let oracle = tail_by_complement(x, cut);
            assert_abs_diff_eq!(got, oracle, epsilon = 1e-13);
        }
        assert_eq!(poisson_tail(0.0, 5), 0.0);
        assert_eq!(poisson_tail(3.0, 0), 1.0);
    }

    #[test]
    fn vacuum_expansion() {
        let f = to_fock(&SuperpositionState::vacuum(2), &[4, 3]).unwrap();
        assert_eq!(f.get(&[0, 0]), c(1.0, 0.0));
        assert_eq!(f.norm_sqr(), 1.0);
        assert_eq!(f.tail_bound(), 0.0);
    }

    #[test]
    fn coherent_expansion_closed_form() {
        let s = SuperpositionState::coherent(CoherentPoint::single(c(1.0, 0.0)));
        let f = to_fock(&s, &[30]).unwrap();
        let mut fact = 1.0f64;
        for n in 0..30 {
            if n > 0 {
                fact *= n as f64;
            }
            let expect = (-0.5f64).exp() / fact.sqrt();
            assert_abs_diff_eq!(f.get(&[n]).re, expect, epsilon = 1e-15);
        }
        assert!(f.tail_bound() < 1e-25, "tail {}", f.tail_bound());
        assert!(1.0 - f.norm_sqr() <= f.tail_bound() + 1e-15);
    }

    #[test]
    fn odd_cat_has_no_even_components() {
        let s = SuperpositionState::new(
            1,
            vec![
                Term::new(c(1.0, 0.0), CoherentPoint::single(c(1.0, 0.0))),
                Term::new(c(-1.0, 0.0), CoherentPoint::single(c(-1.0, 0.0))),
            ],
        )
        .unwrap();
        let f = to_fock(&s, &[30]).unwrap();
        for n in (0..30).step_by(2) {
            assert!(f.get(&[n]).norm() <= 1e-15);
        }
    }

    #[test]
    fn inner_products() {
        let vac = to_fock(&SuperpositionState::vacuum(1), &[5]).unwrap();
        assert_eq!(vac.inner(&vac).unwrap(), c(1.0, 0.0));
        let other = FockArray::zeros(vec![6]).unwrap();
        assert!(matches!(vac.inner(&other), Err(Error::ShapeMismatch(..))));
    }

    #[test]
    fn overflow_guard() {
        let s = SuperpositionState::coherent(CoherentPoint::single(c(30.0, 0.0)));
        assert!(matches!(to_fock(&s, &[10]), Err(Error::FockOverflow { .. })));
    }

    #[test]
    fn reshape_layout() {
        let mut f = FockArray::zeros(vec![2, 3, 2]).unwrap();
        f.set(&[1, 2, 0], c(5.0, 0.0));
        let m = f.reshape_bipartite(&[1]).unwrap();
        assert_eq!(m.shape(), (3, 4));
        // column index over modes (0, 2): n0 * 2 + n2 = 2
        assert_eq!(m[(2, 2)], c(5.0, 0.0));
        assert!(f.reshape_bipartite(&[]).is_err());
        assert!(f.reshape_bipartite(&[0, 1, 2]).is_err());
        assert!(f.reshape_bipartite(&[3]).is_err());
        assert!(f.reshape_bipartite(&[1, 1]).is_err());
    }

    #[test]
    fn default_policy_is_adequate_up_to_radius_three() {
        for &a in &[0.0, 0.5, 1.0, 2.0, 3.0] {
            let cut = default_cutoff(a);
            assert!(poisson_tail(a * a, cut) < 1e-12, "a = {a}, cut = {cut}");
        }
    }
}
