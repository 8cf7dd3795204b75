//! Finite superpositions of multimode coherent states.
//!
//! A [`SuperpositionState`] stores terms `kappa_i |alpha_i>` where each
//! `alpha_i` is a point in `C^M`. The coherent states are not orthogonal, so
//! every norm and rank computation goes through the Gram matrix of pairwise
//! overlaps rather than through the coefficient vector alone.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `<a|b>` for single-mode coherent states.
pub fn coherent_overlap(a: Complex64, b: Complex64) -> Complex64 {
    (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp()
}

/// Coherent amplitudes of one multimode coherent state, one per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentPoint(Vec<Complex64>);

impl CoherentPoint {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self(amplitudes)
    }

    pub fn single(alpha: Complex64) -> Self {
        Self(vec![alpha])
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); modes])
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Max-norm distance over modes.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Multimode overlap `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| coherent_overlap(*a, *b))
            .product()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn lex_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            let ord = a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub kappa: Complex64,
    pub point: CoherentPoint,
}

impl Term {
    pub fn new(kappa: Complex64, point: CoherentPoint) -> Self {
        Self { kappa, point }
    }
}

/// `sum_i kappa_i |alpha_i>` over a fixed number of modes.
///
/// Coefficients are not required to normalize the state; use
/// [`SuperpositionState::normalized`] when unit norm matters.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpositionState {
    modes: usize,
    terms: Vec<Term>,
}

impl SuperpositionState {
    /// Builds a state without canonicalizing it. Fails on mode mismatch or
    /// non-finite entries.
    pub fn new(modes: usize, terms: Vec<Term>) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter("a state needs at least one mode".into()));
        }
        for term in &terms {
            if term.point.modes() != modes {
                return Err(Error::ModeMismatch {
                    expected: modes,
                    found: term.point.modes(),
                });
            }
            if !term.point.is_finite() || !term.kappa.re.is_finite() || !term.kappa.im.is_finite()
            {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { modes, terms })
    }

    /// A single coherent product state with unit coefficient.
    pub fn coherent(point: CoherentPoint) -> Self {
        Self {
            modes: point.modes(),
            terms: vec![Term::new(Complex64::new(1.0, 0.0), point)],
        }
    }

    pub fn vacuum(modes: usize) -> Self {
        Self::coherent(CoherentPoint::vacuum(modes))
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Representation length (number of stored terms).
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn kappas(&self) -> DVector<Complex64> {
        DVector::from_iterator(self.terms.len(), self.terms.iter().map(|t| t.kappa))
    }

    pub fn points(&self) -> impl Iterator<Item = &CoherentPoint> {
        self.terms.iter().map(|t| &t.point)
    }

    /// Largest single-mode amplitude modulus over all terms.
    pub fn max_amplitude(&self) -> f64 {
        self.points().map(CoherentPoint::max_abs).fold(0.0, f64::max)
    }

    /// Largest amplitude modulus in each mode separately.
    pub fn max_amplitude_per_mode(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.modes];
        for p in self.points() {
            for (m, z) in p.amplitudes().iter().enumerate() {
                out[m] = out[m].max(z.norm());
            }
        }
        out
    }

    /// Smallest pairwise max-norm distance between points, `None` for fewer
    /// than two terms.
    pub fn min_separation(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (i, a) in self.terms.iter().enumerate() {
            for b in &self.terms[i + 1..] {
                let d = a.point.distance(&b.point);
                best = Some(best.map_or(d, |x| x.min(d)));
            }
        }
        best
    }

    /// Merges points within `merge_tol`, drops terms with `|kappa| <= drop_tol`
    /// and sorts the survivors lexicographically by `(re, im)` per mode.
    pub fn canonicalize(&self, merge_tol: f64, drop_tol: f64) -> Result<Self> {
        if !(merge_tol > 0.0 && drop_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "merge_tol and drop_tol must be positive, got {merge_tol}, {drop_tol}"
            )));
        }
        let mut sorted: Vec<&Term> = self.terms.iter().collect();
        sorted.sort_by(|a, b| a.point.lex_cmp(&b.point));

        // Each term joins the first representative within merge_tol, so the
        // representatives end up pairwise farther apart than merge_tol.
        let mut merged: Vec<Term> = Vec::with_capacity(sorted.len());
        for term in sorted {
            match merged
                .iter_mut()
                .find(|rep| rep.point.distance(&term.point) <= merge_tol)
            {
                Some(rep) => rep.kappa += term.kappa,
                None => merged.push(term.clone()),
            }
        }
        merged.retain(|t| t.kappa.norm() > drop_tol);
        if merged.is_empty() {
            return Err(Error::EmptyState);
        }
        merged.sort_by(|a, b| a.point.lex_cmp(&b.point));
        Ok(Self {
            modes: self.modes,
            terms: merged,
        })
    }

    /// `G[i][j] = <alpha_i|alpha_j>`.
    pub fn gram_matrix(&self) -> DMatrix<Complex64> {
        let r = self.terms.len();
        let mut g = DMatrix::from_element(r, r, Complex64::new(0.0, 0.0));
        for i in 0..r {
            g[(i, i)] = Complex64::new(1.0, 0.0);
            for j in i + 1..r {
                let v = self.terms[i].point.overlap(&self.terms[j].point);
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        g
    }

    /// `kappa^dagger G kappa`, possibly slightly negative from rounding.
    pub fn norm_sqr_raw(&self) -> f64 {
        let k = self.kappas();
        let g = self.gram_matrix();
        (k.adjoint() * g * &k)[(0, 0)].re
    }

    /// Norm through the Gram matrix. Fails when the squared norm is not
    /// resolvable against the rounding scale of the coefficient sum, which
    /// signals numerically dependent points.
    pub fn norm(&self) -> Result<f64> {
        let norm_sq = self.norm_sqr_raw();
        let scale: f64 = self.terms.iter().map(|t| t.kappa.norm()).sum();
        let floor = 64.0 * f64::EPSILON * scale * scale;
        if !(norm_sq > floor) {
            return Err(Error::DegenerateState { norm_sq, floor });
        }
        Ok(norm_sq.sqrt())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm()?;
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            modes: self.modes,
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.kappa * factor, t.point.clone()))
                .collect(),
        }
    }

    /// `<self|other>` through pairwise coherent overlaps.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes,
                found: other.modes,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &other.terms {
                acc += a.kappa.conj() * b.kappa * a.point.overlap(&b.point);
            }
        }
        Ok(acc)
    }

    /// Coefficients multiply, points concatenate; the result is re-sorted.
    pub fn tensor_product(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut amps = a.point.amplitudes().to_vec();
                amps.extend_from_slice(b.point.amplitudes());
                terms.push(Term::new(a.kappa * b.kappa, CoherentPoint::new(amps)));
            }
        }
        terms.sort_by(|x, y| x.point.lex_cmp(&y.point));
        Self {
            modes: self.modes + other.modes,
            terms,
        }
    }

    /// Same terms with every point mapped through `f`.
    pub(crate) fn map_points<F>(&self, modes: usize, f: F) -> Self
    where
        F: Fn(&CoherentPoint) -> CoherentPoint,
    {
        Self {
            modes,
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.kappa, f(&t.point)))
                .collect(),
        }
    }
}

/// Explicit decomposition of a mixed state into weighted superposition states.
#[derive(Debug, Clone)]
pub struct PureEnsemble {
    members: Vec<(f64, SuperpositionState)>,
}

impl PureEnsemble {
    pub fn new(members: Vec<(f64, SuperpositionState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("ensemble needs at least one member".into()));
        }
        let modes = members[0].1.modes();
        let mut total = 0.0;
        for (w, s) in &members {
            if !(*w > 0.0 && *w <= 1.0) {
                return Err(Error::InvalidParameter(format!("weight {w} outside (0, 1]")));
            }
            if s.modes() != modes {
                return Err(Error::ModeMismatch {
                    expected: modes,
                    found: s.modes(),
                });
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, SuperpositionState)] {
        &self.members
    }

    pub fn modes(&self) -> usize {
        self.members[0].1.modes()
    }

    /// Applies `f` to every member, keeping the weights.
    pub fn map_members<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&SuperpositionState) -> Result<SuperpositionState>,
    {
        let members = self
            .members
            .iter()
            .map(|(w, s)| f(s).map(|out| (*w, out)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { members })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(terms: &[(Complex64, Complex64)]) -> SuperpositionState {
        SuperpositionState::new(
            1,
            terms
                .iter()
                .map(|(k, a)| Term::new(*k, CoherentPoint::single(*a)))
                .collect(),
        )
        .unwrap()
    }

    /// Truncated Fock sum `sum_n conj(c_n(a)) c_n(b)`.
    fn overlap_by_fock_sum(a: Complex64, b: Complex64, cutoff: usize) -> Complex64 {
        let mut ca = (-0.5 * a.norm_sqr()).exp() * Complex64::new(1.0, 0.0);
        let mut cb = (-0.5 * b.norm_sqr()).exp() * Complex64::new(1.0, 0.0);
        let mut acc = ca.conj() * cb;
        for n in 1..cutoff {
            let s = (n as f64).sqrt();
            ca = ca * a / s;
            cb = cb * b / s;
            acc += ca.conj() * cb;
        }
        acc
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(coherent_overlap(c(0.0, 0.0), c(0.0, 0.0)), c(1.0, 0.0));
        let a = c(1.5, 0.5);
        assert_abs_diff_eq!((coherent_overlap(a, a) - 1.0).norm(), 0.0, epsilon = 1e-15);
        let oracle = overlap_by_fock_sum(c(1.0, 0.0), c(-1.0, 0.0), 60);
        let got = coherent_overlap(c(1.0, 0.0), c(-1.0, 0.0));
        assert_abs_diff_eq!((got - oracle).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(got.re, (-2.0f64).exp(), epsilon = 1e-16);
    }

    #[test]
    fn gram_examples() {
        let s = single(&[(c(1.0, 0.0), c(0.3, 0.2))]);
        assert_eq!(s.gram_matrix(), DMatrix::from_element(1, 1, c(1.0, 0.0)));

        let cat = single(&[(c(1.0, 0.0), c(1.0, 0.0)), (c(-1.0, 0.0), c(-1.0, 0.0))]);
        let g = cat.gram_matrix();
        assert_abs_diff_eq!(g[(0, 1)].re, (-2.0f64).exp(), epsilon = 1e-16);
        assert_abs_diff_eq!(g[(1, 0)].re, (-2.0f64).exp(), epsilon = 1e-16);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(SuperpositionState::vacuum(1).norm().unwrap(), 1.0);

        let alpha: f64 = 1.0;
        let n_alpha = 1.0 / (2.0 * (1.0 - (-2.0 * alpha * alpha).exp())).sqrt();
        let odd = single(&[
            (c(n_alpha, 0.0), c(alpha, 0.0)),
            (c(-n_alpha, 0.0), c(-alpha, 0.0)),
        ]);
        assert_abs_diff_eq!(odd.norm().unwrap(), 1.0, epsilon = 1e-12);

        let a = c(0.7, -0.1);
        let doubled = single(&[(c(1.0, 0.0), a), (c(1.0, 0.0), a)]);
        let merged = doubled.canonicalize(1e-10, 1e-12).unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged.terms()[0].kappa, c(2.0, 0.0));
        assert_abs_diff_eq!(merged.norm().unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn canonicalize_examples() {
        let a = c(0.4, 0.4);
        let cancel = single(&[(c(1.0, 0.0), a), (c(-1.0, 0.0), a)]);
        assert_eq!(cancel.canonicalize(1e-10, 1e-12), Err(Error::EmptyState));

        let near = single(&[(c(1.0, 0.0), c(0.0, 0.0)), (c(1.0, 0.0), c(1e-14, 0.0))]);
        let out = near.canonicalize(1e-10, 1e-12).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.terms()[0].kappa, c(2.0, 0.0));
        assert_eq!(out.terms()[0].point.amplitudes()[0], c(0.0, 0.0));

        let odd = single(&[(c(1.0, 0.0), c(1.0, 0.0)), (c(-1.0, 0.0), c(-1.0, 0.0))]);
        assert_eq!(odd.canonicalize(1e-10, 1e-12).unwrap().len(), 2);
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let s = single(&[
            (c(1.0, 0.0), c(1.0, 0.0)),
            (c(2.0, 0.0), c(-1.0, 0.5)),
            (c(3.0, 0.0), c(-1.0, -0.5)),
        ]);
        let out = s.canonicalize(1e-10, 1e-12).unwrap();
        let re_im: Vec<_> = out.points().map(|p| p.amplitudes()[0]).collect();
        assert_eq!(re_im, vec![c(-1.0, -0.5), c(-1.0, 0.5), c(1.0, 0.0)]);
    }

    #[test]
    fn tensor_product_examples() {
        let cat = single(&[(c(1.0, 0.0), c(1.0, 0.0)), (c(-1.0, 0.0), c(-1.0, 0.0))]);
        let vac = SuperpositionState::vacuum(1);
        assert_eq!(cat.tensor_product(&vac).len(), 2);
        assert_eq!(cat.tensor_product(&cat).len(), 4);
        let coh = single(&[(c(1.0, 0.0), c(0.5, 0.0))]);
        let prod = coh.tensor_product(&coh);
        assert_eq!(prod.len(), 1);
        assert_eq!(prod.modes(), 2);
    }

    #[test]
    fn rejects_malformed_states() {
        let bad = SuperpositionState::new(
            2,
            vec![Term::new(c(1.0, 0.0), CoherentPoint::single(c(0.0, 0.0)))],
        );
        assert!(matches!(bad, Err(Error::ModeMismatch { .. })));
        let nan = SuperpositionState::new(
            1,
            vec![Term::new(c(f64::NAN, 0.0), CoherentPoint::single(c(0.0, 0.0)))],
        );
        assert_eq!(nan, Err(Error::NonFinite));
    }

    #[test]
    fn ensemble_weights_must_sum_to_one() {
        let vac = SuperpositionState::vacuum(1);
        assert!(PureEnsemble::new(vec![(0.5, vac.clone()), (0.4, vac.clone())]).is_err());
        assert!(PureEnsemble::new(vec![(0.5, vac.clone()), (0.5, vac)]).is_ok());
    }

    #[test]
    fn overlap_matches_fock_sum_on_grid() {
        let grid = [-2.5, -1.0, 0.0, 0.7, 2.1];
        for &ar in &grid {
            for &bi in &grid {
                let a = c(ar, 0.3 * bi);
                let b = c(0.5 * ar, bi);
                let got = coherent_overlap(a, b);
                let oracle = overlap_by_fock_sum(a, b, 60);
                assert_abs_diff_eq!((got - oracle).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }
}
