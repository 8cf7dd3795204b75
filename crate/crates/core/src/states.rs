//! Named states and reference constructions: cat states, Fock-state
//! approximants built from finitely many coherent states, exact Fock
//! references, squeezed vacuum, the two-copy experiment and random
//! superpositions for property tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::FockArray;
use crate::state::{CoherentPoint, SuperpositionState, Term};
use crate::tolerance::Tolerances;
use crate::transforms::SplitterUnitary;

/// Highest Fock number the difference-quotient construction will attempt.
pub const MAX_DIFFERENCE_QUOTIENT_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Normalized `N (|alpha> +/- |-alpha>)`.
pub fn cat_state(alpha: Complex64, parity: Parity, tol: &Tolerances) -> Result<SuperpositionState> {
    let abs_sq = alpha.norm_sqr();
    if parity == Parity::Odd && alpha.norm() <= tol.merge_tol {
        return Err(Error::DegenerateAlpha(alpha.norm()));
    }
    let sign = parity.sign();
    // 1 - exp(-2|a|^2) via exp_m1 keeps precision for small |a|
    let overlap_term = match parity {
        Parity::Even => 2.0 + (-2.0 * abs_sq).exp_m1(),
        Parity::Odd => -(-2.0 * abs_sq).exp_m1(),
    };
    let n = 1.0 / (2.0 * overlap_term).sqrt();
    SuperpositionState::new(
        1,
        vec![
            Term::new(Complex64::new(n, 0.0), CoherentPoint::single(alpha)),
            Term::new(Complex64::new(sign * n, 0.0), CoherentPoint::single(-alpha)),
        ],
    )?
    .canonicalize(tol.merge_tol, tol.drop_tol)
}

/// Grid of coherent amplitudes used by the finite-difference Fock approximant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// `{(j - n/2) h}`: symmetric about the origin. Odd error terms cancel, so
    /// the state error is `O(h^2)` and `n = 1` is exactly the odd cat with
    /// `alpha = h/2`.
    #[default]
    Centered,
    /// `{j h}`: one-sided grid starting at the vacuum; state error `O(h)`.
    Forward,
}

impl Stencil {
    fn point(self, j: usize, n: usize, h: f64) -> f64 {
        match self {
            Stencil::Centered => (j as f64 - n as f64 / 2.0) * h,
            Stencil::Forward => j as f64 * h,
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// [`fock_difference_quotient_with`] on the centered stencil.
pub fn fock_difference_quotient(n: usize, h: f64, tol: &Tolerances) -> Result<SuperpositionState> {
    fock_difference_quotient_with(n, h, Stencil::Centered, tol)
}

/// `n`-th finite difference of `exp(|x|^2/2) |x>` with step `h`, divided by
/// `sqrt(n!) h^n`. Tends to `|n>` as `h -> 0` and uses `n + 1` coherent
/// states. Not normalized.
///
/// Refuses when the alternating sum cancels more digits than the rank
/// tolerance can absorb: the cancellation factor
/// `n! exp(max_j |x_j|^2 / 2) / h^n` must not exceed `1 / rank_rel_tol` (the
/// approximant has norm close to one).
pub fn fock_difference_quotient_with(
    n: usize,
    h: f64,
    stencil: Stencil,
    tol: &Tolerances,
) -> Result<SuperpositionState> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step h must be positive, got {h}")));
    }
    let denom = factorial(n).sqrt() * h.powi(n as i32);
    let terms: Vec<Term> = (0..=n)
        .map(|j| {
            let x = stencil.point(j, n, h);
            let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
            let kappa = sign * factorial(n) / (factorial(j) * factorial(n - j))
                * (0.5 * x * x).exp()
                / denom;
            Term::new(Complex64::new(kappa, 0.0), CoherentPoint::single(Complex64::new(x, 0.0)))
        })
        .collect();
    let reach = (0..=n).map(|j| stencil.point(j, n, h).abs()).fold(0.0, f64::max);
    let factor = factorial(n) * (0.5 * reach * reach).exp() / h.powi(n as i32);
    if n > MAX_DIFFERENCE_QUOTIENT_ORDER || !(factor * tol.rank_rel_tol <= 1.0) {
        return Err(Error::IllConditioned { n, h, factor });
    }
    SuperpositionState::new(1, terms)?.canonicalize(tol.merge_tol, tol.drop_tol)
}

/// `|<n|psi>|^2 / <psi|psi>` evaluated on the Fock expansion of `s` (single
/// mode), which avoids the cancellation a Gram-matrix norm suffers for
/// difference-quotient coefficients.
pub fn fock_fidelity(s: &SuperpositionState, n: usize, cutoff: usize) -> Result<f64> {
    if s.modes() != 1 {
        return Err(Error::ModeMismatch {
            expected: 1,
            found: s.modes(),
        });
    }
    if cutoff <= n {
        return Err(Error::TruncationTooSmall { needed: n, got: cutoff });
    }
    let f = crate::fock::to_fock(s, &[cutoff])?;
    Ok(f.get(&[n]).norm_sqr() / f.norm_sqr())
}

/// `|n>` in a single-mode array with the given cutoff.
pub fn fock_exact(n: usize, cutoff: usize) -> Result<FockArray> {
    if cutoff <= n {
        return Err(Error::TruncationTooSmall { needed: n, got: cutoff });
    }
    let mut f = FockArray::zeros(vec![cutoff])?;
    f.set(&[n], Complex64::new(1.0, 0.0));
    Ok(f)
}

/// `2^{-n/2} sum_j binomial(n, j)^{1/2} |j, n - j>`, the balanced-splitter
/// image of `|n, 0>`.
pub fn fock_split_reference(n: usize, cutoff: usize) -> Result<FockArray> {
    if cutoff <= n {
        return Err(Error::TruncationTooSmall { needed: n, got: cutoff });
    }
    let mut f = FockArray::zeros(vec![cutoff, cutoff])?;
    let scale = 2f64.powf(-(n as f64) / 2.0);
    for j in 0..=n {
        f.set(&[j, n - j], Complex64::new(scale * binomial(n, j).sqrt(), 0.0));
    }
    Ok(f)
}

/// Squeezed vacuum `mu^{-1/2} exp(-(nu / 2 mu) a^dagger^2) |0>` with
/// `|nu|^2 = mu^2 - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedVacuumParams {
    mu: f64,
    nu: Complex64,
}

impl SqueezedVacuumParams {
    pub fn new(mu: f64, nu: Complex64) -> Result<Self> {
        if !(mu >= 1.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("mu must be >= 1, got {mu}")));
        }
        if (nu.norm_sqr() - (mu * mu - 1.0)).abs() > 1e-12 * mu * mu {
            return Err(Error::InvalidParameter(format!(
                "|nu|^2 = {} but mu^2 - 1 = {}",
                nu.norm_sqr(),
                mu * mu - 1.0
            )));
        }
        Ok(Self { mu, nu })
    }

    /// `nu = sqrt(mu^2 - 1) e^{i phase}`.
    pub fn from_mu(mu: f64, phase: f64) -> Result<Self> {
        if !(mu >= 1.0) {
            return Err(Error::InvalidParameter(format!("mu must be >= 1, got {mu}")));
        }
        Self::new(mu, Complex64::from_polar((mu * mu - 1.0).sqrt(), phase))
    }

    /// `mu = cosh r`, `nu = e^{i phase} sinh r`.
    pub fn from_squeezing(r: f64, phase: f64) -> Result<Self> {
        Self::new(r.cosh(), Complex64::from_polar(r.sinh(), phase))
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> Complex64 {
        self.nu
    }
}

/// Fock coefficients `c_{2m} = mu^{-1/2} (-nu / 2 mu)^m sqrt((2m)!) / m!` below
/// `cutoff`, with the tail bound recorded but not enforced.
///
/// `|c_{2m+2}|^2 / |c_{2m}|^2 = q (2m+1)/(2m+2) < q` with `q = |nu / mu|^2`, so
/// the discarded weight is at most `|c_{2M}|^2 / (1 - q)` for the first
/// dropped index `2M`.
pub fn squeezed_vacuum_fock(p: &SqueezedVacuumParams, cutoff: usize) -> Result<FockArray> {
    let mut f = FockArray::zeros(vec![cutoff])?;
    let ratio = -p.nu / (2.0 * p.mu);
    let mut c = Complex64::new(p.mu.powf(-0.5), 0.0);
    let mut m = 0usize;
    while 2 * m < cutoff {
        f.set(&[2 * m], c);
        c = c * ratio * (((2 * m + 1) * (2 * m + 2)) as f64).sqrt() / (m + 1) as f64;
        m += 1;
    }
    let q = (p.nu / p.mu).norm_sqr();
    let tail = if q == 0.0 { 0.0 } else { c.norm_sqr() / (1.0 - q) };
    FockArray::from_parts(vec![cutoff], f.coefficients().to_vec(), tail)
}

/// [`squeezed_vacuum_fock`] that fails when the tail bound exceeds
/// `truncation_tol`.
pub fn squeezed_vacuum_fock_checked(
    p: &SqueezedVacuumParams,
    cutoff: usize,
    tol: &Tolerances,
) -> Result<FockArray> {
    let f = squeezed_vacuum_fock(p, cutoff)?;
    if !f.is_adequate(tol.truncation_tol) {
        return Err(Error::TruncationInadequate {
            tail_bound: f.tail_bound(),
            tolerance: tol.truncation_tol,
        });
    }
    Ok(f)
}

/// Squeezed vacuum in port 0 of `splitter`, vacuum elsewhere, with the output
/// kept below `out_cutoff` photons per mode. The input is expanded far enough
/// (`N (out_cutoff - 1) + 1`) that every kept output coefficient is exact, so
/// growing the cutoff only ever adds rows and columns to the coefficient
/// matrix.
pub fn squeezed_vacuum_split(
    p: &SqueezedVacuumParams,
    splitter: &SplitterUnitary,
    out_cutoff: usize,
) -> Result<FockArray> {
    if out_cutoff == 0 {
        return Err(Error::InvalidParameter("output cutoff must be >= 1".into()));
    }
    let in_cutoff = splitter.size() * (out_cutoff - 1) + 1;
    let input = squeezed_vacuum_fock(p, in_cutoff)?;
    splitter.apply_to_fock_input_restricted(&input, out_cutoff)
}

/// `(|a> - |-a>)^{(x)2}` with unit coefficients, and its image under the
/// balanced beam splitter: terms at `(+/- sqrt2 a, 0)` and `(0, +/- sqrt2 a)`.
pub fn two_copy_experiment(
    alpha: Complex64,
    tol: &Tolerances,
) -> Result<(SuperpositionState, SuperpositionState)> {
    if alpha.norm() <= tol.merge_tol {
        return Err(Error::DegenerateAlpha(alpha.norm()));
    }
    let cat = SuperpositionState::new(
        1,
        vec![
            Term::new(Complex64::new(1.0, 0.0), CoherentPoint::single(alpha)),
            Term::new(Complex64::new(-1.0, 0.0), CoherentPoint::single(-alpha)),
        ],
    )?;
    let input = cat
        .tensor_product(&cat)
        .canonicalize(tol.merge_tol, tol.drop_tol)?;
    let output = SplitterUnitary::balanced_bs().apply(&input, tol)?;
    Ok((input, output))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomBounds {
    pub radius: f64,
    pub min_sep: f64,
}

impl Default for RandomBounds {
    fn default() -> Self {
        Self {
            radius: 2.0,
            min_sep: 0.1,
        }
    }
}

const MAX_ATTEMPTS: usize = 10_000;

fn disk_sample(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, 2.0 * PI * rng.gen::<f64>())
}

/// Coefficient uniform in the annulus `0.1 <= |kappa| <= 1`.
fn annulus_sample(rng: &mut ChaCha8Rng) -> Complex64 {
    let (inner, outer) = (0.1f64, 1.0f64);
    let r = (inner * inner + rng.gen::<f64>() * (outer * outer - inner * inner)).sqrt();
    Complex64::from_polar(r, 2.0 * PI * rng.gen::<f64>())
}

/// `r` single-mode points uniform in the disk, pairwise at least `min_sep`
/// apart; deterministic in `seed`.
pub fn random_state(r: usize, seed: u64, bounds: RandomBounds) -> Result<SuperpositionState> {
    random_multimode_state(r, 1, seed, bounds)
}

/// Like [`random_state`] with points in the product of `modes` disks and
/// separation measured in the max-norm.
pub fn random_multimode_state(
    r: usize,
    modes: usize,
    seed: u64,
    bounds: RandomBounds,
) -> Result<SuperpositionState> {
    if r == 0 || modes == 0 {
        return Err(Error::InvalidParameter("need r >= 1 and modes >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<CoherentPoint> = Vec::with_capacity(r);
    let mut attempts = 0;
    while points.len() < r {
        attempts += 1;
        if attempts > MAX_ATTEMPTS * r {
            return Err(Error::SamplingFailed {
                r,
                min_sep: bounds.min_sep,
                radius: bounds.radius,
                attempts,
            });
        }
        let candidate =
            CoherentPoint::new((0..modes).map(|_| disk_sample(&mut rng, bounds.radius)).collect());
        if points.iter().all(|p| p.distance(&candidate) >= bounds.min_sep) {
            points.push(candidate);
        }
    }
    let terms = points
        .into_iter()
        .map(|p| Term::new(annulus_sample(&mut rng), p))
        .collect();
    SuperpositionState::new(modes, terms)
}
