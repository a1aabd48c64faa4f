//! Seeded generation of positive-definite inputs.
//!
//! Every draw is keyed by `(seed, stream)`: the ChaCha stream id selects an
//! independent keystream, so trial `i` of a campaign always sees the same
//! numbers no matter how trials are scheduled across threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::funcat::{hypothesis_fa_leq_fb, OrderBehavior, ScalarFn};
use crate::linalg::{operator_norm, spectral_decompose, Interval, Matrix, SymMatrix};
use crate::scalar::Real;

/// Draws tried before a rejection sampler gives up.
pub const REJECTION_BUDGET: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenConfig<T> {
    pub seed: u64,
    pub dim: usize,
    /// Cap on `lambda_max / lambda_min`.
    pub cond_max: T,
    pub spectrum: Interval<T>,
    /// Norm cap for contraction draws, in `(0, 1)`.
    pub norm_cap: Option<T>,
}

impl<T: Real> GenConfig<T> {
    /// Defaults: condition cap 100, spectrum in `[0.1, 10]`, no norm cap.
    pub fn new(seed: u64, dim: usize) -> Self {
        GenConfig {
            seed,
            dim,
            cond_max: T::lit(100.0),
            spectrum: Interval::closed(T::lit(0.1), T::lit(10.0)),
            norm_cap: None,
        }
    }

    pub fn with_cond_max(mut self, c: T) -> Self {
        self.cond_max = c;
        self
    }

    pub fn with_spectrum(mut self, lo: T, hi: T) -> Self {
        self.spectrum = Interval::closed(lo, hi);
        self
    }

    pub fn with_norm_cap(mut self, cap: T) -> Self {
        self.norm_cap = Some(cap);
        self
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Generation("dim must be at least 1".into()));
        }
        if !(self.cond_max >= T::one()) {
            return Err(Error::Generation(format!(
                "cond_max must be >= 1, got {}",
                self.cond_max
            )));
        }
        let s = self.spectrum;
        if !(s.lo > T::zero()) || !s.hi.is_finite() || s.lo > s.hi {
            return Err(Error::Generation(format!(
                "spectrum interval {s} must be a finite subset of (0, inf)"
            )));
        }
        if let Some(cap) = self.norm_cap {
            if !(cap > T::zero() && cap < T::one()) {
                return Err(Error::Generation(format!("norm_cap must lie in (0, 1), got {cap}")));
            }
        }
        Ok(())
    }

    /// Independent generator for one trial.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        trial_rng(self.seed, stream)
    }
}

pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

pub fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: T, hi: T) -> T {
    let u: f64 = rng.gen();
    lo + (hi - lo) * T::lit(u)
}

/// Orthogonal factor of the QR decomposition of a Gaussian matrix, with the
/// signs chosen so that `R` has a positive diagonal.
pub fn random_orthogonal<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    loop {
        let g: Vec<Vec<T>> = (0..n).map(|_| (0..n).map(|_| gaussian(rng)).collect()).collect();
        // columns of q, built by modified Gram-Schmidt with one reorthogonalization pass
        let mut q: Vec<Vec<T>> = Vec::with_capacity(n);
        let mut degenerate = false;
        #[allow(clippy::needless_range_loop)]
        for j in 0..n {
            let mut v: Vec<T> = (0..n).map(|i| g[i][j]).collect();
            for _ in 0..2 {
                for qk in &q {
                    let r: T = qk.iter().zip(&v).map(|(&a, &b)| a * b).sum();
                    for (vi, &qi) in v.iter_mut().zip(qk) {
                        *vi = *vi - r * qi;
                    }
                }
            }
            let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
            if !(norm > T::lit(1e-8)) {
                degenerate = true;
                break;
            }
            q.push(v.into_iter().map(|x| x / norm).collect());
        }
        if degenerate {
            continue;
        }
        let mut m = Matrix::zeros(n, n);
        for (j, col) in q.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        return m;
    }
}

/// Log-uniform eigenvalues in the configured interval, redrawn until the
/// condition cap is met.
pub fn random_spectrum<T: Real, R: Rng + ?Sized>(cfg: &GenConfig<T>, rng: &mut R) -> Result<Vec<T>> {
    cfg.validate()?;
    let (lo, hi) = (cfg.spectrum.lo.ln(), cfg.spectrum.hi.ln());
    for _ in 0..REJECTION_BUDGET {
        let lams: Vec<T> = (0..cfg.dim).map(|_| uniform(rng, lo, hi).exp()).collect();
        let lmin = lams.iter().cloned().fold(T::infinity(), T::min);
        let lmax = lams.iter().cloned().fold(T::zero(), T::max);
        if lmax <= cfg.cond_max * lmin {
            return Ok(lams);
        }
    }
    Err(Error::Generation(format!(
        "no spectrum in {} with condition number <= {} after {REJECTION_BUDGET} draws",
        cfg.spectrum, cfg.cond_max
    )))
}

pub fn spd_from<T: Real, R: Rng + ?Sized>(cfg: &GenConfig<T>, rng: &mut R) -> Result<SymMatrix<T>> {
    let lams = random_spectrum(cfg, rng)?;
    let q = random_orthogonal(cfg.dim, rng);
    Ok(SymMatrix::from_spectrum(&q, &lams))
}

/// `Q diag(lambda) Q^T`, deterministic in `(cfg.seed, stream)`.
pub fn random_spd<T: Real>(cfg: &GenConfig<T>, stream: u64) -> Result<SymMatrix<T>> {
    spd_from(cfg, &mut cfg.rng(stream))
}

/// Rescales `a` so that its norm is `u * cap` with `u` uniform in `[0.5, 1]`.
fn rescale_to_cap<T: Real, R: Rng + ?Sized>(mats: &mut [&mut SymMatrix<T>], reference_norm: T, cap: T, rng: &mut R) {
    let u = uniform(rng, T::half(), T::one());
    let s = u * cap / reference_norm;
    for m in mats.iter_mut() {
        **m = m.scale(s);
    }
}

fn require_cap<T: Real>(cfg: &GenConfig<T>) -> Result<T> {
    cfg.norm_cap
        .ok_or_else(|| Error::Generation("contraction draws need norm_cap".into()))
}

pub fn contraction_from<T: Real, R: Rng + ?Sized>(cfg: &GenConfig<T>, rng: &mut R) -> Result<SymMatrix<T>> {
    let cap = require_cap(cfg)?;
    let mut a = spd_from(cfg, rng)?;
    let n = operator_norm(&a)?;
    rescale_to_cap(&mut [&mut a], n, cap, rng);
    Ok(a)
}

/// Positive-definite matrix with operator norm in `[cap/2, cap]`.
pub fn random_contraction_spd<T: Real>(cfg: &GenConfig<T>, stream: u64) -> Result<SymMatrix<T>> {
    contraction_from(cfg, &mut cfg.rng(stream))
}

/// Either a plain SPD draw or a contraction, depending on `norm_cap`.
pub fn operand_from<T: Real, R: Rng + ?Sized>(cfg: &GenConfig<T>, rng: &mut R) -> Result<SymMatrix<T>> {
    if cfg.norm_cap.is_some() {
        contraction_from(cfg, rng)
    } else {
        spd_from(cfg, rng)
    }
}

pub fn commuting_pair_from<T: Real, R: Rng + ?Sized>(
    cfg: &GenConfig<T>,
    rng: &mut R,
) -> Result<(SymMatrix<T>, SymMatrix<T>)> {
    let q = random_orthogonal(cfg.dim, rng);
    let la = random_spectrum(cfg, rng)?;
    let lb = random_spectrum(cfg, rng)?;
    Ok((SymMatrix::from_spectrum(&q, &la), SymMatrix::from_spectrum(&q, &lb)))
}

/// Two matrices sharing one random eigenbasis.
pub fn random_commuting_pair<T: Real>(cfg: &GenConfig<T>, stream: u64) -> Result<(SymMatrix<T>, SymMatrix<T>)> {
    commuting_pair_from(cfg, &mut cfg.rng(stream))
}

/// Positive-definite perturbation: an SPD draw scaled by a uniform factor in `[0.05, 1]`.
pub fn psd_perturbation<T: Real, R: Rng + ?Sized>(cfg: &GenConfig<T>, rng: &mut R) -> Result<SymMatrix<T>> {
    let p = spd_from(cfg, rng)?;
    let s = uniform(rng, T::lit(0.05), T::one());
    Ok(p.scale(s))
}

/// Random symmetric matrix with operator norm 1.
pub fn unit_symmetric<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SymMatrix<T>> {
    let mut data = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let g = gaussian(rng);
            data[i * n + j] = g;
            data[j * n + i] = g;
        }
    }
    let h = SymMatrix::new(n, data)?;
    let norm = operator_norm(&h)?;
    Ok(h.scale(norm.recip()))
}

/// Random `n x k` Gaussian factor with `k` uniform in `1..=n`.
pub fn random_factor<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    let k = rng.gen_range(1..=n);
    let data: Vec<T> = (0..n * k).map(|_| gaussian(rng)).collect();
    Matrix::new(n, k, data).expect("shape")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairStrategy {
    /// Build the pair so that `f(A) <= f(B)` holds by construction.
    Construct,
    /// Draw independent pairs and keep the first that satisfies the hypothesis.
    Reject,
}

#[derive(Clone, Debug)]
pub struct HypothesisPair<T> {
    pub a: SymMatrix<T>,
    pub b: SymMatrix<T>,
    /// Draws consumed, including the accepted one.
    pub attempts: usize,
}

/// A pair `(A, B)` with `f(A) <= f(B)` at tolerance `tol`.
///
/// Construction: for operator-monotone `f` draw `A` and set `B = A + P`; for
/// operator-monotone-decreasing `f` draw `B` and set `A = B + P`; otherwise
/// set `B = f^{-1}(f(A) + P)`. Contraction configs rescale the ordered pair
/// jointly, which preserves the order. Every candidate is verified.
pub fn pair_with_hypothesis<T: Real, R: Rng + ?Sized>(
    f: &ScalarFn<T>,
    cfg: &GenConfig<T>,
    strategy: PairStrategy,
    tol: T,
    rng: &mut R,
) -> Result<HypothesisPair<T>> {
    let strategy = match (strategy, f.order()) {
        (PairStrategy::Construct, OrderBehavior::Other) if !f.has_inverse() => PairStrategy::Reject,
        (s, _) => s,
    };
    for attempt in 1..=REJECTION_BUDGET {
        let candidate = match strategy {
            PairStrategy::Reject => Some((operand_from(cfg, rng)?, operand_from(cfg, rng)?)),
            PairStrategy::Construct => construct_candidate(f, cfg, rng)?,
        };
        let Some((a, b)) = candidate else { continue };
        match hypothesis_fa_leq_fb(f, &a, &b, tol) {
            Ok(true) => {
                return Ok(HypothesisPair {
                    a,
                    b,
                    attempts: attempt,
                })
            }
            Ok(false) | Err(Error::Domain { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Generation(format!(
        "no pair with f(A) <= f(B) for `{}` after {REJECTION_BUDGET} draws; try the construct strategy",
        f.id()
    )))
}

fn construct_candidate<T: Real, R: Rng + ?Sized>(
    f: &ScalarFn<T>,
    cfg: &GenConfig<T>,
    rng: &mut R,
) -> Result<Option<(SymMatrix<T>, SymMatrix<T>)>> {
    let plain = GenConfig { norm_cap: None, ..*cfg };
    match f.order() {
        OrderBehavior::Constant => Ok(Some((operand_from(cfg, rng)?, operand_from(cfg, rng)?))),
        OrderBehavior::OperatorMonotone | OrderBehavior::OperatorMonotoneDecreasing => {
            let mut low = spd_from(&plain, rng)?;
            let p = psd_perturbation(&plain, rng)?;
            let mut high = &low + &p;
            if let Some(cap) = cfg.norm_cap {
                let n = operator_norm(&high)?;
                rescale_to_cap(&mut [&mut low, &mut high], n, cap, rng);
            }
            if f.order() == OrderBehavior::OperatorMonotone {
                Ok(Some((low, high)))
            } else {
                Ok(Some((high, low)))
            }
        }
        OrderBehavior::Other => {
            let a = operand_from(cfg, rng)?;
            let fa = f.apply(&a)?;
            let p = psd_perturbation(&plain, rng)?.scale(operator_norm(&fa)?.max(T::one()));
            let target = spectral_decompose(&(&fa + &p))?;
            let dom = f.domain();
            let mut vals = Vec::with_capacity(target.dim());
            for &y in &target.eigenvalues {
                match f.inverse(y) {
                    Some(x) if x.is_finite() && dom.contains(x) => vals.push(x),
                    _ => return Ok(None),
                }
            }
            let b = SymMatrix::from_spectrum(&target.basis, &vals);
            Ok(Some((a, b)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcat::catalogue_fn;
    use crate::linalg::{lambda_min, spectrum_in};

    #[test]
    fn degenerate_interval_scalar() {
        let cfg = GenConfig::<f64>::new(3, 1).with_spectrum(2.0, 2.0);
        let m = random_spd(&cfg, 0).unwrap();
        assert!((m.get(0, 0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn postconditions_dims_one_to_eight() {
        for dim in 1..=8 {
            let cfg = GenConfig::<f64>::new(11, dim).with_cond_max(20.0);
            for stream in 0..20 {
                let m = random_spd(&cfg, stream).unwrap();
                let d = m.eigen().unwrap();
                assert!(spectrum_in(&m, &cfg.spectrum, 1e-12).unwrap());
                assert!(d.lambda_max() / d.lambda_min() <= 20.0 * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn determinism_by_seed_and_stream() {
        let cfg = GenConfig::<f64>::new(7, 4);
        let a = random_spd(&cfg, 0).unwrap();
        let b = random_spd(&cfg, 0).unwrap();
        let c = random_spd(&cfg, 1).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        assert_ne!(a.as_slice(), c.as_slice());
    }

    #[test]
    fn orthogonal_factor_is_orthogonal() {
        let mut rng = trial_rng(1, 2);
        for n in 1..=8 {
            let q: Matrix<f64> = random_orthogonal(n, &mut rng);
            assert!(q.transpose().matmul(&q).max_abs_diff(&Matrix::identity(n)) < 1e-14);
        }
    }

    #[test]
    fn contractions() {
        for dim in 1..=6 {
            let cfg = GenConfig::<f64>::new(5, dim).with_norm_cap(0.9);
            for s in 0..20 {
                let c = random_contraction_spd(&cfg, s).unwrap();
                let n = operator_norm(&c).unwrap();
                assert!((0.45 - 1e-15..=0.9 + 1e-15).contains(&n));
                assert!(lambda_min(&c).unwrap() > 0.0);
                // (I - C) stays safely definite: an independent eigensolve of I - C
                let gap = lambda_min(&(&SymMatrix::identity(dim) - &c)).unwrap();
                assert!(gap >= 0.1 - 1e-12);
            }
        }
        let cfg = GenConfig::<f64>::new(5, 1).with_norm_cap(0.5);
        let c = random_contraction_spd(&cfg, 0).unwrap();
        assert!(c.get(0, 0) > 0.0 && c.get(0, 0) <= 0.5);
        assert!(random_contraction_spd(&GenConfig::<f64>::new(5, 2), 0).is_err());
    }

    #[test]
    fn commuting_pairs_commute() {
        for dim in 1..=6 {
            let cfg = GenConfig::<f64>::new(9, dim);
            let (a, b) = random_commuting_pair(&cfg, 3).unwrap();
            let ab = a.matmul(&b);
            let ba = b.matmul(&a);
            let scale = a.frobenius_norm() * b.frobenius_norm();
            assert!(ab.max_abs_diff(&ba) <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn config_errors() {
        assert!(random_spd(&GenConfig::<f64>::new(1, 0), 0).is_err());
        assert!(random_spd(&GenConfig::<f64>::new(1, 2).with_cond_max(0.5), 0).is_err());
        assert!(random_spd(&GenConfig::<f64>::new(1, 2).with_spectrum(-1.0, 1.0), 0).is_err());
        assert!(random_spd(&GenConfig::<f64>::new(1, 2).with_norm_cap(1.5), 0).is_err());
        // unreachable: huge interval, tiny cap, many eigenvalues
        let cfg = GenConfig::<f64>::new(1, 8)
            .with_spectrum(1e-6, 1e6)
            .with_cond_max(1.0 + 1e-9);
        assert!(matches!(random_spd(&cfg, 0), Err(Error::Generation(_))));
    }

    #[test]
    fn constructed_pairs_satisfy_hypothesis() {
        for id in ["inv", "square", "exp", "identity", "poly_nonneg"] {
            let f = catalogue_fn::<f64>(id).unwrap();
            for dim in 2..=5 {
                let cfg = GenConfig::new(13, dim);
                let mut rng = cfg.rng(dim as u64);
                let p = pair_with_hypothesis(&f, &cfg, PairStrategy::Construct, 1e-8, &mut rng).unwrap();
                assert!(hypothesis_fa_leq_fb(&f, &p.a, &p.b, 1e-8).unwrap(), "{id}");
            }
        }
        for id in ["resolvent", "moebius"] {
            let f = catalogue_fn::<f64>(id).unwrap();
            let cfg = GenConfig::new(17, 3).with_norm_cap(0.9);
            let mut rng = cfg.rng(0);
            let p = pair_with_hypothesis(&f, &cfg, PairStrategy::Construct, 1e-8, &mut rng).unwrap();
            assert_eq!(p.attempts, 1);
            assert!(operator_norm(&p.b).unwrap() <= 0.9 + 1e-15);
        }
    }

    #[test]
    fn rejection_for_moebius_on_contractions() {
        let f = catalogue_fn::<f64>("moebius").unwrap();
        let cfg = GenConfig::new(21, 2).with_norm_cap(0.9);
        let mut total = 0;
        for s in 0..20 {
            let mut rng = cfg.rng(s);
            let p = pair_with_hypothesis(&f, &cfg, PairStrategy::Reject, 1e-10, &mut rng).unwrap();
            assert!(hypothesis_fa_leq_fb(&f, &p.a, &p.b, 1e-10).unwrap());
            total += p.attempts;
        }
        let rate = 20.0 / total as f64;
        assert!(rate > 0.0 && rate <= 1.0);
    }
}
