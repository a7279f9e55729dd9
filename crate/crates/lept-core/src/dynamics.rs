//! Master-equation time evolution, modal-amplitude extraction through the
//! biorthogonal left eigenvectors, and the exponential-fit pipeline that
//! recovers generator eigenvalues from (possibly noisy) time series.
//!
//! Propagation uses the scaling-and-squaring matrix exponential of L·Δt
//! rather than an eigendecomposition, so it stays accurate at exceptional
//! points where the eigenbasis is defective.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::eigen::Spectrum;
use crate::expm::expm;
use crate::model::{
    build_liouvillian, unvec_density, vec_density, DensityMatrix, LiouvillianMatrix, SuperVector,
    SystemParams, DIM, LDIM,
};
use crate::CoreError;

/// Gauss–Newton iteration budget for the exponential fit.
const FIT_MAX_ITERS: usize = 200;

/// Absolute gradient-norm stopping tolerance of the fit.
const FIT_GRAD_TOL: f64 = 1e-12;

/// A series whose largest sample magnitude is below this is treated as
/// pure noise floor / identically zero.
const NO_SIGNAL_FLOOR: f64 = 1e-12;

/// Strictly increasing sampling times shared by evolution, projection and
/// fitting.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// `n` uniformly spaced samples covering [t0, t1].
    pub fn uniform(t0: f64, t1: f64, n: usize) -> Result<TimeGrid, CoreError> {
        if !(t0.is_finite() && t1.is_finite()) || t0 < 0.0 || t1 <= t0 || n < 2 {
            return Err(CoreError::InvalidParams(format!(
                "time grid needs 0 <= t0 < t1 and n >= 2, got [{t0}, {t1}] with n = {n}"
            )));
        }
        let step = (t1 - t0) / (n - 1) as f64;
        Ok(TimeGrid {
            times: (0..n).map(|k| t0 + step * k as f64).collect(),
        })
    }

    /// Arbitrary strictly increasing non-negative times.
    pub fn from_times(times: Vec<f64>) -> Result<TimeGrid, CoreError> {
        let ok = times.len() >= 2
            && times[0] >= 0.0
            && times.iter().all(|t| t.is_finite())
            && times.windows(2).all(|w| w[1] > w[0]);
        if !ok {
            return Err(CoreError::InvalidParams(
                "times must be >= 2 finite, non-negative, strictly increasing values".into(),
            ));
        }
        Ok(TimeGrid { times })
    }

    /// Default window for eigenvalue extraction: 50 samples over [0, 5/κ],
    /// several lifetimes of the slowest nonzero mode while the fastest
    /// (decaying at κ) is still resolved.
    pub fn default_extraction(kappa: f64) -> Result<TimeGrid, CoreError> {
        TimeGrid::uniform(0.0, 5.0 / kappa, 50)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    pub fn t1(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Mean sample spacing.
    pub fn step(&self) -> f64 {
        (self.t1() - self.t0()) / (self.len() - 1) as f64
    }
}

/// The modal amplitude A_j(t) of one eigencomponent along a trajectory.
#[derive(Clone, Debug)]
pub struct AmplitudeSeries {
    pub branch: usize,
    pub samples: Vec<(f64, Complex64)>,
}

/// Converged single-exponential fit A(t) ≈ C·e^{B·t}.
#[derive(Clone, Copy, Debug)]
pub struct FitResult {
    /// Complex rate B — the recovered eigenvalue.
    pub rate: Complex64,
    /// Complex prefactor C.
    pub amplitude: Complex64,
    /// Final value of the minimized error Σ_k |C·e^{B t_k} − A(t_k)|².
    pub residual: f64,
    /// Gauss–Newton iterations consumed.
    pub iterations: usize,
    /// True when the recovered |Im B| is within 10% of the Nyquist rate
    /// π/Δt of the series, i.e. the frequency may be an alias of a faster
    /// oscillation the grid cannot resolve.
    pub aliased: bool,
}

/// |g,0⟩⟨g,0| — the unique steady state of the generator.
pub fn ground_state() -> DensityMatrix {
    let mut rho = DensityMatrix::zeros();
    rho[(0, 0)] = Complex64::new(1.0, 0.0);
    rho
}

/// ρ0 = |ψ⟩⟨ψ| for |ψ⟩ = (|g,0⟩ + i|e,0⟩)/√2: the equal superposition of
/// the qubit levels with the mode in vacuum, which seeds every
/// eigencomponent with a nonvanishing amplitude at generic parameters.
pub fn initial_superposition_state() -> DensityMatrix {
    let mut rho = DensityMatrix::zeros();
    rho[(0, 0)] = Complex64::new(0.5, 0.0);
    rho[(1, 1)] = Complex64::new(0.5, 0.0);
    rho[(0, 1)] = Complex64::new(0.0, -0.5);
    rho[(1, 0)] = Complex64::new(0.0, 0.5);
    rho
}

/// Evolve ρ0 through the master equation, returning ρ(t) at every grid
/// sample.  Uniform grids reuse a single cached propagator e^{L·Δt}.
pub fn evolve(params: &SystemParams, rho0: &DensityMatrix, grid: &TimeGrid) -> Vec<DensityMatrix> {
    let l = build_liouvillian(params);
    let mut states = Vec::with_capacity(grid.len());
    let mut v = vec_density(rho0);
    let mut prev_t = 0.0;
    let mut cached: Option<(f64, LiouvillianMatrix)> = None;
    for &t in grid.times() {
        let dt = t - prev_t;
        if dt > 0.0 {
            let hit = matches!(&cached, Some((cdt, _)) if *cdt == dt);
            if !hit {
                cached = Some((dt, expm(&(l * Complex64::new(dt, 0.0)))));
            }
            v = cached.as_ref().unwrap().1 * v;
        }
        states.push(unvec_density(&v));
        prev_t = t;
    }
    states
}

/// Project each ρ(t_k) onto the biorthogonal eigenbasis:
/// A_j(t_k) = T_j†·vec(ρ(t_k)).
///
/// The spectrum must come from [`Spectrum::compute`] (biorthonormalized);
/// a raw or defective spectrum is rejected because the projection is not
/// defined there.
pub fn amplitudes(
    spectrum: &Spectrum,
    states: &[DensityMatrix],
    grid: &TimeGrid,
) -> Result<[AmplitudeSeries; LDIM], CoreError> {
    if states.len() != grid.len() {
        return Err(CoreError::InvalidParams(format!(
            "{} states for a {}-sample grid",
            states.len(),
            grid.len()
        )));
    }
    for j in 0..LDIM {
        let diag = spectrum.left_vectors[j].dotc(&spectrum.right_vectors[j]);
        if (diag - Complex64::new(1.0, 0.0)).norm() > 1e-8 {
            return Err(CoreError::InvalidParams(
                "spectrum is not biorthonormalized; use Spectrum::compute".into(),
            ));
        }
    }
    let mut series: [AmplitudeSeries; LDIM] = std::array::from_fn(|j| AmplitudeSeries {
        branch: j,
        samples: Vec::with_capacity(grid.len()),
    });
    for (k, rho) in states.iter().enumerate() {
        let v = vec_density(rho);
        for (j, s) in series.iter_mut().enumerate() {
            s.samples.push((grid.times()[k], spectrum.left_vectors[j].dotc(&v)));
        }
    }
    Ok(series)
}

/// Log-linear initial guess: least squares of log A (phase unwrapped
/// sample-to-sample) against t.  Samples at the numerical zero floor are
/// skipped — the logarithm is unusable there.
fn log_linear_init(samples: &[(f64, Complex64)], max_abs: f64) -> (Complex64, Complex64) {
    let floor = max_abs * 1e-14;
    let mut pts: Vec<(f64, Complex64)> = Vec::new();
    let mut last: Option<(f64, f64)> = None; // (raw arg, unwrapped arg)
    for &(t, a) in samples {
        if a.norm() <= floor {
            continue;
        }
        let raw = a.arg();
        let unwrapped = match last {
            None => raw,
            Some((praw, pun)) => {
                let mut d = raw - praw;
                while d > PI {
                    d -= TAU;
                }
                while d <= -PI {
                    d += TAU;
                }
                pun + d
            }
        };
        last = Some((raw, unwrapped));
        pts.push((t, Complex64::new(a.norm().ln(), unwrapped)));
    }
    if pts.len() < 2 {
        let peak = samples
            .iter()
            .map(|&(_, a)| a)
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .unwrap_or(Complex64::new(0.0, 0.0));
        return (peak, Complex64::new(0.0, 0.0));
    }
    let n = pts.len() as f64;
    let st: f64 = pts.iter().map(|p| p.0).sum();
    let stt: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sw: Complex64 = pts.iter().map(|p| p.1).sum();
    let swt: Complex64 = pts.iter().map(|p| p.1 * p.0).sum();
    let det = n * stt - st * st;
    if det <= 0.0 {
        return (pts[0].1.exp(), Complex64::new(0.0, 0.0));
    }
    let slope = (swt * n - sw * st) / det;
    let intercept = (sw - slope * st) / n;
    (intercept.exp(), slope)
}

/// Fit A(t) ≈ C·e^{B·t} to a single amplitude series.
///
/// Two stages: a log-linear regression (with phase unwrapping) seeds a
/// Gauss–Newton refinement of the full complex residual, with backtracking
/// on the residual norm.  Deterministic for identical input.
pub fn fit_eigenvalue(series: &AmplitudeSeries) -> Result<FitResult, CoreError> {
    let samples = &series.samples;
    let n = samples.len();
    if n < 4 {
        return Err(CoreError::InvalidParams(format!(
            "exponential fit needs at least 4 samples, got {n}"
        )));
    }
    let max_abs = samples.iter().map(|(_, a)| a.norm()).fold(0.0, f64::max);
    if max_abs < NO_SIGNAL_FLOOR {
        return Err(CoreError::NoSignal);
    }

    let sum_sq = |c: Complex64, b: Complex64| -> f64 {
        samples
            .iter()
            .map(|&(t, a)| (c * (b * t).exp() - a).norm_sqr())
            .sum()
    };

    let (mut c, mut b) = log_linear_init(samples, max_abs);
    let mut err = sum_sq(c, b);
    let mut best = (c, b, err);
    let mut iterations = 0;
    let mut converged = false;

    for iter in 1..=FIT_MAX_ITERS {
        iterations = iter;
        // Normal equations of the complex Jacobian [e^{Bt}, C·t·e^{Bt}].
        let mut a00 = Complex64::new(0.0, 0.0);
        let mut a01 = Complex64::new(0.0, 0.0);
        let mut a11 = Complex64::new(0.0, 0.0);
        let mut g0 = Complex64::new(0.0, 0.0);
        let mut g1 = Complex64::new(0.0, 0.0);
        for &(t, a) in samples {
            let e = (b * t).exp();
            let r = c * e - a;
            let j0 = e;
            let j1 = c * t * e;
            a00 += j0.conj() * j0;
            a01 += j0.conj() * j1;
            a11 += j1.conj() * j1;
            g0 += j0.conj() * r;
            g1 += j1.conj() * r;
        }
        let a10 = a01.conj();
        if (g0.norm_sqr() + g1.norm_sqr()).sqrt() <= FIT_GRAD_TOL {
            converged = true;
            break;
        }
        let det = a00 * a11 - a01 * a10;
        if det.norm() == 0.0 || !det.is_finite() {
            break;
        }
        let d0 = (-g0 * a11 + a01 * g1) / det;
        let d1 = (-g1 * a00 + a10 * g0) / det;

        let mut improved = false;
        let mut step = 1.0;
        for _ in 0..40 {
            let cc = c + d0 * step;
            let bb = b + d1 * step;
            let e2 = sum_sq(cc, bb);
            if e2.is_finite() && e2 < err {
                c = cc;
                b = bb;
                err = e2;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            // Stationary to line-search resolution: accept as converged.
            converged = true;
            break;
        }
        if err < best.2 {
            best = (c, b, err);
        }
        let rel_step = (d0.norm() + d1.norm()) * step / (c.norm() + b.norm() + 1.0);
        if rel_step <= 1e-15 {
            converged = true;
            break;
        }
    }

    if err < best.2 {
        best = (c, b, err);
    }
    let (c, b, err) = best;
    if !converged && iterations == FIT_MAX_ITERS {
        return Err(CoreError::FitNonConvergence {
            iterations,
            residual: err,
            best_rate: b,
            best_amplitude: c,
        });
    }
    if !(b.is_finite() && c.is_finite()) {
        return Err(CoreError::FitNonConvergence {
            iterations,
            residual: err,
            best_rate: b,
            best_amplitude: c,
        });
    }

    let dt = (samples[n - 1].0 - samples[0].0) / (n - 1) as f64;
    let aliased = b.im.abs() * dt >= 0.9 * PI;
    Ok(FitResult {
        rate: b,
        amplitude: c,
        residual: err,
        iterations,
        aliased,
    })
}

/// Emulate a noisy tomography run: evolve exactly, add i.i.d. complex
/// Gaussian noise (σ per quadrature) to every density-matrix entry, then
/// project onto the biorthogonal eigenbasis.  Reproducible for a given
/// seed; σ = 0 short-circuits to the exact amplitudes.
pub fn synth_noisy_run(
    params: &SystemParams,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    sigma: f64,
    seed: u64,
) -> Result<[AmplitudeSeries; LDIM], CoreError> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(CoreError::InvalidParams(format!(
            "noise level must be finite and >= 0, got {sigma}"
        )));
    }
    let l = build_liouvillian(params);
    let spectrum = Spectrum::compute(&l)?;
    let mut states = evolve(params, rho0, grid);
    if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, sigma).expect("validated above");
        for rho in &mut states {
            for i in 0..DIM {
                for j in 0..DIM {
                    let re = noise.sample(&mut rng);
                    let im = noise.sample(&mut rng);
                    rho[(i, j)] += Complex64::new(re, im);
                }
            }
        }
    }
    amplitudes(&spectrum, &states, grid)
}

/// Reassemble vec(ρ(t)) from the spectral expansion Σ_j A_j(0)e^{λ_j t}V_j.
/// Used by the consistency checks; valid away from exceptional points.
pub fn spectral_expansion(spectrum: &Spectrum, a0: &[Complex64; LDIM], t: f64) -> SuperVector {
    let mut v = SuperVector::zeros();
    for j in 0..LDIM {
        v += spectrum.right_vectors[j] * (a0[j] * (spectrum.eigenvalues[j] * t).exp());
    }
    v
}
