//! Single-trajectory stochastic dynamics and trajectory ensembles.
//!
//! Integration uses the explicit order-1.5 strong scheme of Kloeden and
//! Platen for Ito SDEs `dY = a(Y) dt + b(Y) dW` driven by one Wiener process.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antidephasing::{bloch_drift, SdqParams};
use crate::error::{invalid, Error, Result};
use crate::magic::{m2_tilde_bloch, M2_T};
use crate::qubit::BlochVector;

/// Norm excess of a single trajectory that aborts a run.
pub const TRAJECTORY_NORM_TOL: f64 = 1e-4;
/// Number of bins in SRE histograms over `[0, log2(3/2)]`.
pub const HISTOGRAM_BINS: usize = 50;

/// Autonomous SDE with a single scalar Wiener process.
pub trait SdeSystem<const N: usize> {
    fn drift(&self, y: &[f64; N]) -> [f64; N];
    fn diffusion(&self, y: &[f64; N]) -> [f64; N];
}

/// Correlated increments `dW = int dW` and `dZ = int (W_s - W_0) ds` over one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseIncrement {
    pub dw: f64,
    pub dz: f64,
}

impl NoiseIncrement {
    /// `dW = U1 sqrt(dt)`, `dZ = dt^{3/2} (U1 + U2 / sqrt 3) / 2`.
    pub fn from_normals(u1: f64, u2: f64, dt: f64) -> Self {
        let s = dt.sqrt();
        Self {
            dw: u1 * s,
            dz: 0.5 * dt * s * (u1 + u2 / 3f64.sqrt()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R, dt: f64) -> Self {
        let u1: f64 = rng.sample(StandardNormal);
        let u2: f64 = rng.sample(StandardNormal);
        Self::from_normals(u1, u2, dt)
    }

    /// Combine consecutive increments of equal length `dt` into one.
    pub fn aggregate(parts: &[NoiseIncrement], dt: f64) -> Self {
        let mut w = 0.0;
        let mut z = 0.0;
        for p in parts {
            z += p.dz + w * dt;
            w += p.dw;
        }
        Self { dw: w, dz: z }
    }
}

fn axpy<const N: usize>(y: &[f64; N], s: f64, x: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + s * x[i])
}

/// One explicit order-1.5 step. A non-finite result is reported as
/// [`Error::StepDiverged`] with zero indices; callers fill in their own.
pub fn kp15_step<S: SdeSystem<N>, const N: usize>(
    sys: &S,
    y: &[f64; N],
    dt: f64,
    noise: NoiseIncrement,
) -> Result<[f64; N]> {
    if !(dt > 0.0) {
        return Err(Error::StepUnderflow(dt));
    }
    let sq = dt.sqrt();
    let a = sys.drift(y);
    let b = sys.diffusion(y);
    let base = axpy(y, dt, &a);
    let up = axpy(&base, sq, &b);
    let um = axpy(&base, -sq, &b);
    let a_up = sys.drift(&up);
    let a_um = sys.drift(&um);
    let b_up = sys.diffusion(&up);
    let b_um = sys.diffusion(&um);
    let pp = axpy(&up, sq, &b_up);
    let pm = axpy(&up, -sq, &b_up);
    let b_pp = sys.diffusion(&pp);
    let b_pm = sys.diffusion(&pm);

    let NoiseIncrement { dw, dz } = noise;
    let out: [f64; N] = std::array::from_fn(|i| {
        y[i] + b[i] * dw
            + (a_up[i] - a_um[i]) / (2.0 * sq) * dz
            + (a_up[i] + 2.0 * a[i] + a_um[i]) / 4.0 * dt
            + (b_up[i] - b_um[i]) / (4.0 * sq) * (dw * dw - dt)
            + (b_up[i] - 2.0 * b[i] + b_um[i]) / (2.0 * dt) * (dw * dt - dz)
            + (b_pp[i] - b_pm[i] - b_up[i] + b_um[i]) / (4.0 * dt) * (dw * dw / 3.0 - dt) * dw
    });
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::StepDiverged { trajectory: 0, step: 0 })
    }
}

/// Bloch-vector SDE of a single noise realization.
#[derive(Clone, Copy, Debug)]
pub struct BlochSde {
    pub params: SdqParams,
}

pub fn bloch_sde(p: &SdqParams) -> BlochSde {
    BlochSde { params: *p }
}

impl SdeSystem<3> for BlochSde {
    fn drift(&self, y: &[f64; 3]) -> [f64; 3] {
        bloch_drift(&self.params, *y)
    }

    fn diffusion(&self, y: &[f64; 3]) -> [f64; 3] {
        let s = -(2.0 * self.params.noise).sqrt() * self.params.gamma_decay;
        let [x, yy, z] = *y;
        [s * x * z, s * yy * z, s * (z * z - 1.0)]
    }
}

/// splitmix64 output finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trajectory `index`: the `index`-th output of a splitmix64
/// generator started at `master`.
pub fn trajectory_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub t_final: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub master_seed: u64,
    /// Times at which SRE histograms are recorded; each snaps to the nearest grid point.
    #[serde(default)]
    pub histogram_times: Vec<f64>,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(invalid("t_final", "must be finite and > 0"));
        }
        if self.n_steps == 0 {
            return Err(invalid("n_steps", "must be >= 1"));
        }
        if self.n_trajectories == 0 {
            return Err(invalid("n_trajectories", "must be >= 1"));
        }
        if let Some(t) = self.histogram_times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(invalid("histogram_times", format!("{t} is not a valid time")));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.n_steps).map(|k| k as f64 * dt).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub time: f64,
    pub step: usize,
    /// `HISTOGRAM_BINS + 1` bin edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Bin `values` into uniform bins on `[0, log2(3/2)]`, clamping outliers to the end bins.
    pub fn of_sre(time: f64, step: usize, values: impl IntoIterator<Item = f64>) -> Self {
        let width = M2_T / HISTOGRAM_BINS as f64;
        let edges = (0..=HISTOGRAM_BINS).map(|k| k as f64 * width).collect();
        let mut counts = vec![0u64; HISTOGRAM_BINS];
        for v in values {
            let k = if v.is_nan() {
                0
            } else {
                ((v / width).floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1)
            };
            counts[k] += 1;
        }
        Self {
            time,
            step,
            edges,
            counts,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryEnsemble {
    pub params: SdqParams,
    pub r0: BlochVector,
    pub master_seed: u64,
    pub times: Vec<f64>,
    pub seeds: Vec<u64>,
    /// `trajectories[k][n]` is trajectory `k` at `times[n]`.
    pub trajectories: Vec<Vec<BlochVector>>,
    pub mean: Vec<BlochVector>,
    /// Standard error of the mean, componentwise.
    pub std_err: Vec<[f64; 3]>,
    pub sre_paths: Vec<Vec<f64>>,
    pub sre_of_mean: Vec<f64>,
    pub mean_of_sre: Vec<f64>,
    pub histograms: Vec<Histogram>,
}

impl TrajectoryEnsemble {
    pub fn n_steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn final_sre(&self) -> impl Iterator<Item = f64> + '_ {
        self.sre_paths.iter().map(|p| p[p.len() - 1])
    }

    /// Largest Bloch norm over every stored state.
    pub fn max_norm(&self) -> f64 {
        self.trajectories
            .iter()
            .flatten()
            .map(|r| r.norm())
            .fold(0.0, f64::max)
    }
}

/// Integrate one trajectory from `r0` with its own seeded generator.
pub fn simulate_trajectory(
    sys: &BlochSde,
    r0: BlochVector,
    dt: f64,
    n_steps: usize,
    seed: u64,
    index: usize,
) -> Result<Vec<BlochVector>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = r0.to_array();
    let mut path = Vec::with_capacity(n_steps + 1);
    path.push(r0);
    for step in 1..=n_steps {
        let noise = NoiseIncrement::sample(&mut rng, dt);
        y = kp15_step(sys, &y, dt, noise).map_err(|e| match e {
            Error::StepDiverged { .. } => Error::StepDiverged {
                trajectory: index,
                step,
            },
            other => other,
        })?;
        let r = BlochVector::from_array(y);
        let norm = r.norm();
        if norm > 1.0 + TRAJECTORY_NORM_TOL {
            return Err(Error::NormViolation {
                trajectory: index,
                step,
                norm,
            });
        }
        path.push(r);
    }
    Ok(path)
}

#[derive(Clone, Copy, Default)]
struct Welford {
    n: f64,
    mean: [f64; 3],
    m2: [f64; 3],
}

impl Welford {
    fn push(&mut self, r: BlochVector) {
        self.n += 1.0;
        let v = r.to_array();
        for ((x, mean), m2) in v.iter().zip(&mut self.mean).zip(&mut self.m2) {
            let d = x - *mean;
            *mean += d / self.n;
            *m2 += d * (x - *mean);
        }
    }

    fn std_err(&self) -> [f64; 3] {
        if self.n < 2.0 {
            return [0.0; 3];
        }
        self.m2.map(|m| (m / (self.n - 1.0) / self.n).sqrt())
    }
}

/// Run `spec.n_trajectories` independent trajectories in parallel and aggregate them.
///
/// Aggregation runs serially in trajectory order, so results do not depend on
/// the number of worker threads.
pub fn simulate_ensemble(p: &SdqParams, r0: BlochVector, spec: &EnsembleSpec) -> Result<TrajectoryEnsemble> {
    spec.validate()?;
    if r0.norm() > 1.0 + TRAJECTORY_NORM_TOL {
        return Err(Error::UnphysicalBloch { norm: r0.norm() });
    }
    let sys = bloch_sde(p);
    let dt = spec.dt();
    let seeds: Vec<u64> = (0..spec.n_trajectories as u64)
        .map(|k| trajectory_seed(spec.master_seed, k))
        .collect();
    let trajectories = seeds
        .par_iter()
        .enumerate()
        .map(|(k, &seed)| simulate_trajectory(&sys, r0, dt, spec.n_steps, seed, k))
        .collect::<Result<Vec<_>>>()?;

    let times = spec.times();
    let n_t = times.len();
    let mut acc = vec![Welford::default(); n_t];
    let mut mean_of_sre = vec![0.0; n_t];
    let mut sre_paths = Vec::with_capacity(trajectories.len());
    for path in &trajectories {
        let sre: Vec<f64> = path.iter().map(|r| m2_tilde_bloch(*r)).collect();
        for n in 0..n_t {
            acc[n].push(path[n]);
            mean_of_sre[n] += sre[n];
        }
        sre_paths.push(sre);
    }
    let count = trajectories.len() as f64;
    mean_of_sre.iter_mut().for_each(|m| *m /= count);
    let mean: Vec<BlochVector> = acc.iter().map(|w| BlochVector::from_array(w.mean)).collect();
    let std_err = acc.iter().map(Welford::std_err).collect();
    let sre_of_mean = mean.iter().map(|r| m2_tilde_bloch(*r)).collect();

    let histograms = spec
        .histogram_times
        .iter()
        .map(|&t| {
            let step = ((t / dt).round() as usize).min(spec.n_steps);
            Histogram::of_sre(times[step], step, sre_paths.iter().map(|s| s[step]))
        })
        .collect();

    Ok(TrajectoryEnsemble {
        params: *p,
        r0,
        master_seed: spec.master_seed,
        times,
        seeds,
        trajectories,
        mean,
        std_err,
        sre_paths,
        sre_of_mean,
        mean_of_sre,
        histograms,
    })
}

/// `dX = mu X dt + sigma X dW`, solved exactly by
/// `X_t = X_0 exp((mu - sigma^2/2) t + sigma W_t)`.
#[derive(Clone, Copy, Debug)]
pub struct GeometricBrownian {
    pub mu: f64,
    pub sigma: f64,
}

impl SdeSystem<1> for GeometricBrownian {
    fn drift(&self, y: &[f64; 1]) -> [f64; 1] {
        [self.mu * y[0]]
    }

    fn diffusion(&self, y: &[f64; 1]) -> [f64; 1] {
        [self.sigma * y[0]]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderEstimate {
    pub dts: Vec<f64>,
    /// Mean absolute error at `T = 1` for each step in `dts`.
    pub errors: Vec<f64>,
    /// Least-squares slope of `log err` against `log dt`.
    pub slope: f64,
}

/// Strong convergence order on geometric Brownian motion
/// (`mu = 1`, `sigma = 0.5`, `X_0 = 1`, `T = 1`) with steps `2^-6 .. 2^-11`.
///
/// Every step size integrates the same Brownian path, built from the
/// finest increments.
pub fn strong_order_estimate(n_paths: usize, seed: u64) -> Result<OrderEstimate> {
    if n_paths == 0 {
        return Err(invalid("n_paths", "must be >= 1"));
    }
    let sys = GeometricBrownian { mu: 1.0, sigma: 0.5 };
    let levels: Vec<u32> = (6..=11).collect();
    let fine_n = 1usize << 11;
    let fine_dt = 1.0 / fine_n as f64;
    let per_path: Vec<Vec<f64>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(trajectory_seed(seed, k));
            let fine: Vec<NoiseIncrement> =
                (0..fine_n).map(|_| NoiseIncrement::sample(&mut rng, fine_dt)).collect();
            let w_t: f64 = fine.iter().map(|n| n.dw).sum();
            let exact = ((sys.mu - 0.5 * sys.sigma * sys.sigma) + sys.sigma * w_t).exp();
            levels
                .iter()
                .map(|&lvl| {
                    let n = 1usize << lvl;
                    let m = fine_n / n;
                    let dt = 1.0 / n as f64;
                    let mut y = [1.0];
                    for chunk in fine.chunks(m) {
                        let inc = NoiseIncrement::aggregate(chunk, fine_dt);
                        y = kp15_step(&sys, &y, dt, inc)?;
                    }
                    Ok((y[0] - exact).abs())
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let dts: Vec<f64> = levels.iter().map(|&l| (-(l as f64)).exp2()).collect();
    let errors: Vec<f64> = (0..levels.len())
        .map(|i| per_path.iter().map(|e| e[i]).sum::<f64>() / n_paths as f64)
        .collect();
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(OrderEstimate {
        dts,
        errors,
        slope: sxy / sxx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antidephasing::{evolve_average, liouvillian_spectrum, steady_state, Hopping};
    use approx::assert_abs_diff_eq;

    fn real(g: f64, n: f64) -> SdqParams {
        SdqParams::new(Hopping::Real, g, n).unwrap()
    }

    #[test]
    fn noise_moments() {
        let n = NoiseIncrement::from_normals(1.0, 0.0, 0.04);
        assert_abs_diff_eq!(n.dw, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(n.dz, 0.004, epsilon = 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dt = 0.1;
        let (mut ww, mut wz, mut zz) = (0.0, 0.0, 0.0);
        let m = 200_000;
        for _ in 0..m {
            let s = NoiseIncrement::sample(&mut rng, dt);
            ww += s.dw * s.dw;
            wz += s.dw * s.dz;
            zz += s.dz * s.dz;
        }
        let m = m as f64;
        assert!((ww / m / dt - 1.0).abs() < 0.02);
        assert!((wz / m / (dt * dt / 2.0) - 1.0).abs() < 0.02);
        assert!((zz / m / (dt.powi(3) / 3.0) - 1.0).abs() < 0.02);
    }

    #[test]
    fn aggregate_of_one_is_identity() {
        let n = NoiseIncrement { dw: 0.3, dz: -0.01 };
        assert_eq!(NoiseIncrement::aggregate(&[n], 0.1), n);
        let parts = [NoiseIncrement { dw: 1.0, dz: 0.0 }, NoiseIncrement { dw: 0.0, dz: 0.0 }];
        assert_abs_diff_eq!(NoiseIncrement::aggregate(&parts, 0.5).dz, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn deterministic_step_is_second_order() {
        let sys = GeometricBrownian { mu: -1.3, sigma: 0.0 };
        let zero = NoiseIncrement { dw: 0.0, dz: 0.0 };
        let err = |dt: f64| (kp15_step(&sys, &[1.0], dt, zero).unwrap()[0] - (-1.3 * dt).exp()).abs();
        let ratio = err(0.01) / err(0.005);
        assert!((ratio - 8.0).abs() < 0.5, "local error ratio {ratio}");
    }

    #[test]
    fn pole_has_no_vertical_diffusion() {
        let sys = bloch_sde(&real(2.8, 0.05));
        assert_eq!(sys.diffusion(&[0.0, 0.0, 1.0])[2], 0.0);
        assert_eq!(sys.diffusion(&[0.0, 0.0, -1.0])[2], 0.0);
        let y = kp15_step(&sys, &[0.0, 0.0, 1.0], 1e-3, NoiseIncrement::from_normals(1.5, -0.7, 1e-3)).unwrap();
        assert!(y[2] <= 1.0 + 1e-5);
    }

    #[test]
    fn noiseless_system_reduces_to_average_flow() {
        let p = real(2.5, 0.0);
        let sys = bloch_sde(&p);
        assert_eq!(sys.diffusion(&[0.3, -0.2, 0.5]), [0.0; 3]);
        assert_eq!(sys.drift(&[0.3, -0.2, 0.5]), bloch_drift(&p, [0.3, -0.2, 0.5]));
        let r = steady_state(&p).unwrap().to_array();
        assert!(sys.drift(&r).iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn strong_order_on_linear_oracle() {
        let est = strong_order_estimate(400, 11).unwrap();
        assert!(est.errors.windows(2).all(|w| w[1] < w[0]));
        assert!((1.3..=1.7).contains(&est.slope), "slope {}", est.slope);
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let s: Vec<u64> = (0..1000).map(|k| trajectory_seed(42, k)).collect();
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 1000);
        assert_eq!(trajectory_seed(42, 7), trajectory_seed(42, 7));
        assert_ne!(trajectory_seed(42, 7), trajectory_seed(43, 7));
        // first output of splitmix64 seeded with 0
        assert_eq!(trajectory_seed(0, 0), 0xe220_a839_7b1d_cdaf);
    }

    #[test]
    fn noiseless_ensemble_matches_average() {
        let p = real(2.5, 0.0);
        let spec = EnsembleSpec {
            t_final: 1.0,
            n_steps: 40_000,
            n_trajectories: 3,
            master_seed: 5,
            histogram_times: vec![],
        };
        let r0 = BlochVector::new(0.0, 0.0, -1.0);
        let ens = simulate_ensemble(&p, r0, &spec).unwrap();
        assert_eq!(ens.trajectories[0], ens.trajectories[2]);
        let avg = evolve_average(&p, r0, &ens.times).unwrap();
        for (a, b) in avg.iter().zip(&ens.mean) {
            assert!(a.distance(*b) < 1e-8, "{}", a.distance(*b));
        }
        assert!(ens.std_err.iter().all(|s| s.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn ensemble_is_reproducible_across_thread_counts() {
        let p = real(2.8, 0.01);
        let spec = EnsembleSpec {
            t_final: 2.0,
            n_steps: 100,
            n_trajectories: 40,
            master_seed: 9,
            histogram_times: vec![0.0, 1.0, 2.0],
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_ensemble(&p, BlochVector::ORIGIN, &spec).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.trajectories, b.trajectories);
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.histograms, b.histograms);
        assert_eq!(a.histograms[0].counts[0], 40);
        assert!(a.histograms.iter().all(|h| h.total() == 40 && h.edges.len() == HISTOGRAM_BINS + 1));
        assert!(a.max_norm() <= 1.0 + TRAJECTORY_NORM_TOL);
        assert!(a.times.len() == 101 && a.sre_paths[0].len() == 101);
    }

    #[test]
    fn ensemble_input_validation() {
        let p = real(2.8, 0.01);
        let mut spec = EnsembleSpec {
            t_final: 1.0,
            n_steps: 10,
            n_trajectories: 2,
            master_seed: 0,
            histogram_times: vec![],
        };
        assert!(simulate_ensemble(&p, BlochVector::new(0.0, 0.0, 1.5), &spec).is_err());
        spec.n_steps = 0;
        assert!(simulate_ensemble(&p, BlochVector::ORIGIN, &spec).is_err());
        spec.n_steps = 10;
        spec.t_final = -1.0;
        assert!(simulate_ensemble(&p, BlochVector::ORIGIN, &spec).is_err());
    }

    #[test]
    fn histogram_clamps_to_range() {
        let h = Histogram::of_sre(0.0, 0, [-0.1, 0.0, 0.3, M2_T, 0.9]);
        assert_eq!(h.counts[0], 2);
        assert_eq!(h.counts[HISTOGRAM_BINS - 1], 2);
        assert_eq!(h.total(), 5);
    }

    #[test]
    fn short_noisy_run_stays_in_ball() {
        let p = real(2.8, 0.01);
        let gap = liouvillian_spectrum(&p).gap;
        let spec = EnsembleSpec {
            t_final: 5.0 / gap,
            n_steps: 500,
            n_trajectories: 50,
            master_seed: 1,
            histogram_times: vec![],
        };
        let ens = simulate_ensemble(&p, BlochVector::ORIGIN, &spec).unwrap();
        assert!(ens.max_norm() <= 1.0 + TRAJECTORY_NORM_TOL);
    }
}
