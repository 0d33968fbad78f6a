//! Phase diagrams over the `(gamma J, Gamma / J)` plane and their maxima.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antidephasing::{liouvillian_spectrum, steady_sre, Hopping, SdqParams};
use crate::error::{invalid, Result};
use crate::qubit::BlochVector;
use crate::sde::{simulate_ensemble, trajectory_seed, EnsembleSpec};

/// Nodes of a gap-weighted diagram at or above this value are highlighted.
pub const GAP_WEIGHTED_HIGHLIGHT: f64 = 1.2;
/// Zoom factor of each refinement round in [`locate_maximum`].
pub const ZOOM: usize = 10;
/// Refinement stops once the step is this fraction of the axis range.
pub const REFINE_RESOLUTION: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Sampling of one parameter.
///
/// With `open_min` the lower bound itself is excluded and the `n` points are
/// `min + (max - min) k / n` for `k = 1..=n`; otherwise both ends are included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
    #[serde(default = "linear")]
    pub spacing: Spacing,
    #[serde(default)]
    pub open_min: bool,
}

fn linear() -> Spacing {
    Spacing::Linear
}

impl Axis {
    pub fn linear(min: f64, max: f64, n: usize) -> Self {
        Self {
            min,
            max,
            n,
            spacing: Spacing::Linear,
            open_min: false,
        }
    }

    pub fn validate(&self, field: &'static str) -> Result<()> {
        if self.n < 2 {
            return Err(invalid(field, "needs at least 2 points"));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(invalid(field, "bounds must be finite with max > min"));
        }
        if self.min < 0.0 {
            return Err(invalid(field, "rates must be >= 0"));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(invalid(field, "log spacing needs positive bounds"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let (offset, denom) = if self.open_min {
            (1, self.n as f64)
        } else {
            (0, (self.n - 1) as f64)
        };
        (0..self.n)
            .map(|k| {
                let s = (k + offset) as f64 / denom;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * s,
                    Spacing::Log => self.min * (self.max / self.min).powf(s),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// `gamma J` axis (columns).
    pub noise: Axis,
    /// `Gamma / J` axis (rows).
    pub decay: Axis,
    pub hopping: Hopping,
}

impl GridSpec {
    /// `gamma J` in `[0, 0.3]` and `Gamma / J` in `(0, 8]`, 60 points each.
    pub fn standard(hopping: Hopping) -> Self {
        Self {
            noise: Axis::linear(0.0, 0.3, 60),
            decay: Axis {
                min: 0.0,
                max: 8.0,
                n: 60,
                spacing: Spacing::Linear,
                open_min: true,
            },
            hopping,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate("noise")?;
        self.decay.validate("decay")
    }

    fn params(&self, noise: f64, decay: f64) -> Result<SdqParams> {
        SdqParams::new(self.hopping, decay, noise)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    SteadySre,
    Gap,
    GapWeighted,
    TrajectorySre,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::SteadySre => "steady_sre",
            Quantity::Gap => "gap",
            Quantity::GapWeighted => "gap_weighted_sre",
            Quantity::TrajectorySre => "trajectory_sre",
        }
    }
}

/// Settings of a stochastic diagram.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryProtocol {
    /// Final time in units of the node's inverse gap.
    pub horizon_gaps: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub seed: u64,
}

impl TrajectoryProtocol {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon_gaps.is_finite() && self.horizon_gaps > 0.0) {
            return Err(invalid("horizon_gaps", "must be finite and > 0"));
        }
        if self.n_steps == 0 {
            return Err(invalid("n_steps", "must be >= 1"));
        }
        if self.n_trajectories == 0 {
            return Err(invalid("n_trajectories", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub quantity: Quantity,
    pub grid: GridSpec,
    pub noise_values: Vec<f64>,
    pub decay_values: Vec<f64>,
    /// `values[i][j]` at `decay_values[i]`, `noise_values[j]`; NaN where undefined.
    pub values: Vec<Vec<f64>>,
    pub protocol: Option<TrajectoryProtocol>,
    /// Nodes at or above [`GAP_WEIGHTED_HIGHLIGHT`], for the gap-weighted quantity.
    pub highlight: Option<Vec<Vec<bool>>>,
}

impl PhaseDiagram {
    pub fn shape(&self) -> (usize, usize) {
        (self.decay_values.len(), self.noise_values.len())
    }

    pub fn nan_count(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_nan()).count()
    }

    pub fn get(&self, decay_index: usize, noise_index: usize) -> f64 {
        self.values[decay_index][noise_index]
    }

    /// For every noise column, the decay rate with the largest finite value.
    pub fn ridge(&self) -> Vec<RidgePoint> {
        (0..self.noise_values.len())
            .filter_map(|j| {
                let (i, value) = self
                    .values
                    .iter()
                    .map(|row| row[j])
                    .enumerate()
                    .filter(|(_, v)| v.is_finite())
                    .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                        Some((_, b)) if b >= v => best,
                        _ => Some((i, v)),
                    })?;
                Some(RidgePoint {
                    noise: self.noise_values[j],
                    decay: self.decay_values[i],
                    value,
                })
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RidgePoint {
    pub noise: f64,
    pub decay: f64,
    pub value: f64,
}

/// Least-squares fit `decay = prefactor * noise^exponent` in log-log coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub prefactor: f64,
    pub exponent: f64,
    pub points: usize,
}

/// Fit the ridge points with positive coordinates; `None` with fewer than two
/// distinct noise values.
pub fn fit_power_law(points: &[RidgePoint]) -> Option<PowerLaw> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.noise > 0.0 && p.decay > 0.0)
        .map(|p| (p.noise.ln(), p.decay.ln()))
        .collect();
    let n = logs.len() as f64;
    if logs.len() < 2 {
        return None;
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    Some(PowerLaw {
        prefactor: (my - exponent * mx).exp(),
        exponent,
        points: logs.len(),
    })
}

type Evaluated = (Vec<f64>, Vec<f64>, Vec<Vec<f64>>);

fn evaluate<F>(grid: &GridSpec, f: F) -> Result<Evaluated>
where
    F: Fn(usize, usize, SdqParams) -> f64 + Sync,
{
    grid.validate()?;
    let noise = grid.noise.values();
    let decay = grid.decay.values();
    let values = (0..decay.len())
        .into_par_iter()
        .map(|i| {
            noise
                .iter()
                .enumerate()
                .map(|(j, &n)| match grid.params(n, decay[i]) {
                    Ok(p) => f(i, j, p),
                    Err(_) => f64::NAN,
                })
                .collect()
        })
        .collect();
    Ok((noise, decay, values))
}

fn diagram(quantity: Quantity, grid: &GridSpec, f: impl Fn(usize, usize, SdqParams) -> f64 + Sync) -> Result<PhaseDiagram> {
    let (noise_values, decay_values, values) = evaluate(grid, f)?;
    Ok(PhaseDiagram {
        quantity,
        grid: *grid,
        noise_values,
        decay_values,
        values,
        protocol: None,
        highlight: None,
    })
}

pub fn steady_value(p: &SdqParams) -> f64 {
    steady_sre(p).unwrap_or(f64::NAN)
}

/// `M2~(rho_s) * Delta`, zero where the gap closes on a defined steady state.
pub fn gap_weighted_value(p: &SdqParams) -> f64 {
    let an = liouvillian_spectrum(p);
    match steady_sre(p) {
        Ok(m) => m * an.gap,
        Err(_) => f64::NAN,
    }
}

/// Steady-state `M2~`; NaN where the dominant mode is not unique.
pub fn steady_diagram(grid: &GridSpec) -> Result<PhaseDiagram> {
    diagram(Quantity::SteadySre, grid, |_, _, p| steady_value(&p))
}

/// Dissipative gap of the averaged generator.
pub fn gap_diagram(grid: &GridSpec) -> Result<PhaseDiagram> {
    diagram(Quantity::Gap, grid, |_, _, p| liouvillian_spectrum(&p).gap)
}

/// `M2~(rho_s) * Delta` with the highlight mask.
pub fn gap_weighted_diagram(grid: &GridSpec) -> Result<PhaseDiagram> {
    let mut d = diagram(Quantity::GapWeighted, grid, |_, _, p| gap_weighted_value(&p))?;
    d.highlight = Some(
        d.values
            .iter()
            .map(|row| row.iter().map(|v| *v >= GAP_WEIGHTED_HIGHLIGHT).collect())
            .collect(),
    );
    Ok(d)
}

/// Seed of node `(decay_index, noise_index)`.
pub fn node_seed(seed: u64, decay_index: usize, noise_index: usize) -> u64 {
    trajectory_seed(trajectory_seed(seed, decay_index as u64), noise_index as u64)
}

/// `M2~` of the ensemble-mean state at `horizon_gaps / Delta`, starting from
/// the maximally mixed state. Nodes without a gap or whose run aborts are NaN.
pub fn trajectory_diagram(grid: &GridSpec, protocol: &TrajectoryProtocol) -> Result<PhaseDiagram> {
    protocol.validate()?;
    let mut d = diagram(Quantity::TrajectorySre, grid, |i, j, p| {
        let gap = liouvillian_spectrum(&p).gap;
        if !(gap > 0.0) {
            log::warn!("node ({i}, {j}) {p:?}: no dissipative gap, value set to NaN");
            return f64::NAN;
        }
        let spec = EnsembleSpec {
            t_final: protocol.horizon_gaps / gap,
            n_steps: protocol.n_steps,
            n_trajectories: protocol.n_trajectories,
            master_seed: node_seed(protocol.seed, i, j),
            histogram_times: Vec::new(),
        };
        match simulate_ensemble(&p, BlochVector::ORIGIN, &spec) {
            Ok(e) => e.sre_of_mean[e.sre_of_mean.len() - 1],
            Err(err) => {
                log::warn!("node ({i}, {j}) {p:?}: {err}; value set to NaN");
                f64::NAN
            }
        }
    })?;
    d.protocol = Some(*protocol);
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Maximum {
    pub noise: f64,
    pub decay: f64,
    pub value: f64,
    /// Several coarse nodes share the largest value; the lexicographically
    /// lowest `(noise, decay)` was kept.
    pub tie: bool,
    pub refinement_rounds: usize,
}

fn argmax(points: &[(f64, f64, f64)]) -> Option<((f64, f64, f64), bool)> {
    let best = points
        .iter()
        .filter(|p| p.2.is_finite())
        .map(|p| p.2)
        .fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return None;
    }
    let tol = 1e-12 * best.abs().max(1.0);
    let mut ties: Vec<(f64, f64, f64)> = points
        .iter()
        .copied()
        .filter(|p| p.2.is_finite() && best - p.2 <= tol)
        .collect();
    ties.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Some((ties[0], ties.len() > 1))
}

fn zoom_axis(center: f64, step: f64, axis: &Axis) -> Vec<f64> {
    let lo = (center - step).max(axis.min);
    let hi = (center + step).min(axis.max);
    let n = 2 * ZOOM + 1;
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .filter(|v| !(axis.open_min && *v <= axis.min))
        .collect()
}

/// Coarse argmax over the grid followed by up to two zoomed refinements.
pub fn locate_maximum(grid: &GridSpec, quantity: Quantity) -> Result<Option<Maximum>> {
    let value: fn(&SdqParams) -> f64 = match quantity {
        Quantity::SteadySre => steady_value,
        Quantity::GapWeighted => gap_weighted_value,
        Quantity::Gap => |p| liouvillian_spectrum(p).gap,
        Quantity::TrajectorySre => {
            return Err(invalid("quantity", "maxima are located on deterministic quantities only"))
        }
    };
    grid.validate()?;
    let noise = grid.noise.values();
    let decay = grid.decay.values();
    let sample = |ns: &[f64], ds: &[f64]| -> Vec<(f64, f64, f64)> {
        ns.par_iter()
            .flat_map_iter(|&n| {
                ds.iter().map(move |&d| {
                    let v = grid.params(n, d).map(|p| value(&p)).unwrap_or(f64::NAN);
                    (n, d, v)
                })
            })
            .collect()
    };
    let Some((mut best, tie)) = argmax(&sample(&noise, &decay)) else {
        return Ok(None);
    };
    let step_of = |v: &[f64]| {
        v.windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let (mut dn, mut dd) = (step_of(&noise), step_of(&decay));
    let (range_n, range_d) = (grid.noise.max - grid.noise.min, grid.decay.max - grid.decay.min);
    let mut rounds = 0;
    while rounds < 2 && (dn / range_n > REFINE_RESOLUTION || dd / range_d > REFINE_RESOLUTION) {
        let ns = zoom_axis(best.0, dn, &grid.noise);
        let ds = zoom_axis(best.1, dd, &grid.decay);
        if let Some((cand, _)) = argmax(&sample(&ns, &ds)) {
            if cand.2 >= best.2 {
                best = cand;
            }
        }
        dn /= ZOOM as f64;
        dd /= ZOOM as f64;
        rounds += 1;
    }
    Ok(Some(Maximum {
        noise: best.0,
        decay: best.1,
        value: best.2,
        tie,
        refinement_rounds: rounds,
    }))
}

#[cfg(test)]
mod tests {

    #[test]
    fn power_law_fit_recovers_exponent() {
        let pts: Vec<RidgePoint> = [0.01, 0.03, 0.1, 0.3]
            .iter()
            .map(|&g: &f64| RidgePoint {
                noise: g,
                decay: 0.7 * g.powf(-0.5),
                value: 0.0,
            })
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert_abs_diff_eq!(fit.exponent, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.prefactor, 0.7, epsilon = 1e-12);
        assert!(fit_power_law(&pts[..1]).is_none());
    }

    #[test]
    fn ridge_follows_column_maxima() {
        let grid = GridSpec {
            noise: Axis::linear(0.05, 0.3, 6),
            decay: Axis::linear(0.5, 6.0, 45),
            hopping: Hopping::Real,
        };
        let d = steady_diagram(&grid).unwrap();
        let ridge = d.ridge();
        assert_eq!(ridge.len(), 6);
        for (j, r) in ridge.iter().enumerate() {
            let column_max = d.values.iter().map(|row| row[j]).filter(|v| v.is_finite()).fold(f64::MIN, f64::max);
            assert_eq!(r.value, column_max);
        }
        assert_eq!(fit_power_law(&ridge).unwrap().points, 6);
    }
    use super::*;
    use crate::magic::{M2_H, M2_T};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    #[test]
    fn axis_values() {
        let g = GridSpec::standard(Hopping::Real);
        let d = g.decay.values();
        assert_eq!(d.len(), 60);
        assert_abs_diff_eq!(d[0], 8.0 / 60.0, epsilon = 1e-15);
        assert_eq!(d[59], 8.0);
        assert_abs_diff_eq!(d[14], 2.0, epsilon = 1e-15);
        let n = g.noise.values();
        assert_eq!((n[0], n[59]), (0.0, 0.3));
        let log = Axis {
            min: 1.0,
            max: 100.0,
            n: 3,
            spacing: Spacing::Log,
            open_min: false,
        };
        let v = log.values();
        assert_abs_diff_eq!(v[1], 10.0, epsilon = 1e-12);
    }

    #[test]
    fn axis_validation() {
        assert!(Axis::linear(0.0, 1.0, 1).validate("a").is_err());
        assert!(Axis::linear(1.0, 1.0, 5).validate("a").is_err());
        assert!(Axis::linear(-1.0, 1.0, 5).validate("a").is_err());
        let mut log = Axis::linear(0.0, 1.0, 5);
        log.spacing = Spacing::Log;
        assert!(log.validate("a").is_err());
    }

    fn line_grid(hopping: Hopping, decay: (f64, f64, usize)) -> GridSpec {
        GridSpec {
            noise: Axis::linear(0.0, 0.1, 2),
            decay: Axis::linear(decay.0, decay.1, decay.2),
            hopping,
        }
    }

    #[test]
    fn reference_nodes() {
        let g = line_grid(Hopping::Real, (2.0, 2.0 * SQRT_2, 2));
        let d = steady_diagram(&g).unwrap();
        assert_eq!(d.shape(), (2, 2));
        assert_abs_diff_eq!(d.get(1, 0), M2_H, epsilon = 1e-12);
        assert_abs_diff_eq!(d.get(0, 0), 0.0, epsilon = 1e-12);
        let w = gap_weighted_diagram(&g).unwrap();
        assert_abs_diff_eq!(w.get(1, 0), 2.0 * M2_H, epsilon = 1e-10);
        assert_eq!(w.get(0, 0), 0.0);
        assert!(w.highlight.is_some());

        let g = line_grid(Hopping::Complex, (1.0, 6f64.sqrt(), 2));
        let d = steady_diagram(&g).unwrap();
        assert_abs_diff_eq!(d.get(1, 0), M2_T, epsilon = 1e-12);
        assert!(d.get(0, 0).is_nan());
        let w = gap_weighted_diagram(&g).unwrap();
        assert_abs_diff_eq!(w.get(1, 0), SQRT_2 * M2_T, epsilon = 1e-10);
    }

    #[test]
    fn refinement_invariance_and_product() {
        let coarse = GridSpec::standard(Hopping::Real);
        let mut fine = coarse;
        fine.noise.n = 119;
        fine.decay.n = 120;
        let (a, b) = (steady_diagram(&coarse).unwrap(), steady_diagram(&fine).unwrap());
        for i in 0..60 {
            for j in 0..60 {
                let (x, y) = (a.get(i, j), b.get(2 * i + 1, 2 * j));
                assert!(x.to_bits() == y.to_bits() || (x - y).abs() < 1e-15 || (x.is_nan() && y.is_nan()));
            }
        }
        let gap = gap_diagram(&coarse).unwrap();
        let w = gap_weighted_diagram(&coarse).unwrap();
        for i in 0..60 {
            for j in 0..60 {
                let prod = a.get(i, j) * gap.get(i, j);
                let v = w.get(i, j);
                assert!((v.is_nan() && prod.is_nan()) || (v - prod).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn line_maxima() {
        let g = GridSpec {
            noise: Axis::linear(0.0, 1e-9, 2),
            decay: Axis::linear(2.05, 6.0, 40),
            hopping: Hopping::Real,
        };
        let m = locate_maximum(&g, Quantity::SteadySre).unwrap().unwrap();
        assert_abs_diff_eq!(m.value, M2_H, epsilon = 1e-6);
        assert!((m.decay - 2.0 * SQRT_2).abs() < 5e-3);
        let g = GridSpec {
            hopping: Hopping::Complex,
            ..g
        };
        let m = locate_maximum(&g, Quantity::SteadySre).unwrap().unwrap();
        assert_abs_diff_eq!(m.value, M2_T, epsilon = 1e-6);
        assert!((m.decay - 6f64.sqrt()).abs() < 5e-3);
    }

    #[test]
    fn noisy_maximum_in_window() {
        let g = GridSpec {
            noise: Axis::linear(0.0, 0.15, 31),
            decay: Axis::linear(2.0, 6.0, 41),
            hopping: Hopping::Real,
        };
        let m = locate_maximum(&g, Quantity::SteadySre).unwrap().unwrap();
        assert!((m.noise - 0.065).abs() < 0.005, "{m:?}");
        assert!((m.decay - 3.599).abs() < 0.05, "{m:?}");
        assert!((m.value - 0.450).abs() < 0.005, "{m:?}");
        assert!(!m.tie);
        assert_eq!(m.refinement_rounds, 2);
    }

    #[test]
    fn ties_pick_lowest_node() {
        let pts = [(0.2, 1.0, 1.0), (0.1, 3.0, 1.0), (0.1, 2.0, 1.0), (0.0, 0.0, 0.5)];
        let (best, tie) = argmax(&pts).unwrap();
        assert!(tie);
        assert_eq!((best.0, best.1), (0.1, 2.0));
        assert!(argmax(&[(0.0, 0.0, f64::NAN)]).is_none());
    }

    #[test]
    fn noiseless_trajectories_reach_steady_values() {
        let g = GridSpec {
            noise: Axis::linear(0.0, 0.02, 2),
            decay: Axis::linear(2.2, 6.0, 6),
            hopping: Hopping::Real,
        };
        let proto = TrajectoryProtocol {
            horizon_gaps: 10.0,
            n_steps: 1000,
            n_trajectories: 2,
            seed: 3,
        };
        let t = trajectory_diagram(&g, &proto).unwrap();
        let s = steady_diagram(&g).unwrap();
        for i in 0..6 {
            assert!((t.get(i, 0) - s.get(i, 0)).abs() < 1e-3, "row {i}");
        }
        assert_eq!(t.protocol, Some(proto));
    }

    #[test]
    fn trajectory_diagram_is_thread_independent() {
        let g = GridSpec {
            noise: Axis::linear(0.0, 0.1, 3),
            decay: Axis::linear(2.5, 4.0, 3),
            hopping: Hopping::Complex,
        };
        let proto = TrajectoryProtocol {
            horizon_gaps: 3.0,
            n_steps: 70,
            n_trajectories: 20,
            seed: 17,
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| trajectory_diagram(&g, &proto).unwrap())
        };
        let (a, b) = (run(1), run(3));
        for (ra, rb) in a.values.iter().zip(&b.values) {
            for (x, y) in ra.iter().zip(rb) {
                assert!(x.to_bits() == y.to_bits());
            }
        }
    }

    #[test]
    fn unbroken_nodes_are_nan() {
        let g = line_grid(Hopping::Real, (0.5, 1.5, 3));
        let d = steady_diagram(&g).unwrap();
        assert!((0..3).all(|i| d.get(i, 0).is_nan()));
        assert!((0..3).all(|i| d.get(i, 1).is_finite()));
        assert_eq!(d.nan_count(), 3);
    }
}
