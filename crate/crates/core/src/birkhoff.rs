//! Birkhoff sums of `log |c_1|` along base orbits, tube probes and the
//! Furstenberg example of an indifferent map with unbounded sums.
//!
//! For a map fixing the zero section the partial sums
//! `S^n(theta) = sum_{i<n} log |c_1(theta + i alpha)|` control the modulus of
//! every orbit of a linear fiber map: `|z_n| = |z_0| exp S^n(theta)`.

use crate::arith::continued_fraction;
use crate::error::{Error, Result};
use crate::fibered::{FiberedMap, MAX_GRID_POINTS};
use crate::trig::cohomology::DEFAULT_DIVISOR_FLOOR;
use crate::trig::{base_point, frac_mul, grid, solve_cohomological, torus_norm, TrigPoly};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Relative slack on the tube radius absorbing rounding of `|c_1 z|`.
pub const TUBE_SLACK: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Agreement required between the sums and the telescoped transfer function
/// before a scan reports a coboundary.
pub const TELESCOPING_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirkhoffTrace {
    pub theta: Vec<f64>,
    /// `S^0, .., S^N`.
    pub sums: Vec<f64>,
    pub running_min: f64,
    pub running_max: f64,
    /// Least-squares slope of `S^n` against `n`.
    pub slope: f64,
}

impl BirkhoffTrace {
    pub fn horizon(&self) -> usize {
        self.sums.len() - 1
    }

    /// Rows `n,S^n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,S\n");
        for (n, s) in self.sums.iter().enumerate() {
            out.push_str(&format!("{n},{s:e}\n"));
        }
        out
    }
}

fn require_zero_section(map: &FiberedMap) -> Result<()> {
    if map.fixes_zero_section() {
        Ok(())
    } else {
        Err(Error::InvalidInput("map does not fix the zero section".into()))
    }
}

/// Partial sums of `log |c_1|` along the orbit of `theta`, each base point
/// taken from the exact phase of `i alpha`.
pub fn birkhoff_trace(map: &FiberedMap, theta: &[f64], n: usize) -> Result<BirkhoffTrace> {
    require_zero_section(map)?;
    if theta.len() != map.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            found: theta.len(),
        });
    }
    let c1 = map.linear();
    let mut sums = Vec::with_capacity(n + 1);
    let mut s = 0.0;
    sums.push(s);
    for i in 0..n {
        let t = base_point(theta, map.alpha(), i as i64);
        s += c1.eval(&t).norm().ln();
        sums.push(s);
    }
    let running_min = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let running_max = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(BirkhoffTrace {
        theta: theta.to_vec(),
        slope: least_squares_slope(&sums),
        sums,
        running_min,
        running_max,
    })
}

fn least_squares_slope(s: &[f64]) -> f64 {
    let m = s.len() as f64;
    if s.len() < 2 {
        return 0.0;
    }
    let mean_n = (m - 1.0) / 2.0;
    let mean_s = s.iter().sum::<f64>() / m;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, v) in s.iter().enumerate() {
        let dn = i as f64 - mean_n;
        num += dn * (v - mean_s);
        den += dn * dn;
    }
    num / den
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HorizonRow {
    pub horizon: usize,
    pub min_oscillation: f64,
    pub max_oscillation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CoboundaryVerdict {
    /// `log |c_1|` minus its mean was solved as `u(theta + alpha) - u(theta)`
    /// and the sums at the witness telescope to `u` within tolerance.
    Coboundary { sup_transfer: f64, residual: f64 },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundednessReport {
    pub horizon: usize,
    pub grid_resolution: usize,
    pub theta: Vec<f64>,
    pub b_minus: f64,
    pub b_plus: f64,
    pub oscillation: f64,
    /// Oscillation extremes over the grid at horizons `1, 2, 4, .., N`.
    pub horizons: Vec<HorizonRow>,
    pub verdict: CoboundaryVerdict,
}

/// Searches the `res^d` grid for the base point whose sums up to `n` have the
/// smallest oscillation `max S - min S`.
pub fn boundedness_scan(map: &FiberedMap, n: usize, res: usize) -> Result<BoundednessReport> {
    require_zero_section(map)?;
    let kappa = map.multiplier()?;
    if (kappa - 1.0).abs() > 1e-9 {
        return Err(Error::NotIndifferent { kappa });
    }
    let dim = map.dim();
    let len = grid::grid_len(dim, res);
    if res == 0 || len > MAX_GRID_POINTS {
        return Err(Error::InvalidInput(format!("unsupported scan resolution {res}")));
    }
    let c1 = map.linear();
    let origin = vec![0.0; dim];
    let mut sums = vec![0.0; len];
    let mut lo = vec![0.0f64; len];
    let mut hi = vec![0.0f64; len];
    let mut horizons = Vec::new();
    let mut checkpoint = 1;
    for i in 0..n {
        let shift = base_point(&origin, map.alpha(), i as i64);
        let vals = c1.sample_grid_shifted(res, &shift);
        for k in 0..len {
            sums[k] += vals[k].norm().ln();
            lo[k] = lo[k].min(sums[k]);
            hi[k] = hi[k].max(sums[k]);
        }
        if i + 1 == checkpoint || i + 1 == n {
            let osc = lo.iter().zip(&hi).map(|(a, b)| b - a);
            let (mn, mx) = osc.fold((f64::INFINITY, 0.0f64), |(a, b), o| (a.min(o), b.max(o)));
            horizons.push(HorizonRow {
                horizon: i + 1,
                min_oscillation: mn,
                max_oscillation: mx,
            });
            if i + 1 == checkpoint {
                checkpoint *= 2;
            }
        }
    }
    let mut best = 0;
    for k in 1..len {
        if hi[k] - lo[k] < hi[best] - lo[best] {
            best = k;
        }
    }
    let theta = grid::node(dim, res, best);
    let verdict = coboundary_verdict(map, &theta, n);
    Ok(BoundednessReport {
        horizon: n,
        grid_resolution: res,
        theta,
        b_minus: lo[best],
        b_plus: hi[best],
        oscillation: hi[best] - lo[best],
        horizons,
        verdict,
    })
}

fn coboundary_verdict(map: &FiberedMap, theta: &[f64], n: usize) -> CoboundaryVerdict {
    let c1 = map.linear();
    let dim = map.dim();
    let max_res = match dim {
        1 => 1 << 14,
        2 => 1 << 8,
        _ => 32,
    };
    let sampler = |res: usize| -> Result<Vec<Complex64>> {
        Ok(c1
            .sample_grid(res)
            .iter()
            .map(|v| Complex64::new(v.norm().ln(), 0.0))
            .collect())
    };
    let g = match TrigPoly::fit_sampled(dim, sampler, 64.min(max_res), 1e-14, max_res) {
        Ok(g) => g.real_part(),
        Err(e) => {
            return CoboundaryVerdict::Inconclusive {
                reason: format!("log|c1| has no trigonometric fit: {e}"),
            }
        }
    };
    let mean = g.mean().re;
    let g = &g - &TrigPoly::constant(dim, g.mean());
    let sol = match solve_cohomological(&g, map.alpha(), DEFAULT_DIVISOR_FLOOR) {
        Ok(s) => s,
        Err(e) => {
            return CoboundaryVerdict::Inconclusive {
                reason: format!("cohomological equation not solved: {e}"),
            }
        }
    };
    let trace = match birkhoff_trace(map, theta, n) {
        Ok(t) => t,
        Err(e) => return CoboundaryVerdict::Inconclusive { reason: e.to_string() },
    };
    let u0 = sol.u.eval(theta).re;
    let mut residual = 0.0f64;
    for (i, s) in trace.sums.iter().enumerate() {
        let ui = sol.u.eval(&base_point(theta, map.alpha(), i as i64)).re;
        residual = residual.max((s - i as f64 * mean - (ui - u0)).abs());
    }
    let sup_transfer = sol.u.grid_sup(sol.u.natural_resolution());
    if residual < TELESCOPING_TOLERANCE {
        CoboundaryVerdict::Coboundary {
            sup_transfer,
            residual,
        }
    } else {
        CoboundaryVerdict::Inconclusive {
            reason: format!("telescoping residual {residual:e}"),
        }
    }
}

/// Start points of a probe: a polar grid over each fiber disc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeGrid {
    pub theta_res: usize,
    pub radial: usize,
    pub angular: usize,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        ProbeGrid {
            theta_res: 64,
            radial: 4,
            angular: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProbeVerdict {
    Contained,
    Escaped {
        theta: Vec<f64>,
        z0: Complex64,
        step: usize,
        modulus: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub radius: f64,
    pub iterations: usize,
    pub grid: ProbeGrid,
    /// Largest `|z_j|` reached from each theta node.
    pub max_excursion: Vec<f64>,
    /// Largest `|z_n|` at the final step from each theta node, infinite if an
    /// orbit from that node escaped.
    pub final_modulus: Vec<f64>,
    pub verdict: ProbeVerdict,
}

impl StabilityReport {
    pub fn contained(&self) -> bool {
        self.verdict == ProbeVerdict::Contained
    }
}

/// Iterates the start points `r (i / radial) exp(2 pi i a / angular)` over
/// every theta node for `n` steps. An orbit escapes when `|z_j|` exceeds
/// `r (1 + TUBE_SLACK)`.
///
/// Orbits are advanced together: at step `j` the fiber coefficients of all
/// nodes are sampled spectrally at `theta + j alpha` with exact phases. The
/// first escape in node, radius, angle order is replayed under
/// [`FiberedMap::apply`], whose step is reported when the replay escapes too.
pub fn stability_probe(map: &FiberedMap, r: f64, n: usize, probe: ProbeGrid) -> Result<StabilityReport> {
    if !(r > 0.0 && r <= map.domain_radius()) {
        return Err(Error::InvalidInput(format!(
            "tube radius {r} outside (0, {}]",
            map.domain_radius()
        )));
    }
    let dim = map.dim();
    let len = grid::grid_len(dim, probe.theta_res);
    if probe.theta_res == 0 || probe.radial == 0 || probe.angular == 0 || len > MAX_GRID_POINTS {
        return Err(Error::InvalidInput("empty or oversized probe grid".into()));
    }
    let bound = r * (1.0 + TUBE_SLACK);
    let starts: Vec<Complex64> = (1..=probe.radial)
        .flat_map(|i| {
            (0..probe.angular).map(move |a| {
                Complex64::from_polar(
                    r * i as f64 / probe.radial as f64,
                    2.0 * PI * a as f64 / probe.angular as f64,
                )
            })
        })
        .collect();
    let mut z: Vec<Vec<Complex64>> = vec![starts.clone(); len];
    let mut escape: Vec<Option<(usize, usize)>> = vec![None; len];
    let mut max_excursion = vec![r; len];
    let mut escaped: Vec<Vec<bool>> = vec![vec![false; starts.len()]; len];
    let origin = vec![0.0; dim];
    for step in 1..=n {
        if escaped.iter().all(|e| e.iter().all(|&b| b)) {
            break;
        }
        let shift = base_point(&origin, map.alpha(), step as i64 - 1);
        let coeffs = map.sample_coeffs_shifted(probe.theta_res, &shift);
        z.par_iter_mut()
            .zip(escaped.par_iter_mut())
            .zip(escape.par_iter_mut())
            .zip(max_excursion.par_iter_mut())
            .enumerate()
            .for_each(|(m, (((zs, esc), first), top))| {
                for (k, zk) in zs.iter_mut().enumerate() {
                    if esc[k] {
                        continue;
                    }
                    let mut w = ZERO;
                    for c in coeffs.iter().rev() {
                        w = w * *zk + c[m];
                    }
                    *zk = w;
                    *top = top.max(w.norm());
                    if w.norm() > bound {
                        esc[k] = true;
                        if first.is_none_or(|(k0, _)| k < k0) {
                            *first = Some((k, step));
                        }
                    }
                }
            });
    }
    let final_modulus = z
        .iter()
        .zip(&escaped)
        .map(|(zs, esc)| {
            zs.iter()
                .zip(esc)
                .fold(0.0f64, |acc, (w, &e)| if e { f64::INFINITY } else { acc.max(w.norm()) })
        })
        .collect();
    let verdict = match escape.iter().enumerate().find_map(|(m, e)| e.map(|e| (m, e))) {
        None => ProbeVerdict::Contained,
        Some((m, (k, step))) => {
            let theta = grid::node(dim, probe.theta_res, m);
            let z0 = starts[k];
            let (step, modulus) = replay_escape(map, &theta, z0, n, bound).unwrap_or((step, z[m][k].norm()));
            ProbeVerdict::Escaped {
                theta,
                z0,
                step,
                modulus,
            }
        }
    };
    Ok(StabilityReport {
        radius: r,
        iterations: n,
        grid: probe,
        max_excursion,
        final_modulus,
        verdict,
    })
}

fn replay_escape(map: &FiberedMap, theta: &[f64], z0: Complex64, n: usize, bound: f64) -> Option<(usize, f64)> {
    let (mut t, mut z) = (theta.to_vec(), z0);
    for step in 1..=n {
        let (t1, w) = map.apply(&t, z).ok()?;
        if w.norm() > bound {
            return Some((step, w.norm()));
        }
        t = t1;
        z = w;
    }
    None
}

/// Amplitude law and selection rule of a Furstenberg example.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FurstenbergSchedule {
    /// Amplitude at a denominator `q` is `||q omega||^exponent`.
    pub exponent: f64,
    /// Number of levels to build.
    pub levels: usize,
    /// A convergent `q` is usable when `q ||q omega|| <= quality`.
    pub quality: f64,
    /// Required growth of the truncated solutions from one level to the next.
    pub growth: f64,
    /// Continued fraction terms examined.
    pub max_terms: usize,
    pub domain_radius: f64,
}

impl Default for FurstenbergSchedule {
    fn default() -> Self {
        FurstenbergSchedule {
            exponent: 0.5,
            levels: 6,
            quality: 0.125,
            growth: 2.0,
            max_terms: 64,
            domain_radius: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FurstenbergLevel {
    pub q: i64,
    pub distance: f64,
    pub amplitude: f64,
    /// `amplitude / |exp(2 pi i q omega) - 1|`.
    pub amplification: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub level: usize,
    pub q: i64,
    pub sup_norm: f64,
    pub coefficient_mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FurstenbergExample {
    pub omega: f64,
    pub levels: Vec<FurstenbergLevel>,
    /// `phi_K`, the sum of the first `K` levels.
    pub truncations: Vec<TrigPoly>,
    /// `psi_K` solving `psi(theta + omega) - psi(theta) = phi_K(theta)`.
    pub solutions: Vec<TrigPoly>,
    pub table: Vec<DivergenceRow>,
    #[serde(skip)]
    pub map: FiberedMap,
}

impl FurstenbergExample {
    pub fn phi(&self) -> &TrigPoly {
        self.truncations.last().expect("at least one level")
    }

    /// Rows `K,sup_norm`.
    pub fn table_csv(&self) -> String {
        let mut out = String::from("K,sup_norm\n");
        for row in &self.table {
            out.push_str(&format!("{},{:e}\n", row.level, row.sup_norm));
        }
        out
    }
}

/// Resolution of the dyadic grid used for sup-norms of the solutions.
pub const FURSTENBERG_SUP_RESOLUTION: usize = 1 << 16;

const MAX_DENOMINATOR: u128 = 1 << 48;

/// Builds `phi = sum_k 2 a_k cos(2 pi q_k theta)` on continued fraction
/// denominators `q_k` of `omega` and the linear map with `c_1 = exp(phi)`.
///
/// Levels are taken greedily among usable convergents: a level is accepted
/// when its amplification is at least `1.01 (growth + 1)` times the sum of
/// the amplifications already accepted, which forces the sup-norm of the
/// truncated solutions to grow by `growth` per level.
pub fn furstenberg_example(omega: f64, schedule: FurstenbergSchedule) -> Result<FurstenbergExample> {
    if !(schedule.exponent > 0.0 && schedule.quality > 0.0 && schedule.growth > 0.0) || schedule.levels == 0 {
        return Err(Error::InvalidInput("schedule must be positive".into()));
    }
    let cf = continued_fraction(omega, schedule.max_terms)?;
    let mut levels: Vec<FurstenbergLevel> = Vec::new();
    let mut total = 0.0;
    let mut last_q = 0u128;
    for &(_, q) in &cf.convergents {
        if levels.len() == schedule.levels {
            break;
        }
        if q == 0 || q == last_q || q > MAX_DENOMINATOR {
            continue;
        }
        last_q = q;
        let q = q as i64;
        let distance = torus_norm(frac_mul(q, omega));
        if distance == 0.0 || q as f64 * distance > schedule.quality {
            continue;
        }
        let amplitude = distance.powf(schedule.exponent);
        let amplification = amplitude / (2.0 * (PI * distance).sin());
        if levels.is_empty() || amplification >= 1.01 * (schedule.growth + 1.0) * total {
            total += amplification;
            levels.push(FurstenbergLevel {
                q,
                distance,
                amplitude,
                amplification,
            });
        }
    }
    if levels.len() < schedule.levels {
        return Err(Error::InsufficientLiouville {
            found: levels.len(),
            requested: schedule.levels,
        });
    }
    let alpha = [omega];
    let mut truncations = Vec::new();
    let mut solutions = Vec::new();
    let mut table = Vec::new();
    let mut phi = TrigPoly::zero(1);
    for (k, lvl) in levels.iter().enumerate() {
        phi = &phi + &TrigPoly::cosine(vec![lvl.q], 2.0 * lvl.amplitude);
        let psi = solve_cohomological(&phi, &alpha, 0.0)?.u;
        table.push(DivergenceRow {
            level: k + 1,
            q: lvl.q,
            sup_norm: psi.grid_sup(FURSTENBERG_SUP_RESOLUTION),
            coefficient_mass: psi.mass(),
        });
        truncations.push(phi.clone());
        solutions.push(psi);
    }
    let c1 = phi.exp(1e-17);
    let map = FiberedMap::new(vec![omega], vec![c1], schedule.domain_radius)?;
    Ok(FurstenbergExample {
        omega,
        levels,
        truncations,
        solutions,
        table,
        map,
    })
}
