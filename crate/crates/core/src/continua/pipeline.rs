use super::chain::{certify_fiber, invert_fiber, PeriodicMap};
use super::{fiber_hausdorff_pixels, fill_fibers, hausdorff_pixels, CompactSetApprox, TubeGrid};
use crate::arith::{prime_denominator_approximants, Approximant, DEFAULT_PRIME_CAP};
use crate::error::{Error, Result};
use crate::fibered::{FiberPoly, FiberedMap};
use crate::trig::base_point;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fibers along base orbits, for the original map or a periodized one.
trait FiberSource: Sync {
    fn fiber_at(&self, theta: f64) -> FiberPoly;
    fn rotation(&self) -> f64;
    fn domain(&self) -> f64;
    fn autonomous(&self) -> bool;
}

impl FiberSource for FiberedMap {
    fn fiber_at(&self, theta: f64) -> FiberPoly {
        self.fiber(&[theta])
    }
    fn rotation(&self) -> f64 {
        self.alpha()[0]
    }
    fn domain(&self) -> f64 {
        self.domain_radius()
    }
    fn autonomous(&self) -> bool {
        self.is_autonomous()
    }
}

impl FiberSource for PeriodicMap {
    fn fiber_at(&self, theta: f64) -> FiberPoly {
        self.fiber(theta)
    }
    fn rotation(&self) -> f64 {
        self.rotation
    }
    fn domain(&self) -> f64 {
        self.domain_radius
    }
    fn autonomous(&self) -> bool {
        self.is_autonomous()
    }
}

fn orbit_point(theta: f64, rotation: f64, j: i64) -> f64 {
    base_point(&[theta], &[rotation], j)[0]
}

/// One fiber of the nodes whose `n` forward and `n` backward iterates stay in
/// the closed tube.
fn nonescaping_fiber(src: &dyn FiberSource, theta: f64, grid: &TubeGrid, n: usize) -> Result<Vec<bool>> {
    let rot = src.rotation();
    let r = grid.radius;
    let mut forward = Vec::with_capacity(n);
    let mut backward = Vec::with_capacity(n);
    for j in 0..n as i64 {
        let f = src.fiber_at(orbit_point(theta, rot, j));
        certify_fiber(&f, src.domain(), r)?;
        forward.push(f);
        let t = orbit_point(theta, rot, -j - 1);
        let g = src.fiber_at(t);
        certify_fiber(&g, src.domain(), r)?;
        backward.push((t, g));
    }
    let s = grid.side();
    let origin = grid.origin_index();
    let domain = src.domain();
    (0..grid.fiber_len())
        .into_par_iter()
        .map(|k| {
            let z0 = grid.node(k % s, k / s);
            if k == origin {
                return Ok(true);
            }
            if !grid.in_tube(z0) {
                return Ok(false);
            }
            let mut z = z0;
            for f in &forward {
                z = f.eval(z);
                if !grid.in_tube(z) {
                    return Ok(false);
                }
            }
            let mut z = z0;
            for (t, g) in &backward {
                z = invert_fiber(g, z, domain).ok_or(Error::InverseBreakdown {
                    theta: vec![*t],
                    value: z,
                })?;
                if !grid.in_tube(z) {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect()
}

fn nonescaping_fibers(src: &dyn FiberSource, thetas: &[f64], grid: &TubeGrid, n: usize) -> Result<Vec<Vec<bool>>> {
    if src.autonomous() {
        let f = nonescaping_fiber(src, thetas.first().copied().unwrap_or(0.0), grid, n)?;
        return Ok(vec![f; thetas.len()]);
    }
    thetas.iter().map(|&t| nonescaping_fiber(src, t, grid, n)).collect()
}

fn check_tube(map: &FiberedMap, grid: &TubeGrid) -> Result<()> {
    if map.dim() != 1 {
        return Err(Error::Unsupported("continua need a one-dimensional base".into()));
    }
    if !map.fixes_zero_section() {
        return Err(Error::InvalidInput("map does not fix the zero section".into()));
    }
    if grid.radius > map.domain_radius() {
        return Err(Error::InvalidInput(format!(
            "tube radius {} exceeds the domain radius {}",
            grid.radius,
            map.domain_radius()
        )));
    }
    Ok(())
}

/// Nodes of the grid fibers over `m / theta_res` whose forward and backward
/// orbits under `map` stay in the closed tube for `n` steps. Maps constant
/// in `theta` are computed on one fiber.
pub fn nonescaping_set(map: &FiberedMap, grid: TubeGrid, n: usize) -> Result<CompactSetApprox> {
    let thetas: Vec<f64> = (0..grid.theta_res).map(|m| grid.theta(m)).collect();
    nonescaping_set_at(map, grid, &thetas, n)
}

/// As [`nonescaping_set`] over arbitrary base points.
pub fn nonescaping_set_at(map: &FiberedMap, grid: TubeGrid, thetas: &[f64], n: usize) -> Result<CompactSetApprox> {
    check_tube(map, &grid)?;
    let fibers = nonescaping_fibers(map, thetas, &grid, n)?;
    CompactSetApprox::from_fibers(grid, thetas.to_vec(), fibers)
}

fn periodic_level_set(pm: &PeriodicMap, grid: &TubeGrid, thetas: &[f64], n: usize) -> Result<CompactSetApprox> {
    let fibers = nonescaping_fibers(pm, thetas, grid, n)?;
    let filled = fill_fibers(&CompactSetApprox::from_fibers(*grid, thetas.to_vec(), fibers)?);
    if pm.scaling.is_empty() {
        return Ok(filled);
    }
    let s = grid.side();
    let mut out = filled.clone();
    for (m, &t) in thetas.iter().enumerate() {
        let fib = out.fiber_mut(m);
        for (k, v) in fib.iter_mut().enumerate() {
            let z = grid.node(k % s, k / s);
            *v = grid.in_tube(z) && filled.contains(m, pm.to_conjugated(t, z));
        }
    }
    out.mark_zero_section();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumSchedule {
    /// Number of prime denominator approximants.
    pub levels: usize,
    pub horizon: usize,
    pub theta_res: usize,
    pub pixels: usize,
    pub fejer_degree: usize,
    /// Largest change between the last two levels, in pixels.
    pub stabilization: f64,
    pub prime_cap: u64,
}

impl Default for ContinuumSchedule {
    fn default() -> Self {
        ContinuumSchedule {
            levels: 2,
            horizon: 200,
            theta_res: 64,
            pixels: 128,
            fejer_degree: 8,
            stabilization: 2.0,
            prime_cap: DEFAULT_PRIME_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRecord {
    pub p: i64,
    pub q: i64,
    pub approximation_error: f64,
    pub fiber_distance: f64,
    pub unit_residual: f64,
    pub marked: usize,
    /// Hausdorff distance to the previous level's set, in pixels.
    pub change_pixels: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    /// `d_H(F(K), K)` over fibers `theta + alpha`, in pixels.
    pub forward_pixels: f64,
    /// `d_H(F^{-1}(K), K)` over fibers `theta - alpha`, in pixels.
    pub backward_pixels: f64,
    /// Largest distance by which an image of a marked node leaves the tube.
    pub forward_excess_pixels: f64,
    pub backward_excess_pixels: f64,
}

impl DriftReport {
    pub fn forward(&self) -> f64 {
        self.forward_pixels.max(self.forward_excess_pixels)
    }

    pub fn backward(&self) -> f64 {
        self.backward_pixels.max(self.backward_excess_pixels)
    }
}

/// Invariance of `k` under `map`: the image and preimage of `k` are
/// rasterized by pulling grid nodes back through one step and compared with
/// `k_plus` and `k_minus`, the sets over the shifted base points
/// `theta + alpha` and `theta - alpha`.
pub fn invariance_drift(
    map: &FiberedMap,
    k: &CompactSetApprox,
    k_plus: &CompactSetApprox,
    k_minus: &CompactSetApprox,
) -> Result<DriftReport> {
    let grid = k.grid;
    if k_plus.grid != grid || k_minus.grid != grid {
        return Err(Error::GeometryMismatch {
            what: "shifted sets use another grid".into(),
        });
    }
    let count = k.fiber_count();
    if k_plus.fiber_count() != count || k_minus.fiber_count() != count {
        return Err(Error::GeometryMismatch {
            what: "fiber counts differ".into(),
        });
    }
    let s = grid.side();
    let h = grid.pixel_size();
    let bound = grid.radius * (1.0 + super::TUBE_SLACK);
    let alpha = map.alpha()[0];
    let domain = map.domain_radius();
    let uniform = |c: &CompactSetApprox| c.fibers().all(|f| f == c.fiber(0));
    let fibers: Vec<usize> = if count > 0 && map.is_autonomous() && uniform(k) && uniform(k_plus) && uniform(k_minus) {
        vec![0]
    } else {
        (0..count).collect()
    };
    let per: Vec<Result<[f64; 4]>> = fibers
        .par_iter()
        .map(|&m| {
            let theta = k.thetas[m];
            let f = map.fiber(&[theta]);
            let t_back = orbit_point(theta, alpha, -1);
            let g = map.fiber(&[t_back]);
            let mut image = vec![false; grid.fiber_len()];
            let mut preimage = vec![false; grid.fiber_len()];
            let (mut fwd_excess, mut bwd_excess) = (0.0f64, 0.0f64);
            for idx in 0..grid.fiber_len() {
                let z = grid.node(idx % s, idx / s);
                if !grid.in_tube(z) {
                    continue;
                }
                if let Some(w) = invert_fiber(&f, z, domain) {
                    image[idx] = k.contains(m, w);
                }
                preimage[idx] = k.contains(m, g.eval(z));
                if k.fiber(m)[idx] {
                    fwd_excess = fwd_excess.max((f.eval(z).norm() - bound).max(0.0) / h);
                    let w = invert_fiber(&g, z, domain).ok_or(Error::InverseBreakdown {
                        theta: vec![t_back],
                        value: z,
                    })?;
                    bwd_excess = bwd_excess.max((w.norm() - bound).max(0.0) / h);
                }
            }
            let fwd = fiber_hausdorff_pixels(&image, k_plus.fiber(m), s).ok_or(Error::EmptySet { fiber: m })?;
            let bwd = fiber_hausdorff_pixels(&preimage, k_minus.fiber(m), s).ok_or(Error::EmptySet { fiber: m })?;
            Ok([fwd, bwd, fwd_excess, bwd_excess])
        })
        .collect();
    let mut out = [0.0f64; 4];
    for r in per {
        let r = r?;
        for i in 0..4 {
            out[i] = out[i].max(r[i]);
        }
    }
    Ok(DriftReport {
        forward_pixels: out[0],
        backward_pixels: out[1],
        forward_excess_pixels: out[2],
        backward_excess_pixels: out[3],
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuumReport {
    pub grid: TubeGrid,
    pub schedule: ContinuumSchedule,
    pub levels: Vec<LevelRecord>,
    pub zero_section_contained: bool,
    pub drift: DriftReport,
    /// Smallest distance from a marked node to the tube boundary, in pixels.
    pub boundary_contact_pixels: f64,
    pub boundary_contact: bool,
    pub fiber_counts: Vec<usize>,
    pub fiber_components: Vec<usize>,
    #[serde(skip)]
    pub set: CompactSetApprox,
}

/// Approximates an invariant continuum of an indifferent map in the tube of
/// radius `r`.
///
/// Each level periodizes the map along the next prime denominator
/// approximant, keeps the nodes that do not escape the tube in either time
/// direction, fills the fibers and maps them back to the original
/// coordinates. The last level is then checked against the original map.
pub fn continuum_approx(map: &FiberedMap, r: f64, schedule: ContinuumSchedule) -> Result<ContinuumReport> {
    let grid = TubeGrid::new(schedule.theta_res, schedule.pixels, r)?;
    check_tube(map, &grid)?;
    if schedule.levels == 0 {
        return Err(Error::InvalidInput("at least one level is required".into()));
    }
    let kappa = map.multiplier()?;
    if (kappa - 1.0).abs() > 1e-9 {
        return Err(Error::NotIndifferent { kappa });
    }
    let rot = map.rotation_number(true)?;
    if rot.degree.iter().any(|&d| d != 0) {
        return Err(Error::NonZeroDegree { degree: rot.degree });
    }
    let approximants = prime_denominator_approximants(
        map.alpha(),
        schedule.fejer_degree as u64,
        schedule.levels,
        schedule.prime_cap,
    )?;
    let thetas: Vec<f64> = (0..grid.theta_res).map(|m| grid.theta(m)).collect();
    let mut levels = Vec::new();
    let mut current: Option<(PeriodicMap, CompactSetApprox)> = None;
    for a in &approximants.entries {
        let pm = PeriodicMap::new(map, a, schedule.fejer_degree)?;
        let set = periodic_level_set(&pm, &grid, &thetas, schedule.horizon)?;
        let change = match &current {
            Some((_, prev)) => Some(hausdorff_pixels(prev, &set)?),
            None => None,
        };
        levels.push(level_record(&pm, a, &set, change));
        current = Some((pm, set));
    }
    let (pm, set) = current.expect("at least one level");
    if let Some(change) = levels.last().and_then(|l| l.change_pixels) {
        if change > schedule.stabilization {
            return Err(Error::ScheduleExhausted {
                levels: levels.len(),
                distance: change,
            });
        }
    }
    let alpha = map.alpha()[0];
    let (k_plus, k_minus) = if map.is_autonomous() {
        (set.clone(), set.clone())
    } else {
        let plus: Vec<f64> = thetas.iter().map(|&t| orbit_point(t, alpha, 1)).collect();
        let minus: Vec<f64> = thetas.iter().map(|&t| orbit_point(t, alpha, -1)).collect();
        (
            periodic_level_set(&pm, &grid, &plus, schedule.horizon)?,
            periodic_level_set(&pm, &grid, &minus, schedule.horizon)?,
        )
    };
    let drift = invariance_drift(map, &set, &k_plus, &k_minus)?;
    let contact = set.boundary_contact().unwrap_or(f64::INFINITY);
    Ok(ContinuumReport {
        grid,
        schedule,
        levels,
        zero_section_contained: set.contains_zero_section(),
        drift,
        boundary_contact_pixels: contact,
        boundary_contact: contact <= 2f64.sqrt(),
        fiber_counts: set.fiber_counts(),
        fiber_components: set.component_counts(),
        set,
    })
}

fn level_record(pm: &PeriodicMap, a: &Approximant, set: &CompactSetApprox, change: Option<f64>) -> LevelRecord {
    LevelRecord {
        p: pm.p,
        q: pm.q,
        approximation_error: a.error[0],
        fiber_distance: pm.fiber_distance,
        unit_residual: pm.unit_residual,
        marked: set.count(),
        change_pixels: change,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rotation_keeps_the_whole_tube() {
        let c = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 0.3);
        let map = FiberedMap::autonomous(0.5f64.sqrt(), &[c], 1.0).unwrap();
        let grid = TubeGrid::new(4, 16, 0.5).unwrap();
        let k = nonescaping_set(&map, grid, 50).unwrap();
        assert_eq!(k, CompactSetApprox::full_tube(grid));
    }

    #[test]
    fn attracting_map_keeps_only_the_origin() {
        let map = FiberedMap::autonomous(0.5f64.sqrt(), &[Complex64::new(0.5, 0.0)], 1.0).unwrap();
        let grid = TubeGrid::new(2, 16, 0.5).unwrap();
        let k = nonescaping_set(&map, grid, 20).unwrap();
        assert_eq!(k.fiber_counts(), vec![1, 1]);
        assert!(k.contains_zero_section());
    }
}
