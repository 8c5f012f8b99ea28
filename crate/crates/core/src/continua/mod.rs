//! Pixel approximations of invariant continua for one-dimensional bases.
//!
//! A tube `T x {|z| <= r}` is discretized by `theta_res` base nodes and, in
//! each fiber, the `(P + 1)^2` nodes `z = -r + a h + i(-r + b h)` with
//! `h = 2r / P`. Nodes outside the closed disc are never marked. The origin
//! is the node `a = b = P / 2`.
//!
//! The pipeline in [`continuum_approx`] replaces the base rotation by prime
//! denominator approximants ([`periodize`]), keeps the nodes whose forward
//! and backward orbits stay in the tube ([`nonescaping_set`]), fills the
//! fibers ([`fill_fibers`]) and maps the result back to the original
//! coordinates.

mod chain;
mod pipeline;

pub use chain::{periodize, GoodChain, PeriodicMap};
pub use pipeline::{
    continuum_approx, invariance_drift, nonescaping_set, nonescaping_set_at, ContinuumReport, ContinuumSchedule,
    DriftReport, LevelRecord,
};

use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Relative slack on the tube radius for membership tests.
pub const TUBE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeGrid {
    pub theta_res: usize,
    /// Pixel intervals per side; each fiber has `pixels + 1` nodes per side.
    pub pixels: usize,
    pub radius: f64,
}

impl TubeGrid {
    pub fn new(theta_res: usize, pixels: usize, radius: f64) -> Result<Self> {
        if theta_res == 0 || pixels < 2 || !pixels.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "tube grid needs theta_res >= 1 and an even pixel count, got {theta_res} x {pixels}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("tube radius {radius} is not positive")));
        }
        Ok(TubeGrid {
            theta_res,
            pixels,
            radius,
        })
    }

    pub fn side(&self) -> usize {
        self.pixels + 1
    }

    pub fn fiber_len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn pixel_size(&self) -> f64 {
        2.0 * self.radius / self.pixels as f64
    }

    pub fn theta(&self, m: usize) -> f64 {
        m as f64 / self.theta_res as f64
    }

    /// Node at column `a`, row `b`.
    pub fn node(&self, a: usize, b: usize) -> Complex64 {
        let h = self.pixel_size();
        Complex64::new(-self.radius + a as f64 * h, -self.radius + b as f64 * h)
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        b * self.side() + a
    }

    pub fn origin_index(&self) -> usize {
        self.index(self.pixels / 2, self.pixels / 2)
    }

    pub fn in_tube(&self, z: Complex64) -> bool {
        z.norm() <= self.radius * (1.0 + TUBE_SLACK)
    }

    /// Per-fiber mask of the tube nodes.
    pub fn tube_mask(&self) -> Vec<bool> {
        let s = self.side();
        (0..self.fiber_len()).map(|k| self.in_tube(self.node(k % s, k / s))).collect()
    }

    /// Node representing a point: the nearest node, or when that lies
    /// outside the tube, the node obtained by rounding both coordinates
    /// toward the origin. `None` when the point is outside the frame.
    pub fn lookup(&self, z: Complex64) -> Option<usize> {
        let h = self.pixel_size();
        let x = (z.re + self.radius) / h;
        let y = (z.im + self.radius) / h;
        let p = self.pixels as f64;
        if !(x > -0.5 && y > -0.5 && x < p + 0.5 && y < p + 0.5) {
            return None;
        }
        let (a, b) = (x.round() as usize, y.round() as usize);
        if self.in_tube(self.node(a, b)) {
            return Some(self.index(a, b));
        }
        let c = p / 2.0;
        let toward = |v: f64| -> usize {
            if v >= c {
                (v - c).floor().max(0.0) as usize + self.pixels / 2
            } else {
                self.pixels / 2 - (c - v).floor().max(0.0) as usize
            }
        };
        let (a, b) = (toward(x).min(self.pixels), toward(y).min(self.pixels));
        self.in_tube(self.node(a, b)).then(|| self.index(a, b))
    }
}

/// Per-fiber pixel masks over a [`TubeGrid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactSetApprox {
    pub grid: TubeGrid,
    /// Base point of each fiber.
    pub thetas: Vec<f64>,
    /// Fiber `m` occupies `masks[m * fiber_len ..][.. fiber_len]`, rows of
    /// constant `Im z`.
    pub masks: Vec<bool>,
}

impl CompactSetApprox {
    pub fn from_fibers(grid: TubeGrid, thetas: Vec<f64>, fibers: Vec<Vec<bool>>) -> Result<Self> {
        if fibers.len() != thetas.len() || fibers.iter().any(|f| f.len() != grid.fiber_len()) {
            return Err(Error::GeometryMismatch {
                what: "fiber count or size".into(),
            });
        }
        Ok(CompactSetApprox {
            grid,
            thetas,
            masks: fibers.concat(),
        })
    }

    /// Every tube node of every base node.
    pub fn full_tube(grid: TubeGrid) -> Self {
        let thetas = (0..grid.theta_res).map(|m| grid.theta(m)).collect();
        let tube = grid.tube_mask();
        CompactSetApprox {
            grid,
            thetas,
            masks: (0..grid.theta_res).flat_map(|_| tube.iter().copied()).collect(),
        }
    }

    pub fn fiber_count(&self) -> usize {
        self.thetas.len()
    }

    pub fn fiber(&self, m: usize) -> &[bool] {
        let n = self.grid.fiber_len();
        &self.masks[m * n..(m + 1) * n]
    }

    pub fn fiber_mut(&mut self, m: usize) -> &mut [bool] {
        let n = self.grid.fiber_len();
        &mut self.masks[m * n..(m + 1) * n]
    }

    pub fn fibers(&self) -> impl Iterator<Item = &[bool]> {
        self.masks.chunks(self.grid.fiber_len())
    }

    pub fn count(&self) -> usize {
        self.masks.iter().filter(|&&b| b).count()
    }

    pub fn fiber_counts(&self) -> Vec<usize> {
        self.fibers().map(|f| f.iter().filter(|&&b| b).count()).collect()
    }

    pub fn contains_zero_section(&self) -> bool {
        let o = self.grid.origin_index();
        self.fibers().all(|f| f[o])
    }

    pub fn mark_zero_section(&mut self) {
        let o = self.grid.origin_index();
        let n = self.grid.fiber_len();
        for m in 0..self.fiber_count() {
            self.masks[m * n + o] = true;
        }
    }

    /// Whether the point `(fiber m, z)` lies in the set under
    /// [`TubeGrid::lookup`].
    pub fn contains(&self, m: usize, z: Complex64) -> bool {
        self.grid.lookup(z).is_some_and(|k| self.fiber(m)[k])
    }

    /// Smallest `r - |z|` over marked nodes, in pixels.
    pub fn boundary_contact(&self) -> Option<f64> {
        let s = self.grid.side();
        let h = self.grid.pixel_size();
        self.fibers()
            .flat_map(|f| f.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k))
            .map(|k| ((self.grid.radius - self.grid.node(k % s, k / s).norm()) / h).max(0.0))
            .reduce(f64::min)
    }

    /// Number of 4-connected components of each fiber.
    pub fn component_counts(&self) -> Vec<usize> {
        let s = self.grid.side();
        self.fibers().map(|f| components(f, s)).collect()
    }

    /// Keeps every other node in each direction: fine node `2a` sits at the
    /// same point as coarse node `a`.
    pub fn downsample(&self) -> Result<Self> {
        if !self.grid.pixels.is_multiple_of(4) {
            return Err(Error::GeometryMismatch {
                what: "pixel count not divisible by 4".into(),
            });
        }
        let coarse = TubeGrid::new(self.grid.theta_res.div_ceil(2), self.grid.pixels / 2, self.grid.radius)?;
        let fs = self.grid.side();
        let cs = coarse.side();
        let mut thetas = Vec::new();
        let mut fibers = Vec::new();
        for (m, f) in self.fibers().enumerate().step_by(2) {
            thetas.push(self.thetas[m]);
            fibers.push((0..cs * cs).map(|k| f[(2 * (k / cs)) * fs + 2 * (k % cs)]).collect());
        }
        CompactSetApprox::from_fibers(coarse, thetas, fibers)
    }

    /// Binary PGM of one fiber, marked nodes white, top row `Im z = r`.
    pub fn fiber_pgm(&self, m: usize) -> Vec<u8> {
        let s = self.grid.side();
        let tube = self.grid.tube_mask();
        let f = self.fiber(m);
        let mut out = format!("P5\n{s} {s}\n255\n").into_bytes();
        for b in (0..s).rev() {
            for a in 0..s {
                let k = b * s + a;
                out.push(if f[k] {
                    255
                } else if tube[k] {
                    64
                } else {
                    0
                });
            }
        }
        out
    }

    /// Binary PPM tiling the fibers in rows of `columns`, base angle
    /// increasing left to right and top to bottom.
    pub fn composite_ppm(&self, columns: usize) -> Vec<u8> {
        let s = self.grid.side();
        let columns = columns.clamp(1, self.fiber_count().max(1));
        let rows = self.fiber_count().div_ceil(columns);
        let (w, h) = (columns * (s + 1), rows * (s + 1));
        let mut img = vec![[16u8, 16, 16]; w * h];
        let tube = self.grid.tube_mask();
        let o = self.grid.origin_index();
        for (m, f) in self.fibers().enumerate() {
            let (tx, ty) = ((m % columns) * (s + 1), (m / columns) * (s + 1));
            for b in 0..s {
                for a in 0..s {
                    let k = b * s + a;
                    let px = if k == o {
                        [220, 40, 40]
                    } else if f[k] {
                        [240, 240, 240]
                    } else if tube[k] {
                        [70, 70, 90]
                    } else {
                        [0, 0, 0]
                    };
                    img[(ty + s - 1 - b) * w + tx + a] = px;
                }
            }
        }
        let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
        out.extend(img.iter().flatten());
        out
    }
}

fn neighbors(k: usize, s: usize) -> impl Iterator<Item = usize> {
    let (a, b) = (k % s, k / s);
    let mut v = [usize::MAX; 4];
    if a > 0 {
        v[0] = k - 1;
    }
    if a + 1 < s {
        v[1] = k + 1;
    }
    if b > 0 {
        v[2] = k - s;
    }
    if b + 1 < s {
        v[3] = k + s;
    }
    v.into_iter().filter(|&x| x != usize::MAX)
}

fn components(f: &[bool], s: usize) -> usize {
    let mut seen = vec![false; f.len()];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..f.len() {
        if !f[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            for j in neighbors(k, s) {
                if f[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    count
}

fn fill_fiber(f: &[bool], s: usize) -> Vec<bool> {
    let mut outside = vec![false; f.len()];
    let mut queue = VecDeque::new();
    for k in 0..f.len() {
        let (a, b) = (k % s, k / s);
        let on_frame = a == 0 || b == 0 || a + 1 == s || b + 1 == s;
        if on_frame && !f[k] {
            outside[k] = true;
            queue.push_back(k);
        }
    }
    while let Some(k) = queue.pop_front() {
        for j in neighbors(k, s) {
            if !f[j] && !outside[j] {
                outside[j] = true;
                queue.push_back(j);
            }
        }
    }
    outside.iter().map(|&o| !o).collect()
}

/// Marks every node of a fiber that is not reached from the frame by a
/// 4-connected path of unmarked nodes.
pub fn fill_fibers(k: &CompactSetApprox) -> CompactSetApprox {
    let s = k.grid.side();
    let masks = k
        .masks
        .par_chunks(k.grid.fiber_len())
        .flat_map_iter(|f| fill_fiber(f, s))
        .collect();
    CompactSetApprox {
        grid: k.grid,
        thetas: k.thetas.clone(),
        masks,
    }
}

const FAR: f64 = 1e30;

fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let parabola = |q: usize| f[q] + (q * q) as f64;
    for q in 1..n {
        let mut s;
        loop {
            let p = v[k];
            s = (parabola(q) - parabola(p)) / (2.0 * (q - p) as f64);
            if s <= z[k] && k > 0 {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate().take(n) {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = (d * d + f[v[k]]).min(FAR);
    }
}

/// Squared distance in pixels from every node to the nearest marked node.
pub fn squared_distance_transform(f: &[bool], s: usize) -> Vec<f64> {
    let mut d: Vec<f64> = f.iter().map(|&b| if b { 0.0 } else { FAR }).collect();
    let mut line = vec![0.0; s];
    let mut out = vec![0.0; s];
    let mut v = vec![0usize; s];
    let mut z = vec![0.0; s + 1];
    for b in 0..s {
        line.copy_from_slice(&d[b * s..(b + 1) * s]);
        edt_1d(&line, &mut out, &mut v, &mut z);
        d[b * s..(b + 1) * s].copy_from_slice(&out);
    }
    for a in 0..s {
        for b in 0..s {
            line[b] = d[b * s + a];
        }
        edt_1d(&line, &mut out, &mut v, &mut z);
        for b in 0..s {
            d[b * s + a] = out[b];
        }
    }
    d
}

fn directed_pixels(from: &[bool], to_edt: &[f64]) -> f64 {
    from.iter()
        .zip(to_edt)
        .filter(|(&b, _)| b)
        .fold(0.0f64, |m, (_, &d)| m.max(d))
        .sqrt()
}

/// Hausdorff distance of two fibers in pixels.
pub fn fiber_hausdorff_pixels(a: &[bool], b: &[bool], side: usize) -> Option<f64> {
    let (ea, eb) = (a.iter().any(|&x| x), b.iter().any(|&x| x));
    match (ea, eb) {
        (false, false) => Some(0.0),
        (true, true) => {
            let da = squared_distance_transform(a, side);
            let db = squared_distance_transform(b, side);
            Some(directed_pixels(a, &db).max(directed_pixels(b, &da)))
        }
        _ => None,
    }
}

/// Largest per-fiber Hausdorff distance, in pixels.
pub fn hausdorff_pixels(a: &CompactSetApprox, b: &CompactSetApprox) -> Result<f64> {
    if a.grid != b.grid || a.fiber_count() != b.fiber_count() {
        return Err(Error::GeometryMismatch {
            what: "tube grids differ".into(),
        });
    }
    let s = a.grid.side();
    let per: Vec<Result<f64>> = (0..a.fiber_count())
        .into_par_iter()
        .map(|m| fiber_hausdorff_pixels(a.fiber(m), b.fiber(m), s).ok_or(Error::EmptySet { fiber: m }))
        .collect();
    per.into_iter().try_fold(0.0f64, |acc, d| Ok(acc.max(d?)))
}

/// Largest per-fiber Hausdorff distance between node sets, in the units of
/// `z`. Fails with [`Error::EmptySet`] when exactly one of two corresponding
/// fibers is empty.
pub fn hausdorff_distance(a: &CompactSetApprox, b: &CompactSetApprox) -> Result<f64> {
    Ok(hausdorff_pixels(a, b)? * a.grid.pixel_size())
}
