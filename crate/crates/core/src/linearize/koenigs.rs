use crate::error::{Error, Result};
use crate::fibered::{FiberPoly, FiberedMap};
use crate::trig::{base_point, cis, grid, mode_phase, TrigPoly};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sampling grid: `theta_res^d` torus nodes times a `z_res x z_res`
/// Cartesian grid on the square `[-r, r]^2`, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KoenigsGrid {
    pub theta_res: usize,
    pub z_res: usize,
}

impl Default for KoenigsGrid {
    fn default() -> Self {
        KoenigsGrid {
            theta_res: 256,
            z_res: 64,
        }
    }
}

/// Grid samples of the attracting conjugacy `Phi` with
/// `Phi(theta + alpha, f_theta(z)) = rho_1(theta) Phi(theta, z)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KoenigsConjugacy {
    pub alpha: Vec<f64>,
    pub grid: KoenigsGrid,
    pub radius: f64,
    /// Index `(theta_idx * z_res + a) * z_res + b` holds the value at
    /// `z = (-r + a h) + i (-r + b h)`, `h = 2r / (z_res - 1)`.
    pub samples: Vec<Complex64>,
    #[serde(skip)]
    pub linear: TrigPoly,
    pub achieved_sup_delta: f64,
    /// `n` such that the samples are `g^n`.
    pub iterations: usize,
}

impl KoenigsConjugacy {
    pub fn spacing(&self) -> f64 {
        2.0 * self.radius / (self.grid.z_res - 1) as f64
    }

    pub fn z_node(&self, a: usize, b: usize) -> Complex64 {
        let h = self.spacing();
        Complex64::new(-self.radius + a as f64 * h, -self.radius + b as f64 * h)
    }

    fn theta_count(&self) -> usize {
        grid::grid_len(self.alpha.len(), self.grid.theta_res)
    }

    /// Samples of `Phi(theta_m + shift, z_ab)`, shifted spectrally in theta.
    pub fn shifted_samples(&self, shift: &[f64]) -> Vec<Complex64> {
        let dim = self.alpha.len();
        let res = self.grid.theta_res;
        let nt = self.theta_count();
        let nz = self.grid.z_res * self.grid.z_res;
        let phases: Vec<Complex64> = (0..nt)
            .map(|idx| {
                let n = grid::mode_of(dim, res, idx);
                let nyquist = n.iter().any(|&x| 2 * x.unsigned_abs() as usize == res);
                if nyquist {
                    let t = mode_phase(&n, shift);
                    Complex64::new((2.0 * std::f64::consts::PI * t).cos(), 0.0)
                } else {
                    cis(mode_phase(&n, shift))
                }
            })
            .collect();
        let columns: Vec<Vec<Complex64>> = (0..nz)
            .into_par_iter()
            .map(|zi| {
                let mut col: Vec<Complex64> = (0..nt).map(|m| self.samples[m * nz + zi]).collect();
                grid::fft_nd(&mut col, dim, res, false);
                for (v, p) in col.iter_mut().zip(&phases) {
                    *v *= p;
                }
                grid::fft_nd(&mut col, dim, res, true);
                let s = 1.0 / nt as f64;
                col.iter_mut().for_each(|v| *v *= s);
                col
            })
            .collect();
        let mut out = vec![ZERO; nt * nz];
        for (zi, col) in columns.iter().enumerate() {
            for (m, v) in col.iter().enumerate() {
                out[m * nz + zi] = *v;
            }
        }
        out
    }

    /// Tensor cubic Lagrange interpolation in `z` of one theta slice.
    pub fn interpolate_slice(&self, slice: &[Complex64], z: Complex64) -> Complex64 {
        let n = self.grid.z_res;
        let h = self.spacing();
        let x = (z.re + self.radius) / h;
        let y = (z.im + self.radius) / h;
        let (ia, wa) = cubic_weights(x, n);
        let (ib, wb) = cubic_weights(y, n);
        let mut acc = ZERO;
        for (p, wp) in wa.iter().enumerate() {
            for (q, wq) in wb.iter().enumerate() {
                acc += slice[(ia + p) * n + ib + q] * (wp * wq);
            }
        }
        acc
    }

    /// `Phi(theta, z)` off the grid: trigonometric interpolation in theta and
    /// cubic interpolation in `z`.
    pub fn eval(&self, theta: &[f64], z: Complex64) -> Complex64 {
        let nt = self.theta_count();
        let nz = self.grid.z_res * self.grid.z_res;
        // the value at theta is node 0 of the grid function shifted by theta
        let n = self.grid.z_res;
        let dim = self.alpha.len();
        let res = self.grid.theta_res;
        let mut slice = vec![ZERO; nz];
        let h = self.spacing();
        let x = (z.re + self.radius) / h;
        let y = (z.im + self.radius) / h;
        let (ia, _) = cubic_weights(x, n);
        let (ib, _) = cubic_weights(y, n);
        for p in 0..4 {
            for q in 0..4 {
                let zi = (ia + p) * n + ib + q;
                let mut col: Vec<Complex64> = (0..nt).map(|m| self.samples[m * nz + zi]).collect();
                grid::fft_nd(&mut col, dim, res, false);
                let mut v = ZERO;
                for (idx, c) in col.iter().enumerate() {
                    let md = grid::mode_of(dim, res, idx);
                    let nyquist = md.iter().any(|&k| 2 * k.unsigned_abs() as usize == res);
                    let t = mode_phase(&md, theta);
                    v += if nyquist {
                        c * (2.0 * std::f64::consts::PI * t).cos()
                    } else {
                        c * cis(t)
                    };
                }
                slice[zi] = v / nt as f64;
            }
        }
        self.interpolate_slice(&slice, z)
    }

    /// `sup |Phi(theta + alpha, f_theta(z)) - rho_1(theta) Phi(theta, z)|`
    /// over theta nodes and `z` nodes in the closed disc of radius `r`.
    pub fn residual(&self, map: &FiberedMap) -> f64 {
        let dim = self.alpha.len();
        let res = self.grid.theta_res;
        let nt = self.theta_count();
        let n = self.grid.z_res;
        let nz = n * n;
        let shifted = self.shifted_samples(map.alpha());
        (0..nt)
            .into_par_iter()
            .map(|m| {
                let theta = grid::node(dim, res, m);
                let f = map.fiber(&theta);
                let rho = f.linear();
                let slice = &shifted[m * nz..(m + 1) * nz];
                let mut worst: f64 = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        let z = self.z_node(a, b);
                        if z.norm() > self.radius * (1.0 + 1e-12) {
                            continue;
                        }
                        let lhs = self.interpolate_slice(slice, f.eval(z));
                        let rhs = rho * self.samples[m * nz + a * n + b];
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Largest deviation of `Phi(theta, 0)` from 0 and of `d/dz Phi(theta, 0)`
    /// from 1 over the theta nodes. Both are evaluated on direct orbits with
    /// the stored iteration count; the derivative uses the four-point stencil
    /// `(g(h) - g(-h) - i g(ih) + i g(-ih)) / 4h`, exact through cubic terms.
    pub fn normalization_defect(&self, map: &FiberedMap, h: f64) -> Result<(f64, f64)> {
        let dim = self.alpha.len();
        let res = self.grid.theta_res;
        let nt = self.theta_count();
        let i = Complex64::new(0.0, 1.0);
        let out: Result<Vec<(f64, f64)>> = (0..nt)
            .into_par_iter()
            .map(|m| {
                let theta = grid::node(dim, res, m);
                let fibers = map.fibers_along(&theta, 0, self.iterations);
                let g = |z: Complex64| koenigs_with_fibers(&fibers, z, map.domain_radius());
                let g0 = g(ZERO)?;
                let hh = Complex64::new(h, 0.0);
                let d = (g(hh)? - g(-hh)? - i * g(i * hh)? + i * g(-i * hh)?) / (4.0 * h);
                Ok((g0.norm(), (d - 1.0).norm()))
            })
            .collect();
        Ok(out?
            .into_iter()
            .fold((0.0, 0.0), |acc, v| (acc.0.max(v.0), acc.1.max(v.1))))
    }
}

fn cubic_weights(x: f64, n: usize) -> (usize, [f64; 4]) {
    let i0 = (x.floor() as i64 - 1).clamp(0, n as i64 - 4) as usize;
    let t = x - i0 as f64;
    let nodes = [0.0, 1.0, 2.0, 3.0];
    let mut w = [0.0; 4];
    for k in 0..4 {
        let mut v = 1.0;
        for j in 0..4 {
            if j != k {
                v *= (t - nodes[j]) / (nodes[k] - nodes[j]);
            }
        }
        w[k] = v;
    }
    (i0, w)
}

fn koenigs_with_fibers(fibers: &[FiberPoly], z: Complex64, radius: f64) -> Result<Complex64> {
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    for f in fibers {
        w = f.eval(w);
        prod *= f.linear();
        if w.norm() > radius {
            return Err(Error::OutOfDomain {
                modulus: w.norm(),
                radius,
            });
        }
    }
    Ok(w / prod)
}

/// `g^n_theta(z) = (prod_{i<n} rho_1(theta + i alpha))^{-1} f^n_theta(z)` by
/// direct iteration.
pub fn koenigs_direct(map: &FiberedMap, theta: &[f64], z: Complex64, n: usize) -> Result<Complex64> {
    let fibers = map.fibers_along(theta, 0, n);
    koenigs_with_fibers(&fibers, z, map.domain_radius())
}

/// `sup |g^n(theta + alpha, f_theta(z)) - rho_1(theta) g^{n+1}(theta, z)|` over
/// the given nodes, all orbits computed directly.
pub fn koenigs_step_identity(
    map: &FiberedMap,
    thetas: &[Vec<f64>],
    zs: &[Complex64],
    n: usize,
) -> Result<f64> {
    let out: Result<Vec<f64>> = thetas
        .par_iter()
        .map(|theta| {
            let f0 = map.fiber(theta);
            let next = base_point(theta, map.alpha(), 1);
            let forward = map.fibers_along(&next, 0, n);
            let here = map.fibers_along(theta, 0, n + 1);
            let mut worst: f64 = 0.0;
            for &z in zs {
                let lhs = koenigs_with_fibers(&forward, f0.eval(z), map.domain_radius())?;
                let rhs = f0.linear() * koenigs_with_fibers(&here, z, map.domain_radius())?;
                worst = worst.max((lhs - rhs).norm());
            }
            Ok(worst)
        })
        .collect();
    Ok(out?.into_iter().fold(0.0, f64::max))
}

/// Iterates `g^n` on the grid, checking `sup |g^{n+1} - g^n|` at
/// `n = 1, 2, 4, ..` and stopping at the first checkpoint below `tol`.
///
/// Requires `kappa < 1` ([`Error::NotAttracting`]) and `sup |rho_1| < 1`
/// ([`Error::NotContracting`]; apply
/// [`modulus_rescale`](super::modulus_rescale) first). The square
/// `[-r, r]^2` must lie in the domain disc.
pub fn koenigs_linearize(
    map: &FiberedMap,
    r: f64,
    tol: f64,
    max_n: usize,
    grid_spec: KoenigsGrid,
) -> Result<KoenigsConjugacy> {
    let kappa = map.multiplier()?;
    if kappa >= 1.0 {
        return Err(Error::NotAttracting { kappa });
    }
    let dim = map.dim();
    let res = grid_spec.theta_res;
    let check = map.linear().grid_sup(map.sampling_resolution().max(res));
    if check >= 1.0 {
        return Err(Error::NotContracting { sup_modulus: check });
    }
    if grid_spec.z_res < 4 || res == 0 {
        return Err(Error::InvalidInput("z grid needs at least 4 nodes per side".into()));
    }
    let corner = r * std::f64::consts::SQRT_2;
    if corner > map.domain_radius() {
        return Err(Error::OutOfDomain {
            modulus: corner,
            radius: map.domain_radius(),
        });
    }
    let nt = grid::grid_len(dim, res);
    let n = grid_spec.z_res;
    let nz = n * n;
    let h = 2.0 * r / (n - 1) as f64;
    let z0: Vec<Complex64> = (0..nz)
        .map(|zi| Complex64::new(-r + (zi / n) as f64 * h, -r + (zi % n) as f64 * h))
        .collect();
    let thetas: Vec<Vec<f64>> = (0..nt).map(|m| grid::node(dim, res, m)).collect();

    // per theta node: current iterate, product of multipliers
    let mut state: Vec<(Vec<Complex64>, Complex64)> =
        (0..nt).map(|_| (z0.clone(), Complex64::new(1.0, 0.0))).collect();
    let mut j = 0usize;
    let mut checkpoint = 1usize;
    loop {
        // advance every node from step j to checkpoint + 1, recording
        // sup |g^{checkpoint+1} - g^{checkpoint}|
        let target = checkpoint + 1;
        let results: Result<Vec<f64>> = state
            .par_iter_mut()
            .zip(thetas.par_iter())
            .map(|((zs, prod), theta)| {
                let fibers = map.fibers_along(theta, j as i64, target - j);
                let mut delta: f64 = 0.0;
                for (step, f) in fibers.iter().enumerate() {
                    let at = j + step;
                    let rho = f.linear();
                    let new_prod = *prod * rho;
                    for z in zs.iter_mut() {
                        let w = f.eval(*z);
                        if w.norm() > map.domain_radius() {
                            return Err(Error::OutOfDomain {
                                modulus: w.norm(),
                                radius: map.domain_radius(),
                            });
                        }
                        if at == checkpoint {
                            let before = *z / *prod;
                            let after = w / new_prod;
                            delta = delta.max((after - before).norm());
                        }
                        *z = w;
                    }
                    *prod = new_prod;
                }
                Ok(delta)
            })
            .collect();
        let delta = results?.into_iter().fold(0.0, f64::max);
        j = target;
        if delta < tol || target > max_n {
            if delta >= tol {
                return Err(Error::NoConvergence {
                    iterations: j,
                    achieved: delta,
                });
            }
            let mut samples = vec![ZERO; nt * nz];
            for (m, (zs, prod)) in state.iter().enumerate() {
                for (zi, z) in zs.iter().enumerate() {
                    samples[m * nz + zi] = z / prod;
                }
            }
            return Ok(KoenigsConjugacy {
                alpha: map.alpha().to_vec(),
                grid: grid_spec,
                radius: r,
                samples,
                linear: map.linear().clone(),
                achieved_sup_delta: delta,
                iterations: j,
            });
        }
        checkpoint *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_weights_reproduce_cubics() {
        let (i0, w) = cubic_weights(5.3, 20);
        let f = |x: f64| 1.0 + 2.0 * x - x * x + 0.5 * x * x * x;
        let v: f64 = (0..4).map(|k| w[k] * f((i0 + k) as f64)).sum();
        assert!((v - f(5.3)).abs() < 1e-10);
    }

    #[test]
    fn linear_map_gives_identity() {
        let c1 = &TrigPoly::real_constant(1, 0.5) + &TrigPoly::cosine(vec![1], 0.1);
        let map = FiberedMap::new(vec![0.618_033_988_749_894_8], vec![c1], 0.2).unwrap();
        let k = koenigs_linearize(&map, 0.1, 1e-12, 64, KoenigsGrid { theta_res: 16, z_res: 8 }).unwrap();
        for m in 0..16 {
            for a in 0..8 {
                for b in 0..8 {
                    let v = k.samples[(m * 8 + a) * 8 + b];
                    assert!((v - k.z_node(a, b)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn indifferent_map_is_refused() {
        let map = FiberedMap::autonomous(0.3, &[Complex64::from_polar(1.0, 1.0)], 1.0).unwrap();
        let r = koenigs_linearize(&map, 0.1, 1e-10, 100, KoenigsGrid::default());
        assert!(matches!(r, Err(Error::NotAttracting { .. })));
    }
}
