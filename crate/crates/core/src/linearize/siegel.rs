use crate::error::{Error, Result};
use crate::fibered::{lift_args, FiberedMap, MAX_GRID_POINTS};
use crate::trig::cohomology::{DivisorRecord, SmallDivisorReport};
use crate::trig::{cis, divisor, grid, mode_phase, solve_cohomological, TrigPoly};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SiegelOptions {
    /// Highest order solved.
    pub order: usize,
    /// Divisors below this are refused.
    pub divisor_floor: f64,
    /// Fourier cutoff `|n|_inf` for every coefficient.
    pub cutoff: u64,
    /// Largest discarded tail mass, relative.
    pub tail_tolerance: f64,
}

impl Default for SiegelOptions {
    fn default() -> Self {
        SiegelOptions {
            order: 10,
            divisor_floor: 1e-8,
            cutoff: 256,
            tail_tolerance: 1e-10,
        }
    }
}

/// Truncated formal conjugacy `h_theta(z) = z + sum_{k=2..K} h_k(theta) z^k`
/// with `f~_theta o h_theta = h_{theta+alpha} o (lambda z)`, where `f~` is the
/// map after reduction of its linear part to the constant `lambda`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormalConjugacy {
    pub beta: f64,
    pub multiplier: Complex64,
    pub order: usize,
    /// `h_2, .., h_K`.
    pub coefficients: Vec<TrigPoly>,
    /// Divisors met at each order `k = 2..K`.
    pub reports: Vec<SmallDivisorReport>,
    /// `w` with `c_k -> c_k exp(k w(theta) - w(theta + alpha))` reducing
    /// `c_1` to `lambda`.
    pub linear_reduction: TrigPoly,
    /// Map after the reduction.
    #[serde(skip)]
    pub reduced: FiberedMap,
    /// `sup |c~_1 - lambda|` after the reduction.
    pub reduction_residual: f64,
    /// Grid residual of the homological identity at each order.
    pub order_residuals: Vec<f64>,
    /// Mass of `h_{K+1}`; infinite when that order is resonant.
    pub next_order_mass: f64,
}

impl FormalConjugacy {
    /// `next_order_mass * r^(K+1)`.
    pub fn tail_bound(&self, r: f64) -> f64 {
        self.next_order_mass * r.powi(self.order as i32 + 1)
    }

    fn series_on_grid(&self, res: usize, shift: Option<&[f64]>) -> Vec<Vec<Complex64>> {
        self.coefficients
            .iter()
            .map(|h| match shift {
                Some(s) => h.sample_grid_shifted(res, s),
                None => h.sample_grid(res),
            })
            .collect()
    }

    /// `sup |f~_theta(h_theta(z)) - h_{theta+alpha}(lambda z)|` over a
    /// `theta_res^d` grid and a polar grid of the closed disc of radius `r`.
    pub fn residual(&self, r: f64, theta_res: usize, radial: usize, angular: usize) -> f64 {
        let dim = self.reduced.dim();
        let here = self.series_on_grid(theta_res, None);
        let there = self.series_on_grid(theta_res, Some(self.reduced.alpha()));
        let coeffs = self.reduced.sample_coeffs(theta_res);
        let nt = grid::grid_len(dim, theta_res);
        let eval = |cs: &[Vec<Complex64>], m: usize, z: Complex64| {
            let mut acc = ZERO;
            let mut zk = z * z;
            for c in cs {
                acc += c[m] * zk;
                zk *= z;
            }
            z + acc
        };
        let mut worst: f64 = 0.0;
        for m in 0..nt {
            for i in 1..=radial {
                let rad = r * i as f64 / radial as f64;
                for a in 0..angular {
                    let z = Complex64::from_polar(rad, 2.0 * PI * a as f64 / angular as f64);
                    let hz = eval(&here, m, z);
                    let lhs = coeffs.iter().rev().fold(ZERO, |acc, c| acc * hz + c[m]);
                    let rhs = eval(&there, m, self.multiplier * z);
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        worst
    }
}

/// `log c_1` as a trigonometric polynomial, from a continuous lift of the
/// argument whose mean is normalized to `2 pi rho`.
fn log_linear(c1: &TrigPoly, rho: f64, cutoff: u64, tol: f64) -> Result<TrigPoly> {
    let dim = c1.dim();
    let mut res = c1.natural_resolution();
    loop {
        let vals = c1.sample_grid(res);
        if let Some(lift) = lift_args(dim, res, &vals) {
            let mean = lift.iter().sum::<f64>() / lift.len() as f64;
            let k = ((mean - 2.0 * PI * rho) / (2.0 * PI)).round();
            let samples: Vec<Complex64> = vals
                .iter()
                .zip(&lift)
                .map(|(v, a)| Complex64::new(v.norm().ln(), a - 2.0 * PI * k))
                .collect();
            let (p, nyquist) = TrigPoly::from_grid(dim, res, &samples)?;
            let (kept, outer) = p.truncate((res / 4) as u64);
            let scale = kept.mass().max(f64::MIN_POSITIVE);
            if outer + nyquist <= tol * scale {
                let peak = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
                return kept.pruned(2.0 * f64::EPSILON * peak).truncate_checked(cutoff, tol);
            }
        }
        if grid::grid_len(dim, res * 2) > MAX_GRID_POINTS {
            return Err(Error::DegreeOverflow {
                cutoff: res / 4,
                tail: f64::NAN,
            });
        }
        res *= 2;
    }
}

fn order_report(r: &TrigPoly, alpha: &[f64], beta: f64, shift: usize, floor: f64) -> SmallDivisorReport {
    let mut records = Vec::new();
    let mut min_divisor = f64::INFINITY;
    let mut min_mode = None;
    let mut below_floor = Vec::new();
    for (n, _) in r.iter() {
        let d = divisor(mode_phase(n, alpha) + shift as f64 * beta).norm();
        if d < min_divisor {
            min_divisor = d;
            min_mode = Some(n.clone());
        }
        if d < floor {
            below_floor.push(n.clone());
        }
        records.push(DivisorRecord {
            mode: n.clone(),
            divisor: d,
            amplification: 1.0 / d,
        });
    }
    SmallDivisorReport {
        floor,
        records,
        min_divisor,
        min_mode,
        below_floor,
    }
}

/// Order-by-order solution of the indifferent normal form.
///
/// Step 1 solves `w(theta + alpha) - w(theta) = log c_1 - mean` so that the
/// conjugated linear part is the constant `lambda = exp(2 pi i beta)`,
/// `beta` being the fibered rotation number. Step 2 solves, for
/// `k = 2..K`,
/// `lambda^k h_k(theta + alpha) - lambda h_k(theta) = R_k(theta)`, i.e.
/// `h_k(n) lambda (exp(2 pi i (n.alpha + (k-1) beta)) - 1) = R_k(n)`,
/// where `R_k = [z^k] sum_{m>=2} c~_m h^m` is assembled by exact products of
/// trigonometric polynomials. A divisor below the floor fails with
/// [`Error::SmallDivisor`] carrying `(n, k - 1)`.
pub fn siegel_formal_linearize(map: &FiberedMap, opts: SiegelOptions) -> Result<FormalConjugacy> {
    if opts.order < 2 {
        return Err(Error::InvalidInput("order must be at least 2".into()));
    }
    let rot = map.rotation_number(true)?;
    let beta = rot.rho_tr.expect("strict rotation number has degree zero");
    let dim = map.dim();
    let alpha = map.alpha().to_vec();
    let lambda = cis(beta);

    let log_c1 = log_linear(map.linear(), beta, opts.cutoff, opts.tail_tolerance)?;
    let centered = &log_c1 - &TrigPoly::constant(dim, log_c1.mean());
    let w = solve_cohomological(&centered, &alpha, opts.divisor_floor)?.u;
    let reduced = map.conjugate_by_rescaling(&w)?;
    let res = reduced.sampling_resolution();
    let reduction_residual = reduced
        .linear()
        .sample_grid(res.min(1 << 16))
        .iter()
        .map(|v| (v - lambda).norm())
        .fold(0.0, f64::max);

    let big_d = reduced.degree();
    let mut c: Vec<TrigPoly> = Vec::with_capacity(big_d + 1);
    c.push(TrigPoly::zero(dim));
    for k in 1..=big_d {
        let ck = reduced.coeffs()[k - 1].truncate_checked(opts.cutoff, opts.tail_tolerance)?;
        c.push(ck);
    }
    let k_max = opts.order + 1;
    // h[j] for j = 1..=k_max, h[1] = 1
    let mut h: Vec<TrigPoly> = vec![TrigPoly::zero(dim), TrigPoly::real_constant(dim, 1.0)];
    // pw[m][k] = [z^k] h^m for m = 1..=big_d
    let mut pw: Vec<Vec<TrigPoly>> = vec![vec![TrigPoly::zero(dim); k_max + 1]; big_d + 1];
    pw[1][1] = TrigPoly::real_constant(dim, 1.0);
    let mut coefficients = Vec::new();
    let mut reports = Vec::new();
    let mut order_residuals = Vec::new();
    let mut next_order_mass = f64::INFINITY;
    for k in 2..=k_max {
        for m in 2..=big_d.min(k) {
            let mut acc = TrigPoly::zero(dim);
            for i in 1..=(k - m + 1) {
                if h[i].is_empty() || pw[m - 1][k - i].is_empty() {
                    continue;
                }
                acc = &acc + &(&h[i] * &pw[m - 1][k - i]);
            }
            pw[m][k] = acc.truncate_checked(opts.cutoff, opts.tail_tolerance)?;
        }
        let mut rk = TrigPoly::zero(dim);
        for m in 2..=big_d.min(k) {
            if c[m].is_empty() || pw[m][k].is_empty() {
                continue;
            }
            rk = &rk + &(&c[m] * &pw[m][k]);
        }
        let rk = rk.truncate_checked(opts.cutoff, opts.tail_tolerance)?;
        let report = order_report(&rk, &alpha, beta, k - 1, opts.divisor_floor);
        if let Some(n) = report.below_floor.first() {
            if k == k_max {
                h.push(TrigPoly::zero(dim));
                break;
            }
            return Err(Error::SmallDivisor {
                mode: n.clone(),
                shift: (k - 1) as i64,
                divisor: divisor(mode_phase(n, &alpha) + (k - 1) as f64 * beta).norm(),
                floor: opts.divisor_floor,
            });
        }
        let terms: Vec<_> = rk
            .iter()
            .map(|(n, a)| {
                let d = divisor(mode_phase(n, &alpha) + (k - 1) as f64 * beta);
                (n.clone(), a / (lambda * d))
            })
            .collect();
        let hk = TrigPoly::from_modes(dim, terms)?;
        if k == k_max {
            next_order_mass = hk.mass();
            h.push(hk);
            break;
        }
        order_residuals.push(homological_residual(&hk, &rk, &alpha, lambda, k));
        pw[1][k] = hk.clone();
        coefficients.push(hk.clone());
        h.push(hk);
        reports.push(report);
    }
    Ok(FormalConjugacy {
        beta,
        multiplier: lambda,
        order: opts.order,
        coefficients,
        reports,
        linear_reduction: w,
        reduced,
        reduction_residual,
        order_residuals,
        next_order_mass,
    })
}

fn homological_residual(hk: &TrigPoly, rk: &TrigPoly, alpha: &[f64], lambda: Complex64, k: usize) -> f64 {
    let res = hk.natural_resolution().max(rk.natural_resolution()).min(1 << 16);
    let res = if grid::grid_len(alpha.len(), res) > MAX_GRID_POINTS {
        64
    } else {
        res
    };
    let a = hk.sample_grid_shifted(res, alpha);
    let b = hk.sample_grid(res);
    let r = rk.sample_grid(res);
    let lk = lambda.powi(k as i32);
    a.iter()
        .zip(&b)
        .zip(&r)
        .map(|((x, y), z)| (lk * x - lambda * y - z).norm())
        .fold(0.0, f64::max)
}
