use crate::error::{Error, Result};
use crate::fibered::FiberedMap;
use crate::trig::{fejer_approximation_real, grid, solve_cohomological, TrigPoly};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RescaleData {
    pub kappa: f64,
    /// Fejér degree that met the error target.
    pub degree: usize,
    /// `l`: trigonometric approximation of `log |rho_1|` with mean `log kappa`.
    #[serde(skip)]
    pub log_modulus: TrigPoly,
    /// `u~_1`, with `u_1 = exp(u~_1)` the scaling factor.
    #[serde(skip)]
    pub log_scaling: TrigPoly,
    /// `sup |log |rho_1| - l|` on the check grid.
    pub approximation_error: f64,
    /// Error target the approximation had to beat.
    pub target: f64,
    /// `sup |rho~_1|` after conjugation.
    pub sup_linear: f64,
    /// `sup | |rho~_1| - kappa |` after conjugation.
    pub modulus_spread: f64,
}

/// Largest Fejér degree tried.
pub const MAX_FEJER_DEGREE: usize = 4096;

/// Conjugates by `H(theta, z) = (theta, exp(u~_1(theta)) z)` where
/// `u~_1(theta + alpha) - u~_1(theta) = l(theta) - log kappa` and `l` is a
/// Fejér mean of `log |rho_1|`.
///
/// The degree of `l` is doubled until `sup |log |rho_1| - l| < delta`. With
/// `delta <= log(1 + eps / kappa)` the conjugated linear part satisfies
/// `| |rho~_1| - kappa | < eps`; for `kappa < 1` the target also stays below
/// `log(2 / (1 + sqrt kappa))`, which keeps `sup |rho~_1|` under
/// `(kappa + sqrt kappa) / 2`.
pub fn modulus_rescale(map: &FiberedMap, eps: f64) -> Result<(FiberedMap, RescaleData)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let kappa = map.multiplier()?;
    let mut target = (1.0 + eps / kappa).ln();
    if kappa < 1.0 {
        target = target.min((2.0 / (1.0 + kappa.sqrt())).ln());
    }
    let c1 = map.linear().clone();
    let dim = map.dim();
    let log_mod = |t: &[f64]| c1.eval(t).norm().ln();
    let mut degree: usize = 4;
    loop {
        let res = (4 * degree).max(64).next_power_of_two();
        let check_res = (2 * res).max(c1.natural_resolution());
        if grid::grid_len(dim, check_res) > crate::fibered::MAX_GRID_POINTS {
            return Err(Error::ApproximationStall {
                degree,
                gap: f64::INFINITY,
                target,
            });
        }
        let fluct = fejer_approximation_real(dim, log_mod, degree, res, true)?;
        let truth = c1.sample_grid(check_res);
        let approx = fluct.sample_grid(check_res);
        let log_kappa = kappa.ln();
        let gap = truth
            .iter()
            .zip(&approx)
            .map(|(v, a)| (v.norm().ln() - log_kappa - a.re).abs())
            .fold(0.0, f64::max);
        if gap < target {
            let sol = solve_cohomological(&fluct, map.alpha(), crate::trig::cohomology::DEFAULT_DIVISOR_FLOOR)?;
            let scaled = map.conjugate_by_rescaling(&sol.u)?;
            let after = scaled.linear().sample_grid(check_res);
            let sup_linear = after.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let modulus_spread = after
                .iter()
                .map(|v| (v.norm() - kappa).abs())
                .fold(0.0, f64::max);
            let log_modulus = &fluct + &TrigPoly::real_constant(dim, log_kappa);
            return Ok((
                scaled,
                RescaleData {
                    kappa,
                    degree,
                    log_modulus,
                    log_scaling: sol.u,
                    approximation_error: gap,
                    target,
                    sup_linear,
                    modulus_spread,
                },
            ));
        }
        if degree >= MAX_FEJER_DEGREE {
            return Err(Error::ApproximationStall { degree, gap, target });
        }
        degree *= 2;
    }
}
