//! The twisted cohomological equation `u(theta + alpha) - u(theta) = g(theta)`.
//!
//! For zero-mean `g` the Fourier solution is
//! `u_n = g_n / (exp(2 pi i n.alpha) - 1)` for `n != 0`, normalized by
//! `u_0 = 0`. Divisors are computed as `2i sin(pi x) exp(i pi x)` with
//! `x = n.alpha` reduced exactly modulo 1.

use super::{divisor, mode_phase, Mode, TrigPoly};
use crate::error::{Error, Result};
use serde::Serialize;

/// Largest `|g_0|` accepted as zero mean.
pub const MEAN_TOLERANCE: f64 = 1e-12;

/// Default floor under which a divisor is refused.
pub const DEFAULT_DIVISOR_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorRecord {
    pub mode: Mode,
    /// `|exp(2 pi i n.alpha) - 1|`
    pub divisor: f64,
    /// `|u_n| / |g_n|`
    pub amplification: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmallDivisorReport {
    pub floor: f64,
    pub records: Vec<DivisorRecord>,
    pub min_divisor: f64,
    pub min_mode: Option<Mode>,
    pub below_floor: Vec<Mode>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CohomologicalSolution {
    pub u: TrigPoly,
    pub report: SmallDivisorReport,
}

/// Divisors of every non-zero mode of `g`, without solving.
pub fn small_divisor_report(g: &TrigPoly, alpha: &[f64], floor: f64) -> SmallDivisorReport {
    let mut records = Vec::new();
    let mut min_divisor = f64::INFINITY;
    let mut min_mode = None;
    let mut below_floor = Vec::new();
    for (n, _) in g.iter() {
        if n.iter().all(|&x| x == 0) {
            continue;
        }
        let d = divisor(mode_phase(n, alpha)).norm();
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

/// Zero-mean solution of `u(theta + alpha) - u(theta) = g(theta)`.
///
/// Fails with [`Error::NonZeroMean`] when `|g_0| >= 1e-12` and with
/// [`Error::SmallDivisor`] at the first mode (in lexicographic order) whose
/// divisor is below `floor`. Real `g` gives real `u`.
pub fn solve_cohomological(g: &TrigPoly, alpha: &[f64], floor: f64) -> Result<CohomologicalSolution> {
    if alpha.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: alpha.len(),
        });
    }
    let mean = g.mean();
    if mean.norm() >= MEAN_TOLERANCE {
        return Err(Error::NonZeroMean { mean });
    }
    let report = small_divisor_report(g, alpha, floor);
    if let Some(n) = report.below_floor.first() {
        return Err(Error::SmallDivisor {
            mode: n.clone(),
            shift: 0,
            divisor: divisor(mode_phase(n, alpha)).norm(),
            floor,
        });
    }
    let terms: Vec<_> = g
        .iter()
        .filter(|(n, _)| n.iter().any(|&x| x != 0))
        .map(|(n, a)| (n.clone(), a / divisor(mode_phase(n, alpha))))
        .collect();
    let mut u = TrigPoly::from_modes(g.dim(), terms)?;
    if g.is_real() {
        u = u.real_part();
    }
    Ok(CohomologicalSolution { u, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    #[test]
    fn single_mode_solution() {
        // g = e(theta+alpha) - e(theta) for e = exp(2 pi i theta)
        let alpha = [GOLDEN];
        let e = TrigPoly::monomial(vec![1], Complex64::new(1.0, 0.0));
        let g = &e.shift(&alpha) - &e;
        let sol = solve_cohomological(&g, &alpha, 1e-8).unwrap();
        assert!((sol.u.coeff(&[1]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mean_is_rejected() {
        let g = TrigPoly::real_constant(1, 1e-6);
        assert!(matches!(
            solve_cohomological(&g, &[GOLDEN], 1e-8),
            Err(Error::NonZeroMean { .. })
        ));
    }

    #[test]
    fn resonant_mode_is_reported() {
        let g = TrigPoly::cosine(vec![4], 1.0);
        match solve_cohomological(&g, &[0.25], 1e-8) {
            Err(Error::SmallDivisor { mode, .. }) => assert_eq!(mode, vec![-4]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn real_rhs_gives_real_solution() {
        let g = &TrigPoly::cosine(vec![1], 0.3) + &TrigPoly::sine(vec![3], 0.2);
        let sol = solve_cohomological(&g, &[GOLDEN], 1e-8).unwrap();
        assert!(sol.u.is_real());
        assert_eq!(sol.report.records.len(), 4);
    }
}
