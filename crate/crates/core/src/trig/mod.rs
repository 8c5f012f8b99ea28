//! Trigonometric polynomials on `T^d` and the Fourier tools built on them.
//!
//! A [`TrigPoly`] is a finite sum `sum_n a_n exp(2 pi i n . theta)` over
//! integer modes `n`. Coefficients are kept in lexicographic mode order with
//! exact zeros removed, so iteration and serialization are deterministic.
//!
//! Evaluation computes every phase `frac(n . theta)` from the exact product of
//! the mode with the dyadic value of `theta` (see [`phase`]); this keeps modes
//! far beyond `2^53` usable. Grid sampling and analysis go through separable
//! FFTs ([`grid`]).
//!
//! The submodules add Fejér approximation of sampled functions
//! ([`fejer`]) and the solver of the twisted cohomological equation
//! `u(theta + alpha) - u(theta) = g(theta)` ([`cohomology`]).

pub mod cohomology;
pub mod fejer;
pub mod grid;
pub mod phase;

pub use cohomology::{solve_cohomological, CohomologicalSolution, DivisorRecord, SmallDivisorReport};
pub use fejer::{fejer_approximation, fejer_approximation_real};
pub use phase::{base_point, cis, divisor, frac, frac_mul, mode_phase, torus_norm};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, HashMap};

pub type Mode = Vec<i64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Finite Fourier series on the `dim`-torus.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    modes: BTreeMap<Mode, Complex64>,
    real: bool,
}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        TrigPoly {
            dim,
            modes: BTreeMap::new(),
            real: true,
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = TrigPoly::zero(dim);
        if c != ZERO {
            p.modes.insert(vec![0; dim], c);
        }
        p.real = c.im == 0.0;
        p
    }

    pub fn real_constant(dim: usize, c: f64) -> Self {
        TrigPoly::constant(dim, Complex64::new(c, 0.0))
    }

    /// Sum of the given terms; repeated modes are added together.
    pub fn from_modes<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Mode, Complex64)>,
    {
        let mut modes = BTreeMap::new();
        for (n, a) in terms {
            if n.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: n.len(),
                });
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite coefficient at {n:?}")));
            }
            *modes.entry(n).or_insert(ZERO) += a;
        }
        modes.retain(|_, a| *a != ZERO);
        let mut p = TrigPoly {
            dim,
            modes,
            real: false,
        };
        p.real = p.is_conjugate_symmetric();
        Ok(p)
    }

    /// `amp exp(2 pi i n . theta)`.
    pub fn monomial(n: Mode, amp: Complex64) -> Self {
        let dim = n.len();
        let mut p = TrigPoly::zero(dim);
        if amp != ZERO {
            p.modes.insert(n, amp);
        }
        p.real = p.is_conjugate_symmetric();
        p
    }

    /// `amp cos(2 pi n . theta)`.
    pub fn cosine(n: Mode, amp: f64) -> Self {
        let neg: Mode = n.iter().map(|x| -x).collect();
        let half = Complex64::new(amp / 2.0, 0.0);
        let mut p = TrigPoly::from_modes(n.len(), [(n, half), (neg, half)]).expect("finite");
        p.real = true;
        p
    }

    /// `amp sin(2 pi n . theta)`.
    pub fn sine(n: Mode, amp: f64) -> Self {
        let neg: Mode = n.iter().map(|x| -x).collect();
        let mut p = TrigPoly::from_modes(
            n.len(),
            [
                (n, Complex64::new(0.0, -amp / 2.0)),
                (neg, Complex64::new(0.0, amp / 2.0)),
            ],
        )
        .expect("finite");
        p.real = true;
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Whether the polynomial is flagged as a real-valued function.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Complex64)> {
        self.modes.iter()
    }

    pub fn coeff(&self, n: &[i64]) -> Complex64 {
        self.modes.get(n).copied().unwrap_or(ZERO)
    }

    pub fn mean(&self) -> Complex64 {
        self.coeff(&vec![0; self.dim])
    }

    /// Largest `|n|_inf` over present modes, 0 for the zero polynomial.
    pub fn degree(&self) -> u64 {
        self.modes
            .keys()
            .map(|n| n.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// `sum |a_n|`, an upper bound for the sup-norm.
    pub fn mass(&self) -> f64 {
        self.modes.values().map(|a| a.norm()).sum()
    }

    /// True when only the zero mode is present.
    pub fn is_constant(&self) -> bool {
        self.modes.keys().all(|n| n.iter().all(|&x| x == 0))
    }

    fn is_conjugate_symmetric(&self) -> bool {
        self.modes.iter().all(|(n, a)| {
            let neg: Mode = n.iter().map(|x| -x).collect();
            self.coeff(&neg) == a.conj()
        })
    }

    /// Value at a torus point.
    pub fn eval(&self, theta: &[f64]) -> Complex64 {
        debug_assert_eq!(theta.len(), self.dim);
        let mut acc = ZERO;
        for (n, a) in &self.modes {
            acc += a * cis(mode_phase(n, theta));
        }
        acc
    }

    /// Samples on the `res^dim` grid, row-major. Exact binning of modes modulo
    /// `res` makes this valid for any degree.
    pub fn sample_grid(&self, res: usize) -> Vec<Complex64> {
        let mut data = vec![ZERO; grid::grid_len(self.dim, res)];
        for (n, a) in &self.modes {
            data[grid::bin_of(n, res)] += a;
        }
        grid::fft_nd(&mut data, self.dim, res, true);
        if self.real {
            for v in &mut data {
                v.im = 0.0;
            }
        }
        data
    }

    /// Samples at `theta_j + shift`, with the shift applied spectrally.
    pub fn sample_grid_shifted(&self, res: usize, shift: &[f64]) -> Vec<Complex64> {
        let mut data = vec![ZERO; grid::grid_len(self.dim, res)];
        for (n, a) in &self.modes {
            data[grid::bin_of(n, res)] += a * cis(mode_phase(n, shift));
        }
        grid::fft_nd(&mut data, self.dim, res, true);
        if self.real {
            for v in &mut data {
                v.im = 0.0;
            }
        }
        data
    }

    /// Discrete Fourier analysis of grid samples. Keeps modes with every
    /// `|n_i| < res/2` and reports the mass on the Nyquist planes as tail.
    pub fn from_grid(dim: usize, res: usize, samples: &[Complex64]) -> Result<(Self, f64)> {
        if samples.len() != grid::grid_len(dim, res) {
            return Err(Error::InvalidInput("sample count does not match grid".into()));
        }
        let mut data = samples.to_vec();
        grid::fft_nd(&mut data, dim, res, false);
        let norm = 1.0 / grid::grid_len(dim, res) as f64;
        let half = (res / 2) as i64;
        let mut modes = BTreeMap::new();
        let mut tail = 0.0;
        for (idx, v) in data.iter().enumerate() {
            let a = v * norm;
            let n = grid::mode_of(dim, res, idx);
            if res > 1 && n.iter().any(|&x| x.abs() == half && res.is_multiple_of(2)) {
                tail += a.norm();
                continue;
            }
            if a != ZERO {
                modes.insert(n, a);
            }
        }
        Ok((
            TrigPoly {
                dim,
                modes,
                real: false,
            },
            tail,
        ))
    }

    /// Refit of a sampled function. The grid is doubled from `start_res`
    /// until the coefficients with some `|n_i| > res/4` carry less than
    /// `tol` times the total mass; those are then dropped together with
    /// rounding-level coefficients.
    pub fn fit<F>(dim: usize, f: F, start_res: usize, tol: f64, max_res: usize) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        TrigPoly::fit_sampled(
            dim,
            |res| {
                (0..grid::grid_len(dim, res))
                    .map(|idx| {
                        let t = grid::node(dim, res, idx);
                        let v = f(&t);
                        if v.re.is_finite() && v.im.is_finite() {
                            Ok(v)
                        } else {
                            Err(Error::NonFiniteSample { point: t })
                        }
                    })
                    .collect()
            },
            start_res,
            tol,
            max_res,
        )
    }

    /// As [`TrigPoly::fit`], with `sample(res)` returning the values on the
    /// `res^dim` grid.
    pub fn fit_sampled<S>(dim: usize, sample: S, start_res: usize, tol: f64, max_res: usize) -> Result<Self>
    where
        S: Fn(usize) -> Result<Vec<Complex64>>,
    {
        let mut res = start_res.max(8).next_power_of_two();
        loop {
            let samples = sample(res)?;
            let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            let (p, nyquist) = TrigPoly::from_grid(dim, res, &samples)?;
            let (kept, outer) = p.truncate((res / 4) as u64);
            let tail = outer + nyquist;
            let scale = kept.mass().max(f64::MIN_POSITIVE);
            if tail <= tol * scale || tail <= 8.0 * f64::EPSILON * peak {
                return Ok(kept.pruned(2.0 * f64::EPSILON * peak));
            }
            if res >= max_res {
                return Err(Error::DegreeOverflow {
                    cutoff: res / 4,
                    tail: tail / scale,
                });
            }
            res *= 2;
        }
    }

    /// Same as [`TrigPoly::fit`] for real functions; the result is exactly
    /// conjugate symmetric.
    pub fn fit_real<F>(dim: usize, f: F, start_res: usize, tol: f64, max_res: usize) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let p = TrigPoly::fit(dim, |t| Complex64::new(f(t), 0.0), start_res, tol, max_res)?;
        Ok(p.real_part())
    }

    /// Splits into modes with `|n|_inf <= cutoff` and the mass of the rest.
    pub fn truncate(&self, cutoff: u64) -> (Self, f64) {
        let mut kept = BTreeMap::new();
        let mut tail = 0.0;
        for (n, a) in &self.modes {
            if n.iter().all(|x| x.unsigned_abs() <= cutoff) {
                kept.insert(n.clone(), *a);
            } else {
                tail += a.norm();
            }
        }
        (
            TrigPoly {
                dim: self.dim,
                modes: kept,
                real: self.real,
            },
            tail,
        )
    }

    /// Truncation that fails when the discarded mass exceeds `tol` times the
    /// total.
    pub fn truncate_checked(&self, cutoff: u64, tol: f64) -> Result<Self> {
        let (kept, tail) = self.truncate(cutoff);
        let scale = self.mass().max(f64::MIN_POSITIVE);
        if tail > tol * scale {
            return Err(Error::DegreeOverflow {
                cutoff: cutoff as usize,
                tail: tail / scale,
            });
        }
        Ok(kept)
    }

    /// Drops coefficients with `|a_n| < threshold`.
    pub fn pruned(mut self, threshold: f64) -> Self {
        self.modes.retain(|_, a| a.norm() >= threshold && *a != ZERO);
        self
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut p = self.clone();
        for a in p.modes.values_mut() {
            *a *= c;
        }
        p.modes.retain(|_, a| *a != ZERO);
        p.real = self.real && c.im == 0.0;
        p
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `theta -> p(theta + alpha)`.
    pub fn shift(&self, alpha: &[f64]) -> Self {
        let mut p = self.clone();
        for (n, a) in p.modes.iter_mut() {
            *a *= cis(mode_phase(n, alpha));
        }
        if self.real {
            p.symmetrize();
        }
        p
    }

    /// Complex conjugate function.
    pub fn conj(&self) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|(n, a)| (n.iter().map(|x| -x).collect(), a.conj()))
            .collect();
        TrigPoly {
            dim: self.dim,
            modes,
            real: self.real,
        }
    }

    /// Real part as a function: `(p + conj p) / 2`.
    pub fn real_part(&self) -> Self {
        let mut p = self.clone();
        p.symmetrize();
        p
    }

    /// Imaginary part as a function: `(p - conj p) / 2i`.
    pub fn imag_part(&self) -> Self {
        let mut p = (self - &self.conj()).scale(Complex64::new(0.0, -0.5));
        p.symmetrize();
        p
    }

    fn symmetrize(&mut self) {
        let mut out = BTreeMap::new();
        for n in self.modes.keys() {
            let neg: Mode = n.iter().map(|x| -x).collect();
            let v = (self.coeff(n) + self.coeff(&neg).conj()) * 0.5;
            if v != ZERO {
                out.insert(n.clone(), v);
                out.insert(neg, v.conj());
            }
        }
        self.modes = out;
        self.real = true;
    }

    /// Product with coefficients below `rel_tol` times the product mass
    /// dropped.
    pub fn mul_pruned(&self, other: &TrigPoly, rel_tol: f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut modes: BTreeMap<Mode, Complex64> = if self.dim == 1 {
            mul_1d(self, other)
        } else {
            let mut acc: HashMap<Mode, Complex64> = HashMap::new();
            for (n, a) in &self.modes {
                for (m, b) in &other.modes {
                    let k: Mode = n.iter().zip(m).map(|(x, y)| x + y).collect();
                    *acc.entry(k).or_insert(ZERO) += a * b;
                }
            }
            acc.into_iter().collect()
        };
        if rel_tol > 0.0 {
            let mass: f64 = modes.values().map(|a| a.norm()).sum();
            let thr = rel_tol * mass;
            modes.retain(|_, a| a.norm() >= thr);
        }
        modes.retain(|_, a| *a != ZERO);
        let mut p = TrigPoly {
            dim: self.dim,
            modes,
            real: false,
        };
        if self.real && other.real {
            p.symmetrize();
        }
        p
    }

    /// `exp(p)`, by scaling and squaring around a pruned Taylor series.
    /// Coefficients smaller than `rel_tol` times the running mass are
    /// dropped.
    pub fn exp(&self, rel_tol: f64) -> Self {
        let mass = self.mass();
        let s = if mass > 2.0 {
            (mass / 2.0).log2().ceil() as i32
        } else {
            0
        };
        let p = self.scale_real(2f64.powi(-s));
        let one = TrigPoly::constant(self.dim, ONE);
        let mut sum = one.clone();
        let mut term = one;
        for m in 1..100 {
            term = term.mul_pruned(&p, 0.0).scale_real(1.0 / m as f64);
            let thr = rel_tol * sum.mass();
            term.modes.retain(|_, a| a.norm() >= thr);
            sum = &sum + &term;
            if term.mass() <= 0.25 * f64::EPSILON * sum.mass() {
                break;
            }
        }
        for _ in 0..s {
            sum = sum.mul_pruned(&sum, rel_tol);
        }
        if self.real {
            sum.symmetrize();
        }
        sum
    }

    /// Largest `|p(theta)|` over the `res^dim` grid.
    pub fn grid_sup(&self, res: usize) -> f64 {
        self.sample_grid(res)
            .iter()
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Grid resolution (power of two, at least 64) that resolves the
    /// polynomial with margin.
    pub fn natural_resolution(&self) -> usize {
        let deg = self.degree().min(1 << 20) as usize;
        (4 * deg + 4).next_power_of_two().max(64)
    }

    fn combine(&self, other: &TrigPoly, sign: f64) -> TrigPoly {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut modes = self.modes.clone();
        for (n, b) in &other.modes {
            *modes.entry(n.clone()).or_insert(ZERO) += b * sign;
        }
        modes.retain(|_, a| *a != ZERO);
        let mut p = TrigPoly {
            dim: self.dim,
            modes,
            real: false,
        };
        if self.real && other.real {
            p.symmetrize();
        }
        p
    }
}

fn mul_1d(a: &TrigPoly, b: &TrigPoly) -> BTreeMap<Mode, Complex64> {
    if a.is_empty() || b.is_empty() {
        return BTreeMap::new();
    }
    let lo = |p: &TrigPoly| p.modes.keys().next().map(|n| n[0]).unwrap();
    let hi = |p: &TrigPoly| p.modes.keys().next_back().map(|n| n[0]).unwrap();
    let (alo, ahi, blo, bhi) = (lo(a), hi(a), lo(b), hi(b));
    let span = (ahi as i128 - alo as i128) + (bhi as i128 - blo as i128) + 1;
    let budget = (8 * (a.len() + b.len())).max(4096) as i128;
    if span <= budget {
        let base = alo + blo;
        let mut acc = vec![ZERO; span as usize];
        for (n, x) in &a.modes {
            for (m, y) in &b.modes {
                acc[(n[0] + m[0] - base) as usize] += x * y;
            }
        }
        acc.into_iter()
            .enumerate()
            .filter(|(_, v)| *v != ZERO)
            .map(|(i, v)| (vec![base + i as i64], v))
            .collect()
    } else {
        let mut acc: HashMap<i64, Complex64> = HashMap::new();
        for (n, x) in &a.modes {
            for (m, y) in &b.modes {
                *acc.entry(n[0] + m[0]).or_insert(ZERO) += x * y;
            }
        }
        acc.into_iter().map(|(k, v)| (vec![k], v)).collect()
    }
}

impl std::ops::Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        self.combine(rhs, 1.0)
    }
}

impl std::ops::Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        self.combine(rhs, -1.0)
    }
}

impl std::ops::Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        self.mul_pruned(rhs, 0.0)
    }
}

impl std::ops::Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale_real(-1.0)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Term {
    n: Vec<i64>,
    re: f64,
    im: f64,
}

impl Serialize for TrigPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<Term> = self
            .modes
            .iter()
            .map(|(n, a)| Term {
                n: n.clone(),
                re: a.re,
                im: a.im,
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    /// An empty list deserializes as the zero polynomial on the circle.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<Term>::deserialize(d)?;
        let dim = terms.first().map(|t| t.n.len()).unwrap_or(1);
        if dim == 0 {
            return Err(D::Error::custom("mode vectors must be non-empty"));
        }
        TrigPoly::from_modes(
            dim,
            terms
                .into_iter()
                .map(|t| (t.n, Complex64::new(t.re, t.im))),
        )
        .map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl TrigPoly {
    /// Reinterprets a polynomial parsed without dimension information.
    pub fn with_dim(self, dim: usize) -> Result<Self> {
        if self.is_empty() {
            return Ok(TrigPoly::zero(dim));
        }
        if self.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim,
            });
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cosine_evaluates() {
        let p = TrigPoly::cosine(vec![1], 2.0);
        assert!((p.eval(&[0.0]) - c(2.0, 0.0)).norm() < 1e-15);
        assert!((p.eval(&[0.5]) - c(-2.0, 0.0)).norm() < 1e-15);
        assert!(p.is_real());
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn product_of_cosines() {
        let p = TrigPoly::cosine(vec![1], 1.0);
        let q = &p * &p;
        // cos^2 = 1/2 + cos(2x)/2
        assert!((q.coeff(&[0]) - c(0.5, 0.0)).norm() < 1e-16);
        assert!((q.coeff(&[2]) - c(0.25, 0.0)).norm() < 1e-16);
        assert_eq!(q.len(), 3);
    }

    #[test]
    fn exact_zeros_are_pruned() {
        let p = TrigPoly::cosine(vec![3], 1.0);
        assert!((&p - &p).is_empty());
    }

    #[test]
    fn sampling_matches_eval() {
        let p = TrigPoly::from_modes(
            2,
            [
                (vec![1, -2], c(0.3, 0.1)),
                (vec![0, 5], c(-0.2, 0.4)),
                (vec![0, 0], c(1.0, 0.0)),
            ],
        )
        .unwrap();
        let res = 16;
        let s = p.sample_grid(res);
        for (idx, v) in s.iter().enumerate() {
            let t = grid::node(2, res, idx);
            assert!((p.eval(&t) - v).norm() < 1e-14);
        }
    }

    #[test]
    fn grid_analysis_roundtrip() {
        let p = TrigPoly::from_modes(1, (-5..=5).map(|k| (vec![k], c(1.0 / (1.0 + (k * k) as f64), 0.1 * k as f64)))).unwrap();
        let s = p.sample_grid(32);
        let (q, tail) = TrigPoly::from_grid(1, 32, &s).unwrap();
        assert!(tail < 1e-15);
        for k in -5..=5 {
            assert!((p.coeff(&[k]) - q.coeff(&[k])).norm() < 1e-15);
        }
    }

    #[test]
    fn exp_of_cosine_matches_pointwise() {
        let p = TrigPoly::cosine(vec![1], 3.0);
        let e = p.exp(1e-18);
        for j in 0..50 {
            let t = j as f64 / 50.0;
            let want = (3.0 * (2.0 * std::f64::consts::PI * t).cos()).exp();
            assert!((e.eval(&[t]).re - want).abs() < 1e-13 * want.max(1.0));
        }
        assert!(e.is_real());
    }

    #[test]
    fn fit_reproduces_analytic_function() {
        let f = |t: &[f64]| c(1.0 / (1.2 - (2.0 * std::f64::consts::PI * t[0]).cos()), 0.0);
        let p = TrigPoly::fit(1, f, 16, 1e-15, 1 << 14).unwrap();
        for j in 0..37 {
            let t = [j as f64 / 37.0];
            assert!((p.eval(&t) - f(&t)).norm() < 1e-12);
        }
    }

    #[test]
    fn fit_overflows_on_rough_function() {
        let f = |t: &[f64]| c((t[0] - 0.5).abs(), 0.0);
        let r = TrigPoly::fit(1, f, 16, 1e-14, 256);
        assert!(matches!(r, Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn json_roundtrip() {
        let p = TrigPoly::from_modes(1, [(vec![-2], c(0.1, 0.2)), (vec![7], c(-1e-3, 3.0))]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: TrigPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn shift_is_translation() {
        let p = TrigPoly::from_modes(1, [(vec![3], c(0.5, -0.1)), (vec![-1], c(0.2, 0.0))]).unwrap();
        let a = [0.3819660112501051];
        let q = p.shift(&a);
        for j in 0..10 {
            let t = j as f64 / 10.0;
            assert!((q.eval(&[t]) - p.eval(&[frac(t + a[0])])).norm() < 1e-14);
        }
    }
}
