//! Diophantine tools for the rotation vector: distances to the integers, a
//! finite-range check of the joint condition on `(alpha, beta)`, exact
//! continued fractions of doubles and rational approximants with prime
//! denominators.

use crate::error::{Error, Result};
use crate::trig::frac_mul;
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;

pub use crate::trig::torus_norm;

/// `||n x||` from the exact product `n x`.
pub fn torus_norm_mul(n: i64, x: f64) -> f64 {
    let f = frac_mul(n, x);
    f.min(1.0 - f)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiophantineReport {
    pub alpha: Vec<f64>,
    pub beta: f64,
    pub c: f64,
    pub tau: f64,
    pub range: u32,
    /// `min ||n.alpha - j beta|| (|n| + j)^(2 + tau)` over the tested pairs.
    pub min_margin: f64,
    pub witness_n: Vec<i64>,
    pub witness_j: i64,
    pub pass: bool,
    pub tested: u64,
}

#[derive(Clone, Debug)]
struct Candidate {
    margin: f64,
    shell: i64,
    j: i64,
    n: Vec<i64>,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        match self.margin.partial_cmp(&other.margin) {
            Some(Ordering::Less) => true,
            Some(Ordering::Greater) => false,
            _ => (self.shell, self.j, &self.n) < (other.shell, other.j, &other.n),
        }
    }
}

fn first_nonzero_positive(n: &[i64]) -> bool {
    n.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// Tests `||n.alpha - j beta|| > c / (|n| + j)^(2 + tau)` for every `j >= 0`
/// and `n` with `1 <= |n|_inf + j <= range`. The pair `(0, 0)` is excluded,
/// and for `j = 0` only one of `n, -n` is visited since both give the same
/// distance. Ties in the margin go to the smallest `(|n| + j, j, n)`.
pub fn check_cd(alpha: &[f64], beta: f64, c: f64, tau: f64, range: u32) -> Result<DiophantineReport> {
    if range < 1 {
        return Err(Error::InvalidInput("range must be at least 1".into()));
    }
    if alpha.is_empty() {
        return Err(Error::InvalidInput("rotation vector is empty".into()));
    }
    let d = alpha.len();
    let r = range as i64;
    let exponent = 2.0 + tau;
    let per_j: Vec<(Option<Candidate>, u64)> = (0..=r)
        .into_par_iter()
        .map(|j| {
            let bound = r - j;
            let mut best: Option<Candidate> = None;
            let mut tested = 0u64;
            let mut n = vec![-bound; d];
            loop {
                if j > 0 || first_nonzero_positive(&n) {
                    let mut x = 0.0;
                    for (ni, ai) in n.iter().zip(alpha) {
                        x += *ni as f64 * ai;
                    }
                    x -= j as f64 * beta;
                    let size = n.iter().map(|v| v.abs()).max().unwrap_or(0) + j;
                    let cand = Candidate {
                        margin: torus_norm(x) * (size as f64).powf(exponent),
                        shell: size,
                        j,
                        n: n.clone(),
                    };
                    tested += 1;
                    if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                        best = Some(cand);
                    }
                }
                let mut i = d;
                loop {
                    if i == 0 {
                        return (best, tested);
                    }
                    i -= 1;
                    if n[i] < bound {
                        n[i] += 1;
                        break;
                    }
                    n[i] = -bound;
                }
            }
        })
        .collect();
    let mut best: Option<Candidate> = None;
    let mut tested = 0;
    for (cand, t) in per_j {
        tested += t;
        if let Some(cand) = cand {
            if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                best = Some(cand);
            }
        }
    }
    let best = best.expect("range >= 1 always tests a pair");
    Ok(DiophantineReport {
        alpha: alpha.to_vec(),
        beta,
        c,
        tau,
        range,
        min_margin: best.margin,
        witness_n: best.n,
        witness_j: best.j,
        pass: best.margin > c,
        tested,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuedFraction {
    pub x: f64,
    /// `a_0, a_1, ..`
    pub partial_quotients: Vec<u128>,
    /// `(p_k, q_k)` for each partial quotient.
    pub convergents: Vec<(u128, u128)>,
    /// The expansion ended before the requested number of terms.
    pub rational_input: bool,
}

/// Continued fraction of the exact rational value of `x`, up to `k_max`
/// partial quotients.
pub fn continued_fraction(x: f64, k_max: usize) -> Result<ContinuedFraction> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidInput(format!("{x} is not in (0, 1)")));
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let (m, e) = if biased == 0 {
        (bits & ((1u64 << 52) - 1), -1074)
    } else {
        ((bits & ((1u64 << 52) - 1)) | (1u64 << 52), biased - 1075)
    };
    let s = -e;
    if s > 126 {
        return Err(Error::InvalidInput(format!("{x} is too small for an exact expansion")));
    }
    let (mut num, mut den) = (m as u128, 1u128 << s);
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let mut partial_quotients = Vec::new();
    let mut convergents = Vec::new();
    while partial_quotients.len() < k_max && den != 0 {
        let a = num / den;
        let rem = num % den;
        let p = a * p1 + p0;
        let q = a * q1 + q0;
        partial_quotients.push(a);
        convergents.push((p, q));
        p0 = p1;
        q0 = q1;
        p1 = p;
        q1 = q;
        num = den;
        den = rem;
    }
    Ok(ContinuedFraction {
        x,
        rational_input: partial_quotients.len() < k_max,
        partial_quotients,
        convergents,
    })
}

/// Primes up to `cap` by the sieve of Eratosthenes.
pub fn primes_up_to(cap: u64) -> Vec<u64> {
    if cap < 2 {
        return Vec::new();
    }
    let n = cap as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut k = i * i;
            while k <= n {
                composite[k] = true;
                k += i;
            }
        }
    }
    out
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Approximant {
    pub p: Vec<i64>,
    pub q: Vec<i64>,
    /// `|alpha_j - p_j / q_j|`
    pub error: Vec<f64>,
}

impl Approximant {
    pub fn value(&self) -> Vec<f64> {
        self.p
            .iter()
            .zip(&self.q)
            .map(|(&p, &q)| p as f64 / q as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproximantSequence {
    pub alpha: Vec<f64>,
    pub degree_bound: u64,
    pub entries: Vec<Approximant>,
}

impl ApproximantSequence {
    /// Rows `k,p,q,error`, one per entry and component.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,p,q,error\n");
        for (k, e) in self.entries.iter().enumerate() {
            for i in 0..e.p.len() {
                s.push_str(&format!("{},{},{},{:.16e}\n", k, e.p[i], e.q[i], e.error[i]));
            }
        }
        s
    }
}

/// Default search cap for prime denominators.
pub const DEFAULT_PRIME_CAP: u64 = 10_000_000;

/// Smallest `||k.alpha||` over non-zero `k` with small entries is below
/// `tol`: the vector is treated as rationally dependent.
pub fn rational_relation(alpha: &[f64], tol: f64) -> Option<Vec<i64>> {
    let d = alpha.len();
    let k_max: i64 = match d {
        1 => 1000,
        2 => 40,
        3 => 10,
        _ => 4,
    };
    let mut k = vec![-k_max; d];
    loop {
        if first_nonzero_positive(&k) {
            let x: f64 = k.iter().zip(alpha).map(|(&a, &b)| a as f64 * b).sum();
            if torus_norm(x) < tol {
                return Some(k);
            }
        }
        let mut i = d;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if k[i] < k_max {
                k[i] += 1;
                break;
            }
            k[i] = -k_max;
        }
    }
}

/// `count` approximants `p/q` of `alpha` whose denominators are pairwise
/// distinct primes above `degree_bound`. Each component takes the next prime
/// (in increasing order, below `cap`) that strictly improves on its previous
/// error, so errors decrease along the sequence.
pub fn prime_denominator_approximants(
    alpha: &[f64],
    degree_bound: u64,
    count: usize,
    cap: u64,
) -> Result<ApproximantSequence> {
    if alpha.is_empty() {
        return Err(Error::InvalidInput("rotation vector is empty".into()));
    }
    if let Some(relation) = rational_relation(alpha, 1e-12) {
        return Err(Error::NotIndependent { relation });
    }
    let primes = if degree_bound >= cap {
        Vec::new()
    } else {
        primes_up_to(cap)
    };
    let d = alpha.len();
    let mut cursor = vec![primes.partition_point(|&p| p <= degree_bound); d];
    let mut prev_err = vec![f64::INFINITY; d];
    let mut used = std::collections::HashSet::new();
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let mut entry = Approximant {
            p: vec![0; d],
            q: vec![0; d],
            error: vec![0.0; d],
        };
        for j in 0..d {
            let a = alpha[j];
            let mut found = false;
            while cursor[j] < primes.len() {
                let q = primes[cursor[j]];
                cursor[j] += 1;
                if used.contains(&q) {
                    continue;
                }
                let p = (q as f64 * a).round();
                let err = (a - p / q as f64).abs();
                if err < prev_err[j] && err < 1.0 / q as f64 && (p as i64).rem_euclid(q as i64) != 0 {
                    used.insert(q);
                    prev_err[j] = err;
                    entry.p[j] = p as i64;
                    entry.q[j] = q as i64;
                    entry.error[j] = err;
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::SearchExhausted {
                    cap,
                    found: entries.len(),
                });
            }
        }
        entries.push(entry);
    }
    Ok(ApproximantSequence {
        alpha: alpha.to_vec(),
        degree_bound,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    #[test]
    fn rational_alpha_fails_at_two() {
        let r = check_cd(&[0.5], 0.3141, 1e-3, 0.5, 5).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witness_n, vec![2]);
        assert_eq!(r.witness_j, 0);
        assert_eq!(r.min_margin, 0.0);
    }

    #[test]
    fn verdict_follows_margin() {
        let r = check_cd(&[GOLDEN], std::f64::consts::SQRT_2 - 1.0, 0.0, 0.5, 50).unwrap();
        let lo = check_cd(&[GOLDEN], std::f64::consts::SQRT_2 - 1.0, r.min_margin * 0.99, 0.5, 50).unwrap();
        let hi = check_cd(&[GOLDEN], std::f64::consts::SQRT_2 - 1.0, r.min_margin * 1.01, 0.5, 50).unwrap();
        assert!(lo.pass && !hi.pass);
    }

    #[test]
    fn golden_expansion_is_fibonacci() {
        let cf = continued_fraction(GOLDEN, 30).unwrap();
        assert!(!cf.rational_input);
        assert_eq!(cf.partial_quotients[0], 0);
        assert!(cf.partial_quotients[1..].iter().all(|&a| a == 1));
        let qs: Vec<u128> = cf.convergents.iter().map(|c| c.1).collect();
        for k in 2..qs.len() {
            assert_eq!(qs[k], qs[k - 1] + qs[k - 2]);
        }
    }

    #[test]
    fn dyadic_input_terminates() {
        let cf = continued_fraction(0.25, 10).unwrap();
        assert!(cf.rational_input);
        assert_eq!(cf.partial_quotients, vec![0, 4]);
        assert_eq!(cf.convergents.last(), Some(&(1, 4)));
    }

    #[test]
    fn sieve_small() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(is_prime(97) && !is_prime(91));
    }

    #[test]
    fn rational_vectors_are_rejected() {
        assert!(matches!(
            prime_denominator_approximants(&[0.5], 4, 3, 1000),
            Err(Error::NotIndependent { .. })
        ));
    }

    #[test]
    fn norm_of_products() {
        assert_eq!(torus_norm_mul(3, 0.25), 0.25);
        assert_eq!(torus_norm(-0.75), 0.25);
    }
}
