//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion fails.

use fhd::arith::check_cd;
use fhd::birkhoff::{birkhoff_trace, furstenberg_example, stability_probe, FurstenbergSchedule, ProbeGrid};
use fhd::continua::{continuum_approx, hausdorff_pixels, ContinuumSchedule};
use fhd::fibered::lifted_arg_mean;
use fhd::linearize::{
    koenigs_linearize, koenigs_step_identity, siegel_formal_linearize, KoenigsGrid, SiegelOptions,
};
use fhd::trig::{base_point, cis, frac, solve_cohomological};
use fhd::{Complex64, Error, FiberedMap, TrigPoly};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_poly(rng: &mut StdRng, degree: i64, amp: f64, zero_mean: bool) -> TrigPoly {
    let terms: Vec<(Vec<i64>, Complex64)> = (-degree..=degree)
        .filter(|&n| !(zero_mean && n == 0))
        .map(|n| (vec![n], c(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp))))
        .collect();
    TrigPoly::from_modes(1, terms).unwrap()
}

/// `c_1 = e^{0.6 pi i} exp(0.2 cos 2 pi t + 0.1 i sin 4 pi t)`, `c_2 = 0.5`.
fn wavy_map() -> FiberedMap {
    let g = &TrigPoly::cosine(vec![1], 0.2) + &TrigPoly::sine(vec![2], 0.1).scale(c(0.0, 1.0));
    let c1 = g.exp(1e-18).scale(cis(0.3));
    FiberedMap::new(vec![GOLDEN], vec![c1, TrigPoly::real_constant(1, 0.5)], 0.3).unwrap()
}

fn circle_diff(a: f64, b: f64) -> f64 {
    let d = frac(a - b);
    d.min(1.0 - d)
}

fn multiplier() -> Outcome {
    let t = Instant::now();
    let flat = FiberedMap::new(vec![GOLDEN], vec![TrigPoly::real_constant(1, 0.5)], 1.0).map_err(|e| e.to_string())?;
    let e1 = (flat.multiplier().map_err(|e| e.to_string())? - 0.5).abs();
    let c1 = TrigPoly::cosine(vec![1], 1.0).exp(1e-18).scale_real(0.5);
    let wavy = FiberedMap::new(vec![GOLDEN], vec![c1], 1.0).map_err(|e| e.to_string())?;
    let e2 = (wavy.multiplier().map_err(|e| e.to_string())? - 0.5).abs();
    let secs = t.elapsed().as_secs_f64();
    check(
        e1 < 1e-12 && e2 < 1e-9 && secs < 1.0,
        format!("|k-0.5| = {e1:.1e} (constant), {e2:.1e} (exp cos); {secs:.3} s"),
    )
}

fn cohomology() -> Outcome {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let degree = rng.gen_range(1..=16);
        let g = random_poly(&mut rng, degree, 1.0, true);
        let u = solve_cohomological(&g, &[GOLDEN], 1e-12).map_err(|e| e.to_string())?.u;
        let mut res: f64 = 0.0;
        for j in 0..256 {
            let th = j as f64 / 256.0;
            let v = u.eval(&[frac(th + GOLDEN)]) - u.eval(&[th]) - g.eval(&[th]);
            res = res.max(v.norm());
        }
        worst = worst.max(res / g.mass());
    }
    let secs = t.elapsed().as_secs_f64();
    check(
        worst < 1e-10 && secs < 1.0,
        format!("max residual/mass = {worst:.1e}; {secs:.3} s"),
    )
}

fn invariance() -> Outcome {
    let map = wavy_map();
    let kappa = map.multiplier().map_err(|e| e.to_string())?;
    let rho = map.rotation_number(true).map_err(|e| e.to_string())?.rho_tr.unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    let (mut dk, mut dr): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let degree = rng.gen_range(1..=4);
        let w = random_poly(&mut rng, degree, 0.03, false);
        let conj = map.conjugate_by_rescaling(&w).map_err(|e| e.to_string())?;
        dk = dk.max((conj.multiplier().map_err(|e| e.to_string())? - kappa).abs());
        let r2 = conj.rotation_number(true).map_err(|e| e.to_string())?.rho_tr.unwrap();
        dr = dr.max(circle_diff(r2, rho));
    }
    check(dk < 1e-9 && dr < 1e-9, format!("max |dk| = {dk:.1e}, max |d rho| = {dr:.1e}"))
}

fn koenigs() -> Outcome {
    let t = Instant::now();
    let map = FiberedMap::new(
        vec![GOLDEN],
        vec![TrigPoly::real_constant(1, 0.5), TrigPoly::real_constant(1, 1.0)],
        0.2,
    )
    .map_err(|e| e.to_string())?;
    let grid = KoenigsGrid { theta_res: 256, z_res: 64 };
    let conj = koenigs_linearize(&map, 0.1, 1e-13, 4096, grid).map_err(|e| e.to_string())?;
    let residual = conj.residual(&map);
    let thetas: Vec<Vec<f64>> = (0..8).map(|j| vec![j as f64 / 8.0]).collect();
    let zs: Vec<Complex64> = (0..16).map(|j| Complex64::from_polar(0.1 * (j % 4 + 1) as f64 / 4.0, j as f64 * 0.7)).collect();
    let step = koenigs_step_identity(&map, &thetas, &zs, conj.iterations).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    check(
        residual < 1e-8 && step < 1e-10 && secs < 30.0,
        format!("residual = {residual:.1e}, step identity = {step:.1e}, n = {}; {secs:.2} s", conj.iterations),
    )
}

/// Coefficients of `h` with `f(h(z)) = h(lambda z)` for `f(z) = lambda z + z^2`.
fn classical_siegel(lambda: Complex64, order: usize) -> Vec<Complex64> {
    let mut h = vec![c(0.0, 0.0); order + 1];
    h[1] = c(1.0, 0.0);
    for k in 2..=order {
        let mut r = c(0.0, 0.0);
        for i in 1..k {
            r += h[i] * h[k - i];
        }
        h[k] = r / (lambda.powu(k as u32) - lambda);
    }
    h
}

fn siegel() -> Outcome {
    let t = Instant::now();
    let alpha = 2f64.sqrt() - 1.0;
    let lambda = cis(GOLDEN);
    let map = FiberedMap::autonomous(alpha, &[lambda, c(1.0, 0.0)], 0.2).map_err(|e| e.to_string())?;
    let opts = SiegelOptions { order: 10, ..Default::default() };
    let formal = siegel_formal_linearize(&map, opts).map_err(|e| e.to_string())?;
    let oracle = classical_siegel(lambda, 10);
    let mut worst: f64 = 0.0;
    for (h, expect) in formal.coefficients.iter().zip(&oracle[2..]) {
        worst = worst.max((h.mean() - expect).norm() / expect.norm());
    }
    let rational = FiberedMap::autonomous(alpha, &[cis(0.4), c(1.0, 0.0)], 0.2).map_err(|e| e.to_string())?;
    let resonance = match siegel_formal_linearize(&rational, opts) {
        Err(Error::SmallDivisor { shift, .. }) => Some(shift + 1),
        _ => None,
    };
    let secs = t.elapsed().as_secs_f64();
    check(
        worst < 1e-9 && resonance == Some(6) && secs < 10.0,
        format!("max relative error = {worst:.1e}; beta = 2/5 resonant at order {resonance:?}; {secs:.2} s"),
    )
}

/// Plain double loop over `j >= 0` and `n` with `1 <= |n| + j <= range`.
fn brute_cd(alpha: f64, beta: f64, tau: f64, range: i64) -> (f64, i64, i64) {
    let mut best = (f64::INFINITY, i64::MAX, i64::MAX, i64::MAX);
    for j in 0..=range {
        for n in -(range - j)..=(range - j) {
            if j == 0 && n <= 0 {
                continue;
            }
            let x = n as f64 * alpha - j as f64 * beta;
            let dist = (x - x.round()).abs();
            let size = n.abs() + j;
            let margin = dist * (size as f64).powf(2.0 + tau);
            let key = (margin, size, j, n);
            if key.0 < best.0 || (key.0 == best.0 && (key.1, key.2, key.3) < (best.1, best.2, best.3)) {
                best = key;
            }
        }
    }
    (best.0, best.3, best.2)
}

fn diophantine() -> Outcome {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(6);
    for case in 0..10 {
        let alpha = rng.gen_range(0.0..1.0);
        let beta = rng.gen_range(0.0..1.0);
        let tau = rng.gen_range(0.0..2.0);
        let rep = check_cd(&[alpha], beta, 1e-3, tau, 200).map_err(|e| e.to_string())?;
        let (margin, n, j) = brute_cd(alpha, beta, tau, 200);
        if rep.witness_n != vec![n] || rep.witness_j != j || (rep.min_margin - margin).abs() > 1e-12 * margin.max(1e-300) {
            return Err(format!(
                "case {case}: checker ({:?}, {}) margin {:e}, brute force ({n}, {j}) margin {margin:e}",
                rep.witness_n, rep.witness_j, rep.min_margin
            ));
        }
        if rep.pass != (margin > 1e-3) {
            return Err(format!("case {case}: verdict {} with margin {margin:e}", rep.pass));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    check(secs < 5.0, format!("10 cases, witnesses identical; {secs:.2} s"))
}

fn telescoping() -> Outcome {
    let g = &TrigPoly::cosine(vec![1], 0.3) + &TrigPoly::sine(vec![2], 0.2);
    let map = FiberedMap::new(vec![GOLDEN], vec![g.exp(1e-18)], 1.0).map_err(|e| e.to_string())?;
    let u = solve_cohomological(&g, &[GOLDEN], 1e-12).map_err(|e| e.to_string())?.u;
    let n = 10_000;
    let mut worst: f64 = 0.0;
    for j in 0..8 {
        let theta = [j as f64 / 8.0 + 0.01];
        let trace = birkhoff_trace(&map, &theta, n).map_err(|e| e.to_string())?;
        let u0 = u.eval(&theta).re;
        for (i, s) in trace.sums.iter().enumerate() {
            let ui = u.eval(&base_point(&theta, &[GOLDEN], i as i64)).re;
            worst = worst.max((s - (ui - u0)).abs());
        }
    }
    let damped = FiberedMap::new(vec![GOLDEN], vec![g.exp(1e-18).scale_real((-0.1f64).exp())], 1.0)
        .map_err(|e| e.to_string())?;
    let log_kappa = damped.multiplier().map_err(|e| e.to_string())?.ln();
    let slope = birkhoff_trace(&damped, &[0.0], n).map_err(|e| e.to_string())?.slope;
    let rel = (slope - log_kappa).abs() / log_kappa.abs();
    check(
        worst < 1e-8 && rel < 0.01,
        format!("telescoping error = {worst:.1e}; slope {slope:.6} vs log k {log_kappa:.6} ({:.3}%)", rel * 100.0),
    )
}

fn furstenberg() -> Outcome {
    let ex = furstenberg_example(0.110001, FurstenbergSchedule::default()).map_err(|e| e.to_string())?;
    let kappa = ex.map.multiplier().map_err(|e| e.to_string())?;
    let sups: Vec<f64> = ex.table.iter().map(|r| r.sup_norm).collect();
    let min_ratio = sups.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
    let probe = stability_probe(&ex.map, 0.1, 4096, ProbeGrid::default()).map_err(|e| e.to_string())?;
    check(
        (kappa - 1.0).abs() < 1e-10 && sups.len() == 6 && min_ratio >= 2.0 && !probe.contained(),
        format!(
            "|k-1| = {:.1e}; {} levels, min sup ratio {min_ratio:.2}; probe escaped: {}",
            (kappa - 1.0).abs(),
            sups.len(),
            !probe.contained()
        ),
    )
}

fn quadratic_map() -> FiberedMap {
    FiberedMap::autonomous(2f64.sqrt() - 1.0, &[cis(GOLDEN), c(1.0, 0.0)], 0.45).unwrap()
}

fn continuum() -> Outcome {
    let t = Instant::now();
    let alpha = 2f64.sqrt() - 1.0;
    let sched = ContinuumSchedule { theta_res: 512, pixels: 256, horizon: 200, ..Default::default() };
    let lin = FiberedMap::autonomous(alpha, &[cis(GOLDEN)], 1.0).map_err(|e| e.to_string())?;
    let a = continuum_approx(&lin, 0.2, sched).map_err(|e| e.to_string())?;
    let tube = a.grid.tube_mask();
    let full = a.set.fibers().all(|f| f == tube.as_slice());
    let lin_ok = full && a.boundary_contact_pixels == 0.0 && a.drift.forward() == 0.0 && a.drift.backward() == 0.0;
    let b = continuum_approx(&quadratic_map(), 0.2, sched).map_err(|e| e.to_string())?;
    let quad_ok = b.drift.forward() <= 2.0
        && b.drift.backward() <= 2.0
        && b.zero_section_contained
        && b.boundary_contact_pixels <= std::f64::consts::SQRT_2;
    let secs = t.elapsed().as_secs_f64();
    check(
        lin_ok && quad_ok && secs < 300.0,
        format!(
            "linear: full tube {full}, contact {}, drift {}/{}; quadratic: drift {:.2}/{:.2} px, zero section {}, contact {:.3} px; {secs:.1} s",
            a.boundary_contact_pixels,
            a.drift.forward(),
            a.drift.backward(),
            b.drift.forward(),
            b.drift.backward(),
            b.zero_section_contained,
            b.boundary_contact_pixels
        ),
    )
}

fn robustness() -> Outcome {
    let map = wavy_map();
    let c1 = map.linear();
    let res = map.sampling_resolution();
    let kappa_at = |r: usize| c1.sample_grid(r).iter().map(|v| v.norm().ln()).sum::<f64>() / r as f64;
    let dk = (kappa_at(res) - kappa_at(2 * res)).abs();
    let rho_at = |r: usize| lifted_arg_mean(1, r, &c1.sample_grid(r)).unwrap();
    let dr = circle_diff(rho_at(res), rho_at(2 * res));

    let mut rng = StdRng::seed_from_u64(10);
    let g = random_poly(&mut rng, 12, 1.0, true);
    let u = solve_cohomological(&g, &[GOLDEN], 1e-12).map_err(|e| e.to_string())?.u;
    let cohom_at = |r: usize| {
        let lhs = u.sample_grid_shifted(r, &[GOLDEN]);
        let base = u.sample_grid(r);
        let rhs = g.sample_grid(r);
        (0..r).map(|j| (lhs[j] - base[j] - rhs[j]).norm()).fold(0.0, f64::max)
    };
    let dc = (cohom_at(64) - cohom_at(128)).abs();

    let quad = FiberedMap::new(
        vec![GOLDEN],
        vec![TrigPoly::real_constant(1, 0.5), TrigPoly::real_constant(1, 1.0)],
        0.2,
    )
    .map_err(|e| e.to_string())?;
    let kr = |theta_res: usize, z_res: usize| -> Result<f64, String> {
        let conj = koenigs_linearize(&quad, 0.1, 1e-13, 4096, KoenigsGrid { theta_res, z_res }).map_err(|e| e.to_string())?;
        Ok(conj.residual(&quad))
    };
    let dkoe = (kr(256, 64)? - kr(512, 128)?).abs();

    let coarse = ContinuumSchedule { theta_res: 64, pixels: 64, horizon: 200, ..Default::default() };
    let fine = ContinuumSchedule { theta_res: 128, pixels: 128, ..coarse };
    let a = continuum_approx(&quadratic_map(), 0.2, coarse).map_err(|e| e.to_string())?;
    let b = continuum_approx(&quadratic_map(), 0.2, fine).map_err(|e| e.to_string())?;
    let dh = hausdorff_pixels(&a.set, &b.set.downsample().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    check(
        dk < 1e-8 && dr < 1e-8 && dc < 1e-8 && dkoe < 1e-8 && dh <= 2.0,
        format!("dk {dk:.1e}, d rho {dr:.1e}, cohomological {dc:.1e}, Koenigs {dkoe:.1e}, mask {dh:.2} coarse px"),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("multiplier", multiplier),
        ("cohomological residual", cohomology),
        ("conjugacy invariance", invariance),
        ("Koenigs linearization", koenigs),
        ("formal Siegel", siegel),
        ("Diophantine checker", diophantine),
        ("Birkhoff telescoping", telescoping),
        ("Furstenberg divergence", furstenberg),
        ("invariant continuum", continuum),
        ("grid robustness", robustness),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name:<24} PASS  {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} {name:<24} FAIL  {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
