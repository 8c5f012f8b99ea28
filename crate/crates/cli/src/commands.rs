use crate::config::RunConfig;
use clap::ValueEnum;
use fhd::arith::{check_cd, prime_denominator_approximants};
use fhd::birkhoff::{
    birkhoff_trace, boundedness_scan, furstenberg_example, stability_probe, FurstenbergSchedule, ProbeGrid,
};
use fhd::continua::continuum_approx;
use fhd::linearize::{koenigs_linearize, modulus_rescale, siegel_formal_linearize, KoenigsGrid, SiegelOptions};
use fhd::trig::{cohomology::small_divisor_report, solve_cohomological};
use fhd::{Error, FiberedMap, Result, TrigPoly};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Characteristics,
    Cohom,
    Koenigs,
    Siegel,
    Birkhoff,
    Probe,
    Furstenberg,
    Diophantine,
    Approximants,
    Continuum,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Characteristics => "characteristics",
            Command::Cohom => "cohom",
            Command::Koenigs => "koenigs",
            Command::Siegel => "siegel",
            Command::Birkhoff => "birkhoff",
            Command::Probe => "probe",
            Command::Furstenberg => "furstenberg",
            Command::Diophantine => "diophantine",
            Command::Approximants => "approximants",
            Command::Continuum => "continuum",
        }
    }
}

/// Result of a command: the report body, files keyed by name suffix, and
/// whether the computation reached a negative verdict.
pub struct Outcome {
    pub result: Value,
    pub artifacts: Vec<(String, Vec<u8>)>,
    pub failed: bool,
}

impl Outcome {
    fn new<T: Serialize>(result: &T) -> Self {
        Outcome {
            result: to_value(result),
            artifacts: Vec::new(),
            failed: false,
        }
    }

    fn with(mut self, suffix: &str, bytes: impl Into<Vec<u8>>) -> Self {
        self.artifacts.push((suffix.to_string(), bytes.into()));
        self
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn load_map(cfg: &RunConfig) -> Result<FiberedMap> {
    let path = cfg
        .map
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("this command needs a map file".into()))?;
    fhd::io::parse_map_file(path)
}

fn rotation_vector(cfg: &RunConfig) -> Result<Vec<f64>> {
    match (&cfg.alpha, &cfg.map) {
        (Some(a), _) => Ok(a.clone()),
        (None, Some(_)) => Ok(load_map(cfg)?.alpha().to_vec()),
        (None, None) => Err(Error::InvalidInput("give alpha or a map file".into())),
    }
}

fn theta_for(cfg: &RunConfig, map: &FiberedMap) -> Result<Vec<f64>> {
    let mut t = cfg.theta.clone();
    if t.len() == 1 && map.dim() > 1 {
        t = vec![t[0]; map.dim()];
    }
    if t.len() != map.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            found: t.len(),
        });
    }
    Ok(t)
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Characteristics => characteristics(cfg),
        Command::Cohom => cohom(cfg),
        Command::Koenigs => koenigs(cfg),
        Command::Siegel => siegel(cfg),
        Command::Birkhoff => birkhoff(cfg),
        Command::Probe => probe(cfg),
        Command::Furstenberg => furstenberg(cfg),
        Command::Diophantine => diophantine(cfg),
        Command::Approximants => approximants(cfg),
        Command::Continuum => continuum(cfg),
    }
}

fn classify(kappa: f64) -> &'static str {
    if (kappa - 1.0).abs() <= 1e-9 {
        "indifferent"
    } else if kappa < 1.0 {
        "attracting"
    } else {
        "repelling"
    }
}

fn characteristics(cfg: &RunConfig) -> Result<Outcome> {
    let map = load_map(cfg)?;
    let kappa = map.multiplier()?;
    let rot = map.rotation_number(false)?;
    Ok(Outcome::new(&json!({
        "kappa": kappa,
        "class": classify(kappa),
        "degree": rot.degree,
        "rho_tr": rot.rho_tr,
        "rotation_resolution": rot.resolution,
        "certificate": map.certificate(),
        "autonomous": map.is_autonomous(),
    })))
}

fn coefficients_csv(p: &TrigPoly) -> String {
    let mut out = String::from("n,re,im\n");
    for (n, a) in p.iter() {
        let n: Vec<String> = n.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("{},{:e},{:e}\n", n.join(" "), a.re, a.im));
    }
    out
}

fn cohom(cfg: &RunConfig) -> Result<Outcome> {
    let map = load_map(cfg)?;
    let g = match &cfg.rhs {
        Some(g) => g.clone().with_dim(map.dim())?,
        None => {
            let c1 = map.linear().clone();
            let g = TrigPoly::fit_real(map.dim(), |t| c1.eval(t).norm().ln(), 64, cfg.tolerance, 1 << 14)?;
            &g - &TrigPoly::constant(map.dim(), g.mean())
        }
    };
    let report = small_divisor_report(&g, map.alpha(), cfg.divisor_floor);
    let sol = solve_cohomological(&g, map.alpha(), cfg.divisor_floor)?;
    let res = sol.u.natural_resolution().max(g.natural_resolution());
    let lhs = &sol.u.shift(map.alpha()) - &sol.u;
    let residual = (&lhs - &g).grid_sup(fhd::fibered::cap_resolution(map.dim(), res));
    Ok(Outcome::new(&json!({
        "rhs_modes": g.len(),
        "solution_modes": sol.u.len(),
        "solution_mass": sol.u.mass(),
        "residual": residual,
        "divisors": report,
    }))
    .with(".csv", coefficients_csv(&sol.u)))
}

fn koenigs(cfg: &RunConfig) -> Result<Outcome> {
    let map = load_map(cfg)?;
    let kappa = map.multiplier()?;
    if kappa >= 1.0 {
        return Err(Error::NotAttracting { kappa });
    }
    let min_linear = map.certificate().min_linear;
    let c1 = map.linear();
    let sup = c1.grid_sup(fhd::fibered::cap_resolution(map.dim(), c1.natural_resolution()));
    let (work, rescale) = if sup >= 1.0 {
        let (m, d) = modulus_rescale(&map, cfg.eps)?;
        (m, Some(d))
    } else {
        (map.clone(), None)
    };
    let grid = KoenigsGrid {
        theta_res: cfg.theta_res,
        z_res: cfg.z_res,
    };
    let conj = koenigs_linearize(&work, cfg.radius, cfg.tolerance, cfg.max_iterations, grid)?;
    let residual = conj.residual(&work);
    let (value_defect, derivative_defect) = conj.normalization_defect(&work, 1e-3)?;
    let mut csv = String::from("a,b,re,im\n");
    for a in 0..cfg.z_res {
        for b in 0..cfg.z_res {
            let v = conj.samples[a * cfg.z_res + b];
            csv.push_str(&format!("{a},{b},{:e},{:e}\n", v.re, v.im));
        }
    }
    Ok(Outcome::new(&json!({
        "kappa": kappa,
        "min_linear": min_linear,
        "sup_linear": sup,
        "rescale": rescale,
        "iterations": conj.iterations,
        "achieved_sup_delta": conj.achieved_sup_delta,
        "residual": residual,
        "value_defect": value_defect,
        "derivative_defect": derivative_defect,
    }))
    .with(".csv", csv))
}

fn siegel(cfg: &RunConfig) -> Result<Outcome> {
    let map = load_map(cfg)?;
    let opts = SiegelOptions {
        order: cfg.siegel_order,
        divisor_floor: cfg.divisor_floor,
        cutoff: cfg.siegel_cutoff,
        ..SiegelOptions::default()
    };
    let conj = siegel_formal_linearize(&map, opts)?;
    let residual = conj.residual(cfg.radius, cfg.theta_res, 8, 32);
    let mut csv = String::from("k,mass,min_divisor\n");
    for (i, (h, rep)) in conj.coefficients.iter().zip(&conj.reports).enumerate() {
        csv.push_str(&format!("{},{:e},{:e}\n", i + 2, h.mass(), rep.min_divisor));
    }
    Ok(Outcome::new(&json!({
        "beta": conj.beta,
        "order": conj.order,
        "masses": conj.coefficients.iter().map(TrigPoly::mass).collect::<Vec<_>>(),
        "reduction_residual": conj.reduction_residual,
        "order_residuals": conj.order_residuals,
        "next_order_mass": conj.next_order_mass,
        "tail_bound": conj.tail_bound(cfg.radius),
        "residual": residual,
        "radius": cfg.radius,
    }))
    .with(".csv", csv))
}

fn birkhoff(cfg: &RunConfig) -> Result<Outcome> {
    let map = load_map(cfg)?;
    let theta = theta_for(cfg, &map)?;
    let trace = birkhoff_trace(&map, &theta, cfg.horizon)?;
    let kappa = map.multiplier()?;
    let scan = if (kappa - 1.0).abs() <= 1e-9 {
        to_value(&boundedness_scan(&map, cfg.horizon, cfg.theta_res)?)
    } else {
        Value::Null
    };
    Ok(Outcome::new(&json!({
        "theta": trace.theta,
        "horizon": trace.horizon(),
        "final_sum": trace.sums.last(),
        "running_min": trace.running_min,
        "running_max": trace.running_max,
        "slope": trace.slope,
        "log_kappa": kappa.ln(),
        "scan": scan,
    }))
    .with(".csv", trace.to_csv()))
}

fn probe(cfg: &RunConfig) -> Result<Outcome> {
    let map = load_map(cfg)?;
    let grid = ProbeGrid {
        theta_res: cfg.theta_res,
        radial: cfg.probe_radial,
        angular: cfg.probe_angular,
    };
    let rep = stability_probe(&map, cfg.radius, cfg.horizon, grid)?;
    let mut csv = String::from("node,max_excursion,final_modulus\n");
    for (m, (a, b)) in rep.max_excursion.iter().zip(&rep.final_modulus).enumerate() {
        csv.push_str(&format!("{m},{a:e},{b:e}\n"));
    }
    Ok(Outcome::new(&rep).with(".csv", csv))
}

fn furstenberg(cfg: &RunConfig) -> Result<Outcome> {
    let schedule = FurstenbergSchedule {
        exponent: cfg.furstenberg_exponent,
        levels: cfg.furstenberg_levels,
        quality: cfg.furstenberg_quality,
        ..FurstenbergSchedule::default()
    };
    let ex = furstenberg_example(cfg.omega, schedule)?;
    let kappa = ex.map.multiplier()?;
    Ok(Outcome::new(&json!({
        "omega": ex.omega,
        "schedule": schedule,
        "levels": ex.levels,
        "table": ex.table,
        "kappa": kappa,
        "c1_modes": ex.map.linear().len(),
    }))
    .with(".csv", ex.table_csv())
    .with(".map.json", fhd::io::map_to_json(&ex.map)?))
}

fn diophantine(cfg: &RunConfig) -> Result<Outcome> {
    let alpha = rotation_vector(cfg)?;
    let rep = check_cd(&alpha, cfg.beta, cfg.cd_c, cfg.cd_tau, cfg.cd_range)?;
    let mut csv = String::from("min_margin,witness_j,witness_n,pass\n");
    let n: Vec<String> = rep.witness_n.iter().map(|x| x.to_string()).collect();
    csv.push_str(&format!("{:e},{},{},{}\n", rep.min_margin, rep.witness_j, n.join(" "), rep.pass));
    let mut out = Outcome::new(&rep).with(".csv", csv);
    out.failed = !rep.pass;
    Ok(out)
}

fn approximants(cfg: &RunConfig) -> Result<Outcome> {
    let alpha = rotation_vector(cfg)?;
    let seq = prime_denominator_approximants(&alpha, cfg.degree_bound, cfg.approximant_count, cfg.prime_cap)?;
    Ok(Outcome::new(&seq).with(".csv", seq.to_csv()))
}

fn continuum(cfg: &RunConfig) -> Result<Outcome> {
    let map = load_map(cfg)?;
    let rep = continuum_approx(&map, cfg.radius, cfg.continuum_schedule())?;
    let mut out = Outcome::new(&rep);
    let index = json!({
        "grid": rep.grid,
        "thetas": rep.set.thetas,
        "node": "z = -r + a h + i (-r + b h), h = 2 r / pixels, top image row b = pixels",
        "fibers": (0..rep.set.fiber_count()).map(|m| format!("fiber-{m:05}.pgm")).collect::<Vec<_>>(),
    });
    out = out.with(".masks/index.json", fhd::io::to_json(&index)?);
    for m in 0..rep.set.fiber_count() {
        out = out.with(&format!(".masks/fiber-{m:05}.pgm"), rep.set.fiber_pgm(m));
    }
    let columns = (rep.set.fiber_count() as f64).sqrt().ceil() as usize;
    Ok(out.with(".ppm", rep.set.composite_ppm(columns)))
}
