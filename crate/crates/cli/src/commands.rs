use std::fmt::Write as _;
use std::path::Path;

use hasse_core::brauer::{
    adelic_obstruction_test, ramification_locus, reduction_residue, residue_tame, Divisor, ObstructionVerdict,
    QuaternionSymbolClass, SquareClass,
};
use hasse_core::families::{
    count_points, decay_exponent_fit, delta_invariant, density_product_with_budget, local_density_with_budget,
    schanuel_prediction, CensusEngine, DensityMethod, DensityValue, HeightTally, LocalDensity,
};
use hasse_core::solubility::{
    default_level, everywhere_locally_soluble, power_class_precision, solve_padic, solve_real, DiagonalForm,
    Outcome, SolubilityVerdict, Witness,
};
use hasse_core::symbols::{hilbert_symbol, invariant_sum, local_invariants};
use hasse_core::{CensusReport, DecayFitF64, Error, Family, Place, SchanuelConstantsF64, SymbolPairQ};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::parse;

pub struct Output {
    pub json: bool,
}

impl Output {
    fn emit(&self, text: &str, value: Value) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        } else {
            print!("{text}");
        }
    }
}

pub enum Failure {
    Usage(String),
    Undecided(String),
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Undecided(_) => 3,
            Failure::Usage(_) | Failure::Runtime(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Undecided(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Undecided(_) | Error::NoEvaluablePresentation => Failure::Undecided(msg),
            Error::NotPrime(_)
            | Error::EvenPrime(_)
            | Error::Zero
            | Error::InsufficientPrecision { .. }
            | Error::InvalidForm(_)
            | Error::InvalidFamily(_)
            | Error::InvalidArgument(_)
            | Error::BudgetExceeded { .. } => Failure::Usage(msg),
            Error::PrecisionOverflow { .. } | Error::Unsupported(_) => Failure::Runtime(msg),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn usage(e: String) -> Failure {
    Failure::Usage(e)
}

fn family(s: &str) -> Result<Family, Failure> {
    Ok(s.parse::<Family>()?)
}

fn place(s: &str) -> Result<Place, Failure> {
    Ok(Place::parse(s)?)
}

fn outcome_code(o: Outcome) -> u8 {
    match o {
        Outcome::Soluble => 0,
        Outcome::Insoluble => 1,
        Outcome::Undecided => 3,
    }
}

fn outcome_word(o: Outcome) -> &'static str {
    match o {
        Outcome::Soluble => "soluble",
        Outcome::Insoluble => "insoluble",
        Outcome::Undecided => "undecided",
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn hilbert(out: &Output, a: &str, b: &str, at: Option<&str>) -> CmdResult {
    let pair = SymbolPairQ::new(parse::rational(a).map_err(usage)?, parse::rational(b).map_err(usage)?)?;
    if let Some(v) = at {
        let v = place(v)?;
        let inv = hilbert_symbol(&pair, &v);
        out.emit(
            &format!("{inv}\n"),
            json!({"a": pair.a().to_string(), "b": pair.b().to_string(), "place": v, "invariant": inv}),
        );
        return Ok(0);
    }
    let rows = local_invariants(&pair);
    let sum = invariant_sum(&pair);
    let mut text = format!("({}, {})\nplace  inv\n", pair.a(), pair.b());
    for (v, inv) in &rows {
        let _ = writeln!(text, "{:<6} {inv}", v.to_string());
    }
    let _ = writeln!(text, "sum    {sum}");
    let table: Vec<Value> = rows.iter().map(|(v, i)| json!({"place": v, "invariant": i})).collect();
    out.emit(&text, json!({"a": pair.a().to_string(), "b": pair.b().to_string(), "invariants": table, "sum": sum}));
    Ok(0)
}

fn witness_text(v: &SolubilityVerdict) -> String {
    match &v.witness {
        None => String::new(),
        Some(Witness::Residue { point, level }) => format!("  witness ({}) mod {}^{level}", join(point), v.place),
        Some(Witness::RealSigns(s)) => {
            format!("  witness signs ({})", join(s.iter().map(|&x| if x < 0 { "-" } else { "+" })))
        }
    }
}

fn verdict_line(v: &SolubilityVerdict) -> String {
    format!(
        "{:<6} {:<10} level {}{}\n",
        v.place.to_string(),
        outcome_word(v.outcome),
        v.searched_level,
        witness_text(v)
    )
}

pub fn solve(out: &Output, degree: u32, coefficients: Vec<i64>, at: Option<&str>) -> CmdResult {
    let form = DiagonalForm::new(degree, coefficients)?;
    if let Some(v) = at {
        let verdict = match place(v)? {
            Place::Real => solve_real(&form),
            Place::Finite(p) => solve_padic(&form, p, default_level(&form, p))?,
        };
        out.emit(&verdict_line(&verdict), serde_json::to_value(&verdict).expect("serializable"));
        return Ok(outcome_code(verdict.outcome));
    }
    let report = everywhere_locally_soluble(&form)?;
    let mut text = String::new();
    for v in &report.per_place {
        text.push_str(&verdict_line(v));
    }
    let failing = report.failing_places();
    match report.outcome {
        Outcome::Insoluble => {
            let _ = writeln!(text, "verdict: insoluble at {{{}}}", join(&failing));
        }
        o => {
            let _ = writeln!(text, "verdict: {} (places checked: {})", outcome_word(o), join(&report.bad_places));
        }
    }
    out.emit(&text, serde_json::to_value(&report).expect("serializable"));
    Ok(outcome_code(report.outcome))
}

pub fn lr_verify(out: &Output, prime_bound: u64, level: u32) -> CmdResult {
    if prime_bound < 17 {
        return Err(Failure::Usage(format!("--prime-bound must be at least 17 (got {prime_bound})")));
    }
    let class = QuaternionSymbolClass::lind_reichardt();
    let report = adelic_obstruction_test(&class, prime_bound, level)?;
    let verdict = match report.verdict {
        ObstructionVerdict::Obstructed => format!("obstructed (certified p ≤ {prime_bound})"),
        ObstructionVerdict::NotObstructed => "not obstructed".to_string(),
        ObstructionVerdict::NoAdelicPoints => "no adelic points".to_string(),
    };
    let mut text = format!("class {} on 2y^2 = x^4 - 17z^4, level {level}\n", report.class);
    let _ = writeln!(text, "place  C(Q_v)  method           samples  attained");
    for prof in &report.places {
        let method = serde_json::to_value(prof.method).expect("serializable");
        let _ = writeln!(
            text,
            "{:<6} {:<7} {:<16} {:<8} {{{}}}",
            prof.place.to_string(),
            if prof.attained.is_empty() { "no" } else { "yes" },
            method.as_str().unwrap_or_default(),
            prof.samples,
            join(&prof.attained)
        );
    }
    let _ = writeln!(text, "sum set: {{{}}}", join(&report.sum_set));
    let _ = writeln!(text, "tail: {}", report.tail);
    let _ = writeln!(text, "verdict: {verdict}");
    let mut value = serde_json::to_value(&report).expect("serializable");
    value["verdict_text"] = json!(verdict);
    out.emit(&text, value);
    Ok(if report.verdict == ObstructionVerdict::Obstructed { 0 } else { 1 })
}

fn class_value(d: &str, c: &SquareClass) -> Value {
    json!({"divisor": d, "field": c.field().to_string(), "class": c.to_string(), "trivial": c.is_trivial()})
}

pub fn residue(out: &Output, a: &str, f: &str, divisor: Option<&str>, reduction: bool) -> CmdResult {
    let a_q = parse::rational(a).map_err(usage)?;
    let f = parse::ratfunc(f).map_err(usage)?;
    if reduction {
        let p: u64 = a.trim().parse().map_err(|_| usage(format!("--reduction needs a prime, got {a:?}")))?;
        let class = reduction_residue(p, &f)?;
        out.emit(&format!("{class}\n"), class_value(&format!("p = {p}"), &class));
        return Ok(0);
    }
    if let Some(d) = divisor {
        let div = match d.trim() {
            "inf" | "oo" | "∞" => Divisor::Infinity,
            s => Divisor::finite(parse::poly(s).map_err(usage)?)?,
        };
        let class = residue_tame(&a_q, &f, &div)?;
        out.emit(&format!("{div}: {class}\n"), class_value(&div.to_string(), &class));
        return Ok(0);
    }
    let locus = ramification_locus(&a_q, &f)?;
    let mut text = format!("ramification locus of ({a_q}, {f}): {} divisor(s)\n", locus.len());
    for (d, c) in &locus {
        let _ = writeln!(text, "  {d}: {c}");
    }
    let values: Vec<Value> = locus.iter().map(|(d, c)| class_value(&d.to_string(), c)).collect();
    out.emit(&text, json!({"a": a_q.to_string(), "f": f.to_string(), "locus": values}));
    Ok(0)
}

/// Runs the partitions in parallel and merges them in partition order.
fn run_census(fam: &Family, ladder: &[u64], parts: u64) -> Result<Vec<CensusReport>, Failure> {
    let bmax = *ladder.iter().max().expect("nonempty ladder");
    let engine = CensusEngine::new(fam, bmax)?;
    let tallies: Vec<Result<HeightTally, Error>> =
        (0..parts).into_par_iter().map(|k| engine.run_partition(k, parts)).collect();
    let mut total: Option<HeightTally> = None;
    for t in tallies {
        let t = t?;
        match total.as_mut() {
            None => total = Some(t),
            Some(acc) => acc.merge(&t)?,
        }
    }
    Ok(total.expect("at least one partition").reports(ladder)?)
}

pub fn census(
    out: &Output,
    fam: &str,
    bounds: &str,
    parts: u64,
    jsonl: Option<&Path>,
    csv_path: Option<&Path>,
) -> CmdResult {
    let fam = family(fam)?;
    let mut ladder = parse::ladder(bounds).map_err(usage)?;
    ladder.sort_unstable();
    ladder.dedup();
    if parts == 0 {
        return Err(usage("--partitions must be at least 1".into()));
    }
    let delta = delta_invariant(&fam)?.total;
    let reports = run_census(&fam, &ladder, parts)?;
    if let Some(path) = jsonl {
        let mut body = String::new();
        for r in &reports {
            body.push_str(&serde_json::to_string(r).expect("serializable"));
            body.push('\n');
        }
        std::fs::write(path, body).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = csv_path {
        let io = |e: csv::Error| Failure::Runtime(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(["B", "ratio"]).map_err(io)?;
        for r in &reports {
            w.write_record([r.bound.to_string(), format!("{:.8}", r.ratio_f64())]).map_err(io)?;
        }
        w.flush().map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    }
    let fit: Option<DecayFitF64> = if reports.len() >= 4 { decay_exponent_fit(&reports).ok() } else { None };
    let mut text = format!("family {fam}, {parts} partition(s)\n");
    let _ = writeln!(text, "{:>8} {:>14} {:>14} {:>10}", "B", "N_tot", "N_loc", "ratio");
    for r in &reports {
        let _ = writeln!(text, "{:>8} {:>14} {:>14} {:>10.6}", r.bound, r.n_tot, r.n_loc, r.ratio_f64());
    }
    match &fit {
        Some(f) => {
            let _ = writeln!(
                text,
                "fitted exponent {:.4} (rms residual {:.4}, {} bounds)    Δ(π) = {delta}",
                f.exponent, f.residual, f.points
            );
        }
        None => {
            let _ = writeln!(text, "fitted exponent: needs at least 4 bounds    Δ(π) = {delta}");
        }
    }
    out.emit(&text, json!({"family": fam, "partitions": parts, "delta": delta.to_string(), "reports": reports, "fit": fit}));
    Ok(0)
}

pub fn delta(out: &Output, fam: &str) -> CmdResult {
    let fam = family(fam)?;
    let report = delta_invariant(&fam)?;
    let mut text = format!("family {fam}\n");
    for d in &report.per_divisor {
        let _ = writeln!(
            text,
            "  D_{}: fibre in {} variables, degree {}, δ = {}",
            d.divisor, d.variables, d.degree, d.delta
        );
    }
    let _ = writeln!(text, "Δ(π) = {}", report.total);
    let per: Vec<Value> = report
        .per_divisor
        .iter()
        .map(|d| json!({"divisor": d.divisor, "variables": d.variables, "degree": d.degree, "delta": d.delta.to_string()}))
        .collect();
    out.emit(&text, json!({"family": fam, "per_divisor": per, "total": report.total.to_string()}));
    Ok(0)
}

pub struct DensityOpts {
    pub method: String,
    pub level: u32,
    pub level_given: bool,
    pub count: u64,
    pub seed: u64,
    pub budget: u64,
}

fn density_value(v: &DensityValue) -> (String, Value) {
    match v {
        DensityValue::Exact(q) => (q.to_string(), json!({"exact": q.to_string(), "approx": v.to_f64()})),
        DensityValue::Estimate { mean, half_width } => (
            format!("{mean:.6} ± {half_width:.6} (95%)"),
            json!({"mean": mean, "half_width": half_width}),
        ),
    }
}

fn density_json(c: &LocalDensity) -> Value {
    json!({"place": c.place, "method": c.method, "level": c.level, "value": density_value(&c.value).1})
}

pub fn density_place(out: &Output, fam: &str, v: &str, opts: &DensityOpts) -> CmdResult {
    let fam = family(fam)?;
    let v = place(v)?;
    let method = match opts.method.as_str() {
        "exhaustive" => {
            let level = match v {
                Place::Finite(p) if !opts.level_given => opts.level.max(power_class_precision(p, fam.degree())),
                _ => opts.level,
            };
            DensityMethod::Exhaustive { level }
        }
        "sample" => DensityMethod::Sample { count: opts.count, level: opts.level, seed: opts.seed },
        m => return Err(usage(format!("unknown method {m:?} (exhaustive or sample)"))),
    };
    let c = local_density_with_budget(&fam, &v, method, opts.budget)?;
    let mut text = format!("{}\n", density_value(&c.value).0);
    if let DensityMethod::Sample { count, seed, .. } = method {
        if v != Place::Real {
            text = format!("{} (n = {count}, level {}, seed {seed})\n", text.trim_end(), c.level);
        }
    }
    let mut value = density_json(&c);
    value["family"] = json!(fam);
    out.emit(&text, value);
    Ok(0)
}

pub fn density_product(out: &Output, fam: &str, prime_bound: u64, opts: &DensityOpts) -> CmdResult {
    let fam = family(fam)?;
    let prod = density_product_with_budget(&fam, prime_bound, opts.budget)?;
    let mut text = format!("family {fam}, primes ≤ {prime_bound}\n");
    for c in &prod.factors {
        let _ = writeln!(text, "  c_{:<5} {:<24} {}", c.place.to_string(), density_value(&c.value).0, c.method);
    }
    let _ = writeln!(text, "product {:.6}", prod.value);
    let _ = writeln!(text, "tail factor {:.6}, density in [{:.6}, {:.6}]", prod.tail_factor, prod.lower, prod.upper);
    let factors: Vec<Value> = prod.factors.iter().map(density_json).collect();
    out.emit(
        &text,
        json!({
            "family": fam,
            "prime_bound": prime_bound,
            "value": prod.value,
            "exact": prod.exact.is_some(),
            "factors": factors,
            "tail_factor": prod.tail_factor,
            "lower": prod.lower,
            "upper": prod.upper,
        }),
    );
    Ok(0)
}

pub fn schanuel(out: &Output, n: usize, bound: Option<u64>) -> CmdResult {
    let c: SchanuelConstantsF64 = schanuel_prediction(n)?;
    let mut text = format!(
        "P^{n}(Q): N(B) ~ c·B^{} with c = 2^{}/(2·ζ({})), ζ({}) = {:.9}\nprediction {:.6}\n",
        n + 1,
        n + 1,
        n + 1,
        n + 1,
        c.zeta,
        c.coefficient
    );
    let mut value = json!({"n": n, "zeta": c.zeta, "prediction": c.coefficient});
    if let Some(b) = bound {
        if b == 0 {
            return Err(usage("--B must be positive".into()));
        }
        let count = count_points(n, b);
        let empirical = count as f64 / (b as f64).powi(n as i32 + 1);
        let rel = (empirical - c.coefficient).abs() / c.coefficient;
        let _ = writeln!(text, "B = {b}: N = {count}, N/B^{} = {empirical:.6}, relative error {rel:.3e}", n + 1);
        value["B"] = json!(b);
        value["count"] = json!(count.to_string());
        value["empirical"] = json!(empirical);
        value["relative_error"] = json!(rel);
    }
    out.emit(&text, value);
    Ok(0)
}
