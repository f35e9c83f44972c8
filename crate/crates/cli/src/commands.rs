use std::fmt::Write as _;
use std::io::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use serde_json::{json, Value};
use simplezero::dirichlet::{d_coefficients, log_l_coefficients};
use simplezero::euler_local::{abundance_report, local_factor, local_zeros, rankin_average};
use simplezero::lfunction::EvalSettings;
use simplezero::newform::{delta_coefficients, load_newform, Newform};
use simplezero::report::{self, pole_profile, threshold, Suite, VerifyConfig, SCHEMA};
use simplezero::twists::{additive_twist, d_additive_via_characters, SeriesKind};
use simplezero::zeros::{hardy_z, scan_zeros};
use simplezero::C64;

use crate::args::*;

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments (exit 2).
    Usage(String),
    /// A computation, parse or I/O error (exit 3).
    Runtime(String),
}

impl From<simplezero::Error> for Failure {
    fn from(e: simplezero::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Whether every check the command ran passed.
pub type Outcome = Result<bool, Failure>;

pub fn run(cli: Cli) -> Outcome {
    let g = &cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    if !(g.tol > 0.0 && g.tol < 1e-3) {
        return Err(Failure::Usage(format!("--tol must lie in (0, 1e-3), got {}", g.tol)));
    }
    let f = load(g)?;
    let settings = EvalSettings::default();
    match &cli.command {
        Command::Coeffs(a) => coeffs(g, &f, a),
        Command::Zeros(a) => zeros(g, &f, a, &settings),
        Command::Local(a) => local(g, &f, a, &settings),
        Command::Twist(a) => twist(g, &f, a, &settings),
        Command::Verify(a) => verify(g, &f, a, &settings),
        Command::Rankin(a) => rankin(g, &f, a.x),
    }
}

fn load(g: &Global) -> Result<Newform, Failure> {
    if g.nmax == 0 {
        return Err(Failure::Usage("--nmax must be positive".into()));
    }
    match (&g.newform, g.delta) {
        (Some(path), false) => {
            let f = load_newform(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            Ok(if g.nmax < f.n_max() { f.truncated(g.nmax) } else { f })
        }
        (None, true) => Ok(delta_coefficients(g.nmax)?),
        _ => Err(Failure::Usage("exactly one of --newform <path> or --delta is required".into())),
    }
}

fn emit(g: &Global, text: &str) -> Result<(), Failure> {
    match &g.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn envelope(command: &str, f: &Newform, inputs: Value, result: Value) -> String {
    let v = json!({
        "schema": SCHEMA,
        "command": command,
        "newform": { "label": f.label(), "weight": f.weight(), "level": f.level(), "n_max": f.n_max() },
        "inputs": inputs,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn c64(z: C64) -> Value {
    json!([z.re, z.im])
}

fn coeffs(g: &Global, f: &Newform, a: &CoeffsArgs) -> Outcome {
    let n = f.n_max();
    let (name, values): (&str, Vec<C64>) = match a.series {
        CoeffSeries::A => ("a", f.coeffs()[..n].to_vec()),
        CoeffSeries::C => ("c", d_coefficients(f, n)?.coeffs().to_vec()),
        CoeffSeries::L => ("l", log_l_coefficients(f, n)?.coeffs().to_vec()),
    };
    let text = match g.format {
        Format::Csv => {
            let mut s = String::from("n,re,im\n");
            for (i, v) in values.iter().enumerate() {
                let _ = writeln!(s, "{},{},{}", i + 1, v.re, v.im);
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = values.iter().enumerate().map(|(i, v)| json!([i + 1, v.re, v.im])).collect();
            envelope("coeffs", f, json!({ "series": name, "nmax": n }), json!({ "rows": rows }))
        }
    };
    emit(g, &text)?;
    Ok(true)
}

fn zeros(g: &Global, f: &Newform, a: &ZerosArgs, settings: &EvalSettings) -> Outcome {
    if !(a.tmax >= 0.0 && a.tmax.is_finite()) {
        return Err(Failure::Usage(format!("--tmax must be non-negative, got {}", a.tmax)));
    }
    if !(a.step > 0.0) {
        return Err(Failure::Usage(format!("--step must be positive, got {}", a.step)));
    }
    let scan = scan_zeros(f, 0.0, a.tmax, a.step, settings)?;
    if let Some(path) = &a.plot_data {
        let mut s = String::from("t,z\n");
        let count = (a.tmax / 0.05).floor() as usize;
        for i in 0..=count {
            let t = i as f64 * 0.05;
            let _ = writeln!(s, "{t},{}", hardy_z(f, t, settings)?);
        }
        std::fs::write(path, s)?;
    }
    let text = match g.format {
        Format::Csv => {
            let mut s = String::from("t,refinement_error,winding\n");
            for z in &scan.zeros {
                let _ = writeln!(s, "{},{:e},{}", z.t, z.refinement_error, z.winding);
            }
            s
        }
        Format::Json => envelope(
            "zeros",
            f,
            json!({ "tmax": a.tmax, "step": a.step }),
            json!({ "zeros": scan.zeros, "warnings": scan.warnings }),
        ),
    };
    emit(g, &text)?;
    Ok(true)
}

fn local(g: &Global, f: &Newform, a: &LocalArgs, settings: &EvalSettings) -> Outcome {
    if a.rankin {
        return rankin(g, f, a.x);
    }
    let q = a.q.ok_or_else(|| Failure::Usage("local needs --q <prime> or --rankin".into()))?;
    let lf = local_factor(f, q)?;
    let zs = local_zeros(&lf, 0.0, a.tmax);
    let first = zs.first().map(|z| z.s.im);
    let mut result = json!({ "factor": lf, "zeros": zs, "first_zero_ordinate": first });
    let mut passed = true;
    if a.inherit {
        let s0 = C64::new((f.weight() as f64 - 1.0) / 2.0, lf.theta / (q as f64).ln());
        let scaled = pole_profile(f, q, s0, settings)?;
        let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(x, y), &v| (x.min(v), y.max(v)));
        let window = threshold("pole_window");
        passed = hi / lo < window;
        result["inherit"] = json!({
            "s0": c64(s0),
            "distances": [1e-2, 1e-3, 1e-4],
            "scaled_magnitude": scaled,
            "ratio": hi / lo,
            "threshold": window,
            "passed": passed,
        });
    }
    let text = match g.format {
        Format::Csv => {
            let mut s = String::from("q,theta,is_square,first_zero\n");
            let first = first.map(|t| t.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{q},{},{},{first}", lf.theta, lf.is_square);
            s
        }
        Format::Json => envelope("local", f, json!({ "q": q, "tmax": a.tmax, "inherit": a.inherit }), result),
    };
    emit(g, &text)?;
    Ok(passed)
}

fn parse_alpha(s: &str) -> Result<BigRational, Failure> {
    BigRational::from_str(s).map_err(|e| Failure::Usage(format!("--alpha {s:?} is not a rational: {e}")))
}

fn twist(g: &Global, f: &Newform, a: &TwistArgs, settings: &EvalSettings) -> Outcome {
    let s = C64::new(a.s, a.t);
    let (inputs, result) = match (&a.alpha, a.q) {
        (Some(alpha), None) => {
            let alpha = parse_alpha(alpha)?;
            let kind = match a.series {
                TwistSeries::L => SeriesKind::L,
                TwistSeries::D => SeriesKind::D,
            };
            let v = additive_twist(kind, f, s, &alpha, f.n_max(), a.tail_tol)?;
            (
                json!({ "alpha": alpha.to_string(), "s": c64(s), "series": format!("{kind:?}") }),
                json!({ "value": c64(v.value), "tail_bound": v.tail_bound, "n_cut": v.n_cut }),
            )
        }
        (None, Some(q)) => {
            let v = d_additive_via_characters(f, q, s, settings)?;
            (json!({ "q": q, "s": c64(s), "series": "D" }), json!({ "value": c64(v) }))
        }
        _ => return Err(Failure::Usage("twist needs exactly one of --alpha or --q".into())),
    };
    let text = match g.format {
        Format::Csv => format!("re,im\n{},{}\n", result["value"][0], result["value"][1]),
        Format::Json => envelope("twist", f, inputs, result),
    };
    emit(g, &text)?;
    Ok(true)
}

fn verify(g: &Global, f: &Newform, a: &VerifyArgs, settings: &EvalSettings) -> Outcome {
    let mut suites = Vec::new();
    for name in &a.suite {
        if name == "all" {
            suites.extend(Suite::ALL);
        } else {
            suites.push(Suite::from_str(name).map_err(|e| Failure::Usage(e.to_string()))?);
        }
    }
    let d = VerifyConfig::default();
    let alpha = a.alpha.as_deref().map(parse_alpha).transpose()?;
    let cfg = VerifyConfig {
        alpha: alpha.clone().unwrap_or(d.alpha),
        expansion_alpha: alpha.unwrap_or(d.expansion_alpha),
        y: a.y.unwrap_or(d.y),
        t: a.t.unwrap_or(d.t),
        m: a.m.unwrap_or(d.m),
        qs: a.q.clone().unwrap_or(d.qs),
        s: a.s.unwrap_or(d.s),
        tmax: a.tmax.unwrap_or(d.tmax),
        rankin_x: a.x.unwrap_or(d.rankin_x),
        tol: g.tol,
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let rep = report::verify(f, &suites, &cfg, settings);
    let text = match g.format {
        Format::Json => rep.to_json(),
        Format::Csv => rep.to_csv(),
    };
    emit(g, &text)?;
    Ok(rep.passed)
}

fn rankin(g: &Global, f: &Newform, x: u64) -> Outcome {
    let mean = rankin_average(f, x)?;
    let ab = abundance_report(f, x)?;
    let text = match g.format {
        Format::Csv => format!("x,mean,primes,strict,fraction\n{x},{mean},{},{},{}\n", ab.primes, ab.strict, ab.fraction),
        Format::Json => envelope("rankin", f, json!({ "X": x }), json!({ "mean": mean, "abundance": ab })),
    };
    emit(g, &text)?;
    Ok(true)
}
