//! Subcommand bodies. Each returns a JSON report and a pass flag; errors carry
//! the library error so the caller can pick the exit code.

use serde_json::{json, Map, Value};

use kolyvagin_core::character::CharacterSpec;
use kolyvagin_core::cyclotomic::DirichletCharacter;
use kolyvagin_core::error::{Error, Result};
use kolyvagin_core::ideal::{annihilator, characteristic_ideal, fitting_ideal, IdealHandle};
use kolyvagin_core::kolyvagin::{kolyvagin_class, theta_ideal, tilde_theta_ideal};
use kolyvagin_core::module::{ModuleJson, PresentedModule};
use kolyvagin_core::ring::Ring;
use kolyvagin_core::stark::{DatumJson, SelmerDatum};
use kolyvagin_core::stickelberger::{
    label_subsets, modified_p_adic_l, rational_string, stickelberger_element,
    theta_character_value, EulerSystemWindow, LSetup, PrimeLabel,
};
use kolyvagin_core::suite::{
    kolyvagin_labels, run_suite, stark_checks, SuiteConfig, KOLYVAGIN_CHI,
};

pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// A decimal string or a JSON integer.
fn number(v: &Value, key: &str) -> Result<Option<u64>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => s
            .parse()
            .map(Some)
            .map_err(|_| Error::Parse(format!("{key}: not a number"))),
        Some(Value::Number(n)) => n
            .as_u64()
            .map(Some)
            .ok_or_else(|| Error::Parse(format!("{key}: not a number"))),
        Some(_) => Err(Error::Parse(format!("{key}: expected a decimal string"))),
    }
}

fn numbers(v: &Value, key: &str) -> Result<Option<Vec<u64>>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Array(xs)) => xs
            .iter()
            .map(|x| number(&json!({ "x": x }), "x").map(|o| o.unwrap_or_default()))
            .collect::<Result<Vec<_>>>()
            .map(Some),
        Some(_) => Err(Error::Parse(format!("{key}: expected an array"))),
    }
}

fn compare(a: &IdealHandle, b: &IdealHandle) -> &'static str {
    match (a == b, b.contains_ideal(a), a.contains_ideal(b)) {
        (true, _, _) => "equal",
        (_, true, _) => "strict",
        (_, _, true) => "reversed",
        _ => "incomparable",
    }
}

pub fn ideal(input: &Value) -> Result<Outcome> {
    let j: ModuleJson = serde_json::from_value(input.clone()).map_err(parse_err)?;
    let m = PresentedModule::from_json(&j)?;
    let ring = m.ring();
    let f0 = fitting_ideal(&m, 0);
    let ann = annihilator(&m);
    let fitting: Vec<String> = (0..=m.gens())
        .map(|i| fitting_ideal(&m, i).to_string())
        .collect();
    let mut report = Map::new();
    report.insert("ring".into(), json!(ring.spec()));
    report.insert("fitt0".into(), json!(f0.to_string()));
    report.insert("ann".into(), json!(ann.to_string()));
    report.insert("fitting".into(), json!(fitting));
    report.insert("length".into(), json!(m.length().to_string()));
    if ring.is_gorenstein() {
        let ch = characteristic_ideal(&m);
        report.insert("char".into(), json!(ch.to_string()));
        report.insert("verdict".into(), json!(compare(&f0, &ch)));
        report.insert("char_equals_ann".into(), json!(ch == ann));
        report.insert(
            "howell".into(),
            json!({"fitt0": f0.report(), "char": ch.report(), "ann": ann.report()}),
        );
    } else {
        report.insert("char".into(), Value::Null);
        report.insert("verdict".into(), json!(compare(&f0, &ann)));
        report.insert(
            "howell".into(),
            json!({"fitt0": f0.report(), "ann": ann.report()}),
        );
    }
    Ok(Outcome {
        report: Value::Object(report),
        passed: true,
    })
}

pub fn stickelberger(input: &Value, p: Option<u64>, n: Option<u32>) -> Result<Outcome> {
    let m = number(input, "m")?.ok_or_else(|| Error::Parse("m is required".into()))?;
    let extra = numbers(input, "extra_primes")?.unwrap_or_default();
    let theta = stickelberger_element(m, &extra)?;
    let mut report = Map::new();
    report.insert("theta".into(), json!(theta.to_json()));

    let mut chars = Vec::new();
    let mut real = Map::new();
    let mut agree = true;
    for psi in DirichletCharacter::all(m)?.iter().filter(|c| c.is_odd()) {
        let value = theta.evaluate(psi)?;
        let oracle = if extra.is_empty() {
            Some(theta_character_value(m, psi)?)
        } else {
            None
        };
        let ok = oracle.as_ref().is_none_or(|o| *o == value);
        agree &= ok;
        let coords: Vec<String> = value.reduced().iter().map(rational_string).collect();
        let rational = value
            .reduced()
            .iter()
            .skip(1)
            .all(|c| rational_string(c) == "0");
        let table: Vec<String> = (0..m as i64)
            .filter_map(|a| psi.exponent(a).map(|k| format!("{a}:{k}")))
            .collect();
        if psi.conj() == *psi {
            real.insert(
                psi.conductor().to_string(),
                json!(rational_string(&value.reduced()[0])),
            );
        }
        chars.push(json!({
            "conductor": psi.conductor().to_string(),
            "root_order": psi.d.to_string(),
            "exponents": table,
            "value": coords,
            "rational_value": rational.then(|| rational_string(&value.reduced()[0])),
            "matches_bernoulli": ok,
        }));
    }
    report.insert("odd_characters".into(), json!(chars));
    report.insert("real_values".into(), Value::Object(real));

    let p = p.or(number(input, "p")?);
    let n = n.or(number(input, "n")?.map(|x| x as u32));
    if let (Some(p), Some(n)) = (p, n) {
        if m % p == 0 {
            let flat = theta.flat_projection(p, n)?;
            report.insert(
                "flat".into(),
                json!(flat.iter().map(u64::to_string).collect::<Vec<_>>()),
            );
        }
        if let Some(ell) = number(input, "chi")? {
            let t = number(input, "t")?.unwrap_or(0) as u32;
            let setup = LSetup::new(p, n, t, CharacterSpec::legendre(ell, p, n)?)?;
            let labels = numbers(input, "labels")?.unwrap_or_default();
            let pool = labels
                .iter()
                .map(|&q| PrimeLabel::new(q, p, n))
                .collect::<Result<Vec<_>>>()?;
            let (layer, l) = modified_p_adic_l(&setup, &pool)?;
            report.insert(
                "l_element".into(),
                json!({"ring": layer.ring.spec(), "labels": layer.label_set(), "coeffs": l.to_strings()}),
            );
        }
    }
    report.insert("bernoulli_agreement".into(), json!(agree));
    Ok(Outcome {
        report: Value::Object(report),
        passed: agree,
    })
}

pub fn kolyvagin(
    input: &Value,
    p: Option<u64>,
    n: Option<u32>,
    pool_max: Option<usize>,
) -> Result<Outcome> {
    let p = p.or(number(input, "p")?).unwrap_or(3);
    let n = n.or(number(input, "n")?.map(|x| x as u32)).unwrap_or(1);
    let t = number(input, "t")?.unwrap_or(0) as u32;
    let ell = number(input, "chi")?.unwrap_or(KOLYVAGIN_CHI);
    let labels = match numbers(input, "labels")? {
        Some(ls) => ls,
        None => kolyvagin_labels(p, pool_max.unwrap_or(3)),
    };
    let max_nu = number(input, "max_nu")?.unwrap_or(2) as usize;
    let setup = LSetup::new(p, n, t, CharacterSpec::legendre(ell, p, n)?)?;
    let pool = labels
        .iter()
        .map(|&q| PrimeLabel::new(q, p, n))
        .collect::<Result<Vec<_>>>()?;
    let w = EulerSystemWindow::stickelberger(&setup, &pool, max_nu)?;
    let window = w.validate();
    let mut classes = Vec::new();
    for s in label_subsets(&labels, max_nu) {
        classes.push(json!(kolyvagin_class(&w, &[], &s)?.to_json()));
    }
    let mut thetas = Vec::new();
    for i in 0..=max_nu {
        let (a, b) = (theta_ideal(&w, &[], i)?, tilde_theta_ideal(&w, &[], i)?);
        thetas.push(json!({"i": i.to_string(), "theta": a.to_string(), "tilde_theta": b.to_string(), "equal": a == b}));
    }
    let report = json!({
        "p": p.to_string(),
        "n": n.to_string(),
        "t": t.to_string(),
        "chi": ell.to_string(),
        "labels": labels.iter().map(u64::to_string).collect::<Vec<_>>(),
        "window": window,
        "classes": classes,
        "theta": thetas,
    });
    Ok(Outcome {
        passed: window.valid,
        report,
    })
}

pub fn stark(input: Option<&Value>, p: u64, n: u32, pool_max: usize) -> Result<Outcome> {
    let datum = match input {
        Some(v) => {
            let j: DatumJson = serde_json::from_value(v.clone()).map_err(parse_err)?;
            SelmerDatum::from_json(&j)?
        }
        None => {
            let labels = kolyvagin_labels(3, 3)
                .into_iter()
                .chain([19])
                .take(pool_max.clamp(1, 4))
                .collect::<Vec<_>>();
            let mut sorted = labels;
            sorted.sort_unstable();
            SelmerDatum::toy(&Ring::scalars(p, n)?, sorted, 1)?
        }
    };
    let checks = stark_checks(&datum, 64)?;
    let passed = checks.values().all(|c| c.0);
    let list: Vec<Value> = checks
        .iter()
        .map(|(id, (ok, count, w))| json!({"id": id, "passed": ok, "cases": count.to_string(), "witness": w}))
        .collect();
    Ok(Outcome {
        report: json!({"labels": datum.names((1 << datum.pool()) - 1), "rank": datum.rank().to_string(), "passed": passed, "checks": list}),
        passed,
    })
}

pub fn suite(names: &[String], cfg: &SuiteConfig) -> Result<Outcome> {
    let mut reports = Vec::new();
    for name in names {
        reports.push(run_suite(name, cfg)?);
    }
    let passed = reports.iter().all(|r| r.passed);
    let report = if reports.len() == 1 {
        json!(reports[0])
    } else {
        json!({"passed": passed, "reports": reports})
    };
    Ok(Outcome { report, passed })
}
