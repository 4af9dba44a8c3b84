//! Brute-force oracles that regenerate the CLI fixtures.
//!
//! Nothing here calls into the library's algorithms: ideals over Z/pⁿ are found
//! by enumeration, Stickelberger coefficients from ζ_H(0, x) = 1/2 − x, and the
//! quadratic character value from the first Bernoulli number by direct summation.

use std::collections::BTreeSet;
use std::path::Path;

use serde_json::{json, Value};

pub struct Fixture {
    pub name: &'static str,
    pub body: Value,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn fraction(num: i64, den: i64) -> String {
    let g = gcd(num, den);
    let (mut a, mut b) = (num / g, den / g);
    if b < 0 {
        a = -a;
        b = -b;
    }
    if b == 1 {
        a.to_string()
    } else {
        format!("{a}/{b}")
    }
}

/// The ideal of Z/pⁿ generated by a set of residues, written (p^v).
fn scalar_ideal(p: u64, n: u32, members: impl IntoIterator<Item = u64>) -> String {
    let q = p.pow(n);
    let v = members
        .into_iter()
        .map(|x| x % q)
        .filter(|&x| x != 0)
        .map(|mut x| {
            let mut v = 0;
            while x % p == 0 {
                x /= p;
                v += 1;
            }
            v
        })
        .min();
    match v {
        None => "(0)".into(),
        Some(v) => format!("({})", p.pow(v)),
    }
}

fn det(rows: &[Vec<i64>]) -> i64 {
    match rows.len() {
        0 => 1,
        k => (0..k)
            .map(|j| {
                let minor: Vec<Vec<i64>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * rows[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..1usize << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Fitt⁰ and Ann of coker(rel) over Z/pⁿ by enumeration of the relation span.
fn scalar_module(p: u64, n: u32, gens: usize, rel: &[Vec<i64>]) -> (String, String) {
    let q = p.pow(n);
    let qi = q as i64;
    let fitt0 = if rel.len() < gens {
        "(0)".into()
    } else {
        let minors = subsets(rel.len(), gens).into_iter().map(|rows| {
            det(&rows.iter().map(|&i| rel[i].clone()).collect::<Vec<_>>()).rem_euclid(qi) as u64
        });
        scalar_ideal(p, n, minors)
    };
    let mut span = BTreeSet::new();
    let total = q.pow(rel.len() as u32);
    for idx in 0..total {
        let mut x = idx;
        let mut v = vec![0i64; gens];
        for r in rel {
            let c = (x % q) as i64;
            x /= q;
            for (vi, ri) in v.iter_mut().zip(r) {
                *vi = (*vi + c * ri).rem_euclid(qi);
            }
        }
        span.insert(v);
    }
    let ann = (0..q).filter(|&a| {
        (0..gens).all(|i| {
            let mut e = vec![0i64; gens];
            e[i] = a as i64;
            span.contains(&e)
        })
    });
    (fitt0, scalar_ideal(p, n, ann))
}

fn module_json(p: u64, n: u32, gens: usize, rel: &[Vec<i64>]) -> Value {
    json!({
        "ring": {"p": p, "n": n, "invariant_factors": []},
        "gens": gens,
        "relations": rel.iter().map(|r| r.iter().map(|x| vec![x.to_string()]).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn ideal_fixture(name: &'static str, p: u64, n: u32, gens: usize, rel: &[Vec<i64>]) -> Fixture {
    let (fitt0, ann) = scalar_module(p, n, gens, rel);
    // over Z/pⁿ the characteristic ideal is the annihilator
    let verdict = if fitt0 == ann { "equal" } else { "strict" };
    Fixture {
        name,
        body: json!({
            "args": ["ideal", "--input", module_json(p, n, gens, rel).to_string()],
            "exit": 0,
            "expect": {"/fitt0": fitt0, "/char": ann, "/ann": ann, "/verdict": verdict},
        }),
    }
}

fn theta_fixture(m: i64) -> Fixture {
    let mut expect = serde_json::Map::new();
    for a in (1..m).filter(|&a| gcd(a, m) == 1) {
        expect.insert(
            format!("/theta/coeffs/{a}"),
            json!(fraction(m - 2 * a, 2 * m)),
        );
    }
    Fixture {
        name: "stickelberger_m5",
        body: json!({"args": ["stickelberger", "--input", json!({"m": m.to_string()}).to_string()], "exit": 0, "expect": expect}),
    }
}

/// θ_ℓ at the quadratic character mod ℓ: −B_{1,χ} = −(1/ℓ)Σ a·χ(a), χ(a) by Euler's criterion.
fn quadratic_fixture(ell: i64) -> Fixture {
    let chi = |a: i64| {
        let mut acc = 1i64;
        for _ in 0..(ell - 1) / 2 {
            acc = acc * a % ell;
        }
        if acc == 1 {
            1
        } else {
            -1
        }
    };
    let s: i64 = (1..ell).map(|a| a * chi(a)).sum();
    Fixture {
        name: "stickelberger_m7_quadratic",
        body: json!({
            "args": ["stickelberger", "--input", json!({"m": ell.to_string()}).to_string()],
            "exit": 0,
            "expect": {format!("/real_values/{ell}"): fraction(-s, ell), "/bernoulli_agreement": true},
        }),
    }
}

fn unit_row(k: usize, i: usize, c: &str) -> Vec<Vec<String>> {
    (0..k)
        .map(|j| {
            vec![if j == i {
                c.to_string()
            } else {
                "0".to_string()
            }]
        })
        .collect()
}

/// Free datum over Z/9: H = R^{L+1}, φ_i = div_i = i-th coordinate, one local coordinate.
fn toy_datum(labels: &[u64]) -> Value {
    let k = labels.len() + 1;
    json!({
        "ring": {"p": 3, "n": 2, "invariant_factors": []},
        "labels": labels.iter().map(u64::to_string).collect::<Vec<_>>(),
        "top": {"ring": {"p": 3, "n": 2, "invariant_factors": []}, "gens": k, "relations": []},
        "phi": (0..labels.len()).map(|i| unit_row(k, i, "1")).collect::<Vec<_>>(),
        "div": (0..labels.len()).map(|i| unit_row(k, i, "1")).collect::<Vec<_>>(),
        "local": [unit_row(k, k - 1, "1")],
        "planted": {"ring": {"p": 3, "n": 2, "invariant_factors": []}, "gens": 0, "relations": []},
    })
}

fn stark_fixtures() -> Vec<Fixture> {
    let labels = [7u64, 13];
    let good = toy_datum(&labels);
    let mut bad = good.clone();
    // H(7) replaced by 3·H(7): no longer cut out by div_13
    bad["levels"] = json!([{"labels": ["7"], "generators": [unit_row(3, 0, "3")]}]);
    vec![
        Fixture {
            name: "stark_toy",
            body: json!({"args": ["stark", "--input", good.to_string()], "exit": 0, "expect": {"/passed": true}}),
        },
        Fixture {
            name: "stark_corrupted",
            body: json!({
                "args": ["suite", "stark", "--input", bad.to_string()],
                "exit": 1,
                "expect": {"/passed": false, "/checks/0/id": "datum-valid", "/checks/0/passed": false},
            }),
        },
    ]
}

pub fn fixtures(command: &str) -> Vec<Fixture> {
    let mut out = Vec::new();
    if matches!(command, "ideal" | "suite") {
        out.push(ideal_fixture(
            "ideal_z3_squared_over_z9",
            3,
            2,
            2,
            &[vec![3, 0], vec![0, 3]],
        ));
        out.push(ideal_fixture("ideal_z9_mod_3", 3, 2, 1, &[vec![3]]));
        out.push(ideal_fixture("ideal_free_rank_one", 3, 2, 1, &[]));
    }
    if matches!(command, "stickelberger" | "suite") {
        out.push(theta_fixture(5));
        out.push(quadratic_fixture(7));
        out.push(Fixture {
            name: "stickelberger_m1_rejected",
            body: json!({"args": ["stickelberger", "--input", "{\"m\": \"1\"}"], "exit": 2, "expect": {}}),
        });
    }
    if matches!(command, "stark" | "suite") {
        out.extend(stark_fixtures());
    }
    out
}

pub fn write(dir: &Path, command: &str) -> std::io::Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in fixtures(command) {
        let path = dir.join(format!("{}.json", f.name));
        let text = serde_json::to_string_pretty(&f.body).expect("fixture serializes") + "\n";
        std::fs::write(&path, text)?;
        written.push(path.display().to_string());
    }
    Ok(written)
}
