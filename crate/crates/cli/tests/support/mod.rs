//! Fixtures and reference implementations shared by the integration tests.
//! Nothing here calls into the ranking code it is used to check.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn annotated_dir() -> PathBuf {
    fixtures().join("annotated")
}

pub fn models_dir() -> PathBuf {
    fixtures().join("models")
}

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_revscope"))
}

/// `x = mantissa * 2^exponent`, exactly.
fn decompose(x: f64) -> (i64, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (mantissa, exponent) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1i64 << 52), exp_bits - 1075)
    };
    (sign * mantissa, exponent)
}

/// Exact sum of products as `value * 2^exponent`.
fn exact_dot(a: &[f64], b: &[f64]) -> (BigInt, i32) {
    let terms: Vec<(BigInt, i32)> = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let (mx, ex) = decompose(*x);
            let (my, ey) = decompose(*y);
            (BigInt::from(mx) * BigInt::from(my), ex + ey)
        })
        .collect();
    let min_exp = terms.iter().map(|t| t.1).min().unwrap_or(0);
    let sum = terms
        .into_iter()
        .fold(BigInt::zero(), |acc, (m, e)| acc + (m << ((e - min_exp) as usize)));
    (sum, min_exp)
}

fn scale(x: f64, exp: i32) -> f64 {
    let mut x = x;
    let mut e = exp;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

/// Cosine from exact integer dot products; the only rounding is in the
/// final quotient (about 100 bits) and one square root.
pub fn reference_cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let (dot, e_dot) = exact_dot(a, b);
    let (na, e_a) = exact_dot(a, a);
    let (nb, e_b) = exact_dot(b, b);
    if na.is_zero() || nb.is_zero() {
        return None;
    }
    if dot.is_zero() {
        return Some(0.0);
    }
    let negative = dot.is_negative();
    let mut num = &dot * &dot;
    let mut den = na * nb;
    let shift = 100 + den.bits() as i64 - num.bits() as i64;
    if shift >= 0 {
        num <<= shift as usize;
    } else {
        den <<= (-shift) as usize;
    }
    let quotient = (num / den).to_f64()?;
    let ratio = scale(quotient, 2 * e_dot - e_a - e_b - shift as i32);
    let c = ratio.sqrt();
    Some(if negative { -c } else { c })
}

/// Brute-force fractional ranks: smaller values plus the midpoint of the
/// tie block.
pub fn oracle_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|a| {
            let less = v.iter().filter(|b| *b < a).count() as f64;
            let equal = v.iter().filter(|b| *b == a).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Pearson correlation of brute-force ranks, `None` when undefined.
pub fn oracle_spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    let (rx, ry) = (oracle_ranks(x), oracle_ranks(y));
    let n = rx.len() as f64;
    let (sx, sy): (f64, f64) = (rx.iter().sum(), ry.iter().sum());
    let sxy: f64 = rx.iter().zip(&ry).map(|(a, b)| a * b).sum();
    let sxx: f64 = rx.iter().map(|a| a * a).sum();
    let syy: f64 = ry.iter().map(|b| b * b).sum();
    let vx = n * sxx - sx * sx;
    let vy = n * syy - sy * sy;
    (vx > 0.0 && vy > 0.0).then(|| (n * sxy - sx * sy) / (vx.sqrt() * vy.sqrt()))
}

pub fn bundled_stopwords() -> BTreeSet<String> {
    include_str!("../../../core/data/stopwords.txt")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

/// Reference text handling for fixtures made of plain lowercase-able ASCII
/// words with no inflections: split on non-letters, drop stop words, emit
/// unigrams then bigrams.
pub fn oracle_ngrams(text: &str, stop: &BTreeSet<String>) -> Vec<String> {
    let lower = text.to_lowercase();
    let words: Vec<&str> = lower
        .split(|c: char| !c.is_ascii_lowercase())
        .filter(|w| !w.is_empty() && !stop.contains(*w))
        .collect();
    let mut out: Vec<String> = words.iter().map(|w| w.to_string()).collect();
    out.extend(words.windows(2).map(|w| format!("{} {}", w[0], w[1])));
    out
}

pub fn parse_model(text: &str) -> BTreeMap<String, Vec<f64>> {
    let mut lines = text.lines().peekable();
    if let Some(first) = lines.peek() {
        if first.split_whitespace().count() == 2 {
            lines.next();
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let mut f = l.split_whitespace();
            let token = f.next().unwrap().to_string();
            (token, f.map(|x| x.parse().unwrap()).collect())
        })
        .collect()
}

/// Mean of per-n-gram vectors; phrase entry first, then constituent mean.
pub fn oracle_vector(model: &BTreeMap<String, Vec<f64>>, ngrams: &[String]) -> Option<Vec<f64>> {
    let dim = model.values().next()?.len();
    let mut per = Vec::new();
    for g in ngrams {
        if let Some(v) = model.get(&g.replace(' ', "_")) {
            per.push(v.clone());
            continue;
        }
        let hits: Vec<&Vec<f64>> = g.split(' ').filter_map(|w| model.get(w)).collect();
        if !hits.is_empty() {
            per.push(
                (0..dim)
                    .map(|i| hits.iter().map(|h| h[i]).sum::<f64>() / hits.len() as f64)
                    .collect(),
            );
        }
    }
    if per.is_empty() {
        return None;
    }
    Some(
        (0..dim)
            .map(|i| per.iter().map(|p| p[i]).sum::<f64>() / per.len() as f64)
            .collect(),
    )
}

/// `(doc_id, similarity)` sorted by `(1 - similarity, doc_id)`.
pub fn oracle_rank(query: &[f64], docs: &[(String, Vec<f64>)]) -> Vec<(String, f64)> {
    let mut scored: Vec<(String, f64)> = docs
        .iter()
        .map(|(id, v)| (id.clone(), reference_cosine(query, v).unwrap().clamp(-1.0, 1.0)))
        .collect();
    scored.sort_by(|a, b| (1.0 - a.1).total_cmp(&(1.0 - b.1)).then_with(|| a.0.cmp(&b.0)));
    scored
}

pub fn read_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}
