//! Test oracles. Nothing here calls into the library's arithmetic.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Coeffs = [i64; 5];

fn md(a: i128, q: i128) -> i128 {
    a.rem_euclid(q)
}

fn pow_mod(mut b: i128, mut e: i128, q: i128) -> i128 {
    let mut r = 1i128;
    b = md(b, q);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    r
}

/// Legendre symbol by Euler's criterion.
pub fn legendre(a: i128, q: i128) -> i128 {
    let a = md(a, q);
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (q - 1) / 2, q) == 1 {
        1
    } else {
        -1
    }
}

/// Projective points counted by solving the quadratic in y for each x.
/// For odd q, y^2 + (a1 x + a3) y = f(x) has 1 + (D/q) solutions with
/// D = (a1 x + a3)^2 + 4 f(x).
pub fn count_euler(a: &Coeffs, q: i64) -> i64 {
    let q = q as i128;
    let [a1, a2, a3, a4, a6] = a.map(|v| md(v as i128, q));
    let mut n = 1i128;
    for x in 0..q {
        let l = md(a1 * x + a3, q);
        let f = md(md(md(x * x, q) * x, q) + a2 * md(x * x, q) + a4 * x + a6, q);
        n += 1 + legendre(l * l + 4 * f, q);
    }
    n as i64
}

/// Projective points counted over all (x, y); any q.
pub fn count_brute(a: &Coeffs, q: i64) -> i64 {
    let q = q as i128;
    let [a1, a2, a3, a4, a6] = a.map(|v| md(v as i128, q));
    let mut n = 1i128;
    for x in 0..q {
        let rhs = md(x * x * x + a2 * x * x + a4 * x + a6, q);
        for y in 0..q {
            if md(y * y + a1 * x * y + a3 * y, q) == rhs {
                n += 1;
            }
        }
    }
    n as i64
}

/// Discriminant in i128; fine for the small coefficients used in tests.
pub fn discriminant(a: &Coeffs) -> i128 {
    let [a1, a2, a3, a4, a6] = a.map(|v| v as i128);
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
}

pub fn c4(a: &Coeffs) -> i128 {
    let [a1, a2, a3, a4, _] = a.map(|v| v as i128);
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    b2 * b2 - 24 * b4
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn odd_primes(lo: i64, hi: i64) -> Vec<i64> {
    (lo.max(3)..hi).filter(|&n| is_prime(n)).collect()
}

pub fn coeff_string(a: &Coeffs) -> String {
    a.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Curves with known torsion structure, written as "Z/n", "Z/2xZ/2m" or "trivial".
pub const KNOWN: &[(&str, Coeffs, &str)] = &[
    ("11a1", [0, -1, 1, -10, -20], "Z/5"),
    ("11a2", [0, -1, 1, -7820, -263580], "trivial"),
    ("11a3", [0, -1, 1, 0, 0], "Z/5"),
    ("14a1", [1, 0, 1, 4, -6], "Z/6"),
    ("15a1", [1, 1, 1, -10, -10], "Z/2xZ/4"),
    ("15a4", [1, 1, 1, 35, -28], "Z/8"),
    ("17a1", [1, -1, 1, -1, -14], "Z/4"),
    ("19a1", [0, 1, 1, -9, -15], "Z/3"),
    ("20a1", [0, 1, 0, 4, 4], "Z/6"),
    ("21a1", [1, 0, 0, -4, -1], "Z/2xZ/4"),
    ("26b1", [1, -1, 1, -3, 3], "Z/7"),
    ("30a2", [1, 0, 1, -19, 26], "Z/2xZ/6"),
    ("32a2", [0, 0, 0, -1, 0], "Z/2xZ/2"),
    ("36a1", [0, 0, 0, 0, 1], "Z/6"),
    ("37a1", [0, 0, 1, -1, 0], "trivial"),
    ("54b3", [1, -1, 1, -14, 29], "Z/9"),
    ("66c1", [1, 0, 0, -45, 81], "Z/10"),
    ("90c3", [1, -1, 1, -122, 1721], "Z/12"),
    ("210e2", [1, 0, 0, -1070, 7812], "Z/2xZ/8"),
    ("x3+2", [0, 0, 0, 0, 2], "trivial"),
];

/// Curves with many supersingular primes: CM by Z[i] and Z[zeta_3].
pub const CM: &[(&str, Coeffs)] = &[
    ("x3-x", [0, 0, 0, -1, 0]),
    ("x3-4x", [0, 0, 0, -4, 0]),
    ("x3+4x", [0, 0, 0, 4, 0]),
    ("x3+x", [0, 0, 0, 1, 0]),
    ("x3-25x", [0, 0, 0, -25, 0]),
    ("x3+1", [0, 0, 0, 0, 1]),
    ("x3+2", [0, 0, 0, 0, 2]),
    ("x3-432", [0, 0, 0, 0, -432]),
    ("x3+16", [0, 0, 0, 0, 16]),
    ("27a1", [0, 0, 1, 0, -7]),
];

/// Deterministic random nonsingular curves with coefficients in [-bound, bound].
pub fn random_curves(seed: u64, count: usize, bound: i64) -> Vec<Coeffs> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a: Coeffs = [
            rng.gen_range(0..=1),
            rng.gen_range(-1..=1),
            rng.gen_range(0..=1),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
        ];
        if discriminant(&a) != 0 {
            out.push(a);
        }
    }
    out
}

/// Everything the corpus-wide checks iterate over.
pub fn corpus() -> Vec<(String, Coeffs)> {
    let mut v: Vec<(String, Coeffs)> =
        KNOWN.iter().map(|(l, a, _)| (l.to_string(), *a)).collect();
    v.extend(CM.iter().map(|(l, a)| (l.to_string(), *a)));
    for (i, a) in random_curves(0x5eed, 60, 30).into_iter().enumerate() {
        v.push((format!("r{i}"), a));
    }
    v.sort_by(|x, y| x.0.cmp(&y.0));
    v.dedup_by(|x, y| x.1 == y.1);
    v
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
