//! Random systems and independent reference computations shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fuchs_core::{
    diagnose, enumerate_multi_indices, CMatrix, FuchsianSystem, HomVecPoly, MultiIndex,
    VectorSeries, XPoly, C64,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn random_complex(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| random_complex(rng, scale))
}

pub fn random_vector(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<C64> {
    (0..d).map(|_| random_complex(rng, scale)).collect()
}

pub fn random_homvec(rng: &mut ChaCha8Rng, d: usize, degree: usize) -> HomVecPoly {
    let mut p = HomVecPoly::zero(d, degree);
    for m in enumerate_multi_indices(d, degree) {
        if rng.gen_bool(0.7) {
            p.add_term(&m, &random_vector(rng, d, 1.0));
        }
    }
    p
}

pub fn random_xpoly(rng: &mut ChaCha8Rng, d: usize, degree: usize, x_degree: usize) -> XPoly {
    let coeffs = (0..=x_degree)
        .map(|_| random_homvec(rng, d, degree))
        .collect();
    XPoly::from_coeffs(d, degree, coeffs)
}

pub fn random_series(
    rng: &mut ChaCha8Rng,
    d: usize,
    order: usize,
    x_degree: usize,
) -> VectorSeries {
    let mut s = VectorSeries::zero(d, order);
    for n in 2..=order {
        let xd = rng.gen_range(0..=x_degree);
        s.set_part(random_xpoly(rng, d, n, xd));
    }
    s
}

/// Random system with `d <= max_d`, order `<= max_order`, `deg_x f <= max_x`
/// and resonance margin at least `margin`.
pub fn random_system(
    rng: &mut ChaCha8Rng,
    max_d: usize,
    max_order: usize,
    max_x: usize,
    margin: f64,
) -> FuchsianSystem {
    let d = rng.gen_range(1..=max_d);
    let order = rng.gen_range(2..=max_order);
    let (a, b) = random_linear_part(rng, d, order, margin);
    let f = random_series(rng, d, order, max_x);
    FuchsianSystem::new(a, b, f).unwrap()
}

/// `(A, B)` of size `d` whose resonance margin through `order` is at least
/// `margin`.
pub fn random_linear_part(
    rng: &mut ChaCha8Rng,
    d: usize,
    order: usize,
    margin: f64,
) -> (CMatrix, CMatrix) {
    loop {
        let a = random_matrix(rng, d, 0.6);
        let b = random_matrix(rng, d, 0.6);
        let report = diagnose(&a, &b, order, 20);
        if report.resonance_margin.is_some_and(|m| m >= margin) {
            return (a, b);
        }
    }
}

/// Dense scalar polynomial in `(x, w)` keyed by `(x power, w exponents)`.
pub type Dense = BTreeMap<(u32, Vec<u32>), C64>;

fn dense_mul(p: &Dense, q: &Dense) -> Dense {
    let mut out = Dense::new();
    for ((xp, wp), cp) in p {
        for ((xq, wq), cq) in q {
            let key = (xp + xq, wp.iter().zip(wq).map(|(a, b)| a + b).collect());
            *out.entry(key).or_insert(C64::new(0.0, 0.0)) += cp * cq;
        }
    }
    out
}

fn dense_add(p: &mut Dense, q: &Dense) {
    for (k, v) in q {
        *p.entry(k.clone()).or_insert(C64::new(0.0, 0.0)) += v;
    }
}

fn dense_component(terms: &[(MultiIndex, Vec<Vec<C64>>)], i: usize) -> Dense {
    let mut out = Dense::new();
    for (m, per_power) in terms {
        for (xp, coeffs) in per_power.iter().enumerate() {
            if coeffs[i] != C64::new(0.0, 0.0) {
                out.insert((xp as u32, m.entries().to_vec()), coeffs[i]);
            }
        }
    }
    out
}

/// Degree-`n` part of `f(x, w + h(x, w))` by full expansion, no truncation.
pub fn substitute_by_expansion(f: &VectorSeries, h: &VectorSeries, n: usize) -> Vec<Dense> {
    let d = f.dim();
    let h_low = {
        let mut t = VectorSeries::zero(d, h.order());
        for j in 2..n.min(h.order() + 1) {
            t.set_part(h.part(j));
        }
        t.terms()
    };
    let f_terms = f.terms();
    let u: Vec<Dense> = (0..d)
        .map(|k| {
            let mut e = vec![0u32; d];
            e[k] = 1;
            let mut comp = Dense::new();
            comp.insert((0, e), c(1.0));
            dense_add(&mut comp, &dense_component(&h_low, k));
            comp
        })
        .collect();
    (0..d)
        .map(|i| {
            let mut total = Dense::new();
            for ((xp, wp), coeff) in dense_component(&f_terms, i) {
                let mut prod = Dense::new();
                prod.insert((xp, vec![0; d]), coeff);
                for (k, &e) in wp.iter().enumerate() {
                    for _ in 0..e {
                        prod = dense_mul(&prod, &u[k]);
                    }
                }
                dense_add(&mut total, &prod);
            }
            total
                .into_iter()
                .filter(|((_, w), _)| w.iter().sum::<u32>() as usize == n)
                .collect()
        })
        .collect()
}

/// Largest coefficient difference between an `XPoly` and dense components.
pub fn dense_distance(p: &XPoly, dense: &[Dense]) -> f64 {
    let mut ours: Vec<Dense> = vec![Dense::new(); p.dim()];
    for m in p.support() {
        for (xp, coeffs) in p.term(&m).iter().enumerate() {
            for (i, v) in coeffs.iter().enumerate() {
                ours[i].insert((xp as u32, m.entries().to_vec()), *v);
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (a, b) in ours.iter().zip(dense) {
        for (k, v) in a {
            worst = worst.max((v - b.get(k).copied().unwrap_or_default()).norm());
        }
        for (k, v) in b {
            worst = worst.max((v - a.get(k).copied().unwrap_or_default()).norm());
        }
    }
    worst
}

/// `M(x) = A/(x - 1) + B/(x + 1)` evaluated directly.
pub fn m_at(a: &CMatrix, b: &CMatrix, x: C64) -> CMatrix {
    a / (x - c(1.0)) + b / (x + c(1.0))
}

pub fn mat_vec(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|k| m[(i, k)] * v[k]).sum())
        .collect()
}

/// Exact Jacobian-vector product `dp(w) v` of a homogeneous polynomial,
/// from monomial derivatives.
pub fn jacobian_apply(p: &HomVecPoly, w: &[C64], v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); p.dim()];
    for (m, coeffs) in p.terms() {
        let mut directional = C64::new(0.0, 0.0);
        for k in 0..p.dim() {
            let e = m.get(k);
            if e == 0 {
                continue;
            }
            let mut term = c(e as f64) * v[k];
            for (l, wl) in w.iter().enumerate() {
                let power = if l == k { e - 1 } else { m.get(l) };
                term *= wl.powu(power);
            }
            directional += term;
        }
        for (o, cf) in out.iter_mut().zip(coeffs) {
            *o += cf * directional;
        }
    }
    out
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Riccati example `u' = (1/(x-1) + 1/(x+1)) u/2 + (x^2 + x) u^2/(x^2 - 1)`.
pub fn riccati(order: usize) -> FuchsianSystem {
    let half = CMatrix::from_element(1, 1, c(0.5));
    let mut f = VectorSeries::zero(1, order);
    f.add_term(
        &MultiIndex::new(vec![2]),
        &[vec![c(0.0)], vec![c(1.0)], vec![c(1.0)]],
    )
    .unwrap();
    FuchsianSystem::new(half.clone(), half, f).unwrap()
}
