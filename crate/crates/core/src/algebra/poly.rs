//! Dense univariate polynomials in `x`, ascending coefficients.

use super::C64;

pub fn is_zero(c: C64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

pub fn trim(p: &mut Vec<C64>) {
    while p.last().is_some_and(|c| is_zero(*c)) {
        p.pop();
    }
}

pub fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if is_zero(*ai) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    trim(&mut out);
    out
}

pub fn add_assign(acc: &mut Vec<C64>, other: &[C64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), C64::new(0.0, 0.0));
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
    trim(acc);
}

pub fn eval(p: &[C64], x: C64) -> C64 {
    p.iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// Evaluates a polynomial with vector coefficients.
pub fn eval_vec(p: &[Vec<C64>], x: C64) -> Vec<C64> {
    let dim = p.first().map_or(0, Vec::len);
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for coeff in p.iter().rev() {
        for (o, c) in out.iter_mut().zip(coeff) {
            *o = *o * x + c;
        }
    }
    out
}

/// Evaluates a vector-coefficient polynomial and its `x`-derivative.
pub fn eval_vec_with_derivative(p: &[Vec<C64>], x: C64) -> (Vec<C64>, Vec<C64>) {
    let dim = p.first().map_or(0, Vec::len);
    let mut value = vec![C64::new(0.0, 0.0); dim];
    let mut deriv = vec![C64::new(0.0, 0.0); dim];
    for coeff in p.iter().rev() {
        for ((v, d), c) in value.iter_mut().zip(deriv.iter_mut()).zip(coeff) {
            *d = *d * x + *v;
            *v = *v * x + c;
        }
    }
    (value, deriv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn product_and_eval() {
        let p = mul(&[c(1.0), c(1.0)], &[c(-1.0), c(1.0)]);
        assert_eq!(p, vec![c(-1.0), c(0.0), c(1.0)]);
        assert_eq!(eval(&p, c(3.0)), c(8.0));
        assert!(mul(&[], &p).is_empty());
    }

    #[test]
    fn vector_derivative() {
        let p = vec![vec![c(1.0)], vec![c(2.0)], vec![c(3.0)]];
        let (v, d) = eval_vec_with_derivative(&p, c(2.0));
        assert_eq!(v, vec![c(17.0)]);
        assert_eq!(d, vec![c(14.0)]);
    }
}
