mod common;

use std::f64::consts::PI;

use common::*;
use fuchs_core::linalg::{eigenvalues, expm};
use fuchs_core::verify::{
    conjugacy_check, conjugacy_error, diagonal_fundamental, integrate_linear, monodromy,
    obstruction_integral, Encircled, FlowOptions, PathSpec, VerifyError,
};
use fuchs_core::{compute_correction, CMatrix, FuchsianSystem, VectorSeries, C64};
use rand::Rng;

fn scalar(v: C64) -> CMatrix {
    CMatrix::from_element(1, 1, v)
}

fn cis(z: C64) -> C64 {
    (C64::new(0.0, 2.0 * PI) * z).exp()
}

fn mat_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn scalar_monodromy() {
    let mut r = rng(21);
    for _ in 0..5 {
        let a = random_complex(&mut r, 0.9);
        let b = random_complex(&mut r, 0.9);
        let (ma, mb) = (scalar(a), scalar(b));
        let plus = monodromy(&ma, &mb, Encircled::PlusOne, 1e-12).unwrap()[(0, 0)];
        let minus = monodromy(&ma, &mb, Encircled::MinusOne, 1e-12).unwrap()[(0, 0)];
        let both = monodromy(&ma, &mb, Encircled::Both, 1e-12).unwrap()[(0, 0)];
        assert!((plus - cis(a)).norm() <= 1e-8 * cis(a).norm());
        assert!((minus - cis(b)).norm() <= 1e-8 * cis(b).norm());
        assert!((both - cis(a + b)).norm() <= 1e-8 * cis(a + b).norm());
    }
}

#[test]
fn trivial_loop_is_identity() {
    let mut r = rng(5);
    let (a, b) = (random_matrix(&mut r, 2, 0.8), random_matrix(&mut r, 2, 0.8));
    let path = PathSpec::circle(c(0.0), 0.5, true);
    let g = integrate_linear(&a, &b, &path, 1e-12)
        .unwrap()
        .monodromy
        .unwrap();
    assert!(mat_distance(&g, &CMatrix::identity(2, 2)) <= 1e-8);
}

#[test]
fn loop_composition() {
    // The loop around both points is the loop around -1 followed by the
    // loop around +1.
    let mut r = rng(9);
    for _ in 0..3 {
        let (a, b) = (random_matrix(&mut r, 2, 0.6), random_matrix(&mut r, 2, 0.6));
        let plus = monodromy(&a, &b, Encircled::PlusOne, 1e-12).unwrap();
        let minus = monodromy(&a, &b, Encircled::MinusOne, 1e-12).unwrap();
        let both = monodromy(&a, &b, Encircled::Both, 1e-12).unwrap();
        assert!(mat_distance(&both, &(&plus * &minus)) <= 1e-6);
    }
}

#[test]
fn local_monodromy_spectrum() {
    let mut r = rng(13);
    for _ in 0..3 {
        let (a, b) = (random_matrix(&mut r, 2, 0.4), random_matrix(&mut r, 2, 0.4));
        let plus = monodromy(&a, &b, Encircled::PlusOne, 1e-12).unwrap();
        let local = expm(&(&a * C64::new(0.0, 2.0 * PI)));
        let got = eigenvalues(&plus).unwrap();
        for z in eigenvalues(&local).unwrap() {
            let nearest = got
                .iter()
                .map(|g| (g - z).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest <= 1e-7, "{z} not in {got:?}");
        }
    }
}

#[test]
fn diagonal_transport_matches_closed_form() {
    let a = [C64::new(0.3, 0.2), c(0.7)];
    let b = [c(0.45), C64::new(0.6, -0.1)];
    let ma = CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&a));
    let mb = CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&b));
    for end in [-0.85, -0.3, 0.5, 0.9] {
        let path = PathSpec::polyline(&[c(0.0), c(end)]).with_clearance(0.05);
        let y = integrate_linear(&ma, &mb, &path, 1e-12).unwrap().y;
        let exact = diagonal_fundamental(&a, &b, end);
        for i in 0..2 {
            assert!((y[(i, i)] - exact[i]).norm() <= 1e-9, "end {end}");
        }
    }
}

#[test]
fn riccati_obstruction() {
    let sys = riccati(5);
    let out = compute_correction(&sys).unwrap();
    let zero = VectorSeries::zero(1, 5);
    for cc in [0.5, 1.0, 2.0] {
        let cv = [c(cc)];
        let corrected = obstruction_integral(&sys, &out.phi, &out.h, 2, &cv, 1e-10).unwrap();
        assert!(max_abs(&corrected.value) <= 1e-6);
        let raw = obstruction_integral(&sys, &zero, &zero, 2, &cv, 1e-10).unwrap();
        assert!(max_abs(&raw.value) >= 1e-3);
        assert!((raw.value[0] - c(-cc * cc * PI / 2.0)).norm() <= 1e-8);
        for n in 3..=4 {
            let r = obstruction_integral(&sys, &out.phi, &out.h, n, &cv, 1e-10).unwrap();
            assert!(max_abs(&r.value) <= 1e-6, "order {n}");
        }
    }
}

#[test]
fn diagonal_obstruction_vanishes_after_correction() {
    let mut r = rng(17);
    let mut checked = 0;
    while checked < 4 {
        let a: Vec<C64> = (0..2)
            .map(|_| C64::new(r.gen_range(0.5..0.9), r.gen_range(-0.2..0.2)))
            .collect();
        let b: Vec<C64> = (0..2)
            .map(|_| C64::new(r.gen_range(0.5..0.9), r.gen_range(-0.2..0.2)))
            .collect();
        let ma = CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&a));
        let mb = CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&b));
        let f = random_series(&mut r, 2, 3, 2);
        let sys = FuchsianSystem::new(ma, mb, f).unwrap();
        let Ok(out) = compute_correction(&sys) else {
            continue;
        };
        let zero = VectorSeries::zero(2, 3);
        let cv = random_vector(&mut r, 2, 1.0);
        for n in 2..=3 {
            let corrected = obstruction_integral(&sys, &out.phi, &out.h, n, &cv, 1e-10).unwrap();
            assert!(max_abs(&corrected.value) <= 1e-6, "order {n}");
        }
        let raw = obstruction_integral(&sys, &zero, &zero, 2, &cv, 1e-10).unwrap();
        assert!(max_abs(&raw.value) >= 1e-3);
        checked += 1;
    }
}

#[test]
fn obstruction_refuses_inadmissible_exponents() {
    let sys =
        FuchsianSystem::new(scalar(c(-0.5)), scalar(c(-0.5)), riccati(3).f().clone()).unwrap();
    let zero = VectorSeries::zero(1, 3);
    let r = obstruction_integral(&sys, &zero, &zero, 2, &[c(1.0)], 1e-8);
    assert!(matches!(r, Err(VerifyError::NotIntegrable(_))));
}

#[test]
fn conjugacy_error_scales_with_order() {
    let sys = riccati(5);
    let out = compute_correction(&sys).unwrap();
    let path = PathSpec::polyline(&[c(0.0), c(0.5)]);
    let options = FlowOptions::default();
    let err = |w: f64| {
        conjugacy_check(&sys, &out, &path, &[c(w)], &options)
            .unwrap()
            .error
    };
    let ratio = err(1e-2) / err(5e-3);
    assert!((32.0..=128.0).contains(&ratio), "ratio {ratio}");
    // the uncorrected flow only matches to second order
    let raw = |w: f64| {
        conjugacy_error(&sys, &out.h, &path, &[c(w)], &options)
            .unwrap()
            .error
    };
    assert!(raw(1e-2) / raw(5e-3) < 16.0);
}
