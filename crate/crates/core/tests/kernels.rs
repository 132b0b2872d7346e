//! Public-API checks against values frozen from the brute-force evaluators
//! (fixed-grid Romberg and composite Gauss-Legendre, run once offline).

use vacuum_persistence::free_space::{sigma_ren, sigma_ren_total};
use vacuum_persistence::friction::friction_rate;
use vacuum_persistence::plate::{coeff_a_parallel, coeff_a_perp, PlateResponse};
use vacuum_persistence::{AtomParams64, FrictionQuery64, MirrorParams64};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn sigma_against_frozen_grid_values() {
    for (x, frozen, tol) in [
        (0.5, 1.687466287517112e-3, 1e-6),
        (2.0, 4.156329485336009e-1, 1e-5),
        (10.0, -4.308723970241846e2, 1e-5),
    ] {
        let total = sigma_ren_total(x, 1e-12).unwrap().value;
        assert!(rel(total, frozen) < tol, "x={x}: {total}");
        let b = sigma_ren(x, 1e-12).unwrap();
        assert!(rel(b.total, frozen) < tol);
    }
}

#[test]
fn friction_against_frozen_momentum_grid() {
    let q = FrictionQuery64::new(
        AtomParams64::new(1.0, 1.0).unwrap(),
        MirrorParams64::new(1.0, 1.0, 0.0).unwrap(),
        1.0,
        0.5,
    )
    .unwrap();
    let r = friction_rate(&q, 1e-12).unwrap().value;
    assert!(rel(r, 9.325643888128114e-7) < 1e-8, "{r}");
}

#[test]
fn a_coefficients_against_frozen_values() {
    let par = coeff_a_parallel(1e-2, 2.0, 1.0, 1e-12).unwrap().value;
    let perp = coeff_a_perp(1e-2, 2.0, 1.0, 1e-12).unwrap().value;
    assert!(rel(par, -1.887020540512316) < 1e-6, "{par}");
    assert!(rel(perp, -1.832877657872632) < 1e-6, "{perp}");
}

#[test]
fn plate_kernel_against_unreduced_form() {
    let atom = AtomParams64::new(1.0, 1.0).unwrap();
    let mirror = MirrorParams64::new(1.0, 2.0, 0.01).unwrap();
    let r = PlateResponse::new(&atom, &mirror, 1.0, 1e-12).unwrap();
    let k = r.m_parallel(2.5).unwrap();
    assert!(rel(k.total, -1.9228266679370283e-2) < 1e-2, "{}", k.total);
    assert!(rel(k.threshold, -1.9221274148931614e-2) < 1e-2);
}
