use std::f64::consts::TAU;

use compop_core::boundary_sets::{Arc, ArcSet};
use compop_core::capacity::{arc_energy_exact, capacity, energy, project_simplex, CapacityOptions, DiscreteMeasure};
use compop_core::constructions::{build_peak_symbol, GrowthFn, Psi};
use compop_core::hs_diag::{hs_hardy, HsOptions};
use compop_core::quadrature::gauss_legendre;
use compop_core::spaces::dirichlet_integral;
use compop_core::{BoundaryGrid, Complex64, PowerSeries, SymbolSpec};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn series(c: &[(f64, f64)]) -> PowerSeries {
    PowerSeries::new(c.iter().map(|(a, b)| Complex64::new(*a, *b)).collect()).unwrap()
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn product_is_truncated_convolution(a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..12),
                                        b in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..12)) {
        let (fa, fb) = (series(&a), series(&b));
        let p = fa.mul(&fb).unwrap();
        let q = fb.mul(&fa).unwrap();
        for n in 0..=p.order() {
            let mut want = Complex64::new(0.0, 0.0);
            for k in 0..=n {
                want += fa.coeff(k) * fb.coeff(n - k);
            }
            prop_assert!((p.coeff(n) - want).norm() < 1e-12);
            // each product is truncated at its left factor's order
            if n <= q.order() {
                prop_assert!((p.coeff(n) - q.coeff(n)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_round_trip(a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..16)) {
        let f = series(&a);
        let g = PowerSeries::from_boundary(&f.boundary_trace(64).unwrap(), f.order()).unwrap();
        for n in 0..=f.order() {
            prop_assert!((f.coeff(n) - g.coeff(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugate_twice_negates(c in prop::collection::vec(-1.0..1.0f64, 1..10), mean in -1.0..1.0f64) {
        // u = mean + Σ c_k cos(kθ); the conjugate of the conjugate is mean - u
        let u = BoundaryGrid::from_real_fn(128, |t| mean + c.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * t).cos()).sum::<f64>()).unwrap();
        let v = u.harmonic_conjugate().unwrap();
        let w = v.harmonic_conjugate().unwrap();
        for (x, y) in u.real_parts().iter().zip(w.real_parts()) {
            prop_assert!((x + y - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn simplex_projection(v in prop::collection::vec(-3.0..3.0f64, 1..40)) {
        let p = project_simplex(&v);
        prop_assert!(p.iter().all(|x| *x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let pp = project_simplex(&p);
        for (a, b) in p.iter().zip(&pp) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        // optimality: v - p is constant on the support and no larger off it
        let shift: Vec<f64> = v.iter().zip(&p).filter(|(_, p)| **p > 0.0).map(|(v, p)| v - p).collect();
        let tau = shift[0];
        prop_assert!(shift.iter().all(|s| (s - tau).abs() < 1e-9));
        prop_assert!(v.iter().zip(&p).filter(|(_, p)| **p == 0.0).all(|(v, _)| *v <= tau + 1e-9));
    }

    #[test]
    fn energy_is_rotation_invariant(atoms in prop::collection::vec(0.0..TAU, 2..30), angle in 0.0..TAU) {
        let mu = DiscreteMeasure::uniform(atoms).unwrap();
        let e0 = energy(&mu, 0.0, 1e-3).unwrap().energy.value();
        let e1 = energy(&mu.rotate(angle), 0.0, 1e-3).unwrap().energy.value();
        prop_assert!((e0 - e1).abs() <= 1e-10 * e0.abs().max(1.0));
    }

    #[test]
    fn dirichlet_of_dilated_monomials(r in 0.05..0.99f64, n in 1usize..60) {
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[n] = Complex64::new(r.powi(n as i32), 0.0);
        let f = PowerSeries::new(c).unwrap();
        let want = n as f64 * r.powi(2 * n as i32);
        prop_assert!((dirichlet_integral(&f) - want).abs() <= 1e-12 * want.max(1e-300));
    }

    #[test]
    fn composition_evaluates_pointwise(a in -0.9..0.9f64, r in 0.1..0.95f64, x in -0.7..0.7f64, y in -0.7..0.7f64) {
        let outer = SymbolSpec::moebius(a);
        let inner = SymbolSpec::Scale { r };
        let comp = SymbolSpec::compose(outer.clone(), inner.clone()).compile().unwrap();
        let z = Complex64::new(x, y);
        let want = outer.compile().unwrap().eval(inner.compile().unwrap().eval(z).unwrap()).unwrap();
        prop_assert!((comp.eval(z).unwrap() - want).norm() < 1e-13);
    }

    #[test]
    fn tubes_grow_with_radius(starts in prop::collection::vec(0.0..TAU, 1..5), t in 0.0..0.5f64) {
        let e = ArcSet::points(&starts);
        prop_assert!(e.tube(t).measure() <= e.tube(t + 0.1).measure() + 1e-12);
        prop_assert!(e.tube(t).measure() <= 2.0 * t * starts.len() as f64 + 1e-12);
    }
}

proptest! {
    #![proptest_config(cfg(12))]

    #[test]
    fn arc_capacity_matches_closed_form(len in 0.2..5.5f64, start in 0.0..TAU) {
        let r = capacity(&ArcSet::new(vec![Arc::new(start, len)]), 0.0, &CapacityOptions { sequence: false, ..CapacityOptions::with_atoms(128) }).unwrap();
        let exact = 1.0 / arc_energy_exact(len);
        // an admissible measure gives a lower bound
        prop_assert!(r.value.value() <= exact * (1.0 + 1e-9));
        prop_assert!(r.value.value() >= 0.98 * exact, "{} vs {}", r.value.value(), exact);
    }

    #[test]
    fn hardy_hs_of_scale(r in 0.05..0.95f64) {
        let rep = hs_hardy(&SymbolSpec::Scale { r }.compile().unwrap(), &HsOptions::default()).unwrap();
        let want = 1.0 / (1.0 - r * r);
        for route in &rep.routes {
            if let Some(v) = route.value {
                prop_assert!((v - want).abs() <= 1e-6 * want, "{}: {v} vs {want}", route.name);
            }
        }
    }

    #[test]
    fn peak_certificate_dominates(pts in prop::collection::btree_set(0usize..64, 1..6)) {
        let angles: Vec<f64> = pts.iter().map(|k| *k as f64 * TAU / 64.0).collect();
        let p = build_peak_symbol(&ArcSet::points(&angles), 1 << 12).unwrap();
        prop_assert!(p.certificate_holds(), "{} < {}", p.certificate, p.measured);
        prop_assert!(p.tau_increasing());
        prop_assert!(p.max_modulus < 1.0);
        prop_assert!((p.g_l2_grid - p.g_l2_exact).abs() <= 2e-2 * p.g_l2_exact);
    }

    #[test]
    fn psi_is_nonincreasing(p in 0.2..3.0f64) {
        let psi = Psi::build(&GrowthFn::Power { p }).unwrap();
        prop_assert!(psi.values.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(psi.knots.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let (x, w) = gauss_legendre(12);
    for deg in 0..24 {
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
        let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
        assert!((got - want).abs() < 1e-13, "degree {deg}");
    }
}
