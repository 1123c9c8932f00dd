use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::builtin::{conformal_metric, flat_metric, EinsteinBase};
use crate::chart::{Chart, MetricField, Sym2Field};
use crate::curvature::ricci_jet;
use crate::flows::{
    exact_einstein_family, warped_sphere_family, wrong_sphere_family, ClosedFormFamily, ScaleLaw,
};
use crate::jet::Jet;

fn family(base: EinsteinBase, map: FlowMap) -> MetricFamily {
    exact_einstein_family(base, map).unwrap()
}

fn quarter() -> Point {
    Point::new(vec![PI / 4.0, 1.0])
}

#[test]
fn flat_torus_residual_is_exactly_zero() {
    let fam = family(EinsteinBase::FlatTorus(2), FlowMap::Ricci);
    for t in [0.1, 0.5, 3.0] {
        let r = theorem_a_residual(&fam, FlowMap::Ricci, t, &Point::new(vec![0.3, 0.7]), DEFAULT_DT).unwrap();
        assert_eq!(r.report.residual_max, 0.0);
        assert_eq!(r.vector_form.residual_max, 0.0);
    }
}

#[test]
fn unit_sphere_family_satisfies_the_identity() {
    let fam = family(EinsteinBase::Sphere(2), FlowMap::Ricci);
    let r = theorem_a_residual(&fam, FlowMap::Ricci, 0.2, &quarter(), 1e-4).unwrap();
    assert!(r.report.residual_max <= 1e-6, "{}", r.report.residual_max);
    assert_eq!(r.report.dt_used, Some(1e-4));
    // P = g⁻¹ Ric = I/(1+t), so PΓ and Γ̃ are both Γ/(1.2)
    assert_relative_eq!(r.terms.tilde_gamma[(0, 1, 1)], -0.5 / 1.2, epsilon = 1e-12);
    assert_relative_eq!(r.terms.p_gamma[(0, 1, 1)], -0.5 / 1.2, epsilon = 1e-12);
}

#[test]
fn residual_near_collapse_is_a_domain_error() {
    let fam = family(EinsteinBase::Sphere(2), FlowMap::MinusTwoRicci);
    assert!(matches!(
        theorem_a_residual(&fam, FlowMap::MinusTwoRicci, 0.5 - 5e-5, &quarter(), 1e-4),
        Err(GeometryError::OutsideInterval { .. })
    ));
}

#[test]
fn uniformly_rescaled_wrong_family_is_invisible_to_the_coefficient_identity() {
    // g_t = (1+2t) g_0: Ric = g_0 = λ g_t, so Γ̃ = λΓ = PΓ and ∂_tΓ = 0
    let fam = wrong_sphere_family();
    let r = theorem_a_residual(&fam, FlowMap::Ricci, 0.0, &quarter(), 1e-4).unwrap();
    assert!(r.report.residual_max < 1e-9);
    let s = fam.query(0.0, &quarter()).unwrap();
    let rhs = flow_rhs(FlowMap::Ricci, &s.metric).unwrap();
    assert!((s.dt_metric.values() - rhs.values()).abs().max() >= 0.1);
}

#[test]
fn warped_family_is_detected() {
    // ∂_t Γ^θ_φφ = −sinθ cosθ = −½ while Γ̃ − PΓ = 0
    let r = theorem_a_residual(&warped_sphere_family(), FlowMap::Ricci, 0.0, &quarter(), 1e-4).unwrap();
    assert_relative_eq!(r.report.residual_max, 0.5, epsilon = 1e-8);
}

#[test]
fn vector_form_agrees_with_coefficients() {
    for fam in [
        family(EinsteinBase::Sphere(3), FlowMap::Ricci),
        family(EinsteinBase::Hyperbolic(2), FlowMap::MinusTwoRicci),
        warped_sphere_family(),
    ] {
        for p in fam.chart().sample_points(4).iter().take(5) {
            let r = theorem_a_residual(&fam, fam.map(), 0.1, p, 1e-4).unwrap();
            assert!(r.vector_form.residual_rel <= 1e-12, "{} {}", fam.id(), r.vector_form.residual_rel);
        }
    }
}

#[test]
fn eq2_examples() {
    let flat = family(EinsteinBase::FlatTorus(2), FlowMap::Ricci);
    let probes = probe_fields(2, 9, 3);
    let p = Point::new(vec![0.2, 0.6]);
    assert_eq!(eq2_residual(&flat, FlowMap::Ricci, 0.3, &p, 1e-4, &probes[0], &probes[1], &probes[2]).unwrap(), 0.0);

    let sphere = family(EinsteinBase::Sphere(2), FlowMap::Ricci);
    let (dtheta, dphi) = (VectorField::coordinate(2, 0), VectorField::coordinate(2, 1));
    let r = eq2_residual(&sphere, FlowMap::Ricci, 0.1, &quarter(), 1e-4, &dtheta, &dphi, &dphi).unwrap();
    assert!(r <= 1e-6, "{r}");
    for p in sphere.chart().sample_points(2) {
        let r = eq2_residual(&sphere, FlowMap::Ricci, 0.1, &p, 1e-4, &probes[0], &probes[1], &probes[2]).unwrap();
        assert!(r <= 1e-6, "{r}");
    }
}

#[test]
fn variation_examples() {
    let flat = family(EinsteinBase::FlatTorus(2), FlowMap::Ricci);
    let v = variation_formula_residual(&flat, FlowMap::Ricci, 0.2, &Point::new(vec![0.5, 0.5]), 1e-4).unwrap();
    assert_eq!(v.differenced.residual_max, 0.0);
    assert_eq!(v.algebraic.residual_max, 0.0);

    let sphere = family(EinsteinBase::Sphere(2), FlowMap::Ricci);
    let v = variation_formula_residual(&sphere, FlowMap::Ricci, 0.2, &quarter(), 1e-4).unwrap();
    assert!(v.differenced.residual_max <= 1e-6);

    let hyp = family(EinsteinBase::Hyperbolic(2), FlowMap::Ricci);
    for p in hyp.chart().sample_points(0) {
        let v = variation_formula_residual(&hyp, FlowMap::Ricci, 0.3, &p, 1e-4).unwrap();
        assert!(v.algebraic.residual_max <= 1e-10, "{}", v.algebraic.residual_max);
    }
}

#[test]
fn algebraic_identity_holds_for_arbitrary_tensors() {
    let m = conformal_metric(2, |x: &[Jet]| (&x[0] * 0.7).sin() * 0.3 + &x[1] * 0.1).jet(&Point::new(vec![0.4, -0.2]));
    let m = m.unwrap();
    let s = Sym2Field::new(2, |x: &[Jet]| {
        let a = (&x[0] * &x[1]).cos() + 2.0;
        let b = &x[0] * 0.5;
        vec![a, b.clone(), b, x[1].exp()]
    })
    .eval(&Point::new(vec![0.4, -0.2]))
    .unwrap();
    let r = variation_algebraic("t", 0.0, &Point::new(vec![0.4, -0.2]), &m, &s).unwrap();
    assert!(r.residual_max <= 1e-13, "{}", r.residual_max);
}

fn flat_chart() -> Chart {
    Chart::open_box("plane", vec![(-1.0, 1.0), (-1.0, 1.0)]).unwrap()
}

#[test]
fn axioms_for_s_equal_g_on_flat_chart() {
    let flat = flat_metric(2);
    let source = |p: &Point| {
        let m = flat.jet(p)?;
        Ok((m.clone(), Sym2Jet::from_metric(&m)))
    };
    let rows = axiom_suite("flat", 0.0, source, &flat_chart(), 3, 12).unwrap();
    assert_eq!(rows.len(), 4 * 20);
    assert!(rows.iter().all(|r| r.residual_rel <= 1e-14), "{:?}", rows.iter().map(|r| r.residual_rel).fold(0.0, f64::max));
}

#[test]
fn axioms_for_ricci_on_the_sphere() {
    let base = EinsteinBase::Sphere(2);
    let metric = base.metric();
    let source = |p: &Point| {
        let m = metric.jet(p)?;
        let r = ricci_jet(&m)?;
        Ok((m, r))
    };
    let rows = axiom_suite("sphere2", 0.0, source, &base.chart(), 11, 12).unwrap();
    let worst = rows.iter().map(|r| r.residual_rel).fold(0.0, f64::max);
    assert!(worst <= 1e-9, "{worst}");
}

#[test]
fn axioms_for_a_non_metric_tensor() {
    let flat = flat_metric(2);
    let s_field = Sym2Field::new(2, |x: &[Jet]| {
        let zero = x[0].lift(0.0);
        vec![&x[0] * &x[0] + 1.0, zero.clone(), zero, x[0].lift(1.0)]
    });
    let source = |p: &Point| Ok((flat.jet(p)?, s_field.eval(p)?));
    let rows = axiom_suite("plane", 0.0, source, &flat_chart(), 5, 12).unwrap();
    let worst = rows.iter().map(|r| r.residual_rel).fold(0.0, f64::max);
    assert!(worst <= 1e-9, "{worst}");
}

#[test]
fn reduction_to_levi_civita() {
    let m = EinsteinBase::Hyperbolic(3).metric().jet(&Point::new(vec![0.2, -0.4, 0.8])).unwrap();
    let r = levi_civita_reduction("h3", 0.0, &Point::new(vec![0.2, -0.4, 0.8]), &m).unwrap();
    assert!(r.residual_max <= 1e-12);
}

#[test]
fn convergence_of_synthetic_residuals() {
    let quad = convergence_study(|dt| Ok(vec![(3.0 * dt * dt, 0.0)]), &CONVERGENCE_DTS, RESIDUAL_FLOOR).unwrap();
    match quad.outcome {
        Convergence::Order(o) => assert_relative_eq!(o, 2.0, epsilon = 1e-9),
        other => panic!("{other}"),
    }
    let flat = convergence_study(|_| Ok(vec![(1e-14, 0.0)]), &CONVERGENCE_DTS, RESIDUAL_FLOOR).unwrap();
    assert_eq!(flat.outcome, Convergence::ExactWithinPrecision);
    let one = convergence_study(|dt| Ok(vec![(if dt > 3e-4 { 1e-10 } else { 0.0 }, 0.0)]), &CONVERGENCE_DTS, RESIDUAL_FLOOR);
    assert_eq!(one.unwrap().outcome, Convergence::Undetermined);
}

#[test]
fn flat_torus_convergence_is_exact() {
    let fam = family(EinsteinBase::FlatTorus(2), FlowMap::Ricci);
    let p = Point::new(vec![0.5, 0.5]);
    let study = convergence_study(
        |dt| {
            let a = theorem_a_residual(&fam, FlowMap::Ricci, 0.3, &p, dt)?;
            Ok(vec![(a.report.residual_max, a.noise_floor)])
        },
        &CONVERGENCE_DTS,
        RESIDUAL_FLOOR,
    )
    .unwrap();
    assert_eq!(study.outcome, Convergence::ExactWithinPrecision);
}

/// `dθ² + e^t sin²θ dφ²`: `Γ^θ_φφ` is not affine in `t`, so the central
/// difference carries an `O(dt²)` error against the exact first variation.
#[test]
fn central_difference_of_gamma_converges_at_second_order() {
    let base = EinsteinBase::Sphere(2);
    let radial = Sym2Field::new(2, |x: &[Jet]| {
        let (one, zero) = (x[0].lift(1.0), x[0].lift(0.0));
        vec![one, zero.clone(), zero.clone(), zero]
    });
    let angular = Sym2Field::new(2, |x: &[Jet]| {
        let zero = x[0].lift(0.0);
        vec![zero.clone(), zero.clone(), zero, x[0].sin().powi(2)]
    });
    let fam = MetricFamily::ClosedForm(
        ClosedFormFamily::new(
            "warped-exp",
            base.chart(),
            FlowMap::Zero,
            vec![
                (radial, ScaleLaw::Affine { c0: 1.0, rate: 0.0 }),
                (angular, ScaleLaw::Exponential { c0: 1.0, rate: 3.0 }),
            ],
        )
        .unwrap(),
    );
    let p = Point::new(vec![1.0, 2.0]);
    let study = convergence_study(
        |dt| {
            let before = levi_civita_coeffs(&fam.query_with_order(0.2 - dt, &p, 1)?.metric)?;
            let after = levi_civita_coeffs(&fam.query_with_order(0.2 + dt, &p, 1)?.metric)?;
            let s = fam.query(0.2, &p)?;
            let exact = variation_tensor(&s.metric, &s.dt_metric)?;
            Ok(vec![(after.gamma.combine(0.5 / dt, &before.gamma, -0.5 / dt).max_abs_diff(&exact), 0.0)])
        },
        &[4e-3, 2e-3, 1e-3],
        RESIDUAL_FLOOR,
    )
    .unwrap();
    match study.outcome {
        Convergence::Order(o) => assert!((o - 2.0).abs() <= 0.2, "{o}"),
        other => panic!("{other}"),
    }
}

#[test]
fn flat_torus_suite_passes_with_zero_residuals() {
    let fam = family(EinsteinBase::FlatTorus(2), FlowMap::Ricci);
    let out = run_suite(&fam, FlowMap::Ricci, &SuiteConfig::default()).unwrap();
    assert!(out.summary.passed);
    assert!(out.reports.iter().all(|r| r.residual_max <= 1e-12));
    assert_eq!(out.summary.convergence.outcome, Convergence::ExactWithinPrecision);
}

#[test]
fn csv_has_header_and_seventeen_digits() {
    let row = ResidualReport::new("f", "c", 0.1, &Point::new(vec![1.0 / 3.0]), 2e-7, 1.0).with_dt(1e-4);
    let mut buf = Vec::new();
    write_csv(&[row], 1, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "family,check,time,x0,residual_max,residual_rel,dt_used,method");
    let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(cells[3], "3.3333333333333331e-1");
    assert_eq!(cells[3].parse::<f64>().unwrap(), 1.0 / 3.0);
}

fn random_metric(seed: u64) -> MetricField {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let u = crate::chart::TrigPolynomial::random(3, &mut rng);
    let v = crate::chart::TrigPolynomial::random(3, &mut rng);
    MetricField::analytic(3, move |x: &[Jet]| {
        let a = (u.eval(x) * 0.3).exp();
        let b = v.eval(x) * 0.1;
        let zero = x[0].lift(0.0);
        vec![
            a.clone(), b.clone(), zero.clone(),
            b, a.clone() + 1.0, zero.clone(),
            zero.clone(), zero, a * 2.0,
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `X g(Y, Z) = g(∇_X Y, Z) + g(Y, ∇_X Z)` and torsion-freeness.
    #[test]
    fn koszul_coefficients_are_metric_compatible(seed in 0u64..1000, px in -1.0f64..1.0, py in -1.0f64..1.0, pz in -1.0f64..1.0) {
        let metric = random_metric(seed);
        let p = Point::new(vec![px, py, pz]);
        let m = metric.jet(&p).unwrap();
        let gamma = levi_civita_coeffs(&m).unwrap();
        let fields = probe_fields(3, seed + 17, 3);
        let (x, y, z) = (fields[0].eval(&p).unwrap(), fields[1].eval(&p).unwrap(), fields[2].eval(&p).unwrap());
        let g = Sym2Jet::from_metric(&m);
        let lhs = directional_derivative(&x, &g.contract(&y, &z).unwrap()).unwrap();
        let nxy = apply_connection(&gamma, &x, &y).unwrap();
        let nxz = apply_connection(&gamma, &x, &z).unwrap();
        let rhs = m.inner(&nxy, &z.values()) + m.inner(&y.values(), &nxz);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        let nyx = apply_connection(&gamma, &y, &x).unwrap();
        let bracket = lie_bracket(&x, &y).unwrap();
        for k in 0..3 {
            prop_assert!((nxy[k] - nyx[k] - bracket[k]).abs() <= 1e-10 * (1.0 + nxy[k].abs()));
        }
    }

    /// The differencing-free identity holds for any metric and any symmetric `S`.
    #[test]
    fn algebraic_identity_is_generic(seed in 0u64..1000, px in -1.0f64..1.0, py in -1.0f64..1.0, pz in -1.0f64..1.0) {
        let p = Point::new(vec![px, py, pz]);
        let m = random_metric(seed).jet(&p).unwrap();
        let s = random_metric(seed + 1).as_sym2().unwrap().eval(&p).unwrap();
        let r = variation_algebraic("random", 0.0, &p, &m, &s).unwrap();
        prop_assert!(r.residual_rel <= 1e-12);
    }
}

#[test]
fn noise_floor_does_not_hide_a_defect() {
    let fam = warped_sphere_family();
    let p = quarter();
    let a = theorem_a_residual(&fam, FlowMap::Ricci, 0.1, &p, 1e-4).unwrap();
    assert!(a.noise_floor < 1e-9, "{}", a.noise_floor);
    let study = convergence_study(
        |dt| {
            let a = theorem_a_residual(&fam, FlowMap::Ricci, 0.1, &p, dt)?;
            Ok(vec![(a.report.residual_max, a.noise_floor)])
        },
        &CONVERGENCE_DTS,
        RESIDUAL_FLOOR,
    )
    .unwrap();
    assert!(matches!(study.outcome, Convergence::Order(o) if o.abs() < 0.1), "{:?}", study.outcome);
}
