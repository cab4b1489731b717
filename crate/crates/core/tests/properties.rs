use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use proptest::prelude::*;

use smallsphere::energy::{coefficients_closed_form, e5_closed_form, e5_gradient, e5_hessian};
use smallsphere::nonvacuum::{limit_energy, ricci_from_stress, stress_from_curvature, StressEnergy};
use smallsphere::observer::Observer;
use smallsphere::sphere::{null_decompose_with, Direction, TangentGauge};
use smallsphere::tensor::{
    bel_robinson, curvature_from_weyl_and_ricci, electric_magnetic_from_weyl, minkowski, q_contract, v_vector,
    weyl_from_electric_magnetic, CausalClass, CurvatureAtPoint, ElectricMagneticParts, Rank4,
};

fn traceless(v: [f64; 5]) -> Matrix3<f64> {
    Matrix3::new(v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], -v[0] - v[3])
}

fn parts() -> impl Strategy<Value = ElectricMagneticParts> {
    (prop::array::uniform5(-2.0..2.0f64), prop::array::uniform5(-2.0..2.0f64))
        .prop_map(|(d, e)| ElectricMagneticParts::new(traceless(d), traceless(e)).unwrap())
}

fn vacuum() -> impl Strategy<Value = CurvatureAtPoint> {
    parts().prop_map(|p| weyl_from_electric_magnetic(&p).unwrap())
}

fn boost(scale: f64) -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-scale..scale).prop_map(Vector3::from)
}

fn direction() -> impl Strategy<Value = Direction> {
    boost(1.0)
        .prop_filter("away from the origin", |v| v.norm() > 0.1)
        .prop_map(|v| Direction::from_vector(v).unwrap())
}

fn symmetric4() -> impl Strategy<Value = Matrix4<f64>> {
    prop::array::uniform10(-1.0..1.0f64).prop_map(|v| {
        let mut m = Matrix4::zeros();
        let mut k = 0;
        for i in 0..4 {
            for j in i..4 {
                m[(i, j)] = v[k];
                m[(j, i)] = v[k];
                k += 1;
            }
        }
        m
    })
}

fn scale_of(c: &CurvatureAtPoint) -> f64 {
    c.riemann().max_abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn electric_magnetic_round_trip(p in parts()) {
        let c = weyl_from_electric_magnetic(&p).unwrap();
        let back = electric_magnetic_from_weyl(&c).unwrap();
        prop_assert!((back.d() - p.d()).amax() < 1e-13);
        prop_assert!((back.e() - p.e()).amax() < 1e-13);
    }

    #[test]
    fn v_is_never_spacelike(c in vacuum()) {
        let v = v_vector(&c).unwrap();
        prop_assert!(matches!(v.class, CausalClass::TimelikeFuture | CausalClass::NullFuture | CausalClass::Zero));
        let s = scale_of(&c).powi(4);
        prop_assert!(minkowski(&v.components, &v.components) <= 1e-12 * s);
    }

    #[test]
    fn bel_robinson_contraction_matches_v(c in vacuum(), a in boost(3.0)) {
        let t0 = Observer::new(a).unwrap();
        let q = bel_robinson(&c).unwrap();
        let e0 = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let u = Vector4::new(t0.a0(), a[0], a[1], a[2]);
        let full = q.contract(&e0, &e0, &e0, &u);
        let fast = q_contract(&c, &t0).unwrap();
        prop_assert!((full - fast).abs() <= 1e-12 * full.abs().max(scale_of(&c).powi(2)));
        prop_assert!(q.symmetry_defect() <= 1e-12 * q.q().max_abs().max(1e-300));
    }

    #[test]
    fn e5_dual_representation_and_sign(c in vacuum(), a in boost(3.0)) {
        let t0 = Observer::new(a).unwrap();
        let direct = e5_closed_form(&c, &t0).unwrap();
        let coeff = coefficients_closed_form(&c).unwrap().e5(&t0);
        prop_assert!((direct - coeff).abs() <= 1e-12 * direct.abs().max(1e-300));
        prop_assert!(direct >= 0.0);
    }

    #[test]
    fn e5_scales_quadratically(c in vacuum(), a in boost(2.0), s in 0.1..10.0f64) {
        let t0 = Observer::new(a).unwrap();
        let scaled = curvature_from_weyl_and_ricci(&c.riemann().scale(s), &Matrix4::zeros()).unwrap();
        let lhs = e5_closed_form(&scaled, &t0).unwrap();
        let rhs = s * s * e5_closed_form(&c, &t0).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
    }

    #[test]
    fn e5_is_strictly_convex_for_timelike_v(c in vacuum(), a in boost(2.0)) {
        prop_assume!(v_vector(&c).unwrap().class == CausalClass::TimelikeFuture);
        let h = e5_hessian(&c, &a).unwrap();
        // finite-difference Hessian from the analytic gradient
        let step = 1e-5;
        let fd = Matrix3::from_fn(|i, j| {
            let e = Vector3::ith(j, step);
            (e5_gradient(&c, &(a + e)).unwrap()[i] - e5_gradient(&c, &(a - e)).unwrap()[i]) / (2.0 * step)
        });
        prop_assert!((fd - h).amax() <= 1e-6 * h.amax().max(1.0));
        prop_assert!(h.symmetric_eigenvalues().min() > 0.0);
    }

    #[test]
    fn limit_energy_is_linear_in_t0(m in symmetric4(), a in boost(3.0), b in boost(3.0)) {
        let t = StressEnergy::new(m).unwrap();
        let (ta, tb) = (Observer::new(a).unwrap(), Observer::new(b).unwrap());
        let sum = ta.four_vector() + tb.four_vector();
        let lhs = 4.0 * PI / 3.0 * t.eval(&Vector4::new(1.0, 0.0, 0.0, 0.0), &sum);
        let rhs = limit_energy(&t, &ta) + limit_energy(&t, &tb);
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + ta.a0() + tb.a0()));
    }

    #[test]
    fn stress_round_trip(ric in symmetric4()) {
        let c = curvature_from_weyl_and_ricci(&Rank4::zeros(), &ric).unwrap();
        prop_assert!((ricci_from_stress(&stress_from_curvature(&c)) - ric).amax() < 1e-13);
    }

    #[test]
    fn null_scalars_are_gauge_independent(c in vacuum(), x in direction()) {
        let n = null_decompose_with(&c, &x, TangentGauge::NorthPole).unwrap();
        let s = null_decompose_with(&c, &x, TangentGauge::SouthPole).unwrap();
        let tol = 1e-12 * scale_of(&c).max(1.0);
        prop_assert!((n.rho - s.rho).abs() < tol);
        prop_assert!((n.sigma - s.sigma).abs() < tol);
        prop_assert!((n.alpha_ambient() - s.alpha_ambient()).amax() < tol);
        prop_assert!((n.beta_ambient() - s.beta_ambient()).amax() < tol);
        prop_assert!((n.alpha_norm_sq() - s.alpha_norm_sq()).abs() < tol * scale_of(&c));
    }
}
