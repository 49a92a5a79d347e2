use approx::assert_relative_eq;
use axisym_suction::function_spaces::io::{fmt_num, measure_manifest_json, profile_csv};
use axisym_suction::function_spaces::*;
use axisym_suction::{Complex64, Error};
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

fn grid() -> Arc<RadialGrid> {
    Arc::new(RadialGrid::default())
}

fn small_grid() -> Arc<RadialGrid> {
    Arc::new(RadialGrid::geometric(128, 100.0).unwrap())
}

fn pl(g: &Arc<RadialGrid>, a: Complex64, p: f64) -> RadialProfile {
    RadialProfile::power_law(g.clone(), a, p)
}

#[test]
fn grid_invariants() {
    let g = RadialGrid::geometric(64, 50.0).unwrap();
    assert_eq!(g.nodes()[0], 1.0);
    assert_eq!(g.r_max(), 50.0);
    assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    assert_relative_eq!(g.stretch(), g.nodes()[1], max_relative = 1e-14);
    assert!(matches!(RadialGrid::geometric(63, 50.0), Err(Error::Validation(_))));
    assert!(RadialGrid::geometric(64, 1.0).is_err());
    let d = RadialGrid::default();
    assert_eq!((d.len(), d.r_max()), (DEFAULT_NODES, DEFAULT_R_MAX));

    let z = ZetaGrid::uniform(16.0, 257).unwrap();
    assert_eq!(z.nodes()[128], 0.0);
    assert_relative_eq!(z.weights().iter().sum::<f64>(), 32.0, max_relative = 1e-14);
    assert_eq!(z.mirror(0), 256);
    assert!(ZetaGrid::uniform(16.0, 256).is_err());
}

#[test]
fn weighted_sup_norm_examples() {
    let g = grid();
    assert_relative_eq!(weighted_sup_norm(&pl(&g, ONE, 2.0), 2.0), 1.0, max_relative = 1e-14);
    assert!(weighted_sup_norm(&pl(&g, ONE, 1.0), 2.5).is_infinite());

    let p = RadialProfile::from_real_fn(g.clone(), |r| r.powi(-3) * (1.0 - 1.0 / r), 3.0);
    // Dense scan of r³ p(r) = 1 − 1/r over the grid range.
    let dense = (0..=200_000)
        .map(|j| 1000f64.powf(j as f64 / 200_000.0))
        .map(|r| 1.0 - 1.0 / r)
        .fold(0.0, f64::max);
    assert!((weighted_sup_norm(&p, 3.0) - dense).abs() <= 1e-6);
    assert_eq!(weighted_sup_norm(&RadialProfile::zeros(g), 2.0), 0.0);
}

#[test]
fn x_norm_examples() {
    let g = grid();
    for rho in [0.0, 1.5, 2.5, 3.0] {
        let mu = SpectralMeasure::atom(g.clone(), 0, pl(&g, ONE, rho)).unwrap();
        assert_relative_eq!(x_norm(&mu, rho), 1.0, max_relative = 1e-14);
    }
    let mut mu = SpectralMeasure::zero(g.clone());
    mu.add_atom(1, pl(&g, Complex64::new(0.25, 0.0), 3.0)).unwrap();
    mu.add_atom(-1, pl(&g, Complex64::new(0.0, 0.25), 3.0)).unwrap();
    assert_relative_eq!(mu.x_norm(3.0), 0.5, max_relative = 1e-14);

    let zg = Arc::new(ZetaGrid::default());
    let mut dens = SpectralMeasure::zero(g.clone());
    let width = 1.3;
    dens.add_density(zg, &pl(&g, ONE, 3.0), |z| (-((z - 0.4) / width).powi(2)).exp()).unwrap();
    assert!((dens.x_norm(3.0) - std::f64::consts::PI.sqrt() * width).abs() <= 1e-8);
}

#[test]
fn atom_convolution_examples() {
    let g = grid();
    let a = SpectralMeasure::atom(g.clone(), 1, pl(&g, ONE, 3.0)).unwrap();
    let b = SpectralMeasure::atom(g.clone(), 2, pl(&g, ONE, 2.0)).unwrap();
    let c = convolve(&a, &b).unwrap();
    assert_eq!(c.atoms().keys().copied().collect::<Vec<_>>(), vec![3]);
    let p = &c.atoms()[&3];
    assert_eq!(p.tail_exponent(), 5.0);
    for (v, r) in p.values().iter().zip(g.nodes()) {
        assert_relative_eq!(v.re, r.powi(-5), max_relative = 1e-14);
    }

    let unit = SpectralMeasure::atom(g.clone(), 0, RadialProfile::from_real_fn(g.clone(), |_| 1.0, 0.0)).unwrap();
    let mut mu = SpectralMeasure::zero(g.clone());
    mu.add_atom(-2, pl(&g, Complex64::new(0.3, -1.0), 3.5)).unwrap();
    mu.add_atom(5, pl(&g, Complex64::new(2.0, 0.5), 4.0)).unwrap();
    assert_eq!(mu.convolve(&unit).unwrap().atoms(), mu.atoms());
    assert!(mu.convolve(&SpectralMeasure::zero(g)).unwrap().is_zero());
}

#[test]
fn convolution_rejects_mismatched_grids() {
    let a = SpectralMeasure::atom(grid(), 0, RadialProfile::zeros(grid())).unwrap();
    let b = SpectralMeasure::atom(small_grid(), 0, RadialProfile::zeros(small_grid())).unwrap();
    assert!(matches!(a.convolve(&b), Err(Error::GridMismatch(_))));
    assert!(matches!(a.add(&b), Err(Error::GridMismatch(_))));
}

#[test]
fn z_derivative_examples() {
    let g = grid();
    let a = pl(&g, Complex64::new(0.7, -0.2), 3.0);
    let mu = SpectralMeasure::atom(g.clone(), 2, a.clone()).unwrap();
    let d = z_derivative(&mu);
    for (x, y) in d.atoms()[&2].values().iter().zip(a.values()) {
        assert_eq!(*x, y * Complex64::new(0.0, 2.0));
    }

    let mut two = SpectralMeasure::zero(g.clone());
    let b = RadialProfile::from_real_fn(g.clone(), |r| r.powf(-2.5) * (1.0 + r.sin() / r), 2.5);
    two.add_atom(1, b.scale(Complex64::new(0.5, 0.5))).unwrap();
    two.add_atom(-1, b.scale(Complex64::new(0.5, -0.5))).unwrap();
    two.add_atom(3, b.scale_real(0.2)).unwrap();
    two.add_atom(-3, b.scale_real(0.2)).unwrap();
    assert!(two.is_hermitian(1e-15));
    let dz = two.z_derivative();
    assert!(dz.is_hermitian(1e-15));
    let h = 1e-4;
    for &r in &[1.3, 2.0, 7.5] {
        for &z in &[0.0, 0.4, 2.9, 5.0] {
            let fd = (two.reconstruct(r, z + h).unwrap() - two.reconstruct(r, z - h).unwrap()) / (2.0 * h);
            assert!((fd - dz.reconstruct(r, z).unwrap()).norm() <= 1e-6);
        }
    }
}

#[test]
fn reconstruct_examples() {
    let g = grid();
    let a = RadialProfile::from_real_fn(g.clone(), |r| 1.0 / (r * r), 2.0);
    let zero_mode = SpectralMeasure::atom(g.clone(), 0, a.clone()).unwrap();
    let r = g.nodes()[40];
    let v0 = zero_mode.reconstruct(r, 0.0).unwrap();
    for z in [0.3, 1.0, 4.0] {
        assert_eq!(zero_mode.reconstruct(r, z).unwrap(), v0);
    }
    assert_relative_eq!(v0.re, r.powi(-2), max_relative = 1e-14);

    let mut pair = SpectralMeasure::zero(g.clone());
    pair.add_atom(1, a.scale_real(0.5)).unwrap();
    pair.add_atom(-1, a.scale_real(0.5)).unwrap();
    for z in [0.0, 0.7, 2.0, 5.5] {
        let v = pair.reconstruct(r, z).unwrap();
        assert!((v.re - z.cos() * r.powi(-2)).abs() <= 1e-14 && v.im.abs() <= 1e-15);
        assert!((pair.reconstruct(r, z + std::f64::consts::TAU).unwrap() - v).norm() <= 1e-14);
    }
    assert!(pair.reconstruct(0.9, 0.0).is_err());
}

#[test]
fn periodic_round_trip() {
    let g = small_grid();
    let a = |r: f64| r.powf(-3.0) * (2.0 + (r / 3.0).cos());
    let mu = SpectralMeasure::project_periodic(g.clone(), |r, z| Complex64::new(a(r) * (2.0 * z).cos(), 0.0), 4, 64, 3.0)
        .unwrap();
    assert!(mu.is_hermitian(1e-12));
    for j in 0..64 {
        let z = std::f64::consts::TAU * j as f64 / 64.0;
        for &r in g.nodes().iter().step_by(7) {
            assert!((mu.reconstruct(r, z).unwrap().re - a(r) * (2.0 * z).cos()).abs() <= 1e-10);
        }
    }
    assert!(SpectralMeasure::project_periodic(g, |_, _| ONE, 8, 10, 0.0).is_err());
}

#[test]
fn linear_operations() {
    let g = grid();
    let a = SpectralMeasure::atom(g.clone(), 1, pl(&g, Complex64::new(1.0, 2.0), 3.0)).unwrap();
    let b = SpectralMeasure::atom(g.clone(), -2, pl(&g, Complex64::new(-0.5, 0.0), 4.0)).unwrap();
    let sum = a.add(&b).unwrap();
    assert_eq!(sum.z_derivative(), a.z_derivative().add(&b.z_derivative()).unwrap());
    assert!(sum.sub(&sum).unwrap().atoms().values().all(|p| p.is_zero()));
    let f = AxiVectorField::new(a.clone(), b.clone(), sum.clone());
    assert_relative_eq!(f.fx_norm(2.0), a.x_norm(2.0) + b.x_norm(2.0) + sum.x_norm(2.0), max_relative = 1e-14);
    assert!(f.sub(&f).unwrap().fx_norm(2.0) == 0.0);
    assert!(AxiVectorField::zero(g).is_zero());
}

#[test]
fn truncation_reports_dropped_norm() {
    let g = grid();
    let mut mu = SpectralMeasure::zero(g.clone());
    for m in -5..=5 {
        mu.add_atom(m, pl(&g, Complex64::new(1.0 / (1.0 + m.abs() as f64), 0.0), 3.0)).unwrap();
    }
    let (kept, dropped) = mu.truncate_atoms(3, 3.0);
    assert_eq!(kept.atoms().len(), 7);
    assert_relative_eq!(dropped, 2.0 * (1.0 / 5.0 + 1.0 / 6.0), max_relative = 1e-14);
}

#[test]
fn dump_formats() {
    let g = small_grid();
    let p = pl(&g, Complex64::new(1.0, -0.5), 2.0);
    let csv = profile_csv(&p);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,re,im"));
    assert_eq!(lines.next(), Some("1.0000000000000000e0,1.0000000000000000e0,-5.0000000000000000e-1"));
    assert_eq!(csv.lines().count(), g.len() + 1);
    assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");

    let mut mu = SpectralMeasure::atom(g.clone(), 2, p.clone()).unwrap();
    mu.add_density(Arc::new(ZetaGrid::uniform(1.0, 5).unwrap()), &p, |_| 1.0).unwrap();
    let json: serde_json::Value = serde_json::from_str(&measure_manifest_json(&mu)).unwrap();
    assert_eq!(json["atoms"][0]["m"], 2);
    assert_eq!(json["zeta_nodes"].as_array().unwrap().len(), 5);
    assert_eq!(json["radial_nodes"], 128);
}

#[test]
fn from_parts_validates_shapes() {
    let g = small_grid();
    let zg = Arc::new(ZetaGrid::uniform(1.0, 5).unwrap());
    let short = vec![RadialProfile::zeros(g.clone()); 3];
    assert!(matches!(
        SpectralMeasure::from_parts(g.clone(), Some(zg), short.clone(), BTreeMap::new()),
        Err(Error::GridMismatch(_))
    ));
    assert!(SpectralMeasure::from_parts(g.clone(), None, short, BTreeMap::new()).is_err());
    assert!(RadialProfile::new(g.clone(), vec![ONE; 3], 1.0).is_err());
    assert!(RadialProfile::new(g.clone(), vec![ONE; g.len()], f64::NAN).is_err());
    let mut v = vec![ONE; g.len()];
    v[5] = Complex64::new(f64::INFINITY, 0.0);
    assert!(RadialProfile::new(g, v, 1.0).is_err());
}

fn profile_strategy(g: Arc<RadialGrid>, rho: f64) -> impl Strategy<Value = RadialProfile> {
    (-1.0f64..1.0, -1.0f64..1.0, 0.0f64..1.5, 0.5f64..20.0).prop_map(move |(re, im, extra, c)| {
        let a = Complex64::new(re, im);
        RadialProfile::from_fn(g.clone(), move |r| a * r.powf(-rho - extra) * (1.0 + (r / c).sin() / r), rho + extra)
    })
}

fn atoms_strategy(g: Arc<RadialGrid>, rho: f64) -> impl Strategy<Value = SpectralMeasure> {
    prop::collection::vec((-4i64..=4, profile_strategy(g.clone(), rho)), 1..4).prop_map(move |terms| {
        let mut mu = SpectralMeasure::zero(g.clone());
        for (m, p) in terms {
            mu.add_atom(m, p).unwrap();
        }
        mu
    })
}

fn hermitian_strategy(g: Arc<RadialGrid>, rho: f64) -> impl Strategy<Value = SpectralMeasure> {
    prop::collection::vec((0i64..=3, profile_strategy(g.clone(), rho)), 1..3).prop_map(move |terms| {
        let mut mu = SpectralMeasure::zero(g.clone());
        for (m, p) in terms {
            if m == 0 {
                mu.add_atom(0, p.add(&p.conj()).unwrap()).unwrap();
            } else {
                mu.add_atom(m, p.clone()).unwrap();
                mu.add_atom(-m, p.conj()).unwrap();
            }
        }
        mu
    })
}

fn with_density(g: Arc<RadialGrid>, rho: f64) -> impl Strategy<Value = SpectralMeasure> {
    (atoms_strategy(g.clone(), rho), profile_strategy(g.clone(), rho), -3.0f64..3.0, 0.3f64..1.5).prop_map(
        move |(mut mu, p, c, w)| {
            let zg = Arc::new(ZetaGrid::uniform(16.0, 129).unwrap());
            mu.add_density(zg, &p, |z| (-((z - c) / w).powi(2)).exp()).unwrap();
            mu
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn banach_algebra_inequality(a in with_density(small_grid(), 2.5), b in with_density(small_grid(), 2.5)) {
        let c = a.convolve(&b).unwrap();
        prop_assert!(c.x_norm(2.5) <= a.x_norm(2.5) * b.x_norm(2.5) + 1e-6);
        prop_assert!(c.x_norm(5.0) <= a.x_norm(2.5) * b.x_norm(2.5) + 1e-6);
    }

    #[test]
    fn atom_convolution_is_commutative_and_associative(
        a in atoms_strategy(small_grid(), 2.0),
        b in atoms_strategy(small_grid(), 2.0),
        c in atoms_strategy(small_grid(), 2.0),
    ) {
        let ab = a.convolve(&b).unwrap();
        let ba = b.convolve(&a).unwrap();
        prop_assert_eq!(ab.atoms().keys().collect::<Vec<_>>(), ba.atoms().keys().collect::<Vec<_>>());
        for (m, p) in ab.atoms() {
            for (x, y) in p.values().iter().zip(ba.atoms()[m].values()) {
                prop_assert!((x - y).norm() <= 1e-15 * x.norm().max(1e-300));
            }
        }
        let left = ab.convolve(&c).unwrap();
        let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        let ka: Vec<_> = left.atoms().keys().collect();
        let kb: Vec<_> = right.atoms().keys().collect();
        prop_assert_eq!(ka, kb);
        for (m, p) in left.atoms() {
            for (x, y) in p.values().iter().zip(right.atoms()[m].values()) {
                prop_assert!((x - y).norm() <= 1e-13 * (1.0 + x.norm()));
            }
        }
    }

    #[test]
    fn index_sums_are_exact(k in -20i64..20, l in -20i64..20) {
        let g = small_grid();
        let a = SpectralMeasure::atom(g.clone(), k, pl(&g, ONE, 2.0)).unwrap();
        let b = SpectralMeasure::atom(g.clone(), l, pl(&g, ONE, 3.0)).unwrap();
        let keys: Vec<i64> = a.convolve(&b).unwrap().atoms().keys().copied().collect();
        prop_assert_eq!(keys, vec![k + l]);
    }

    #[test]
    fn hermitian_symmetry_is_preserved(a in hermitian_strategy(small_grid(), 2.0), b in hermitian_strategy(small_grid(), 2.0), s in -3.0f64..3.0) {
        prop_assert!(a.is_hermitian(1e-14));
        prop_assert!(a.convolve(&b).unwrap().is_hermitian(1e-12));
        prop_assert!(a.z_derivative().is_hermitian(1e-14));
        prop_assert!(a.scale(Complex64::new(s, 0.0)).is_hermitian(1e-14));
        let v = a.reconstruct(2.5, 1.1).unwrap();
        prop_assert!(v.im.abs() <= 1e-12 * (1.0 + v.re.abs()));
    }

    #[test]
    fn z_derivative_is_linear(a in with_density(small_grid(), 2.0), b in with_density(small_grid(), 2.0)) {
        let lhs = a.add(&b).unwrap().z_derivative();
        let rhs = a.z_derivative().add(&b.z_derivative()).unwrap();
        prop_assert_eq!(lhs.modes(), rhs.modes());
        for key in lhs.modes() {
            let (p, q) = (lhs.profile(key).unwrap(), rhs.profile(key).unwrap());
            for (x, y) in p.values().iter().zip(q.values()) {
                prop_assert!((x - y).norm() <= 1e-15 * (1.0 + x.norm()));
            }
        }
    }

    #[test]
    fn convolution_is_the_pointwise_product(a in hermitian_strategy(small_grid(), 2.0), b in hermitian_strategy(small_grid(), 2.0), z in 0.0f64..6.3) {
        let c = a.convolve(&b).unwrap();
        let g = small_grid();
        for &r in g.nodes().iter().step_by(31) {
            let lhs = c.reconstruct(r, z).unwrap();
            let rhs = a.reconstruct(r, z).unwrap() * b.reconstruct(r, z).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }
    }
}
