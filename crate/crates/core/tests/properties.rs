mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use slipstokes::geometry::{
    elementary_rigid_motion, load_triangle_mesh, make_parametric_surface, tangential_part, Mat3, RigidMotion, Shape,
    SurfaceMesh, Vec3,
};
use slipstokes::mobility::{compute_wrench, swim_velocity, Mobility};
use slipstokes::selfprop::{flux_and_carrier, h_half_norm, solve_with, SolverConfig};
use slipstokes::slip_bvp::{boundary_residuals, BoundaryData, SlipSolver};
use slipstokes::stokes::{evaluate_flow, evaluate_traction, stokeslet_velocity, FlowField};
use slipstokes::validation::{analytic_sphere_resistance, CheckResult};

use common::{random_exterior_points, random_smooth_data, random_smooth_field, rng};

const ALPHA: f64 = 2.0;

struct Fixture {
    mesh: &'static SurfaceMesh,
    solver: SlipSolver<'static>,
    mobility: Mobility,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let mesh: &'static SurfaceMesh = Box::leak(Box::new(
            make_parametric_surface(&Shape::Sphere { radius: 1.0 }, 14).unwrap(),
        ));
        let solver = SolverConfig::default().build_solver(mesh, ALPHA).unwrap();
        let mobility = Mobility::compute(&solver).unwrap();
        Fixture { mesh, solver, mobility }
    })
}

fn vec3() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn unit_vec3() -> impl Strategy<Value = Vec3> {
    vec3()
        .prop_filter("non-degenerate", |v| v.norm() > 0.1)
        .prop_map(|v| v.normalize())
}

fn fd_gradient(f: impl Fn(&Vec3) -> Vec3, x: &Vec3, h: f64) -> Mat3 {
    let mut g = Mat3::zeros();
    for c in 0..3 {
        let mut d = Vec3::zeros();
        d[c] = h;
        let col = (f(&(x + d)) - f(&(x - d))) / (2.0 * h);
        for r in 0..3 {
            g[(r, c)] = col[r];
        }
    }
    g
}

fn random_field(seed: u64) -> FlowField {
    let f = fixture();
    let mut r = rng(seed);
    let strengths = random_smooth_field(f.mesh, &mut r)[..f.solver.sources().len()].to_vec();
    FlowField::new(f.solver.sources().clone(), strengths).unwrap()
}

fn rel_diff(a: &[Vec3], b: &[Vec3]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_squared()).sum();
    let den: f64 = b.iter().map(|y| y.norm_squared()).sum();
    (num / den).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parametric_mesh_invariants(a in 0.5..2.0f64, c in 0.5..2.0f64, res in 10usize..22) {
        let shape = Shape::Spheroid { a_axis: a, c_axis: c };
        let mesh = make_parametric_surface(&shape, res).unwrap();
        let mut closure = Vec3::zeros();
        let mut div = 0.0;
        for k in 0..mesh.len() {
            let n = mesh.normals()[k];
            let [t1, t2] = mesh.tangents()[k];
            let w = mesh.weights()[k];
            prop_assert!((n.norm() - 1.0).abs() < 1e-12);
            prop_assert!(t1.dot(&t2).abs() < 1e-12 && t1.dot(&n).abs() < 1e-12 && t2.dot(&n).abs() < 1e-12);
            prop_assert!((t1.norm() - 1.0).abs() < 1e-12 && (t2.norm() - 1.0).abs() < 1e-12);
            prop_assert!(w > 0.0);
            prop_assert!(n.dot(&mesh.nodes()[k]) < 0.0);
            closure += n * w;
            div += w * n.dot(&mesh.nodes()[k]);
        }
        prop_assert!(closure.norm() < 1e-10 * mesh.area());
        prop_assert!((div + 3.0 * shape.volume()).abs() < 1e-4 * shape.volume());
    }

    #[test]
    fn tangential_part_is_an_orthogonal_projection(v in vec3(), w in vec3(), n in unit_vec3(), s in -3.0..3.0f64) {
        let p = tangential_part(&v, &n);
        prop_assert!(p.dot(&n).abs() < 1e-14);
        prop_assert!((tangential_part(&p, &n) - p).norm() < 1e-14);
        let lin = tangential_part(&(v * s + w), &n) - (p * s + tangential_part(&w, &n));
        prop_assert!(lin.norm() < 1e-13);
    }

    #[test]
    fn rigid_motions_are_divergence_free_with_skew_gradient(i in 1usize..=6, x in vec3(), z in prop::array::uniform6(-1.0..1.0f64)) {
        let g = fd_gradient(|p| elementary_rigid_motion(i, p).unwrap(), &x, 1e-6);
        prop_assert!(g.trace().abs() < 1e-6);
        prop_assert!((g + g.transpose()).norm() < 1e-6);
        let m = RigidMotion::from_six(&z);
        let direct: Vec3 = (1..=6).map(|j| elementary_rigid_motion(j, &x).unwrap() * z[j - 1]).sum();
        prop_assert!((m.eval(&x) - direct).norm() < 1e-14);
    }

    #[test]
    fn stokeslet_pressure_is_harmonic(s in vec3(), f in vec3(), d in unit_vec3(), r in 0.5..3.0f64) {
        let x = s + d * r;
        let h = 1e-3;
        let p = |y: Vec3| stokeslet_velocity(&s, &f, &y).unwrap().1;
        let mut lap = -6.0 * p(x);
        for c in 0..3 {
            let mut e = Vec3::zeros();
            e[c] = h;
            lap += p(x + e) + p(x - e);
        }
        lap /= h * h;
        prop_assert!(lap.abs() < 1e-4 * f.norm() / r.powi(4));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn flow_is_linear_in_the_strengths(s1 in any::<u64>(), s2 in any::<u64>(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let f = fixture();
        let (u, v) = (random_field(s1), random_field(s2));
        let combo = FlowField::linear_combination(&[(a, &u), (b, &v)]).unwrap();
        let pts = random_exterior_points(&mut rng(s1 ^ s2), 16, 1.2, 5.0);
        let (fu, fv, fc) = (evaluate_flow(&u, &pts).unwrap(), evaluate_flow(&v, &pts).unwrap(), evaluate_flow(&combo, &pts).unwrap());
        for k in 0..pts.len() {
            let expect = fu[k].0 * a + fv[k].0 * b;
            prop_assert!((fc[k].0 - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
            let pe = a * fu[k].1 + b * fv[k].1;
            prop_assert!((fc[k].1 - pe).abs() <= 1e-12 * (1.0 + pe.abs()));
        }
        let (tu, tv, tc) = (evaluate_traction(&u, f.mesh).unwrap(), evaluate_traction(&v, f.mesh).unwrap(), evaluate_traction(&combo, f.mesh).unwrap());
        for k in 0..f.mesh.len() {
            let expect = tu[k] * a + tv[k] * b;
            prop_assert!((tc[k] - expect).norm() <= 1e-10 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn flow_is_divergence_free_and_decays(seed in any::<u64>()) {
        let field = random_field(seed);
        let mut r = rng(seed.wrapping_add(1));
        for x in random_exterior_points(&mut r, 8, 1.3, 4.0) {
            let g = fd_gradient(|p| field.velocity(p).unwrap(), &x, 1e-5);
            prop_assert!(g.trace().abs() <= 1e-6 * g.norm());
            prop_assert!((field.gradient(&x).unwrap() - g).norm() <= 1e-5 * g.norm());
        }
        let d = random_exterior_points(&mut r, 1, 1.0, 1.0001)[0].normalize();
        let near = field.velocity(&(d * 50.0)).unwrap().norm() * 50.0;
        let far = field.velocity(&(d * 100.0)).unwrap().norm() * 100.0;
        prop_assert!(far < 1.2 * near && far > 0.8 * near);
    }

    #[test]
    fn slip_solve_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -2.0..2.0f64) {
        let f = fixture();
        let g1 = random_smooth_data(f.mesh, &mut rng(s1));
        let g2 = random_smooth_data(f.mesh, &mut rng(s2));
        let (u1, _) = f.solver.solve_lifting(&g1).unwrap();
        let (u2, _) = f.solver.solve_lifting(&g2).unwrap();
        let (uc, _) = f.solver.solve_lifting(&g1.axpy(a, &g2)).unwrap();
        let pts = random_exterior_points(&mut rng(s1 ^ s2), 12, 1.2, 4.0);
        let expect: Vec<Vec3> = pts.iter().map(|x| u1.velocity(x).unwrap() * a + u2.velocity(x).unwrap()).collect();
        let got: Vec<Vec3> = pts.iter().map(|x| uc.velocity(x).unwrap()).collect();
        prop_assert!(rel_diff(&got, &expect) < 1e-8);
    }

    #[test]
    fn residual_on_finer_nodes_stays_close(seed in any::<u64>()) {
        let f = fixture();
        let fine = make_parametric_surface(&Shape::Sphere { radius: 1.0 }, 28).unwrap();
        let coeffs = rng(seed);
        let data = random_smooth_data(f.mesh, &mut coeffs.clone());
        let fine_data = random_smooth_data(&fine, &mut coeffs.clone());
        let (u, report) = f.solver.solve_lifting(&data).unwrap();
        let (rn, rt) = boundary_residuals(&u, &fine, ALPHA, &fine_data).unwrap();
        let coarse = report.residual_normal.max(report.residual_tangential / ALPHA);
        prop_assert!(rn.max(rt / ALPHA) < 10.0 * coarse.max(1e-12));
    }

    #[test]
    fn wrench_is_linear_in_the_data(s1 in any::<u64>(), s2 in any::<u64>(), a in -2.0..2.0f64) {
        let f = fixture();
        let g1 = random_smooth_data(f.mesh, &mut rng(s1));
        let g2 = random_smooth_data(f.mesh, &mut rng(s2));
        let w1 = f.mobility.wrench(&g1, f.mesh).unwrap().w;
        let w2 = f.mobility.wrench(&g2, f.mesh).unwrap().w;
        let wc = f.mobility.wrench(&g1.axpy(a, &g2), f.mesh).unwrap().w;
        prop_assert!((wc - (w1 * a + w2)).norm() <= 1e-12 * (1.0 + wc.norm()));
    }

    #[test]
    fn carrier_split_leaves_no_flux(seed in any::<u64>()) {
        let f = fixture();
        let data = random_smooth_data(f.mesh, &mut rng(seed));
        let split = flux_and_carrier(&data, f.mesh, f.mesh.centroid()).unwrap();
        let abs: f64 = data.normal_data().iter().zip(f.mesh.weights()).map(|(u, w)| (u * w).abs()).sum();
        prop_assert!(split.beta_star_flux.abs() < 1e-13 * abs.max(1.0));
        prop_assert!((split.phi - data.flux(f.mesh)).abs() < 1e-15 * abs.max(1.0));
    }

    #[test]
    fn selfprop_field_is_force_and_torque_free(seed in any::<u64>()) {
        let f = fixture();
        let data = random_smooth_data(f.mesh, &mut rng(seed));
        let sol = solve_with(&f.solver, &f.mobility, &data, 1e-3).unwrap();
        let scale = sol.beta.iter().map(|b| b * b).sum::<f64>().sqrt();
        prop_assert!(sol.force_residual.max(sol.torque_residual) < 1e-3 * scale.max(1e-12));
        let w = f.mobility.wrench(&data, f.mesh).unwrap();
        let route = swim_velocity(&f.mobility.grand, &w);
        prop_assert!((route.xi - sol.xi).norm() < 1e-3 * (1.0 + sol.xi.norm()));
        prop_assert!((route.omega - sol.omega).norm() < 1e-3 * (1.0 + sol.omega.norm()));
    }

    #[test]
    fn velocity_ignores_zero_flux_normal_data_outside_the_thrust_space(seed in any::<u64>()) {
        let f = fixture();
        let mesh = f.mesh;
        let base = random_smooth_data(mesh, &mut rng(seed));
        let q = invisible_normal_perturbation(mesh, &f.mobility, seed);
        let perturbed = BoundaryData::new(
            mesh,
            base.normal_data().iter().zip(&q).map(|(a, b)| a + b).collect(),
            base.tangential_data().to_vec(),
        ).unwrap();
        let w0 = f.mobility.wrench(&base, mesh).unwrap();
        let w1 = f.mobility.wrench(&perturbed, mesh).unwrap();
        let v0 = swim_velocity(&f.mobility.grand, &w0);
        let v1 = swim_velocity(&f.mobility.grand, &w1);
        prop_assert!((v0.xi - v1.xi).norm() < 1e-6 && (v0.omega - v1.omega).norm() < 1e-6);
    }

    #[test]
    fn check_passes_exactly_when_within_tolerance(lhs in -10.0..10.0f64, rhs in -10.0..10.0f64, tol in 1e-6..1.0f64) {
        let c = CheckResult::compare("x", lhs, rhs, None, tol);
        prop_assert_eq!(c.passed, c.relative_error <= tol);
    }
}

/// Normal-only data `q n` with zero flux and `∫ q n·g^i = 0` for every
/// traction basis element.
fn invisible_normal_perturbation(mesh: &SurfaceMesh, mobility: &Mobility, seed: u64) -> Vec<f64> {
    let raw: Vec<f64> = random_smooth_field(mesh, &mut rng(seed.wrapping_mul(31).wrapping_add(7)))
        .iter()
        .map(|v| v.x)
        .collect();
    let mut basis: Vec<Vec<f64>> = vec![vec![1.0; mesh.len()]];
    for g in &mobility.basis.tractions {
        basis.push(g.iter().zip(mesh.normals()).map(|(t, n)| t.dot(n)).collect());
    }
    let inner = |a: &[f64], b: &[f64]| -> f64 { (0..mesh.len()).map(|k| mesh.weights()[k] * a[k] * b[k]).sum() };
    let m = basis.len();
    let gram = nalgebra::DMatrix::from_fn(m, m, |i, j| inner(&basis[i], &basis[j]));
    let rhs = nalgebra::DVector::from_fn(m, |i, _| inner(&basis[i], &raw));
    let c = gram.svd(true, true).solve(&rhs, 1e-12).unwrap();
    (0..mesh.len())
        .map(|k| raw[k] - (0..m).map(|i| c[i] * basis[i][k]).sum::<f64>())
        .collect()
}

#[test]
fn column_identity_of_the_wrench() {
    let f = fixture();
    for k in 1..=6 {
        let w = compute_wrench(
            &BoundaryData::rigid_trace(f.mesh, k).unwrap(),
            &f.mobility.basis,
            f.mesh,
        )
        .unwrap();
        let col = f.mobility.grand.raw.row(k - 1).transpose();
        assert!((w.w + col).norm() < 1e-10 * col.norm(), "column {k}");
    }
}

#[test]
fn grand_matrix_is_spd_and_k_grows_with_alpha() {
    let mesh = make_parametric_surface(&Shape::Sphere { radius: 1.0 }, 10).unwrap();
    let mut last = [0.0; 3];
    for alpha in [0.1, 0.5, 1.0, 3.0, 10.0, 100.0, 1e6] {
        let solver = SolverConfig::default().build_solver(&mesh, alpha).unwrap();
        let gm = Mobility::compute(&solver).unwrap().grand;
        assert!(gm.min_eigenvalue > 0.0, "alpha {alpha}");
        for (i, prev) in last.iter_mut().enumerate() {
            assert!(gm.k[(i, i)] >= *prev, "K_{i}{i} decreased at alpha {alpha}");
            *prev = gm.k[(i, i)];
        }
    }
}

#[test]
fn slip_response_is_continuous_in_alpha() {
    let f = fixture();
    let data = random_smooth_data(f.mesh, &mut rng(5));
    let other = SolverConfig::default().build_solver(f.mesh, 1.01 * ALPHA).unwrap();
    let (u0, _) = f.solver.solve_lifting(&data).unwrap();
    let (u1, _) = other.solve_lifting(&data).unwrap();
    let t0 = evaluate_traction(&u0, f.mesh).unwrap();
    let t1 = evaluate_traction(&u1, f.mesh).unwrap();
    let d = rel_diff(&t1, &t0);
    assert!(d < 0.02, "traction moved by {d:e} for a 1% change in alpha");
}

#[test]
fn degenerate_spheroid_reproduces_the_sphere() {
    let a = make_parametric_surface(&Shape::Sphere { radius: 1.3 }, 12).unwrap();
    let b = make_parametric_surface(
        &Shape::Spheroid {
            a_axis: 1.3,
            c_axis: 1.3,
        },
        12,
    )
    .unwrap();
    assert_eq!(a.len(), b.len());
    for k in 0..a.len() {
        assert!((a.nodes()[k] - b.nodes()[k]).norm() < 1e-14);
        assert!((a.normals()[k] - b.normals()[k]).norm() < 1e-14);
        assert!((a.weights()[k] - b.weights()[k]).abs() < 1e-14);
    }
}

#[test]
fn icosphere_off_file_is_a_sphere() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/icosphere.off");
    let mesh = load_triangle_mesh(path).unwrap();
    assert_eq!(mesh.len(), 1280);
    assert!((mesh.area() - 4.0 * PI).abs() < 0.01 * 4.0 * PI, "area {}", mesh.area());
    let closure: Vec3 = mesh.normals().iter().zip(mesh.weights()).map(|(n, w)| n * *w).sum();
    assert!(closure.norm() < 1e-12);
    assert!(mesh.contains(&Vec3::zeros()));

    let solver = SolverConfig::default().build_solver(&mesh, 1e6).unwrap();
    let gm = Mobility::compute(&solver).unwrap().grand;
    let (k, _) = analytic_sphere_resistance(1.0, 1e-6).unwrap();
    assert!((gm.k.trace() / 3.0 - k).abs() < 0.02 * k, "K = {}", gm.k.trace() / 3.0);
}

#[test]
fn half_norm_is_resolution_stable() {
    let coarse = make_parametric_surface(&Shape::Sphere { radius: 1.0 }, 16).unwrap();
    let fine = make_parametric_surface(&Shape::Sphere { radius: 1.0 }, 24).unwrap();
    let y1 = |m: &SurfaceMesh| -> Vec<Vec3> { m.nodes().iter().map(|x| Vec3::new(x.z, 0.0, 0.0)).collect() };
    let a = h_half_norm(&y1(&coarse), &coarse).unwrap();
    let b = h_half_norm(&y1(&fine), &fine).unwrap();
    assert!((a - b).abs() < 0.05 * b, "{a} vs {b}");
}
