mod common;

use common::{jacobian_error, radial_target};
use deformlab::poisson::{gradient, laplacian};
use deformlab::{
    curl_of_map, integrate_deformation, solve_neumann_poisson, velocity_from_monitor, DeformConfig,
    Error, Execution, MonitorPair, ScalarField2D, SolverConfig,
};

fn deform(n: usize, steps: usize) -> (MonitorPair, deformlab::Grid2D) {
    let pair = MonitorPair::from_identity(&radial_target(n)).unwrap();
    let u = velocity_from_monitor(&pair, &SolverConfig::default()).unwrap();
    let grid = integrate_deformation(
        &pair,
        &u,
        &DeformConfig {
            steps,
            ..Default::default()
        },
    )
    .unwrap();
    (pair, grid)
}

#[test]
fn prescribed_jacobian_is_reproduced() {
    let (pair, coarse) = deform(65, 100);
    let e65 = jacobian_error(&coarse, &pair);
    assert!(e65 <= 0.05, "65x65 error {e65}");
    let (pair, fine) = deform(129, 200);
    let e129 = jacobian_error(&fine, &pair);
    assert!(e129 < e65, "{e129} !< {e65}");
}

#[test]
fn walls_and_area_are_preserved() {
    let (_, g) = deform(33, 40);
    let lat = g.lattice();
    for j in 0..lat.ny {
        for i in 0..lat.nx {
            let (x0, y0) = lat.node(i, j);
            let (x, y) = g.get(i, j);
            if i == 0 || i == lat.nx - 1 {
                assert_eq!(x.to_bits(), x0.to_bits());
            }
            if j == 0 || j == lat.ny - 1 {
                assert_eq!(y.to_bits(), y0.to_bits());
            }
            assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
        }
    }
    assert!((g.total_area() - 1.0).abs() < 1e-3);
    assert!(g.max_displacement() > 1e-2);
}

#[test]
fn time_step_refinement_converges() {
    // Bilinear sampling makes the transport field only Lipschitz across
    // cell edges, so the global order is two rather than four.
    let (pair, _) = deform(33, 1);
    let u = velocity_from_monitor(&pair, &SolverConfig::default()).unwrap();
    let run = |steps| {
        integrate_deformation(
            &pair,
            &u,
            &DeformConfig {
                steps,
                ..Default::default()
            },
        )
        .unwrap()
    };
    let reference = run(1600);
    let dist = |g: &deformlab::Grid2D| {
        g.px()
            .iter()
            .zip(reference.px())
            .chain(g.py().iter().zip(reference.py()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let errs: Vec<f64> = [10, 20, 40, 80].iter().map(|&s| dist(&run(s))).collect();
    // individual ratios jump as trajectories cross cell edges; require
    // monotone decrease and roughly second order across three halvings
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[0] / errs[3] >= 40.0, "{errs:?}");
}

#[test]
fn schedules_agree_bitwise() {
    let pair = MonitorPair::from_identity(&radial_target(33)).unwrap();
    let run = |execution| {
        let solver = SolverConfig {
            execution,
            ..Default::default()
        };
        let u = velocity_from_monitor(&pair, &solver).unwrap();
        integrate_deformation(
            &pair,
            &u,
            &DeformConfig {
                steps: 30,
                execution,
            },
        )
        .unwrap()
    };
    assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
}

#[test]
fn velocity_points_into_a_compressing_bump() {
    let n = 33;
    let pair = MonitorPair::from_identity(&radial_target(n)).unwrap();
    let c = n / 2;
    assert!(pair.f1().get(c, c) < 1.0);
    let u = velocity_from_monitor(&pair, &SolverConfig::default()).unwrap();
    assert!(u.get(c + 1, c).0 < 0.0);
    assert!(u.get(c - 1, c).0 > 0.0);
    assert!(u.get(c, c + 1).1 < 0.0);
    assert!(u.get(c, c - 1).1 > 0.0);
}

#[test]
fn velocity_is_the_gradient_of_the_poisson_solution() {
    let raw =
        ScalarField2D::from_fn(41, 29, |x, y| 1.0 + 0.5 * (6.0 * x).sin().powi(2) + x * y).unwrap();
    let pair = MonitorPair::from_identity(&raw).unwrap();
    let cfg = SolverConfig::default();
    let rhs = pair.divergence_source();
    let w = solve_neumann_poisson(&rhs, &cfg).unwrap();
    let u = velocity_from_monitor(&pair, &cfg).unwrap();
    assert_eq!(u, gradient(&w, cfg.execution));
    // div_h ∇_h w is the 5-point Laplacian on the staggered stencil
    let lw = laplacian(&w, cfg.execution);
    for (a, b) in lw.values().iter().zip(rhs.values()) {
        assert!((a - b).abs() < 1e-8);
    }
    assert!(u.curl().max_abs() <= 1e-12);
}

#[test]
fn velocity_is_linear_in_the_source() {
    let g = ScalarField2D::from_fn(25, 25, |x, y| 1.0 + (3.0 * x + y).cos().powi(2)).unwrap();
    let a = MonitorPair::from_identity(&g).unwrap();
    let c = 0.5;
    let scaled = a.f1().map(|f| 1.0 / (1.0 + c * (1.0 / f - 1.0)));
    let b = MonitorPair::new(a.f0().clone(), scaled).unwrap();
    let cfg = SolverConfig::default();
    let ua = velocity_from_monitor(&a, &cfg).unwrap().scale(c);
    let ub = velocity_from_monitor(&b, &cfg).unwrap();
    for (x, y) in ua
        .ux()
        .iter()
        .chain(ua.uy())
        .zip(ub.ux().iter().chain(ub.uy()))
    {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn fold_is_reported_with_the_grid() {
    let raw = ScalarField2D::from_fn(
        17,
        17,
        |x, y| if (x < 0.5) ^ (y < 0.5) { 1.0 } else { 60.0 },
    )
    .unwrap();
    let pair = MonitorPair::from_identity(&raw).unwrap();
    let u = velocity_from_monitor(&pair, &SolverConfig::default()).unwrap();
    match integrate_deformation(
        &pair,
        &u,
        &DeformConfig {
            steps: 1,
            ..Default::default()
        },
    ) {
        Err(Error::FoldDetected {
            min_jacobian, grid, ..
        }) => {
            assert!(min_jacobian <= 0.0);
            assert_eq!(grid.nx(), 17);
        }
        other => panic!("expected fold, got {other:?}"),
    }
}

#[test]
fn displacement_curl_of_deformed_grids() {
    // radially symmetric monitor: rotation-free up to discretisation
    let (_, radial) = deform(33, 50);
    let cv = curl_of_map(&radial);
    let mut grad: f64 = 0.0;
    for k in 0..radial.px().len() {
        let id = deformlab::Grid2D::identity(radial.lattice());
        grad = grad.max((radial.px()[k] - id.px()[k]).abs());
    }
    assert!(
        cv.max_abs() < 1e-2 * grad * 32.0,
        "cv {} vs displacement scale {}",
        cv.max_abs(),
        grad
    );

    // off-centre, anisotropic target: u is curl-free but f·u is not
    let raw = ScalarField2D::from_fn(33, 33, |x, y| {
        1.0 + 2.0 * (-((x - 0.3).powi(2) / 0.02 + (y - 0.6).powi(2) / 0.08)).exp()
    })
    .unwrap();
    let pair = MonitorPair::from_identity(&raw).unwrap();
    let u = velocity_from_monitor(&pair, &SolverConfig::default()).unwrap();
    let g = integrate_deformation(
        &pair,
        &u,
        &DeformConfig {
            steps: 50,
            ..Default::default()
        },
    )
    .unwrap();
    let cv = curl_of_map(&g);
    assert!(cv.max_abs() > 1e-4);
}
