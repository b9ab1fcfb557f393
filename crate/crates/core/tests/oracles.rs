//! Checks against an independent hand-coded evaluation that reads nothing
//! from the library except the final answers it is compared with.

use gfactor_core::design::ROOT_RESIDUAL;
use gfactor_core::*;

/// (a, eg_gamma, eg_x, eg_l, delta, ep) copied from the shipped parameter file.
const INP: [f64; 6] = [5.86, 1.4236, 2.384, 2.014, 0.108, 20.7];
const GAAS: [f64; 6] = [5.64177, 1.519, 1.981, 1.815, 0.341, 28.8];
const INAS: [f64; 6] = [6.0502, 0.417, 1.433, 1.133, 0.39, 21.5];
const GAP: [f64; 6] = [5.44186, 2.886, 2.35, 2.72, 0.08, 22.0];
const INSB: [f64; 6] = [6.46911, 0.235, 0.63, 0.93, 0.81, 23.3];

/// Bowing of (Γ, X, L) on the four InGaAsP edges.
const B_GAINAS: [f64; 3] = [0.477, 1.4, 0.33];
const B_GAINP: [f64; 3] = [0.65, 0.20, 1.03];
const B_INASP: [f64; 3] = [0.10, 0.27, 0.27];
const B_GAASP: [f64; 3] = [0.19, 0.24, 0.16];

fn hand_g(eg: f64, delta: f64, ep: f64) -> f64 {
    2.0 - 2.0 * ep * delta / (3.0 * eg * (eg + delta))
}

/// In_x Ga_(1-x) As_y P_(1-y), evaluated term by term.
fn hand_quaternary(x: f64, y: f64) -> [f64; 6] {
    let mut out = [0.0; 6];
    for k in 0..6 {
        out[k] = x * y * INAS[k]
            + x * (1.0 - y) * INP[k]
            + (1.0 - x) * y * GAAS[k]
            + (1.0 - x) * (1.0 - y) * GAP[k];
    }
    for k in 0..3 {
        out[k + 1] -= x * (1.0 - x) * (y * B_GAINAS[k] + (1.0 - y) * B_GAINP[k]);
        out[k + 1] -= y * (1.0 - y) * (x * B_INASP[k] + (1.0 - x) * B_GAASP[k]);
    }
    out
}

/// As fraction that matches `a_sub` at In fraction `x`.
fn hand_match(x: f64, a_sub: f64) -> Option<f64> {
    let a0 = x * INP[0] + (1.0 - x) * GAP[0];
    let a1 = x * INAS[0] + (1.0 - x) * GAAS[0];
    let y = (a_sub - a0) / (a1 - a0);
    (-1e-12..=1.0 + 1e-12)
        .contains(&y)
        .then(|| y.clamp(0.0, 1.0))
}

struct Scan {
    x: f64,
    g: f64,
    eg: f64,
    direct: bool,
}

/// Brute-force scan of the InP-matched quaternary in In fraction.
fn scan(points: usize) -> Vec<Scan> {
    (0..points)
        .filter_map(|i| {
            let x = i as f64 / (points - 1) as f64;
            let y = hand_match(x, 5.86)?;
            let p = hand_quaternary(x, y);
            let direct = p[1] <= p[2].min(p[3]);
            let g = if direct {
                hand_g(p[1], p[4], p[5])
            } else {
                2.0
            };
            Some(Scan {
                x,
                g,
                eg: p[1],
                direct,
            })
        })
        .collect()
}

fn db() -> MaterialsDatabase {
    default_database()
}

fn g_of(formula: &str) -> GFactorResult {
    electron_g(&parse_composition(formula).unwrap(), &db()).unwrap()
}

#[test]
fn binary_g_factors_match_hand_evaluation() {
    for (name, rec) in [("InP", INP), ("GaAs", GAAS), ("InAs", INAS), ("InSb", INSB)] {
        let g = g_of(name).g;
        assert!((g - hand_g(rec[1], rec[4], rec[5])).abs() < 1e-12, "{name}");
    }
    // frozen from the hand evaluation above
    assert!((g_of("InSb").g - -49.234_856_968).abs() < 1e-8);
    assert!((g_of("GaAs").g - -0.317_314_022).abs() < 1e-8);
    assert!((g_of("InP").g - 1.316_451_232).abs() < 1e-8);
}

#[test]
fn quaternary_matches_hand_interpolation() {
    let db = db();
    for &(x, y) in &[(0.9, 0.2), (0.53, 1.0), (0.75, 0.55), (0.1, 0.9)] {
        let c = Composition::new(
            [(Cation::In, x), (Cation::Ga, 1.0 - x)],
            [(Anion::As, y), (Anion::P, 1.0 - y)],
        )
        .unwrap();
        let p = alloy_params(&c, &db).unwrap();
        let h = hand_quaternary(x, y);
        for (k, param) in Param::ALL.into_iter().enumerate() {
            assert!((p.get(param) - h[k]).abs() < 1e-12, "{param} at ({x}, {y})");
        }
    }
}

#[test]
fn oracle_scan_reproduces_design_conclusions() {
    let grid = scan(200_001);
    assert!(grid.iter().all(|s| s.direct));
    // no composition in the telecom window reaches |g| <= 0.1
    assert!(!grid
        .iter()
        .any(|s| (0.75..=0.85).contains(&s.eg) && s.g.abs() <= 0.1));
    // exactly one sign change, well above 0.9 eV
    let changes: Vec<_> = grid
        .windows(2)
        .filter(|w| w[0].g.signum() != w[1].g.signum())
        .collect();
    assert_eq!(changes.len(), 1);
    let eg_cross = changes[0][0].eg;
    assert!(eg_cross > 0.9 && eg_cross < 1.45, "{eg_cross}");

    let path = lattice_matched_path(&"InGaAsP".parse().unwrap(), 5.86, &db()).unwrap();
    let root = find_g_zero(&path, [0.0, 1.0], &db()).unwrap();
    assert!(root.residual.abs() < ROOT_RESIDUAL);
    let x_root = root.composition.cation_fraction(Cation::In);
    assert!(
        (x_root - changes[0][0].x).abs() < 1e-5,
        "{x_root} vs {}",
        changes[0][0].x
    );
    let eg_root = alloy_params(&root.composition, &db()).unwrap().eg_gamma;
    assert!((eg_root - eg_cross).abs() < 1e-4);
}

#[test]
fn oracle_scan_of_ingaas_edge_is_monotone() {
    let g: Vec<f64> = (0..=10_000)
        .map(|i| {
            let x = i as f64 / 10_000.0;
            let eg = (1.0 - x) * GAAS[1] + x * INAS[1] - x * (1.0 - x) * B_GAINAS[0];
            hand_g(
                eg,
                (1.0 - x) * GAAS[4] + x * INAS[4],
                (1.0 - x) * GAAS[5] + x * INAS[5],
            )
        })
        .collect();
    assert!(g.windows(2).all(|w| w[1] < w[0]));
    let path = CompositionPath::linear(
        parse_composition("GaAs").unwrap(),
        parse_composition("InAs").unwrap(),
    )
    .unwrap();
    let table = sweep_path(&path, 101, &db()).unwrap();
    for (row, i) in table.rows.iter().zip((0..=10_000).step_by(100)) {
        assert!((row.g - g[i]).abs() < 1e-10, "t={}", row.t);
    }
}

#[test]
fn solutions_reverify_closed_loop() {
    let db = db();
    for (window, tol, target) in [
        ([0.75, 1.45], 0.1, 0.0),
        ([0.0, 10.0], 10.0, 0.0),
        ([1.0, 1.3], 0.5, 0.5),
        ([0.8, 1.5], 1e-3, -1.0),
    ] {
        let mut problem = DesignProblem::new(
            "InGaAsP".parse().unwrap(),
            Substrate::Compound("InP".into()),
            target,
            tol,
            window,
        );
        problem.grid = 501;
        let s = solve_design(&problem, &db).unwrap();
        assert_eq!(s.status, Feasibility::Feasible, "{window:?}");
        for sol in &s.solutions {
            let r = electron_g(&sol.composition, &db).unwrap();
            let p = alloy_params(&sol.composition, &db).unwrap();
            assert_eq!(r, sol.gfactor);
            assert_eq!(p, sol.params);
            assert_eq!(r.character, GapCharacter::Direct);
            assert!((r.g - target).abs() <= tol);
            assert!(p.eg_gamma >= window[0] && p.eg_gamma <= window[1]);
            assert!(((p.a - 5.86) / 5.86).abs() <= problem.lattice_tolerance);
        }
    }
}

#[test]
fn refinement_never_loses_interior_roots() {
    let db = db();
    for target in [-3.0, -1.0, 0.0, 0.5, 1.0] {
        for window in [[0.8, 1.5], [1.0, 1.2], [0.9, 1.0]] {
            let mut p = DesignProblem::new(
                "InGaAsP".parse().unwrap(),
                Substrate::LatticeConstant(5.86),
                target,
                0.05,
                window,
            );
            p.grid = 1001;
            let coarse = solve_design(&p, &db).unwrap();
            p.grid = 2001;
            let fine = solve_design(&p, &db).unwrap();
            if coarse.status == Feasibility::Feasible {
                assert_eq!(
                    fine.status,
                    Feasibility::Feasible,
                    "target {target} window {window:?}"
                );
            }
        }
    }
}

#[test]
fn sweeps_are_bit_reproducible() {
    let db = db();
    let path = lattice_matched_path(&"InGaAsP".parse().unwrap(), 5.86, &db).unwrap();
    let a = sweep_path(&path, 257, &db).unwrap();
    let b = sweep_path(&path, 257, &db).unwrap();
    assert_eq!(a, b);
    assert!(a.rows.windows(2).all(|w| w[0].t < w[1].t));
    for row in &a.rows {
        assert_eq!(electron_g(&row.composition, &db).unwrap().g, row.g);
    }
}
