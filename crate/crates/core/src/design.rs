//! Composition sweeps, g = target crossings and lattice-matched design search.
//!
//! After lattice matching the design space of a quaternary is a single curve,
//! so feasibility is decided by a dense scan along that curve followed by
//! bracketed refinement of every sign change of `g − g_target`. The scan
//! resolution and refinement tolerances are returned as a certificate with
//! every answer, including infeasible ones.

use std::cmp::Ordering;

use serde::Serialize;

use crate::alloy::{alloy_params, lattice_constant, AlloyParams};
use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::gfactor::{g_from_params, GFactorResult, GapCharacter};
use crate::params::MaterialsDatabase;
use crate::path::{lattice_matched_path, AlloyFamily, CompositionPath};
use crate::roots::{brent, RootError, RootOptions};

/// Default number of scan points along the design path.
pub const DEFAULT_GRID: usize = 1001;
/// Default relative lattice mismatch accepted by a design problem.
pub const DEFAULT_LATTICE_TOLERANCE: f64 = 1e-3;
/// Required `|g − target|` at a refined crossing.
pub const ROOT_RESIDUAL: f64 = 1e-9;
/// Required bracket width on the path parameter at a refined crossing.
pub const ROOT_T_TOLERANCE: f64 = 1e-6;

fn root_options() -> RootOptions {
    RootOptions {
        x_tol: 1e-13,
        f_tol: 1e-12,
        max_iter: 200,
    }
}

/// One evaluated point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub composition: Composition,
    pub a: f64,
    pub eg_gamma: f64,
    pub eg_min: f64,
    pub character: GapCharacter,
    pub g: f64,
}

impl SweepRow {
    pub fn evaluate(t: f64, composition: Composition, db: &MaterialsDatabase) -> Result<Self> {
        let params = alloy_params(&composition, db)?;
        let result = g_from_params(params)?;
        Ok(SweepRow {
            t,
            composition,
            a: params.a,
            eg_gamma: params.eg_gamma,
            eg_min: params.eg_min(),
            character: result.character,
            g: result.g,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

fn at_t(t: f64) -> impl Fn(Error) -> Error {
    move |e| Error::AtPathPoint {
        t,
        source: Box::new(e),
    }
}

/// Evaluates `n ≥ 2` evenly spaced points `t = i/(n−1)` of the path.
pub fn sweep_path(path: &CompositionPath, n: usize, db: &MaterialsDatabase) -> Result<SweepTable> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "sweep needs at least 2 points, got {n}"
        )));
    }
    let rows = (0..n)
        .map(|i| {
            let t = grid_t(i, n);
            let comp = path.at(t).map_err(at_t(t))?;
            SweepRow::evaluate(t, comp, db).map_err(at_t(t))
        })
        .collect::<Result<_>>()?;
    Ok(SweepTable { rows })
}

fn grid_t(i: usize, n: usize) -> f64 {
    if i + 1 == n {
        1.0
    } else {
        i as f64 / (n - 1) as f64
    }
}

/// g-factor and gap character at one path parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GSample {
    pub g: f64,
    pub character: GapCharacter,
}

/// A refined crossing `g(t*) = target`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub t: f64,
    pub composition: Composition,
    pub residual: f64,
}

/// Bracketed search for `g(t) = target` with an arbitrary evaluator.
///
/// Every evaluation must be direct-gap; an indirect point inside the bracket
/// is an error because g is pinned at 2 there.
pub fn find_g_crossing_with<F>(mut sample: F, bracket: [f64; 2], target: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<GSample>,
{
    let [t_lo, t_hi] = bracket;
    if t_lo.partial_cmp(&t_hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidArgument(format!(
            "bracket [{t_lo}, {t_hi}] is empty"
        )));
    }
    let mut f = |t: f64| -> Result<f64> {
        let s = sample(t)?;
        if s.character == GapCharacter::Indirect {
            return Err(Error::IndirectInBracket { t });
        }
        Ok(s.g - target)
    };
    let (f_lo, f_hi) = (f(t_lo)?, f(t_hi)?);
    if !(f_lo.signum() != f_hi.signum() && f_lo != 0.0 && f_hi != 0.0) {
        return Err(Error::NoSignChange {
            t_lo,
            t_hi,
            f_lo,
            f_hi,
        });
    }
    let root = brent(&mut f, t_lo, t_hi, root_options()).map_err(|e| match e {
        RootError::Eval(e) => e,
        RootError::NoSignChange { a, fa, b, fb } => Error::NoSignChange {
            t_lo: a,
            t_hi: b,
            f_lo: fa,
            f_hi: fb,
        },
        RootError::NotFinite { x, fx } => Error::AtPathPoint {
            t: x,
            source: Box::new(Error::InvalidArgument(format!("g evaluated to {fx}"))),
        },
    })?;
    if root.fx.abs() >= ROOT_RESIDUAL {
        return Err(Error::AtPathPoint {
            t: root.x,
            source: Box::new(Error::InvalidArgument(format!(
                "root refinement stalled with residual {}",
                root.fx
            ))),
        });
    }
    Ok(root.x)
}

fn path_sampler<'a>(
    path: &'a CompositionPath,
    db: &'a MaterialsDatabase,
) -> impl FnMut(f64) -> Result<GSample> + 'a {
    move |t| {
        let r = electron_g_at(path, t, db)?;
        Ok(GSample {
            g: r.g,
            character: r.character,
        })
    }
}

fn electron_g_at(path: &CompositionPath, t: f64, db: &MaterialsDatabase) -> Result<GFactorResult> {
    let comp = path.at(t).map_err(at_t(t))?;
    alloy_params(&comp, db)
        .and_then(g_from_params)
        .map_err(at_t(t))
}

/// Locates `g(t*) = target` on a path inside `bracket`.
pub fn find_g_crossing(
    path: &CompositionPath,
    bracket: [f64; 2],
    target: f64,
    db: &MaterialsDatabase,
) -> Result<Crossing> {
    let t = find_g_crossing_with(path_sampler(path, db), bracket, target)?;
    let composition = path.at(t)?;
    let residual = electron_g_at(path, t, db)?.g - target;
    Ok(Crossing {
        t,
        composition,
        residual,
    })
}

/// Locates `g(t*) = 0` on a path inside `bracket`.
pub fn find_g_zero(
    path: &CompositionPath,
    bracket: [f64; 2],
    db: &MaterialsDatabase,
) -> Result<Crossing> {
    find_g_crossing(path, bracket, 0.0, db)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Substrate {
    Compound(String),
    LatticeConstant(f64),
}

impl Substrate {
    pub fn lattice_constant(&self, db: &MaterialsDatabase) -> Result<f64> {
        match self {
            Substrate::Compound(name) => Ok(db.get_binary(name)?.a),
            Substrate::LatticeConstant(a) => Ok(*a),
        }
    }
}

impl std::str::FromStr for Substrate {
    type Err = Error;

    /// A number is read as a lattice constant in Å, anything else as a compound name.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty substrate".into()));
        }
        Ok(match s.parse::<f64>() {
            Ok(a) => Substrate::LatticeConstant(a),
            Err(_) => Substrate::Compound(s.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignProblem {
    pub family: AlloyFamily,
    pub substrate: Substrate,
    /// Accepted relative lattice mismatch `|Δa/a|`.
    pub lattice_tolerance: f64,
    pub g_target: f64,
    pub g_tolerance: f64,
    /// Accepted Γ-gap range, eV.
    pub eg_window: [f64; 2],
    /// Scan points along the lattice-matched path.
    pub grid: usize,
}

impl DesignProblem {
    pub fn new(
        family: AlloyFamily,
        substrate: Substrate,
        g_target: f64,
        g_tolerance: f64,
        eg_window: [f64; 2],
    ) -> Self {
        DesignProblem {
            family,
            substrate,
            lattice_tolerance: DEFAULT_LATTICE_TOLERANCE,
            g_target,
            g_tolerance,
            eg_window,
            grid: DEFAULT_GRID,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.lattice_tolerance > 0.0 && self.lattice_tolerance.is_finite()) {
            return bad(format!(
                "lattice tolerance must be > 0, got {}",
                self.lattice_tolerance
            ));
        }
        if !(self.g_tolerance > 0.0 && self.g_tolerance.is_finite()) {
            return bad(format!("g tolerance must be > 0, got {}", self.g_tolerance));
        }
        if !self.g_target.is_finite() {
            return bad(format!("g target must be finite, got {}", self.g_target));
        }
        let [lo, hi] = self.eg_window;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return bad(format!("gap window [{lo}, {hi}] must satisfy min < max"));
        }
        if self.grid < 2 {
            return bad(format!("grid needs at least 2 points, got {}", self.grid));
        }
        Ok(())
    }

    fn window_center(&self) -> f64 {
        0.5 * (self.eg_window[0] + self.eg_window[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Feasibility {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    /// Refined crossing of `g = g_target`.
    Crossing,
    /// Best scan point of a feasible run that contains no crossing.
    GridPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignCandidate {
    pub kind: SolutionKind,
    pub t: f64,
    pub composition: Composition,
    pub gfactor: GFactorResult,
    pub params: AlloyParams,
    /// Relative lattice mismatch to the substrate.
    pub mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchCertificate {
    pub path: String,
    pub substrate_a: f64,
    /// Number of points actually evaluated along the path.
    pub grid_points: usize,
    pub root_t_tolerance: f64,
    pub root_residual_tolerance: f64,
    /// Sign changes of `g − g_target` between adjacent direct-gap scan points.
    pub brackets_refined: usize,
    /// Scan points meeting every constraint.
    pub feasible_grid_points: usize,
    pub indirect_grid_points: usize,
    /// Scanned range of `g` and of the Γ gap over direct-gap points.
    pub g_range: Option<[f64; 2]>,
    pub eg_gamma_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignSolution {
    pub status: Feasibility,
    pub solutions: Vec<DesignCandidate>,
    pub certificate: SearchCertificate,
}

struct GridPoint {
    t: f64,
    comp: Composition,
    result: GFactorResult,
}

/// Searches the lattice-matched path of `problem.family` for compositions
/// with `|g − g_target| ≤ g_tolerance`, a direct Γ gap inside `eg_window`
/// and lattice mismatch within `lattice_tolerance`.
pub fn solve_design(problem: &DesignProblem, db: &MaterialsDatabase) -> Result<DesignSolution> {
    problem.validate()?;
    let substrate_a = problem.substrate.lattice_constant(db)?;
    let path = lattice_matched_path(&problem.family, substrate_a, db)?;
    let n = if path.is_point() { 1 } else { problem.grid };

    let grid: Vec<GridPoint> = (0..n)
        .map(|i| {
            let t = if n == 1 { 0.0 } else { grid_t(i, n) };
            let comp = path.at(t).map_err(at_t(t))?;
            let result = alloy_params(&comp, db)
                .and_then(g_from_params)
                .map_err(at_t(t))?;
            Ok(GridPoint { t, comp, result })
        })
        .collect::<Result<_>>()?;

    let candidate =
        |kind, t: f64, comp: Composition, result: GFactorResult| -> Result<DesignCandidate> {
            let a = lattice_constant(&comp, db)?;
            Ok(DesignCandidate {
                kind,
                t,
                composition: comp,
                gfactor: result,
                params: result.params_used,
                mismatch: (a - substrate_a) / substrate_a,
            })
        };
    let satisfies = |c: &DesignCandidate| -> bool {
        let eg = c.params.eg_gamma;
        c.gfactor.character == GapCharacter::Direct
            && (c.gfactor.g - problem.g_target).abs() <= problem.g_tolerance
            && eg >= problem.eg_window[0]
            && eg <= problem.eg_window[1]
            && c.mismatch.abs() <= problem.lattice_tolerance
    };

    let mut feasible_flags = Vec::with_capacity(n);
    for p in &grid {
        let c = candidate(SolutionKind::GridPoint, p.t, p.comp.clone(), p.result)?;
        feasible_flags.push(satisfies(&c));
    }

    // refine every sign change between adjacent direct points
    let mut crossings = Vec::new();
    let mut brackets = 0;
    for (i, pair) in grid.windows(2).enumerate() {
        let (p, q) = (&pair[0], &pair[1]);
        if p.result.character != GapCharacter::Direct || q.result.character != GapCharacter::Direct
        {
            continue;
        }
        let (fp, fq) = (p.result.g - problem.g_target, q.result.g - problem.g_target);
        if fp == 0.0 {
            crossings.push((i, p.t));
            continue;
        }
        if fp.signum() == fq.signum() || fq == 0.0 {
            continue;
        }
        brackets += 1;
        match find_g_crossing(&path, [p.t, q.t], problem.g_target, db) {
            Ok(c) => crossings.push((i, c.t)),
            // a Γ/X crossover between two direct scan points
            Err(Error::IndirectInBracket { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if let Some(last) = grid.last() {
        if grid.len() > 1
            && last.result.character == GapCharacter::Direct
            && last.result.g == problem.g_target
        {
            crossings.push((grid.len() - 1, last.t));
        }
    }

    let mut solutions = Vec::new();
    let mut covered = vec![false; n];
    for &(i, t) in &crossings {
        let comp = path.at(t)?;
        let result = alloy_params(&comp, db).and_then(g_from_params)?;
        let c = candidate(SolutionKind::Crossing, t, comp, result)?;
        if satisfies(&c) {
            mark_run(&feasible_flags, &mut covered, i);
            solutions.push(c);
        }
    }
    // feasible runs without a crossing contribute their best scan point
    let mut i = 0;
    while i < n {
        if !feasible_flags[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && feasible_flags[i] {
            i += 1;
        }
        if covered[start..i].iter().any(|&c| c) {
            continue;
        }
        let best = (start..i)
            .min_by(|&a, &b| {
                let da = (grid[a].result.g - problem.g_target).abs();
                let db_ = (grid[b].result.g - problem.g_target).abs();
                da.total_cmp(&db_)
            })
            .expect("non-empty run");
        let p = &grid[best];
        solutions.push(candidate(
            SolutionKind::GridPoint,
            p.t,
            p.comp.clone(),
            p.result,
        )?);
    }

    let center = problem.window_center();
    solutions.sort_by(|a, b| {
        let ga = (a.gfactor.g - problem.g_target).abs();
        let gb = (b.gfactor.g - problem.g_target).abs();
        ga.total_cmp(&gb)
            .then_with(|| {
                (a.params.eg_gamma - center)
                    .abs()
                    .total_cmp(&(b.params.eg_gamma - center).abs())
            })
            .then_with(|| a.t.partial_cmp(&b.t).unwrap_or(Ordering::Equal))
    });

    let direct: Vec<&GridPoint> = grid
        .iter()
        .filter(|p| p.result.character == GapCharacter::Direct)
        .collect();
    let range = |f: &dyn Fn(&GridPoint) -> f64| -> Option<[f64; 2]> {
        direct.iter().map(|p| f(p)).fold(None, |acc, v| match acc {
            None => Some([v, v]),
            Some([lo, hi]) => Some([lo.min(v), hi.max(v)]),
        })
    };
    let certificate = SearchCertificate {
        path: path.description(),
        substrate_a,
        grid_points: n,
        root_t_tolerance: ROOT_T_TOLERANCE,
        root_residual_tolerance: ROOT_RESIDUAL,
        brackets_refined: brackets,
        feasible_grid_points: feasible_flags.iter().filter(|&&f| f).count(),
        indirect_grid_points: n - direct.len(),
        g_range: range(&|p| p.result.g),
        eg_gamma_range: range(&|p| p.result.params_used.eg_gamma),
    };
    let status = if solutions.is_empty() {
        Feasibility::Infeasible
    } else {
        Feasibility::Feasible
    };
    Ok(DesignSolution {
        status,
        solutions,
        certificate,
    })
}

/// Marks the feasible run touching the bracket `[i, i+1]` as covered.
fn mark_run(flags: &[bool], covered: &mut [bool], i: usize) {
    for seed in [i, i + 1] {
        if seed >= flags.len() || !flags[seed] {
            continue;
        }
        let mut lo = seed;
        while lo > 0 && flags[lo - 1] {
            lo -= 1;
        }
        let mut hi = seed;
        while hi + 1 < flags.len() && flags[hi + 1] {
            hi += 1;
        }
        covered[lo..=hi].iter_mut().for_each(|c| *c = true);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::parse_composition;
    use crate::gfactor::electron_g;
    use crate::params::default_database;

    fn edge(a: &str, b: &str) -> CompositionPath {
        CompositionPath::linear(parse_composition(a).unwrap(), parse_composition(b).unwrap())
            .unwrap()
    }

    fn ingaasp(window: [f64; 2], g_tol: f64) -> DesignProblem {
        DesignProblem::new(
            "InGaAsP".parse().unwrap(),
            Substrate::Compound("InP".into()),
            0.0,
            g_tol,
            window,
        )
    }

    #[test]
    fn two_point_sweep_hits_binaries() {
        let db = default_database();
        let table = sweep_path(&edge("GaAs", "InAs"), 2, &db).unwrap();
        assert_eq!(table.rows.len(), 2);
        for (row, name) in table.rows.iter().zip(["GaAs", "InAs"]) {
            let r = electron_g(&parse_composition(name).unwrap(), &db).unwrap();
            assert_eq!(row.g, r.g);
            assert_eq!(row.a, db.get_binary(name).unwrap().a);
        }
        assert!(sweep_path(&edge("GaAs", "InAs"), 1, &db).is_err());
    }

    #[test]
    fn gainas_edge_is_monotone() {
        let db = default_database();
        let table = sweep_path(&edge("GaAs", "InAs"), 101, &db).unwrap();
        assert!(table
            .rows
            .windows(2)
            .all(|w| w[1].g < w[0].g && w[1].t > w[0].t));
        assert!(table
            .rows
            .iter()
            .all(|r| r.character == GapCharacter::Direct));
    }

    #[test]
    fn algap_edge_is_indirect() {
        let db = default_database();
        let table = sweep_path(&edge("GaP", "AlP"), 51, &db).unwrap();
        assert!(table
            .rows
            .iter()
            .all(|r| r.character == GapCharacter::Indirect && r.g == 2.0));
    }

    #[test]
    fn synthetic_linear_root() {
        let t = find_g_crossing_with(
            |t| {
                Ok(GSample {
                    g: 2.0 - 4.0 * t,
                    character: GapCharacter::Direct,
                })
            },
            [0.0, 1.0],
            0.0,
        )
        .unwrap();
        assert_eq!(t, 0.5);
    }

    #[test]
    fn same_sign_bracket() {
        let e = find_g_crossing_with(
            |t| {
                Ok(GSample {
                    g: 1.0 + t,
                    character: GapCharacter::Direct,
                })
            },
            [0.0, 1.0],
            0.0,
        )
        .unwrap_err();
        assert!(matches!(e, Error::NoSignChange { .. }));
    }

    #[test]
    fn indirect_inside_bracket() {
        let e = find_g_crossing_with(
            |t| {
                let character = if (0.4..0.6).contains(&t) {
                    GapCharacter::Indirect
                } else {
                    GapCharacter::Direct
                };
                Ok(GSample {
                    g: 2.0 - 4.0 * t,
                    character,
                })
            },
            [0.0, 1.0],
            0.0,
        )
        .unwrap_err();
        assert!(matches!(e, Error::IndirectInBracket { .. }));
    }

    #[test]
    fn inp_matched_crossing() {
        let db = default_database();
        let path = lattice_matched_path(&"InGaAsP".parse().unwrap(), 5.86, &db).unwrap();
        let c = find_g_zero(&path, [0.0, 1.0], &db).unwrap();
        assert!(c.residual.abs() < ROOT_RESIDUAL);
        assert!(c.t > 0.0 && c.t < 1.0);
        let p = alloy_params(&c.composition, &db).unwrap();
        assert!(p.eg_gamma > 0.9, "{}", p.eg_gamma);
    }

    #[test]
    fn telecom_window_is_infeasible() {
        let db = default_database();
        let s = solve_design(&ingaasp([0.75, 0.85], 0.1), &db).unwrap();
        assert_eq!(s.status, Feasibility::Infeasible);
        assert!(s.solutions.is_empty());
        assert_eq!(s.certificate.grid_points, 1001);
    }

    #[test]
    fn wide_window_has_one_crossing() {
        let db = default_database();
        let s = solve_design(&ingaasp([0.75, 1.45], 0.1), &db).unwrap();
        assert_eq!(s.status, Feasibility::Feasible);
        assert_eq!(s.solutions.len(), 1);
        assert_eq!(s.solutions[0].kind, SolutionKind::Crossing);
        assert!(s.solutions[0].gfactor.g.abs() < ROOT_RESIDUAL);
    }

    #[test]
    fn vacuous_constraints() {
        let db = default_database();
        let s = solve_design(&ingaasp([0.0, 10.0], 10.0), &db).unwrap();
        assert_eq!(s.status, Feasibility::Feasible);
        assert!(s.certificate.feasible_grid_points > 0);
        assert_eq!(s.certificate.feasible_grid_points, 1001);
    }

    #[test]
    fn grid_only_solution_when_no_crossing() {
        let db = default_database();
        // g on the InP-matched path never reaches 1.5; InP end is within 0.2
        let mut p = ingaasp([1.0, 2.0], 0.2);
        p.g_target = 1.5;
        let s = solve_design(&p, &db).unwrap();
        assert_eq!(s.status, Feasibility::Feasible);
        assert_eq!(s.solutions.len(), 1);
        assert_eq!(s.solutions[0].kind, SolutionKind::GridPoint);
        assert_eq!(s.solutions[0].t, 0.0);
    }

    #[test]
    fn malformed_problems() {
        let db = default_database();
        assert!(solve_design(&ingaasp([0.9, 0.1], 0.1), &db).is_err());
        assert!(solve_design(&ingaasp([0.75, 0.85], 0.0), &db).is_err());
        let mut p = ingaasp([0.75, 0.85], 0.1);
        p.lattice_tolerance = 0.0;
        assert!(solve_design(&p, &db).is_err());
        p = ingaasp([0.75, 0.85], 0.1);
        p.substrate = Substrate::LatticeConstant(7.0);
        assert!(matches!(
            solve_design(&p, &db),
            Err(Error::Unattainable { .. })
        ));
    }

    #[test]
    fn substrate_parsing() {
        assert_eq!(
            "InP".parse::<Substrate>().unwrap(),
            Substrate::Compound("InP".into())
        );
        assert_eq!(
            "5.86".parse::<Substrate>().unwrap(),
            Substrate::LatticeConstant(5.86)
        );
    }
}
