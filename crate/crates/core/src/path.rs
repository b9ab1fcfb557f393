//! Continuous one-parameter families of compositions, `t ∈ [0, 1]`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::composition::{binary_name, tokenize_formula, Anion, Cation, Composition, Element};
use crate::error::{Error, Result};
use crate::params::MaterialsDatabase;

/// Numerical tolerance of the lattice-matched path, relative.
pub const MATCH_TOLERANCE: f64 = 1e-6;

/// An alloy family such as `InGaAsP`: one or two cations, one or two anions.
///
/// For quaternaries the composition is `C1_x C2_(1−x) A1_y A2_(1−y)`, with
/// elements in the order they appear in the identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlloyFamily {
    cations: Vec<Cation>,
    anions: Vec<Anion>,
}

impl AlloyFamily {
    pub fn new(cations: Vec<Cation>, anions: Vec<Anion>) -> Result<Self> {
        let bad = |why: &str| Err(Error::InvalidArgument(format!("alloy family: {why}")));
        if cations.is_empty() || anions.is_empty() {
            return bad("needs at least one cation and one anion");
        }
        if cations.len() > 2 || anions.len() > 2 {
            return bad("at most two cations and two anions");
        }
        if cations.len() == 2 && cations[0] == cations[1]
            || anions.len() == 2 && anions[0] == anions[1]
        {
            return bad("element listed twice");
        }
        Ok(AlloyFamily { cations, anions })
    }

    pub fn cations(&self) -> &[Cation] {
        &self.cations
    }

    pub fn anions(&self) -> &[Anion] {
        &self.anions
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.cations.len() + self.anions.len() - 2
    }

    /// Composition at first-cation fraction `x` and first-anion fraction `y`.
    /// Fractions on a single-element sublattice are ignored.
    pub fn composition(&self, x: f64, y: f64) -> Result<Composition> {
        let cations: Vec<_> = match self.cations[..] {
            [c] => vec![(c, 1.0)],
            [c1, c2] => vec![(c1, x), (c2, 1.0 - x)],
            _ => unreachable!(),
        };
        let anions: Vec<_> = match self.anions[..] {
            [a] => vec![(a, 1.0)],
            [a1, a2] => vec![(a1, y), (a2, 1.0 - y)],
            _ => unreachable!(),
        };
        Composition::new(cations, anions)
    }

    fn corner(&self, ci: usize, ai: usize) -> String {
        let c = self.cations[ci.min(self.cations.len() - 1)];
        let a = self.anions[ai.min(self.anions.len() - 1)];
        binary_name(c, a)
    }
}

impl FromStr for AlloyFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize_formula(s.trim())
            .map_err(|why| Error::InvalidArgument(format!("alloy family `{s}`: {why}")))?;
        let mut cations = Vec::new();
        let mut anions = Vec::new();
        for (element, fraction) in tokens {
            if fraction.is_some() {
                return Err(Error::InvalidArgument(format!(
                    "alloy family `{s}` must not carry fractions"
                )));
            }
            match element {
                Element::Cation(c) => cations.push(c),
                Element::Anion(a) => anions.push(a),
            }
        }
        AlloyFamily::new(cations, anions)
    }
}

impl fmt::Display for AlloyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cations {
            f.write_str(c.symbol())?;
        }
        for a in &self.anions {
            f.write_str(a.symbol())?;
        }
        Ok(())
    }
}

/// Path of compositions lattice-matched to a substrate. `x` (first-cation
/// fraction, or first-anion fraction for a single-cation family) runs
/// linearly from `x_start` at t = 0 to `x_end` at t = 1, and the other
/// fraction solves the Vegard equation at each `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeMatchedPath {
    #[serde(serialize_with = "ser_display")]
    pub family: AlloyFamily,
    pub substrate_a: f64,
    pub x_start: f64,
    pub x_end: f64,
    /// True when the attainable range does not cover the whole `[0, 1]`.
    pub truncated: bool,
    /// Corner lattice constants `[[a(c1 a1), a(c1 a2)], [a(c2 a1), a(c2 a2)]]`.
    corners: [[f64; 2]; 2],
}

fn ser_display<T: fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl LatticeMatchedPath {
    fn x_at(&self, t: f64) -> f64 {
        if t == 0.0 {
            self.x_start
        } else if t == 1.0 {
            self.x_end
        } else {
            self.x_start + t * (self.x_end - self.x_start)
        }
    }

    fn composition_at(&self, t: f64) -> Result<Composition> {
        let x = self.x_at(t);
        match (self.family.cations.len(), self.family.anions.len()) {
            (2, 2) => {
                let y = solve_second(&self.corners, self.substrate_a, x)
                    .ok_or_else(|| self.unattainable())?;
                self.family.composition(x, y)
            }
            (1, 2) => self.family.composition(1.0, x),
            _ => self.family.composition(x, 1.0),
        }
    }

    fn unattainable(&self) -> Error {
        Error::Unattainable {
            family: self.family.to_string(),
            substrate_a: self.substrate_a,
        }
    }
}

/// A continuous map `t ∈ [0, 1] → Composition`.
#[derive(Debug, Clone, PartialEq)]
pub enum CompositionPath {
    /// The same composition for every `t`.
    Point(Composition),
    /// Fractions interpolated affinely between two compositions.
    Linear {
        start: Composition,
        end: Composition,
    },
    LatticeMatched(LatticeMatchedPath),
}

impl CompositionPath {
    pub fn linear(start: Composition, end: Composition) -> Result<Self> {
        let path = CompositionPath::Linear { start, end };
        // reject element sets that cannot form a quaternary at all
        path.at(0.5)?;
        Ok(path)
    }

    pub fn at(&self, t: f64) -> Result<Composition> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "path parameter {t} outside [0, 1]"
            )));
        }
        match self {
            CompositionPath::Point(c) => Ok(c.clone()),
            CompositionPath::Linear { start, end } => {
                if t == 0.0 {
                    return Ok(start.clone());
                }
                if t == 1.0 {
                    return Ok(end.clone());
                }
                let mix = |f0: f64, f1: f64| {
                    if f0 == f1 {
                        f0
                    } else {
                        (1.0 - t) * f0 + t * f1
                    }
                };
                let cations = Cation::ALL
                    .into_iter()
                    .map(|c| (c, mix(start.cation_fraction(c), end.cation_fraction(c))))
                    .filter(|(_, f)| *f != 0.0);
                let anions = Anion::ALL
                    .into_iter()
                    .map(|a| (a, mix(start.anion_fraction(a), end.anion_fraction(a))))
                    .filter(|(_, f)| *f != 0.0);
                Composition::new(cations, anions)
            }
            CompositionPath::LatticeMatched(p) => p.composition_at(t),
        }
    }

    /// True when every `t` maps to the same composition.
    pub fn is_point(&self) -> bool {
        match self {
            CompositionPath::Point(_) => true,
            CompositionPath::Linear { start, end } => start == end,
            CompositionPath::LatticeMatched(p) => p.x_start == p.x_end,
        }
    }

    pub fn description(&self) -> String {
        match self {
            CompositionPath::Point(c) => c.to_string(),
            CompositionPath::Linear { start, end } => format!("{start}..{end}"),
            CompositionPath::LatticeMatched(p) => format!(
                "{} matched to a = {} Å, x from {} to {}",
                p.family, p.substrate_a, p.x_start, p.x_end
            ),
        }
    }
}

impl fmt::Display for CompositionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description())
    }
}

/// Solves `a(x, y) = target` for `y` at fixed `x`; `a` is affine in `y`.
/// Returns `None` when the solution leaves `[0, 1]`.
fn solve_second(corners: &[[f64; 2]; 2], target: f64, x: f64) -> Option<f64> {
    let a_y1 = x * corners[0][0] + (1.0 - x) * corners[1][0];
    let a_y0 = x * corners[0][1] + (1.0 - x) * corners[1][1];
    let slope = a_y1 - a_y0;
    let slack = 1e-12 * target;
    if slope.abs() <= f64::EPSILON * target {
        return ((a_y0 - target).abs() <= slack).then_some(0.0);
    }
    let y = (target - a_y0) / slope;
    let eps = slack / slope.abs();
    if y < -eps || y > 1.0 + eps {
        return None;
    }
    Some(y.clamp(0.0, 1.0))
}

/// Builds the path of compositions in `family` whose Vegard lattice constant
/// equals `substrate_a`.
///
/// Quaternaries give a curve parameterised by the first-cation fraction over
/// the longest attainable interval, starting from its larger end. Ternaries
/// and binaries have at most one matching composition and yield a constant
/// path.
pub fn lattice_matched_path(
    family: &AlloyFamily,
    substrate_a: f64,
    db: &MaterialsDatabase,
) -> Result<CompositionPath> {
    if !(substrate_a > 0.0 && substrate_a.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "substrate lattice constant must be positive, got {substrate_a}"
        )));
    }
    let a = |ci, ai| -> Result<f64> { Ok(db.binary(&family.corner(ci, ai))?.a) };
    let corners = [[a(0, 0)?, a(0, 1)?], [a(1, 0)?, a(1, 1)?]];
    let unattainable = || Error::Unattainable {
        family: family.to_string(),
        substrate_a,
    };

    let (x_start, x_end, truncated) = match (family.cations.len(), family.anions.len()) {
        (2, 2) => {
            let (lo, hi) = attainable_interval(&corners, substrate_a).ok_or_else(unattainable)?;
            (hi, lo, !(lo == 0.0 && hi == 1.0))
        }
        (1, 1) => {
            if ((corners[0][0] - substrate_a) / substrate_a).abs() > MATCH_TOLERANCE {
                return Err(unattainable());
            }
            (1.0, 1.0, false)
        }
        // ternary: a = x·a1 + (1 − x)·a2 along the mixed sublattice
        (nc, _) => {
            let (a1, a2) = if nc == 2 {
                (corners[0][0], corners[1][0])
            } else {
                (corners[0][0], corners[0][1])
            };
            let x = if a1 == a2 {
                if ((a1 - substrate_a) / substrate_a).abs() > MATCH_TOLERANCE {
                    return Err(unattainable());
                }
                1.0
            } else {
                let x = (substrate_a - a2) / (a1 - a2);
                let eps = 1e-12 * substrate_a / (a1 - a2).abs();
                if !(-eps..=1.0 + eps).contains(&x) {
                    return Err(unattainable());
                }
                x.clamp(0.0, 1.0)
            };
            (x, x, false)
        }
    };
    let path = LatticeMatchedPath {
        family: family.clone(),
        substrate_a,
        x_start,
        x_end,
        truncated,
        corners,
    };
    Ok(CompositionPath::LatticeMatched(path))
}

/// Longest closed `x` interval on which the quaternary can be matched.
/// Ties go to the interval with the larger `x`.
fn attainable_interval(corners: &[[f64; 2]; 2], target: f64) -> Option<(f64, f64)> {
    // feasibility can only change where y(x) hits 0 or 1 or the slope vanishes
    let mut breaks = vec![0.0, 1.0];
    let lin = |p: f64, q: f64| {
        // root of x·p + (1 − x)·q = target
        if p != q {
            Some((target - q) / (p - q))
        } else {
            None
        }
    };
    breaks.extend(lin(corners[0][0], corners[1][0]));
    breaks.extend(lin(corners[0][1], corners[1][1]));
    let (d0, d1) = (corners[0][0] - corners[0][1], corners[1][0] - corners[1][1]);
    if d0 != d1 {
        breaks.push(d1 / (d1 - d0));
    }
    breaks.retain(|x| (0.0..=1.0).contains(x));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let ok = |x: f64| solve_second(corners, target, x).is_some();
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<f64> = None;
    for (i, &x) in breaks.iter().enumerate() {
        let here = ok(x);
        let prev_seg = i > 0 && ok(0.5 * (breaks[i - 1] + x));
        match (open, here) {
            (None, true) => open = Some(x),
            (Some(start), true) if !prev_seg => {
                intervals.push((start, breaks[i - 1]));
                open = Some(x);
            }
            (Some(start), false) => {
                intervals.push((start, breaks[i - 1]));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        intervals.push((start, *breaks.last()?));
    }
    intervals.into_iter().max_by(|p, q| {
        (p.1 - p.0)
            .total_cmp(&(q.1 - q.0))
            .then(p.1.total_cmp(&q.1))
    })
}
